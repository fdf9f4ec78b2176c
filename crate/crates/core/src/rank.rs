//! Rank functions `(x, y) -> N ∪ {∞}` on Z^d, stored densely over a box.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::module::PersModule;
use crate::par;
use crate::poset::{GridPoset, Point};

/// A rank value; `Infinite` is the top element and marks incomparable pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RankValue {
    Finite(u64),
    Infinite,
}

impl Ord for RankValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RankValue::Finite(a), RankValue::Finite(b)) => a.cmp(b),
            (RankValue::Finite(_), RankValue::Infinite) => Ordering::Less,
            (RankValue::Infinite, RankValue::Finite(_)) => Ordering::Greater,
            (RankValue::Infinite, RankValue::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for RankValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::Finite(v) => write!(f, "{v}"),
            RankValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for RankValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RankValue::Finite(v) => s.serialize_u64(*v),
            RankValue::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRecord {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub value: RankValue,
}

/// Values on comparable pairs inside `window`; zero on comparable pairs with
/// an endpoint outside it, infinite on incomparable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankInvariantTable {
    window: GridPoset,
    values: Vec<u64>,
}

impl RankInvariantTable {
    /// Evaluates `f` on every comparable pair of the window, in parallel over `x`.
    pub fn from_fn<F>(window: GridPoset, f: F) -> Self
    where
        F: Fn(&Point, &Point) -> u64 + Sync + Send,
    {
        let n = window.len();
        let pts = window.points();
        let rows = par::map_range(0..n, |a| {
            let x = &pts[a];
            pts.iter().map(|y| if x.componentwise_le(y) { f(x, y) } else { 0 }).collect::<Vec<u64>>()
        });
        RankInvariantTable { window, values: rows.into_iter().flatten().collect() }
    }

    pub fn zero(window: GridPoset) -> Self {
        let n = window.len();
        RankInvariantTable { window, values: vec![0; n * n] }
    }

    pub fn window(&self) -> &GridPoset {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn get(&self, x: &Point, y: &Point) -> RankValue {
        if !x.componentwise_le(y) {
            return RankValue::Infinite;
        }
        RankValue::Finite(self.finite(x, y))
    }

    /// Value at a pair known to be comparable.
    pub(crate) fn finite(&self, x: &Point, y: &Point) -> u64 {
        match (self.window.index_of(x), self.window.index_of(y)) {
            (Some(a), Some(b)) => self.values[a * self.window.len() + b],
            _ => 0,
        }
    }

    /// Sets a value inside the window; used to build tables by hand.
    pub fn set(&mut self, x: &Point, y: &Point, v: u64) -> Result<()> {
        if !x.componentwise_le(y) {
            return Err(Error::NotComparable(x.to_string(), y.to_string()));
        }
        let (Some(a), Some(b)) = (self.window.index_of(x), self.window.index_of(y)) else {
            return Err(Error::RangeError(format!("({x}, {y}) outside the table window")));
        };
        let n = self.window.len();
        self.values[a * n + b] = v;
        Ok(())
    }

    /// Comparable pairs with a nonzero value.
    pub fn support(&self) -> Vec<(Point, Point, u64)> {
        let pts = self.window.points();
        let n = pts.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let v = self.values[a * n + b];
                if v > 0 && pts[a].componentwise_le(&pts[b]) {
                    out.push((pts[a].clone(), pts[b].clone(), v));
                }
            }
        }
        out
    }

    pub fn max_value(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Largest diagonal value `F(x, x)`.
    pub fn max_diagonal(&self) -> u64 {
        let n = self.window.len();
        (0..n).map(|a| self.values[a * n + a]).max().unwrap_or(0)
    }

    /// Every comparable pair of the window with its value.
    pub fn records(&self) -> Vec<TableRecord> {
        let pts = self.window.points();
        let n = pts.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if pts[a].componentwise_le(&pts[b]) {
                    out.push(TableRecord {
                        x: pts[a].0.clone(),
                        y: pts[b].0.clone(),
                        value: RankValue::Finite(self.values[a * n + b]),
                    });
                }
            }
        }
        out
    }

    /// First unit step `(x, y) -> (x', y')` with `x <= x' <= y' <= y` that
    /// increases the value, if any. Unit steps suffice because any such
    /// shrinking is a chain of them, and pairs leaving the box read as 0.
    pub fn monotonicity_violation(&self) -> Option<(Point, Point, Point, Point)> {
        let pts = self.window.points();
        for x in &pts {
            for y in &pts {
                if !x.componentwise_le(y) {
                    continue;
                }
                let v = self.finite(x, y);
                for k in 0..self.dim() {
                    let mut x2 = x.clone();
                    x2.0[k] += 1;
                    if x2.componentwise_le(y) && self.finite(&x2, y) < v {
                        return Some((x.clone(), y.clone(), x2, y.clone()));
                    }
                    let mut y2 = y.clone();
                    y2.0[k] -= 1;
                    if x.componentwise_le(&y2) && self.finite(x, &y2) < v {
                        return Some((x.clone(), y.clone(), x.clone(), y2));
                    }
                }
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    /// Equality as functions on Z^d x Z^d, regardless of the stored windows.
    pub fn same_function(&self, other: &RankInvariantTable) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let bx = bounding_box(&[&self.window, &other.window]);
        let pts = bx.points();
        pts.iter()
            .all(|x| pts.iter().filter(|y| x.componentwise_le(y)).all(|y| self.finite(x, y) == other.finite(x, y)))
    }

    /// Pointwise `self <= other` on comparable pairs.
    pub fn dominated_by(&self, other: &RankInvariantTable) -> bool {
        self.support().iter().all(|(x, y, v)| *v <= other.finite(x, y))
    }
}

/// Smallest box containing all the given boxes.
pub fn bounding_box(boxes: &[&GridPoset]) -> GridPoset {
    let d = boxes[0].dim();
    let lower: Vec<i64> = (0..d).map(|k| boxes.iter().map(|g| g.lower().0[k]).min().unwrap()).collect();
    let upper: Vec<i64> = (0..d).map(|k| boxes.iter().map(|g| g.upper().0[k]).max().unwrap()).collect();
    let shape: Vec<usize> = lower.iter().zip(&upper).map(|(l, u)| (u - l) as usize).collect();
    GridPoset::with_lower(lower, shape).expect("boxes share a dimension")
}

/// Smallest box containing a nonempty set of points.
pub fn box_of(points: &[Point]) -> GridPoset {
    let d = points[0].dim();
    let lower: Vec<i64> = (0..d).map(|k| points.iter().map(|p| p.0[k]).min().unwrap()).collect();
    let upper: Vec<i64> = (0..d).map(|k| points.iter().map(|p| p.0[k]).max().unwrap()).collect();
    let shape: Vec<usize> = lower.iter().zip(&upper).map(|(l, u)| (u - l) as usize).collect();
    GridPoset::with_lower(lower, shape).expect("points share a dimension")
}

/// The classical rank invariant `(x, y) -> rank M_{yx}` of a grid module.
pub fn rank_invariant(m: &PersModule) -> Result<RankInvariantTable> {
    let g = m.grid().ok_or(Error::WrongPosetKind("grid"))?.clone();
    m.structure_maps();
    Ok(RankInvariantTable::from_fn(g, |x, y| m.cached_map(x, y).rank() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{counterexample_pair, line_interval, worked_example};
    use crate::field::PrimeField;
    use crate::poset::Poset;

    #[test]
    fn zero_module_table() {
        let p = Poset::grid(GridPoset::new([2, 1]));
        let m = PersModule::zero(p, PrimeField::default());
        let t = rank_invariant(&m).unwrap();
        assert_eq!(t.max_value(), 0);
        assert!(t.support().is_empty());
    }

    #[test]
    fn interval_table() {
        let t = rank_invariant(&line_interval(PrimeField::default(), 0, 3)).unwrap();
        for x in -2..6 {
            for y in x..7 {
                let want = u64::from(0 <= x && y <= 3);
                assert_eq!(t.get(&Point::from([x]), &Point::from([y])), RankValue::Finite(want));
            }
        }
        assert_eq!(t.get(&Point::from([2]), &Point::from([1])), RankValue::Infinite);
    }

    #[test]
    fn counterexample_pair_has_equal_rank_invariants() {
        let (x, y) = counterexample_pair();
        let tx = rank_invariant(&x).unwrap();
        let ty = rank_invariant(&y).unwrap();
        assert_eq!(tx, ty);
        assert!(tx.same_function(&ty));
    }

    #[test]
    fn incomparable_pairs_are_infinite() {
        let t = rank_invariant(&worked_example()).unwrap();
        assert_eq!(t.get(&Point::from([1, 0]), &Point::from([0, 1])), RankValue::Infinite);
        assert!(RankValue::Infinite > RankValue::Finite(u64::MAX));
        assert_eq!(serde_json::to_string(&RankValue::Infinite).unwrap(), "\"inf\"");
    }

    #[test]
    fn module_tables_are_monotone() {
        let p = Poset::grid(GridPoset::new([3, 2]));
        for seed in 0..10 {
            let m = PersModule::random(&p, PrimeField::default(), 3, seed);
            assert!(rank_invariant(&m).unwrap().is_monotone());
        }
    }

    #[test]
    fn non_monotone_table_is_caught() {
        let mut t = RankInvariantTable::zero(GridPoset::new([3]));
        t.set(&Point::from([0]), &Point::from([3]), 1).unwrap();
        let v = t.monotonicity_violation().unwrap();
        assert_eq!((v.0, v.1), (Point::from([0]), Point::from([3])));
        assert!(t.set(&Point::from([3]), &Point::from([0]), 1).is_err());
    }

    #[test]
    fn same_function_ignores_padding() {
        let f = PrimeField::default();
        let a = rank_invariant(&line_interval(f, 0, 3)).unwrap();
        let mut b = RankInvariantTable::zero(GridPoset::with_lower([-2], [8]).unwrap());
        for x in 0..=3 {
            for y in x..=3 {
                b.set(&Point::from([x]), &Point::from([y]), 1).unwrap();
            }
        }
        assert!(a.same_function(&b));
        assert!(a.dominated_by(&b) && b.dominated_by(&a));
    }
}
