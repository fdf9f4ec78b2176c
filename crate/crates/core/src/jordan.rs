//! Slice operators, Jordan types, and the Jordan-module filtration.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::module::PersModule;
use crate::par;
use crate::poset::{minkowski_window, validate_slices, Point, SliceSequence};
use crate::rank::{box_of, RankInvariantTable};

/// The matrix `⊕_{x in from} M_{x+o} -> ⊕_{y in to} M_{y+o}` whose `(y, x)` block is
/// `M_{y+o, x+o}` when `x < y` and zero otherwise. Both lists are taken in order.
pub(crate) fn slice_block(m: &PersModule, from: &[Point], to: &[Point], offset: Option<&Point>) -> FieldMatrix {
    let shift = |p: &Point| match offset {
        Some(o) => p.plus(o),
        None => p.clone(),
    };
    let from_s: Vec<Point> = from.iter().map(shift).collect();
    let to_s: Vec<Point> = to.iter().map(shift).collect();
    let cd: Vec<usize> = from_s.iter().map(|p| m.dim_at(p)).collect();
    let rd: Vec<usize> = to_s.iter().map(|p| m.dim_at(p)).collect();
    let mut out = FieldMatrix::zeros(m.field(), rd.iter().sum(), cd.iter().sum());
    let mut r0 = 0;
    for (b, y) in to.iter().enumerate() {
        let mut c0 = 0;
        for (a, x) in from.iter().enumerate() {
            if rd[b] > 0 && cd[a] > 0 && m.poset().lt(x, y).expect("slice points are validated") {
                let blk = m.cached_map(&from_s[a], &to_s[b]);
                for i in 0..rd[b] {
                    for j in 0..cd[a] {
                        out.set(r0 + i, c0 + j, blk.get(i, j));
                    }
                }
            }
            c0 += cd[a];
        }
        r0 += rd[b];
    }
    out
}

fn check_slices(m: &PersModule, s: &SliceSequence) -> Result<()> {
    s.check_len()?;
    validate_slices(m.poset(), s, false)?;
    Ok(())
}

/// `T_{M,S}`: block subdiagonal, block `i` mapping `⊕ S_i` to `⊕ S_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentOperator {
    pub slice_dims: Vec<usize>,
    pub blocks: Vec<FieldMatrix>,
    pub assembled: FieldMatrix,
}

impl NilpotentOperator {
    fn build(m: &PersModule, s: &SliceSequence, offset: Option<&Point>) -> Self {
        let slice_dims: Vec<usize> = s
            .slices()
            .iter()
            .map(|sl| sl.iter().map(|p| m.dim_at(&offset.map_or_else(|| p.clone(), |o| p.plus(o)))).sum())
            .collect();
        let blocks: Vec<FieldMatrix> =
            (0..s.len() - 1).map(|i| slice_block(m, s.slice(i), s.slice(i + 1), offset)).collect();
        let total: usize = slice_dims.iter().sum();
        let mut assembled = FieldMatrix::zeros(m.field(), total, total);
        let mut c0 = 0;
        for (i, b) in blocks.iter().enumerate() {
            let r0 = c0 + slice_dims[i];
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    assembled.set(r0 + r, c0 + c, b.get(r, c));
                }
            }
            c0 = r0;
        }
        NilpotentOperator { slice_dims, blocks, assembled }
    }

    pub fn total_dim(&self) -> usize {
        self.assembled.rows()
    }

    pub fn n(&self) -> usize {
        self.slice_dims.len()
    }

    /// `rank(T^k)` for `k = 0..=n`.
    pub fn power_ranks(&self) -> Vec<usize> {
        let mut out = vec![self.total_dim()];
        let mut p = FieldMatrix::identity(self.assembled.field(), self.total_dim());
        for _ in 0..self.n() {
            p = &self.assembled * &p;
            out.push(p.rank());
        }
        out
    }

    pub fn jordan_type(&self) -> JordanType {
        let r = self.power_ranks();
        let n = self.n();
        let at = |k: usize| if k <= n { r[k] as i64 } else { 0 };
        let counts = (1..=n)
            .map(|i| {
                let a = at(i + 1) + at(i - 1) - 2 * at(i);
                debug_assert!(a >= 0);
                a as u64
            })
            .collect();
        JordanType { counts }
    }
}

pub fn nilpotent_operator(m: &PersModule, s: &SliceSequence) -> Result<NilpotentOperator> {
    check_slices(m, s)?;
    Ok(NilpotentOperator::build(m, s, None))
}

/// Number of Jordan blocks of each size `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct JordanType {
    pub counts: Vec<u64>,
}

impl JordanType {
    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// `Σ i·a_i`.
    pub fn total_dim(&self) -> u64 {
        self.counts.iter().enumerate().map(|(i, a)| (i as u64 + 1) * a).sum()
    }

    pub fn add(&self, other: &JordanType) -> Result<JordanType> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(self.n(), other.n()));
        }
        Ok(JordanType { counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect() })
    }
}

impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Jordan type from ranks of powers of the assembled operator:
/// `a_i = rank T^{i+1} + rank T^{i-1} - 2 rank T^i` with `rank T^0 = D`.
pub fn jordan_type(m: &PersModule, s: &SliceSequence) -> Result<JordanType> {
    Ok(nilpotent_operator(m, s)?.jordan_type())
}

/// Counts bars by length in the interval decomposition of the equioriented
/// chain `V_1 -> ... -> V_n` formed by the subdiagonal blocks, using
/// `m[a,b] = r(a,b) - r(a-1,b) - r(a,b+1) + r(a-1,b+1)` on composite ranks.
pub fn an_decomposition_counts(m: &PersModule, s: &SliceSequence) -> Result<Vec<u64>> {
    let op = nilpotent_operator(m, s)?;
    let n = op.n();
    // r[a][b], 0-based, a <= b
    let mut r = vec![vec![0i64; n]; n];
    for a in 0..n {
        r[a][a] = op.slice_dims[a] as i64;
        let mut comp = FieldMatrix::identity(m.field(), op.slice_dims[a]);
        for b in a + 1..n {
            comp = &op.blocks[b - 1] * &comp;
            r[a][b] = comp.rank() as i64;
        }
    }
    let get = |a: isize, b: usize| -> i64 {
        if a < 0 || b >= n {
            0
        } else {
            r[a as usize][b]
        }
    };
    let mut counts = vec![0u64; n];
    for a in 0..n {
        for b in a..n {
            let mult =
                get(a as isize, b) - get(a as isize - 1, b) - get(a as isize, b + 1) + get(a as isize - 1, b + 1);
            if mult < 0 {
                return Err(Error::NegativeMultiplicity { index: b - a, value: mult.to_string() });
            }
            counts[b - a] += mult as u64;
        }
    }
    Ok(counts)
}

/// The degree-`i` Jordan modules `M^i_S` of a grid module, materialized on the
/// Minkowski window of the slices: at `x`, level `i` is a canonical basis of
/// the image of `T^i_{M[x],S}` inside `⊕_{z in S} M_{x+z}`.
#[derive(Clone, Debug)]
pub struct JordanModuleFamily {
    base: PersModule,
    slices: SliceSequence,
    window: Vec<Point>,
    index: HashMap<Point, usize>,
    levels: Vec<Vec<FieldMatrix>>,
}

pub fn jordan_module_family(m: &PersModule, s: &SliceSequence) -> Result<JordanModuleFamily> {
    let g = m.grid().ok_or(Error::WrongPosetKind("grid"))?;
    check_slices(m, s)?;
    let window = minkowski_window(g, s);
    m.structure_maps();
    let n = s.len();
    let levels = par::map(&window, |x| {
        let t = NilpotentOperator::build(m, s, Some(x)).assembled;
        let mut out = Vec::with_capacity(n + 1);
        let mut p = FieldMatrix::identity(m.field(), t.rows());
        out.push(p.clone());
        for _ in 0..n {
            p = &t * &p;
            out.push(p.image_basis());
        }
        out
    });
    let index = window.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(JordanModuleFamily { base: m.clone(), slices: s.clone(), window, index, levels })
}

impl JordanModuleFamily {
    pub fn n(&self) -> usize {
        self.slices.len()
    }

    pub fn base(&self) -> &PersModule {
        &self.base
    }

    pub fn slices(&self) -> &SliceSequence {
        &self.slices
    }

    /// Points where some level may be nonzero, sorted.
    pub fn window(&self) -> &[Point] {
        &self.window
    }

    pub fn ambient_dim(&self, x: &Point) -> usize {
        self.slices.points().map(|z| self.base.dim_at(&x.plus(z))).sum()
    }

    /// Basis of level `i` at `x` as columns in the ambient space.
    pub fn level(&self, i: usize, x: &Point) -> FieldMatrix {
        assert!(i <= self.n(), "level {i} beyond n = {}", self.n());
        match self.index.get(x) {
            Some(&k) => self.levels[k][i].clone(),
            None => FieldMatrix::zeros(self.base.field(), self.ambient_dim(x), 0),
        }
    }

    pub fn level_dim(&self, i: usize, x: &Point) -> usize {
        self.index.get(x).map_or(0, |&k| self.levels[k][i].cols())
    }

    /// `⊕_{z in S} M_{y+z, x+z}` for `x <= y`.
    pub fn ambient_map(&self, x: &Point, y: &Point) -> FieldMatrix {
        let parts: Vec<FieldMatrix> =
            self.slices.points().map(|z| self.base.cached_map(&x.plus(z), &y.plus(z))).collect();
        FieldMatrix::block_diag(self.base.field(), parts.iter())
    }

    /// `rank (M^i_S)_{y,x}`.
    pub fn rank(&self, i: usize, x: &Point, y: &Point) -> u64 {
        (&self.ambient_map(x, y) * &self.level(i, x)).rank() as u64
    }

    /// `(M^i_S)_{y,x}` in the level bases at `x` and `y`.
    pub fn induced_map(&self, i: usize, x: &Point, y: &Point) -> Result<FieldMatrix> {
        if !x.componentwise_le(y) {
            return Err(Error::NotComparable(x.to_string(), y.to_string()));
        }
        let image = &self.ambient_map(x, y) * &self.level(i, x);
        self.level(i, y)
            .solve(&image)?
            .ok_or_else(|| Error::InvalidModule(format!("level {i} at ({x}) does not map into level {i} at ({y})")))
    }

    /// Rank tables of `M^0_S, ..., M^{n-1}_S` over the bounding box of the window.
    pub fn rank_tables(&self) -> Vec<RankInvariantTable> {
        let n = self.n();
        let bx = box_of(&self.window);
        let pts = bx.points();
        let len = pts.len();
        let rows: Vec<Vec<Vec<u64>>> = par::map_range(0..len, |a| {
            let x = &pts[a];
            let mut row = vec![vec![0u64; len]; n];
            if !self.index.contains_key(x) {
                return row;
            }
            for (b, y) in pts.iter().enumerate() {
                if !x.componentwise_le(y) || !self.index.contains_key(y) {
                    continue;
                }
                let amb = self.ambient_map(x, y);
                for (i, r) in row.iter_mut().enumerate() {
                    if self.level_dim(i, x) == 0 {
                        break;
                    }
                    r[b] = (&amb * &self.level(i, x)).rank() as u64;
                }
            }
            row
        });
        (0..n)
            .map(|i| {
                let mut t = RankInvariantTable::zero(bx.clone());
                for (a, row) in rows.iter().enumerate() {
                    for (b, &v) in row[i].iter().enumerate() {
                        if v > 0 {
                            t.set(&pts[a], &pts[b], v).expect("comparable pair in box");
                        }
                    }
                }
                t
            })
            .collect()
    }
}

/// Rank invariants of the Jordan modules of degrees `0..n`.
pub fn filtered_rank(m: &PersModule, s: &SliceSequence) -> Result<Vec<RankInvariantTable>> {
    Ok(jordan_module_family(m, s)?.rank_tables())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{counterexample_pair, worked_example};
    use crate::field::PrimeField;
    use crate::poset::{norm_slices, GridPoset, Poset, ZigzagPoset};

    fn pts(v: &[[i64; 2]]) -> Vec<Point> {
        v.iter().map(|c| Point::from(*c)).collect()
    }

    fn worked_slices() -> SliceSequence {
        SliceSequence::new(vec![pts(&[[0, 1], [1, 0]]), pts(&[[1, 1], [2, 0]]), pts(&[[2, 1]])])
    }

    #[test]
    fn worked_example_operator() {
        let m = worked_example();
        let op = nilpotent_operator(&m, &worked_slices()).unwrap();
        assert_eq!(op.slice_dims, vec![2, 3, 1]);
        assert_eq!(op.blocks[0].to_signed_rows(), vec![vec![0, 1], vec![1, 0], vec![0, 1]]);
        assert_eq!(op.blocks[1].to_signed_rows(), vec![vec![1, 1, 1]]);
        assert_eq!(op.power_ranks(), vec![6, 3, 1, 0]);
        assert!(op.assembled.pow(3).is_zero());
        assert_eq!(op.jordan_type().counts, vec![1, 1, 1]);
        assert_eq!(an_decomposition_counts(&m, &worked_slices()).unwrap(), vec![1, 1, 1]);
        assert_eq!(jordan_type(&m, &worked_slices()).unwrap().to_string(), "(1,1,1)");
    }

    #[test]
    fn zero_and_disconnected_operators() {
        let p = Poset::grid(GridPoset::new([2, 1]));
        let z = PersModule::zero(p.clone(), PrimeField::default());
        let op = nilpotent_operator(&z, &worked_slices()).unwrap();
        assert_eq!(op.assembled.shape(), (0, 0));
        assert_eq!(op.jordan_type().counts, vec![0, 0, 0]);
        // consecutive slices with no comparable pairs
        let s = SliceSequence::new(vec![pts(&[[2, 0]]), pts(&[[0, 1]])]);
        let m = PersModule::constant(p, PrimeField::default(), 2);
        let op = nilpotent_operator(&m, &s).unwrap();
        assert!(op.assembled.is_zero());
        assert_eq!(op.total_dim(), 4);
        assert_eq!(op.jordan_type().counts, vec![4, 0]);
        assert_eq!(an_decomposition_counts(&m, &s).unwrap(), vec![4, 0]);
    }

    #[test]
    fn slice_errors() {
        let m = worked_example();
        let overlap = SliceSequence::new(vec![pts(&[[0, 1]]), pts(&[[0, 1], [1, 1]])]);
        assert!(matches!(nilpotent_operator(&m, &overlap), Err(Error::OverlappingSlices(1, 2, _))));
        let short = SliceSequence::new(vec![pts(&[[0, 1]])]);
        assert_eq!(nilpotent_operator(&m, &short), Err(Error::TooFewSlices(1)));
    }

    #[test]
    fn planted_chain_barcode() {
        // I_[1,3] ⊕ I_[2,2] on 1 -> 2 -> 3 -> 4 -> 5 with singleton slices
        let f = PrimeField::default();
        let z = ZigzagPoset::equioriented(5);
        let m =
            PersModule::interval(&z, f, 1, 3).unwrap().direct_sum(&PersModule::interval(&z, f, 2, 2).unwrap()).unwrap();
        let s = SliceSequence::singletons((1..=5).map(|k| Point::from([k])));
        assert_eq!(jordan_type(&m, &s).unwrap().counts, vec![1, 0, 1, 0, 0]);
        assert_eq!(an_decomposition_counts(&m, &s).unwrap(), vec![1, 0, 1, 0, 0]);
    }

    #[test]
    fn family_levels() {
        let m = worked_example();
        let s = norm_slices(m.grid().unwrap());
        let fam = jordan_module_family(&m, &s).unwrap();
        for x in fam.window() {
            assert_eq!(fam.level_dim(0, x), fam.ambient_dim(x));
            assert_eq!(fam.level_dim(fam.n(), x), 0);
            for i in 0..fam.n() {
                let upper = fam.level(i + 1, x);
                let lower = fam.level(i, x);
                // containment: appending the next level does not raise the rank
                assert_eq!(FieldMatrix::hstack(&[&lower, &upper]).unwrap().rank(), lower.cols());
            }
        }
        assert_eq!(fam.level_dim(0, &Point::from([50, 50])), 0);
    }

    #[test]
    fn counterexample_separated_in_degree_one() {
        let (x, y) = counterexample_pair();
        let s = norm_slices(x.grid().unwrap());
        let o = Point::from([0, 0]);
        let fx = jordan_module_family(&x, &s).unwrap();
        let fy = jordan_module_family(&y, &s).unwrap();
        assert_eq!(fx.level_dim(1, &o), 1);
        assert_eq!(fy.level_dim(1, &o), 2);
        assert_eq!(fx.rank(1, &o, &o), 1);
        assert_eq!(fy.rank(1, &o, &o), 2);
        let tx = filtered_rank(&x, &s).unwrap();
        let ty = filtered_rank(&y, &s).unwrap();
        assert_eq!(tx[1].get(&o, &o), crate::rank::RankValue::Finite(1));
        assert_eq!(ty[1].get(&o, &o), crate::rank::RankValue::Finite(2));
    }

    #[test]
    fn degree_zero_is_the_summed_rank() {
        let p = Poset::grid(GridPoset::new([2, 2]));
        for seed in 0..5 {
            let m = PersModule::random(&p, PrimeField::default(), 2, seed);
            let s = norm_slices(m.grid().unwrap());
            let fam = jordan_module_family(&m, &s).unwrap();
            let tables = fam.rank_tables();
            for x in fam.window() {
                for y in fam.window() {
                    if !x.componentwise_le(y) {
                        continue;
                    }
                    let direct: u64 =
                        s.points().map(|z| m.structure_map(&x.plus(z), &y.plus(z)).unwrap().rank() as u64).sum();
                    assert_eq!(tables[0].finite(x, y), direct);
                    for i in 0..fam.n() {
                        assert!(fam.induced_map(i, x, y).is_ok());
                    }
                }
            }
            for t in &tables {
                assert!(t.is_monotone());
            }
        }
    }

    #[test]
    fn family_needs_a_grid() {
        let m = PersModule::interval(&ZigzagPoset::equioriented(3), PrimeField::default(), 1, 2).unwrap();
        let s = SliceSequence::singletons((1..=3).map(|k| Point::from([k])));
        assert!(matches!(jordan_module_family(&m, &s), Err(Error::WrongPosetKind(_))));
    }
}
