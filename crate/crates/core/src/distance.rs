//! Erosion distance between rank tables, integer landscapes, and the
//! landscape / erosion / interleaving chain at a slice sequence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom::{interleaving_issues, InterleavingCertificate};
use crate::jordan::filtered_rank;
use crate::module::PersModule;
use crate::par;
use crate::poset::{GridPoset, Point, SliceSequence};
use crate::rank::{bounding_box, RankInvariantTable, RankValue};

/// Which erosion inequality a witness breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `F(x - e, y + e) > G(x, y)`
    FirstIntoSecond,
    /// `G(x - e, y + e) > F(x, y)`
    SecondIntoFirst,
}

/// A pair `(x, y)` at which the erosion condition for `epsilon` fails:
/// the eroded value exceeds the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErosionWitness {
    pub epsilon: u64,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub direction: Direction,
    pub eroded: u64,
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErosionResult {
    pub value: RankValue,
    /// For a value `v > 0`, a violation of the conditions at `v - 1`.
    pub witness: Option<ErosionWitness>,
}

fn one_way(f: &RankInvariantTable, g: &RankInvariantTable, eps: u64, dir: Direction) -> Option<ErosionWitness> {
    let e = eps as i64;
    for (a, b, v) in f.support() {
        let x = a.offset(e);
        let y = b.offset(-e);
        if !x.componentwise_le(&y) {
            continue;
        }
        let bound = g.finite(&x, &y);
        if v > bound {
            return Some(ErosionWitness { epsilon: eps, x: x.0, y: y.0, direction: dir, eroded: v, bound });
        }
    }
    None
}

/// First violated erosion inequality at `eps`, or `None` if both hold.
///
/// Only pairs with `F(x - e, y + e) > 0` can fail, so it is enough to range
/// over the support of each table shifted inward by `e`.
pub fn erosion_violation(f: &RankInvariantTable, g: &RankInvariantTable, eps: u64) -> Option<ErosionWitness> {
    one_way(f, g, eps, Direction::FirstIntoSecond).or_else(|| one_way(g, f, eps, Direction::SecondIntoFirst))
}

/// Smallest integer `e >= 0` with `F(x-e, y+e) <= G(x, y)` and
/// `G(x-e, y+e) <= F(x, y)` for all `x <= y`.
///
/// The search stops at the l∞-diameter of the union of supports plus one: past
/// half the diameter no support pair survives erosion, so every constraint is
/// vacuous there. Infinity is reported only if that bound is exhausted.
pub fn erosion_distance(f: &RankInvariantTable, g: &RankInvariantTable) -> Result<ErosionResult> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let pts: Vec<Point> = f.support().into_iter().chain(g.support()).flat_map(|(a, b, _)| [a, b]).collect();
    if pts.is_empty() {
        return Ok(ErosionResult { value: RankValue::Finite(0), witness: None });
    }
    let diameter = (0..f.dim())
        .map(|k| {
            let lo = pts.iter().map(|p| p.0[k]).min().unwrap();
            let hi = pts.iter().map(|p| p.0[k]).max().unwrap();
            (hi - lo) as u64
        })
        .max()
        .unwrap_or(0);
    let candidates: Vec<u64> = (0..=diameter + 1).collect();
    let found = par::find_first(&candidates, |&e| erosion_violation(f, g, e).is_none().then_some(e));
    Ok(match found {
        Some(0) => ErosionResult { value: RankValue::Finite(0), witness: None },
        Some(e) => ErosionResult { value: RankValue::Finite(e), witness: erosion_violation(f, g, e - 1) },
        None => ErosionResult { value: RankValue::Infinite, witness: erosion_violation(f, g, diameter + 1) },
    })
}

/// Integer landscape: `λ(k, x) = 0` if `F(x, x) < k`, otherwise one more than
/// the largest `e` with `F(x - h, x + h) >= k` for every `h` in `[0, e]^d`.
/// Negative `h` give incomparable pairs, whose value is infinite, so they
/// never constrain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Landscape {
    k_max: u64,
    window: GridPoset,
    values: Vec<u64>,
}

/// Nonnegative `h` with `max h = r`.
fn shell(d: usize, r: i64) -> Vec<Point> {
    let mut out = Vec::new();
    let mut h = vec![0i64; d];
    loop {
        if h.iter().copied().max() == Some(r) {
            out.push(Point(h.clone()));
        }
        let mut k = 0;
        while k < d {
            h[k] += 1;
            if h[k] <= r {
                break;
            }
            h[k] = 0;
            k += 1;
        }
        if k == d {
            return out;
        }
    }
}

pub fn landscape(f: &RankInvariantTable, k_max: u64) -> Landscape {
    let window = f.window().clone();
    let d = window.dim();
    let pts = window.points();
    let n = pts.len();
    let rows: Vec<Vec<u64>> = par::map_range(1..k_max as usize + 1, |k| {
        let k = k as u64;
        pts.iter()
            .map(|x| {
                if f.finite(x, x) < k {
                    return 0;
                }
                let mut e = 0i64;
                loop {
                    let next = e + 1;
                    if shell(d, next).iter().any(|h| f.finite(&x.minus(h), &x.plus(h)) < k) {
                        break;
                    }
                    e = next;
                }
                e as u64 + 1
            })
            .collect()
    });
    debug_assert!(rows.iter().all(|r| r.len() == n));
    Landscape { k_max, window, values: rows.into_iter().flatten().collect() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LandscapeRecord {
    pub k: u64,
    pub x: Vec<i64>,
    pub value: u64,
}

impl Landscape {
    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    pub fn window(&self) -> &GridPoset {
        &self.window
    }

    pub fn get(&self, k: u64, x: &Point) -> u64 {
        if k == 0 || k > self.k_max {
            return 0;
        }
        self.window.index_of(x).map_or(0, |i| self.values[(k as usize - 1) * self.window.len() + i])
    }

    /// `max_{k, x} |λ(k, x) - μ(k, x)|` over both windows.
    pub fn sup_distance(&self, other: &Landscape) -> u64 {
        let bx = bounding_box(&[&self.window, &other.window]);
        let k_max = self.k_max.max(other.k_max);
        let pts = bx.points();
        (1..=k_max)
            .flat_map(|k| pts.iter().map(move |x| (k, x)))
            .map(|(k, x)| self.get(k, x).abs_diff(other.get(k, x)))
            .max()
            .unwrap_or(0)
    }

    pub fn records(&self) -> Vec<LandscapeRecord> {
        let pts = self.window.points();
        (1..=self.k_max)
            .flat_map(|k| pts.iter().map(move |x| LandscapeRecord { k, x: x.0.clone(), value: self.get(k, x) }))
            .collect()
    }

    /// `k,x1,...,xd,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let d = self.window.dim();
        let mut out = String::from("k");
        for i in 1..=d {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",value\n");
        for r in self.records() {
            let coords: Vec<String> = r.x.iter().map(i64::to_string).collect();
            out.push_str(&format!("{},{},{}\n", r.k, coords.join(","), r.value));
        }
        out
    }
}

/// Landscape distance between two tables, over levels `1..=k_max`; `None`
/// uses the largest diagonal value of either table, past which both
/// landscapes vanish.
pub fn landscape_distance(f: &RankInvariantTable, g: &RankInvariantTable, k_max: Option<u64>) -> u64 {
    let k = k_max.unwrap_or_else(|| f.max_diagonal().max(g.max_diagonal())).max(1);
    landscape(f, k).sup_distance(&landscape(g, k))
}

fn max_ext(values: impl IntoIterator<Item = RankValue>) -> RankValue {
    values.into_iter().max().unwrap_or(RankValue::Finite(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtSlicesErosion {
    pub value: RankValue,
    pub per_degree: Vec<ErosionResult>,
}

fn erosion_of_tables(a: &[RankInvariantTable], b: &[RankInvariantTable]) -> Result<AtSlicesErosion> {
    let per_degree = a.iter().zip(b).map(|(f, g)| erosion_distance(f, g)).collect::<Result<Vec<_>>>()?;
    Ok(AtSlicesErosion { value: max_ext(per_degree.iter().map(|r| r.value)), per_degree })
}

fn landscape_of_tables(a: &[RankInvariantTable], b: &[RankInvariantTable], k_max: Option<u64>) -> u64 {
    a.iter().zip(b).map(|(f, g)| landscape_distance(f, g, k_max)).max().unwrap_or(0)
}

/// `max_i d_E(rk^i_S M, rk^i_S N)`.
pub fn erosion_distance_at_s(m: &PersModule, n: &PersModule, s: &SliceSequence) -> Result<AtSlicesErosion> {
    erosion_of_tables(&filtered_rank(m, s)?, &filtered_rank(n, s)?)
}

/// `max_i ||λ(rk^i_S M) - λ(rk^i_S N)||_∞`.
pub fn landscape_distance_at_s(m: &PersModule, n: &PersModule, s: &SliceSequence, k_max: Option<u64>) -> Result<u64> {
    Ok(landscape_of_tables(&filtered_rank(m, s)?, &filtered_rank(n, s)?, k_max))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    #[serde(rename = "d_L")]
    pub d_l: u64,
    #[serde(rename = "d_E")]
    pub d_e: RankValue,
    pub epsilon: u64,
    pub landscape_le_erosion: bool,
    pub erosion_le_epsilon: bool,
    pub chain_ok: bool,
    pub witnesses: Vec<ErosionWitness>,
}

/// Verifies the certificate, then evaluates `d_L <= d_E <= epsilon` at `s`.
pub fn check_stability(
    m: &PersModule,
    n: &PersModule,
    s: &SliceSequence,
    cert: &InterleavingCertificate,
) -> Result<StabilityReport> {
    let (cm, cn) = cert.source_modules();
    if cm != m || cn != n {
        return Err(Error::InvalidCertificate("certificate is for a different pair of modules".into()));
    }
    let issues = interleaving_issues(cert);
    if !issues.is_empty() {
        return Err(Error::InvalidCertificate(issues.join("; ")));
    }
    let tm = filtered_rank(m, s)?;
    let tn = filtered_rank(n, s)?;
    let erosion = erosion_of_tables(&tm, &tn)?;
    let d_l = landscape_of_tables(&tm, &tn, None);
    let landscape_le_erosion = RankValue::Finite(d_l) <= erosion.value;
    let erosion_le_epsilon = erosion.value <= RankValue::Finite(cert.epsilon);
    Ok(StabilityReport {
        d_l,
        d_e: erosion.value,
        epsilon: cert.epsilon,
        landscape_le_erosion,
        erosion_le_epsilon,
        chain_ok: landscape_le_erosion && erosion_le_epsilon,
        witnesses: erosion.per_degree.into_iter().filter_map(|r| r.witness).collect(),
    })
}
