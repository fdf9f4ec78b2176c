//! Multiranks, the R-vector of a zigzag module, and barcode recovery from it.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::intmat::{solve_nonneg_integer, IntMatrix};
use crate::jordan::slice_block;
use crate::module::PersModule;
use crate::par;
use crate::poset::{Point, ZigzagPoset};

/// Rank of `⊕_{s1} M_x -> ⊕_{s2} M_y` with blocks `M_{yx}` for `x < y`, zero otherwise.
pub fn multirank(m: &PersModule, s1: &[Point], s2: &[Point]) -> Result<usize> {
    for p in s1.iter().chain(s2) {
        m.poset().check_point(p)?;
    }
    Ok(slice_block(m, s1, s2, None).rank())
}

/// Position of the pair `(i, j)`, `1 <= i <= j <= n`, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i <= j && j <= n);
    (1..i).map(|a| n - a + 1).sum::<usize>() + (j - i)
}

/// All pairs `(i, j)` with `1 <= i <= j <= n`, lexicographically.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MultirankVector {
    pub n: usize,
    pub values: Vec<u64>,
}

impl MultirankVector {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.values[pair_index(self.n, i, j)]
    }

    /// Upper-triangular rendering: row `i` lists the entries `(i, i..n)`.
    pub fn to_triangular_string(&self) -> String {
        let width = self.values.iter().map(|v| v.to_string().len()).max().unwrap_or(1);
        let mut out = String::new();
        for i in 1..=self.n {
            let mut cells = Vec::new();
            for j in 1..=self.n {
                if j < i {
                    cells.push(" ".repeat(width));
                } else {
                    cells.push(format!("{:>width$}", self.get(i, j)));
                }
            }
            out.push_str(cells.join(" ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn require_zigzag(m: &PersModule) -> Result<&ZigzagPoset> {
    m.poset().as_zigzag().ok_or(Error::WrongPosetKind("zigzag"))
}

fn points(ks: &[usize]) -> Vec<Point> {
    ks.iter().map(|&k| Point::from([k as i64])).collect()
}

/// `R(M)`: entry `(i, i)` is `dim M_i`; entry `(i, j)` is the multirank from the
/// minimal to the maximal elements of `{i, ..., j}`.
pub fn r_vector(m: &PersModule) -> Result<MultirankVector> {
    let zz = require_zigzag(m)?;
    let n = zz.n();
    m.structure_maps();
    let ps = pairs(n);
    let values = par::map(&ps, |&(i, j)| {
        if i == j {
            return m.dims()[i - 1] as u64;
        }
        let (lo, hi) = zz.slices(i, j).expect("pair in range");
        slice_block(m, &points(&lo), &points(&hi), None).rank() as u64
    });
    Ok(MultirankVector { n, values })
}

/// Multiplicities of interval summands `[i, j]`; zero entries are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Barcode {
    bars: BTreeMap<(usize, usize), u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarRecord {
    pub i: usize,
    pub j: usize,
    pub multiplicity: u64,
}

impl Barcode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bars(bars: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut b = Barcode::new();
        for (i, j) in bars {
            b.add(i, j, 1);
        }
        b
    }

    pub fn add(&mut self, i: usize, j: usize, mult: u64) {
        if mult > 0 {
            *self.bars.entry((i, j)).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u64 {
        self.bars.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.bars.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.bars.iter().map(|(&k, &v)| (k, v))
    }

    pub fn records(&self) -> Vec<BarRecord> {
        self.iter().map(|((i, j), multiplicity)| BarRecord { i, j, multiplicity }).collect()
    }

    /// The direct sum of the interval modules, one copy per unit of multiplicity.
    pub fn realize(&self, zz: &ZigzagPoset, field: PrimeField) -> Result<PersModule> {
        let mut m = PersModule::zero(crate::poset::Poset::zigzag(zz.clone()), field);
        for ((i, j), k) in self.iter() {
            let bar = PersModule::interval(zz, field, i, j)?;
            for _ in 0..k {
                m = m.direct_sum(&bar)?;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|((i, j), k)| format!("[{i},{j}]:{k}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A random barcode with at most `max_bars` bars, realized and then
/// conjugated by random invertible matrices. Deterministic in `seed`.
pub fn planted_module(zz: &ZigzagPoset, field: PrimeField, max_bars: usize, seed: u64) -> (PersModule, Barcode) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = zz.n();
    let count = rng.gen_range(0..=max_bars);
    let bars = Barcode::from_bars((0..count).map(|_| {
        let i = rng.gen_range(1..=n);
        let j = rng.gen_range(i..=n);
        (i, j)
    }));
    let plain = bars.realize(zz, field).expect("bars lie in range");
    let (m, _) = plain.random_conjugate(rng.gen());
    (m, bars)
}

/// Square matrix whose column for `[i, j]` is `R(I_[i,j])`, pairs in lexicographic order.
pub fn interval_r_matrix(zz: &ZigzagPoset) -> IntMatrix {
    let n = zz.n();
    let field = PrimeField::default();
    let ps = pairs(n);
    let columns: Vec<Vec<i64>> = par::map(&ps, |&(i, j)| {
        let bar = PersModule::interval(zz, field, i, j).expect("pair in range");
        r_vector(&bar).expect("zigzag").values.iter().map(|&v| v as i64).collect()
    });
    IntMatrix::from_columns(ps.len(), &columns).expect("square")
}

/// Solves `interval_r_matrix · m = R(M)` exactly. A non-integral or negative
/// solution means the input was not a representation.
pub fn barcode_from_r(m: &PersModule) -> Result<Barcode> {
    let zz = require_zigzag(m)?;
    let r = r_vector(m)?;
    let a = interval_r_matrix(zz);
    let rhs: Vec<i64> = r.values.iter().map(|&v| v as i64).collect();
    let mult = solve_nonneg_integer(&a, &rhs)?;
    let mut b = Barcode::new();
    for ((i, j), k) in pairs(zz.n()).into_iter().zip(mult) {
        b.add(i, j, k);
    }
    Ok(b)
}

/// Decides isomorphism of two zigzag modules by comparing R-vectors.
pub fn is_isomorphic(m: &PersModule, n: &PersModule) -> Result<bool> {
    require_zigzag(m)?;
    if m.poset() != n.poset() {
        return Err(Error::PosetMismatch);
    }
    Ok(r_vector(m)? == r_vector(n)?)
}
