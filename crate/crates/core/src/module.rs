//! Pointwise finite-dimensional persistence modules over a finite poset.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::par;
use crate::poset::{GridPoset, Point, Poset, PosetKind, ZigzagPoset};

/// A vector-space dimension per element and a matrix per Hasse arrow.
///
/// Grid modules are extended by zero to all of Z^d: every point outside the
/// stored window has dimension 0 and every map touching it is a zero map.
#[derive(Clone)]
pub struct PersModule {
    poset: Poset,
    field: PrimeField,
    dims: Vec<usize>,
    maps: Vec<FieldMatrix>,
    cache: OnceLock<Arc<StructureMaps>>,
}

impl PartialEq for PersModule {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.field == other.field && self.dims == other.dims && self.maps == other.maps
    }
}

impl Eq for PersModule {}

impl fmt::Debug for PersModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PersModule")
            .field("poset", self.poset.kind())
            .field("dims", &self.dims)
            .field("maps", &self.maps)
            .finish()
    }
}

/// First failure of path independence: two Hasse paths from `lower` to
/// `upper` whose composites differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub lower: Point,
    pub upper: Point,
    pub left: FieldMatrix,
    pub right: FieldMatrix,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "composites from ({}) to ({}) disagree: {:?} vs {:?}",
            self.lower,
            self.upper,
            self.left.to_signed_rows(),
            self.right.to_signed_rows()
        )
    }
}

impl PersModule {
    /// Checks shapes only; call [`PersModule::validate`] for the functor law.
    pub fn new(poset: Poset, field: PrimeField, dims: Vec<usize>, maps: Vec<FieldMatrix>) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::ShapeMismatch(format!("{} dimensions for {} poset elements", dims.len(), poset.len())));
        }
        if maps.len() != poset.hasse_arrows().len() {
            return Err(Error::ShapeMismatch(format!(
                "{} maps for {} Hasse arrows",
                maps.len(),
                poset.hasse_arrows().len()
            )));
        }
        for (m, &(a, b)) in maps.iter().zip(poset.hasse_arrows()) {
            if m.field() != field {
                return Err(Error::FieldMismatch(m.field().modulus(), field.modulus()));
            }
            if m.shape() != (dims[b], dims[a]) {
                return Err(Error::ShapeMismatch(format!(
                    "map {} -> {} is {}x{}, expected {}x{}",
                    poset.key(&poset.point(a)),
                    poset.key(&poset.point(b)),
                    m.rows(),
                    m.cols(),
                    dims[b],
                    dims[a]
                )));
            }
        }
        Ok(PersModule { poset, field, dims, maps, cache: OnceLock::new() })
    }

    /// Builds a module from keyed data. Missing dimensions are 0 and missing
    /// arrows carry zero maps; every given map must sit on a Hasse arrow.
    pub fn from_parts(
        poset: Poset,
        field: PrimeField,
        dims: impl IntoIterator<Item = (Point, usize)>,
        maps: impl IntoIterator<Item = ((Point, Point), FieldMatrix)>,
    ) -> Result<Self> {
        let mut dv = vec![0; poset.len()];
        for (x, d) in dims {
            let i = poset.index_of(&x).ok_or_else(|| Error::UnknownElement(poset.key(&x)))?;
            dv[i] = d;
        }
        let mut mv: Vec<Option<FieldMatrix>> = vec![None; poset.hasse_arrows().len()];
        for ((x, y), m) in maps {
            let a = poset.index_of(&x).ok_or_else(|| Error::UnknownElement(poset.key(&x)))?;
            let b = poset.index_of(&y).ok_or_else(|| Error::UnknownElement(poset.key(&y)))?;
            let id = poset.arrow_id(a, b).ok_or_else(|| {
                Error::InvalidModule(format!("{} -> {} is not a Hasse arrow", poset.key(&x), poset.key(&y)))
            })?;
            mv[id] = Some(m);
        }
        let maps = mv
            .into_iter()
            .zip(poset.hasse_arrows())
            .map(|(m, &(a, b))| m.unwrap_or_else(|| FieldMatrix::zeros(field, dv[b], dv[a])))
            .collect();
        Self::new(poset, field, dv, maps)
    }

    pub fn zero(poset: Poset, field: PrimeField) -> Self {
        let dims = vec![0; poset.len()];
        let maps = vec![FieldMatrix::zeros(field, 0, 0); poset.hasse_arrows().len()];
        Self::new(poset, field, dims, maps).expect("zero module is well-formed")
    }

    /// `K^dim` everywhere with identity maps.
    pub fn constant(poset: Poset, field: PrimeField, dim: usize) -> Self {
        let dims = vec![dim; poset.len()];
        let maps = vec![FieldMatrix::identity(field, dim); poset.hasse_arrows().len()];
        Self::new(poset, field, dims, maps).expect("constant module is well-formed")
    }

    /// Interval module on `{i, ..., j}` of a zigzag.
    pub fn interval(zz: &ZigzagPoset, field: PrimeField, i: usize, j: usize) -> Result<Self> {
        zz.slices(i, j)?;
        let poset = Poset::zigzag(zz.clone());
        let dims: Vec<usize> = (1..=zz.n()).map(|k| usize::from(i <= k && k <= j)).collect();
        let maps = poset
            .hasse_arrows()
            .iter()
            .map(|&(a, b)| {
                if dims[a] == 1 && dims[b] == 1 {
                    FieldMatrix::identity(field, 1)
                } else {
                    FieldMatrix::zeros(field, dims[b], dims[a])
                }
            })
            .collect();
        Self::new(poset, field, dims, maps)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[FieldMatrix] {
        &self.maps
    }

    pub fn grid(&self) -> Option<&GridPoset> {
        self.poset.as_grid()
    }

    fn require_grid(&self) -> Result<&GridPoset> {
        self.grid().ok_or(Error::WrongPosetKind("grid"))
    }

    /// Dimension at `x`; zero outside a grid window or for unknown elements.
    pub fn dim_at(&self, x: &Point) -> usize {
        self.poset.index_of(x).map_or(0, |i| self.dims[i])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    /// Matrix on the Hasse arrow `a -> b` (element indices).
    pub fn arrow_map(&self, a: usize, b: usize) -> Option<&FieldMatrix> {
        self.poset.arrow_id(a, b).map(|id| &self.maps[id])
    }

    fn compose_path(&self, start: usize, path: &[usize]) -> FieldMatrix {
        let mut acc = FieldMatrix::identity(self.field, self.dims[start]);
        for &id in path {
            acc = &self.maps[id] * &acc;
        }
        acc
    }

    /// `M_{yx}`, composed along some Hasse path. Points outside a grid window
    /// give the zero map of the right shape.
    pub fn structure_map(&self, x: &Point, y: &Point) -> Result<FieldMatrix> {
        if !self.poset.leq(x, y)? {
            return Err(Error::NotComparable(self.poset.key(x), self.poset.key(y)));
        }
        match (self.poset.index_of(x), self.poset.index_of(y)) {
            (Some(a), Some(b)) => {
                let path = self.poset.hasse_path(a, b).expect("comparable elements have a path");
                Ok(self.compose_path(a, &path))
            }
            _ => Ok(FieldMatrix::zeros(self.field, self.dim_at(y), self.dim_at(x))),
        }
    }

    /// All structure maps, computed once and cached on the module.
    pub fn structure_maps(&self) -> &StructureMaps {
        self.cache.get_or_init(|| Arc::new(StructureMaps::compute(self)))
    }

    /// Checks path independence. Grids check every unit square; other posets
    /// compare, for every comparable pair, the composites through each
    /// incoming Hasse arrow against a canonical one.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        match self.poset.kind() {
            PosetKind::Grid(g) => self.validate_grid(g),
            _ => self.validate_general(),
        }
    }

    fn validate_grid(&self, g: &GridPoset) -> std::result::Result<(), Violation> {
        let d = g.dim();
        for idx in 0..g.len() {
            let x = g.point(idx);
            for a in 0..d {
                for b in a + 1..d {
                    let mut u = x.clone();
                    u.0[a] += 1;
                    let mut v = x.clone();
                    v.0[b] += 1;
                    let mut y = u.clone();
                    y.0[b] += 1;
                    let (Some(ui), Some(vi), Some(yi)) = (g.index_of(&u), g.index_of(&v), g.index_of(&y)) else {
                        continue;
                    };
                    let left = self.arrow_map(ui, yi).unwrap() * self.arrow_map(idx, ui).unwrap();
                    let right = self.arrow_map(vi, yi).unwrap() * self.arrow_map(idx, vi).unwrap();
                    if left != right {
                        return Err(Violation { lower: x, upper: y, left, right });
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_general(&self) -> std::result::Result<(), Violation> {
        let p = &self.poset;
        for &x in p.topological_order() {
            let mut canon: Vec<Option<FieldMatrix>> = vec![None; p.len()];
            canon[x] = Some(FieldMatrix::identity(self.field, self.dims[x]));
            for &y in p.topological_order() {
                if y == x || !p.leq_idx(x, y) {
                    continue;
                }
                let mut first: Option<FieldMatrix> = None;
                for &id in p.incoming(y) {
                    let u = p.hasse_arrows()[id].0;
                    let Some(cu) = &canon[u] else { continue };
                    let comp = &self.maps[id] * cu;
                    match &first {
                        None => first = Some(comp),
                        Some(f) if *f != comp => {
                            return Err(Violation {
                                lower: p.point(x),
                                upper: p.point(y),
                                left: f.clone(),
                                right: comp,
                            })
                        }
                        Some(_) => {}
                    }
                }
                canon[y] = first;
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &PersModule) -> Result<PersModule> {
        if self.poset != other.poset {
            return Err(Error::PosetMismatch);
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.modulus(), other.field.modulus()));
        }
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps =
            self.maps.iter().zip(&other.maps).map(|(a, b)| FieldMatrix::block_diag(self.field, [a, b])).collect();
        PersModule::new(self.poset.clone(), self.field, dims, maps)
    }

    /// `M[eps]`, with `(M[eps])_x = M_{x + eps}`: the same data on the window moved by `-eps`.
    pub fn shift(&self, eps: &Point) -> Result<PersModule> {
        let g = self.require_grid()?;
        if eps.dim() != g.dim() {
            return Err(Error::DimensionMismatch(eps.dim(), g.dim()));
        }
        let poset = Poset::grid(g.translated_back(eps));
        PersModule::new(poset, self.field, self.dims.clone(), self.maps.clone())
    }

    /// Conjugates by a family of invertible matrices, one per element:
    /// the arrow `x -> y` becomes `g_y M_yx g_x^{-1}`.
    pub fn conjugate(&self, g: &[FieldMatrix]) -> Result<PersModule> {
        if g.len() != self.poset.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} conjugating matrices for {} elements",
                g.len(),
                self.poset.len()
            )));
        }
        let mut inverses = Vec::with_capacity(g.len());
        for (x, gx) in g.iter().enumerate() {
            if gx.shape() != (self.dims[x], self.dims[x]) {
                return Err(Error::ShapeMismatch(format!(
                    "conjugating matrix at {} is {}x{}, expected {}x{}",
                    self.poset.key(&self.poset.point(x)),
                    gx.rows(),
                    gx.cols(),
                    self.dims[x],
                    self.dims[x]
                )));
            }
            inverses.push(gx.inverse()?);
        }
        let maps =
            self.poset.hasse_arrows().iter().zip(&self.maps).map(|(&(a, b), m)| &(&g[b] * m) * &inverses[a]).collect();
        PersModule::new(self.poset.clone(), self.field, self.dims.clone(), maps)
    }

    /// Conjugation by random invertible matrices drawn from `seed`; returns
    /// the conjugated module and the matrices used.
    pub fn random_conjugate(&self, seed: u64) -> (PersModule, Vec<FieldMatrix>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: Vec<FieldMatrix> =
            self.dims.iter().map(|&d| FieldMatrix::random_invertible_with(self.field, d, &mut rng)).collect();
        let m = self.conjugate(&g).expect("random matrices are invertible and sized");
        (m, g)
    }

    /// A random module with dimensions in `0..=max_dim`, deterministic in `seed`.
    ///
    /// Maps are built along a linear extension. For each element the incoming
    /// maps are drawn one at a time, each solved against the squares it closes
    /// with earlier incoming maps; if a square cannot be closed, every map into
    /// that element is set to zero.
    pub fn random(poset: &Poset, field: PrimeField, max_dim: usize, seed: u64) -> PersModule {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims: Vec<usize> = (0..poset.len()).map(|_| rng.gen_range(0..=max_dim)).collect();
        let mut maps: Vec<FieldMatrix> =
            poset.hasse_arrows().iter().map(|&(a, b)| FieldMatrix::zeros(field, dims[b], dims[a])).collect();

        for &y in poset.topological_order() {
            let incoming = poset.incoming(y).to_vec();
            let mut chosen: Vec<usize> = Vec::new();
            let mut failed = false;
            for &id in &incoming {
                let u = poset.hasse_arrows()[id].0;
                // constraints X * C(w, u) = X_j * C(w, u_j) for common lower bounds w
                let mut lhs = Vec::new();
                let mut rhs = Vec::new();
                for &jd in &chosen {
                    let uj = poset.hasse_arrows()[jd].0;
                    for w in common_lower_bounds(poset, u, uj) {
                        let cu = path_map(poset, &maps, &dims, field, w, u);
                        let cj = path_map(poset, &maps, &dims, field, w, uj);
                        rhs.push(&maps[jd] * &cj);
                        lhs.push(cu);
                    }
                }
                let x = if lhs.is_empty() {
                    random_low_rank(field, dims[y], dims[u], &mut rng)
                } else {
                    let a = FieldMatrix::hstack(&lhs.iter().collect::<Vec<_>>()).unwrap();
                    let b = FieldMatrix::hstack(&rhs.iter().collect::<Vec<_>>()).unwrap();
                    // X A = B  <=>  A^T X^T = B^T
                    match a.transpose().solve(&b.transpose()).unwrap() {
                        Some(xt) => {
                            let kernel = a.transpose().kernel_basis();
                            let free = FieldMatrix::random(field, kernel.cols(), dims[y], &mut rng);
                            xt.add(&(&kernel * &free)).unwrap().transpose()
                        }
                        None => {
                            failed = true;
                            break;
                        }
                    }
                };
                maps[id] = x;
                chosen.push(id);
            }
            if failed {
                for &id in &incoming {
                    let (a, b) = poset.hasse_arrows()[id];
                    maps[id] = FieldMatrix::zeros(field, dims[b], dims[a]);
                }
            }
        }
        PersModule::new(poset.clone(), field, dims, maps).expect("shapes follow dims")
    }
}

fn random_low_rank<R: Rng>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> FieldMatrix {
    let r = rng.gen_range(0..=rows.min(cols));
    let a = FieldMatrix::random(field, rows, r, rng);
    let b = FieldMatrix::random(field, r, cols, rng);
    &a * &b
}

fn common_lower_bounds(poset: &Poset, a: usize, b: usize) -> Vec<usize> {
    if let Some(g) = poset.as_grid() {
        // on a grid the meet implies every lower square
        let pa = g.point(a);
        let pb = g.point(b);
        let meet = Point(pa.0.iter().zip(&pb.0).map(|(x, y)| *x.min(y)).collect());
        return g.index_of(&meet).into_iter().collect();
    }
    (0..poset.len()).filter(|&w| poset.leq_idx(w, a) && poset.leq_idx(w, b)).collect()
}

fn path_map(poset: &Poset, maps: &[FieldMatrix], dims: &[usize], field: PrimeField, a: usize, b: usize) -> FieldMatrix {
    let mut acc = FieldMatrix::identity(field, dims[a]);
    for id in poset.hasse_path(a, b).expect("comparable") {
        acc = &maps[id] * &acc;
    }
    acc
}

/// Every structure map `M_{ba}` for `a <= b`, indexed by element pairs.
#[derive(Clone, Debug)]
pub struct StructureMaps {
    len: usize,
    maps: Vec<Option<FieldMatrix>>,
}

impl StructureMaps {
    fn compute(m: &PersModule) -> Self {
        let p = m.poset();
        let n = p.len();
        let rows: Vec<Vec<Option<FieldMatrix>>> = par::map_range(0..n, |a| {
            let mut row: Vec<Option<FieldMatrix>> = vec![None; n];
            row[a] = Some(FieldMatrix::identity(m.field, m.dims[a]));
            for &b in p.topological_order() {
                if b == a || !p.leq_idx(a, b) {
                    continue;
                }
                let (id, prev) = p
                    .incoming(b)
                    .iter()
                    .find_map(|&id| row[p.hasse_arrows()[id].0].as_ref().map(|c| (id, c)))
                    .expect("a < b has a predecessor of b above a");
                row[b] = Some(&m.maps[id] * prev);
            }
            row
        });
        StructureMaps { len: n, maps: rows.into_iter().flatten().collect() }
    }

    /// `M_{ba}` for element indices, `None` if `a` is not below `b`.
    pub fn get(&self, a: usize, b: usize) -> Option<&FieldMatrix> {
        self.maps[a * self.len + b].as_ref()
    }
}

impl PersModule {
    /// Structure map between arbitrary points using the cache; zero maps
    /// when either point is outside the window. Caller guarantees `x <= y`.
    pub(crate) fn cached_map(&self, x: &Point, y: &Point) -> FieldMatrix {
        match (self.poset.index_of(x), self.poset.index_of(y)) {
            (Some(a), Some(b)) => self
                .structure_maps()
                .get(a, b)
                .cloned()
                .unwrap_or_else(|| panic!("cached_map called on incomparable pair {x} / {y}")),
            _ => FieldMatrix::zeros(self.field, self.dim_at(y), self.dim_at(x)),
        }
    }
}
