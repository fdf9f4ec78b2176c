//! Homomorphisms between grid modules and interleaving certificates.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::module::PersModule;
use crate::poset::{GridPoset, Point};

/// A natural transformation between two grid modules. Components are stored
/// only where given; everywhere else the component is the zero map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    source: PersModule,
    target: PersModule,
    components: BTreeMap<Point, FieldMatrix>,
}

/// A Hasse arrow `x -> y` of Z^d whose naturality square fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomViolation {
    pub from: Point,
    pub to: Point,
    pub left: FieldMatrix,
    pub right: FieldMatrix,
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "naturality fails on ({}) -> ({}): {:?} vs {:?}",
            self.from,
            self.to,
            self.left.to_signed_rows(),
            self.right.to_signed_rows()
        )
    }
}

fn grid_of(m: &PersModule) -> Result<&GridPoset> {
    m.grid().ok_or(Error::WrongPosetKind("grid"))
}

/// Bounding box of several windows, padded by one step below so that arrows
/// entering a window are visited too.
fn padded_box(grids: &[&GridPoset]) -> GridPoset {
    let d = grids[0].dim();
    let lower: Vec<i64> = (0..d).map(|k| grids.iter().map(|g| g.lower().0[k]).min().unwrap() - 1).collect();
    let upper: Vec<i64> = (0..d).map(|k| grids.iter().map(|g| g.upper().0[k]).max().unwrap()).collect();
    let shape: Vec<usize> = lower.iter().zip(&upper).map(|(l, u)| (u - l) as usize).collect();
    GridPoset::with_lower(lower, shape).expect("same dimension")
}

impl ModuleHom {
    pub fn new(
        source: PersModule,
        target: PersModule,
        components: impl IntoIterator<Item = (Point, FieldMatrix)>,
    ) -> Result<Self> {
        let gs = grid_of(&source)?;
        let gt = grid_of(&target)?;
        if gs.dim() != gt.dim() {
            return Err(Error::DimensionMismatch(gs.dim(), gt.dim()));
        }
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(source.field().modulus(), target.field().modulus()));
        }
        let mut map = BTreeMap::new();
        for (x, c) in components {
            if x.dim() != gs.dim() {
                return Err(Error::DimensionMismatch(x.dim(), gs.dim()));
            }
            let want = (target.dim_at(&x), source.dim_at(&x));
            if c.shape() != want {
                return Err(Error::ShapeMismatch(format!(
                    "component at ({x}) is {}x{}, expected {}x{}",
                    c.rows(),
                    c.cols(),
                    want.0,
                    want.1
                )));
            }
            if c.field() != source.field() {
                return Err(Error::FieldMismatch(c.field().modulus(), source.field().modulus()));
            }
            if want.0 > 0 && want.1 > 0 {
                map.insert(x, c);
            }
        }
        Ok(ModuleHom { source, target, components: map })
    }

    pub fn source(&self) -> &PersModule {
        &self.source
    }

    pub fn target(&self) -> &PersModule {
        &self.target
    }

    pub fn component(&self, x: &Point) -> FieldMatrix {
        self.components
            .get(x)
            .cloned()
            .unwrap_or_else(|| FieldMatrix::zeros(self.source.field(), self.target.dim_at(x), self.source.dim_at(x)))
    }

    /// Stored components (others are zero).
    pub fn components(&self) -> &BTreeMap<Point, FieldMatrix> {
        &self.components
    }

    pub fn identity(m: &PersModule) -> Result<Self> {
        let g = grid_of(m)?;
        let comps = g.points().into_iter().map(|x| {
            let d = m.dim_at(&x);
            (x, FieldMatrix::identity(m.field(), d))
        });
        ModuleHom::new(m.clone(), m.clone(), comps)
    }

    /// The shift homomorphism `M -> M[eps]` with components `M_{x+eps, x}`.
    pub fn shift_hom(m: &PersModule, eps: &Point) -> Result<Self> {
        let g = grid_of(m)?;
        if eps.dim() != g.dim() {
            return Err(Error::DimensionMismatch(eps.dim(), g.dim()));
        }
        if !eps.is_nonnegative() {
            return Err(Error::NegativeShift(eps.to_string()));
        }
        let target = m.shift(eps)?;
        let mut comps = Vec::new();
        for x in g.points() {
            let y = x.plus(eps);
            comps.push((x.clone(), m.structure_map(&x, &y)?));
        }
        ModuleHom::new(m.clone(), target, comps)
    }

    /// `g ∘ f` where `f = self`.
    pub fn then(&self, g: &ModuleHom) -> Result<ModuleHom> {
        if self.target != g.source {
            return Err(Error::InvalidCertificate("composable homs need matching modules".into()));
        }
        let comps: Vec<(Point, FieldMatrix)> =
            self.components.iter().map(|(x, f)| (x.clone(), &g.component(x) * f)).collect();
        ModuleHom::new(self.source.clone(), g.target.clone(), comps)
    }

    /// `f[eps] : M[eps] -> N[eps]`, with component `f_{x+eps}` at `x`.
    pub fn shifted(&self, eps: &Point) -> Result<ModuleHom> {
        let comps: Vec<(Point, FieldMatrix)> = self.components.iter().map(|(x, f)| (x.minus(eps), f.clone())).collect();
        ModuleHom::new(self.source.shift(eps)?, self.target.shift(eps)?, comps)
    }

    /// Checks every naturality square `f_y M_yx = N_yx f_x` on unit arrows
    /// meeting either window.
    pub fn validate(&self) -> std::result::Result<(), HomViolation> {
        let gs = self.source.grid().expect("checked at construction");
        let gt = self.target.grid().expect("checked at construction");
        let bx = padded_box(&[gs, gt]);
        for x in bx.points() {
            for k in 0..bx.dim() {
                let mut y = x.clone();
                y.0[k] += 1;
                if self.source.dim_at(&x) + self.target.dim_at(&x) == 0
                    && self.source.dim_at(&y) + self.target.dim_at(&y) == 0
                {
                    continue;
                }
                let m = self.source.structure_map(&x, &y).expect("unit step is comparable");
                let n = self.target.structure_map(&x, &y).expect("unit step is comparable");
                let left = &self.component(&y) * &m;
                let right = &n * &self.component(&x);
                if left != right {
                    return Err(HomViolation { from: x, to: y, left, right });
                }
            }
        }
        Ok(())
    }

    /// Componentwise equality over both windows, treating absent components as zero.
    pub fn same_maps(&self, other: &ModuleHom) -> bool {
        if self.source != other.source || self.target != other.target {
            return false;
        }
        let gs = self.source.grid().unwrap();
        let gt = self.target.grid().unwrap();
        padded_box(&[gs, gt]).points().iter().all(|x| self.component(x) == other.component(x))
    }
}

/// `phi: M -> N[eps]` and `psi: N -> M[eps]` for a diagonal `eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleavingCertificate {
    pub epsilon: u64,
    pub phi: ModuleHom,
    pub psi: ModuleHom,
}

impl InterleavingCertificate {
    /// Builds both homs from component lists.
    pub fn new(
        m: &PersModule,
        n: &PersModule,
        epsilon: u64,
        phi: impl IntoIterator<Item = (Point, FieldMatrix)>,
        psi: impl IntoIterator<Item = (Point, FieldMatrix)>,
    ) -> Result<Self> {
        let d = grid_of(m)?.dim();
        let e = Point::diagonal(d, epsilon as i64);
        Ok(InterleavingCertificate {
            epsilon,
            phi: ModuleHom::new(m.clone(), n.shift(&e)?, phi)?,
            psi: ModuleHom::new(n.clone(), m.shift(&e)?, psi)?,
        })
    }

    /// For `N = M[delta]`: `phi = sh_M^{2 delta}` viewed as a map into
    /// `N[delta] = M[2 delta]`, and `psi` the identity of `N = M[delta]`.
    pub fn canonical_shift(m: &PersModule, delta: u64) -> Result<(PersModule, Self)> {
        let d = grid_of(m)?.dim();
        let e = Point::diagonal(d, delta as i64);
        let n = m.shift(&e)?;
        let phi = ModuleHom::shift_hom(m, &e.plus(&e))?;
        let psi = ModuleHom::identity(&n)?;
        let cert = InterleavingCertificate { epsilon: delta, phi, psi };
        Ok((n, cert))
    }

    pub fn source_modules(&self) -> (&PersModule, &PersModule) {
        (self.phi.source(), self.psi.source())
    }

    pub fn epsilon_vector(&self) -> Point {
        Point::diagonal(self.phi.source().grid().map_or(0, GridPoset::dim), self.epsilon as i64)
    }
}

/// Every reason `cert` fails to be an interleaving; empty when it is one.
pub fn interleaving_issues(cert: &InterleavingCertificate) -> Vec<String> {
    let mut issues = Vec::new();
    let (m, n) = cert.source_modules();
    let e = cert.epsilon_vector();
    let (Ok(m_e), Ok(n_e)) = (m.shift(&e), n.shift(&e)) else {
        issues.push("modules must be grid-indexed".into());
        return issues;
    };
    if *cert.phi.target() != n_e {
        issues.push("phi does not land in N shifted by epsilon".into());
    }
    if *cert.psi.target() != m_e {
        issues.push("psi does not land in M shifted by epsilon".into());
    }
    if !issues.is_empty() {
        return issues;
    }
    if let Err(v) = cert.phi.validate() {
        issues.push(format!("phi: {v}"));
    }
    if let Err(v) = cert.psi.validate() {
        issues.push(format!("psi: {v}"));
    }
    let two = e.plus(&e);
    let checks = [
        ("psi[eps] . phi", cert.psi.shifted(&e).and_then(|s| cert.phi.then(&s)), ModuleHom::shift_hom(m, &two)),
        ("phi[eps] . psi", cert.phi.shifted(&e).and_then(|s| cert.psi.then(&s)), ModuleHom::shift_hom(n, &two)),
    ];
    for (name, lhs, rhs) in checks {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                if !l.same_maps(&r) {
                    issues.push(format!("{name} differs from the 2*epsilon shift"));
                }
            }
            (Err(err), _) | (_, Err(err)) => issues.push(format!("{name}: {err}")),
        }
    }
    issues
}

pub fn verify_interleaving(cert: &InterleavingCertificate) -> bool {
    interleaving_issues(cert).is_empty()
}
