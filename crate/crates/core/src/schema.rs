//! JSON files for modules and interleaving certificates.
//!
//! A module file looks like
//!
//! ```json
//! {
//!   "prime": 32749,
//!   "poset": {"type": "grid", "shape": [2, 1]},
//!   "dims": {"1,0": 1, "1,1": 2},
//!   "maps": {"1,0->1,1": [[1], [0]]},
//!   "slices": [["0,1", "1,0"], ["1,1", "2,0"], ["2,1"]]
//! }
//! ```
//!
//! `poset` may also be `{"type": "zigzag", "n": 4, "orientation": "FBF"}` or
//! `{"type": "poset", "elements": ["a", "b"], "covering": [["a", "b"]]}`.
//! Missing dimensions are 0 and missing maps are zero. Matrix entries are
//! integers of any sign, reduced modulo the prime.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::hom::{InterleavingCertificate, ModuleHom};
use crate::module::PersModule;
use crate::poset::{GridPoset, Point, Poset, PosetKind, SliceSequence, ZigzagPoset};

pub type MatrixRows = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PosetSpec {
    Grid {
        shape: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower: Option<Vec<i64>>,
    },
    Zigzag {
        n: usize,
        orientation: String,
    },
    Poset {
        elements: Vec<String>,
        covering: Vec<[String; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    pub poset: PosetSpec,
    #[serde(default)]
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slices: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub epsilon: u64,
    pub phi: BTreeMap<String, MatrixRows>,
    pub psi: BTreeMap<String, MatrixRows>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let path =
            if e.line() > 0 { format!("line {} column {}", e.line(), e.column()) } else { "document".to_string() };
        Error::schema(path, e.to_string())
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

/// Reads an integer matrix of the given shape, accepting `[]` for any matrix
/// with a zero dimension.
fn matrix(field: PrimeField, rows: &MatrixRows, shape: (usize, usize), path: &str) -> Result<FieldMatrix> {
    let (r, c) = shape;
    if rows.is_empty() && (r == 0 || c == 0) {
        return Ok(FieldMatrix::zeros(field, r, c));
    }
    if rows.len() != r {
        return Err(Error::schema(path, format!("expected {r} rows, found {}", rows.len())));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
        return Err(Error::schema(format!("{path}[{i}]"), format!("expected {c} entries, found {}", row.len())));
    }
    let flat: Vec<i64> = rows.iter().flatten().copied().collect();
    FieldMatrix::from_row_major(field, r, c, &flat)
}

fn rows_of(m: &FieldMatrix) -> MatrixRows {
    m.to_signed_rows()
}

fn key_path(section: &str, key: &str) -> String {
    format!("{section}.\"{key}\"")
}

impl PosetSpec {
    pub fn build(&self) -> Result<Poset> {
        match self {
            PosetSpec::Grid { shape, lower } => {
                let g = match lower {
                    Some(l) => GridPoset::with_lower(l.clone(), shape.clone())
                        .map_err(|e| Error::schema("poset.lower", e.to_string()))?,
                    None => GridPoset::new(shape.clone()),
                };
                if g.dim() == 0 {
                    return Err(Error::schema("poset.shape", "grid needs at least one axis"));
                }
                Ok(Poset::grid(g))
            }
            PosetSpec::Zigzag { n, orientation } => {
                ZigzagPoset::new(*n, orientation).map(Poset::zigzag).map_err(|e| Error::schema("poset", e.to_string()))
            }
            PosetSpec::Poset { elements, covering } => {
                let mut pairs = Vec::with_capacity(covering.len());
                for (k, [a, b]) in covering.iter().enumerate() {
                    let find = |name: &String, side: usize| {
                        elements.iter().position(|e| e == name).ok_or_else(|| {
                            Error::schema(format!("poset.covering[{k}][{side}]"), format!("unknown element {name:?}"))
                        })
                    };
                    pairs.push((find(a, 0)?, find(b, 1)?));
                }
                Poset::finite(elements.clone(), pairs).map_err(|e| Error::schema("poset", e.to_string()))
            }
        }
    }

    pub fn of(poset: &Poset) -> PosetSpec {
        match poset.kind() {
            PosetKind::Grid(g) => PosetSpec::Grid {
                shape: g.shape().to_vec(),
                lower: g.lower().0.iter().any(|&c| c != 0).then(|| g.lower().0),
            },
            PosetKind::Zigzag(z) => PosetSpec::Zigzag { n: z.n(), orientation: z.orientation_string() },
            PosetKind::Finite { names } => PosetSpec::Poset {
                elements: names.clone(),
                covering: poset.hasse_arrows().iter().map(|&(a, b)| [names[a].clone(), names[b].clone()]).collect(),
            },
        }
    }
}

fn parse_point(poset: &Poset, key: &str, path: &str) -> Result<Point> {
    let p = poset.parse_key(key).map_err(|e| Error::schema(path, e.to_string()))?;
    if poset.index_of(&p).is_none() {
        return Err(Error::schema(path, format!("{key:?} lies outside the poset")));
    }
    Ok(p)
}

/// Slice sequence from lists of point keys. Grid slices may leave the window.
pub fn slices_from_keys(poset: &Poset, keys: &[Vec<String>], section: &str) -> Result<SliceSequence> {
    let mut slices = Vec::with_capacity(keys.len());
    for (i, s) in keys.iter().enumerate() {
        let mut pts = Vec::with_capacity(s.len());
        for (j, k) in s.iter().enumerate() {
            let p = poset.parse_key(k).map_err(|e| Error::schema(format!("{section}[{i}][{j}]"), e.to_string()))?;
            pts.push(p);
        }
        slices.push(pts);
    }
    Ok(SliceSequence::new(slices))
}

pub fn slices_to_keys(poset: &Poset, s: &SliceSequence) -> Vec<Vec<String>> {
    s.slices().iter().map(|sl| sl.iter().map(|p| poset.key(p)).collect()).collect()
}

/// Parses a JSON list of lists of point keys.
pub fn parse_slices(poset: &Poset, text: &str) -> Result<SliceSequence> {
    let keys: Vec<Vec<String>> = parse_json(text)?;
    slices_from_keys(poset, &keys, "slices")
}

impl ModuleFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn prime_field(&self) -> Result<Option<PrimeField>> {
        self.prime.map(|p| PrimeField::new(p).map_err(|e| Error::schema("prime", e.to_string()))).transpose()
    }

    /// Builds the module over `field`, checking keys, arrows and shapes. The
    /// functor law is not checked here.
    pub fn to_module(&self, field: PrimeField) -> Result<PersModule> {
        let poset = self.poset.build()?;
        let mut dims = Vec::new();
        for (k, &d) in &self.dims {
            dims.push((parse_point(&poset, k, &key_path("dims", k))?, d));
        }
        let dim_of = |p: &Point| dims.iter().find(|(q, _)| q == p).map_or(0, |(_, d)| *d);
        let mut maps = Vec::new();
        for (k, rows) in &self.maps {
            let path = key_path("maps", k);
            let (a, b) = k.split_once("->").ok_or_else(|| Error::schema(&path, "map keys look like \"src->dst\""))?;
            let x = parse_point(&poset, a.trim(), &path)?;
            let y = parse_point(&poset, b.trim(), &path)?;
            let (i, j) = (poset.index_of(&x).unwrap(), poset.index_of(&y).unwrap());
            if poset.arrow_id(i, j).is_none() {
                return Err(Error::schema(&path, "not a Hasse arrow"));
            }
            let m = matrix(field, rows, (dim_of(&y), dim_of(&x)), &path)?;
            maps.push(((x, y), m));
        }
        PersModule::from_parts(poset, field, dims, maps)
    }

    pub fn slice_sequence(&self, poset: &Poset) -> Result<Option<SliceSequence>> {
        self.slices.as_ref().map(|k| slices_from_keys(poset, k, "slices")).transpose()
    }

    /// Serializes a module, listing only nonzero dimensions and maps.
    pub fn from_module(m: &PersModule, slices: Option<&SliceSequence>) -> Self {
        let p = m.poset();
        let mut dims = BTreeMap::new();
        for (i, &d) in m.dims().iter().enumerate() {
            if d > 0 {
                dims.insert(p.key(&p.point(i)), d);
            }
        }
        let mut maps = BTreeMap::new();
        for (&(a, b), mat) in p.hasse_arrows().iter().zip(m.maps()) {
            if mat.rows() > 0 && mat.cols() > 0 {
                maps.insert(format!("{}->{}", p.key(&p.point(a)), p.key(&p.point(b))), rows_of(mat));
            }
        }
        ModuleFile {
            prime: Some(u64::from(m.field().modulus())),
            poset: PosetSpec::of(p),
            dims,
            maps,
            slices: slices.map(|s| slices_to_keys(p, s)),
        }
    }
}

impl CertificateFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Interprets the components against `m` and `n`: `phi` maps `M -> N[ε]`,
    /// `psi` maps `N -> M[ε]`.
    pub fn to_certificate(&self, m: &PersModule, n: &PersModule) -> Result<InterleavingCertificate> {
        let read = |section: &str, comps: &BTreeMap<String, MatrixRows>, src: &PersModule, dst: &PersModule| {
            let mut out = Vec::new();
            let e = Point::diagonal(src.grid().map_or(0, GridPoset::dim), self.epsilon as i64);
            let shifted = dst.shift(&e).map_err(|err| Error::schema(section, err.to_string()))?;
            for (k, rows) in comps {
                let path = key_path(section, k);
                let x = src.poset().parse_key(k).map_err(|err| Error::schema(&path, err.to_string()))?;
                let shape = (shifted.dim_at(&x), src.dim_at(&x));
                out.push((x, matrix(src.field(), rows, shape, &path)?));
            }
            Ok::<_, Error>(out)
        };
        let phi = read("phi", &self.phi, m, n)?;
        let psi = read("psi", &self.psi, n, m)?;
        InterleavingCertificate::new(m, n, self.epsilon, phi, psi)
    }

    pub fn from_certificate(cert: &InterleavingCertificate) -> Self {
        let comps =
            |h: &ModuleHom| h.components().iter().map(|(x, c)| (h.source().poset().key(x), rows_of(c))).collect();
        CertificateFile { epsilon: cert.epsilon, phi: comps(&cert.phi), psi: comps(&cert.psi) }
    }
}
