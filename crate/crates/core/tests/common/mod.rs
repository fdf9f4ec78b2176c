#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jordanpers::schema::ModuleFile;
use jordanpers::{GridPoset, PersModule, Point, Poset, PrimeField, SliceSequence, ZigzagPoset};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str) -> (ModuleFile, PersModule) {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture exists");
    let file = ModuleFile::parse(&text).expect("fixture parses");
    let field = file.prime_field().unwrap().unwrap_or_default();
    let m = file.to_module(field).expect("fixture builds");
    (file, m)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const SMALL_SHAPES: [[usize; 2]; 6] = [[1, 1], [2, 1], [1, 2], [2, 2], [3, 1], [3, 2]];

pub fn small_grid(k: usize) -> Poset {
    Poset::grid(GridPoset::new(SMALL_SHAPES[k % SMALL_SHAPES.len()]))
}

/// Some orientation of length `n`, chosen by `k`.
pub fn zigzag(n: usize, k: usize) -> ZigzagPoset {
    let all = ZigzagPoset::all(n);
    all[k % all.len()].clone()
}

/// Disjoint slices drawn from the poset's elements (grids may also use a few
/// points just outside the window).
pub fn random_slices(poset: &Poset, r: &mut impl Rng) -> SliceSequence {
    let mut pts = poset.points();
    if let Some(g) = poset.as_grid() {
        pts.push(g.upper().offset(1));
        pts.push(g.lower().offset(-1));
    }
    pts.shuffle(r);
    let take = r.gen_range(2..=pts.len().max(2)).min(pts.len());
    let n = r.gen_range(2..=take.max(2));
    let mut slices = vec![Vec::new(); n];
    for (i, p) in pts.into_iter().take(take).enumerate() {
        let slot = if i < n { i } else { r.gen_range(0..n) };
        slices[slot].push(p);
    }
    SliceSequence::new(slices)
}

pub fn field() -> PrimeField {
    PrimeField::default()
}

pub fn pt(c: &[i64]) -> Point {
    Point(c.to_vec())
}
