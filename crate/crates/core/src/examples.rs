//! Small hand-built modules used in docs, tests and the CLI.

use crate::field::{FieldMatrix, PrimeField};
use crate::module::PersModule;
use crate::poset::{GridPoset, Point, Poset, ZigzagPoset};

fn mat(f: PrimeField, rows: &[Vec<i64>]) -> FieldMatrix {
    FieldMatrix::from_rows(f, rows).expect("literal matrix")
}

fn p2(a: i64, b: i64) -> Point {
    Point::from([a, b])
}

/// A six-dimensional module on the 3x2 grid `[0,2] x [0,1]`, with Jordan
/// type `(1, 1, 1)` for the norm slices.
pub fn worked_example() -> PersModule {
    worked_example_over(PrimeField::default())
}

pub fn worked_example_over(f: PrimeField) -> PersModule {
    let poset = Poset::grid(GridPoset::new([2, 1]));
    let dims = [(p2(0, 0), 0), (p2(1, 0), 1), (p2(2, 0), 1), (p2(0, 1), 1), (p2(1, 1), 2), (p2(2, 1), 1)];
    let maps = [
        ((p2(0, 1), p2(1, 1)), mat(f, &[vec![0], vec![1]])),
        ((p2(1, 1), p2(2, 1)), mat(f, &[vec![1, 1]])),
        ((p2(1, 0), p2(2, 0)), mat(f, &[vec![1]])),
        ((p2(1, 0), p2(1, 1)), mat(f, &[vec![1], vec![0]])),
        ((p2(2, 0), p2(2, 1)), mat(f, &[vec![1]])),
    ];
    PersModule::from_parts(poset, f, dims, maps).expect("worked example is well-formed")
}

/// Two modules on the unit square `[0,1]^2` with equal classical rank
/// invariants that are told apart by the norm-slice Jordan invariants.
/// The bottom corner is `K^2`, mapping onto the first coordinate rightwards in
/// both; upwards it keeps the first coordinate in `X` and the second in `Y`.
pub fn counterexample_pair() -> (PersModule, PersModule) {
    let f = PrimeField::default();
    let build = |up: Vec<i64>| {
        let poset = Poset::grid(GridPoset::new([1, 1]));
        let dims = [(p2(0, 0), 2), (p2(1, 0), 1), (p2(0, 1), 1), (p2(1, 1), 0)];
        let maps = [((p2(0, 0), p2(1, 0)), mat(f, &[vec![1, 0]])), ((p2(0, 0), p2(0, 1)), mat(f, &[up]))];
        PersModule::from_parts(poset, f, dims, maps).expect("well-formed")
    };
    (build(vec![1, 0]), build(vec![0, 1]))
}

/// The same pair read as representations of the zigzag `1 <- 2 -> 3`, with
/// the corner `K^2` in the middle.
pub fn counterexample_pair_zigzag() -> (PersModule, PersModule) {
    let f = PrimeField::default();
    let zz = ZigzagPoset::new(3, "BF").expect("valid orientation");
    let build = |left: Vec<i64>| {
        let poset = Poset::zigzag(zz.clone());
        let dims = [(Point::from([1]), 1), (Point::from([2]), 2), (Point::from([3]), 1)];
        let maps = [
            ((Point::from([2]), Point::from([1])), mat(f, &[left])),
            ((Point::from([2]), Point::from([3])), mat(f, &[vec![1, 0]])),
        ];
        PersModule::from_parts(poset, f, dims, maps).expect("well-formed")
    };
    (build(vec![1, 0]), build(vec![0, 1]))
}

/// Interval module `[lo, hi]` on the integers, stored on exactly that window.
pub fn line_interval(f: PrimeField, lo: i64, hi: i64) -> PersModule {
    assert!(lo <= hi, "empty interval");
    let poset = Poset::grid(GridPoset::with_lower([lo], [(hi - lo) as usize]).expect("one-dimensional window"));
    PersModule::constant(poset, f, 1)
}
