mod common;

use common::*;
use jordanpers::poset::{norm_slices, validate_slices};
use jordanpers::schema::{CertificateFile, ModuleFile};
use jordanpers::{barcode_from_r, check_stability, examples, jordan_type, rank_invariant, Barcode, Point};

#[test]
fn worked_example_fixture_matches_builder() {
    let (file, m) = load_fixture("worked_example.json");
    assert_eq!(m, examples::worked_example());
    let s = file.slice_sequence(m.poset()).unwrap().unwrap();
    assert_eq!(s.len(), 3);
    assert!(validate_slices(m.poset(), &s, true).unwrap().is_empty());
    assert_eq!(jordan_type(&m, &s).unwrap().to_string(), "(1,1,1)");
}

#[test]
fn counterexample_fixtures_match_builders() {
    let (x, y) = examples::counterexample_pair();
    assert_eq!(load_fixture("counterexample_x.json").1, x);
    assert_eq!(load_fixture("counterexample_y.json").1, y);
    assert!(rank_invariant(&x).unwrap().same_function(&rank_invariant(&y).unwrap()));
}

#[test]
fn interval_fixture_has_one_bar() {
    let (_, m) = load_fixture("interval_2_5.json");
    assert!(m.validate().is_ok());
    assert_eq!(barcode_from_r(&m).unwrap(), Barcode::from_bars([(2, 5)]));
    assert_eq!(m.dim_at(&Point::from([1])), 0);
    assert_eq!(m.dim_at(&Point::from([6])), 0);
}

#[test]
fn shift_pair_fixture_is_stable() {
    let (_, m) = load_fixture("shift_pair/m.json");
    let (_, n) = load_fixture("shift_pair/n.json");
    let text = std::fs::read_to_string(fixture("shift_pair/cert.json")).unwrap();
    let cert = CertificateFile::parse(&text).unwrap().to_certificate(&m, &n).unwrap();
    let rep = check_stability(&m, &n, &norm_slices(m.grid().unwrap()), &cert).unwrap();
    assert!(rep.chain_ok);
    assert_eq!(rep.epsilon, 2);
}

#[test]
fn fixtures_round_trip_through_json() {
    for name in [
        "worked_example.json",
        "counterexample_x.json",
        "counterexample_y.json",
        "interval_2_5.json",
        "shift_pair/m.json",
        "shift_pair/n.json",
    ] {
        let (file, m) = load_fixture(name);
        let again = ModuleFile::parse(&file.to_json()).unwrap().to_module(m.field()).unwrap();
        assert_eq!(again, m, "{name}");
        let s = file.slice_sequence(m.poset()).unwrap();
        let regenerated = ModuleFile::from_module(&m, s.as_ref());
        assert_eq!(regenerated.to_module(m.field()).unwrap(), m, "{name}");
    }
}

#[test]
fn malformed_files_report_their_location() {
    let bad = r#"{"poset": {"type": "grid", "shape": [1, 1]}, "dims": {"5,5": 1}, "maps": {}}"#;
    let err = ModuleFile::parse(bad).and_then(|f| f.to_module(field())).unwrap_err();
    assert!(err.to_string().contains("5,5"), "{err}");

    let bad = r#"{"poset": {"type": "grid", "shape": [1, 1]}, "dims": {}, "maps": {}, "extra": 1}"#;
    assert!(ModuleFile::parse(bad).is_err());

    let bad = r#"{"poset": {"type": "grid", "shape": [1, 1]}, "dims": {"0,0": 1, "1,0": 1},
                  "maps": {"0,0->1,0": [[1, 2]]}}"#;
    let err = ModuleFile::parse(bad).and_then(|f| f.to_module(field())).unwrap_err();
    assert!(err.to_string().contains("0,0->1,0"), "{err}");
}
