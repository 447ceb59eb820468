use latheta::codes::LinearCode;
use latheta::exact::{int, rat};
use latheta::{builtin_code, builtin_lattice, dsp, Error, Limits, NormHierarchy, QuadraticLattice};

#[test]
fn lattice_json_round_trip_preserves_invariants() {
    for name in ["a2", "d4bar", "a4_c3"] {
        let l = builtin_lattice(name).unwrap();
        let text = l.to_json();
        let back = QuadraticLattice::from_json(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.label(), Some(name));
    }
    let raw = r#"{"label": "a2", "dim": 2, "gram": [["1","1/2"],["1/2","1"]]}"#;
    assert_eq!(QuadraticLattice::from_json(raw).unwrap(), builtin_lattice("a2").unwrap());
}

#[test]
fn malformed_lattice_files_are_rejected() {
    for raw in [
        r#"{"dim": 2, "gram": [["1","2"],["2","1"]]}"#,
        r#"{"dim": 2, "gram": [["1","1/2"],["1/3","1"]]}"#,
        r#"{"dim": 3, "gram": [["1","0"],["0","1"]]}"#,
        r#"{"dim": 1, "gram": [["x"]]}"#,
        "not json",
    ] {
        assert!(QuadraticLattice::from_json(raw).is_err(), "{raw}");
    }
}

#[test]
fn construction_a_from_code_file() {
    let code = builtin_code("c3").unwrap();
    let back = LinearCode::from_json(&code.to_json()).unwrap();
    let l = back.construction_a().unwrap();
    let h = dsp::norm_hierarchy(&l, &Limits::default()).unwrap();
    assert_eq!(h.values, vec![int(1), rat(3, 4), rat(1, 2), rat(3, 4), int(1), int(1)]);
    let c1 = builtin_code("c1").unwrap().construction_a().unwrap();
    assert_eq!(c1.volume_sq(), int(1));
}

#[test]
fn hierarchy_json_shape() {
    let h = dsp::norm_hierarchy(&builtin_lattice("a4_c4").unwrap(), &Limits::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&h.to_json()).unwrap();
    assert_eq!(v["values"][2], "49/64");
    assert_eq!(v["exact"].as_array().unwrap().len(), 6);
    assert_eq!(v["witnesses"][0].as_array().unwrap().len(), 1);
    assert_eq!(NormHierarchy::from_json(&h.to_json()).unwrap(), h);
}

#[test]
fn unknown_names_are_parse_errors() {
    assert!(matches!(builtin_lattice("leech"), Err(Error::Parse(_))));
    assert!(matches!(builtin_code("c9"), Err(Error::Parse(_))));
}
