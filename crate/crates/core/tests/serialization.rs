use std::path::PathBuf;

use pdo_lab::grid::{read_field, read_samples, write_samples, ExponentTriple, GridSpec, MultiField, Sampled};
use pdo_lab::suite::{canonical_suite, load_config, parse_config, SuiteConfig};
use pdo_lab::verify::{random_field, BoundReport, Verdict};
use pdo_lab::Complex64;

fn shipped() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("suites/paper_full.json")
}

#[test]
fn shipped_suite_is_the_canonical_one() {
    assert_eq!(load_config(&shipped()).unwrap(), canonical_suite());
}

#[test]
fn canonical_suite_round_trips() {
    let cfg = canonical_suite();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(parse_config(&text).unwrap(), cfg);
    // infinite exponents are written as "inf"
    assert!(text.contains("\"inf\""));
}

fn edited(f: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut v = serde_json::to_value(canonical_suite()).unwrap();
    f(&mut v);
    v.to_string()
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(parse_config(&edited(|v| v["colour"] = "red".into())).is_err());
    assert!(parse_config(&edited(|v| v["settings"]["depth"] = 3.into())).is_err());
    assert!(parse_config(&edited(|v| v["experiments"][0]["experiment"]["extra"] = 1.into())).is_err());
    assert!(parse_config(&edited(|v| v["experiments"][1]["experiment"]["grid"]["M"] = 2.into())).is_err());
}

#[test]
fn wrong_schema_is_rejected() {
    let e = parse_config(&edited(|v| v["schema"] = 2.into())).unwrap_err();
    assert!(e.to_string().contains("schema"));
    assert!(parse_config(&edited(|v| {
        v.as_object_mut().unwrap().remove("schema");
    }))
    .is_err());
}

#[test]
fn duplicate_and_malformed_names_are_rejected() {
    let dup = edited(|v| {
        let first = v["experiments"][0].clone();
        v["experiments"].as_array_mut().unwrap().push(first);
    });
    assert!(parse_config(&dup).unwrap_err().to_string().contains("duplicate"));
    assert!(parse_config(&edited(|v| v["experiments"][0]["name"] = "a/b".into())).is_err());
    assert!(parse_config(&edited(|v| v["experiments"][0]["name"] = "".into())).is_err());
}

#[test]
fn settings_default_when_omitted() {
    let cfg: SuiteConfig = parse_config(r#"{"schema": 1, "experiments": []}"#).unwrap();
    assert_eq!(cfg.settings.ladder, vec![64, 128, 256]);
    assert_eq!(cfg.settings.trials, 20);
}

#[test]
fn invalid_grids_fail_to_deserialize() {
    assert!(serde_json::from_str::<GridSpec>(r#"{"n":1,"N":1,"L":4.0,"G":16}"#).is_ok());
    for bad in [
        r#"{"n":1,"N":1,"L":4.0,"G":12}"#,
        r#"{"n":0,"N":1,"L":4.0,"G":16}"#,
        r#"{"n":1,"N":0,"L":4.0,"G":16}"#,
        r#"{"n":1,"N":1,"L":-1.0,"G":16}"#,
        r#"{"n":1,"N":1,"L":4.0,"G":1}"#,
        r#"{"n":1,"N":1,"L":4.0}"#,
    ] {
        assert!(serde_json::from_str::<GridSpec>(bad).is_err(), "{bad}");
    }
    assert!(parse_config(&edited(|v| v["experiments"][0]["experiment"]["grid"]["G"] = 100.into())).is_err());
}

#[test]
fn exponent_triples_serialize_infinity() {
    let t = ExponentTriple::new(f64::INFINITY, 2.0, 2.0).unwrap();
    let text = serde_json::to_string(&t).unwrap();
    assert_eq!(text, r#"{"p":"inf","q":2.0,"r":2.0}"#);
    assert_eq!(serde_json::from_str::<ExponentTriple>(&text).unwrap(), t);
}

#[test]
fn bound_report_round_trips() {
    let mut r = BoundReport::new("demo", "a claim", serde_json::json!({"rho": 0.5, "ps": [2.0, 3.0]}));
    r.record("g", 64, 0, 1.25, 0);
    r.record("g", 64, 1, 1.5, 2);
    r.record("g", 128, 0, 0.1 + 0.2, 0);
    r.note("a note");
    r.finish("sup <= 2", true);
    let back: BoundReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(back.verdict, Verdict::Pass);
    assert_eq!(back.trials, r.trials);
    assert_eq!(back.levels, r.levels);
    assert_eq!(back.parameters, r.parameters);
    assert_eq!(back.notes, r.notes);
    assert_eq!(back.level_sups("g"), vec![(64, 1.5), (128, 0.1 + 0.2)]);
}

#[test]
fn report_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = BoundReport::new("demo", "claim", serde_json::Value::Null);
    r.record("g", 8, 3, 0.5, 1);
    r.finish("none", false);
    r.write_to(dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("demo.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("experiment,group,level,seed,value,excluded"));
    assert_eq!(csv.lines().nth(1), Some("demo,g,8,3,5.00000000000000000e-1,1"));
    let dat = std::fs::read_to_string(dir.path().join("demo.dat")).unwrap();
    assert!(dat.starts_with("# g\n8 "));
}

#[test]
fn samples_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::new(2, 1, 3.0, 16).unwrap();
    let u = random_field(&g, 4, 0);
    let path = dir.path().join("u.bin");
    write_samples(&path, &u).unwrap();
    let (grid, values) = read_samples(&path).unwrap();
    assert_eq!(grid, g);
    assert_eq!(values, u.values());
    assert_eq!(read_field(&path).unwrap().values(), u.values());

    let g2 = GridSpec::new(1, 2, 2.0, 8).unwrap();
    let m = MultiField::from_fn(g2, |x| Complex64::new(x[0], -x[1]));
    write_samples(&path, &m).unwrap();
    assert_eq!(pdo_lab::grid::read_multi_field(&path).unwrap().values(), m.values());
    // a field file read as a multi-field of the wrong shape is refused
    assert!(read_field(&path).is_err());
}

#[test]
fn truncated_sample_file_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::new(1, 1, 3.0, 8).unwrap();
    let path = dir.path().join("u.bin");
    write_samples(&path, &random_field(&g, 0, 0)).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(read_samples(&path).is_err());
}
