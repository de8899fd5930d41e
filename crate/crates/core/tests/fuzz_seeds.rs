//! Runs the fuzz target bodies over the checked-in corpus seeds.

use std::fs;
use std::path::PathBuf;

use fsdim::gambler::Gambler;
use fsdim::measures::MeasureSpec;
use fsdim::params::{parse_checkpoints, parse_int_list};
use fsdim::sequences::{format_digits, parse_digits, DilutionPattern};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn digits_file_seeds_round_trip() {
    for s in seeds("digits_file") {
        let file = parse_digits(&s).unwrap();
        assert_eq!(parse_digits(&format_digits(file.base, &file.digits)).unwrap(), file);
    }
}

#[test]
fn dilution_pattern_seeds_round_trip() {
    for s in seeds("dilution_pattern") {
        let p = DilutionPattern::parse(&s).unwrap();
        assert_eq!(DilutionPattern::parse(&p.to_string()).unwrap(), p);
    }
}

#[test]
fn measure_spec_seeds_build() {
    for s in seeds("measure_spec") {
        let mu = MeasureSpec::parse(&s).unwrap().build().unwrap();
        let total: f64 = mu.level(3).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn gambler_spec_seeds_parse() {
    for s in seeds("gambler_spec") {
        Gambler::from_json(&s).unwrap();
    }
}

#[test]
fn param_list_seeds_parse() {
    for s in seeds("param_lists") {
        assert!(parse_int_list::<i64>(&s).is_ok() || parse_checkpoints(&s, 1 << 20).is_ok(), "{s}");
    }
}
