//! Every checked-in fuzz seed must be accepted by its parser.

use std::path::PathBuf;

use fermat_forge::bohr::{BohrSpec, WrapperSpec};
use fermat_forge::charsums::PolySpec;
use fermat_forge::counting::{EquationSpec, ExtremalSpec};
use fermat_forge::harness::ExperimentConfig;
use fermat_forge::sets::{parse_set_file, SetGenerator};
use fermat_forge::{GroupSpec, Spectrum};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn group_seeds() {
    for (name, s) in seeds("group_spec") {
        let g = if s.trim_start().starts_with('{') { GroupSpec::from_json(&s) } else { GroupSpec::parse(&s) };
        assert!(g.is_ok(), "{name}: {g:?}");
    }
}

#[test]
fn config_seeds() {
    for (name, s) in seeds("experiment_config") {
        let c = ExperimentConfig::parse(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
        c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn bohr_and_wrapper_seeds() {
    for (name, s) in seeds("bohr_spec") {
        BohrSpec::from_json(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, s) in seeds("wrapper_spec") {
        WrapperSpec::from_json(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn equation_and_extremal_seeds() {
    let g13 = GroupSpec::parse("F_13").unwrap();
    for (name, s) in seeds("equation_json") {
        EquationSpec::from_json(&g13, &s).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let g101 = GroupSpec::parse("F_101").unwrap();
    for (name, s) in seeds("extremal_json") {
        ExtremalSpec::from_json(&g101, &s).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn poly_seeds() {
    let g = GroupSpec::parse("F_3^2").unwrap();
    for (name, s) in seeds("poly_list") {
        for line in s.lines() {
            PolySpec::parse(&g, line).unwrap_or_else(|e| panic!("{name} '{line}': {e}"));
        }
    }
}

#[test]
fn set_seeds() {
    for (name, s) in seeds("set_file") {
        let sets = parse_set_file(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!sets.is_empty());
    }
    // Field-only and cyclic-only generators both appear in the corpus.
    let groups = [GroupSpec::parse("F_97").unwrap(), GroupSpec::parse("Z/105").unwrap()];
    for (name, s) in seeds("set_generator") {
        let gen = SetGenerator::parse(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(groups.iter().any(|g| gen.generate(g).is_ok()), "{name}: no group accepts it");
    }
}

#[test]
fn spectrum_seeds() {
    let g = GroupSpec::parse("Z/8").unwrap();
    for (name, s) in seeds("spectrum_csv") {
        Spectrum::read_csv(&g, s.as_bytes()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
