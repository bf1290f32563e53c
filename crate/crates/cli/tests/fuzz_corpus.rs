//! Replays the checked-in fuzz seeds through the same properties the fuzz
//! targets check, so the seeds stay valid on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use homolog::channel::ChannelSpec;
use homolog::code::HomologousEnsemble;
use homolog::prob::{JointPmf, Pmf};
use homolog::region::RateRegion;
use homolog::sim::{BoundCheckConfig, Experiment, ExperimentConfig};
use homolog_cli::parse::parse_pmf_spec;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            (path, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn law_seeds_parse_and_round_trip() {
    for (path, text) in seeds("pmf_json") {
        let joint = JointPmf::from_json(&text).ok();
        let single = Pmf::from_json(&text).ok();
        assert!(joint.is_some() || single.is_some(), "{}", path.display());
        if let Some(j) = joint {
            assert_eq!(JointPmf::from_json(&j.to_json()).unwrap().to_json(), j.to_json());
        }
    }
}

#[test]
fn channel_seeds_parse_and_round_trip() {
    for (path, text) in seeds("channel_json") {
        let c = ChannelSpec::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ChannelSpec::from_json(&c.to_json()).unwrap().to_json(), c.to_json());
    }
}

#[test]
fn region_seeds_round_trip() {
    for (path, text) in seeds("region_json") {
        let r = RateRegion::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(RateRegion::from_json(&r.to_json()).unwrap().to_json(), r.to_json());
    }
}

#[test]
fn ensemble_seeds_round_trip() {
    for (path, text) in seeds("ensemble_json") {
        let e = HomologousEnsemble::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(HomologousEnsemble::from_json(&e.to_json()).unwrap().to_json(), e.to_json());
    }
}

#[test]
fn config_seeds_are_valid() {
    for (path, text) in seeds("sim_config_json") {
        if let Ok(b) = serde_json::from_str::<BoundCheckConfig>(&text) {
            assert!(!b.points.is_empty());
            continue;
        }
        let cfg = ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        Experiment::new(cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn value_seeds_exercise_the_parsers() {
    let parsed = seeds("cli_values")
        .iter()
        .filter(|(_, text)| parse_pmf_spec(text, &[2, 4]).is_ok())
        .count();
    assert!(parsed >= 1);
}
