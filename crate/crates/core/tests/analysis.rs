use std::fs;
use std::path::Path;

use pretangent::analysis::{emit_outputs, parse_config, run_analysis, AnalysisConfig, Task};
use pretangent::*;

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn half_line_runs_every_applicable_task() {
    let config = AnalysisConfig::minimal(
        SpaceSpec::HalfLine {},
        vec![Task::Conditions, Task::Witness, Task::Pretangent, Task::Tangency, Task::CantorReport],
    );
    let report = run_analysis(&config).unwrap();
    assert!(report.errors.is_empty(), "{:?}", report.errors);
    assert_eq!(report.uniqueness.as_ref().unwrap().verdict, Uniqueness::Unique);
    assert_eq!(report.tangency.as_ref().unwrap().verdict, Tangency::Tangent);
    assert!(report.witness.is_none());
    assert_eq!(report.skipped.len(), 1);
    let p = &report.pretangent.as_ref().unwrap().pretangent;
    for (i, a) in p.classes.iter().enumerate() {
        for (j, b) in p.classes.iter().enumerate() {
            assert!((p.dist[i][j] - (a.radial - b.radial).abs()).abs() < 1e-9);
        }
    }
}

#[test]
fn planar_rays_yield_a_witness() {
    let config = AnalysisConfig::minimal(
        SpaceSpec::PlanarRays { theta: std::f64::consts::FRAC_PI_2 },
        vec![Task::Conditions, Task::Witness],
    );
    let report = run_analysis(&config).unwrap();
    assert_eq!(report.uniqueness.as_ref().unwrap().verdict, Uniqueness::NonUnique);
    let w = report.witness.as_ref().unwrap();
    assert_eq!(w.mutual.status, LimitStatus::Oscillating);
    assert!(w.gap >= 2f64.sqrt() - 1e-3);
}

#[test]
fn cantor_classes_carry_exact_cantor_values() {
    let text = fs::read_to_string(configs_dir().join("cantor.json")).unwrap();
    let report = run_analysis(&parse_config(&text).unwrap()).unwrap();
    assert!(report.errors.is_empty(), "{:?}", report.errors);
    assert_eq!(report.uniqueness.as_ref().unwrap().verdict, Uniqueness::Unique);
    assert_eq!(report.tangency.as_ref().unwrap().verdict, Tangency::Tangent);
    let classes = &report.pretangent.as_ref().unwrap().pretangent.classes;
    for c in classes {
        let v = c.value_exact.as_ref().unwrap();
        assert!(is_extended_cantor(v, 64).unwrap().is_in(), "{v}");
    }
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.contains("\"8/9\""));
}

#[test]
fn shipped_configs_parse() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn schema_lists_every_task_and_space_kind() {
    let schema: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(configs_dir().join("../docs/config.schema.json")).unwrap()).unwrap();
    let tasks = schema["properties"]["tasks"]["items"]["enum"].as_array().unwrap();
    for t in [
        Task::Conditions,
        Task::Witness,
        Task::Pretangent,
        Task::Tangency,
        Task::TangentEquivalence,
        Task::CantorReport,
    ] {
        assert!(tasks.contains(&serde_json::to_value(t).unwrap()));
    }
    let kinds: Vec<&str> = schema["$defs"]["space"]["oneOf"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["properties"]["kind"]["const"].as_str().unwrap())
        .collect();
    for spec in [
        SpaceSpec::HalfLine {},
        SpaceSpec::Cantor { marked: 0 },
        SpaceSpec::Lacunary {},
        SpaceSpec::PlanarRays { theta: 1.0 },
        SpaceSpec::LineSubset { points: vec![] },
    ] {
        let kind = serde_json::to_value(&spec).unwrap()["kind"].as_str().unwrap().to_string();
        assert!(kinds.contains(&kind.as_str()), "{kind}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let text = fs::read_to_string(configs_dir().join("planar-rays.json")).unwrap();
    let config = parse_config(&text).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = emit_outputs(&run_analysis(&config).unwrap(), a.path()).unwrap();
    let second = emit_outputs(&run_analysis(&config).unwrap(), b.path()).unwrap();
    assert_eq!(first.len(), second.len());
    for (x, y) in first.iter().zip(&second) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}
