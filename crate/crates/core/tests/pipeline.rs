use std::sync::Arc;

use orlicz_ext::domain::shapes;
use orlicz_ext::phi::{DeclaredConstants, Field};
use orlicz_ext::pipeline::{run_pipeline, PipelineOptions};
use orlicz_ext::PhiFunction;

fn stage_names(r: &orlicz_ext::pipeline::PipelineReport) -> Vec<&str> {
    r.stages.iter().map(|s| s.name).collect()
}

#[test]
fn power_on_disk_passes_every_stage() {
    let d = Arc::new(shapes::unit_disk(1.0 / 16.0).unwrap());
    let phi = PhiFunction::power(2.0).unwrap();
    let r = run_pipeline(&phi, &DeclaredConstants::default(), d, &PipelineOptions::default()).unwrap();
    assert_eq!(stage_names(&r), ["conditions", "extension", "verification", "boundedness"]);
    assert!(r.pass, "{}", serde_json::to_string_pretty(&r).unwrap());
    assert_eq!(r.schema_version, 1);
}

#[test]
fn double_phase_on_l_shape_passes_every_stage() {
    let d = Arc::new(shapes::l_shape(1.0 / 16.0).unwrap());
    let phi = PhiFunction::double_phase(2.0, 3.0, Field::expr("1 + x1*x1/2").unwrap()).unwrap();
    let r = run_pipeline(&phi, &DeclaredConstants::default(), d, &PipelineOptions::default()).unwrap();
    assert!(r.pass, "{}", serde_json::to_string_pretty(&r).unwrap());
}

#[test]
fn dumbbell_stops_at_the_a0_gate() {
    let d = Arc::new(shapes::dumbbell(0.1, 12.0).unwrap());
    let phi = PhiFunction::example_dumbbell();
    let r = run_pipeline(&phi, &DeclaredConstants::default(), d, &PipelineOptions::default()).unwrap();
    assert!(!r.pass);
    assert_eq!(r.failed_stage, Some("conditions"));
    let detail = &r.stages[0].detail;
    assert_eq!(detail["condition"], "a0");
    let w = &detail["report"]["witnesses"][0];
    // phi^{-1}(x, 1) = y above the bridge of the right tower
    assert!(w["x"][0].as_f64().unwrap() > 1.0 && w["lhs"].as_f64().unwrap() > 2.0, "{w}");
}

#[test]
fn reports_are_deterministic() {
    let d = Arc::new(shapes::unit_disk(1.0 / 8.0).unwrap());
    let phi = PhiFunction::power(2.0).unwrap();
    let opts = PipelineOptions { refinements: 2, ..PipelineOptions::default() };
    let a = run_pipeline(&phi, &DeclaredConstants::default(), d.clone(), &opts).unwrap();
    let b = run_pipeline(&phi, &DeclaredConstants::default(), d, &opts).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
