//! Potentials of the three parts of a plane density: f- + f0 is silent
//! above, f+ + f0 below.

use std::f64::consts::PI;

use hardy_hodge::grid::{FieldKind, GridSpec};
use hardy_hodge::hodge::DecomposeOptions;
use hardy_hodge::silent::{probe_grid, silent_experiment, PlaneFrame};
use hardy_hodge::spectral::{DcPolicy, MultiplierPlan};
use hardy_hodge::synth::{synth_field, Recipe};
use serde_json::json;

fn main() -> hardy_hodge::Result<()> {
    let l = 4.0 * PI;
    let spec = GridSpec::new(vec![128, 128], vec![l, l])?;
    let plan = MultiplierPlan::new(&spec, DcPolicy::Zero);
    let width = 2.0 * PI / 16.0;
    let center = vec![l / 2.0; 2];
    let recipe = Recipe::LocalizedRandom { center: center.clone(), width };
    let psi = synth_field(&spec, FieldKind::Paravector, &recipe, 0)?;

    let probes = probe_grid(&spec, &center, width, 5, &[0.5, 1.0, 2.0])?;
    let report = silent_experiment(&psi, &probes, DecomposeOptions::default(), &plan, json!({ "width": width }))?;
    let p = &report.parts;
    println!("{:>6} {:>11} {:>11} {:>11}", "side", "plus", "minus", "zero");
    println!("{:>6} {:>11.3e} {:>11.3e} {:>11.3e}", "upper", p.plus.upper, p.minus.upper, p.zero.upper);
    println!("{:>6} {:>11.3e} {:>11.3e} {:>11.3e}", "lower", p.plus.lower, p.minus.lower, p.zero.lower);
    println!("silent ratios: {}", serde_json::to_string(&report.ratios)?);

    // A tilted plane: world probes map to local (height, tangential) coordinates.
    let frame = PlaneFrame::new(&[0.0, 0.6, 0.8], 1.5)?;
    let world = frame.to_world(&probes[0]);
    println!("probe {:?} lies at world point {:?}", probes[0], world);
    println!("and maps back to {:?}", frame.to_local(&world));
    Ok(())
}
