//! Split of a vector field (f_1, ..., f_n, f_{n+1}) into harmonic gradients
//! from above and below plus a tangent divergence-free part.

use hardy_hodge::grid::{FieldKind, GridSpec};
use hardy_hodge::hodge::{decompose_homogeneous, divergence_residual, DcMode, DecomposeOptions};
use hardy_hodge::spectral::{DcPolicy, MultiplierPlan};
use hardy_hodge::synth::{synth_field, Recipe};

fn main() -> hardy_hodge::Result<()> {
    let spec = GridSpec::cube(3, 16)?;
    let plan = MultiplierPlan::new(&spec, DcPolicy::Error);
    let mut v = synth_field(&spec, FieldKind::Vector, &Recipe::BandlimitedRandom { max_freq: 6 }, 2)?;

    let split = decompose_homogeneous(&v, DecomposeOptions::default(), &plan)?;
    let r = &split.report;
    println!("norms: |f| {:.6}  |f+| {:.6}  |f-| {:.6}  |f0| {:.6}", r.norms.input, r.norms.plus, r.norms.minus, r.norms.zero);
    println!("pythagoras {:.2e}  cross terms {:.2e}", r.residuals.pythagoras, r.residuals.cross_terms);
    println!("normal component of f0 is zero: {}", split.f_zero.component(3).iter().all(|&x| x == 0.0));
    println!("divergence of f0: {:.2e}", divergence_residual(&split.f_zero, &plan)?);

    // A mean in the normal component has nowhere to go.
    for value in v.component_mut(3).iter_mut() {
        *value += 0.25;
    }
    match decompose_homogeneous(&v, DecomposeOptions::default(), &plan) {
        Err(e) => println!("default policy: {e}"),
        Ok(_) => println!("default policy accepted the mean"),
    }
    let stripped = decompose_homogeneous(&v, DecomposeOptions::with_dc(DcMode::Strip), &plan)?;
    println!("strip policy removed means {:?}", stripped.report.dc_means);
    Ok(())
}
