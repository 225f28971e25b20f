//! Quaternion fields on the 3-torus: f = f+ + f-, and which first-order
//! system the extension of f+ satisfies.

use hardy_hodge::extension::{monogenicity_convergence, MonogenicSystem, Side};
use hardy_hodge::grid::{FieldKind, GridSpec};
use hardy_hodge::hodge::{decompose_quaternionic, DecomposeOptions};
use hardy_hodge::spectral::{DcPolicy, MultiplierPlan};
use hardy_hodge::synth::{synth_field, Recipe};

fn main() -> hardy_hodge::Result<()> {
    let spec = GridSpec::cube(3, 16)?;
    let plan = MultiplierPlan::new(&spec, DcPolicy::Zero);
    let q = synth_field(&spec, FieldKind::Quaternion, &Recipe::BandlimitedRandom { max_freq: 3 }, 5)?;

    let split = decompose_quaternionic(&q, DecomposeOptions::default(), &plan)?;
    let r = &split.report;
    println!("norms: |f| {:.6}  |f+| {:.6}  |f-| {:.6}", r.norms.input, r.norms.plus, r.norms.minus);
    println!("pythagoras {:.2e}  <f+, f-> {:.2e}", r.residuals.pythagoras, r.cross_terms.c12);

    for (label, system) in [
        ("quaternionic", MonogenicSystem::Quaternionic),
        ("clifford", MonogenicSystem::Paravector),
    ] {
        let c = monogenicity_convergence(&split.f_plus, system, Side::Upper, 0.5, 0.1, &plan)?;
        println!(
            "{label:>12} system on f+: residual {:.3e} -> {:.3e} (ratio {:.2})",
            c.residual_h, c.residual_half, c.ratio
        );
    }
    Ok(())
}
