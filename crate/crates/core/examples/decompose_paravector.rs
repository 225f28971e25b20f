//! Three-way split of a paravector field on the 2-torus.

use hardy_hodge::grid::{FieldKind, GridSpec};
use hardy_hodge::hodge::{decompose_paravector, hodge_tangential_check, orthogonality_report, DecomposeOptions};
use hardy_hodge::spectral::{DcPolicy, MultiplierPlan};
use hardy_hodge::synth::{synth_field, Recipe};

fn main() -> hardy_hodge::Result<()> {
    let spec = GridSpec::cube(2, 32)?;
    let plan = MultiplierPlan::new(&spec, DcPolicy::Error);
    let f = synth_field(&spec, FieldKind::Paravector, &Recipe::BandlimitedRandom { max_freq: 12 }, 7)?;

    let split = decompose_paravector(&f, DecomposeOptions::default(), &plan)?;
    let r = &split.report;
    println!("norms: |f| {:.6}  |f+| {:.6}  |f-| {:.6}  |f0| {:.6}", r.norms.input, r.norms.plus, r.norms.minus, r.norms.zero);
    println!("reconstruction {:.2e}  pythagoras {:.2e}", r.residuals.reconstruction, r.residuals.pythagoras);

    let cross = orthogonality_report(&split.f_plus, &split.f_minus, &split.f_zero)?;
    println!("scalar products: c12 {:.1e}  c13 {:.1e}  c23 {:.1e}", cross.c12, cross.c13, cross.c23);

    let check = hodge_tangential_check(&split, &plan)?;
    println!("curl of tangential part of f+ + f-: {:.1e}", check.curl_residual);
    println!("divergence of f0: {:.1e}", check.div_residual);

    // An upper Hardy field is its own f+.
    let h = Box::new(Recipe::BandlimitedRandom { max_freq: 8 });
    let plus = synth_field(&spec, FieldKind::Paravector, &Recipe::HardyPlus { h }, 1)?;
    let again = decompose_paravector(&plus, DecomposeOptions::default(), &plan)?;
    println!("hardy_plus input: |f-| {:.1e}  |f0| {:.1e}", again.report.norms.minus, again.report.norms.zero);

    println!("{}", serde_json::to_string_pretty(&r.residuals)?);
    Ok(())
}
