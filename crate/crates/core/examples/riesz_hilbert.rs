//! Riesz transforms, the Clifford Hilbert transform and the Plemelj projections.

use hardy_hodge::grid::{lp_norm, FieldKind, GridSpec, SampledField};
use hardy_hodge::spectral::{hilbert, plemelj, riesz, riesz_oracle_dft, DcPolicy, MultiplierPlan};
use hardy_hodge::synth::{synth_field, Recipe};

fn main() -> hardy_hodge::Result<()> {
    let spec = GridSpec::cube(2, 32)?;
    let plan = MultiplierPlan::new(&spec, DcPolicy::Error);

    // R_1 cos(3 x_1) = sin(3 x_1).
    let cosine = SampledField::from_fn(&spec, FieldKind::Scalar, |x| vec![(3.0 * x[0]).cos()])?;
    let sine = SampledField::from_fn(&spec, FieldKind::Scalar, |x| vec![(3.0 * x[0]).sin()])?;
    let r1 = riesz(&cosine, 1, &plan)?;
    println!("|R1 cos - sin|   = {:.2e}", lp_norm(&r1.sub(&sine)?, 2.0));

    let f = synth_field(&spec, FieldKind::Paravector, &Recipe::BandlimitedRandom { max_freq: 10 }, 3)?;
    let hh = hilbert(&hilbert(&f, &plan)?, &plan)?;
    println!("|H H f - f|      = {:.2e}", lp_norm(&hh.sub(&f.to_multivector()?)?, 2.0));

    let up = plemelj(&f, true, &plan)?;
    let down = plemelj(&f, false, &plan)?;
    let sum = up.add(&down)?;
    println!("|P+ f + P- f - f| = {:.2e}", lp_norm(&sum.sub(&f.to_multivector()?)?, 2.0));
    println!("|P- P+ f|        = {:.2e}", lp_norm(&plemelj(&up, false, &plan)?, 2.0));

    // FFT path against the direct DFT on a small grid.
    let small = GridSpec::cube(2, 16)?;
    let g = synth_field(&small, FieldKind::Scalar, &Recipe::BandlimitedRandom { max_freq: 7 }, 4)?;
    let small_plan = MultiplierPlan::new(&small, DcPolicy::Zero);
    for k in 1..=2 {
        let fast = riesz(&g, k, &small_plan)?;
        let slow = riesz_oracle_dft(&g, k)?;
        println!("FFT vs DFT, R{k}   = {:.2e}", lp_norm(&fast.sub(&slow)?, 2.0));
    }
    Ok(())
}
