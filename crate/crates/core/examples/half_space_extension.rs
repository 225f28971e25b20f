//! Three ways to evaluate the upper extension of Hardy boundary data:
//! Poisson multiplier, Cauchy quadrature, Newton-potential gradient.

use std::f64::consts::PI;

use hardy_hodge::extension::{
    cauchy_integral, hardy_norm_profile, newton_gradient, poisson_extend, PoissonEvaluator, Side,
};
use hardy_hodge::grid::{FieldKind, GridSpec};
use hardy_hodge::spectral::{DcPolicy, MultiplierPlan};
use hardy_hodge::synth::{synth_field, Recipe};

fn main() -> hardy_hodge::Result<()> {
    let l = 2.0 * PI;
    let spec = GridSpec::cube(2, 64)?;
    let plan = MultiplierPlan::new(&spec, DcPolicy::Zero);
    let width = l / 16.0;
    let bump = Recipe::RickerBump { center: vec![PI, PI], width };
    let g = synth_field(&spec, FieldKind::Paravector, &Recipe::HardyPlus { h: Box::new(bump) }, 0)?;
    let g0 = g.scalar_part()?;
    let poisson = PoissonEvaluator::new(&g, &plan)?;

    println!("{:>8} {:>12} {:>12} {:>12}", "height", "poisson", "cauchy", "newton");
    for factor in [0.5, 1.0, 2.0] {
        let x = [factor * width, PI + 0.3 * width, PI - 0.6 * width];
        let p = poisson.at(&x)?;
        let c = cauchy_integral(&g, &x)?.paravector_parts();
        let nw = newton_gradient(&g0, &x, Side::Upper)?.paravector_parts();
        println!("{:>8.4} {:>12.6} {:>12.6} {:>12.6}", x[0], p[0], c[0], nw[0]);
    }
    let below = cauchy_integral(&g, &[-width, PI, PI])?;
    println!("Cauchy integral below the plane: |C g| = {:.2e}", below.norm());

    let slab = poisson_extend(&g, &[0.05, 0.1, 0.2, 0.4, 0.8], &plan, Side::Upper)?;
    let profile = hardy_norm_profile(&slab, 2.0);
    print!("{}", profile.to_csv());
    println!("non-increasing: {}", profile.non_increasing);
    Ok(())
}
