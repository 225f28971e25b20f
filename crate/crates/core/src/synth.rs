//! Deterministic test-field factory.
//!
//! Random recipes draw from `ChaCha8Rng::seed_from_u64(seed)`. Stream order:
//! components in order; within a component, `bandlimited_random` draws two
//! `U(-1, 1)` values (real, imaginary) for every lattice index in row-major
//! order, whether or not the mode survives the band mask; `localized_random`
//! draws one `U(-1, 1)` coefficient per pair `i <= j` of axes in
//! lexicographic order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, FieldKind, GridSpec, SampledField};
use crate::spectral::{DcPolicy, MultiplierPlan};

/// How to build a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case")]
pub enum Recipe {
    /// `cos(κ·x)` in one component, `κ` given as integer mode numbers.
    SingleMode { mode: Vec<i64>, component: usize },
    /// Random Fourier coefficients on `0 < |m_j| <= max_freq` (no DC, no
    /// Nyquist), normalized to unit `L²` norm.
    BandlimitedRandom { max_freq: usize },
    /// Scalar Gaussian `exp(-|x - c|²/(2 w²))` on the torus.
    GaussianBump { center: Vec<f64>, width: f64 },
    /// Scalar Laplacian of the Gaussian bump, made exactly mean-zero.
    RickerBump { center: Vec<f64>, width: f64 },
    /// Every component a random combination of second derivatives of the
    /// Gaussian bump, mean-zero, unit `L²` norm.
    LocalizedRandom { center: Vec<f64>, width: f64 },
    /// Upper Hardy boundary field built from the scalar `h` recipe.
    HardyPlus { h: Box<Recipe> },
    /// Lower Hardy boundary field built from the scalar `h` recipe.
    HardyMinus { h: Box<Recipe> },
    /// Random divergence-free tangent field, unit `L²` norm.
    DivfreeRandom { max_freq: usize },
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::SingleMode { .. } => "single_mode",
            Recipe::BandlimitedRandom { .. } => "bandlimited_random",
            Recipe::GaussianBump { .. } => "gaussian_bump",
            Recipe::RickerBump { .. } => "ricker_bump",
            Recipe::LocalizedRandom { .. } => "localized_random",
            Recipe::HardyPlus { .. } => "hardy_plus",
            Recipe::HardyMinus { .. } => "hardy_minus",
            Recipe::DivfreeRandom { .. } => "divfree_random",
        }
    }

    /// Band limit used by default for random fields on `spec`: every mode
    /// below Nyquist.
    pub fn default_band(spec: &GridSpec) -> usize {
        spec.shape.iter().map(|s| s / 2 - 1).min().unwrap_or(1)
    }
}

fn mismatch(recipe: &Recipe, kind: FieldKind) -> Error {
    Error::RecipeKindMismatch {
        recipe: recipe.name().into(),
        kind: kind.to_string(),
    }
}

/// Build a field of `kind` on `spec` from `recipe`.
pub fn synth_field(spec: &GridSpec, kind: FieldKind, recipe: &Recipe, seed: u64) -> Result<SampledField> {
    if kind == FieldKind::Multivector {
        return Err(mismatch(recipe, kind));
    }
    match recipe {
        Recipe::SingleMode { mode, component } => single_mode(spec, kind, mode, *component)
            .map_err(|e| match e {
                Error::DimensionMismatch { .. } => mismatch(recipe, kind),
                other => other,
            }),
        Recipe::BandlimitedRandom { max_freq } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = kind.component_count(spec.n);
            let comps = (0..count)
                .map(|_| bandlimited_component(spec, *max_freq, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            normalized(SampledField::new(spec.clone(), kind, comps)?)
        }
        Recipe::GaussianBump { center, width } => {
            if kind != FieldKind::Scalar {
                return Err(mismatch(recipe, kind));
            }
            check_bump(spec, center, *width)?;
            SampledField::from_fn(spec, kind, |x| {
                let r2 = wrapped_sq(spec, x, center);
                vec![(-r2 / (2.0 * width * width)).exp()]
            })
        }
        Recipe::RickerBump { center, width } => {
            if kind != FieldKind::Scalar {
                return Err(mismatch(recipe, kind));
            }
            check_bump(spec, center, *width)?;
            let w2 = width * width;
            let f = SampledField::from_fn(spec, kind, |x| {
                let r2 = wrapped_sq(spec, x, center);
                vec![(r2 / (w2 * w2) - spec.n as f64 / w2) * (-r2 / (2.0 * w2)).exp()]
            })?;
            Ok(remove_means(f))
        }
        Recipe::LocalizedRandom { center, width } => {
            check_bump(spec, center, *width)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = spec.n;
            let count = kind.component_count(n);
            let coeffs: Vec<Vec<f64>> = (0..count)
                .map(|_| {
                    (0..n * (n + 1) / 2)
                        .map(|_| rng.gen_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let w2 = width * width;
            let f = SampledField::from_fn(spec, kind, |x| {
                let d: Vec<f64> = (0..n).map(|a| spec.wrap(a, x[a] - center[a])).collect();
                let r2: f64 = d.iter().map(|v| v * v).sum();
                let g = (-r2 / (2.0 * w2)).exp();
                coeffs
                    .iter()
                    .map(|c| {
                        let mut acc = 0.0;
                        let mut idx = 0;
                        for i in 0..n {
                            for j in i..n {
                                let delta = if i == j { 1.0 / w2 } else { 0.0 };
                                acc += c[idx] * (d[i] * d[j] / (w2 * w2) - delta) * g;
                                idx += 1;
                            }
                        }
                        acc
                    })
                    .collect()
            })?;
            normalized(remove_means(f))
        }
        Recipe::HardyPlus { h } | Recipe::HardyMinus { h } => {
            let upper = matches!(recipe, Recipe::HardyPlus { .. });
            let phi = remove_means(synth_field(spec, FieldKind::Scalar, h, seed)?);
            let plan = MultiplierPlan::new(spec, DcPolicy::Zero);
            hardy_from_scalar(&phi, kind, upper, &plan)
        }
        Recipe::DivfreeRandom { max_freq } => {
            let (tangent, offset) = match kind {
                FieldKind::Paravector | FieldKind::Quaternion => (spec.n, 1),
                FieldKind::Vector => (spec.n, 0),
                _ => return Err(mismatch(recipe, kind)),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let plan = MultiplierPlan::new(spec, DcPolicy::Zero);
            let raw = (0..tangent)
                .map(|_| bandlimited_component(spec, *max_freq, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let projected = divergence_free_projection(&raw, &plan);
            let mut comps = vec![vec![0.0; spec.total()]; kind.component_count(spec.n)];
            for (k, c) in projected.into_iter().enumerate() {
                comps[offset + k] = c;
            }
            normalized(SampledField::new(spec.clone(), kind, comps)?)
        }
    }
}

/// Boundary trace of a Hardy field with scalar (resp. normal) part `phi`.
///
/// Paravector and quaternion kinds give `(I ± H) phi`, i.e. tangential parts
/// `∓ R_k phi`; the vector kind gives `(± R_1 phi, ..., ± R_n phi, phi)`.
pub fn hardy_from_scalar(
    phi: &SampledField,
    kind: FieldKind,
    upper: bool,
    plan: &MultiplierPlan,
) -> Result<SampledField> {
    let spec = phi.spec();
    let n = spec.n;
    let spectrum = plan.forward(phi.component(0));
    let riesz: Vec<Vec<f64>> = (1..=n)
        .map(|k| {
            let s = spectrum
                .iter()
                .enumerate()
                .map(|(p, z)| z * plan.riesz_symbol(k, p))
                .collect();
            plan.inverse(s)
        })
        .collect();
    let sign = if upper { 1.0 } else { -1.0 };
    let scaled = |v: &Vec<f64>, s: f64| v.iter().map(|x| x * s).collect::<Vec<f64>>();
    let comps = match kind {
        FieldKind::Paravector | FieldKind::Quaternion => {
            if kind == FieldKind::Quaternion && n != 3 {
                return Err(Error::DimensionMismatch { expected: 3, found: n });
            }
            let mut c = vec![phi.component(0).to_vec()];
            c.extend(riesz.iter().map(|r| scaled(r, -sign)));
            c
        }
        FieldKind::Vector => {
            let mut c: Vec<Vec<f64>> = riesz.iter().map(|r| scaled(r, sign)).collect();
            c.push(phi.component(0).to_vec());
            c
        }
        other => {
            return Err(Error::KindMismatch {
                expected: "paravector|vector|quaternion".into(),
                found: other.to_string(),
            })
        }
    };
    SampledField::new(spec.clone(), kind, comps)
}

/// `f_k + R_k Σ_l R_l f_l` for each tangential component.
pub(crate) fn divergence_free_projection(tangent: &[Vec<f64>], plan: &MultiplierPlan) -> Vec<Vec<f64>> {
    let total = plan.spec().total();
    let spectra: Vec<Vec<Complex64>> = tangent.iter().map(|c| plan.forward(c)).collect();
    let mut div = vec![Complex64::new(0.0, 0.0); total];
    for (l, s) in spectra.iter().enumerate() {
        let u = plan.unit(l);
        for p in 0..total {
            div[p] += u[p] * s[p];
        }
    }
    spectra
        .into_iter()
        .enumerate()
        .map(|(k, mut s)| {
            let u = plan.unit(k);
            for p in 0..total {
                s[p] -= u[p] * div[p];
            }
            plan.inverse(s)
        })
        .collect()
}

fn single_mode(spec: &GridSpec, kind: FieldKind, mode: &[i64], component: usize) -> Result<SampledField> {
    if mode.len() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: mode.len(),
        });
    }
    let count = kind.component_count(spec.n);
    if component >= count {
        return Err(Error::DimensionMismatch {
            expected: count,
            found: component,
        });
    }
    let kappa: Vec<f64> = (0..spec.n)
        .map(|a| 2.0 * std::f64::consts::PI / spec.lengths[a] * mode[a] as f64)
        .collect();
    SampledField::from_fn(spec, kind, |x| {
        let phase: f64 = x.iter().zip(&kappa).map(|(a, b)| a * b).sum();
        let mut v = vec![0.0; count];
        v[component] = phase.cos();
        v
    })
}

fn bandlimited_component(spec: &GridSpec, max_freq: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if max_freq == 0 {
        return Err(Error::InvalidRecipe("max_freq must be at least 1".into()));
    }
    let plan = crate::fft::FftNd::new(&spec.shape);
    let mut spectrum = Vec::with_capacity(spec.total());
    for p in 0..spec.total() {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        let idx = spec.unravel(p);
        let dc = idx.iter().all(|&i| i == 0);
        let keep = !dc
            && (0..spec.n).all(|a| {
                !spec.is_nyquist(a, idx[a]) && spec.signed_index(a, idx[a]).unsigned_abs() as usize <= max_freq
            });
        spectrum.push(if keep { Complex64::new(re, im) } else { Complex64::new(0.0, 0.0) });
    }
    Ok(crate::fft::inverse_real(&plan, spectrum).0)
}

fn check_bump(spec: &GridSpec, center: &[f64], width: f64) -> Result<()> {
    if center.len() != spec.n {
        return Err(Error::InvalidRecipe(format!(
            "bump center has {} coordinates, grid has {} axes",
            center.len(),
            spec.n
        )));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidRecipe(format!("bump width must be positive, got {width}")));
    }
    Ok(())
}

fn wrapped_sq(spec: &GridSpec, x: &[f64], center: &[f64]) -> f64 {
    (0..spec.n).map(|a| spec.wrap(a, x[a] - center[a]).powi(2)).sum()
}

/// Subtract each component's mean.
pub fn remove_means(field: SampledField) -> SampledField {
    let means = field.means();
    let spec = field.spec().clone();
    let kind = field.kind();
    let comps = field
        .into_components()
        .into_iter()
        .zip(means)
        .map(|(c, m)| c.into_iter().map(|v| v - m).collect())
        .collect();
    SampledField::new(spec, kind, comps).expect("shape preserved")
}

fn normalized(field: SampledField) -> Result<SampledField> {
    let norm = lp_norm(&field, 2.0);
    if norm == 0.0 {
        return Err(Error::InvalidRecipe("recipe produced an identically zero field".into()));
    }
    Ok(field.scale(1.0 / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_cosine() {
        let g = GridSpec::cube(2, 32).unwrap();
        let f = synth_field(
            &g,
            FieldKind::Paravector,
            &Recipe::SingleMode { mode: vec![1, 0], component: 0 },
            0,
        )
        .unwrap();
        for p in 0..g.total() {
            let x = g.coords(p);
            assert!((f.component(0)[p] - x[0].cos()).abs() < 1e-15);
            assert_eq!(f.component(1)[p], 0.0);
            assert_eq!(f.component(2)[p], 0.0);
        }
    }

    #[test]
    fn random_fields_are_reproducible_and_mean_free() {
        let g = GridSpec::cube(2, 16).unwrap();
        let r = Recipe::BandlimitedRandom { max_freq: 7 };
        let a = synth_field(&g, FieldKind::Paravector, &r, 42).unwrap();
        let b = synth_field(&g, FieldKind::Paravector, &r, 42).unwrap();
        let c = synth_field(&g, FieldKind::Paravector, &r, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.means().iter().all(|m| m.abs() < 1e-15));
        assert!((lp_norm(&a, 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn recipe_kind_mismatch() {
        let g = GridSpec::cube(2, 16).unwrap();
        let bump = Recipe::GaussianBump { center: vec![1.0, 1.0], width: 0.3 };
        assert!(matches!(
            synth_field(&g, FieldKind::Paravector, &bump, 0),
            Err(Error::RecipeKindMismatch { .. })
        ));
        assert!(synth_field(&g, FieldKind::Scalar, &Recipe::DivfreeRandom { max_freq: 3 }, 0).is_err());
        assert!(synth_field(
            &g,
            FieldKind::Scalar,
            &Recipe::SingleMode { mode: vec![1, 0], component: 1 },
            0
        )
        .is_err());
    }

    #[test]
    fn ricker_is_mean_free() {
        let g = GridSpec::cube(2, 32).unwrap();
        let f = synth_field(
            &g,
            FieldKind::Scalar,
            &Recipe::RickerBump { center: vec![3.0, 3.0], width: 0.4 },
            0,
        )
        .unwrap();
        assert!(f.means()[0].abs() < 1e-14);
    }

    #[test]
    fn hardy_recipes_have_riesz_tangential_parts() {
        let g = GridSpec::cube(1, 16).unwrap();
        let h = Box::new(Recipe::SingleMode { mode: vec![1], component: 0 });
        let plus = synth_field(&g, FieldKind::Paravector, &Recipe::HardyPlus { h: h.clone() }, 0).unwrap();
        let minus = synth_field(&g, FieldKind::Vector, &Recipe::HardyPlus { h }, 0).unwrap();
        for p in 0..g.total() {
            let x = g.coords(p)[0];
            // R_1 cos = sin.
            assert!((plus.component(1)[p] + x.sin()).abs() < 1e-14);
            assert!((minus.component(0)[p] - x.sin()).abs() < 1e-14);
            assert!((minus.component(1)[p] - x.cos()).abs() < 1e-14);
        }
    }
}
