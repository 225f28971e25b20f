//! Hardy-Hodge decompositions.
//!
//! - paravector fields in `Cl(n)`: `f = f⁺ + f⁻ + f⁰` with `f± = (I ± H) φ±`,
//!   `φ± = Sc{½(I ± H) f}` and `f⁰` tangent and divergence-free;
//! - vector fields `(f_1, ..., f_n, f_{n+1})`: `f± = (±R_1 h±, ..., ±R_n h±, h±)`
//!   with `h± = ½(f_{n+1} ∓ Σ_k R_k f_k)`;
//! - quaternion fields on `R³`: `f = f⁺ + f⁻` with `f± = ½(I ± H) f`.
//!
//! A scalar (resp. normal) mean has no place in any of the three spaces and
//! is handled by [`DcMode`]; tangential means are constant divergence-free
//! fields and go to `f⁰`. Content on a Nyquist plane is treated the same way
//! as a forbidden mean, because the Riesz symbols vanish there and `H² = I`
//! fails on it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{blade_product_unchecked, BladeIndex, Quaternion};
use crate::error::{Error, Result};
use crate::grid::{expect_kind, lp_norm, FieldKind, GridSpec, SampledField};
use crate::spectral::{
    check_means, check_plan, divergence_spectrum, hilbert_clifford, hilbert_quaternion, spectral_l2,
    DcPolicy, MultiplierPlan,
};

/// Treatment of means and Nyquist content that no component space can hold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcMode {
    /// Reject anything above rounding level (relative `1e-12`).
    #[default]
    Error,
    /// Remove it and record what was removed.
    Strip,
    /// Accept up to the given absolute size.
    Tolerate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    pub dc: DcMode,
    /// Also compute the cross-check residuals (second route for `f⁰`, grade
    /// purity, annihilation) and the `L^p` norms. On by default.
    pub diagnostics: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            dc: DcMode::Error,
            diagnostics: true,
        }
    }
}

impl DecomposeOptions {
    pub fn with_dc(dc: DcMode) -> Self {
        Self { dc, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decomposition {
    Paravector,
    Homogeneous,
    Quaternionic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Norms {
    pub input: f64,
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
}

/// Residuals relative to `‖f‖₂` (cross terms relative to `‖f‖₂²`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    pub reconstruction: f64,
    pub pythagoras: f64,
    pub cross_terms: f64,
    /// Spectral divergence of `f⁰`.
    pub divergence: Option<f64>,
    /// Disagreement of the double-Riesz formula for `f⁰` with the projection formula.
    pub term3_routes: Option<f64>,
    /// Largest coefficient of grade two or more in `½(I ± H) f±`, relative to `max |f|`.
    pub grade_purity: Option<f64>,
    /// `‖½(I ∓ H) f±‖`, the opposite projection of each part.
    pub annihilation: Option<f64>,
}

/// Pairwise scalar products `Sc ∫ a b̄` of the three parts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossTerms {
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
}

impl CrossTerms {
    pub fn max_abs(&self) -> f64 {
        self.c12.abs().max(self.c13.abs()).max(self.c23.abs())
    }
}

/// `L^p` norms of input and parts at one exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LpNorms {
    pub p: f64,
    pub input: f64,
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionReport {
    pub decomposition: Decomposition,
    pub norms: Norms,
    pub residuals: Residuals,
    pub cross_terms: CrossTerms,
    pub lp_norms: Vec<LpNorms>,
    pub dc_policy: DcMode,
    /// Mean of every input component, before any stripping.
    pub dc_means: Vec<f64>,
    /// Whether the scalar/normal means were subtracted before decomposing.
    pub dc_stripped: bool,
    /// `L²` norm of removed Nyquist content (0 unless stripped).
    pub nyquist_stripped: f64,
    pub grid_spec: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyHodgeResult {
    pub f_plus: SampledField,
    pub f_minus: SampledField,
    /// Identically zero for the quaternionic split.
    pub f_zero: SampledField,
    pub report: DecompositionReport,
}

impl HardyHodgeResult {
    pub fn parts(&self) -> [&SampledField; 3] {
        [&self.f_plus, &self.f_minus, &self.f_zero]
    }
}

const NYQUIST_RELATIVE_TOL: f64 = 1e-12;

fn relative(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

fn zero_spectrum(total: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); total]
}

/// Lattice points on some axis' Nyquist plane.
fn nyquist_points(spec: &GridSpec) -> Vec<usize> {
    let strides: Vec<usize> = (0..spec.n).map(|a| spec.shape[a + 1..].iter().product()).collect();
    (0..spec.total())
        .filter(|&p| (0..spec.n).any(|a| spec.is_nyquist(a, (p / strides[a]) % spec.shape[a])))
        .collect()
}

/// Input after DC/Nyquist treatment, in both domains.
struct Prepared {
    mode: DcMode,
    diagnostics: bool,
    input: SampledField,
    spectra: Vec<Vec<Complex64>>,
    dc_means: Vec<f64>,
    dc_stripped: bool,
    nyquist_stripped: f64,
}

fn prepare(field: &SampledField, forbidden_dc: &[usize], opts: DecomposeOptions, plan: &MultiplierPlan) -> Result<Prepared> {
    check_plan(field, plan)?;
    let spec = field.spec();
    let total = spec.total();
    let dc_means = field.means();
    match opts.dc {
        DcMode::Error => check_means(field, DcPolicy::Error, forbidden_dc.iter().copied())?,
        DcMode::Tolerate(eps) => check_means(field, DcPolicy::Tolerate(eps), forbidden_dc.iter().copied())?,
        DcMode::Strip => {}
    }
    let mut spectra: Vec<Vec<Complex64>> = field.components().par_iter().map(|c| plan.forward(c)).collect();
    let mut modified = false;
    let mut dc_stripped = false;
    if opts.dc == DcMode::Strip {
        for &c in forbidden_dc {
            if spectra[c][0] != Complex64::new(0.0, 0.0) {
                spectra[c][0] = Complex64::new(0.0, 0.0);
                modified = true;
                dc_stripped = true;
            }
        }
    }
    let nyq = nyquist_points(spec);
    let mut nyquist_stripped = 0.0;
    if !nyq.is_empty() {
        let norm_l2 = lp_norm(field, 2.0);
        let mut removed_sq = 0.0;
        for (c, s) in spectra.iter_mut().enumerate() {
            let mut part = zero_spectrum(total);
            for &p in &nyq {
                part[p] = s[p];
            }
            let norm = spectral_l2(spec, &part);
            if norm == 0.0 {
                continue;
            }
            match opts.dc {
                DcMode::Error if norm > NYQUIST_RELATIVE_TOL * norm_l2 => {
                    return Err(Error::NyquistContent { component: c, norm })
                }
                DcMode::Tolerate(eps) if norm > eps => return Err(Error::NyquistContent { component: c, norm }),
                DcMode::Strip => {
                    for &p in &nyq {
                        s[p] = Complex64::new(0.0, 0.0);
                    }
                    removed_sq += norm * norm;
                    modified = true;
                }
                _ => {}
            }
        }
        nyquist_stripped = removed_sq.sqrt();
    }
    let input = if modified {
        let comps = spectra.par_iter().map(|s| plan.inverse(s.clone())).collect();
        SampledField::new(spec.clone(), field.kind(), comps)?
    } else {
        field.clone()
    };
    Ok(Prepared {
        mode: opts.dc,
        diagnostics: opts.diagnostics,
        input,
        spectra,
        dc_means,
        dc_stripped,
        nyquist_stripped,
    })
}

fn inverse_all(plan: &MultiplierPlan, spectra: Vec<Vec<Complex64>>) -> Vec<Vec<f64>> {
    spectra.into_par_iter().map(|s| plan.inverse(s)).collect()
}

/// `Σ_l s_l F_l` over the tangential spectra, `s_l = -i κ_l/|κ|`.
fn riesz_sum(plan: &MultiplierPlan, tangential: &[&Vec<Complex64>]) -> Vec<Complex64> {
    let total = plan.spec().total();
    let mut acc = zero_spectrum(total);
    for (l, s) in tangential.iter().enumerate() {
        for p in 0..total {
            acc[p] += plan.riesz_symbol(l + 1, p) * s[p];
        }
    }
    acc
}

/// The double-Riesz formula
/// `f⁰_k = (Σ_{l≠k} -R_l²) f_k + R_k Σ_{l≠k} R_l f_l`, spectrally.
fn term3_spectra(plan: &MultiplierPlan, tangential: &[&Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = tangential.len();
    let total = plan.spec().total();
    (0..n)
        .map(|k| {
            let mut out = zero_spectrum(total);
            for p in 0..total {
                let sk = plan.riesz_symbol(k + 1, p);
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    if l == k {
                        continue;
                    }
                    let sl = plan.riesz_symbol(l + 1, p);
                    acc += -sl * sl * tangential[k][p] + sk * sl * tangential[l][p];
                }
                out[p] = acc;
            }
            out
        })
        .collect()
}

/// Projection formula `f⁰_k = f_k + R_k Σ_l R_l f_l`, which keeps the means.
fn projection_spectra(plan: &MultiplierPlan, tangential: &[&Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let sum = riesz_sum(plan, tangential);
    tangential
        .iter()
        .enumerate()
        .map(|(k, s)| {
            s.iter()
                .enumerate()
                .map(|(p, z)| z + plan.riesz_symbol(k + 1, p) * sum[p])
                .collect()
        })
        .collect()
}

/// Decompose a paravector field `f_0 + Σ f_k e_k` in `Cl(n)`.
pub fn decompose_paravector(field: &SampledField, opts: DecomposeOptions, plan: &MultiplierPlan) -> Result<HardyHodgeResult> {
    expect_kind(field.kind(), &[FieldKind::Paravector])?;
    let spec = field.spec().clone();
    let n = spec.n;
    let total = spec.total();
    let prep = prepare(field, &[0], opts, plan)?;
    let f0 = &prep.spectra[0];
    let tangential: Vec<&Vec<Complex64>> = prep.spectra[1..].iter().collect();
    let rsum = riesz_sum(plan, &tangential);
    let phi_plus: Vec<Complex64> = (0..total).map(|p| 0.5 * (f0[p] + rsum[p])).collect();
    let phi_minus: Vec<Complex64> = (0..total).map(|p| 0.5 * (f0[p] - rsum[p])).collect();

    // (I + H) φ = φ - Σ_k R_k φ e_k and (I - H) φ = φ + Σ_k R_k φ e_k.
    let hardy = |phi: &Vec<Complex64>, sign: f64| -> Vec<Vec<Complex64>> {
        let mut out = vec![phi.clone()];
        for k in 1..=n {
            out.push((0..total).map(|p| sign * plan.riesz_symbol(k, p) * phi[p]).collect());
        }
        out
    };
    let f_plus = SampledField::new(spec.clone(), FieldKind::Paravector, inverse_all(plan, hardy(&phi_plus, -1.0)))?;
    let f_minus = SampledField::new(spec.clone(), FieldKind::Paravector, inverse_all(plan, hardy(&phi_minus, 1.0)))?;

    let tangential_means: Vec<f64> = (1..=n).map(|c| prep.spectra[c][0].re / total as f64).collect();
    let mut zero_comps = vec![vec![0.0; total]];
    for (k, c) in inverse_all(plan, term3_spectra(plan, &tangential)).into_iter().enumerate() {
        zero_comps.push(c.into_iter().map(|v| v + tangential_means[k]).collect());
    }
    let f_zero = SampledField::new(spec.clone(), FieldKind::Paravector, zero_comps)?;

    let norm = lp_norm(&prep.input, 2.0);
    let mut report = base_report(Decomposition::Paravector, &prep, [&f_plus, &f_minus, &f_zero])?;
    report.residuals.divergence = Some(relative(divergence_residual(&f_zero, plan)?, norm));
    if prep.diagnostics {
        let mut alt = vec![vec![0.0; total]];
        alt.extend(inverse_all(plan, projection_spectra(plan, &tangential)));
        let alt = SampledField::new(spec.clone(), FieldKind::Paravector, alt)?;
        report.residuals.term3_routes = Some(relative(lp_norm(&alt.sub(&f_zero)?, 2.0), norm));

        let purity = |part: &SampledField, upper: bool| -> Result<f64> {
            let mv = part.to_multivector()?;
            let h = hilbert_clifford(&mv, plan)?;
            let proj = mv.combine(0.5, &h, if upper { 0.5 } else { -0.5 })?;
            Ok(proj.paravector_part()?.1)
        };
        report.residuals.grade_purity = Some(relative(
            purity(&f_plus, true)?.max(purity(&f_minus, false)?),
            prep.input.max_abs(),
        ));
    }
    Ok(HardyHodgeResult {
        f_plus,
        f_minus,
        f_zero,
        report,
    })
}

/// Decompose a vector field `(f_1, ..., f_n, f_{n+1})` in `Cl(n+1)`.
pub fn decompose_homogeneous(field: &SampledField, opts: DecomposeOptions, plan: &MultiplierPlan) -> Result<HardyHodgeResult> {
    expect_kind(field.kind(), &[FieldKind::Vector])?;
    let spec = field.spec().clone();
    let n = spec.n;
    let total = spec.total();
    let prep = prepare(field, &[n], opts, plan)?;
    let normal = &prep.spectra[n];
    let tangential: Vec<&Vec<Complex64>> = prep.spectra[..n].iter().collect();
    let rsum = riesz_sum(plan, &tangential);
    let h_plus: Vec<Complex64> = (0..total).map(|p| 0.5 * (normal[p] - rsum[p])).collect();
    let h_minus: Vec<Complex64> = (0..total).map(|p| 0.5 * (normal[p] + rsum[p])).collect();

    let gradient_form = |h: &Vec<Complex64>, sign: f64| -> Vec<Vec<Complex64>> {
        let mut out: Vec<Vec<Complex64>> = (1..=n)
            .map(|k| (0..total).map(|p| sign * plan.riesz_symbol(k, p) * h[p]).collect())
            .collect();
        out.push(h.clone());
        out
    };
    let f_plus = SampledField::new(spec.clone(), FieldKind::Vector, inverse_all(plan, gradient_form(&h_plus, 1.0)))?;
    let f_minus = SampledField::new(spec.clone(), FieldKind::Vector, inverse_all(plan, gradient_form(&h_minus, -1.0)))?;

    let mut zero_comps = inverse_all(plan, projection_spectra(plan, &tangential));
    zero_comps.push(vec![0.0; total]);
    let f_zero = SampledField::new(spec.clone(), FieldKind::Vector, zero_comps)?;

    let norm = lp_norm(&prep.input, 2.0);
    let mut report = base_report(Decomposition::Homogeneous, &prep, [&f_plus, &f_minus, &f_zero])?;
    report.residuals.divergence = Some(relative(divergence_residual(&f_zero, plan)?, norm));
    if prep.diagnostics {
        let tangential_means: Vec<f64> = (0..n).map(|c| prep.spectra[c][0].re / total as f64).collect();
        let mut term3: Vec<Vec<f64>> = inverse_all(plan, term3_spectra(plan, &tangential))
            .into_iter()
            .enumerate()
            .map(|(k, c)| c.into_iter().map(|v| v + tangential_means[k]).collect())
            .collect();
        term3.push(vec![0.0; total]);
        let term3 = SampledField::new(spec.clone(), FieldKind::Vector, term3)?;
        report.residuals.term3_routes = Some(relative(lp_norm(&term3.sub(&f_zero)?, 2.0), norm));
    }
    Ok(HardyHodgeResult {
        f_plus,
        f_minus,
        f_zero,
        report,
    })
}

/// Two-term split `f = ½(I + H) f + ½(I - H) f` of a quaternion field on `R³`.
pub fn decompose_quaternionic(field: &SampledField, opts: DecomposeOptions, plan: &MultiplierPlan) -> Result<HardyHodgeResult> {
    expect_kind(field.kind(), &[FieldKind::Quaternion])?;
    let spec = field.spec().clone();
    let prep = prepare(field, &[0, 1, 2, 3], opts, plan)?;
    let h = hilbert_quaternion(&prep.input, plan)?;
    let f_plus = prep.input.combine(0.5, &h, 0.5)?;
    let f_minus = prep.input.combine(0.5, &h, -0.5)?;
    let f_zero = SampledField::zeros(&spec, FieldKind::Quaternion)?;
    let opposite = |part: &SampledField, upper: bool| -> Result<f64> {
        let hp = hilbert_quaternion(part, plan)?;
        Ok(lp_norm(&part.combine(0.5, &hp, if upper { -0.5 } else { 0.5 })?, 2.0))
    };
    let norm = lp_norm(&prep.input, 2.0);
    let mut report = base_report(Decomposition::Quaternionic, &prep, [&f_plus, &f_minus, &f_zero])?;
    if prep.diagnostics {
        report.residuals.annihilation = Some(relative(opposite(&f_plus, true)?.max(opposite(&f_minus, false)?), norm));
    }
    Ok(HardyHodgeResult {
        f_plus,
        f_minus,
        f_zero,
        report,
    })
}

fn base_report(decomposition: Decomposition, prep: &Prepared, parts: [&SampledField; 3]) -> Result<DecompositionReport> {
    let input = &prep.input;
    let norm = lp_norm(input, 2.0);
    let [plus, minus, zero] = parts;
    let sum = plus.add(minus)?.add(zero)?;
    let norms = Norms {
        input: norm,
        plus: lp_norm(plus, 2.0),
        minus: lp_norm(minus, 2.0),
        zero: lp_norm(zero, 2.0),
    };
    let cross = orthogonality_report(plus, minus, zero)?;
    let pythagoras = (norm * norm - norms.plus.powi(2) - norms.minus.powi(2) - norms.zero.powi(2)).abs();
    let exponents: &[f64] = if prep.diagnostics { &[4.0 / 3.0, 4.0] } else { &[] };
    let lp = exponents
        .iter()
        .map(|&p| LpNorms {
            p,
            input: lp_norm(input, p),
            plus: lp_norm(plus, p),
            minus: lp_norm(minus, p),
            zero: lp_norm(zero, p),
        })
        .collect();
    Ok(DecompositionReport {
        decomposition,
        norms,
        residuals: Residuals {
            reconstruction: relative(lp_norm(&input.sub(&sum)?, 2.0), norm),
            pythagoras: relative(pythagoras, norm * norm),
            cross_terms: relative(cross.max_abs(), norm * norm),
            ..Residuals::default()
        },
        cross_terms: cross,
        lp_norms: lp,
        dc_policy: prep.mode,
        dc_means: prep.dc_means.clone(),
        dc_stripped: prep.dc_stripped,
        nyquist_stripped: prep.nyquist_stripped,
        grid_spec: input.spec().clone(),
    })
}

/// Sign of `Sc{e_c ē_c}` for each stored component of `kind`.
fn pairing_signs(kind: FieldKind, n: usize) -> Vec<f64> {
    let blade_sign = |b: BladeIndex| {
        let conj = if b.grade() % 2 == 0 { 1.0 } else { -1.0 };
        let (sign, c) = blade_product_unchecked(b, b);
        debug_assert_eq!(c, BladeIndex::SCALAR);
        conj * sign
    };
    match kind {
        FieldKind::Scalar => vec![1.0],
        FieldKind::Paravector => (0..=n)
            .map(|k| if k == 0 { 1.0 } else { blade_sign(BladeIndex::generator(k)) })
            .collect(),
        FieldKind::Vector => (1..=n + 1).map(|k| blade_sign(BladeIndex::generator(k))).collect(),
        FieldKind::Multivector => (0..1u32 << n).map(|m| blade_sign(BladeIndex(m))).collect(),
        FieldKind::Quaternion => (0..4)
            .map(|k| {
                let q = Quaternion::basis(k);
                (q * q.conjugate()).w
            })
            .collect(),
    }
}

/// The scalar product `⟨a, b⟩ = Sc ∫ a b̄`.
pub fn scalar_product(a: &SampledField, b: &SampledField) -> Result<f64> {
    a.check_compatible(b)?;
    let signs = pairing_signs(a.kind(), a.spec().n);
    let mut acc = 0.0;
    for ((x, y), s) in a.components().iter().zip(b.components()).zip(&signs) {
        acc += s * x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>();
    }
    Ok(acc * a.spec().cell_volume())
}

/// Signed pairwise products: `c12 = Sc ∫ f⁺ f̄⁻`,
/// `c13 = Sc ∫ (f⁺ f̄⁰ + f⁰ f̄⁺)`, `c23 = Sc ∫ (f⁻ f̄⁰ + f⁰ f̄⁻)`.
pub fn orthogonality_report(f_plus: &SampledField, f_minus: &SampledField, f_zero: &SampledField) -> Result<CrossTerms> {
    Ok(CrossTerms {
        c12: scalar_product(f_plus, f_minus)?,
        c13: scalar_product(f_plus, f_zero)? + scalar_product(f_zero, f_plus)?,
        c23: scalar_product(f_minus, f_zero)? + scalar_product(f_zero, f_minus)?,
    })
}

/// Component indices holding the tangential parts `f_1..f_n` of `kind`.
fn tangential_components(kind: FieldKind, n: usize) -> Result<(Vec<usize>, Option<usize>)> {
    match kind {
        FieldKind::Paravector => Ok(((1..=n).collect(), Some(0))),
        FieldKind::Vector => Ok(((0..n).collect(), Some(n))),
        FieldKind::Quaternion => Ok((vec![1, 2, 3], Some(0))),
        other => Err(Error::KindMismatch {
            expected: "paravector|vector|quaternion".into(),
            found: other.to_string(),
        }),
    }
}

/// `L²` norm of the spectral divergence `Σ_k κ_k f̂_k` of a tangent field.
pub fn divergence_residual(field: &SampledField, plan: &MultiplierPlan) -> Result<f64> {
    check_plan(field, plan)?;
    let (tangential, normal) = tangential_components(field.kind(), field.spec().n)?;
    if let Some(c) = normal {
        if field.component(c).iter().any(|&v| v != 0.0) {
            return Err(Error::KindMismatch {
                expected: "tangent field".into(),
                found: format!("{} with nonzero component {c}", field.kind()),
            });
        }
    }
    Ok(spectral_l2(field.spec(), &divergence_spectrum(field, &tangential, plan)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TangentialCheck {
    /// `max_{j<k} ‖κ_j ĝ_k − κ_k ĝ_j‖₂` for the tangential part `g` of `f⁺ + f⁻`.
    pub curl_residual: f64,
    /// Divergence of `f⁰`.
    pub div_residual: f64,
}

/// Classical Helmholtz-Hodge reading of a decomposition: the tangential part
/// of `f⁺ + f⁻` is a gradient, `f⁰` is divergence-free.
pub fn hodge_tangential_check(result: &HardyHodgeResult, plan: &MultiplierPlan) -> Result<TangentialCheck> {
    let spec = result.f_plus.spec();
    let (tangential, _) = tangential_components(result.f_plus.kind(), spec.n)?;
    let g = result.f_plus.add(&result.f_minus)?;
    let spectra: Vec<Vec<Complex64>> = tangential.iter().map(|&c| plan.forward(g.component(c))).collect();
    let total = spec.total();
    let mut curl: f64 = 0.0;
    for j in 0..spec.n {
        for k in j + 1..spec.n {
            let kj = plan.wavenumbers(j);
            let kk = plan.wavenumbers(k);
            let s: Vec<Complex64> = (0..total).map(|p| kj[p] * spectra[k][p] - kk[p] * spectra[j][p]).collect();
            curl = curl.max(spectral_l2(spec, &s));
        }
    }
    let div_residual = if result.report.decomposition == Decomposition::Quaternionic {
        0.0
    } else {
        divergence_residual(&result.f_zero, plan)?
    };
    Ok(TangentialCheck {
        curl_residual: curl,
        div_residual,
    })
}

/// Dispatch on the field kind.
pub fn decompose(field: &SampledField, opts: DecomposeOptions, plan: &MultiplierPlan) -> Result<HardyHodgeResult> {
    match field.kind() {
        FieldKind::Paravector => decompose_paravector(field, opts, plan),
        FieldKind::Vector => decompose_homogeneous(field, opts, plan),
        FieldKind::Quaternion => decompose_quaternionic(field, opts, plan),
        other => Err(Error::KindMismatch {
            expected: "paravector|vector|quaternion".into(),
            found: other.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{mv_mul, Multivector};
    use crate::synth::{synth_field, Recipe};

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::cube(n, pts).unwrap()
    }

    fn random(spec: &GridSpec, kind: FieldKind, seed: u64) -> SampledField {
        let band = Recipe::default_band(spec);
        synth_field(spec, kind, &Recipe::BandlimitedRandom { max_freq: band }, seed).unwrap()
    }

    fn opts() -> DecomposeOptions {
        DecomposeOptions::default()
    }

    fn norm(f: &SampledField) -> f64 {
        lp_norm(f, 2.0)
    }

    #[test]
    fn random_paravector_invariants() {
        for (n, pts) in [(1, 16), (2, 16), (3, 8)] {
            let g = grid(n, pts);
            let plan = MultiplierPlan::new(&g, DcPolicy::Error);
            for seed in 0..3 {
                let f = random(&g, FieldKind::Paravector, seed);
                let r = decompose_paravector(&f, opts(), &plan).unwrap();
                let res = r.report.residuals;
                assert!(res.reconstruction < 1e-13, "{res:?}");
                assert!(res.pythagoras < 1e-13, "{res:?}");
                assert!(res.cross_terms < 1e-13, "{res:?}");
                assert!(res.divergence.unwrap() < 1e-13, "{res:?}");
                assert!(res.term3_routes.unwrap() < 1e-13, "{res:?}");
                assert!(res.grade_purity.unwrap() < 1e-13, "{res:?}");
                assert!(r.f_zero.component(0).iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn hardy_plus_and_divfree_are_fixed() {
        let g = grid(2, 32);
        let plan = MultiplierPlan::new(&g, DcPolicy::Error);
        let h = Box::new(Recipe::BandlimitedRandom { max_freq: 15 });
        let plus = synth_field(&g, FieldKind::Paravector, &Recipe::HardyPlus { h: h.clone() }, 7).unwrap();
        let r = decompose_paravector(&plus, opts(), &plan).unwrap();
        assert!(norm(&r.f_minus) < 1e-13 && norm(&r.f_zero) < 1e-13);
        assert!(norm(&r.f_plus.sub(&plus).unwrap()) < 1e-13);

        let minus = synth_field(&g, FieldKind::Paravector, &Recipe::HardyMinus { h }, 7).unwrap();
        let r = decompose_paravector(&minus, opts(), &plan).unwrap();
        assert!(norm(&r.f_plus) < 1e-13 && norm(&r.f_zero) < 1e-13);

        let div_free = synth_field(&g, FieldKind::Paravector, &Recipe::DivfreeRandom { max_freq: 15 }, 3).unwrap();
        let r = decompose_paravector(&div_free, opts(), &plan).unwrap();
        assert!(norm(&r.f_plus) < 1e-13 && norm(&r.f_minus) < 1e-13);
        assert!(norm(&r.f_zero.sub(&div_free).unwrap()) < 1e-13);
    }

    #[test]
    fn closed_form_matches_plemelj_scalar_parts() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = random(&g, FieldKind::Paravector, 11);
        let r = decompose_paravector(&f, opts(), &plan).unwrap();
        for (upper, part) in [(true, &r.f_plus), (false, &r.f_minus)] {
            let phi = crate::spectral::plemelj(&f, upper, &plan).unwrap().scalar_part().unwrap();
            let expected = crate::synth::hardy_from_scalar(&phi, FieldKind::Paravector, upper, &plan).unwrap();
            assert!(norm(&expected.sub(part).unwrap()) < 1e-13);
        }
    }

    #[test]
    fn tangential_means_go_to_zero_part() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let mut f = random(&g, FieldKind::Paravector, 1);
        for v in f.component_mut(2).iter_mut() {
            *v += 0.25;
        }
        let r = decompose_paravector(&f, opts(), &plan).unwrap();
        assert!((r.f_zero.means()[2] - 0.25).abs() < 1e-14);
        assert!(r.report.residuals.reconstruction < 1e-13);
        assert!(r.report.residuals.term3_routes.unwrap() < 1e-13);
    }

    #[test]
    fn scalar_mean_policies() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let mut f = random(&g, FieldKind::Paravector, 2);
        for v in f.component_mut(0).iter_mut() {
            *v += 0.5;
        }
        let err = decompose_paravector(&f, opts(), &plan).unwrap_err();
        assert!(err.to_string().starts_with("DCViolation"));
        let strip = DecomposeOptions::with_dc(DcMode::Strip);
        let r = decompose_paravector(&f, strip, &plan).unwrap();
        assert!(r.report.dc_stripped);
        assert!((r.report.dc_means[0] - 0.5).abs() < 1e-14);
        let restored = r.f_plus.add(&r.f_minus).unwrap().add(&r.f_zero).unwrap();
        assert!((restored.means()[0]).abs() < 1e-14);
        assert!(decompose_paravector(&f, DecomposeOptions::with_dc(DcMode::Tolerate(1.0)), &plan).is_ok());
        assert!(decompose_paravector(&f, DecomposeOptions::with_dc(DcMode::Tolerate(0.1)), &plan).is_err());
    }

    #[test]
    fn nyquist_content_policies() {
        let g = grid(1, 8);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        // cos(4x) lives entirely on the Nyquist index of an 8-point grid.
        let f = SampledField::from_fn(&g, FieldKind::Paravector, |x| vec![(4.0 * x[0]).cos() + x[0].sin(), 0.0]).unwrap();
        assert!(matches!(
            decompose_paravector(&f, opts(), &plan),
            Err(Error::NyquistContent { component: 0, .. })
        ));
        let r = decompose_paravector(&f, DecomposeOptions::with_dc(DcMode::Strip), &plan).unwrap();
        // Sampled at the Nyquist index cos(4x) alternates ±1, so its norm is √(2π).
        assert!((r.report.nyquist_stripped - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!(r.report.residuals.reconstruction < 1e-13);
    }

    #[test]
    fn homogeneous_gradient_form_is_upper() {
        for (n, pts) in [(2, 16), (3, 8)] {
            let g = grid(n, pts);
            let plan = MultiplierPlan::new(&g, DcPolicy::Error);
            let h = Box::new(Recipe::BandlimitedRandom { max_freq: pts / 2 - 1 });
            let f = synth_field(&g, FieldKind::Vector, &Recipe::HardyPlus { h }, 5).unwrap();
            let r = decompose_homogeneous(&f, opts(), &plan).unwrap();
            assert!(norm(&r.f_minus) < 1e-13 && norm(&r.f_zero) < 1e-13);
            assert!(norm(&r.f_plus.sub(&f).unwrap()) < 1e-13);

            let x = random(&g, FieldKind::Vector, 9);
            let r = decompose_homogeneous(&x, opts(), &plan).unwrap();
            let res = r.report.residuals;
            assert!(res.reconstruction < 1e-13 && res.pythagoras < 1e-13 && res.cross_terms < 1e-13);
            assert!(res.divergence.unwrap() < 1e-13 && res.term3_routes.unwrap() < 1e-13);
        }
    }

    #[test]
    fn homogeneous_tangent_divfree_is_zero_part() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Error);
        let f = synth_field(&g, FieldKind::Vector, &Recipe::DivfreeRandom { max_freq: 7 }, 4).unwrap();
        let r = decompose_homogeneous(&f, opts(), &plan).unwrap();
        assert!(norm(&r.f_plus) < 1e-13 && norm(&r.f_minus) < 1e-13);
    }

    /// Factor `e_{n+1}` out on the right: `f = g e_{n+1}` with `g` a paravector
    /// in the generators `ẽ_k = -e_k e_{n+1}`, decompose `g`, multiply back.
    #[test]
    fn homogeneous_matches_factoring_reduction() {
        let g = grid(2, 8);
        let n = 2;
        let plan = MultiplierPlan::new(&g, DcPolicy::Error);
        let f = random(&g, FieldKind::Vector, 21);
        let en1 = Multivector::e(n + 1, n + 1).unwrap();
        let en1_inv = en1.scale(-1.0);
        let bivector = |k: usize| BladeIndex::generator(k).0 | BladeIndex::generator(n + 1).0;

        let mut gcomps = vec![vec![0.0; g.total()]; n + 1];
        for p in 0..g.total() {
            let gv = mv_mul(&f.multivector_at(p).unwrap(), &en1_inv).unwrap();
            gcomps[0][p] = gv.sc_part();
            for k in 1..=n {
                gcomps[k][p] = -gv.coeff(BladeIndex(bivector(k)));
            }
        }
        let gfield = SampledField::new(g.clone(), FieldKind::Paravector, gcomps).unwrap();
        let split = decompose_paravector(&gfield, opts(), &plan).unwrap();

        let back = |part: &SampledField| -> SampledField {
            let mut comps = vec![vec![0.0; g.total()]; n + 1];
            for p in 0..g.total() {
                let mut gv = Multivector::zero(n + 1).unwrap();
                gv.set(BladeIndex::SCALAR, part.component(0)[p]);
                for k in 1..=n {
                    gv.set(BladeIndex(bivector(k)), -part.component(k)[p]);
                }
                let fv = mv_mul(&gv, &en1).unwrap();
                for k in 1..=n + 1 {
                    comps[k - 1][p] = fv.coeff(BladeIndex::generator(k));
                }
            }
            SampledField::new(g.clone(), FieldKind::Vector, comps).unwrap()
        };
        let hom = decompose_homogeneous(&f, opts(), &plan).unwrap();
        // The factoring exchanges the roles of the two half-spaces.
        assert!(norm(&hom.f_plus.sub(&back(&split.f_minus)).unwrap()) < 1e-13);
        assert!(norm(&hom.f_minus.sub(&back(&split.f_plus)).unwrap()) < 1e-13);
        assert!(norm(&hom.f_zero.sub(&back(&split.f_zero)).unwrap()) < 1e-13);
    }

    #[test]
    fn quaternionic_split() {
        let g = grid(3, 8);
        let plan = MultiplierPlan::new(&g, DcPolicy::Error);
        let f = random(&g, FieldKind::Quaternion, 3);
        let r = decompose_quaternionic(&f, opts(), &plan).unwrap();
        let res = r.report.residuals;
        assert!(res.reconstruction < 1e-15 && res.pythagoras < 1e-13 && res.cross_terms < 1e-13);
        assert!(res.annihilation.unwrap() < 1e-13);
        assert_eq!(norm(&r.f_zero), 0.0);
        assert!(decompose_quaternionic(&random(&g, FieldKind::Paravector, 3), opts(), &plan).is_err());
    }

    #[test]
    fn divergence_residual_examples() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        // psi = sin(x) cos(2y): curl field (∂₂ψ, −∂₁ψ) and gradient field ∇ψ.
        let curl = SampledField::from_fn(&g, FieldKind::Paravector, |x| {
            vec![0.0, -2.0 * x[0].sin() * (2.0 * x[1]).sin(), -x[0].cos() * (2.0 * x[1]).cos()]
        })
        .unwrap();
        assert!(divergence_residual(&curl, &plan).unwrap() < 1e-12);
        let grad = SampledField::from_fn(&g, FieldKind::Paravector, |x| {
            vec![0.0, x[0].cos() * (2.0 * x[1]).cos(), -2.0 * x[0].sin() * (2.0 * x[1]).sin()]
        })
        .unwrap();
        // Δψ = -5ψ, and ‖ψ‖₂ = π.
        let expected = 5.0 * std::f64::consts::PI;
        assert!((divergence_residual(&grad, &plan).unwrap() - expected).abs() < 1e-11);
        let r = decompose_paravector(&grad, opts(), &plan).unwrap();
        assert!(norm(&r.f_zero) < 1e-13);
        let check = hodge_tangential_check(&r, &plan).unwrap();
        assert!(check.curl_residual < 1e-12 && check.div_residual < 1e-12);
        assert!(divergence_residual(&random(&g, FieldKind::Paravector, 0), &plan).is_err());
    }

    #[test]
    fn orthogonality_of_hand_built_parts() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let phi = random(&g, FieldKind::Scalar, 1);
        let psi = random(&g, FieldKind::Scalar, 2);
        let a = crate::synth::hardy_from_scalar(&phi, FieldKind::Paravector, true, &plan).unwrap();
        let b = crate::synth::hardy_from_scalar(&psi, FieldKind::Paravector, false, &plan).unwrap();
        let zero = SampledField::zeros(&g, FieldKind::Paravector).unwrap();
        let c = orthogonality_report(&a, &b, &zero).unwrap();
        assert!(c.c12.abs() < 1e-13);
        assert_eq!((c.c13, c.c23), (0.0, 0.0));
    }

    #[test]
    fn report_serializes_with_expected_keys() {
        let g = grid(1, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let r = decompose(&random(&g, FieldKind::Paravector, 0), opts(), &plan).unwrap();
        let v = serde_json::to_value(&r.report).unwrap();
        for key in ["norms", "residuals", "dcMeans", "gridSpec", "crossTerms"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
