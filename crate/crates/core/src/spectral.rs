//! Fourier-multiplier operators: Riesz transforms `R_k` with symbol
//! `-i κ_k/|κ|`, the Clifford Hilbert transform `H = Σ_k (-e_k) R_k`, and the
//! Plemelj projections `½(I ± H)`.
//!
//! Conventions:
//! - the symbol is zero at `κ = 0`, so `H² = I` holds on mean-zero fields;
//! - Nyquist indices use the representative `-N/2`; odd symbols are
//!   Hermitian-symmetrized, which zeroes `R_k` on the Nyquist plane of axis
//!   `k` and keeps every output exactly real.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{blade_product_unchecked, BladeIndex, Quaternion};
use crate::error::{Error, Result};
use crate::fft::{self, FftNd};
use crate::grid::{FieldKind, GridSpec, SampledField};

/// Largest lattice accepted by [`riesz_oracle_dft`].
pub const ORACLE_CAP: usize = 4096;

/// Relative size of a mean treated as "zero" under [`DcPolicy::Error`].
pub const DC_RELATIVE_TOL: f64 = 1e-12;

/// What to do with the zero-frequency mode, where `κ_k/|κ|` is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcPolicy {
    /// Multiplier is 0 at `κ = 0`; means are silently annihilated.
    Zero,
    /// Reject inputs whose mean exceeds rounding level.
    Error,
    /// Accept means up to the given absolute size, reject larger ones.
    Tolerate(f64),
}

/// Precomputed frequency data for one grid.
#[derive(Debug, Clone)]
pub struct MultiplierPlan {
    spec: GridSpec,
    dc_policy: DcPolicy,
    fft: FftNd,
    /// `|κ|` per lattice point.
    abs_k: Vec<f64>,
    /// `κ_k` per axis and lattice point, zero on the Nyquist plane of that axis.
    odd_k: Vec<Vec<f64>>,
    /// `κ_k/|κ|` with the same Nyquist and DC conventions.
    unit: Vec<Vec<f64>>,
}

impl MultiplierPlan {
    pub fn new(spec: &GridSpec, dc_policy: DcPolicy) -> Self {
        let total = spec.total();
        let n = spec.n;
        let mut abs_k = vec![0.0; total];
        let mut odd_k = vec![vec![0.0; total]; n];
        let mut unit = vec![vec![0.0; total]; n];
        for p in 0..total {
            let idx = spec.unravel(p);
            let kappa: Vec<f64> = (0..n).map(|a| spec.wavenumber(a, idx[a])).collect();
            let norm = kappa.iter().map(|k| k * k).sum::<f64>().sqrt();
            abs_k[p] = norm;
            for a in 0..n {
                if spec.is_nyquist(a, idx[a]) {
                    continue;
                }
                odd_k[a][p] = kappa[a];
                if norm > 0.0 {
                    unit[a][p] = kappa[a] / norm;
                }
            }
        }
        Self {
            spec: spec.clone(),
            dc_policy,
            fft: FftNd::new(&spec.shape),
            abs_k,
            odd_k,
            unit,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dc_policy(&self) -> DcPolicy {
        self.dc_policy
    }

    pub fn abs_k(&self) -> &[f64] {
        &self.abs_k
    }

    /// `κ_axis` per lattice point (zero on that axis' Nyquist plane).
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.odd_k[axis]
    }

    /// `κ_axis/|κ|` per lattice point.
    pub fn unit(&self, axis: usize) -> &[f64] {
        &self.unit[axis]
    }

    pub fn fft(&self) -> &FftNd {
        &self.fft
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        fft::forward_real(&self.fft, values)
    }

    pub fn inverse(&self, spectrum: Vec<Complex64>) -> Vec<f64> {
        let (out, imag) = fft::inverse_real(&self.fft, spectrum);
        debug_assert!(
            imag <= 1e-13 * (1.0 + out.iter().fold(0.0f64, |m, v| m.max(v.abs()))),
            "non-real multiplier output (imaginary residue {imag:e})"
        );
        out
    }

    /// Multiply a real array's spectrum by `symbol(p)` and transform back.
    pub fn apply(&self, values: &[f64], symbol: impl Fn(usize) -> Complex64) -> Vec<f64> {
        let mut spec = self.forward(values);
        for (p, z) in spec.iter_mut().enumerate() {
            *z *= symbol(p);
        }
        self.inverse(spec)
    }

    /// Riesz symbol `-i κ_k/|κ|` (1-based `k`) at lattice point `p`.
    #[inline]
    pub fn riesz_symbol(&self, k: usize, p: usize) -> Complex64 {
        Complex64::new(0.0, -self.unit[k - 1][p])
    }

    /// Spectral derivative `∂_axis` (0-based axis) of a real array.
    pub fn derivative(&self, values: &[f64], axis: usize) -> Vec<f64> {
        let k = &self.odd_k[axis];
        self.apply(values, |p| Complex64::new(0.0, k[p]))
    }

    /// Enforce the plan's DC policy on every component of `field`.
    pub fn check_dc(&self, field: &SampledField) -> Result<()> {
        check_means(field, self.dc_policy, 0..field.component_count())
    }
}

/// Apply a DC policy to the listed components.
pub(crate) fn check_means(
    field: &SampledField,
    policy: DcPolicy,
    components: impl IntoIterator<Item = usize>,
) -> Result<()> {
    let threshold = match policy {
        DcPolicy::Zero => return Ok(()),
        DcPolicy::Error => {
            let rms = (field
                .components()
                .iter()
                .flat_map(|c| c.iter())
                .map(|v| v * v)
                .sum::<f64>()
                / (field.spec().total() * field.component_count()) as f64)
                .sqrt();
            DC_RELATIVE_TOL * rms.max(f64::MIN_POSITIVE)
        }
        DcPolicy::Tolerate(eps) => eps,
    };
    let means = field.means();
    for c in components {
        if means[c].abs() > threshold {
            return Err(Error::DcViolation {
                component: c,
                mean: means[c],
                threshold,
            });
        }
    }
    Ok(())
}

fn check_axis(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::DimensionMismatch { expected: n, found: k });
    }
    Ok(())
}

/// `k`-th Riesz transform (1-based), applied componentwise.
pub fn riesz(field: &SampledField, k: usize, plan: &MultiplierPlan) -> Result<SampledField> {
    check_plan(field, plan)?;
    check_axis(k, field.spec().n)?;
    plan.check_dc(field)?;
    let components = field
        .components()
        .par_iter()
        .map(|c| plan.apply(c, |p| plan.riesz_symbol(k, p)))
        .collect();
    SampledField::new(field.spec().clone(), field.kind(), components)
}

pub(crate) fn check_plan(field: &SampledField, plan: &MultiplierPlan) -> Result<()> {
    if field.spec() != plan.spec() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Clifford (or quaternionic) Hilbert transform `H f = Σ_k (-e_k) R_k f`.
///
/// Scalar, paravector and multivector inputs produce a multivector field;
/// quaternion inputs (n = 3) stay quaternionic.
pub fn hilbert(field: &SampledField, plan: &MultiplierPlan) -> Result<SampledField> {
    check_plan(field, plan)?;
    plan.check_dc(field)?;
    match field.kind() {
        FieldKind::Quaternion => hilbert_quaternion(field, plan),
        FieldKind::Scalar | FieldKind::Paravector | FieldKind::Multivector => {
            hilbert_clifford(&field.to_multivector()?, plan)
        }
        FieldKind::Vector => Err(Error::KindMismatch {
            expected: "scalar|paravector|multivector|quaternion".into(),
            found: "vector".into(),
        }),
    }
}

pub(crate) fn hilbert_clifford(field: &SampledField, plan: &MultiplierPlan) -> Result<SampledField> {
    let n = field.spec().n;
    let total = field.spec().total();
    let blades = 1usize << n;
    let spectra: Vec<Vec<Complex64>> = field
        .components()
        .par_iter()
        .map(|c| plan.forward(c))
        .collect();
    let out: Vec<Vec<f64>> = (0..blades)
        .into_par_iter()
        .map(|target| {
            let mut acc = vec![Complex64::new(0.0, 0.0); total];
            let mut touched = false;
            for k in 1..=n {
                let gen = BladeIndex::generator(k);
                let source = target ^ gen.0 as usize;
                let (sign, c) = blade_product_unchecked(gen, BladeIndex(source as u32));
                debug_assert_eq!(c.0 as usize, target);
                let src = &spectra[source];
                if src.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                touched = true;
                for p in 0..total {
                    acc[p] += -sign * plan.riesz_symbol(k, p) * src[p];
                }
            }
            if touched {
                plan.inverse(acc)
            } else {
                vec![0.0; total]
            }
        })
        .collect();
    SampledField::new(field.spec().clone(), FieldKind::Multivector, out)
}

pub(crate) fn hilbert_quaternion(field: &SampledField, plan: &MultiplierPlan) -> Result<SampledField> {
    let total = field.spec().total();
    let spectra: Vec<Vec<Complex64>> = field
        .components()
        .par_iter()
        .map(|c| plan.forward(c))
        .collect();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); total]; 4];
    for k in 1..=3 {
        let neg_e = -Quaternion::basis(k);
        for (c, src) in spectra.iter().enumerate() {
            let prod = (neg_e * Quaternion::basis(c)).to_array();
            let (target, sign) = prod
                .iter()
                .enumerate()
                .find(|(_, v)| **v != 0.0)
                .map(|(t, v)| (t, *v))
                .expect("basis product is a signed basis element");
            for p in 0..total {
                acc[target][p] += sign * plan.riesz_symbol(k, p) * src[p];
            }
        }
    }
    let out = acc.into_par_iter().map(|s| plan.inverse(s)).collect();
    SampledField::new(field.spec().clone(), FieldKind::Quaternion, out)
}

/// Plemelj projection `½(f ± H f)`; `upper = true` selects the `+` sign.
pub fn plemelj(field: &SampledField, upper: bool, plan: &MultiplierPlan) -> Result<SampledField> {
    let h = hilbert(field, plan)?;
    let base = if field.kind() == FieldKind::Quaternion {
        field.clone()
    } else {
        field.to_multivector()?
    };
    let sign = if upper { 0.5 } else { -0.5 };
    base.combine(0.5, &h, sign)
}

/// Direct `O(N²)` DFT evaluation of [`riesz`], for testing the FFT path.
pub fn riesz_oracle_dft(field: &SampledField, k: usize) -> Result<SampledField> {
    let spec = field.spec();
    let total = spec.total();
    if total > ORACLE_CAP {
        return Err(Error::SizeCapExceeded {
            cap: ORACLE_CAP,
            points: total,
        });
    }
    check_axis(k, spec.n)?;
    let axis = k - 1;
    let indices: Vec<Vec<usize>> = (0..total).map(|p| spec.unravel(p)).collect();
    let phase = |m: &[usize], j: &[usize]| -> f64 {
        (0..spec.n)
            .map(|a| ((m[a] * j[a]) % spec.shape[a]) as f64 / spec.shape[a] as f64)
            .sum::<f64>()
            * 2.0
            * std::f64::consts::PI
    };
    let symbol: Vec<Complex64> = indices
        .iter()
        .map(|m| {
            let kap: Vec<f64> = (0..spec.n)
                .map(|a| {
                    let len = spec.shape[a] as i64;
                    let s = if (m[a] as i64) < len / 2 { m[a] as i64 } else { m[a] as i64 - len };
                    2.0 * std::f64::consts::PI / spec.lengths[a] * s as f64
                })
                .collect();
            let norm = kap.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || 2 * m[axis] == spec.shape[axis] {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -kap[axis] / norm)
            }
        })
        .collect();
    let components = field
        .components()
        .iter()
        .map(|values| {
            let spectrum: Vec<Complex64> = indices
                .iter()
                .map(|m| {
                    indices
                        .iter()
                        .zip(values)
                        .map(|(j, &v)| Complex64::from_polar(v, -phase(m, j)))
                        .sum::<Complex64>()
                })
                .collect();
            indices
                .iter()
                .map(|j| {
                    let s: Complex64 = indices
                        .iter()
                        .zip(&spectrum)
                        .zip(&symbol)
                        .map(|((m, z), w)| z * w * Complex64::from_polar(1.0, phase(m, j)))
                        .sum();
                    s.re / total as f64
                })
                .collect()
        })
        .collect();
    SampledField::new(spec.clone(), field.kind(), components)
}

/// Spectral divergence `Σ_k ∂_k f_k` of the tangential components.
///
/// `tangential` lists the component index holding `f_k` for each axis.
pub(crate) fn divergence_spectrum(
    field: &SampledField,
    tangential: &[usize],
    plan: &MultiplierPlan,
) -> Vec<Complex64> {
    let total = field.spec().total();
    let mut acc = vec![Complex64::new(0.0, 0.0); total];
    for (axis, &c) in tangential.iter().enumerate() {
        let s = plan.forward(field.component(c));
        let k = plan.wavenumbers(axis);
        for p in 0..total {
            acc[p] += k[p] * s[p];
        }
    }
    acc
}

/// Parseval-scaled `L²` norm of a spectrum: `sqrt(cellVolume/N Σ |ĝ|²)`.
pub(crate) fn spectral_l2(spec: &GridSpec, spectrum: &[Complex64]) -> f64 {
    let sum: f64 = spectrum.iter().map(|z| z.norm_sqr()).sum();
    (sum * spec.cell_volume() / spec.total() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::cube(n, pts).unwrap()
    }

    #[test]
    fn riesz_single_mode_gives_sine() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[0].cos()]).unwrap();
        let r1 = riesz(&f, 1, &plan).unwrap();
        let expected = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[0].sin()]).unwrap();
        assert!(r1.sub(&expected).unwrap().max_abs() < 1e-14);
        let g2 = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[1].cos()]).unwrap();
        assert!(riesz(&g2, 1, &plan).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn riesz_axis_out_of_range() {
        let g = grid(2, 8);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = SampledField::zeros(&g, FieldKind::Scalar).unwrap();
        assert!(riesz(&f, 0, &plan).is_err());
        assert!(riesz(&f, 3, &plan).is_err());
    }

    #[test]
    fn dc_policy_error_rejects_mean() {
        let g = grid(1, 8);
        let plan = MultiplierPlan::new(&g, DcPolicy::Error);
        let f = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![1.0 + x[0].cos()]).unwrap();
        assert!(matches!(riesz(&f, 1, &plan), Err(Error::DcViolation { .. })));
        let tolerant = MultiplierPlan::new(&g, DcPolicy::Tolerate(2.0));
        assert!(riesz(&f, 1, &tolerant).is_ok());
        let strict = MultiplierPlan::new(&g, DcPolicy::Tolerate(0.5));
        assert!(riesz(&f, 1, &strict).is_err());
    }

    #[test]
    fn hilbert_of_cosine_scalar() {
        let g = grid(2, 16);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[0].cos()]).unwrap();
        let h = hilbert(&f, &plan).unwrap();
        assert_eq!(h.kind(), FieldKind::Multivector);
        for p in 0..g.total() {
            let x = g.coords(p);
            assert!((h.component(1)[p] + x[0].sin()).abs() < 1e-14);
            assert!(h.component(0)[p].abs() < 1e-15);
            assert!(h.component(2)[p].abs() < 1e-15);
            assert!(h.component(3)[p].abs() < 1e-15);
        }
    }

    #[test]
    fn nyquist_content_is_annihilated_along_its_axis() {
        let g = grid(1, 8);
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![(4.0 * x[0]).cos()]).unwrap();
        assert!(riesz(&f, 1, &plan).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn oracle_size_cap() {
        let g = grid(2, 66);
        let f = SampledField::zeros(&g, FieldKind::Scalar).unwrap();
        assert!(matches!(riesz_oracle_dft(&f, 1), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn oracle_single_mode() {
        let g = grid(2, 8);
        let f = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[0].cos()]).unwrap();
        let r = riesz_oracle_dft(&f, 1).unwrap();
        let expected = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[0].sin()]).unwrap();
        assert!(r.sub(&expected).unwrap().max_abs() < 1e-13);
    }
}
