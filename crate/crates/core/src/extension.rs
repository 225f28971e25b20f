//! Extension of boundary data into the half-spaces.
//!
//! Two independent paths: the spectral Poisson extension `f̂ e^{-t|κ|}` on
//! the torus, and trapezoidal quadrature of the Cauchy kernel and of the
//! differentiated Newton kernel over one period cell (nearest image).
//! Half-space points are `(x_0, x_1, ..., x_n)` with `x_0` the signed height.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{blade_product_unchecked, BladeIndex, Multivector};
use crate::error::{Error, Result};
use crate::grid::{expect_kind, lp_norm, FieldKind, GridSpec, SampledField};
use crate::io;
use crate::spectral::{check_plan, MultiplierPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }

    pub fn of_height(x0: f64) -> Result<Side> {
        if x0 > 0.0 {
            Ok(Side::Upper)
        } else if x0 < 0.0 {
            Ok(Side::Lower)
        } else {
            Err(Error::PointOnBoundary)
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

/// Surface area of the unit sphere `S^n ⊂ R^{n+1}`.
pub fn omega_n(n: usize) -> f64 {
    // ω_0 = 2, ω_1 = 2π, ω_n = 2π ω_{n-2} / (n - 1).
    let (mut w, start) = if n % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut k = start;
    while k < n {
        k += 2;
        w *= 2.0 * PI / (k - 1) as f64;
    }
    w
}

/// Extended values at a list of heights above (or below) the boundary.
///
/// `heights` are magnitudes; the signed normal coordinate is
/// `side.sign() * height`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabSample {
    pub boundary_spec: GridSpec,
    pub side: Side,
    pub heights: Vec<f64>,
    pub values: Vec<SampledField>,
}

fn check_heights(heights: &[f64]) -> Result<()> {
    if let Some(&bad) = heights.iter().find(|&&h| !(h.is_finite() && h > 0.0)) {
        return Err(Error::NonPositiveHeight(bad));
    }
    if heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::UnsortedHeights);
    }
    Ok(())
}

impl SlabSample {
    pub fn new(boundary_spec: GridSpec, side: Side, heights: Vec<f64>, values: Vec<SampledField>) -> Result<Self> {
        check_heights(&heights)?;
        if heights.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: heights.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| v.spec() != &boundary_spec) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            boundary_spec,
            side,
            heights,
            values,
        })
    }

    /// Common spacing of the heights, for centered differences.
    pub fn uniform_step(&self) -> Result<f64> {
        if self.heights.len() < 3 {
            return Err(Error::TooFewHeights(self.heights.len()));
        }
        let h = self.heights[1] - self.heights[0];
        let uniform = self
            .heights
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(self.heights[self.heights.len() - 1]));
        if !uniform {
            return Err(Error::NonUniformHeights);
        }
        Ok(h)
    }
}

/// Spectral Poisson extension: every component's spectrum times `e^{-t|κ|}`.
/// The mean extends as a constant.
pub fn poisson_extend(f: &SampledField, heights: &[f64], plan: &MultiplierPlan, side: Side) -> Result<SlabSample> {
    check_plan(f, plan)?;
    check_heights(heights)?;
    let spectra: Vec<Vec<Complex64>> = f.components().par_iter().map(|c| plan.forward(c)).collect();
    let abs_k = plan.abs_k();
    let values = heights
        .par_iter()
        .map(|&t| {
            let damp: Vec<f64> = abs_k.iter().map(|k| (-t * k).exp()).collect();
            let comps = spectra
                .iter()
                .map(|s| plan.inverse(s.iter().zip(&damp).map(|(z, d)| z * d).collect()))
                .collect();
            SampledField::new(f.spec().clone(), f.kind(), comps)
        })
        .collect::<Result<Vec<_>>>()?;
    SlabSample::new(f.spec().clone(), side, heights.to_vec(), values)
}

/// Point evaluation of the spectral Poisson extension, by direct summation of
/// the trigonometric interpolant (valid off the lattice too).
#[derive(Debug, Clone)]
pub struct PoissonEvaluator {
    spec: GridSpec,
    spectra: Vec<Vec<Complex64>>,
    abs_k: Vec<f64>,
}

impl PoissonEvaluator {
    pub fn new(f: &SampledField, plan: &MultiplierPlan) -> Result<Self> {
        check_plan(f, plan)?;
        Ok(Self {
            spec: f.spec().clone(),
            spectra: f.components().iter().map(|c| plan.forward(c)).collect(),
            abs_k: plan.abs_k().to_vec(),
        })
    }

    /// Components of the extension at `x = (x_0, x_1..x_n)`; uses `|x_0|`.
    pub fn at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let spec = &self.spec;
        if x.len() != spec.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: spec.n + 1,
                found: x.len(),
            });
        }
        let t = x[0].abs();
        let phases: Vec<Vec<Complex64>> = (0..spec.n)
            .map(|a| {
                (0..spec.shape[a])
                    .map(|m| Complex64::from_polar(1.0, spec.wavenumber(a, m) * x[a + 1]))
                    .collect()
            })
            .collect();
        let total = spec.total();
        let mut out = vec![0.0; self.spectra.len()];
        for p in 0..total {
            let idx = spec.unravel(p);
            let mut w = Complex64::new((-t * self.abs_k[p]).exp() / total as f64, 0.0);
            for a in 0..spec.n {
                w *= phases[a][idx[a]];
            }
            for (o, s) in out.iter_mut().zip(&self.spectra) {
                *o += (s[p] * w).re;
            }
        }
        Ok(out)
    }
}

/// Quadrature weights `cellVolume · (x_0, x_1 - y_1, ..., x_n - y_n) / r^{n+1}`
/// over the boundary lattice `y`, nearest-image displacements.
pub(crate) fn kernel_weights(spec: &GridSpec, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = spec.n;
    if x.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: x.len(),
        });
    }
    if x[0] == 0.0 {
        return Err(Error::PointOnBoundary);
    }
    let total = spec.total();
    let cell = spec.cell_volume();
    let mut w = vec![vec![0.0; total]; n + 1];
    let mut d = vec![0.0; n];
    let mut idx = vec![0usize; n];
    let steps: Vec<f64> = (0..n).map(|a| spec.spacing(a)).collect();
    for p in 0..total {
        let mut r2 = x[0] * x[0];
        for a in 0..n {
            d[a] = spec.wrap(a, x[a + 1] - idx[a] as f64 * steps[a]);
            r2 += d[a] * d[a];
        }
        let scale = cell / r2.powf(0.5 * (n + 1) as f64);
        w[0][p] = x[0] * scale;
        for a in 0..n {
            w[a + 1][p] = d[a] * scale;
        }
        // Advance the row-major multi-index, last axis fastest.
        for a in (0..n).rev() {
            idx[a] += 1;
            if idx[a] < spec.shape[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(w)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Blades carried by each stored component of a Clifford-valued field.
fn component_blades(field: &SampledField) -> Result<Vec<BladeIndex>> {
    let n = field.spec().n;
    match field.kind() {
        FieldKind::Scalar => Ok(vec![BladeIndex::SCALAR]),
        FieldKind::Paravector => Ok((0..=n)
            .map(|k| if k == 0 { BladeIndex::SCALAR } else { BladeIndex::generator(k) })
            .collect()),
        FieldKind::Multivector => Ok((0..1u32 << n).map(BladeIndex).collect()),
        other => Err(Error::KindMismatch {
            expected: "scalar|paravector|multivector".into(),
            found: other.to_string(),
        }),
    }
}

/// Cauchy integral of boundary data `g` at `x = (x_0, x̲)`, `x_0 ≠ 0`:
///
/// `C± g(x) = ±(1/ω_n) ∫ (x_0 - Σ_k (x_k - y_k) e_k) / |x - y|^{n+1} g(y) dy`,
///
/// with `+` for `x_0 > 0` (normal `-e_0`) and `-` for `x_0 < 0` (normal `+e_0`).
pub fn cauchy_integral(g: &SampledField, x: &[f64]) -> Result<Multivector> {
    let spec = g.spec();
    let n = spec.n;
    let side = Side::of_height(*x.first().ok_or(Error::PointOnBoundary)?)?;
    let blades = component_blades(g)?;
    let w = kernel_weights(spec, x)?;
    let factor = side.sign() / omega_n(n);
    let mut coeffs = vec![0.0; 1 << n];
    for (c, &blade) in blades.iter().enumerate() {
        let values = g.component(c);
        if values.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (j, wj) in w.iter().enumerate() {
            let integral = dot(wj, values);
            let (left, a) = if j == 0 {
                (BladeIndex::SCALAR, integral)
            } else {
                (BladeIndex::generator(j), -integral)
            };
            let (sign, target) = blade_product_unchecked(left, blade);
            coeffs[target.0 as usize] += factor * sign * a;
        }
    }
    Multivector::from_coeffs(n, coeffs)
}

/// Sign convention for the Newton potential `𝒩 = ∓ (2/((n-1) ω_n)) ∫ g_0 / |x - y|^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonSign {
    /// `-` above the plane, `+` below.
    Stated,
    /// The opposite assignment.
    Reversed,
}

/// `∂_0 𝒩 - Σ_k ∂_k 𝒩 e_k` at `x` for the Newton potential of `g_0` on `side`.
pub fn newton_gradient(g0: &SampledField, x: &[f64], side: Side) -> Result<Multivector> {
    newton_gradient_with(g0, x, side, NewtonSign::Stated)
}

pub fn newton_gradient_with(g0: &SampledField, x: &[f64], side: Side, sign: NewtonSign) -> Result<Multivector> {
    expect_kind(g0.kind(), &[FieldKind::Scalar])?;
    let spec = g0.spec();
    let n = spec.n;
    if n < 2 {
        return Err(Error::Unsupported("Newton kernel needs n >= 2".into()));
    }
    let found = Side::of_height(*x.first().ok_or(Error::PointOnBoundary)?)?;
    if found != side {
        return Err(Error::SideMismatch {
            expected: side.to_string(),
            found: found.to_string(),
        });
    }
    let w = kernel_weights(spec, x)?;
    // ∂_0 |x-y|^{1-n} = (1-n) x_0 / r^{n+1}, ∂_k |x-y|^{1-n} = (1-n)(x_k - y_k)/r^{n+1}.
    let potential_sign = match sign {
        NewtonSign::Stated => -side.sign(),
        NewtonSign::Reversed => side.sign(),
    };
    let c = potential_sign * 2.0 / ((n - 1) as f64 * omega_n(n)) * (1.0 - n as f64);
    let values = g0.component(0);
    let mut parts = vec![c * dot(&w[0], values)];
    for wk in &w[1..] {
        parts.push(-c * dot(wk, values));
    }
    Multivector::paravector(n, &parts)
}

/// First-order systems whose residual is measured on a slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonogenicSystem {
    /// `∂_0 f_0 = Σ ∂_j f_j`, `∂_0 f_j = -∂_j f_0`, `∂_j f_k = ∂_k f_j` for a
    /// paravector `f_0 + Σ f_j e_j` (normal `x_0`). For `n = 3` this is also
    /// the Clifford system applied to the four components of a quaternion field.
    Paravector,
    /// `Σ_{j ≤ n+1} ∂_j f_j = 0`, `∂_j f_k = ∂_k f_j` for `(f_1, ..., f_{n+1})`
    /// (normal `x_{n+1}`).
    HarmonicGradient,
    /// `(∂_0 + e_1 ∂_1 + e_2 ∂_2 + e_3 ∂_3) f = 0` with quaternion products.
    Quaternionic,
}

fn l2_sum(spec: &GridSpec, arrays: &[Vec<f64>]) -> f64 {
    let sq: f64 = arrays.iter().flat_map(|a| a.iter()).map(|v| v * v).sum();
    (sq * spec.cell_volume()).sqrt()
}

fn system_equations(
    system: MonogenicSystem,
    kind: FieldKind,
    n: usize,
    normal: &[Vec<f64>],
    tangential: &dyn Fn(usize, usize) -> Vec<f64>,
) -> Result<Vec<Vec<f64>>> {
    let lin = |terms: &[(f64, &[f64])]| -> Vec<f64> {
        let len = terms[0].1.len();
        (0..len).map(|p| terms.iter().map(|(s, a)| s * a[p]).sum()).collect()
    };
    let mut eqs = Vec::new();
    match system {
        MonogenicSystem::Paravector => {
            expect_kind(kind, &[FieldKind::Paravector, FieldKind::Quaternion])?;
            let d: Vec<Vec<Vec<f64>>> = (0..=n).map(|c| (1..=n).map(|a| tangential(c, a)).collect()).collect();
            let mut first: Vec<(f64, &[f64])> = vec![(1.0, &normal[0])];
            for j in 1..=n {
                first.push((-1.0, &d[j][j - 1]));
            }
            eqs.push(lin(&first));
            for j in 1..=n {
                eqs.push(lin(&[(1.0, &normal[j]), (1.0, &d[0][j - 1])]));
            }
            for j in 1..=n {
                for k in j + 1..=n {
                    eqs.push(lin(&[(1.0, &d[k][j - 1]), (-1.0, &d[j][k - 1])]));
                }
            }
        }
        MonogenicSystem::HarmonicGradient => {
            expect_kind(kind, &[FieldKind::Vector])?;
            let d: Vec<Vec<Vec<f64>>> = (0..=n).map(|c| (1..=n).map(|a| tangential(c, a)).collect()).collect();
            let mut first: Vec<(f64, &[f64])> = vec![(1.0, &normal[n])];
            for j in 0..n {
                first.push((1.0, &d[j][j]));
            }
            eqs.push(lin(&first));
            for j in 0..n {
                for k in j + 1..n {
                    eqs.push(lin(&[(1.0, &d[k][j]), (-1.0, &d[j][k])]));
                }
                eqs.push(lin(&[(1.0, &d[n][j]), (-1.0, &normal[j])]));
            }
        }
        MonogenicSystem::Quaternionic => {
            expect_kind(kind, &[FieldKind::Quaternion])?;
            let d: Vec<Vec<Vec<f64>>> = (0..4).map(|c| (1..=3).map(|a| tangential(c, a)).collect()).collect();
            // d[c][a-1] = ∂_a f_c.
            eqs.push(lin(&[(1.0, &normal[0]), (-1.0, &d[1][0]), (-1.0, &d[2][1]), (-1.0, &d[3][2])]));
            eqs.push(lin(&[(1.0, &normal[1]), (1.0, &d[0][0]), (1.0, &d[3][1]), (-1.0, &d[2][2])]));
            eqs.push(lin(&[(1.0, &normal[2]), (1.0, &d[0][1]), (1.0, &d[1][2]), (-1.0, &d[3][0])]));
            eqs.push(lin(&[(1.0, &normal[3]), (1.0, &d[0][2]), (1.0, &d[2][0]), (-1.0, &d[1][1])]));
        }
    }
    Ok(eqs)
}

/// Largest residual of `system` over the interior heights of `slab`:
/// tangential derivatives spectral, normal derivative by centered differences.
pub fn monogenicity_residual(slab: &SlabSample, system: MonogenicSystem, plan: &MultiplierPlan) -> Result<f64> {
    let h = slab.uniform_step()?;
    let spec = &slab.boundary_spec;
    if plan.spec() != spec {
        return Err(Error::GridMismatch);
    }
    let kind = slab.values[0].kind();
    if system == MonogenicSystem::Quaternionic && spec.n != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: spec.n });
    }
    let scale = slab.side.sign() / (2.0 * h);
    (1..slab.heights.len() - 1)
        .into_par_iter()
        .map(|i| {
            let below = &slab.values[i - 1];
            let above = &slab.values[i + 1];
            let here = &slab.values[i];
            let normal: Vec<Vec<f64>> = (0..here.component_count())
                .map(|c| {
                    above
                        .component(c)
                        .iter()
                        .zip(below.component(c))
                        .map(|(a, b)| scale * (a - b))
                        .collect()
                })
                .collect();
            let tangential = |c: usize, axis: usize| plan.derivative(here.component(c), axis - 1);
            let eqs = system_equations(system, kind, spec.n, &normal, &tangential)?;
            Ok(l2_sum(spec, &eqs))
        })
        .collect::<Result<Vec<f64>>>()
        .map(|r| r.into_iter().fold(0.0, f64::max))
}

/// Residuals at step `h` and `h/2` around height `t0`, with the observed order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Convergence {
    pub residual_h: f64,
    pub residual_half: f64,
    pub ratio: f64,
    pub order: f64,
}

/// Extend `boundary` spectrally to `{t0 - h, t0, t0 + h}` and to the halved
/// stencil, and compare the two residuals of `system`.
pub fn monogenicity_convergence(
    boundary: &SampledField,
    system: MonogenicSystem,
    side: Side,
    t0: f64,
    h: f64,
    plan: &MultiplierPlan,
) -> Result<Convergence> {
    let coarse = poisson_extend(boundary, &[t0 - h, t0, t0 + h], plan, side)?;
    let fine = poisson_extend(boundary, &[t0 - h / 2.0, t0, t0 + h / 2.0], plan, side)?;
    let residual_h = monogenicity_residual(&coarse, system, plan)?;
    let residual_half = monogenicity_residual(&fine, system, plan)?;
    let ratio = residual_h / residual_half;
    Ok(Convergence {
        residual_h,
        residual_half,
        ratio,
        order: ratio.log2(),
    })
}

/// Largest `L²` norm over interior heights of the discrete Laplacian (spectral
/// tangential part plus centered second difference in the normal direction).
pub fn laplace_residual(slab: &SlabSample, plan: &MultiplierPlan) -> Result<f64> {
    let h = slab.uniform_step()?;
    let spec = &slab.boundary_spec;
    if plan.spec() != spec {
        return Err(Error::GridMismatch);
    }
    let abs_k = plan.abs_k();
    let mut worst: f64 = 0.0;
    for i in 1..slab.heights.len() - 1 {
        let comps: Vec<Vec<f64>> = (0..slab.values[i].component_count())
            .map(|c| {
                let here = slab.values[i].component(c);
                let lap = plan.apply(here, |p| Complex64::new(-abs_k[p] * abs_k[p], 0.0));
                let (a, b) = (slab.values[i + 1].component(c), slab.values[i - 1].component(c));
                (0..here.len())
                    .map(|p| lap[p] + (a[p] - 2.0 * here[p] + b[p]) / (h * h))
                    .collect()
            })
            .collect();
        worst = worst.max(l2_sum(spec, &comps));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormProfile {
    pub p: f64,
    pub heights: Vec<f64>,
    pub norms: Vec<f64>,
    /// Norms never increase with height (up to `1e-12` relative).
    pub non_increasing: bool,
}

impl NormProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("height,norm\n");
        for (h, v) in self.heights.iter().zip(&self.norms) {
            out.push_str(&format!("{h:e},{v:e}\n"));
        }
        out
    }
}

/// `L^p` norm of the slab at every height.
pub fn hardy_norm_profile(slab: &SlabSample, p: f64) -> NormProfile {
    let norms: Vec<f64> = slab.values.iter().map(|v| lp_norm(v, p)).collect();
    let non_increasing = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    NormProfile {
        p,
        heights: slab.heights.clone(),
        norms,
        non_increasing,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct SlabManifest<'a, T: Serialize> {
    boundary_spec: &'a GridSpec,
    side: Side,
    heights: &'a [f64],
    files: Vec<String>,
    summary: &'a T,
}

/// Write one HHF1 file per height plus `manifest.json` into `dir`.
pub fn write_slab<T: Serialize>(slab: &SlabSample, dir: impl AsRef<Path>, summary: &T) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::with_capacity(slab.values.len());
    for (i, v) in slab.values.iter().enumerate() {
        let name = format!("height_{i:03}.hhf");
        io::write_field(v, dir.join(&name))?;
        files.push(name);
    }
    io::write_json(
        dir.join("manifest.json"),
        &SlabManifest {
            boundary_spec: &slab.boundary_spec,
            side: slab.side,
            heights: &slab.heights,
            files,
            summary,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DcPolicy;
    use crate::synth::{synth_field, Recipe};

    fn gamma_half_integer(twice: usize) -> f64 {
        // Γ(twice/2) for twice >= 1.
        if twice % 2 == 0 {
            (1..twice / 2).map(|k| k as f64).product()
        } else {
            let mut g = PI.sqrt();
            let mut x = 0.5;
            while (2.0 * x) as usize != twice {
                g *= x;
                x += 1.0;
            }
            g
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((omega_n(1) - 2.0 * PI).abs() < 1e-14);
        assert!((omega_n(2) - 4.0 * PI).abs() < 1e-14);
        assert!((omega_n(3) - 2.0 * PI * PI).abs() < 1e-13);
        for n in 1..9 {
            let oracle = 2.0 * PI.powf((n + 1) as f64 / 2.0) / gamma_half_integer(n + 1);
            assert!((omega_n(n) - oracle).abs() < 1e-12 * oracle, "n = {n}");
        }
    }

    #[test]
    fn single_mode_decays() {
        let g = GridSpec::cube(2, 16).unwrap();
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = SampledField::from_fn(&g, FieldKind::Scalar, |x| vec![x[0].cos()]).unwrap();
        let slab = poisson_extend(&f, &[0.3, 1.0], &plan, Side::Upper).unwrap();
        for (t, v) in slab.heights.iter().zip(&slab.values) {
            assert!(v.sub(&f.scale((-t).exp())).unwrap().max_abs() < 1e-14);
        }
        let ev = PoissonEvaluator::new(&f, &plan).unwrap();
        let v = ev.at(&[0.7, 0.123, 2.5]).unwrap();
        assert!((v[0] - (-0.7f64).exp() * 0.123f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn height_validation() {
        let g = GridSpec::cube(1, 8).unwrap();
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = SampledField::zeros(&g, FieldKind::Scalar).unwrap();
        assert!(matches!(poisson_extend(&f, &[0.0, 1.0], &plan, Side::Upper), Err(Error::NonPositiveHeight(_))));
        assert!(matches!(poisson_extend(&f, &[1.0, 0.5], &plan, Side::Upper), Err(Error::UnsortedHeights)));
        let slab = poisson_extend(&f, &[0.1, 0.2], &plan, Side::Upper).unwrap();
        assert!(matches!(
            monogenicity_residual(&slab, MonogenicSystem::Paravector, &plan),
            Err(Error::TooFewHeights(2))
        ));
        let slab = poisson_extend(&f, &[0.1, 0.2, 0.4], &plan, Side::Upper).unwrap();
        assert!(matches!(slab.uniform_step(), Err(Error::NonUniformHeights)));
    }

    #[test]
    fn cauchy_of_zero_and_boundary_point() {
        let g = GridSpec::cube(2, 8).unwrap();
        let f = SampledField::zeros(&g, FieldKind::Paravector).unwrap();
        let v = cauchy_integral(&f, &[0.5, 1.0, 1.0]).unwrap();
        assert!(v.coeffs().iter().all(|&c| c == 0.0));
        assert!(matches!(cauchy_integral(&f, &[0.0, 1.0, 1.0]), Err(Error::PointOnBoundary)));
        let s = SampledField::zeros(&g, FieldKind::Scalar).unwrap();
        assert!(newton_gradient(&s, &[0.5, 1.0, 1.0], Side::Upper).unwrap().norm() == 0.0);
        assert!(matches!(
            newton_gradient(&s, &[0.5, 1.0, 1.0], Side::Lower),
            Err(Error::SideMismatch { .. })
        ));
        let g1 = GridSpec::cube(1, 8).unwrap();
        let s1 = SampledField::zeros(&g1, FieldKind::Scalar).unwrap();
        assert!(matches!(newton_gradient(&s1, &[0.5, 1.0], Side::Upper), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hardy_extension_is_monogenic_to_second_order() {
        let g = GridSpec::cube(2, 32).unwrap();
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let h = Box::new(Recipe::BandlimitedRandom { max_freq: 6 });
        let f = synth_field(&g, FieldKind::Paravector, &Recipe::HardyPlus { h: h.clone() }, 1).unwrap();
        let c = monogenicity_convergence(&f, MonogenicSystem::Paravector, Side::Upper, 0.5, 0.1, &plan).unwrap();
        assert!((c.ratio - 4.0).abs() < 0.8, "{c:?}");
        let lower = synth_field(&g, FieldKind::Paravector, &Recipe::HardyMinus { h: h.clone() }, 1).unwrap();
        let c = monogenicity_convergence(&lower, MonogenicSystem::Paravector, Side::Lower, 0.5, 0.1, &plan).unwrap();
        assert!((c.ratio - 4.0).abs() < 0.8, "{c:?}");
        let c = monogenicity_convergence(&lower, MonogenicSystem::Paravector, Side::Upper, 0.5, 0.1, &plan).unwrap();
        assert!((c.ratio - 1.0).abs() < 0.2, "{c:?}");
        let v = synth_field(&g, FieldKind::Vector, &Recipe::HardyPlus { h }, 1).unwrap();
        let c = monogenicity_convergence(&v, MonogenicSystem::HarmonicGradient, Side::Upper, 0.5, 0.1, &plan).unwrap();
        assert!((c.ratio - 4.0).abs() < 0.8, "{c:?}");
    }

    #[test]
    fn laplace_and_profile() {
        let g = GridSpec::cube(2, 32).unwrap();
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = synth_field(&g, FieldKind::Paravector, &Recipe::BandlimitedRandom { max_freq: 6 }, 3).unwrap();
        let coarse = poisson_extend(&f, &[0.4, 0.5, 0.6], &plan, Side::Upper).unwrap();
        let fine = poisson_extend(&f, &[0.45, 0.5, 0.55], &plan, Side::Upper).unwrap();
        let ratio = laplace_residual(&coarse, &plan).unwrap() / laplace_residual(&fine, &plan).unwrap();
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
        let profile = hardy_norm_profile(&coarse, 2.0);
        assert!(profile.non_increasing);
        let zero = poisson_extend(&SampledField::zeros(&g, FieldKind::Scalar).unwrap(), &[1.0, 2.0], &plan, Side::Upper).unwrap();
        assert!(hardy_norm_profile(&zero, 2.0).norms.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slab_files_round_trip() {
        let g = GridSpec::cube(2, 8).unwrap();
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let f = synth_field(&g, FieldKind::Scalar, &Recipe::BandlimitedRandom { max_freq: 3 }, 0).unwrap();
        let slab = poisson_extend(&f, &[0.5, 1.0], &plan, Side::Upper).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_slab(&slab, dir.path(), &serde_json::json!({"note": 1})).unwrap();
        let back = io::read_field(dir.path().join("height_001.hhf")).unwrap();
        assert_eq!(back, slab.values[1]);
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["heights"][0], 0.5);
    }
}
