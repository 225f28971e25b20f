//! Uniform periodic grids over `[0, L)^n` and the fields sampled on them.
//!
//! A field stores one real array per Clifford component; arrays are
//! row-major over the axes with the last axis fastest.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{BladeIndex, Multivector, Quaternion};
use crate::error::{Error, Result};
use crate::fft::{self, FftNd};

/// Discretization of the torus `[0, L_1) x ... x [0, L_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub shape: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl GridSpec {
    pub fn new(shape: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        let n = shape.len();
        if n == 0 {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        if lengths.len() != n {
            return Err(Error::InvalidGrid(format!(
                "{} axes but {} lengths",
                n,
                lengths.len()
            )));
        }
        if let Some(&bad) = shape.iter().find(|&&s| s < 4 || s % 2 != 0) {
            return Err(Error::InvalidGrid(format!(
                "samples per axis must be even and >= 4, got {bad}"
            )));
        }
        if let Some(&bad) = lengths.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidGrid(format!("axis length must be positive, got {bad}")));
        }
        shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or(Error::ShapeOverflow)?;
        Ok(Self { n, shape, lengths })
    }

    /// `points` samples on every axis of a `2π`-periodic cube.
    pub fn cube(n: usize, points: usize) -> Result<Self> {
        Self::new(vec![points; n], vec![2.0 * PI; n])
    }

    pub fn total(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.n).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for a in (0..self.n).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    /// Physical coordinates of a lattice point.
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| i as f64 * self.spacing(a))
            .collect()
    }

    /// Signed integer frequency of DFT index `m` on `axis`; the Nyquist index
    /// maps to `-N/2`.
    pub fn signed_index(&self, axis: usize, m: usize) -> i64 {
        let len = self.shape[axis] as i64;
        let m = m as i64;
        if m < len / 2 {
            m
        } else {
            m - len
        }
    }

    /// Angular frequency `κ_axis` of DFT index `m`.
    pub fn wavenumber(&self, axis: usize, m: usize) -> f64 {
        2.0 * PI / self.lengths[axis] * self.signed_index(axis, m) as f64
    }

    pub fn is_nyquist(&self, axis: usize, m: usize) -> bool {
        m == self.shape[axis] / 2
    }

    /// Displacement `a - b` on `axis`, wrapped into `[-L/2, L/2)`.
    pub fn wrap(&self, axis: usize, d: f64) -> f64 {
        let l = self.lengths[axis];
        d - l * ((d + 0.5 * l) / l).floor()
    }
}

/// What each component of a [`SampledField`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// One real component.
    Scalar,
    /// `f_0 + f_1 e_1 + ... + f_n e_n` in `Cl(n)`.
    Paravector,
    /// `f_1 e_1 + ... + f_{n+1} e_{n+1}` in `Cl(n+1)`.
    Vector,
    /// `f_0 + f_1 e_1 + f_2 e_2 + f_3 e_3` with `e_3 = e_1 e_2`, on `n = 3`.
    Quaternion,
    /// General element of `Cl(n)`, one component per blade mask.
    Multivector,
}

impl FieldKind {
    pub fn component_count(self, n: usize) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Paravector | FieldKind::Vector => n + 1,
            FieldKind::Quaternion => 4,
            FieldKind::Multivector => 1 << n,
        }
    }

    /// Code used by the HHF1 file header.
    pub fn code(self) -> Option<u32> {
        match self {
            FieldKind::Scalar => Some(0),
            FieldKind::Paravector => Some(1),
            FieldKind::Vector => Some(2),
            FieldKind::Quaternion => Some(3),
            FieldKind::Multivector => None,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(FieldKind::Scalar),
            1 => Some(FieldKind::Paravector),
            2 => Some(FieldKind::Vector),
            3 => Some(FieldKind::Quaternion),
            _ => None,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Paravector => "paravector",
            FieldKind::Vector => "vector",
            FieldKind::Quaternion => "quaternion",
            FieldKind::Multivector => "multivector",
        };
        f.write_str(name)
    }
}

pub(crate) fn expect_kind(found: FieldKind, expected: &[FieldKind]) -> Result<()> {
    if expected.contains(&found) {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            expected: expected
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join("|"),
            found: found.to_string(),
        })
    }
}

/// Clifford-component-valued samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    spec: GridSpec,
    kind: FieldKind,
    components: Vec<Vec<f64>>,
}

impl SampledField {
    pub fn new(spec: GridSpec, kind: FieldKind, components: Vec<Vec<f64>>) -> Result<Self> {
        if kind == FieldKind::Quaternion && spec.n != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: spec.n,
            });
        }
        let count = kind.component_count(spec.n);
        if components.len() != count {
            return Err(Error::DimensionMismatch {
                expected: count,
                found: components.len(),
            });
        }
        let total = spec.total();
        if let Some(bad) = components.iter().find(|c| c.len() != total) {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: bad.len(),
            });
        }
        Ok(Self {
            spec,
            kind,
            components,
        })
    }

    pub fn zeros(spec: &GridSpec, kind: FieldKind) -> Result<Self> {
        let count = kind.component_count(spec.n);
        Self::new(spec.clone(), kind, vec![vec![0.0; spec.total()]; count])
    }

    /// Build a field by evaluating `f(coords) -> components` at every point.
    pub fn from_fn(
        spec: &GridSpec,
        kind: FieldKind,
        f: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Self> {
        let mut out = Self::zeros(spec, kind)?;
        let count = out.components.len();
        for p in 0..spec.total() {
            let values = f(&spec.coords(p));
            if values.len() != count {
                return Err(Error::DimensionMismatch {
                    expected: count,
                    found: values.len(),
                });
            }
            for (c, v) in values.into_iter().enumerate() {
                out.components[c][p] = v;
            }
        }
        Ok(out)
    }

    pub fn scalar(spec: &GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(spec.clone(), FieldKind::Scalar, vec![values])
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut Vec<f64> {
        &mut self.components[c]
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Component values at one lattice point.
    pub fn at(&self, p: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[p]).collect()
    }

    /// Reinterpret the same arrays under another kind with equal component count.
    pub fn with_kind(self, kind: FieldKind) -> Result<Self> {
        Self::new(self.spec, kind, self.components)
    }

    pub fn check_compatible(&self, other: &SampledField) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind.to_string(),
                found: other.kind.to_string(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &SampledField, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect())
            .collect();
        Ok(Self {
            spec: self.spec.clone(),
            kind: self.kind,
            components,
        })
    }

    pub fn add(&self, other: &SampledField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            spec: self.spec.clone(),
            kind: self.kind,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SampledField, b: f64) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn means(&self) -> Vec<f64> {
        let total = self.spec.total() as f64;
        self.components
            .iter()
            .map(|c| c.iter().sum::<f64>() / total)
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Clifford-valued sample at one point (paravector or multivector kinds).
    pub fn multivector_at(&self, p: usize) -> Result<Multivector> {
        let n = self.spec.n;
        match self.kind {
            FieldKind::Scalar => Multivector::scalar(n, self.components[0][p]),
            FieldKind::Paravector => Multivector::paravector(n, &self.at(p)),
            FieldKind::Multivector => Multivector::from_coeffs(n, self.at(p)),
            FieldKind::Vector => {
                let mut m = Multivector::zero(n + 1)?;
                for (k, c) in self.components.iter().enumerate() {
                    m.set(BladeIndex::generator(k + 1), c[p]);
                }
                Ok(m)
            }
            FieldKind::Quaternion => Err(Error::KindMismatch {
                expected: "clifford kind".into(),
                found: "quaternion".into(),
            }),
        }
    }

    pub fn quaternion_at(&self, p: usize) -> Result<Quaternion> {
        expect_kind(self.kind, &[FieldKind::Quaternion])?;
        Ok(Quaternion::new(
            self.components[0][p],
            self.components[1][p],
            self.components[2][p],
            self.components[3][p],
        ))
    }

    /// Embed a scalar or paravector field as a full multivector field.
    pub fn to_multivector(&self) -> Result<Self> {
        let n = self.spec.n;
        let mut out = Self::zeros(&self.spec, FieldKind::Multivector)?;
        match self.kind {
            FieldKind::Multivector => return Ok(self.clone()),
            FieldKind::Scalar => out.components[0] = self.components[0].clone(),
            FieldKind::Paravector => {
                out.components[0] = self.components[0].clone();
                for k in 1..=n {
                    out.components[1 << (k - 1)] = self.components[k].clone();
                }
            }
            other => {
                return Err(Error::KindMismatch {
                    expected: "scalar|paravector|multivector".into(),
                    found: other.to_string(),
                })
            }
        }
        Ok(out)
    }

    /// Paravector part of a multivector field, and the largest dropped
    /// coefficient of grade two or more.
    pub fn paravector_part(&self) -> Result<(Self, f64)> {
        expect_kind(self.kind, &[FieldKind::Multivector, FieldKind::Paravector])?;
        if self.kind == FieldKind::Paravector {
            return Ok((self.clone(), 0.0));
        }
        let n = self.spec.n;
        let mut comps = Vec::with_capacity(n + 1);
        comps.push(self.components[0].clone());
        for k in 1..=n {
            comps.push(self.components[1 << (k - 1)].clone());
        }
        let dropped = self
            .components
            .iter()
            .enumerate()
            .filter(|(s, _)| s.count_ones() >= 2)
            .flat_map(|(_, c)| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        Ok((Self::new(self.spec.clone(), FieldKind::Paravector, comps)?, dropped))
    }

    /// Scalar component as its own field.
    pub fn scalar_part(&self) -> Result<Self> {
        expect_kind(
            self.kind,
            &[
                FieldKind::Scalar,
                FieldKind::Paravector,
                FieldKind::Multivector,
                FieldKind::Quaternion,
            ],
        )?;
        Self::scalar(&self.spec, self.components[0].clone())
    }
}

/// `(Σ_x |f(x)|^p · cellVolume)^{1/p}` with `|·|` the Euclidean norm across
/// components at each lattice point.
pub fn lp_norm(field: &SampledField, p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm needs p >= 1");
    let spec = field.spec();
    let mut acc = 0.0;
    for i in 0..spec.total() {
        let sq: f64 = field.components().iter().map(|c| c[i] * c[i]).sum();
        acc += if p == 2.0 { sq } else { sq.sqrt().powf(p) };
    }
    (acc * spec.cell_volume()).powf(1.0 / p)
}

/// Discrete `L²` inner product `Σ_x Σ_c f_c g_c · cellVolume`.
pub fn l2_inner(a: &SampledField, b: &SampledField) -> Result<f64> {
    if a.spec() != b.spec() || a.component_count() != b.component_count() {
        return Err(Error::GridMismatch);
    }
    let dot: f64 = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>())
        .sum();
    Ok(dot * a.spec().cell_volume())
}

/// Fourier coefficients of a [`SampledField`], same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub spec: GridSpec,
    pub kind: FieldKind,
    pub components: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn forward(field: &SampledField) -> Self {
        Self::forward_with(field, &FftNd::new(&field.spec().shape))
    }

    pub fn forward_with(field: &SampledField, plan: &FftNd) -> Self {
        Self {
            spec: field.spec().clone(),
            kind: field.kind(),
            components: field
                .components()
                .iter()
                .map(|c| fft::forward_real(plan, c))
                .collect(),
        }
    }

    /// Inverse transform; imaginary residue is discarded.
    pub fn inverse(&self) -> Result<SampledField> {
        self.inverse_with(&FftNd::new(&self.spec.shape))
    }

    pub fn inverse_with(&self, plan: &FftNd) -> Result<SampledField> {
        let components = self
            .components
            .iter()
            .map(|c| fft::inverse_real(plan, c.clone()).0)
            .collect();
        SampledField::new(self.spec.clone(), self.kind, components)
    }

    /// `(cellVolume / N) Σ_κ Σ_c |f̂_c(κ)|²`, equal to `lp_norm(f, 2)²`.
    pub fn parseval_energy(&self) -> f64 {
        let sum: f64 = self
            .components
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum();
        sum * self.spec.cell_volume() / self.spec.total() as f64
    }
}
