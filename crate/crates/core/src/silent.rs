//! Potentials of hyperplane-supported densities in divergence form,
//!
//! `P(x) = ((n-1)/ω_n) ∫ ψ(y)·(x - y) / |x - y|^{n+1} dy`,
//!
//! where the plane is `{x_0 = 0}` and the density `ψ = ψ_0 e_0 + Σ ψ_k e_k`
//! is stored as a paravector field (`ψ_0` is the normal component). The
//! potential of `ψ⁻ + ψ⁰` vanishes above the plane, that of `ψ⁺ + ψ⁰` below.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{kernel_weights, omega_n, Side};
use crate::grid::{expect_kind, FieldKind, GridSpec, SampledField};
use crate::hodge::{decompose_paravector, DecomposeOptions};
use crate::spectral::MultiplierPlan;

/// Probe points `(x_0, x_1, ..., x_n)` and the potential computed there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProbe {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl PotentialProbe {
    pub fn side(&self, i: usize) -> Side {
        if self.points[i][0] > 0.0 {
            Side::Upper
        } else {
            Side::Lower
        }
    }
}

/// Tangential grid of `per_axis` points per axis, spaced `width` apart and
/// centered on `center`, at heights `factor * width` on both sides (upper
/// side first).
pub fn probe_grid(spec: &GridSpec, center: &[f64], width: f64, per_axis: usize, height_factors: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = spec.n;
    if center.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: center.len(),
        });
    }
    let offsets: Vec<f64> = (0..per_axis)
        .map(|i| (i as f64 - (per_axis as f64 - 1.0) / 2.0) * width)
        .collect();
    let count = per_axis.pow(n as u32);
    let mut tangential = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rest = flat;
        let mut x = vec![0.0; n];
        for a in (0..n).rev() {
            x[a] = center[a] + offsets[rest % per_axis];
            rest /= per_axis;
        }
        tangential.push(x);
    }
    let mut points = Vec::new();
    for side in [Side::Upper, Side::Lower] {
        for &f in height_factors {
            for t in &tangential {
                let mut p = vec![side.sign() * f * width];
                p.extend_from_slice(t);
                points.push(p);
            }
        }
    }
    check_probes(spec, &points)?;
    Ok(points)
}

fn check_probes(spec: &GridSpec, points: &[Vec<f64>]) -> Result<()> {
    let cell = (0..spec.n).map(|a| spec.spacing(a)).fold(0.0, f64::max);
    for p in points {
        if p.len() != spec.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: spec.n + 1,
                found: p.len(),
            });
        }
        if p[0] == 0.0 {
            return Err(Error::PointOnBoundary);
        }
        if p[0].abs() < cell {
            return Err(Error::ProbeTooClose { height: p[0], cell });
        }
    }
    Ok(())
}

/// Potentials of several densities at the same probes; `out[i][j]` belongs to
/// density `i` and probe `j`. Kernel weights are computed once per probe.
pub fn potential_many(densities: &[&SampledField], points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let first = densities
        .first()
        .ok_or_else(|| Error::Unsupported("no densities given".into()))?;
    let spec = first.spec();
    let n = spec.n;
    if n < 2 {
        return Err(Error::Unsupported("divergence-form potentials need n >= 2".into()));
    }
    for d in densities {
        expect_kind(d.kind(), &[FieldKind::Paravector])?;
        if d.spec() != spec {
            return Err(Error::GridMismatch);
        }
    }
    check_probes(spec, points)?;
    let factor = (n - 1) as f64 / omega_n(n);
    let per_point: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| {
            let w = kernel_weights(spec, x)?;
            Ok(densities
                .iter()
                .map(|d| {
                    factor
                        * w.iter()
                            .zip(d.components())
                            .map(|(wc, dc)| wc.iter().zip(dc).map(|(a, b)| a * b).sum::<f64>())
                            .sum::<f64>()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..densities.len())
        .map(|i| per_point.iter().map(|v| v[i]).collect())
        .collect())
}

/// Potential of one density at the probe points.
pub fn potential_div_form(psi: &SampledField, points: &[Vec<f64>]) -> Result<PotentialProbe> {
    let values = potential_many(&[psi], points)?.remove(0);
    Ok(PotentialProbe {
        points: points.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SideNorms {
    pub upper: f64,
    pub lower: f64,
}

/// Root-sum-square of the potential of each part over the probes of a side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartNorms {
    pub plus: SideNorms,
    pub minus: SideNorms,
    pub zero: SideNorms,
    pub total: SideNorms,
}

/// Silent part against its matched non-silent control on one side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SideRatios {
    /// `ψ⁻ + ψ⁰` above (control `ψ⁺`), `ψ⁺ + ψ⁰` below (control `ψ⁻`).
    pub silent_pair: f64,
    /// `ψ⁰` alone, same control.
    pub zero: f64,
    /// `P(ψ) - P(control)`, same control.
    pub total_minus_control: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub upper: SideRatios,
    pub lower: SideRatios,
}

impl Ratios {
    pub fn max(&self) -> f64 {
        [self.upper, self.lower]
            .iter()
            .flat_map(|r| [r.silent_pair, r.zero, r.total_minus_control])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub x: Vec<f64>,
    pub side: Side,
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SilenceReport {
    pub parts: PartNorms,
    /// Which part is silent on which side.
    pub side: SilentSides,
    pub ratios: Ratios,
    pub probes: Vec<ProbeRow>,
    pub bump_params: serde_json::Value,
    pub grid_spec: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilentSides {
    pub upper: String,
    pub lower: String,
}

impl SilenceReport {
    /// One row per probe.
    pub fn to_csv(&self) -> String {
        let n = self.grid_spec.n;
        let mut out = String::from("side,x0");
        for k in 1..=n {
            out.push_str(&format!(",x{k}"));
        }
        out.push_str(",plus,minus,zero,total\n");
        for r in &self.probes {
            out.push_str(&r.side.to_string());
            for v in &r.x {
                out.push_str(&format!(",{v:e}"));
            }
            out.push_str(&format!(",{:e},{:e},{:e},{:e}\n", r.plus, r.minus, r.zero, r.total));
        }
        out
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.ratios.max() <= tol
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Decompose `psi`, evaluate the potential of every part on both sides, and
/// compare each silent combination with its non-silent control.
pub fn silent_experiment(
    psi: &SampledField,
    points: &[Vec<f64>],
    opts: DecomposeOptions,
    plan: &MultiplierPlan,
    bump_params: serde_json::Value,
) -> Result<SilenceReport> {
    let split = decompose_paravector(psi, opts, plan)?;
    let total = split.f_plus.add(&split.f_minus)?.add(&split.f_zero)?;
    let vals = potential_many(&[&split.f_plus, &split.f_minus, &split.f_zero, &total], points)?;
    let sides: Vec<Side> = points.iter().map(|p| if p[0] > 0.0 { Side::Upper } else { Side::Lower }).collect();
    let rss = |f: &dyn Fn(usize) -> f64, side: Side| -> f64 {
        (0..points.len())
            .filter(|&j| sides[j] == side)
            .map(|j| f(j).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (plus, minus, zero, tot) = (&vals[0], &vals[1], &vals[2], &vals[3]);
    let side_norms = |v: &Vec<f64>| SideNorms {
        upper: rss(&|j| v[j], Side::Upper),
        lower: rss(&|j| v[j], Side::Lower),
    };
    let parts = PartNorms {
        plus: side_norms(plus),
        minus: side_norms(minus),
        zero: side_norms(zero),
        total: side_norms(tot),
    };
    let side_ratios = |side: Side, control: &Vec<f64>, other: &Vec<f64>| {
        let c = rss(&|j| control[j], side);
        SideRatios {
            silent_pair: ratio(rss(&|j| other[j] + zero[j], side), c),
            zero: ratio(rss(&|j| zero[j], side), c),
            total_minus_control: ratio(rss(&|j| tot[j] - control[j], side), c),
        }
    };
    let ratios = Ratios {
        upper: side_ratios(Side::Upper, plus, minus),
        lower: side_ratios(Side::Lower, minus, plus),
    };
    let probes = (0..points.len())
        .map(|j| ProbeRow {
            x: points[j].clone(),
            side: sides[j],
            plus: plus[j],
            minus: minus[j],
            zero: zero[j],
            total: tot[j],
        })
        .collect();
    Ok(SilenceReport {
        parts,
        side: SilentSides {
            upper: "minus+zero".into(),
            lower: "plus+zero".into(),
        },
        ratios,
        probes,
        bump_params,
        grid_spec: psi.spec().clone(),
    })
}

/// Orientation-preserving isometry taking the plane `{x · u = a}` in
/// `R^{n+1}` to `{x_0 = 0}`: local coordinates are the signed height
/// `x · u - a` followed by coordinates along an orthonormal basis of `u^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFrame {
    normal: Vec<f64>,
    offset: f64,
    /// Rows `t_1..t_n`, orthonormal and orthogonal to `normal`.
    tangents: Vec<Vec<f64>>,
}

impl PlaneFrame {
    pub fn new(normal: &[f64], offset: f64) -> Result<Self> {
        let dim = normal.len();
        if dim < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: dim });
        }
        let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::InvalidRecipe("plane normal must be a nonzero vector".into()));
        }
        let u: Vec<f64> = normal.iter().map(|v| v / len).collect();
        // Householder reflection Q = I - 2 v vᵀ / vᵀv with v = u - e_0 maps e_0
        // to u; its columns 1..n span u^⊥. Q has determinant -1, so the last
        // tangent is negated.
        let mut v = u.clone();
        v[0] -= 1.0;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let tangents = (1..dim)
            .map(|j| {
                let mut col: Vec<f64> = (0..dim).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
                if vv > 1e-30 {
                    for (i, c) in col.iter_mut().enumerate() {
                        *c -= 2.0 * v[i] * v[j] / vv;
                    }
                    if j == dim - 1 {
                        col.iter_mut().for_each(|c| *c = -*c);
                    }
                }
                col
            })
            .collect();
        Ok(Self {
            normal: u,
            offset: offset / len,
            tangents,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn tangents(&self) -> &[Vec<f64>] {
        &self.tangents
    }

    /// World point to `(height, t_1, ..., t_n)`.
    pub fn to_local(&self, x: &[f64]) -> Vec<f64> {
        let dotp = |a: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
        let mut out = vec![dotp(&self.normal) - self.offset];
        out.extend(self.tangents.iter().map(|t| dotp(t)));
        out
    }

    pub fn to_world(&self, local: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.normal.iter().map(|u| u * (local[0] + self.offset)).collect();
        for (t, &c) in self.tangents.iter().zip(&local[1..]) {
            for (o, ti) in out.iter_mut().zip(t) {
                *o += c * ti;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DcPolicy;
    use crate::synth::{synth_field, Recipe};
    use std::f64::consts::PI;

    fn det(mut m: Vec<Vec<f64>>) -> f64 {
        let n = m.len();
        let mut d = 1.0;
        for c in 0..n {
            let pivot = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
            if pivot != c {
                m.swap(pivot, c);
                d = -d;
            }
            d *= m[c][c];
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        d
    }

    #[test]
    fn plane_frame_is_orientation_preserving_isometry() {
        for u in [vec![1.0, 0.0, 0.0], vec![0.3, -1.2, 0.5], vec![0.0, 0.0, 2.0], vec![-1.0, 0.0, 0.0]] {
            let frame = PlaneFrame::new(&u, 0.7).unwrap();
            let mut rows = vec![frame.normal().to_vec()];
            rows.extend(frame.tangents().iter().cloned());
            for i in 0..3 {
                for j in 0..3 {
                    let d: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                    assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
            assert!((det(rows) - 1.0).abs() < 1e-13, "{u:?}");
            let x = [0.4, 1.5, -2.0];
            let back = frame.to_world(&frame.to_local(&x));
            assert!(back.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-14));
            let on_plane = frame.to_world(&[0.0, 0.3, -0.2]);
            let h: f64 = on_plane.iter().zip(frame.normal()).map(|(a, b)| a * b).sum();
            assert!((h - 0.7 / u.iter().map(|v| v * v).sum::<f64>().sqrt()).abs() < 1e-14);
        }
        let id = PlaneFrame::new(&[1.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(id.to_local(&[0.5, 1.0, 2.0]), vec![0.5, 1.0, 2.0]);
    }

    #[test]
    fn zero_density_and_probe_checks() {
        let g = GridSpec::cube(2, 16).unwrap();
        let psi = SampledField::zeros(&g, FieldKind::Paravector).unwrap();
        let pts = probe_grid(&g, &[PI, PI], 0.5, 3, &[1.0, 2.0]).unwrap();
        assert_eq!(pts.len(), 9 * 2 * 2);
        let p = potential_div_form(&psi, &pts).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
        assert_eq!(p.side(0), Side::Upper);
        assert_eq!(p.side(pts.len() - 1), Side::Lower);
        assert!(matches!(
            potential_div_form(&psi, &[vec![0.1, 1.0, 1.0]]),
            Err(Error::ProbeTooClose { .. })
        ));
        let g1 = GridSpec::cube(1, 16).unwrap();
        let psi1 = SampledField::zeros(&g1, FieldKind::Paravector).unwrap();
        assert!(potential_div_form(&psi1, &[vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn silent_parts_are_small() {
        let l = 2.0 * PI;
        let g = GridSpec::new(vec![64, 64], vec![l, l]).unwrap();
        let plan = MultiplierPlan::new(&g, DcPolicy::Zero);
        let w = l / 16.0;
        let c = vec![l / 2.0; 2];
        let psi = synth_field(&g, FieldKind::Paravector, &Recipe::LocalizedRandom { center: c.clone(), width: w }, 4).unwrap();
        let pts = probe_grid(&g, &c, w, 5, &[0.5, 1.0, 2.0]).unwrap();
        let report = silent_experiment(&psi, &pts, DecomposeOptions::default(), &plan, serde_json::json!({})).unwrap();
        assert!(report.ratios.max() < 1e-2, "{:?}", report.ratios);
        assert!(report.to_csv().lines().count() == pts.len() + 1);
    }
}
