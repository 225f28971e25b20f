//! Multidimensional complex FFT over row-major arrays (last axis fastest).
//!
//! Forward transforms are unnormalized; the inverse divides by the total
//! number of lattice points.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct FftNd {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl fmt::Debug for FftNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = shape.iter().map(|&len| planner.plan_fft_forward(len)).collect();
        let inverse = shape.iter().map(|&len| planner.plan_fft_inverse(len)).collect();
        Self {
            shape: shape.to_vec(),
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len(), "FFT buffer length does not match grid");
        let total = self.len();
        for (axis, plan) in plans.iter().enumerate() {
            let len = self.shape[axis];
            let stride: usize = self.shape[axis + 1..].iter().product();
            if stride == 1 {
                plan.process(data);
                continue;
            }
            let block = len * stride;
            let mut line = vec![Complex64::new(0.0, 0.0); len];
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Forward transform of a real array.
pub fn forward_real(fft: &FftNd, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut buf);
    buf
}

/// Inverse transform, returning the real part and the largest imaginary
/// magnitude that was discarded.
pub fn inverse_real(fft: &FftNd, mut spectrum: Vec<Complex64>) -> (Vec<f64>, f64) {
    fft.inverse(&mut spectrum);
    let mut max_imag = 0.0f64;
    let out = spectrum
        .into_iter()
        .map(|c| {
            max_imag = max_imag.max(c.im.abs());
            c.re
        })
        .collect();
    (out, max_imag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(shape: &[usize], data: &[Complex64]) -> Vec<Complex64> {
        let total: usize = shape.iter().product();
        let unravel = |mut flat: usize| {
            let mut idx = vec![0; shape.len()];
            for a in (0..shape.len()).rev() {
                idx[a] = flat % shape[a];
                flat /= shape[a];
            }
            idx
        };
        (0..total)
            .map(|m| {
                let mi = unravel(m);
                (0..total)
                    .map(|j| {
                        let ji = unravel(j);
                        let phase: f64 = (0..shape.len())
                            .map(|a| (mi[a] * ji[a]) as f64 / shape[a] as f64)
                            .sum();
                        data[j] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_3d() {
        let shape = [4, 6, 4];
        let data: Vec<Complex64> = (0..96)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        let fft = FftNd::new(&shape);
        fft.forward(&mut fast);
        let slow = naive_dft(&shape, &data);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-11);
        }
        fft.inverse(&mut fast);
        for (a, b) in fast.iter().zip(&data) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
