//! Real Clifford algebra `Cl(n)` with generators `e_1..e_n`, `e_j^2 = -1`, and
//! the quaternion algebra.
//!
//! Basis blades are indexed by bitmask: bit `j-1` set means `e_j` is a factor,
//! factors are always kept in increasing index order. A [`Multivector`] stores
//! one coefficient per blade, indexed by mask.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported algebra dimension.
pub const MAX_DIM: usize = 10;

/// Canonical basis blade `e_S` as a bitmask over `{1..n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BladeIndex(pub u32);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Blade of the single generator `e_j`, `j >= 1`.
    pub fn generator(j: usize) -> Self {
        assert!(j >= 1, "generators are numbered from 1");
        BladeIndex(1 << (j - 1))
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Whether this blade exists in `Cl(n)`.
    pub fn fits(self, n: usize) -> bool {
        (self.0 as u64) < (1u64 << n)
    }

    /// Generator indices (1-based), increasing.
    pub fn factors(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(())
}

/// Sign and canonical blade of `e_a e_b` with `e_j^2 = -1`.
///
/// The sign collects one factor of `-1` per transposition needed to bring the
/// concatenated factor list into increasing order, and one per repeated
/// generator.
pub fn blade_product(a: BladeIndex, b: BladeIndex, n: usize) -> Result<(f64, BladeIndex)> {
    check_dim(n)?;
    for blade in [a, b] {
        if !blade.fits(n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: 32 - blade.0.leading_zeros() as usize,
            });
        }
    }
    Ok(blade_product_unchecked(a, b))
}

#[inline]
pub(crate) fn blade_product_unchecked(a: BladeIndex, b: BladeIndex) -> (f64, BladeIndex) {
    let mut swaps = 0u32;
    let mut shifted = a.0 >> 1;
    while shifted != 0 {
        swaps += (shifted & b.0).count_ones();
        shifted >>= 1;
    }
    swaps += (a.0 & b.0).count_ones();
    let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
    (sign, BladeIndex(a.0 ^ b.0))
}

/// Element of `Cl(n)`: `2^n` coefficients indexed by blade mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    n: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            coeffs: vec![0.0; 1 << n],
        })
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: coeffs.len(),
            });
        }
        Ok(Self { n, coeffs })
    }

    pub fn scalar(n: usize, value: f64) -> Result<Self> {
        let mut m = Self::zero(n)?;
        m.coeffs[0] = value;
        Ok(m)
    }

    /// `value * e_S`.
    pub fn blade(n: usize, blade: BladeIndex, value: f64) -> Result<Self> {
        let mut m = Self::zero(n)?;
        if !blade.fits(n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: 32 - blade.0.leading_zeros() as usize,
            });
        }
        m.coeffs[blade.0 as usize] = value;
        Ok(m)
    }

    /// Generator `e_j`.
    pub fn e(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::DimensionMismatch { expected: n, found: j });
        }
        Self::blade(n, BladeIndex::generator(j), 1.0)
    }

    /// Paravector `x_0 + x_1 e_1 + ... + x_n e_n` from `n + 1` coefficients.
    pub fn paravector(n: usize, parts: &[f64]) -> Result<Self> {
        if parts.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: parts.len(),
            });
        }
        let mut m = Self::zero(n)?;
        m.coeffs[0] = parts[0];
        for (j, &v) in parts[1..].iter().enumerate() {
            m.coeffs[1 << j] = v;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: BladeIndex) -> f64 {
        self.coeffs.get(blade.0 as usize).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, blade: BladeIndex, value: f64) {
        self.coeffs[blade.0 as usize] = value;
    }

    /// Coefficients `(x_0, x_1, ..., x_n)` of the paravector part.
    pub fn paravector_parts(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n + 1);
        out.push(self.coeffs[0]);
        out.extend((0..self.n).map(|j| self.coeffs[1 << j]));
        out
    }

    /// Clifford product, bilinear over [`blade_product`].
    pub fn mul(&self, other: &Multivector) -> Result<Multivector> {
        self.same_dim(other)?;
        let mut out = vec![0.0; self.coeffs.len()];
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in other.coeffs.iter().enumerate() {
                if y == 0.0 {
                    continue;
                }
                let (sign, c) = blade_product_unchecked(BladeIndex(a as u32), BladeIndex(b as u32));
                out[c.0 as usize] += sign * x * y;
            }
        }
        Ok(Multivector {
            n: self.n,
            coeffs: out,
        })
    }

    /// Conjugation `x_S -> (-1)^{|S|} x_S`.
    pub fn conjugate(&self) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, &x)| if s.count_ones() % 2 == 0 { x } else { -x })
            .collect();
        Multivector { n: self.n, coeffs }
    }

    pub fn sc_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn nsc_part(&self) -> Multivector {
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        out
    }

    /// Grade-`k` projection.
    pub fn grade(&self, k: usize) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, &x)| if s.count_ones() as usize == k { x } else { 0.0 })
            .collect();
        Multivector { n: self.n, coeffs }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Euclidean inner product of coefficient vectors.
    pub fn inner(&self, other: &Multivector) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x * y)
            .sum())
    }

    pub fn scale(&self, factor: f64) -> Multivector {
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn is_paravector(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(s, x)| s.count_ones() <= 1 || x.abs() <= tol)
    }

    fn same_dim(&self, other: &Multivector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

/// Free-function form of [`Multivector::mul`].
pub fn mv_mul(x: &Multivector, y: &Multivector) -> Result<Multivector> {
    x.mul(y)
}

impl Add for &Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "multivector dimension mismatch");
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.n, rhs.n, "multivector dimension mismatch");
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Real quaternion `w + x e_1 + y e_2 + z e_3` with `e_3 = e_1 e_2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Basis element `e_k` for `k` in `0..4` (`e_0 = 1`).
    pub fn basis(k: usize) -> Self {
        match k {
            0 => Self::ONE,
            1 => Self::E1,
            2 => Self::E2,
            3 => Self::E3,
            _ => panic!("quaternion basis index {k} out of range"),
        }
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, r: Quaternion) -> Quaternion {
        let l = self;
        Quaternion::new(
            l.w * r.w - l.x * r.x - l.y * r.y - l.z * r.z,
            l.w * r.x + l.x * r.w + l.y * r.z - l.z * r.y,
            l.w * r.y - l.x * r.z + l.y * r.w + l.z * r.x,
            l.w * r.z + l.x * r.y - l.y * r.x + l.z * r.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Slow reference: multiply explicit factor lists, bubble-sorting and
    /// cancelling adjacent equal generators.
    fn reference_product(a: BladeIndex, b: BladeIndex) -> (f64, BladeIndex) {
        let mut factors = a.factors();
        factors.extend(b.factors());
        let mut sign = 1.0;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < factors.len() {
                if factors[i] == factors[i + 1] {
                    factors.drain(i..i + 2);
                    sign = -sign;
                    changed = true;
                } else if factors[i] > factors[i + 1] {
                    factors.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                    i += 1;
                } else {
                    i += 1;
                }
            }
            if !changed {
                break;
            }
        }
        let mask = factors.iter().fold(0u32, |m, j| m | (1 << (j - 1)));
        (sign, BladeIndex(mask))
    }

    #[test]
    fn blade_examples() {
        let e1 = BladeIndex::generator(1);
        let e2 = BladeIndex::generator(2);
        let e12 = BladeIndex(0b11);
        assert_eq!(blade_product(e1, e1, 2).unwrap(), (-1.0, BladeIndex::SCALAR));
        assert_eq!(blade_product(e1, e2, 2).unwrap(), (1.0, e12));
        assert_eq!(blade_product(e12, e1, 2).unwrap(), (1.0, e2));
        assert_eq!(reference_product(e12, e1), (1.0, e2));
    }

    #[test]
    fn blade_product_matches_reference_exhaustively() {
        for n in 1..=6 {
            for a in 0..(1u32 << n) {
                for b in 0..(1u32 << n) {
                    let fast = blade_product(BladeIndex(a), BladeIndex(b), n).unwrap();
                    assert_eq!(fast, reference_product(BladeIndex(a), BladeIndex(b)), "{a:b} {b:b}");
                }
            }
        }
    }

    #[test]
    fn blade_dimension_mismatch() {
        assert!(matches!(
            blade_product(BladeIndex(0b100), BladeIndex(1), 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Multivector::zero(11).is_err());
    }

    #[test]
    fn mv_mul_examples() {
        let n = 2;
        let e1 = Multivector::e(n, 1).unwrap();
        let e2 = Multivector::e(n, 2).unwrap();
        assert_eq!(e1.mul(&e1).unwrap(), Multivector::scalar(n, -1.0).unwrap());

        let x = Multivector::paravector(n, &[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(x.mul(&x.conjugate()).unwrap(), Multivector::scalar(n, 2.0).unwrap());

        let a = &e1 + &e2;
        let b = &e1 - &e2;
        let expected = Multivector::blade(n, BladeIndex(0b11), -2.0).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expected);

        let bad = Multivector::e(3, 1).unwrap();
        assert!(e1.mul(&bad).is_err());
    }

    #[test]
    fn paravector_product_splits_into_inner_and_wedge() {
        let n = 3;
        let x = Multivector::paravector(n, &[0.0, 1.5, -2.0, 0.25]).unwrap();
        let y = Multivector::paravector(n, &[0.0, -0.5, 3.0, 1.0]).unwrap();
        let xy = x.mul(&y).unwrap();
        assert!((xy.sc_part() + x.inner(&y).unwrap()).abs() < 1e-14);
        let xs = x.paravector_parts();
        let ys = y.paravector_parts();
        for j in 1..=n {
            for k in (j + 1)..=n {
                let wedge = xs[j] * ys[k] - xs[k] * ys[j];
                let mask = BladeIndex((1 << (j - 1)) | (1 << (k - 1)));
                assert!((xy.coeff(mask) - wedge).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugation_and_parts() {
        let n = 2;
        let x = Multivector::paravector(n, &[1.0, 2.0, 0.0]).unwrap();
        assert_eq!(x.conjugate().paravector_parts(), vec![1.0, -2.0, 0.0]);
        assert_eq!(Multivector::scalar(n, 4.0).unwrap().conjugate().sc_part(), 4.0);
        let e12 = Multivector::blade(n, BladeIndex(0b11), 1.0).unwrap();
        assert_eq!(e12.conjugate(), e12);

        let y = Multivector::paravector(n, &[3.0, 1.0, 0.0]).unwrap();
        assert_eq!(y.sc_part(), 3.0);
        assert_eq!(y.nsc_part(), Multivector::e(n, 1).unwrap());

        let mut z = Multivector::paravector(n, &[1.0, 1.0, 0.0]).unwrap();
        z.set(BladeIndex(0b11), 5.0);
        assert_eq!(z.grade(2), Multivector::blade(n, BladeIndex(0b11), 5.0).unwrap());
    }

    #[test]
    fn norms() {
        let n = 2;
        let x = Multivector::paravector(n, &[1.0, 1.0, 1.0]).unwrap();
        assert!((x.norm() - 3f64.sqrt()).abs() < 1e-15);
        let e1 = Multivector::e(n, 1).unwrap();
        let e2 = Multivector::e(n, 2).unwrap();
        assert_eq!(e1.inner(&e2).unwrap(), 0.0);
        let e12 = Multivector::blade(n, BladeIndex(0b11), 1.0).unwrap();
        assert!(((&e12 - &e1).norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn anticommutation() {
        for n in 1..=5 {
            for i in 1..=n {
                let ei = Multivector::e(n, i).unwrap();
                assert_eq!(ei.mul(&ei).unwrap(), Multivector::scalar(n, -1.0).unwrap());
                for j in 1..=n {
                    if i != j {
                        let ej = Multivector::e(n, j).unwrap();
                        assert_eq!(ei.mul(&ej).unwrap(), -&ej.mul(&ei).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn quaternion_table() {
        let (e1, e2, e3) = (Quaternion::E1, Quaternion::E2, Quaternion::E3);
        assert_eq!(e1 * e2, e3);
        assert_eq!(e2 * e3, e1);
        assert_eq!(e3 * e1, e2);
        for q in [e1, e2, e3] {
            assert_eq!(q * q, -Quaternion::ONE);
        }
        assert_eq!(e2 * e1, -e3);
    }
}
