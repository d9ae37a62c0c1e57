//! Trigonometric polynomials on the torus `T^n`.
//!
//! An element is a finite map from lattice points `k` to coefficients of the
//! characters `e_k(x) = e(k . x)`. Storage is ordered so that iteration, and
//! therefore every derived matrix, is deterministic.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::{e, C64};

pub type Mode = Vec<i64>;

/// A rational translation `theta = num / den` of the torus.
///
/// The automorphism it induces is `sigma(b)(x) = b(x - theta)`, which rotates
/// the coefficient of `e_k` by `e(-k . theta)`. Phases are reduced modulo `den`
/// in integer arithmetic before the exponential is taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shift {
    num: Vec<i64>,
    den: i64,
}

impl Shift {
    pub fn new(num: Vec<i64>, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::InvalidParameter(format!(
                "shift denominator must be positive, got {den}"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            num: vec![0; n],
            den: 1,
        }
    }

    pub fn n(&self) -> usize {
        self.num.len()
    }

    pub fn num(&self) -> &[i64] {
        &self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&a| a.rem_euclid(self.den) == 0)
    }

    /// `s * theta`.
    pub fn scaled(&self, s: i64) -> Self {
        Self {
            num: self.num.iter().map(|a| a * s).collect(),
            den: self.den,
        }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.num
            .iter()
            .map(|&a| a as f64 / self.den as f64)
            .collect()
    }

    /// `e(t * k . theta)` with the product reduced exactly modulo the denominator.
    pub fn character_phase(&self, k: &[i64], t: i64) -> C64 {
        let dot: i128 = k
            .iter()
            .zip(&self.num)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        let r = (dot * t as i128).rem_euclid(self.den as i128);
        e(r as f64 / self.den as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierElement {
    n: usize,
    coeffs: BTreeMap<Mode, C64>,
}

impl FourierElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn unit(n: usize) -> Self {
        Self::constant(n, C64::new(1.0, 0.0))
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut out = Self::zero(n);
        out.insert(vec![0; n], c);
        out
    }

    pub fn monomial(k: &[i64], c: C64) -> Self {
        let mut out = Self::zero(k.len());
        out.insert(k.to_vec(), c);
        out
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (Mode, C64)>) -> Result<Self> {
        let mut out = Self::zero(n);
        for (k, c) in pairs {
            if k.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: k.len(),
                });
            }
            *out.coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        out.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        Ok(out)
    }

    /// `cos(2 pi k . x)`.
    pub fn cos(k: &[i64]) -> Self {
        let neg: Vec<i64> = k.iter().map(|a| -a).collect();
        Self::monomial(k, C64::new(0.5, 0.0)) + Self::monomial(&neg, C64::new(0.5, 0.0))
    }

    /// `sin(2 pi k . x)`.
    pub fn sin(k: &[i64]) -> Self {
        let neg: Vec<i64> = k.iter().map(|a| -a).collect();
        Self::monomial(k, C64::new(0.0, -0.5)) + Self::monomial(&neg, C64::new(0.0, 0.5))
    }

    /// A seeded element with `terms` coefficients drawn in the box `|k|_inf <= radius`.
    pub fn random<R: Rng + ?Sized>(n: usize, terms: usize, radius: i64, rng: &mut R) -> Self {
        let mut out = Self::zero(n);
        for _ in 0..terms {
            let k: Mode = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            *out.coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Mode, &C64)> {
        self.coeffs.iter()
    }

    pub fn get(&self, k: &[i64]) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn insert(&mut self, k: Mode, c: C64) {
        assert_eq!(k.len(), self.n, "mode dimension");
        if c == C64::new(0.0, 0.0) {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    /// Pointwise product, i.e. convolution of coefficients.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out: BTreeMap<Mode, C64> = BTreeMap::new();
        for (k, a) in &self.coeffs {
            for (m, b) in &other.coeffs {
                let s: Mode = k.iter().zip(m).map(|(x, y)| x + y).collect();
                *out.entry(s).or_insert(C64::new(0.0, 0.0)) += a * b;
            }
        }
        out.retain(|_, c| *c != C64::new(0.0, 0.0));
        Ok(Self {
            n: self.n,
            coeffs: out,
        })
    }

    pub fn star(&self) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (k.iter().map(|a| -a).collect(), c.conj()))
                .collect(),
        }
    }

    /// `d/dx_axis`, multiplying the coefficient of `e_k` by `2 pi i k_axis`.
    /// Axes are numbered from zero.
    pub fn derive(&self, axis: usize) -> Result<Self> {
        if axis >= self.n {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.n,
            });
        }
        let mut out = Self::zero(self.n);
        for (k, c) in &self.coeffs {
            out.insert(k.clone(), c * C64::new(0.0, TAU * k[axis] as f64));
        }
        Ok(out)
    }

    /// `sigma^power(self)` for the translation by `theta`.
    pub fn shift(&self, theta: &Shift, power: i64) -> Self {
        if power == 0 || theta.is_zero() {
            return self.clone();
        }
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (k.clone(), c * theta.character_phase(k, -power)))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.coeffs {
            out.insert(k.clone(), c * s);
        }
        out
    }

    /// Largest `|k|_inf` in the support, 0 for the empty element.
    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|k| k.iter().map(|a| a.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn prune(&self, tol: f64) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.star()) <= tol
    }

    pub fn evaluate(&self, x: &[f64]) -> C64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
                c * e(phase)
            })
            .sum()
    }
}

impl Add for &FourierElement {
    type Output = FourierElement;
    fn add(self, rhs: &FourierElement) -> FourierElement {
        assert_eq!(self.n, rhs.n, "torus dimension");
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            let v = out.get(k) + c;
            out.insert(k.clone(), v);
        }
        out
    }
}

impl Add for FourierElement {
    type Output = FourierElement;
    fn add(self, rhs: FourierElement) -> FourierElement {
        &self + &rhs
    }
}

impl Sub for &FourierElement {
    type Output = FourierElement;
    fn sub(self, rhs: &FourierElement) -> FourierElement {
        self + &(-rhs)
    }
}

impl Sub for FourierElement {
    type Output = FourierElement;
    fn sub(self, rhs: FourierElement) -> FourierElement {
        &self - &rhs
    }
}

impl Neg for &FourierElement {
    type Output = FourierElement;
    fn neg(self) -> FourierElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &FourierElement {
    type Output = FourierElement;
    fn mul(self, rhs: &FourierElement) -> FourierElement {
        self.multiply(rhs).expect("torus dimension")
    }
}

impl Mul for FourierElement {
    type Output = FourierElement;
    fn mul(self, rhs: FourierElement) -> FourierElement {
        &self * &rhs
    }
}
