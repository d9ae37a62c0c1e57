//! Quantum Heisenberg manifolds `D^c_{mu nu}` sampled on an `N x N` grid.
//!
//! An element is a finite family of slices `F(., ., p)`, `|p| <= K`, stored on
//! the fundamental domain `x, y in {0, 1/N, ..., (N-1)/N}`. Values outside the
//! domain follow from `F(x + 1, y, p) = e(c p y) F(x, y, p)` and periodicity in
//! `y`. With `mu N` and `nu N` integral every shifted argument of the product
//! lands on the grid, so the algebraic identities hold up to rounding.
//!
//! For `c = 0` the algebra is the crossed product of `C(T^2)` by the
//! translation `2 (mu, nu)`: the slice `f_q` corresponds to `U^q g_q` with
//! `g_q(x) = f_q(x + q theta)`. The adapters below use this to run the
//! Fourier-side machinery on grid elements.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::{Read, Write};

use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bimodule::Bimodule;
use crate::connexion::ConnexionReport;
use crate::error::{Error, Result};
use crate::fourier::{FourierElement, Shift};
use crate::gcp::{CrossedElement, Gcp, GradedElement};
use crate::{e, C64};

const MAGIC: &[u8; 8] = b"QHMGRID1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QhmParams {
    pub c: i64,
    pub mu_num: i64,
    pub mu_den: i64,
    pub nu_num: i64,
    pub nu_den: i64,
    /// Grid points per unit length.
    pub n: usize,
    /// Degree cutoff.
    pub k: usize,
}

impl QhmParams {
    pub fn new(c: i64, mu: (i64, i64), nu: (i64, i64), n: usize, k: usize) -> Result<Self> {
        let p = Self {
            c,
            mu_num: mu.0,
            mu_den: mu.1,
            nu_num: nu.0,
            nu_den: nu.1,
            n,
            k,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("grid size must be positive".into()));
        }
        for (num, den, name) in [(self.mu_num, self.mu_den, "mu"), (self.nu_num, self.nu_den, "nu")] {
            if den <= 0 {
                return Err(Error::InvalidParameter(format!("{name} denominator must be positive")));
            }
            if (num * self.n as i64) % den != 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {num}/{den} is not a multiple of 1/{}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// `mu N`, the grid steps of one `mu` translation.
    pub fn mu_steps(&self) -> i64 {
        self.mu_num * self.n as i64 / self.mu_den
    }

    pub fn nu_steps(&self) -> i64 {
        self.nu_num * self.n as i64 / self.nu_den
    }

    pub fn mu(&self) -> f64 {
        self.mu_num as f64 / self.mu_den as f64
    }

    pub fn nu(&self) -> f64 {
        self.nu_num as f64 / self.nu_den as f64
    }

    fn slice_len(&self) -> usize {
        self.n * self.n
    }

    fn len(&self) -> usize {
        (2 * self.k + 1) * self.slice_len()
    }

    /// The translation `2 (mu, nu)` of the crossed-product picture.
    pub fn double_shift(&self) -> Result<Shift> {
        let den = self.mu_den * self.nu_den;
        Shift::new(vec![2 * self.mu_num * self.nu_den, 2 * self.nu_num * self.mu_den], den)
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::Incompatible(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QhmElement {
    params: QhmParams,
    values: Vec<C64>,
    lossy: bool,
}

impl QhmElement {
    pub fn zero(params: QhmParams) -> Self {
        Self {
            params,
            values: vec![C64::new(0.0, 0.0); params.len()],
            lossy: false,
        }
    }

    pub fn unit(params: QhmParams) -> Self {
        Self::homogeneous(params, 0, |_, _| C64::new(1.0, 0.0)).expect("degree 0 is in range")
    }

    /// Samples `f(p, x, y)` on the fundamental domain for every degree.
    pub fn from_fn(params: QhmParams, f: impl Fn(i64, f64, f64) -> C64) -> Self {
        let mut out = Self::zero(params);
        let n = params.n;
        let k = params.k as i64;
        for p in -k..=k {
            for ix in 0..n {
                for iy in 0..n {
                    let i = out.index(p, ix, iy);
                    out.values[i] = f(p, ix as f64 / n as f64, iy as f64 / n as f64);
                }
            }
        }
        out
    }

    /// The degree-`p` element with slice `f` on the fundamental domain.
    pub fn homogeneous(params: QhmParams, p: i64, f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        if p.unsigned_abs() as usize > params.k {
            return Err(Error::InvalidParameter(format!("degree {p} exceeds K = {}", params.k)));
        }
        Ok(Self::from_fn(params, |q, x, y| if q == p { f(x, y) } else { C64::new(0.0, 0.0) }))
    }

    /// The degree-`p` element whose slice is the trigonometric polynomial `g`.
    /// Only periodic slices exist in this form, so `p = 0` or `c = 0`.
    pub fn from_fourier(params: QhmParams, p: i64, g: &FourierElement) -> Result<Self> {
        if p != 0 && params.c != 0 {
            return Err(Error::InvalidParameter(
                "slices of nonzero degree are not periodic when c != 0".into(),
            ));
        }
        let slice = synthesize(g, params.n)?;
        let mut out = Self::homogeneous(params, p, |_, _| C64::new(0.0, 0.0))?;
        let start = out.index(p, 0, 0);
        out.values[start..start + params.slice_len()].copy_from_slice(&slice);
        Ok(out)
    }

    pub fn params(&self) -> &QhmParams {
        &self.params
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Set when a product produced degrees beyond `K`.
    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    fn index(&self, p: i64, ix: usize, iy: usize) -> usize {
        let n = self.params.n;
        ((p + self.params.k as i64) as usize * n + ix) * n + iy
    }

    /// `F(ix / N, iy / N, p)` for any integers, through the twisted periodicity.
    pub fn at(&self, p: i64, ix: i64, iy: i64) -> C64 {
        if p.unsigned_abs() as usize > self.params.k {
            return C64::new(0.0, 0.0);
        }
        let n = self.params.n as i64;
        let (wraps, rx) = (ix.div_euclid(n), ix.rem_euclid(n));
        let ry = iy.rem_euclid(n);
        let v = self.values[self.index(p, rx as usize, ry as usize)];
        if wraps == 0 || self.params.c == 0 {
            return v;
        }
        // e(c p y a) with y = ry / N, reduced exactly modulo N
        let r = (self.params.c as i128 * p as i128 * ry as i128 * wraps as i128).rem_euclid(n as i128);
        v * e(r as f64 / n as f64)
    }

    pub fn slice(&self, p: i64) -> &[C64] {
        let start = self.index(p, 0, 0);
        &self.values[start..start + self.params.slice_len()]
    }

    fn slice_is_zero(&self, p: i64) -> bool {
        self.slice(p).iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    /// Degrees with a nonzero slice.
    pub fn degrees(&self) -> Vec<i64> {
        let k = self.params.k as i64;
        (-k..=k).filter(|&p| !self.slice_is_zero(p)).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.params.same(&other.params)?;
        Ok(Self {
            params: self.params,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            lossy: self.lossy || other.lossy,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            params: self.params,
            values: self.values.iter().map(|a| a * s).collect(),
            lossy: self.lossy,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(F1 F2)(x,y,p) = sum_q F1(x-(q-p)mu, y-(q-p)nu, q) F2(x-q mu, y-q nu, p-q)`
    /// over `|q|, |p - q| <= K`. Degrees beyond `K` are dropped and flagged.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.params.same(&other.params)?;
        let pr = self.params;
        let (n, k) = (pr.n as i64, pr.k as i64);
        let (ms, ns) = (pr.mu_steps(), pr.nu_steps());
        let left = self.degrees();
        let right = other.degrees();
        let mut out = Self::zero(pr);
        out.lossy = self.lossy
            || other.lossy
            || left.iter().any(|q| right.iter().any(|r| (q + r).abs() > k));
        for p in -k..=k {
            for &q in &left {
                if !right.contains(&(p - q)) {
                    continue;
                }
                for ix in 0..n {
                    for iy in 0..n {
                        let a = self.at(q, ix - (q - p) * ms, iy - (q - p) * ns);
                        let b = other.at(p - q, ix - q * ms, iy - q * ns);
                        let i = out.index(p, ix as usize, iy as usize);
                        out.values[i] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `F^*(x,y,p) = conj F(x,y,-p)`.
    pub fn star(&self) -> Self {
        let pr = self.params;
        let k = pr.k as i64;
        let mut out = Self::zero(pr);
        out.lossy = self.lossy;
        for p in -k..=k {
            let src = self.index(-p, 0, 0);
            let dst = out.index(p, 0, 0);
            for i in 0..pr.slice_len() {
                out.values[dst + i] = self.values[src + i].conj();
            }
        }
        out
    }

    /// `alpha_(r,s,t)(F)(x,y,p) = e(p (t + c s (x - r))) F(x - r, y - s, p)`;
    /// `r` and `s` must be multiples of `1/N`.
    pub fn heisenberg_act(&self, r: f64, s: f64, t: f64) -> Result<Self> {
        let pr = self.params;
        let n = pr.n as f64;
        let grid = |v: f64, name: &str| -> Result<i64> {
            let steps = v * n;
            if (steps - steps.round()).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("{name} = {v} is off the grid")));
            }
            Ok(steps.round() as i64)
        };
        let (rs, ss) = (grid(r, "r")?, grid(s, "s")?);
        let k = pr.k as i64;
        let mut out = Self::zero(pr);
        out.lossy = self.lossy;
        for p in -k..=k {
            for ix in 0..pr.n {
                for iy in 0..pr.n {
                    let x = ix as f64 / n;
                    let phase = e(p as f64 * (t + pr.c as f64 * s * (x - r)));
                    let i = out.index(p, ix, iy);
                    out.values[i] = phase * self.at(p, ix as i64 - rs, iy as i64 - ss);
                }
            }
        }
        Ok(out)
    }

    /// The grid mean of the degree-zero slice.
    pub fn trace(&self) -> C64 {
        let s = self.slice(0);
        s.iter().sum::<C64>() / s.len() as f64
    }

    /// Component `j` of the connexion: `d_1 = d/dx` and
    /// `d_2 = d/dy - 2 pi i c p x`. Exact spectral differentiation when `c = 0`;
    /// otherwise fourth-order central differences in `x` through the twisted
    /// periodicity, and spectral differentiation in the periodic `y`.
    pub fn derive(&self, j: usize) -> Result<Self> {
        if j > 1 {
            return Err(Error::AxisOutOfRange { axis: j, dim: 2 });
        }
        let pr = self.params;
        let (n, k) = (pr.n, pr.k as i64);
        let mut out = Self::zero(pr);
        out.lossy = self.lossy;
        for p in -k..=k {
            if self.slice_is_zero(p) {
                continue;
            }
            let start = self.index(p, 0, 0);
            let slice: Vec<C64> = if j == 1 || pr.c == 0 {
                spectral_derivative(self.slice(p), n, j)
            } else {
                let h = 1.0 / n as f64;
                let mut v = Vec::with_capacity(pr.slice_len());
                for ix in 0..n as i64 {
                    for iy in 0..n as i64 {
                        let f = |d: i64| self.at(p, ix + d, iy);
                        v.push((f(-2) - f(-1) * 8.0 + f(1) * 8.0 - f(2)) / (12.0 * h));
                    }
                }
                v
            };
            out.values[start..start + pr.slice_len()].copy_from_slice(&slice);
            if j == 1 && pr.c != 0 {
                for ix in 0..n {
                    let x = ix as f64 / n as f64;
                    let m = C64::new(0.0, -TAU * pr.c as f64 * p as f64 * x);
                    for iy in 0..n {
                        let i = out.index(p, ix, iy);
                        out.values[i] += m * self.values[i];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The slice of degree `p` as a trigonometric polynomial; exact for
    /// band-limited data with `|k|_inf < N/2`.
    pub fn slice_fourier(&self, p: i64) -> FourierElement {
        analyze(self.slice(p), self.params.n)
    }

    /// Writes the header `(magic, c, mu, nu, N, K)` and the values as
    /// little-endian complex doubles in `(p, ix, iy)` row-major order.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let pr = self.params;
        w.write_all(MAGIC)?;
        for v in [pr.c, pr.mu_num, pr.mu_den, pr.nu_num, pr.nu_den] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(pr.n as u64).to_le_bytes())?;
        w.write_all(&(pr.k as u64).to_le_bytes())?;
        for z in &self.values {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a grid element file".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word)?;
            Ok(word)
        };
        let mut ints = [0i64; 5];
        for v in ints.iter_mut() {
            *v = i64::from_le_bytes(next(r)?);
        }
        let n = u64::from_le_bytes(next(r)?) as usize;
        let k = u64::from_le_bytes(next(r)?) as usize;
        let params = QhmParams::new(ints[0], (ints[1], ints[2]), (ints[3], ints[4]), n, k)?;
        let mut out = Self::zero(params);
        for z in out.values.iter_mut() {
            let re = f64::from_le_bytes(next(r)?);
            let im = f64::from_le_bytes(next(r)?);
            *z = C64::new(re, im);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", rest.len())));
        }
        Ok(out)
    }
}

/// Random trigonometric slices in the listed degrees (`c = 0` only, or
/// degree 0).
pub fn random_algebraic<R: Rng + ?Sized>(
    params: QhmParams,
    degrees: &[i64],
    terms: usize,
    radius: i64,
    rng: &mut R,
) -> Result<QhmElement> {
    let mut out = QhmElement::zero(params);
    for &p in degrees {
        let g = FourierElement::random(2, terms, radius, rng);
        out = out.add(&QhmElement::from_fourier(params, p, &g)?)?;
    }
    Ok(out)
}

/// Smooth elements for any `c`: in degree `p`, a Gaussian of random centre
/// and width summed into the theta series
/// `sum_m G(x + m - x0) e(-c p m y) h(y)`, which has the twisted periodicity.
pub fn random_smooth<R: Rng + ?Sized>(params: QhmParams, degrees: &[i64], rng: &mut R) -> Result<QhmElement> {
    let mut out = QhmElement::zero(params);
    for &p in degrees {
        let x0: f64 = rng.gen_range(0.0..1.0);
        let width: f64 = rng.gen_range(0.15..0.22);
        let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let h = FourierElement::random(1, 2, 1, rng);
        let c = params.c as f64;
        let part = QhmElement::homogeneous(params, p, |x, y| {
            let mut acc = C64::new(0.0, 0.0);
            for m in -4..=4 {
                let d = x + m as f64 - x0;
                acc += e(-c * p as f64 * m as f64 * y) * (-d * d / (2.0 * width * width)).exp();
            }
            acc * amp * h.evaluate(&[y])
        })?;
        out = out.add(&part)?;
    }
    Ok(out)
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |s: f64| (-1.0 / s).exp();
    f(t) / (f(t) + f(1.0 - t))
}

/// `(chi_1, chi_2)` at `x`: 1-periodic, real, `chi_1^2 + chi_2^2 = 1`,
/// `chi_1 = 1` on `[-1/6, 1/6]` and `chi_2 = 1` on `[1/3, 2/3]`.
pub fn partition(x: f64) -> (f64, f64) {
    let u = x.rem_euclid(1.0);
    let dist = u.min(1.0 - u);
    let s = smooth_step((dist - 1.0 / 6.0) * 6.0);
    ((FRAC_PI_2 * s).cos(), (FRAC_PI_2 * s).sin())
}

/// The degree-one pair with `xi_1^* xi_1 + xi_2^* xi_2 = 1`. `xi_1` is
/// `chi_1` on `[-1/2, 1/2]` and `xi_2` is `chi_2` on `[0, 1]`, each extended
/// by the twisted periodicity.
pub fn frame(params: QhmParams) -> Result<[QhmElement; 2]> {
    if params.n < 12 {
        return Err(Error::InvalidParameter(format!(
            "the frame needs N >= 12 to resolve its plateaus, got {}",
            params.n
        )));
    }
    if params.k < 1 {
        return Err(Error::InvalidParameter("the frame lives in degree 1, K >= 1".into()));
    }
    let c = params.c as f64;
    let xi1 = QhmElement::homogeneous(params, 1, |x, y| {
        let v = C64::new(partition(x).0, 0.0);
        if x < 0.5 {
            v
        } else {
            e(c * y) * v
        }
    })?;
    let xi2 = QhmElement::homogeneous(params, 1, |x, _| C64::new(partition(x).1, 0.0))?;
    Ok([xi1, xi2])
}

/// `| sum_i xi_i^* xi_i - 1 |` for the frame.
pub fn frame_identity_residual(params: QhmParams) -> Result<f64> {
    let [a, b] = frame(params)?;
    let sum = a.star().multiply(&a)?.add(&b.star().multiply(&b)?)?;
    Ok(sum.max_abs_diff(&QhmElement::unit(params)))
}

/// `| sum_i xi_i <xi_i, eta> - eta |` on each degree-one sample.
pub fn frame_reconstruction_residual(samples: &[QhmElement]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for eta in samples {
        let fr = frame(*eta.params())?;
        let mut acc = QhmElement::zero(*eta.params());
        for xi in &fr {
            acc = acc.add(&xi.multiply(&xi.star().multiply(eta)?)?)?;
        }
        worst = worst.max(acc.max_abs_diff(eta));
    }
    Ok(worst)
}

/// The four connexion identities for `d_1, d_2` on degree-one samples, with
/// `<xi, eta>_B = xi^* eta` and `_B<xi, eta> = xi eta^*`.
pub fn check_connexion(samples: &[QhmElement], bases: &[QhmElement]) -> Result<ConnexionReport> {
    let mut rep = ConnexionReport {
        right_leibniz: 0.0,
        left_leibniz: 0.0,
        right_hermitian: 0.0,
        left_hermitian: 0.0,
    };
    for j in 0..2 {
        for xi in samples {
            let dxi = xi.derive(j)?;
            for b in bases {
                let db = b.derive(j)?;
                let lhs = xi.multiply(b)?.derive(j)?;
                let rhs = dxi.multiply(b)?.add(&xi.multiply(&db)?)?;
                rep.right_leibniz = rep.right_leibniz.max(lhs.max_abs_diff(&rhs));
                let lhs = b.multiply(xi)?.derive(j)?;
                let rhs = db.multiply(xi)?.add(&b.multiply(&dxi)?)?;
                rep.left_leibniz = rep.left_leibniz.max(lhs.max_abs_diff(&rhs));
            }
            for eta in samples {
                let deta = eta.derive(j)?;
                let lhs = xi.star().multiply(eta)?.derive(j)?;
                let rhs = dxi.star().multiply(eta)?.add(&xi.star().multiply(&deta)?)?;
                rep.right_hermitian = rep.right_hermitian.max(lhs.max_abs_diff(&rhs));
                let lhs = xi.multiply(&eta.star())?.derive(j)?;
                let rhs = dxi.multiply(&eta.star())?.add(&xi.multiply(&deta.star())?)?;
                rep.left_hermitian = rep.left_hermitian.max(lhs.max_abs_diff(&rhs));
            }
        }
    }
    Ok(rep)
}

/// `| [d_1, d_2] F + 2 pi i c p F |`. With `d_1 = d/dx` and
/// `d_2 = d/dy - 2 pi i c p x`, the bracket is `-c` times the gauge generator
/// `2 pi i p`.
pub fn heisenberg_bracket_residual(f: &QhmElement) -> Result<f64> {
    let lhs = f.derive(1)?.derive(0)?.sub(&f.derive(0)?.derive(1)?)?;
    let pr = *f.params();
    let gen = QhmElement::from_fn(pr, |p, _, _| C64::new(0.0, -TAU * pr.c as f64 * p as f64));
    let want = QhmElement {
        params: pr,
        values: gen.values.iter().zip(&f.values).map(|(g, v)| g * v).collect(),
        lossy: false,
    };
    Ok(lhs.max_abs_diff(&want))
}

/// The Fourier-side bimodule of the `c = 0` algebra: `B` twisted by the
/// translation `2 (mu, nu)`, with the frame `cos(2 pi x), sin(2 pi x)` playing
/// the part of the partition `chi_1, chi_2`.
pub fn bimodule(params: QhmParams) -> Result<Bimodule> {
    if params.c != 0 {
        return Err(Error::InvalidParameter(
            "only c = 0 has a trivial-bundle Fourier picture".into(),
        ));
    }
    Bimodule::new(
        params.double_shift()?,
        vec![FourierElement::cos(&[1, 0]), FourierElement::sin(&[1, 0])],
        0,
    )
}

fn check_adapter(params: &QhmParams, gcp: &Gcp) -> Result<()> {
    if params.c != 0 || gcp.sigma() != &params.double_shift()? {
        return Err(Error::Incompatible("GCP does not match the grid parameters".into()));
    }
    Ok(())
}

/// The grid element as a graded element of the matching GCP.
pub fn to_graded(f: &QhmElement, gcp: &Gcp) -> Result<GradedElement> {
    let pr = *f.params();
    check_adapter(&pr, gcp)?;
    let mut x = CrossedElement::zero(2, gcp.sigma().clone());
    for q in f.degrees() {
        if q.unsigned_abs() as usize > gcp.k_max() {
            return Err(Error::InvalidParameter(format!("degree {q} exceeds the GCP cutoff")));
        }
        let n = pr.n as i64;
        let mut g = Vec::with_capacity(pr.slice_len());
        for ix in 0..n {
            for iy in 0..n {
                g.push(f.at(q, ix + q * pr.mu_steps(), iy + q * pr.nu_steps()));
            }
        }
        x = x.add(&CrossedElement::monomial(gcp.sigma().clone(), q, analyze(&g, pr.n)));
    }
    Ok(gcp.from_crossed(&x))
}

/// Inverse of [`to_graded`] for elements whose modes fit the grid.
pub fn from_graded(params: QhmParams, gcp: &Gcp, f: &GradedElement) -> Result<QhmElement> {
    check_adapter(&params, gcp)?;
    let x = gcp.to_crossed(f);
    let mut out = QhmElement::zero(params);
    out.lossy = f.is_lossy();
    let n = params.n as i64;
    for (q, g) in &x.parts {
        if q.unsigned_abs() as usize > params.k {
            return Err(Error::InvalidParameter(format!("degree {q} exceeds K = {}", params.k)));
        }
        let h = synthesize(g, params.n)?;
        for ix in 0..n {
            for iy in 0..n {
                let sx = (ix - q * params.mu_steps()).rem_euclid(n);
                let sy = (iy - q * params.nu_steps()).rem_euclid(n);
                let i = out.index(*q, ix as usize, iy as usize);
                out.values[i] = h[(sx * n + sy) as usize];
            }
        }
    }
    Ok(out)
}

fn signed_freq(i: usize, n: usize) -> i64 {
    if 2 * i < n {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn fft_axis(data: &mut [C64], n: usize, axis: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![C64::new(0.0, 0.0); n];
    for a in 0..n {
        for b in 0..n {
            line[b] = if axis == 0 { data[b * n + a] } else { data[a * n + b] };
        }
        fft.process(&mut line);
        for b in 0..n {
            if axis == 0 {
                data[b * n + a] = line[b];
            } else {
                data[a * n + b] = line[b];
            }
        }
    }
}

fn spectral_derivative(slice: &[C64], n: usize, axis: usize) -> Vec<C64> {
    let mut d = slice.to_vec();
    fft_axis(&mut d, n, axis, false);
    for ix in 0..n {
        for iy in 0..n {
            let i = if axis == 0 { ix } else { iy };
            // the Nyquist mode has no odd derivative on the grid
            let k = if 2 * i == n { 0 } else { signed_freq(i, n) };
            d[ix * n + iy] *= C64::new(0.0, TAU * k as f64 / n as f64);
        }
    }
    fft_axis(&mut d, n, axis, true);
    d
}

/// Fourier coefficients of a grid slice, pruned below `1e-13`.
fn analyze(slice: &[C64], n: usize) -> FourierElement {
    let mut d = slice.to_vec();
    fft_axis(&mut d, n, 0, false);
    fft_axis(&mut d, n, 1, false);
    let norm = (n * n) as f64;
    let mut out = FourierElement::zero(2);
    for a in 0..n {
        for b in 0..n {
            let c = d[a * n + b] / norm;
            if c.norm() > 1e-13 {
                out.insert(vec![signed_freq(a, n), signed_freq(b, n)], c);
            }
        }
    }
    out
}

/// Grid samples of a trigonometric polynomial with modes `|k|_inf < N/2`.
fn synthesize(g: &FourierElement, n: usize) -> Result<Vec<C64>> {
    if g.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.n() });
    }
    if 2 * g.support_radius() >= n as i64 {
        return Err(Error::InvalidParameter(format!(
            "mode radius {} does not fit a grid of size {n}",
            g.support_radius()
        )));
    }
    let mut d = vec![C64::new(0.0, 0.0); n * n];
    let ni = n as i64;
    for (k, c) in g.coeffs() {
        let (a, b) = (k[0].rem_euclid(ni) as usize, k[1].rem_euclid(ni) as usize);
        d[a * n + b] += c;
    }
    fft_axis(&mut d, n, 0, true);
    fft_axis(&mut d, n, 1, true);
    Ok(d)
}
