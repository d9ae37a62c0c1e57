//! The generalized crossed product `A = B x_E Z` at finite degree truncation.
//!
//! A [`GradedElement`] stores one coordinate vector per degree: at degree
//! `k > 0` the coordinates of `eta` in `E^{(x)k}` standing for `S(eta)`, at
//! degree `-k` the same kind of coordinates standing for `S(eta)^*`, and at
//! degree 0 a single element of `B`. Products are computed by the contraction
//! rules of the representation relations:
//!
//! ```text
//! S(xi)^* S(zeta) = <xi, zeta>_B        S(xi) S(zeta)^* = _B<xi, zeta>
//! S(xi) S(zeta)   = S(xi (x) zeta)      b S(xi) = S(b xi),  S(xi) b = S(xi b)
//! ```
//!
//! applied on the innermost tensor legs. [`CrossedElement`] is the same algebra
//! written as `sum_k U^k g_k` with `b U = U sigma^{-1}(b)`; it serves as the
//! reference picture and drives the representation on `X (x)_B H`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::bimodule::{tensor_coords, Bimodule, ModuleElement};
use crate::error::{Error, Result};
use crate::fourier::{FourierElement, Shift};
use crate::operator::{sector_grid, Cutoff, Sector, TruncatedOperator};
use crate::{CMatrix, C64};

/// Largest deviation from each representation law.
#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq)]
pub struct RelationReport {
    pub inner_right: f64,
    pub right_action: f64,
    pub left_action: f64,
    pub inner_left: f64,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        self.inner_right
            .max(self.right_action)
            .max(self.left_action)
            .max(self.inner_left)
    }

    /// Componentwise maximum.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            inner_right: self.inner_right.max(other.inner_right),
            right_action: self.right_action.max(other.right_action),
            left_action: self.left_action.max(other.left_action),
            inner_left: self.inner_left.max(other.inner_left),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedElement {
    n: usize,
    parts: BTreeMap<i64, Vec<FourierElement>>,
    lossy: bool,
}

impl GradedElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            parts: BTreeMap::new(),
            lossy: false,
        }
    }

    pub fn from_base(b: FourierElement) -> Self {
        let mut out = Self::zero(b.n());
        out.parts.insert(0, vec![b]);
        out
    }

    pub fn unit(n: usize) -> Self {
        Self::from_base(FourierElement::unit(n))
    }

    /// The homogeneous element of degree `degree` with the given coordinates.
    pub fn homogeneous(n: usize, degree: i64, coords: Vec<FourierElement>) -> Self {
        let mut out = Self::zero(n);
        out.parts.insert(degree, coords);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &BTreeMap<i64, Vec<FourierElement>> {
        &self.parts
    }

    pub fn part(&self, k: i64) -> Option<&[FourierElement]> {
        self.parts.get(&k).map(|v| v.as_slice())
    }

    /// Degrees carrying a nonzero part.
    pub fn degrees(&self) -> Vec<i64> {
        self.parts
            .iter()
            .filter(|(_, v)| v.iter().any(|c| !c.is_empty()))
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    pub fn max_degree(&self) -> i64 {
        self.degrees().iter().map(|k| k.abs()).max().unwrap_or(0)
    }

    fn accumulate(&mut self, degree: i64, coords: Vec<FourierElement>) {
        match self.parts.get_mut(&degree) {
            Some(v) => {
                for (a, b) in v.iter_mut().zip(coords) {
                    *a = &*a + &b;
                }
            }
            None => {
                self.parts.insert(degree, coords);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.lossy |= other.lossy;
        for (k, v) in &other.parts {
            out.accumulate(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            parts: self
                .parts
                .iter()
                .map(|(k, v)| (*k, v.iter().map(|c| c.scale(s)).collect()))
                .collect(),
            lossy: self.lossy,
        }
    }

    /// Largest coefficient of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .parts
            .values()
            .flat_map(|v| v.iter().map(|c| c.max_abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.parts
            .values()
            .flat_map(|v| v.iter().map(|c| c.max_abs()))
            .fold(0.0, f64::max)
    }
}

/// `sum_k U^k g_k` with `g U = U sigma^{-1}(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedElement {
    pub n: usize,
    pub sigma: Shift,
    pub parts: BTreeMap<i64, FourierElement>,
}

impl CrossedElement {
    pub fn zero(n: usize, sigma: Shift) -> Self {
        Self {
            n,
            sigma,
            parts: BTreeMap::new(),
        }
    }

    pub fn monomial(sigma: Shift, q: i64, g: FourierElement) -> Self {
        let mut out = Self::zero(g.n(), sigma);
        out.parts.insert(q, g);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, g) in &other.parts {
            let cur = out.parts.remove(k).unwrap_or_else(|| FourierElement::zero(self.n));
            out.parts.insert(*k, &cur + g);
        }
        out
    }

    /// `(U^a g)(U^b h) = U^{a+b} sigma^{-b}(g) h`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n, self.sigma.clone());
        for (a, g) in &self.parts {
            for (b, h) in &other.parts {
                let term = &g.shift(&self.sigma, -b) * h;
                let cur = out.parts.remove(&(a + b)).unwrap_or_else(|| FourierElement::zero(self.n));
                out.parts.insert(a + b, &cur + &term);
            }
        }
        out
    }

    /// `(U^a g)^* = U^{-a} sigma^a(g^*)`.
    pub fn star(&self) -> Self {
        Self {
            n: self.n,
            sigma: self.sigma.clone(),
            parts: self
                .parts
                .iter()
                .map(|(a, g)| (-a, g.star().shift(&self.sigma, *a)))
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<i64> = self.parts.keys().chain(other.parts.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        let zero = FourierElement::zero(self.n);
        keys.iter()
            .map(|k| {
                self.parts
                    .get(k)
                    .unwrap_or(&zero)
                    .max_abs_diff(other.parts.get(k).unwrap_or(&zero))
            })
            .fold(0.0, f64::max)
    }
}

/// The algebra generated by `B` and `E`, truncated to degrees `|k| <= K`.
#[derive(Debug, Clone)]
pub struct Gcp {
    module: Bimodule,
    k_max: usize,
    powers: Vec<Bimodule>,
}

impl Gcp {
    pub fn new(module: Bimodule, k_max: usize) -> Result<Self> {
        if module.degree() != 1 {
            return Err(Error::InvalidParameter(
                "the generating bimodule must have tensor degree one".into(),
            ));
        }
        let powers = (0..=k_max).map(|k| module.tensor_power(k)).collect();
        Ok(Self {
            module,
            k_max,
            powers,
        })
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn n(&self) -> usize {
        self.module.n()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn sigma(&self) -> &Shift {
        self.module.sigma()
    }

    /// The tensor power carrying degree `k` (and `-k`).
    pub fn power(&self, k: i64) -> &Bimodule {
        &self.powers[k.unsigned_abs() as usize]
    }

    /// `S(eta)` for `eta` in `E^{(x)k}`, `k >= 1`.
    pub fn s(&self, k: usize, eta: &ModuleElement) -> GradedElement {
        GradedElement::homogeneous(self.n(), k as i64, eta.coords.clone())
    }

    /// `S(eta)^*` for `eta` in `E^{(x)k}`.
    pub fn s_star(&self, k: usize, eta: &ModuleElement) -> GradedElement {
        GradedElement::homogeneous(self.n(), -(k as i64), eta.coords.clone())
    }

    fn contract_left(&self, k: usize, c: &[FourierElement], l: usize, d: &[FourierElement]) -> Vec<FourierElement> {
        // S(eta)^* S(zeta) for eta in E^k, zeta in E^l, l >= k
        let sigma = self.sigma();
        let rest = self.power((l - k) as i64);
        let inner = rest.m();
        let mut g = vec![FourierElement::zero(self.n()); inner];
        for (i, ci) in c.iter().enumerate() {
            let w = ci.star().shift(sigma, -((l - k) as i64));
            for (j, gj) in g.iter_mut().enumerate() {
                *gj = &*gj + &(&w * &d[i * inner + j]);
            }
        }
        rest.project(&g).coords
    }

    fn contract_right(&self, k: usize, c: &[FourierElement], l: usize, d: &[FourierElement]) -> Vec<FourierElement> {
        // S(eta) S(zeta)^* for eta in E^k, zeta in E^l, k >= l
        let sigma = self.sigma();
        let rest = self.power((k - l) as i64);
        let inner = self.power(l as i64).m();
        let f: Vec<FourierElement> = (0..rest.m())
            .map(|i| {
                let mut acc = FourierElement::zero(self.n());
                for (j, dj) in d.iter().enumerate() {
                    acc = &acc + &(&dj.star() * &c[i * inner + j]);
                }
                acc.shift(sigma, l as i64)
            })
            .collect();
        rest.project(&f).coords
    }

    /// Product of two homogeneous parts.
    fn mul_homogeneous(
        &self,
        k: i64,
        c: &[FourierElement],
        l: i64,
        d: &[FourierElement],
    ) -> (i64, Vec<FourierElement>) {
        let sigma = self.sigma();
        let (ka, la) = (k.unsigned_abs() as usize, l.unsigned_abs() as usize);
        match (k.signum(), l.signum()) {
            (0, 0) => (0, vec![&c[0] * &d[0]]),
            (0, 1) => {
                let b = c[0].shift(sigma, -l);
                (l, d.iter().map(|x| x * &b).collect())
            }
            (0, -1) => {
                let b = c[0].star();
                (l, d.iter().map(|x| x * &b).collect())
            }
            (1, 0) => (k, c.iter().map(|x| x * &d[0]).collect()),
            (-1, 0) => {
                let b = d[0].star().shift(sigma, -(ka as i64));
                (k, c.iter().map(|x| x * &b).collect())
            }
            (1, 1) => (k + l, tensor_coords(sigma, c, d, la)),
            (-1, -1) => (k + l, tensor_coords(sigma, d, c, ka)),
            (-1, 1) => {
                if la >= ka {
                    (l - ka as i64, self.contract_left(ka, c, la, d))
                } else {
                    // (S(zeta)^* S(eta))^*
                    (l + k, self.contract_left(la, d, ka, c))
                }
            }
            (1, -1) => {
                if ka >= la {
                    (k - la as i64, self.contract_right(ka, c, la, d))
                } else {
                    // (S(zeta) S(eta)^*)^*
                    (k + l, self.contract_right(la, d, ka, c))
                }
            }
            _ => unreachable!(),
        }
    }

    /// Graded product; parts landing beyond `|k| <= K` are dropped and flag
    /// the result lossy.
    pub fn multiply(&self, f: &GradedElement, g: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(self.n());
        out.lossy = f.lossy || g.lossy;
        for (k, c) in &f.parts {
            for (l, d) in &g.parts {
                if (k + l).unsigned_abs() as usize > self.k_max {
                    out.lossy = true;
                    continue;
                }
                let (deg, coords) = self.mul_homogeneous(*k, c, *l, d);
                out.accumulate(deg, coords);
            }
        }
        out
    }

    pub fn star(&self, f: &GradedElement) -> GradedElement {
        GradedElement {
            n: f.n,
            parts: f
                .parts
                .iter()
                .map(|(k, v)| {
                    if *k == 0 {
                        (0, vec![v[0].star()])
                    } else {
                        (-k, v.clone())
                    }
                })
                .collect(),
            lossy: f.lossy,
        }
    }

    /// `gamma_z`, scaling degree `k` by `z^k`.
    pub fn gauge_act(&self, z: C64, f: &GradedElement) -> Result<GradedElement> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "gauge parameter must have modulus one, got {}",
                z.norm()
            )));
        }
        let mut out = f.clone();
        for (k, v) in out.parts.iter_mut() {
            // S(eta)^* z^{-m} = S(z^m eta)^*, so stored coordinates scale by z^|k|
            let s = z.powi(k.abs() as i32);
            for c in v.iter_mut() {
                *c = c.scale(s);
            }
        }
        Ok(out)
    }

    /// The degree-zero part.
    pub fn cond_exp(&self, f: &GradedElement) -> FourierElement {
        f.parts
            .get(&0)
            .map(|v| v[0].clone())
            .unwrap_or_else(|| FourierElement::zero(self.n()))
    }

    /// `<F, G> = E(F^* G)`.
    pub fn x_inner(&self, f: &GradedElement, g: &GradedElement) -> FourierElement {
        let mut acc = FourierElement::zero(self.n());
        for (k, c) in &f.parts {
            if let Some(d) = g.parts.get(k) {
                let lhs = GradedElement::homogeneous(self.n(), *k, c.clone());
                let rhs = GradedElement::homogeneous(self.n(), *k, d.clone());
                let prod = self.multiply(&self.star(&lhs), &rhs);
                acc = &acc + &self.cond_exp(&prod);
            }
        }
        acc
    }

    /// Tensor frames of `E^{(x)|k|}` placed in every degree `|k| <= K`, the
    /// negative ones as adjoints.
    pub fn x_frame(&self) -> Vec<GradedElement> {
        let k = self.k_max as i64;
        let mut out = Vec::new();
        for d in -k..=k {
            let p = self.power(d);
            for xi in p.frame() {
                out.push(GradedElement::homogeneous(self.n(), d, xi.coords));
            }
        }
        out
    }

    /// `| sum_j Xi_j <Xi_j, F> - F |` for each sample.
    pub fn x_frame_residual(&self, samples: &[GradedElement]) -> f64 {
        let frame = self.x_frame();
        samples
            .iter()
            .map(|f| {
                let mut acc = GradedElement::zero(self.n());
                for xi in &frame {
                    let b = GradedElement::from_base(self.x_inner(xi, f));
                    acc = acc.add(&self.multiply(xi, &b));
                }
                acc.max_abs_diff(f)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_crossed(&self, f: &GradedElement) -> CrossedElement {
        let mut out = CrossedElement::zero(self.n(), self.sigma().clone());
        for (k, c) in &f.parts {
            let g = if *k == 0 {
                c[0].clone()
            } else {
                let flat = self.power(*k).flatten(&ModuleElement::new(c.clone()));
                if *k > 0 {
                    flat
                } else {
                    flat.star().shift(self.sigma(), -k)
                }
            };
            out = out.add(&CrossedElement::monomial(self.sigma().clone(), *k, g));
        }
        out
    }

    pub fn from_crossed(&self, x: &CrossedElement) -> GradedElement {
        let mut out = GradedElement::zero(self.n());
        for (k, g) in &x.parts {
            if *k == 0 {
                out.accumulate(0, vec![g.clone()]);
            } else {
                let flat = if *k > 0 {
                    g.clone()
                } else {
                    g.shift(self.sigma(), *k).star()
                };
                out.accumulate(*k, self.power(*k).from_flat(&flat).coords);
            }
        }
        out
    }

    /// `c U^q e_mode` as a graded element.
    pub fn monomial(&self, q: i64, mode: &[i64], c: C64) -> GradedElement {
        let x = CrossedElement::monomial(self.sigma().clone(), q, FourierElement::monomial(mode, c));
        self.from_crossed(&x)
    }

    /// A seeded element with parts in each listed degree.
    pub fn random_element<R: Rng + ?Sized>(
        &self,
        degrees: &[i64],
        terms: usize,
        radius: i64,
        rng: &mut R,
    ) -> GradedElement {
        let mut out = GradedElement::zero(self.n());
        for &k in degrees {
            let flat = FourierElement::random(self.n(), terms, radius, rng);
            out.accumulate(k, self.power(k).from_flat(&flat).coords);
        }
        out
    }

    /// A seeded random element of `E`.
    pub fn random_module_element<R: Rng + ?Sized>(
        &self,
        terms: usize,
        radius: i64,
        rng: &mut R,
    ) -> ModuleElement {
        self.module
            .from_flat(&FourierElement::random(self.n(), terms, radius, rng))
    }

    /// Deviations from the four representation laws
    /// `S(xi)^* S(zeta) = <xi, zeta>_B`, `S(xi) b = S(xi b)`,
    /// `b S(xi) = S(b xi)` and `S(xi) S(zeta)^* = _B<xi, zeta>`.
    pub fn relation_residuals(
        &self,
        xi: &ModuleElement,
        zeta: &ModuleElement,
        b: &FourierElement,
    ) -> Result<RelationReport> {
        let e = &self.module;
        let bb = GradedElement::from_base(b.clone());
        let (sx, sz) = (self.s(1, xi), self.s(1, zeta));
        Ok(RelationReport {
            inner_right: self
                .multiply(&self.s_star(1, xi), &sz)
                .max_abs_diff(&GradedElement::from_base(e.inner_right(xi, zeta)?)),
            right_action: self.multiply(&sx, &bb).max_abs_diff(&self.s(1, &e.right_act(xi, b)?)),
            left_action: self.multiply(&bb, &sx).max_abs_diff(&self.s(1, &e.left_act(b, xi)?)),
            inner_left: self
                .multiply(&sx, &self.s_star(1, zeta))
                .max_abs_diff(&GradedElement::from_base(e.inner_left(xi, zeta)?)),
        })
    }

    /// `|(FG)H - F(GH)|`, or `None` when an intermediate product overflows.
    pub fn associativity_residual(&self, f: &GradedElement, g: &GradedElement, h: &GradedElement) -> Option<f64> {
        let fg = self.multiply(f, g);
        let gh = self.multiply(g, h);
        let l = self.multiply(&fg, h);
        let r = self.multiply(f, &gh);
        if fg.is_lossy() || gh.is_lossy() || l.is_lossy() || r.is_lossy() {
            return None;
        }
        Some(l.max_abs_diff(&r))
    }

    /// The sector space of `X (x)_B (l^2 (x) C^block_dim)` at cutoffs `(K, m)`.
    pub fn x_space(&self, m: usize, block_dim: usize) -> TruncatedOperator {
        let cutoff = Cutoff { k: self.k_max, m };
        TruncatedOperator::new(sector_grid(self.n(), cutoff), block_dim, cutoff)
    }

    /// Left multiplication by `F` on the orthonormal basis `U^k e_j (x) s`.
    pub fn represent_a(&self, f: &GradedElement, m: usize, block_dim: usize) -> TruncatedOperator {
        let space = self.x_space(m, block_dim);
        self.represent_on(f, &space)
    }

    /// As [`Gcp::represent_a`] on a given sector space with identity blocks.
    pub fn represent_on(&self, f: &GradedElement, space: &TruncatedOperator) -> TruncatedOperator {
        let block = CMatrix::identity(space.block_dim(), space.block_dim());
        self.represent_with_block(f, space, &block)
    }

    /// Left multiplication by `F` tensored with `block` on the spinor factor.
    pub fn represent_with_block(
        &self,
        f: &GradedElement,
        space: &TruncatedOperator,
        block: &CMatrix,
    ) -> TruncatedOperator {
        let x = self.to_crossed(f);
        let mut op = space.zeros_like();
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, s) in space.sectors().iter().enumerate() {
            by_degree.entry(s.degree).or_default().push(i);
        }
        for (q, g) in &x.parts {
            for (deg, cols) in &by_degree {
                // U^q g U^deg e_j = U^{q + deg} sigma^{-deg}(g) e_j
                let h = g.shift(self.sigma(), -deg);
                for &c in cols {
                    let src = &space.sectors()[c];
                    for (l, coef) in h.coeffs() {
                        let mode: Vec<i64> = src.mode.iter().zip(l).map(|(a, b)| a + b).collect();
                        if let Some(r) = space.sector_index(&Sector::new(deg + q, mode)) {
                            op.add_block(r, c, &(block * *coef));
                        }
                    }
                }
            }
        }
        op
    }

    /// The diagonal unitary `z^degree` implementing the gauge action on `X`.
    pub fn gauge_unitary(&self, z: C64, space: &TruncatedOperator) -> TruncatedOperator {
        let d = space.block_dim();
        let mut op = space.zeros_like();
        for i in 0..space.sectors().len() {
            let k = space.sectors()[i].degree;
            let s = if k >= 0 { z.powi(k as i32) } else { z.conj().powi((-k) as i32) };
            op.add_block(i, i, &(CMatrix::identity(d, d) * s));
        }
        op
    }
}
