//! Twisted Hilbert bimodules over the torus algebra and their tensor powers.
//!
//! A bimodule here is the right module `B` presented by a finite family
//! `u_1, ..., u_m` with `sum_i u_i^* u_i = 1`. An element `f` is stored by its
//! frame coordinates `v_i = u_i^* f`, which lie in the range of the projection
//! `P_ij = u_i^* u_j`. The left action is twisted by a translation `sigma`:
//! `b . xi = xi sigma^{-1}(b)` and `_B<xi, eta> = sigma(<eta, xi>_B)`.
//!
//! The `k`-th tensor power is again of this form, with the twist `sigma^k` and
//! the generators `u_I = prod_l sigma^{-(k-l)}(u_{i_l})` for multi-indices `I`
//! (first slot most significant).

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::fourier::{FourierElement, Shift};
use crate::C64;

/// Frame coordinates of a module element.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    pub coords: Vec<FourierElement>,
}

impl ModuleElement {
    pub fn new(coords: Vec<FourierElement>) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize, len: usize) -> Self {
        Self {
            coords: vec![FourierElement::zero(n); len],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Componentwise right multiplication.
    pub fn times(&self, b: &FourierElement) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * b).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&FourierElement) -> FourierElement) -> Self {
        Self {
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

impl Add for &ModuleElement {
    type Output = ModuleElement;
    fn add(self, rhs: &ModuleElement) -> ModuleElement {
        assert_eq!(self.len(), rhs.len(), "module element length");
        ModuleElement {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ModuleElement {
    type Output = ModuleElement;
    fn sub(self, rhs: &ModuleElement) -> ModuleElement {
        assert_eq!(self.len(), rhs.len(), "module element length");
        ModuleElement {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Bimodule {
    n: usize,
    sigma: Shift,
    degree: usize,
    base_gens: Vec<FourierElement>,
    gens: Vec<FourierElement>,
}

/// Coordinates of `xi (x) zeta` for `zeta` in the `l`-th tensor power:
/// `sigma^{-l}(c_I) d_J`.
pub fn tensor_coords(
    sigma: &Shift,
    c: &[FourierElement],
    d: &[FourierElement],
    l: usize,
) -> Vec<FourierElement> {
    let shifted: Vec<FourierElement> = c.iter().map(|x| x.shift(sigma, -(l as i64))).collect();
    shifted
        .iter()
        .flat_map(|ci| d.iter().map(move |dj| ci * dj))
        .collect()
}

fn power_gens(n: usize, sigma: &Shift, base: &[FourierElement], k: usize) -> Vec<FourierElement> {
    let mut gens = vec![FourierElement::unit(n)];
    // appending a slot on the right shifts the existing word once
    for _ in 0..k {
        gens = tensor_coords(sigma, &gens, base, 1);
    }
    gens
}

impl Bimodule {
    /// The module given by the generators `u_i` and the translation `sigma`.
    /// A nonzero `twist` asks for a nontrivial line bundle, which this Fourier
    /// model does not carry; the grid model handles that case.
    pub fn new(sigma: Shift, generators: Vec<FourierElement>, twist: i64) -> Result<Self> {
        if twist != 0 {
            return Err(Error::InvalidParameter(format!(
                "twist degree {twist} is only available on the grid model"
            )));
        }
        let n = sigma.n();
        if generators.is_empty() {
            return Err(Error::InvalidParameter("a frame needs at least one generator".into()));
        }
        for g in &generators {
            if g.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.n(),
                });
            }
        }
        let mut total = FourierElement::zero(n);
        for g in &generators {
            total = &total + &(&g.star() * g);
        }
        let dev = total.max_abs_diff(&FourierElement::unit(n));
        if dev > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "generators do not satisfy sum u_i^* u_i = 1 (deviation {dev:e})"
            )));
        }
        Ok(Self {
            n,
            sigma,
            degree: 1,
            gens: generators.clone(),
            base_gens: generators,
        })
    }

    /// `B` itself with the trivial frame `{1}` and no twist.
    pub fn trivial(n: usize) -> Self {
        Self::new(Shift::zero(n), vec![FourierElement::unit(n)], 0).expect("trivial frame")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &Shift {
        &self.sigma
    }

    /// Tensor degree over the generating bimodule.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Size of the frame.
    pub fn m(&self) -> usize {
        self.gens.len()
    }

    /// Number of generators of the degree-one module.
    pub fn rank(&self) -> usize {
        self.base_gens.len()
    }

    pub fn generators(&self) -> &[FourierElement] {
        &self.gens
    }

    pub fn base_generators(&self) -> &[FourierElement] {
        &self.base_gens
    }

    /// The `k`-th tensor power; `k = 0` gives `B` with the frame `{1}`.
    pub fn tensor_power(&self, k: usize) -> Self {
        let degree = self.degree * k;
        Self {
            n: self.n,
            sigma: self.sigma.clone(),
            degree,
            base_gens: self.base_gens.clone(),
            gens: power_gens(self.n, &self.sigma, &self.base_gens, degree),
        }
    }

    pub fn same_module(&self, other: &Self) -> bool {
        self.n == other.n
            && self.sigma == other.sigma
            && self.degree == other.degree
            && self.base_gens == other.base_gens
    }

    fn check(&self, xi: &ModuleElement) -> Result<()> {
        if xi.len() != self.m() {
            return Err(Error::Incompatible(format!(
                "element has {} coordinates, module frame has {}",
                xi.len(),
                self.m()
            )));
        }
        Ok(())
    }

    /// Coordinates of the element whose flat value is `f`.
    pub fn from_flat(&self, f: &FourierElement) -> ModuleElement {
        ModuleElement::new(self.gens.iter().map(|u| &u.star() * f).collect())
    }

    /// `sum_I u_I v_I`.
    pub fn flatten(&self, xi: &ModuleElement) -> FourierElement {
        let mut out = FourierElement::zero(self.n);
        for (u, v) in self.gens.iter().zip(&xi.coords) {
            out = &out + &(u * v);
        }
        out
    }

    /// `P v` for an arbitrary coordinate vector.
    pub fn project(&self, v: &[FourierElement]) -> ModuleElement {
        let mut f = FourierElement::zero(self.n);
        for (u, c) in self.gens.iter().zip(v) {
            f = &f + &(u * c);
        }
        self.from_flat(&f)
    }

    /// The frame elements, whose flat values are the generators.
    pub fn frame(&self) -> Vec<ModuleElement> {
        self.gens.iter().map(|u| self.from_flat(u)).collect()
    }

    /// `<xi, eta>_B = sum_i xi_i^* eta_i`.
    pub fn inner_right(&self, xi: &ModuleElement, eta: &ModuleElement) -> Result<FourierElement> {
        self.check(xi)?;
        self.check(eta)?;
        let mut out = FourierElement::zero(self.n);
        for (a, b) in xi.coords.iter().zip(&eta.coords) {
            out = &out + &(&a.star() * b);
        }
        Ok(out)
    }

    /// `_B<xi, eta> = sigma^k(<eta, xi>_B)`.
    pub fn inner_left(&self, xi: &ModuleElement, eta: &ModuleElement) -> Result<FourierElement> {
        Ok(self
            .inner_right(eta, xi)?
            .shift(&self.sigma, self.degree as i64))
    }

    /// `b . xi = xi sigma^{-k}(b)`.
    pub fn left_act(&self, b: &FourierElement, xi: &ModuleElement) -> Result<ModuleElement> {
        self.check(xi)?;
        Ok(xi.times(&b.shift(&self.sigma, -(self.degree as i64))))
    }

    pub fn right_act(&self, xi: &ModuleElement, b: &FourierElement) -> Result<ModuleElement> {
        self.check(xi)?;
        Ok(xi.times(b))
    }

    /// `xi (x) zeta` for `xi` here and `zeta` in `other`, as an element of the
    /// combined tensor power.
    pub fn tensor(
        &self,
        xi: &ModuleElement,
        other: &Bimodule,
        zeta: &ModuleElement,
    ) -> Result<ModuleElement> {
        self.check(xi)?;
        other.check(zeta)?;
        if other.sigma != self.sigma || other.base_gens != self.base_gens {
            return Err(Error::Incompatible("tensor factors over different modules".into()));
        }
        Ok(ModuleElement::new(tensor_coords(
            &self.sigma,
            &xi.coords,
            &zeta.coords,
            other.degree,
        )))
    }

    /// `| sum_j xi_j <xi_j, eta> - eta |` over the given samples.
    pub fn frame_residual(&self, samples: &[ModuleElement]) -> Result<f64> {
        let frame = self.frame();
        let mut worst: f64 = 0.0;
        for eta in samples {
            let mut acc = ModuleElement::zero(self.n, self.m());
            for xi in &frame {
                acc = &acc + &xi.times(&self.inner_right(xi, eta)?);
            }
            worst = worst.max(acc.max_abs_diff(eta));
        }
        Ok(worst)
    }

    /// `| _B<xi, eta> zeta - xi <eta, zeta>_B |`.
    pub fn compatibility_residual(
        &self,
        xi: &ModuleElement,
        eta: &ModuleElement,
        zeta: &ModuleElement,
    ) -> Result<f64> {
        let lhs = self.left_act(&self.inner_left(xi, eta)?, zeta)?;
        let rhs = xi.times(&self.inner_right(eta, zeta)?);
        Ok(lhs.max_abs_diff(&rhs))
    }

    /// Largest distance of the coordinates from the range of the projection.
    pub fn range_residual(&self, xi: &ModuleElement) -> Result<f64> {
        self.check(xi)?;
        Ok(self.project(&xi.coords).max_abs_diff(xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::represent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn twisted() -> Bimodule {
        let sigma = Shift::new(vec![1, 0], 8).unwrap();
        Bimodule::new(
            sigma,
            vec![FourierElement::cos(&[1, 0]), FourierElement::sin(&[1, 0])],
            0,
        )
        .unwrap()
    }

    fn random_elem(e: &Bimodule, rng: &mut ChaCha8Rng) -> ModuleElement {
        e.from_flat(&FourierElement::random(e.n(), 4, 2, rng))
    }

    #[test]
    fn rejects_bad_frames_and_twists() {
        let s = Shift::zero(2);
        assert!(Bimodule::new(s.clone(), vec![FourierElement::constant(2, c(0.5, 0.0))], 0).is_err());
        assert!(Bimodule::new(s.clone(), vec![], 0).is_err());
        assert!(Bimodule::new(s, vec![FourierElement::unit(2)], 1).is_err());
    }

    #[test]
    fn trivial_module_inner_product() {
        let e = Bimodule::trivial(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = FourierElement::random(2, 4, 2, &mut rng);
        let b = FourierElement::random(2, 4, 2, &mut rng);
        let ip = e.inner_right(&e.from_flat(&a), &e.from_flat(&b)).unwrap();
        assert!(ip.max_abs_diff(&(&a.star() * &b)) < 1e-14);
        let il = e.inner_left(&e.from_flat(&a), &e.from_flat(&b)).unwrap();
        assert!(il.max_abs_diff(&e.inner_right(&e.from_flat(&b), &e.from_flat(&a)).unwrap()) < 1e-15);
    }

    #[test]
    fn right_linearity() {
        let e = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xi = random_elem(&e, &mut rng);
        let b = FourierElement::random(2, 3, 2, &mut rng);
        let lhs = e.inner_right(&xi, &xi.times(&b)).unwrap();
        let rhs = &e.inner_right(&xi, &xi).unwrap() * &b;
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn frame_generators_sum_to_one() {
        let e = twisted();
        let f = e.frame();
        let total = &e.inner_right(&f[0], &f[0]).unwrap() + &e.inner_right(&f[1], &f[1]).unwrap();
        assert!(total.max_abs_diff(&FourierElement::unit(2)) < 1e-14);
    }

    #[test]
    fn left_inner_product_phases() {
        // e_k v with v = 1: <e_k, e_k> = 1, so rotate a non-constant pairing instead
        let e = twisted();
        let k = [2i64, 1];
        let xi = e.from_flat(&FourierElement::monomial(&k, c(1.0, 0.0)));
        let eta = e.from_flat(&FourierElement::unit(2));
        let right = e.inner_right(&eta, &xi).unwrap();
        let left = e.inner_left(&xi, &eta).unwrap();
        for (mode, coef) in right.coeffs() {
            let phase = crate::e(-(mode[0] as f64) / 8.0);
            assert!((left.get(mode) - coef * phase).norm() < 1e-14);
        }
        assert!((left.get(&k) - crate::e(-2.0 / 8.0)).norm() < 1e-14);
    }

    #[test]
    fn compatibility_and_frame_on_powers() {
        let e = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in 1..=3 {
            let p = e.tensor_power(k);
            assert_eq!(p.m(), 2usize.pow(k as u32));
            let samples: Vec<ModuleElement> = (0..4).map(|_| random_elem(&p, &mut rng)).collect();
            assert!(p.frame_residual(&samples).unwrap() < 1e-10, "k = {k}");
            for w in samples.windows(3) {
                assert!(p.compatibility_residual(&w[0], &w[1], &w[2]).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn power_zero_and_one() {
        let e = twisted();
        let p0 = e.tensor_power(0);
        assert_eq!(p0.m(), 1);
        assert_eq!(p0.generators()[0], FourierElement::unit(2));
        let p1 = e.tensor_power(1);
        assert!(p1.same_module(&e));
        let b = Bimodule::trivial(2);
        for k in 0..4 {
            assert_eq!(b.tensor_power(k).generators(), &[FourierElement::unit(2)]);
        }
    }

    #[test]
    fn left_action_moves_through_tensors() {
        // (xi1 (x) xi2) . sigma^{-2}(b) = xi1 (x) (xi2 . sigma^{-2}(b)) and
        // b . (xi1 (x) xi2) = (b . xi1) (x) xi2
        let e = twisted();
        let e2 = e.tensor_power(2);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x1 = random_elem(&e, &mut rng);
        let x2 = random_elem(&e, &mut rng);
        let b = FourierElement::random(2, 3, 2, &mut rng);
        let lhs = e2.left_act(&b, &e.tensor(&x1, &e, &x2).unwrap()).unwrap();
        let rhs = e.tensor(&e.left_act(&b, &x1).unwrap(), &e, &x2).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let via = e
            .tensor(&x1, &e, &x2.times(&b.shift(e.sigma(), -2)))
            .unwrap();
        assert!(lhs.max_abs_diff(&via) < 1e-12);
    }

    #[test]
    fn tensor_inner_product_contracts_right_to_left() {
        let e = twisted();
        let e2 = e.tensor_power(2);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (a, b, a2, b2) = (
            random_elem(&e, &mut rng),
            random_elem(&e, &mut rng),
            random_elem(&e, &mut rng),
            random_elem(&e, &mut rng),
        );
        let lhs = e2
            .inner_right(&e.tensor(&a, &e, &b).unwrap(), &e.tensor(&a2, &e, &b2).unwrap())
            .unwrap();
        let inner = e.left_act(&e.inner_right(&a, &a2).unwrap(), &b2).unwrap();
        let rhs = e.inner_right(&b, &inner).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn inner_products_are_hermitian_and_positive() {
        let e = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..5 {
            let xi = random_elem(&e, &mut rng);
            let eta = random_elem(&e, &mut rng);
            assert_eq!(
                e.inner_right(&xi, &eta).unwrap().star(),
                e.inner_right(&eta, &xi).unwrap()
            );
            let l1 = e.inner_left(&xi, &eta).unwrap().star();
            let l2 = e.inner_left(&eta, &xi).unwrap();
            assert!(l1.max_abs_diff(&l2) < 1e-15);
            let pos = represent(&e.inner_right(&xi, &xi).unwrap(), 6, 1);
            let min = pos.eigenvalues().unwrap()[0];
            assert!(min >= -1e-10, "min eigenvalue {min}");
        }
    }

    #[test]
    fn unit_acts_trivially() {
        let e = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let xi = random_elem(&e, &mut rng);
        assert!(e.left_act(&FourierElement::unit(2), &xi).unwrap().max_abs_diff(&xi) < 1e-15);
        assert!(e.range_residual(&xi).unwrap() < 1e-14);
        let untwisted = Bimodule::new(Shift::zero(2), e.base_generators().to_vec(), 0).unwrap();
        let b = FourierElement::random(2, 3, 1, &mut rng);
        assert_eq!(
            untwisted.left_act(&b, &xi).unwrap(),
            untwisted.right_act(&xi, &b).unwrap()
        );
    }
}
