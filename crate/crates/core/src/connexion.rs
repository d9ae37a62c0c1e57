//! Connexions on twisted bimodules, in frame coordinates.
//!
//! Component `j` acts by `nabla_j(v) = P (d_j v + Gamma_j v)` where `P` is the
//! frame projection and `Gamma_j` an `m x m` matrix over `B`. `Gamma = 0` is the
//! Grassmann connexion `sum_i xi_i d_j <xi_i, .>`.
//!
//! Components extend to derivations of the crossed product by the Leibniz rule
//! over tensor slots, and from there to a connexion on `X`.

use serde::Serialize;

use crate::base::{add_multiplication, dirac_h};
use crate::bimodule::{tensor_coords, Bimodule, ModuleElement};
use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::fourier::FourierElement;
use crate::gcp::{CrossedElement, Gcp, GradedElement};
use crate::operator::TruncatedOperator;
use crate::C64;

#[derive(Debug, Clone)]
pub struct Connexion {
    name: String,
    n: usize,
    m: usize,
    christoffel: Vec<Option<Vec<FourierElement>>>,
}

/// Largest residual of each connexion identity over a sample set.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ConnexionReport {
    pub right_leibniz: f64,
    pub left_leibniz: f64,
    pub right_hermitian: f64,
    pub left_hermitian: f64,
}

impl ConnexionReport {
    pub fn max(&self) -> f64 {
        self.right_leibniz
            .max(self.left_leibniz)
            .max(self.right_hermitian)
            .max(self.left_hermitian)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

impl Connexion {
    pub fn grassmann(e: &Bimodule) -> Self {
        Self {
            name: "grassmann".into(),
            n: e.n(),
            m: e.m(),
            christoffel: vec![None; e.n()],
        }
    }

    /// Adds `Gamma` (row-major `m x m` over `B`) to component `axis`.
    pub fn with_christoffel(mut self, axis: usize, gamma: Vec<FourierElement>) -> Result<Self> {
        if axis >= self.n {
            return Err(Error::AxisOutOfRange { axis, dim: self.n });
        }
        if gamma.len() != self.m * self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m * self.m,
                got: gamma.len(),
            });
        }
        self.christoffel[axis] = Some(gamma);
        self.name = format!("{}+christoffel", self.name);
        Ok(self)
    }

    /// Grassmann plus the module map `xi -> xi b0` on component `axis`.
    pub fn perturbed(e: &Bimodule, axis: usize, b0: &FourierElement) -> Result<Self> {
        let m = e.m();
        let gamma = (0..m * m)
            .map(|idx| {
                if idx / m == idx % m {
                    b0.clone()
                } else {
                    FourierElement::zero(e.n())
                }
            })
            .collect();
        let mut out = Self::grassmann(e).with_christoffel(axis, gamma)?;
        out.name = "perturbed".into();
        Ok(out)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `nabla_j(xi)` on the generating module `e`.
    pub fn apply(&self, e: &Bimodule, j: usize, xi: &ModuleElement) -> Result<ModuleElement> {
        if j >= self.n {
            return Err(Error::AxisOutOfRange { axis: j, dim: self.n });
        }
        if xi.len() != self.m || e.m() != self.m {
            return Err(Error::Incompatible("connexion and module frames differ".into()));
        }
        let mut v: Vec<FourierElement> = xi
            .coords
            .iter()
            .map(|c| c.derive(j))
            .collect::<Result<_>>()?;
        if let Some(g) = &self.christoffel[j] {
            for (r, vr) in v.iter_mut().enumerate() {
                for (c, xc) in xi.coords.iter().enumerate() {
                    *vr = &*vr + &(&g[r * self.m + c] * xc);
                }
            }
        }
        Ok(e.project(&v))
    }

    /// Residuals of the right and left Leibniz rules and of both Hermitian
    /// laws, over all sample elements, base elements and axes.
    pub fn check(
        &self,
        e: &Bimodule,
        samples: &[ModuleElement],
        bases: &[FourierElement],
    ) -> Result<ConnexionReport> {
        let mut rep = ConnexionReport {
            right_leibniz: 0.0,
            left_leibniz: 0.0,
            right_hermitian: 0.0,
            left_hermitian: 0.0,
        };
        for j in 0..self.n {
            for xi in samples {
                let nxi = self.apply(e, j, xi)?;
                for b in bases {
                    let db = b.derive(j)?;
                    let lhs = self.apply(e, j, &e.right_act(xi, b)?)?;
                    let rhs = &e.right_act(&nxi, b)? + &e.right_act(xi, &db)?;
                    rep.right_leibniz = rep.right_leibniz.max(lhs.max_abs_diff(&rhs));
                    let lhs = self.apply(e, j, &e.left_act(b, xi)?)?;
                    let rhs = &e.left_act(b, &nxi)? + &e.left_act(&db, xi)?;
                    rep.left_leibniz = rep.left_leibniz.max(lhs.max_abs_diff(&rhs));
                }
                for eta in samples {
                    let neta = self.apply(e, j, eta)?;
                    let lhs = &e.inner_right(xi, &neta)? + &e.inner_right(&nxi, eta)?;
                    let rhs = e.inner_right(xi, eta)?.derive(j)?;
                    rep.right_hermitian = rep.right_hermitian.max(lhs.max_abs_diff(&rhs));
                    let lhs = &e.inner_left(&nxi, eta)? + &e.inner_left(xi, &neta)?;
                    let rhs = e.inner_left(xi, eta)?.derive(j)?;
                    rep.left_hermitian = rep.left_hermitian.max(lhs.max_abs_diff(&rhs));
                }
            }
        }
        Ok(rep)
    }

    /// `nabla_j` on the `k`-th tensor power, by the Leibniz rule over slots.
    fn apply_power(&self, gcp: &Gcp, k: usize, coords: &[FourierElement], j: usize) -> Result<Vec<FourierElement>> {
        let e = gcp.module();
        if k == 1 {
            return Ok(self.apply(e, j, &ModuleElement::new(coords.to_vec()))?.coords);
        }
        let rest = gcp.power((k - 1) as i64);
        let inner = rest.m();
        let frame = e.frame();
        let sigma = e.sigma();
        let mut out = vec![FourierElement::zero(e.n()); coords.len()];
        for (i, xi) in frame.iter().enumerate() {
            let rho = rest.project(&coords[i * inner..(i + 1) * inner]);
            let nxi = self.apply(e, j, xi)?;
            let nrho = self.apply_power(gcp, k - 1, &rho.coords, j)?;
            let t1 = tensor_coords(sigma, &nxi.coords, &rho.coords, k - 1);
            let t2 = tensor_coords(sigma, &xi.coords, &nrho, k - 1);
            for ((o, a), b) in out.iter_mut().zip(t1).zip(t2) {
                *o = &(&*o + &a) + &b;
            }
        }
        Ok(out)
    }

    /// The derivation of the crossed product extending `d_j` on `B` and
    /// `nabla_j` on `E`.
    pub fn extend_derivation(&self, gcp: &Gcp, f: &GradedElement, j: usize) -> Result<GradedElement> {
        if f.is_lossy() {
            return Err(Error::InvalidParameter(
                "derivations extend only to untruncated algebraic elements".into(),
            ));
        }
        let mut out = GradedElement::zero(f.n());
        for (k, c) in f.parts() {
            let part = if *k == 0 {
                vec![c[0].derive(j)?]
            } else {
                self.apply_power(gcp, k.unsigned_abs() as usize, c, j)?
            };
            out = out.add(&GradedElement::homogeneous(f.n(), *k, part));
        }
        Ok(out)
    }

    /// `omega_j`, the flat value of `nabla_j` applied to the element `1`.
    pub fn omega(&self, e: &Bimodule, j: usize) -> Result<FourierElement> {
        let one = e.from_flat(&FourierElement::unit(e.n()));
        Ok(e.flatten(&self.apply(e, j, &one)?))
    }

    /// `w_k = sum_{r<k} sigma^{-r}(omega_j)` for `k >= 0`.
    pub fn degree_potential(&self, e: &Bimodule, j: usize, k: usize) -> Result<FourierElement> {
        let omega = self.omega(e, j)?;
        let mut w = FourierElement::zero(e.n());
        for r in 0..k {
            w = &w + &omega.shift(e.sigma(), -(r as i64));
        }
        Ok(w)
    }

    /// The potential acting on degree `k` in the crossed picture:
    /// `U^k g -> U^k (a_k g + d g)`.
    pub fn crossed_potential(&self, e: &Bimodule, j: usize, k: i64) -> Result<FourierElement> {
        let w = self.degree_potential(e, j, k.unsigned_abs() as usize)?;
        Ok(if k >= 0 {
            w
        } else {
            w.star().shift(e.sigma(), -k)
        })
    }

    /// The same derivation computed in the crossed picture.
    pub fn extend_derivation_crossed(&self, e: &Bimodule, x: &CrossedElement, j: usize) -> Result<CrossedElement> {
        let mut out = CrossedElement::zero(x.n, x.sigma.clone());
        for (k, g) in &x.parts {
            let a = self.crossed_potential(e, j, *k)?;
            let term = &(&a * g) + &g.derive(j)?;
            out = out.add(&CrossedElement::monomial(x.sigma.clone(), *k, term));
        }
        Ok(out)
    }
}

/// The connexion `sum_j nabla_j (x) gamma_j` on `X`.
#[derive(Debug, Clone)]
pub struct XConnexion<'a> {
    pub connexion: &'a Connexion,
    pub gcp: &'a Gcp,
    pub cl: &'a CliffordRep,
}

impl<'a> XConnexion<'a> {
    pub fn new(connexion: &'a Connexion, gcp: &'a Gcp, cl: &'a CliffordRep) -> Result<Self> {
        if cl.n() != gcp.n() || connexion.n() != gcp.n() {
            return Err(Error::DimensionMismatch {
                expected: gcp.n(),
                got: cl.n(),
            });
        }
        Ok(Self { connexion, gcp, cl })
    }

    pub fn component(&self, xi: &GradedElement, j: usize) -> Result<GradedElement> {
        self.connexion.extend_derivation(self.gcp, xi, j)
    }

    /// `| nabla(Xi b) - nabla(Xi) b - Xi d(b) |` over all components.
    pub fn connexion_law_residual(&self, xi: &GradedElement, b: &FourierElement) -> Result<f64> {
        let g = self.gcp;
        let bb = GradedElement::from_base(b.clone());
        let mut worst: f64 = 0.0;
        for j in 0..g.n() {
            let lhs = self.component(&g.multiply(xi, &bb), j)?;
            let rhs = g
                .multiply(&self.component(xi, j)?, &bb)
                .add(&g.multiply(xi, &GradedElement::from_base(b.derive(j)?)));
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        Ok(worst)
    }

    /// Operator form of the Hermitian law on the modes `|k| <= m`:
    /// `[D_h, <Xi1, Xi2>]` against `<Xi1, nabla Xi2> - <nabla Xi1, Xi2>`,
    /// where the pairing against `nabla Xi1` carries `gamma_j^* = -gamma_j`.
    pub fn hermitian_residual(&self, x1: &GradedElement, x2: &GradedElement, m: usize) -> Result<(TruncatedOperator, TruncatedOperator)> {
        let g = self.gcp;
        let d = dirac_h(g.n(), m, self.cl)?;
        let lhs = crate::base::commutator(&d, &g.x_inner(x1, x2))?;
        let mut rhs = d.zeros_like();
        for j in 0..g.n() {
            let plus = g.x_inner(x1, &self.component(x2, j)?);
            let minus = g.x_inner(&self.component(x1, j)?, x2);
            add_multiplication(&mut rhs, &plus, self.cl.gamma(j));
            add_multiplication(&mut rhs, &minus, &(self.cl.gamma(j).adjoint() * C64::new(-1.0, 0.0)));
        }
        Ok((lhs, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::interior;
    use crate::clifford::build_clifford;
    use crate::fourier::Shift;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn modules() -> Vec<Bimodule> {
        let sigma = Shift::new(vec![1, 0], 8).unwrap();
        let s = 0.5f64.sqrt();
        vec![
            Bimodule::trivial(2),
            Bimodule::new(
                sigma.clone(),
                vec![FourierElement::cos(&[1, 0]), FourierElement::sin(&[1, 0])],
                0,
            )
            .unwrap(),
            Bimodule::new(
                sigma,
                vec![
                    FourierElement::monomial(&[1, 0], c(s, 0.0)),
                    FourierElement::monomial(&[0, 1], c(0.0, s)),
                ],
                0,
            )
            .unwrap(),
        ]
    }

    fn samples(e: &Bimodule, rng: &mut ChaCha8Rng) -> (Vec<ModuleElement>, Vec<FourierElement>) {
        let xs = (0..3)
            .map(|_| e.from_flat(&FourierElement::random(2, 3, 2, rng)))
            .chain(e.frame())
            .collect();
        let bs = vec![
            FourierElement::monomial(&[1, 0], c(1.0, 0.0)),
            FourierElement::monomial(&[-1, 2], c(0.3, 0.4)),
        ];
        (xs, bs)
    }

    #[test]
    fn grassmann_on_trivial_module_is_the_derivative() {
        let e = Bimodule::trivial(2);
        let nabla = Connexion::grassmann(&e);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = FourierElement::random(2, 4, 2, &mut rng);
        for j in 0..2 {
            let out = nabla.apply(&e, j, &e.from_flat(&f)).unwrap();
            assert!(e.flatten(&out).max_abs_diff(&f.derive(j).unwrap()) < 1e-12);
        }
        let (xs, bs) = samples(&e, &mut rng);
        let rep = nabla.check(&e, &xs, &bs).unwrap();
        assert!(rep.max() < 1e-12, "{rep:?}");
    }

    #[test]
    fn grassmann_is_two_sided_hermitian_for_translations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for e in modules() {
            let nabla = Connexion::grassmann(&e);
            let (xs, bs) = samples(&e, &mut rng);
            let rep = nabla.check(&e, &xs, &bs).unwrap();
            assert!(rep.passes(1e-9), "{rep:?}");
        }
    }

    #[test]
    fn perturbation_breaks_only_hermiticity() {
        let e = &modules()[1];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b0 = FourierElement::unit(2);
        let nabla = Connexion::perturbed(e, 0, &b0).unwrap();
        let (xs, bs) = samples(e, &mut rng);
        let rep = nabla.check(e, &xs, &bs).unwrap();
        assert!(rep.right_leibniz < 1e-10);
        assert!(rep.left_leibniz < 1e-10);
        assert!(rep.right_hermitian > 0.1);
        assert!(rep.left_hermitian > 0.1);
        // an anti-selfadjoint perturbation keeps everything
        let ok = Connexion::perturbed(e, 1, &FourierElement::constant(2, c(0.0, 0.7))).unwrap();
        assert!(ok.check(e, &xs, &bs).unwrap().passes(1e-9));
    }

    #[test]
    fn derivation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for e in modules() {
            let gcp = Gcp::new(e.clone(), 3).unwrap();
            let nabla = Connexion::grassmann(&e);
            let one = GradedElement::unit(2);
            assert!(nabla.extend_derivation(&gcp, &one, 0).unwrap().max_abs() < 1e-15);
            let xi = gcp.random_module_element(3, 1, &mut rng);
            let zeta = gcp.random_module_element(3, 1, &mut rng);
            let p = gcp.multiply(&gcp.s_star(1, &xi), &gcp.s(1, &zeta));
            for j in 0..2 {
                let lhs = nabla.extend_derivation(&gcp, &p, j).unwrap();
                let ip = e.inner_right(&xi, &zeta).unwrap().derive(j).unwrap();
                assert!(gcp.cond_exp(&lhs).max_abs_diff(&ip) < 1e-10);
                let nxi = nabla.apply(&e, j, &xi).unwrap();
                let nzeta = nabla.apply(&e, j, &zeta).unwrap();
                let split = &e.inner_right(&nxi, &zeta).unwrap() + &e.inner_right(&xi, &nzeta).unwrap();
                assert!(split.max_abs_diff(&ip) < 1e-10);
            }
        }
    }

    #[test]
    fn derivation_leibniz_star_and_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for e in modules() {
            let gcp = Gcp::new(e.clone(), 3).unwrap();
            let nabla = Connexion::grassmann(&e);
            for _ in 0..3 {
                let f = gcp.random_element(&[-1, 0, 1], 2, 1, &mut rng);
                let g = gcp.random_element(&[-1, 0, 2], 2, 1, &mut rng);
                for j in 0..2 {
                    let fg = gcp.multiply(&f, &g);
                    let lhs = nabla.extend_derivation(&gcp, &fg, j).unwrap();
                    let rhs = gcp
                        .multiply(&nabla.extend_derivation(&gcp, &f, j).unwrap(), &g)
                        .add(&gcp.multiply(&f, &nabla.extend_derivation(&gcp, &g, j).unwrap()));
                    assert!(lhs.max_abs_diff(&rhs) < 1e-9);
                    let df = nabla.extend_derivation(&gcp, &f, j).unwrap();
                    assert_eq!(
                        nabla.extend_derivation(&gcp, &gcp.star(&f), j).unwrap(),
                        gcp.star(&df)
                    );
                    assert!(df.degrees().iter().all(|k| f.degrees().contains(k)));
                }
            }
            let b = FourierElement::random(2, 3, 2, &mut rng);
            assert_eq!(
                nabla
                    .extend_derivation(&gcp, &GradedElement::from_base(b.clone()), 1)
                    .unwrap(),
                GradedElement::from_base(b.derive(1).unwrap())
            );
        }
    }

    #[test]
    fn crossed_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for e in modules() {
            let gcp = Gcp::new(e.clone(), 3).unwrap();
            for nabla in [
                Connexion::grassmann(&e),
                Connexion::perturbed(&e, 0, &FourierElement::constant(2, c(0.0, 0.4))).unwrap(),
            ] {
                let f = gcp.random_element(&[-3, -1, 0, 2, 3], 2, 1, &mut rng);
                for j in 0..2 {
                    let a = gcp.to_crossed(&nabla.extend_derivation(&gcp, &f, j).unwrap());
                    let b = nabla.extend_derivation_crossed(&e, &gcp.to_crossed(&f), j).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn nontrivial_omega_for_character_frames() {
        let e = &modules()[2];
        let nabla = Connexion::grassmann(e);
        let w = nabla.omega(e, 0).unwrap();
        // omega = sum_i u_i d(u_i^*) = -pi i on the first axis
        assert!(w.max_abs_diff(&FourierElement::constant(2, c(0.0, -std::f64::consts::PI))) < 1e-12);
        assert!(nabla.omega(&modules()[1], 0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn lossy_input_rejected() {
        let e = &modules()[1];
        let gcp = Gcp::new(e.clone(), 1).unwrap();
        let nabla = Connexion::grassmann(e);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = gcp.random_element(&[1], 2, 1, &mut rng);
        let ff = gcp.multiply(&f, &f);
        assert!(nabla.extend_derivation(&gcp, &ff, 0).is_err());
    }

    #[test]
    fn x_connexion_laws() {
        let cl = build_clifford(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for e in modules() {
            let gcp = Gcp::new(e.clone(), 2).unwrap();
            let nabla = Connexion::grassmann(&e);
            let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
            let b = FourierElement::monomial(&[1, 0], c(1.0, 0.0));
            let xi = gcp.random_module_element(3, 1, &mut rng);
            assert!(x.connexion_law_residual(&gcp.s(1, &xi), &b).unwrap() < 1e-9);
            let f = gcp.random_element(&[0], 3, 1, &mut rng);
            for j in 0..2 {
                let comp = x.component(&f, j).unwrap();
                assert_eq!(comp, GradedElement::from_base(gcp.cond_exp(&f).derive(j).unwrap()));
            }
            for k in [-2i64, -1, 0, 1, 2] {
                let x1 = gcp.random_element(&[k], 2, 1, &mut rng);
                let x2 = gcp.random_element(&[k], 2, 1, &mut rng);
                let m = 6;
                let (lhs, rhs) = x.hermitian_residual(&x1, &x2, m).unwrap();
                // D_h is diagonal in the modes, so both sides compress exactly
                assert!(lhs.max_diff_on(&rhs, interior(m, 0)).unwrap() < 1e-9, "k = {k}");
            }
        }
    }
}
