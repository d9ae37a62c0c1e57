//! The lifted operator on `X (x)_B (H_0 (x) S)` and its truncation ladders.
//!
//! The sector `(k, l)` stands for the vector `U^k (x) e_l`. The vertical
//! operator multiplies degree `k` by `k`. The horizontal part `1 (x)_nabla D_h`
//! acts on degree `k` as `D_h + sum_i pi(a_{k,i}) (x) gamma_i`, where `a_{k,i}`
//! is the crossed potential of the connexion. It preserves the degree, so the
//! whole operator is block diagonal in `k`.

use serde::{Deserialize, Serialize};

use crate::base::dirac_block;
use crate::bimodule::Bimodule;
use crate::clifford::CliffordRep;
use crate::connexion::{Connexion, XConnexion};
use crate::error::{Error, Result};
use crate::gcp::{Gcp, GradedElement};
use crate::operator::{sector_grid, Cutoff, Sector, TruncatedOperator};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    OddEven,
    OddOdd,
}

/// Where an assembled lift came from.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub connexion: String,
    pub sigma: Vec<f64>,
    pub module_rank: usize,
    pub clifford_n: usize,
}

#[derive(Debug, Clone)]
pub struct LiftedTriple {
    pub operator: TruncatedOperator,
    pub parity: Parity,
    pub cutoff: Cutoff,
    pub provenance: Provenance,
}

/// Norms of one quantity along a truncation ladder.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub rungs: Vec<Cutoff>,
    pub norms: Vec<f64>,
    /// `(max - min) / max`, zero when every norm vanishes.
    pub variation: f64,
}

impl StabilityReport {
    pub fn new(rungs: Vec<Cutoff>, norms: Vec<f64>) -> Self {
        let hi = norms.iter().copied().fold(0.0, f64::max);
        let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let variation = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        Self { rungs, norms, variation }
    }

    pub fn stable(&self, tol: f64) -> bool {
        self.variation < tol
    }
}

fn x_sectors(n: usize, cutoff: Cutoff, block_dim: usize) -> TruncatedOperator {
    TruncatedOperator::new(sector_grid(n, cutoff), block_dim, cutoff)
}

/// `D_v`: degree `k` times the identity, on `n` torus directions.
pub fn vertical_op(n: usize, cutoff: Cutoff, block_dim: usize) -> TruncatedOperator {
    let mut op = x_sectors(n, cutoff, block_dim);
    for i in 0..op.sectors().len() {
        let k = op.sectors()[i].degree;
        if k != 0 {
            op.add_block(i, i, &(CMatrix::identity(block_dim, block_dim) * C64::new(k as f64, 0.0)));
        }
    }
    op
}

/// `D_v (x) gamma` for the grading of `cl`.
pub fn vertical_graded(cutoff: Cutoff, cl: &CliffordRep) -> Result<TruncatedOperator> {
    let g = cl
        .grading()
        .ok_or_else(|| Error::InvalidParameter("the horizontal triple carries no grading".into()))?;
    let mut op = x_sectors(cl.n(), cutoff, cl.dim_s());
    for i in 0..op.sectors().len() {
        let k = op.sectors()[i].degree;
        if k != 0 {
            op.add_block(i, i, &(g * C64::new(k as f64, 0.0)));
        }
    }
    Ok(op)
}

/// `1 (x)_nabla D_h` on the modes `|l|_inf <= m` and the degrees of the GCP.
pub fn one_tensor_nabla(x: &XConnexion, m: usize) -> Result<TruncatedOperator> {
    let g = x.gcp;
    let cutoff = Cutoff { k: g.k_max(), m };
    let mut op = x_sectors(g.n(), cutoff, x.cl.dim_s());
    let kk = g.k_max() as i64;
    for k in -kk..=kk {
        let pots = (0..g.n())
            .map(|j| x.connexion.crossed_potential(g.module(), j, k))
            .collect::<Result<Vec<_>>>()?;
        for c in 0..op.sectors().len() {
            let src = op.sectors()[c].clone();
            if src.degree != k {
                continue;
            }
            op.add_block(c, c, &dirac_block(&src.mode, x.cl));
            for (j, a) in pots.iter().enumerate() {
                for (l, coef) in a.coeffs() {
                    let mode: Vec<i64> = src.mode.iter().zip(l).map(|(p, q)| p + q).collect();
                    if let Some(r) = op.sector_index(&Sector::new(k, mode)) {
                        op.add_block(r, c, &(x.cl.gamma(j) * *coef));
                    }
                }
            }
        }
    }
    Ok(op)
}

fn provenance(x: &XConnexion) -> Provenance {
    Provenance {
        connexion: x.connexion.name().to_string(),
        sigma: x.gcp.sigma().as_f64(),
        module_rank: x.gcp.module().m(),
        clifford_n: x.cl.n(),
    }
}

/// `D_v (x) gamma + 1 (x)_nabla D_h`.
pub fn lift_odd_even(x: &XConnexion, m: usize) -> Result<LiftedTriple> {
    let cutoff = Cutoff { k: x.gcp.k_max(), m };
    let operator = vertical_graded(cutoff, x.cl)?.add(&one_tensor_nabla(x, m)?)?;
    Ok(LiftedTriple {
        operator,
        parity: Parity::OddEven,
        cutoff,
        provenance: provenance(x),
    })
}

/// `[[0, T^*], [T, 0]]` with `T = D_v (x) 1 + i (1 (x)_nabla D_h)`, on the
/// doubled spinor space graded by `diag(1, -1)`.
pub fn lift_odd_odd(x: &XConnexion, m: usize) -> Result<LiftedTriple> {
    let d = x.cl.dim_s();
    let cutoff = Cutoff { k: x.gcp.k_max(), m };
    let t = vertical_op(x.gcp.n(), cutoff, d).add(&one_tensor_nabla(x, m)?.scale(C64::new(0.0, 1.0)))?;
    let mut operator = x_sectors(x.gcp.n(), cutoff, 2 * d);
    for (&(r, c), b) in t.blocks() {
        let mut lower = CMatrix::zeros(2 * d, 2 * d);
        lower.view_mut((d, 0), (d, d)).copy_from(b);
        operator.add_block(r, c, &lower);
        let mut upper = CMatrix::zeros(2 * d, 2 * d);
        upper.view_mut((0, d), (d, d)).copy_from(&b.adjoint());
        operator.add_block(c, r, &upper);
    }
    Ok(LiftedTriple {
        operator,
        parity: Parity::OddOdd,
        cutoff,
        provenance: provenance(x),
    })
}

/// `diag(1, -1)` on the doubled space of an odd-odd lift.
pub fn doubled_grading(like: &TruncatedOperator) -> TruncatedOperator {
    let d = like.block_dim() / 2;
    let mut g = CMatrix::identity(2 * d, 2 * d);
    for i in d..2 * d {
        g[(i, i)] = C64::new(-1.0, 0.0);
    }
    let mut op = like.zeros_like();
    for i in 0..op.sectors().len() {
        op.add_block(i, i, &g);
    }
    op
}

impl LiftedTriple {
    /// Left multiplication by `F` on this lift's space.
    pub fn represent(&self, gcp: &Gcp, f: &GradedElement) -> TruncatedOperator {
        gcp.represent_on(f, &self.operator)
    }

    /// `[L, F]` on the columns whose image is computed without truncation.
    pub fn commutator(&self, gcp: &Gcp, f: &GradedElement, margin: Margin) -> Result<TruncatedOperator> {
        let comm = self.operator.commutator(&self.represent(gcp, f))?;
        Ok(comm.restrict_rows_cols(|_| true, margin.columns(self.cutoff)))
    }

    /// `T_xi D_h - L T_xi` on the degree-zero columns, where `T_xi` is left
    /// multiplication by `xi`. The degree-zero block of `L` is `D_h`.
    pub fn kucerovsky_corner(&self, gcp: &Gcp, xi: &GradedElement, margin: Margin) -> Result<TruncatedOperator> {
        let t = self.represent(gcp, xi);
        let corner = t.matmul(&self.operator)?.sub(&self.operator.matmul(&t)?)?;
        let cols = margin.columns(self.cutoff);
        Ok(corner.restrict_rows_cols(|_| true, move |s| s.degree == 0 && cols(s)))
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        spectrum(&self.operator)
    }
}

/// How far an element reaches, in degree and in modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Margin {
    pub degree: i64,
    pub modes: i64,
}

impl Margin {
    /// Reach of `F` in the crossed picture plus the reach of the potentials.
    pub fn of(gcp: &Gcp, connexion: &Connexion, f: &GradedElement) -> Result<Self> {
        let x = gcp.to_crossed(f);
        let degree = x.parts.keys().map(|k| k.abs()).max().unwrap_or(0);
        let radius = x.parts.values().map(|g| g.support_radius()).max().unwrap_or(0);
        let kk = gcp.k_max() as i64;
        let mut pot = 0;
        for k in -kk..=kk {
            for j in 0..gcp.n() {
                pot = pot.max(connexion.crossed_potential(gcp.module(), j, k)?.support_radius());
            }
        }
        Ok(Self { degree, modes: radius + pot })
    }

    fn columns(self, cutoff: Cutoff) -> impl Fn(&Sector) -> bool {
        move |s: &Sector| {
            s.degree.abs() + self.degree <= cutoff.k as i64 && s.mode_radius() + self.modes <= cutoff.m as i64
        }
    }
}

/// Builds the lift at every rung and records the norm of `[L, F]`.
pub fn commutator_ladder(
    module: &Bimodule,
    connexion: &Connexion,
    cl: &CliffordRep,
    parity: Parity,
    ladder: &[Cutoff],
    f: &GradedElement,
) -> Result<StabilityReport> {
    ladder_norms(module, connexion, cl, parity, ladder, |l, g, margin| {
        l.commutator(g, f, margin(f)?)
    })
}

/// Builds the lift at every rung and records the norm of the degree-zero
/// corner of `T_xi D_h - L T_xi`.
pub fn kucerovsky_ladder(
    module: &Bimodule,
    connexion: &Connexion,
    cl: &CliffordRep,
    parity: Parity,
    ladder: &[Cutoff],
    xi: &GradedElement,
) -> Result<StabilityReport> {
    ladder_norms(module, connexion, cl, parity, ladder, |l, g, margin| {
        l.kucerovsky_corner(g, xi, margin(xi)?)
    })
}

fn ladder_norms(
    module: &Bimodule,
    connexion: &Connexion,
    cl: &CliffordRep,
    parity: Parity,
    ladder: &[Cutoff],
    op: impl Fn(&LiftedTriple, &Gcp, &dyn Fn(&GradedElement) -> Result<Margin>) -> Result<TruncatedOperator>,
) -> Result<StabilityReport> {
    if ladder.is_empty() {
        return Err(Error::InvalidParameter("empty truncation ladder".into()));
    }
    let mut norms = Vec::with_capacity(ladder.len());
    for rung in ladder {
        let gcp = Gcp::new(module.clone(), rung.k)?;
        let x = XConnexion::new(connexion, &gcp, cl)?;
        let lift = match parity {
            Parity::OddEven => lift_odd_even(&x, rung.m)?,
            Parity::OddOdd => lift_odd_odd(&x, rung.m)?,
        };
        let margin = |f: &GradedElement| Margin::of(&gcp, connexion, f);
        norms.push(op(&lift, &gcp, &margin)?.norm());
    }
    Ok(StabilityReport::new(ladder.to_vec(), norms))
}

/// Sorted eigenvalues; non-selfadjoint input is rejected.
pub fn spectrum(op: &TruncatedOperator) -> Result<Vec<f64>> {
    op.eigenvalues()
}

/// `sum_lambda exp(-t lambda^2)` for each `t`.
pub fn heat_trace(eigenvalues: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::InvalidParameter(format!("heat time must be positive, got {t}")));
            }
            Ok(eigenvalues.iter().map(|l| (-t * l * l).exp()).sum())
        })
        .collect()
}

/// `#{ |lambda| <= cap }`.
pub fn counting(eigenvalues: &[f64], cap: f64) -> usize {
    eigenvalues.iter().filter(|l| l.abs() <= cap).count()
}

/// Least-squares slope of `log N(L)` against `log L` for `points` geometric
/// values of `L` in `[lo, hi]`.
pub fn weyl_exponent(eigenvalues: &[f64], lo: f64, hi: f64, points: usize) -> Result<f64> {
    if !(lo > 0.0 && hi > lo) || points < 2 {
        return Err(Error::InvalidParameter("need 0 < lo < hi and at least two points".into()));
    }
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let cap = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
        let count = counting(eigenvalues, cap);
        if count == 0 {
            return Err(Error::InvalidParameter(format!("no eigenvalues below {cap}")));
        }
        xs.push(cap.ln());
        ys.push((count as f64).ln());
    }
    let mx = xs.iter().sum::<f64>() / points as f64;
    let my = ys.iter().sum::<f64>() / points as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::dirac_h;
    use crate::clifford::build_clifford;
    use crate::fourier::{FourierElement, Shift};
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn flat_spectrum(n: usize, k: i64, m: i64, mult: usize) -> Vec<f64> {
        let modes = crate::operator::mode_box(n, m as usize);
        let mut out = Vec::new();
        for d in -k..=k {
            for l in &modes {
                let q: i64 = l.iter().map(|a| a * a).sum();
                let lam = ((d * d) as f64 + TAU * TAU * q as f64).sqrt();
                for _ in 0..mult {
                    out.push(lam);
                    out.push(-lam);
                }
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    fn twisted() -> Bimodule {
        let s = 0.5f64.sqrt();
        Bimodule::new(
            Shift::new(vec![1, 0], 8).unwrap(),
            vec![
                FourierElement::monomial(&[1, 0], c(s, 0.0)),
                FourierElement::monomial(&[0, 1], c(0.0, s)),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn vertical_operator_multiplies_by_the_degree() {
        let cutoff = Cutoff { k: 3, m: 1 };
        let v = vertical_op(2, cutoff, 2);
        let idx = v.sector_index(&Sector::new(3, vec![0, 1])).unwrap();
        assert_eq!(v.block(idx, idx).unwrap(), &(CMatrix::identity(2, 2) * c(3.0, 0.0)));
        let zero = v.sector_index(&Sector::new(0, vec![1, -1])).unwrap();
        assert!(v.block(zero, zero).is_none());
    }

    #[test]
    fn vertical_raises_with_the_generator() {
        let gcp = Gcp::new(Bimodule::trivial(2), 3).unwrap();
        let s1 = gcp.monomial(1, &[0, 0], c(1.0, 0.0));
        let cutoff = Cutoff { k: 3, m: 2 };
        let v = vertical_op(2, cutoff, 1);
        let a = gcp.represent_on(&s1, &v);
        let comm = v.commutator(&a).unwrap();
        assert!(comm.sub(&a).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn flat_horizontal_part_is_dh_in_every_degree() {
        let cl = build_clifford(2).unwrap();
        let gcp = Gcp::new(Bimodule::trivial(2), 2).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        let h = one_tensor_nabla(&x, 3).unwrap();
        let d = dirac_h(2, 3, &cl).unwrap();
        for (&(r, col), b) in h.blocks() {
            assert_eq!(r, col);
            let s = &h.sectors()[r];
            let i = d.sector_index(&Sector::new(0, s.mode.clone())).unwrap();
            assert!((b - d.block(i, i).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn flat_odd_even_spectrum_is_closed_form() {
        let cl = build_clifford(2).unwrap();
        let gcp = Gcp::new(Bimodule::trivial(2), 2).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        let l = lift_odd_even(&x, 2).unwrap();
        assert!(l.operator.selfadjoint_deviation() < 1e-12);
        let got = l.spectrum().unwrap();
        let want = flat_spectrum(2, 2, 2, 1);
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        // the (0, 0) sector is in the kernel
        assert_eq!(got.iter().filter(|v| v.abs() < 1e-9).count(), 2);
    }

    #[test]
    fn flat_odd_odd_on_the_circle() {
        let cl = build_clifford(1).unwrap();
        let gcp = Gcp::new(Bimodule::trivial(1), 2).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        let l = lift_odd_odd(&x, 3).unwrap();
        assert!(l.operator.selfadjoint_deviation() < 1e-12);
        let g = doubled_grading(&l.operator);
        assert_eq!(l.operator.anticommutator(&g).unwrap().max_abs(), 0.0);
        let got = l.spectrum().unwrap();
        let mut want = Vec::new();
        for d in -2i64..=2 {
            for k in -3i64..=3 {
                let lam = ((d * d) as f64 + TAU * TAU * (k * k) as f64).sqrt();
                want.extend([lam, lam, -lam, -lam]);
            }
        }
        want.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-8);
        }
        assert_eq!(got.len(), want.len());
    }

    #[test]
    fn odd_even_requires_a_grading() {
        let cl = build_clifford(1).unwrap();
        let gcp = Gcp::new(Bimodule::trivial(1), 1).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        assert!(lift_odd_even(&x, 2).is_err());
    }

    #[test]
    fn twisted_lift_structure() {
        let cl = build_clifford(2).unwrap();
        let gcp = Gcp::new(twisted(), 2).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        let m = 3;
        let cutoff = Cutoff { k: 2, m };
        let h = one_tensor_nabla(&x, m).unwrap();
        let v = vertical_graded(cutoff, &cl).unwrap();
        assert!(h.selfadjoint_deviation() < 1e-12);
        assert!(v.anticommutator(&h).unwrap().max_abs() < 1e-10);
        let l = lift_odd_even(&x, m).unwrap();
        assert!(l.operator.selfadjoint_deviation() < 1e-12);
        let u = gcp.gauge_unitary(C64::from_polar(1.0, 0.7), &l.operator);
        let conj = u.matmul(&l.operator).unwrap().matmul(&u.adjoint()).unwrap();
        assert!(conj.sub(&l.operator).unwrap().max_abs() < 1e-12);
        let oo = lift_odd_odd(&x, m).unwrap();
        let spec = oo.spectrum().unwrap();
        for (a, b) in spec.iter().zip(spec.iter().rev()) {
            assert!((a + b).abs() < 1e-8);
        }
    }

    #[test]
    fn twisted_potential_shifts_the_degree_blocks() {
        let cl = build_clifford(2).unwrap();
        let gcp = Gcp::new(twisted(), 2).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        let h = one_tensor_nabla(&x, 2).unwrap();
        for k in -2i64..=2 {
            let i = h.sector_index(&Sector::new(k, vec![1, 0])).unwrap();
            // omega_j = -pi i on both axes, so a_k = -pi i k
            let pot = (cl.gamma(0) + cl.gamma(1)) * c(0.0, -std::f64::consts::PI * k as f64);
            let want = dirac_block(&[1, 0], &cl) + pot;
            assert!((h.block(i, i).unwrap() - want).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn monomial_commutator_norm_is_cutoff_independent() {
        let cl = build_clifford(2).unwrap();
        let e = Bimodule::trivial(2);
        let nabla = Connexion::grassmann(&e);
        let gcp = Gcp::new(e.clone(), 1).unwrap();
        let f = gcp.monomial(1, &[1, 0], c(0.6, 0.8));
        let ladder = [Cutoff { k: 2, m: 2 }, Cutoff { k: 3, m: 3 }, Cutoff { k: 4, m: 4 }];
        let rep = commutator_ladder(&e, &nabla, &cl, Parity::OddEven, &ladder, &f).unwrap();
        let want = (1.0 + TAU * TAU).sqrt();
        for v in &rep.norms {
            assert!((v - want).abs() < 1e-9, "{v}");
        }
        assert!(rep.stable(1e-2));
    }

    #[test]
    fn base_elements_only_see_the_horizontal_part() {
        let cl = build_clifford(2).unwrap();
        let gcp = Gcp::new(twisted(), 2).unwrap();
        let nabla = Connexion::grassmann(gcp.module());
        let x = XConnexion::new(&nabla, &gcp, &cl).unwrap();
        let l = lift_odd_even(&x, 3).unwrap();
        let b = GradedElement::from_base(FourierElement::monomial(&[0, 1], c(1.0, 0.0)));
        let a = l.represent(&gcp, &b);
        let full = l.operator.commutator(&a).unwrap();
        let horiz = one_tensor_nabla(&x, 3).unwrap().commutator(&a).unwrap();
        assert!(full.sub(&horiz).unwrap().max_abs() < 1e-12);
        let one = l.represent(&gcp, &GradedElement::unit(2));
        assert!(l.operator.commutator(&one).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn corner_of_the_unit_vanishes_and_generator_corner_is_stable() {
        let cl = build_clifford(2).unwrap();
        let e = Bimodule::trivial(2);
        let nabla = Connexion::grassmann(&e);
        let gcp = Gcp::new(e.clone(), 1).unwrap();
        let ladder = [Cutoff { k: 2, m: 2 }, Cutoff { k: 3, m: 4 }, Cutoff { k: 4, m: 6 }];
        let unit = kucerovsky_ladder(&e, &nabla, &cl, Parity::OddEven, &ladder, &GradedElement::unit(2)).unwrap();
        assert!(unit.norms.iter().all(|v| *v < 1e-12));
        let s1 = gcp.s(1, &e.from_flat(&FourierElement::unit(2)));
        let rep = kucerovsky_ladder(&e, &nabla, &cl, Parity::OddEven, &ladder, &s1).unwrap();
        for v in &rep.norms {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_trace_and_counting() {
        let zero = vertical_op(1, Cutoff { k: 0, m: 2 }, 2);
        let ev = spectrum(&zero).unwrap();
        assert_eq!(ev, vec![0.0; 10]);
        assert_eq!(heat_trace(&ev, &[0.5, 3.0]).unwrap(), vec![10.0, 10.0]);
        assert!(heat_trace(&ev, &[0.0]).is_err());
        let ev = [1.0, -2.0, 3.0];
        let h = heat_trace(&ev, &[0.1, 0.2, 1.0]).unwrap();
        assert!(h[0] > h[1] && h[1] > h[2]);
        assert_eq!(counting(&ev, 2.0), 2);
    }

    #[test]
    fn non_selfadjoint_spectrum_is_rejected() {
        let cl = build_clifford(2).unwrap();
        let d = dirac_h(2, 1, &cl).unwrap().scale(c(0.0, 1.0));
        assert!(spectrum(&d).is_err());
    }
}
