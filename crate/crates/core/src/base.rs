//! The base algebra acting on the truncated GNS space of the torus.
//!
//! `l^2(Z^n)` is cut to the modes `|k|_inf <= M` and tensored with a Clifford
//! module. An element acts by convolution of coefficients; the Dirac-Rieffel
//! operator acts on mode `k` by `sum_j 2 pi i k_j gamma_j`.

use std::f64::consts::TAU;

use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::fourier::FourierElement;
use crate::operator::{sector_grid, Cutoff, Sector, TruncatedOperator};
use crate::{CMatrix, C64};

/// `sum_j 2 pi i k_j gamma_j`.
pub fn dirac_block(mode: &[i64], cl: &CliffordRep) -> CMatrix {
    let d = cl.dim_s();
    let mut out = CMatrix::zeros(d, d);
    for (j, &kj) in mode.iter().enumerate() {
        if kj != 0 {
            out += cl.gamma(j) * C64::new(0.0, TAU * kj as f64);
        }
    }
    out
}

fn check_clifford(n: usize, cl: &CliffordRep) -> Result<()> {
    if cl.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cl.n(),
        });
    }
    Ok(())
}

/// Adds `a (x) block` into `op`, where `a` acts on the mode of every sector and
/// leaves the degree alone. Terms leaving the sector space are dropped.
pub fn add_multiplication(op: &mut TruncatedOperator, a: &FourierElement, block: &CMatrix) {
    let targets: Vec<(usize, usize, C64)> = op
        .sectors()
        .iter()
        .enumerate()
        .flat_map(|(c, s)| {
            a.coeffs().map(move |(l, coef)| {
                let mode: Vec<i64> = s.mode.iter().zip(l).map(|(x, y)| x + y).collect();
                (c, Sector::new(s.degree, mode), *coef)
            })
        })
        .filter_map(|(c, t, coef)| Some((op.sector_index(&t)?, c, coef)))
        .collect();
    for (r, c, coef) in targets {
        op.add_block(r, c, &(block * coef));
    }
}

/// Left multiplication by `a` on the modes `|k|_inf <= m`, tensored with the
/// identity of a `block_dim`-dimensional space.
pub fn represent(a: &FourierElement, m: usize, block_dim: usize) -> TruncatedOperator {
    let cutoff = Cutoff { k: 0, m };
    let mut op = TruncatedOperator::new(sector_grid(a.n(), cutoff), block_dim, cutoff);
    add_multiplication(&mut op, a, &CMatrix::identity(block_dim, block_dim));
    op.set_lossy(a.support_radius() > m as i64);
    op
}

/// Left multiplication by `a` on the sector space of `like`.
pub fn represent_like(a: &FourierElement, like: &TruncatedOperator) -> TruncatedOperator {
    let mut op = like.zeros_like();
    let d = like.block_dim();
    add_multiplication(&mut op, a, &CMatrix::identity(d, d));
    op
}

/// The Dirac-Rieffel operator on the modes `|k|_inf <= m` tensored with `S`.
pub fn dirac_h(n: usize, m: usize, cl: &CliffordRep) -> Result<TruncatedOperator> {
    check_clifford(n, cl)?;
    let cutoff = Cutoff { k: 0, m };
    let mut op = TruncatedOperator::new(sector_grid(n, cutoff), cl.dim_s(), cutoff);
    for i in 0..op.sectors().len() {
        let b = dirac_block(&op.sectors()[i].mode, cl);
        op.add_block(i, i, &b);
    }
    Ok(op)
}

/// `[D, pi(a)]` as a matrix commutator on the sector space of `d`.
pub fn commutator(d: &TruncatedOperator, a: &FourierElement) -> Result<TruncatedOperator> {
    d.commutator(&represent_like(a, d))
}

/// `sum_j pi(d_j a) (x) gamma_j` on the modes `|k|_inf <= m`.
pub fn commutator_formula(a: &FourierElement, m: usize, cl: &CliffordRep) -> Result<TruncatedOperator> {
    check_clifford(a.n(), cl)?;
    let cutoff = Cutoff { k: 0, m };
    let mut op = TruncatedOperator::new(sector_grid(a.n(), cutoff), cl.dim_s(), cutoff);
    for j in 0..a.n() {
        add_multiplication(&mut op, &a.derive(j)?, cl.gamma(j));
    }
    Ok(op)
}

/// Sectors at sup-distance more than `radius` from the mode cutoff `m`.
pub fn interior(m: usize, radius: i64) -> impl Fn(&Sector) -> bool {
    move |s: &Sector| s.mode_radius() + radius <= m as i64
}

/// Norm of the lower-triangular block matrix `[[pi(a), 0], [[D, a], pi(a)]]`
/// at mode cutoff `m`.
pub fn norm1(a: &FourierElement, m: usize, cl: &CliffordRep) -> Result<f64> {
    check_clifford(a.n(), cl)?;
    let d = cl.dim_s();
    let cutoff = Cutoff { k: 0, m };
    let mut op = TruncatedOperator::new(sector_grid(a.n(), cutoff), 2 * d, cutoff);
    let id = CMatrix::identity(d, d);
    let mut blocks = Vec::new();
    for (l, coef) in a.coeffs() {
        let mut b = CMatrix::zeros(2 * d, 2 * d);
        b.view_mut((0, 0), (d, d)).copy_from(&(&id * *coef));
        b.view_mut((d, d), (d, d)).copy_from(&(&id * *coef));
        b.view_mut((d, 0), (d, d)).copy_from(&(dirac_block(l, cl) * *coef));
        blocks.push((l.clone(), b));
    }
    for c in 0..op.sectors().len() {
        let src = op.sectors()[c].clone();
        for (l, b) in &blocks {
            let mode: Vec<i64> = src.mode.iter().zip(l).map(|(x, y)| x + y).collect();
            if let Some(r) = op.sector_index(&Sector::new(0, mode)) {
                op.add_block(r, c, b);
            }
        }
    }
    Ok(op.norm())
}
