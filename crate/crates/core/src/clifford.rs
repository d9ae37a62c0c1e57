//! Finite-dimensional complex Clifford modules.
//!
//! Generators are built by the Jordan-Wigner chain: with Pauli matrices
//! `s1, s2, s3` and `m = ceil(n/2)`,
//!
//! ```text
//! G_{2l-1} = s3^(l-1) (x) s1 (x) 1^(m-l)
//! G_{2l}   = s3^(l-1) (x) s2 (x) 1^(m-l)
//! ```
//!
//! are Hermitian with `G_j G_k + G_k G_j = 2 delta_jk`. The module exposes the
//! anti-selfadjoint generators `gamma_j = i G_j`, which satisfy
//! `gamma_j gamma_k + gamma_k gamma_j = -2 delta_jk`.

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

#[derive(Debug, Clone)]
pub struct CliffordRep {
    n: usize,
    dim_s: usize,
    gammas: Vec<CMatrix>,
    grading: Option<CMatrix>,
}

fn pauli(which: u8) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match which {
        1 => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => CMatrix::identity(2, 2),
    }
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Builds the `2^ceil(n/2)`-dimensional representation of `Cl(n)`.
pub fn build_clifford(n: usize) -> Result<CliffordRep> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "Clifford algebra needs at least one generator".into(),
        ));
    }
    let m = n.div_ceil(2);
    let dim_s = 1usize << m;
    let i = C64::new(0.0, 1.0);

    let mut hermitian = Vec::with_capacity(n);
    'outer: for l in 0..m {
        for seed in [1u8, 2u8] {
            if hermitian.len() == n {
                break 'outer;
            }
            let mut factors = Vec::with_capacity(m);
            factors.extend(std::iter::repeat_with(|| pauli(3)).take(l));
            factors.push(pauli(seed));
            factors.extend(std::iter::repeat_with(|| pauli(0)).take(m - l - 1));
            hermitian.push(kron_all(&factors));
        }
    }
    let gammas: Vec<CMatrix> = hermitian.into_iter().map(|g| g * i).collect();

    let grading = if n.is_multiple_of(2) {
        let mut omega = CMatrix::identity(dim_s, dim_s);
        for g in &gammas {
            omega *= g;
        }
        // omega^2 = +-1; rescale so the grading squares to the identity
        let sq = &omega * &omega;
        if (sq[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12 {
            Some(omega)
        } else {
            Some(omega * i)
        }
    } else {
        None
    };

    Ok(CliffordRep {
        n,
        dim_s,
        gammas,
        grading,
    })
}

impl CliffordRep {
    /// Assembles a representation from explicit matrices without validating it;
    /// `check_relations` reports how far it is from a Clifford module.
    pub fn from_parts(gammas: Vec<CMatrix>, grading: Option<CMatrix>) -> Result<Self> {
        let first = gammas
            .first()
            .ok_or_else(|| Error::InvalidParameter("no generators".into()))?;
        let dim_s = first.nrows();
        for g in &gammas {
            if g.nrows() != dim_s || g.ncols() != dim_s {
                return Err(Error::DimensionMismatch {
                    expected: dim_s,
                    got: g.nrows().max(g.ncols()),
                });
            }
        }
        Ok(Self {
            n: gammas.len(),
            dim_s,
            gammas,
            grading,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    pub fn gamma(&self, j: usize) -> &CMatrix {
        &self.gammas[j]
    }

    pub fn grading(&self) -> Option<&CMatrix> {
        self.grading.as_ref()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim_s, self.dim_s)
    }
}

/// Operator 2-norm of a small dense matrix.
pub(crate) fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest relation residual, in operator norm, over anticommutators,
/// anti-selfadjointness and (when present) the grading laws.
pub fn check_relations(rep: &CliffordRep) -> f64 {
    let id = rep.identity();
    let mut worst: f64 = 0.0;
    for (j, gj) in rep.gammas.iter().enumerate() {
        worst = worst.max(op_norm(&(gj.adjoint() + gj)));
        for (k, gk) in rep.gammas.iter().enumerate().skip(j) {
            let mut anti = gj * gk + gk * gj;
            if j == k {
                anti += &id * C64::new(2.0, 0.0);
            }
            worst = worst.max(op_norm(&anti));
        }
    }
    if let Some(g) = &rep.grading {
        worst = worst.max(op_norm(&(g * g - &id)));
        worst = worst.max(op_norm(&(g.adjoint() - g)));
        for gj in &rep.gammas {
            worst = worst.max(op_norm(&(g * gj + gj * g)));
        }
    }
    worst
}
