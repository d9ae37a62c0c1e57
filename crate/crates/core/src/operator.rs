//! Block-sparse operators on truncated sector spaces.
//!
//! The Hilbert spaces in this crate are finite direct sums of identical
//! blocks, one per sector `(gauge degree, Fourier mode)`. Each block is a copy
//! of the spinor space (or of its double). Operators store only the nonzero
//! block matrices, so shift-like operators stay cheap and spectra can be split
//! over the connected components of the block graph.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::op_norm;
use crate::error::{Error, Result};
use crate::fourier::Mode;
use crate::{CMatrix, C64};

/// Components larger than this are handled iteratively when a norm is asked for
/// and rejected by the dense eigensolver.
pub const DENSE_LIMIT: usize = 1600;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Sector {
    pub degree: i64,
    pub mode: Mode,
}

impl Sector {
    pub fn new(degree: i64, mode: Mode) -> Self {
        Self { degree, mode }
    }

    pub fn mode_radius(&self) -> i64 {
        self.mode.iter().map(|a| a.abs()).max().unwrap_or(0)
    }
}

/// Degree cutoff `k` and Fourier cutoff `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cutoff {
    pub k: usize,
    pub m: usize,
}

/// All modes with `|k|_inf <= m` in lexicographic order.
pub fn mode_box(n: usize, m: usize) -> Vec<Mode> {
    let m = m as i64;
    let mut out: Vec<Mode> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-m..=m).map(move |a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// Sectors `(d, k)` with `|d| <= cutoff.k` and `|k|_inf <= cutoff.m`.
pub fn sector_grid(n: usize, cutoff: Cutoff) -> Vec<Sector> {
    let modes = mode_box(n, cutoff.m);
    let k = cutoff.k as i64;
    (-k..=k)
        .flat_map(|d| modes.iter().map(move |m| Sector::new(d, m.clone())))
        .collect()
}

#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    sectors: Vec<Sector>,
    index: HashMap<Sector, usize>,
    block_dim: usize,
    blocks: BTreeMap<(usize, usize), CMatrix>,
    cutoff: Cutoff,
    lossy: bool,
}

/// One eigenvalue together with the sector carrying most of its eigenvector.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledEigenvalue {
    pub sector: Sector,
    pub value: f64,
}

impl TruncatedOperator {
    pub fn new(sectors: Vec<Sector>, block_dim: usize, cutoff: Cutoff) -> Self {
        let index = sectors
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            sectors,
            index,
            block_dim,
            blocks: BTreeMap::new(),
            cutoff,
            lossy: false,
        }
    }

    /// Same layout, no blocks.
    pub fn zeros_like(&self) -> Self {
        Self {
            sectors: self.sectors.clone(),
            index: self.index.clone(),
            block_dim: self.block_dim,
            blocks: BTreeMap::new(),
            cutoff: self.cutoff,
            lossy: false,
        }
    }

    pub fn identity(sectors: Vec<Sector>, block_dim: usize, cutoff: Cutoff) -> Self {
        let mut out = Self::new(sectors, block_dim, cutoff);
        for i in 0..out.sectors.len() {
            out.add_block(i, i, &CMatrix::identity(block_dim, block_dim));
        }
        out
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector_index(&self, s: &Sector) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.sectors.len() * self.block_dim
    }

    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    pub fn set_lossy(&mut self, lossy: bool) {
        self.lossy = lossy;
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &CMatrix)> {
        self.blocks.iter()
    }

    pub fn block(&self, r: usize, c: usize) -> Option<&CMatrix> {
        self.blocks.get(&(r, c))
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Adds `m` into block `(r, c)`.
    pub fn add_block(&mut self, r: usize, c: usize, m: &CMatrix) {
        assert_eq!(m.nrows(), self.block_dim);
        assert_eq!(m.ncols(), self.block_dim);
        match self.blocks.get_mut(&(r, c)) {
            Some(b) => *b += m,
            None => {
                self.blocks.insert((r, c), m.clone());
            }
        }
    }

    fn same_layout(&self, other: &Self) -> Result<()> {
        if self.block_dim != other.block_dim || self.sectors != other.sectors {
            return Err(Error::Incompatible(
                "operators live on different sector spaces".into(),
            ));
        }
        Ok(())
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.block_dim;
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (&(r, c), b) in &self.blocks {
            out.view_mut((r * d, c * d), (d, d)).copy_from(b);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.zeros_like();
        out.lossy = self.lossy;
        for (&(r, c), b) in &self.blocks {
            out.blocks.insert((c, r), b.adjoint());
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let mut out = self.clone();
        out.lossy |= other.lossy;
        for (&(r, c), b) in &other.blocks {
            out.add_block(r, c, b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let mut by_row: HashMap<usize, Vec<(usize, &CMatrix)>> = HashMap::new();
        for (&(r, c), b) in &other.blocks {
            by_row.entry(r).or_default().push((c, b));
        }
        let mut out = self.zeros_like();
        out.lossy = self.lossy || other.lossy;
        for (&(r, k), a) in &self.blocks {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    out.add_block(r, c, &(a * b));
                }
            }
        }
        Ok(out)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `self * other + other * self`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.add(&other.matmul(self)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|b| b.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// Largest entry of `self - self^*`.
    pub fn selfadjoint_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(r, c), b) in &self.blocks {
            let dev = match self.blocks.get(&(c, r)) {
                Some(t) => (b - t.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max),
                None => b.iter().map(|z| z.norm()).fold(0.0, f64::max),
            };
            worst = worst.max(dev);
        }
        worst
    }

    /// Largest entry difference over blocks whose row and column sectors both
    /// satisfy `keep`.
    pub fn max_diff_on(&self, other: &Self, keep: impl Fn(&Sector) -> bool) -> Result<f64> {
        self.same_layout(other)?;
        let diff = self.sub(other)?;
        let mut worst: f64 = 0.0;
        for (&(r, c), b) in &diff.blocks {
            if keep(&self.sectors[r]) && keep(&self.sectors[c]) {
                worst = worst.max(b.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        Ok(worst)
    }

    /// Compression to the sectors satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&Sector) -> bool) -> Self {
        self.restrict_rows_cols(&keep, &keep)
    }

    /// Keeps the blocks whose row sector satisfies `rows` and whose column
    /// sector satisfies `cols`, on the same sector space.
    pub fn restrict_rows_cols(
        &self,
        rows: impl Fn(&Sector) -> bool,
        cols: impl Fn(&Sector) -> bool,
    ) -> Self {
        let mut out = self.zeros_like();
        out.lossy = self.lossy;
        for (&(r, c), b) in &self.blocks {
            if rows(&self.sectors[r]) && cols(&self.sectors[c]) {
                out.blocks.insert((r, c), b.clone());
            }
        }
        out
    }

    /// Sector index sets of the connected components of the block graph,
    /// each sorted, ordered by their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.sectors.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(r, c) in self.blocks.keys() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    fn component_dense(&self, comp: &[usize]) -> CMatrix {
        let d = self.block_dim;
        let local: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut out = CMatrix::zeros(comp.len() * d, comp.len() * d);
        for &s in comp {
            for (&(r, c), b) in self.blocks.range((s, 0)..(s + 1, 0)) {
                debug_assert_eq!(r, s);
                let (lr, lc) = (local[&r], local[&c]);
                out.view_mut((lr * d, lc * d), (d, d)).copy_from(b);
            }
        }
        out
    }

    fn check_selfadjoint(&self) -> Result<()> {
        let dev = self.selfadjoint_deviation();
        if dev > 1e-10 * self.max_abs().max(1.0) {
            return Err(Error::NotSelfadjoint(dev));
        }
        Ok(())
    }

    /// Sorted eigenvalues, one dense Hermitian eigensolve per component.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_selfadjoint()?;
        let comps = self.components();
        let d = self.block_dim;
        if let Some(c) = comps.iter().find(|c| c.len() * d > DENSE_LIMIT) {
            return Err(Error::ComponentTooLarge(c.len() * d));
        }
        let parts: Vec<Vec<f64>> = comps
            .par_iter()
            .map(|comp| {
                let m = self.component_dense(comp);
                let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
                h.symmetric_eigenvalues().iter().copied().collect()
            })
            .collect();
        let mut all: Vec<f64> = parts.into_iter().flatten().collect();
        all.sort_by(|a, b| a.total_cmp(b));
        Ok(all)
    }

    /// Eigenvalues labeled by the sector holding the largest share of the
    /// eigenvector, sorted by value then sector.
    pub fn labeled_eigenvalues(&self) -> Result<Vec<LabeledEigenvalue>> {
        self.check_selfadjoint()?;
        let comps = self.components();
        let d = self.block_dim;
        if let Some(c) = comps.iter().find(|c| c.len() * d > DENSE_LIMIT) {
            return Err(Error::ComponentTooLarge(c.len() * d));
        }
        let parts: Vec<Vec<LabeledEigenvalue>> = comps
            .par_iter()
            .map(|comp| {
                let m = self.component_dense(comp);
                let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
                let eig = h.symmetric_eigen();
                (0..eig.eigenvalues.len())
                    .map(|i| {
                        let v = eig.eigenvectors.column(i);
                        let mut best = (0usize, -1.0f64);
                        for (li, _) in comp.iter().enumerate() {
                            let w: f64 = (0..d).map(|a| v[li * d + a].norm_sqr()).sum();
                            if w > best.1 + 1e-12 {
                                best = (li, w);
                            }
                        }
                        LabeledEigenvalue {
                            sector: self.sectors[comp[best.0]].clone(),
                            value: eig.eigenvalues[i],
                        }
                    })
                    .collect()
            })
            .collect();
        let mut all: Vec<LabeledEigenvalue> = parts.into_iter().flatten().collect();
        all.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.sector.cmp(&b.sector)));
        Ok(all)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let d = self.block_dim;
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        for (&(r, c), b) in &self.blocks {
            for i in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..d {
                    acc += b[(i, j)] * x[c * d + j];
                }
                y[r * d + i] += acc;
            }
        }
        y
    }

    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        let d = self.block_dim;
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        for (&(r, c), b) in &self.blocks {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d {
                    acc += b[(i, j)].conj() * x[r * d + i];
                }
                y[c * d + j] += acc;
            }
        }
        y
    }

    /// Operator 2-norm: exact per component, Lanczos for oversized components.
    pub fn norm(&self) -> f64 {
        let d = self.block_dim;
        let comps = self.components();
        comps
            .par_iter()
            .filter(|comp| {
                comp.iter()
                    .any(|&s| self.blocks.range((s, 0)..(s + 1, 0)).next().is_some())
            })
            .map(|comp| {
                if comp.len() * d <= DENSE_LIMIT {
                    op_norm(&self.component_dense(comp))
                } else {
                    let keep: std::collections::HashSet<usize> = comp.iter().copied().collect();
                    let mut sub = self.zeros_like();
                    for (&(r, c), b) in &self.blocks {
                        if keep.contains(&r) {
                            sub.blocks.insert((r, c), b.clone());
                        }
                    }
                    lanczos_norm(&sub)
                }
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Largest singular value by Lanczos iteration on `A^* A` with full
/// reorthogonalization and a deterministic start vector.
pub fn lanczos_norm(a: &TruncatedOperator) -> f64 {
    let n = a.dim();
    if n == 0 {
        return 0.0;
    }
    let iters = n.min(300);
    let mut q: Vec<DVector<C64>> = Vec::with_capacity(iters + 1);
    let start = DVector::from_iterator(
        n,
        (0..n).map(|i| C64::new(1.0 + ((i * 7919) % 97) as f64 / 97.0, 0.0)),
    );
    let nrm = start.norm();
    q.push(start / C64::new(nrm, 0.0));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = 0.0;
    for it in 0..iters {
        let qi = &q[it];
        let av = a.matvec(qi.as_slice());
        let w_vec = a.adjoint_matvec(&av);
        let mut w = DVector::from_vec(w_vec);
        let al = qi.dotc(&w).re;
        alpha.push(al);
        for prev in &q {
            let proj = prev.dotc(&w);
            w -= prev * proj;
        }
        let b = w.norm();
        let tri = tridiagonal_max(&alpha, &beta);
        if it > 4 && (tri - last).abs() <= 1e-14 * tri.abs().max(1e-300) {
            return tri.max(0.0).sqrt();
        }
        last = tri;
        if b < 1e-13 * tri.abs().max(1e-300) || it + 1 == iters {
            return tri.max(0.0).sqrt();
        }
        beta.push(b);
        q.push(w / C64::new(b, 0.0));
    }
    last.max(0.0).sqrt()
}

fn tridiagonal_max(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t.symmetric_eigenvalues().max()
}
