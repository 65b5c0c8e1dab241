//! Dense exact linear algebra over a [`FieldCtx`]: RREF, rank, kernel,
//! inverse, linear solving, characteristic polynomial, trace forms, and
//! subspaces of flattened matrix spaces.
//!
//! The canonical isomorphism F_q^{m x n} = F_q^{mn} is row-major flattening
//! (row 0 first) everywhere: duals, kernels, dictionary keys. Pivots are
//! normalized to 1, so subspace bases are canonical and equality is
//! entrywise.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::field::{FieldCtx, FieldElem, Poly};

/// Rejection-sampling cap for [`random_invertible`]; the failure probability
/// at q >= 3 is far below 2^-256.
const INVERTIBLE_RETRY_CAP: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("rejection sampling exhausted after {0} tries")]
    RetryExhausted(usize),
}

/// Dense matrix over a referenced field context, entries in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    ctx: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElem>,
}

impl Mat {
    pub fn zeros(ctx: &Arc<FieldCtx>, rows: usize, cols: usize) -> Mat {
        Mat {
            ctx: Arc::clone(ctx),
            rows,
            cols,
            entries: vec![ctx.zero(); rows * cols],
        }
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> Mat {
        let mut m = Mat::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_rows(ctx: &Arc<FieldCtx>, rows: Vec<Vec<FieldElem>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            ctx: Arc::clone(ctx),
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Test convenience: entries as integers reduced mod q.
    pub fn from_u64_rows(ctx: &Arc<FieldCtx>, rows: &[&[u64]]) -> Mat {
        Mat::from_rows(
            ctx,
            rows.iter()
                .map(|row| row.iter().map(|&v| ctx.from_u64(v)).collect())
                .collect(),
        )
    }

    pub fn from_flat(ctx: &Arc<FieldCtx>, rows: usize, cols: usize, flat: Vec<FieldElem>) -> Mat {
        assert_eq!(flat.len(), rows * cols);
        Mat {
            ctx: Arc::clone(ctx),
            rows,
            cols,
            entries: flat,
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.cols + j] = v;
    }

    /// Row-major flattening; the canonical vec(M).
    pub fn flatten(&self) -> Vec<FieldElem> {
        self.entries.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.ctx.is_zero(e))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ctx.add(a, b))
            .collect();
        Mat::from_flat(&self.ctx, self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ctx.sub(a, b))
            .collect();
        Mat::from_flat(&self.ctx, self.rows, self.cols, entries)
    }

    pub fn neg(&self) -> Mat {
        let entries = self.entries.iter().map(|a| self.ctx.neg(a)).collect();
        Mat::from_flat(&self.ctx, self.rows, self.cols, entries)
    }

    pub fn scale(&self, c: &FieldElem) -> Mat {
        let entries = self.entries.iter().map(|a| self.ctx.mul(a, c)).collect();
        Mat::from_flat(&self.ctx, self.rows, self.cols, entries)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let ctx = &self.ctx;
        let mut out = Mat::zeros(ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.at(i, l);
                if ctx.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = ctx.mul(a, other.at(l, j));
                    let cur = out.at(i, j).clone();
                    out.set(i, j, ctx.add(&cur, &t));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> FieldElem {
        assert!(self.is_square());
        let mut acc = self.ctx.zero();
        for i in 0..self.rows {
            acc = self.ctx.add(&acc, self.at(i, i));
        }
        acc
    }

    /// Evaluate a polynomial at this (square) matrix.
    pub fn poly_eval(&self, f: &Poly) -> Mat {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = Mat::zeros(&self.ctx, n, n);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                let cur = acc.at(i, i).clone();
                acc.set(i, i, self.ctx.add(&cur, c));
            }
        }
        acc
    }

    /// Embed a matrix over the prime field into an extension context.
    pub fn lift(&self, ext: &Arc<FieldCtx>) -> Mat {
        let entries = self.entries.iter().map(|e| ext.embed(e)).collect();
        Mat {
            ctx: Arc::clone(ext),
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Map down to the prime field when every entry is a base-field constant.
    pub fn descend(&self, base: &Arc<FieldCtx>) -> Option<Mat> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(base.from_u64(self.ctx.to_base(e)?));
        }
        Some(Mat {
            ctx: Arc::clone(base),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

/// Uniform random matrix.
pub fn random_mat<R: Rng + ?Sized>(
    ctx: &Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Mat {
    let entries = (0..rows * cols).map(|_| ctx.random_elem(rng)).collect();
    Mat::from_flat(ctx, rows, cols, entries)
}

/// Uniformly random element of GL_m, by rejection on uniform matrices.
pub fn random_invertible<R: Rng + ?Sized>(
    ctx: &Arc<FieldCtx>,
    m: usize,
    rng: &mut R,
) -> Result<Mat, MatError> {
    for _ in 0..INVERTIBLE_RETRY_CAP {
        let cand = random_mat(ctx, m, m, rng);
        if cand.rank() == m {
            return Ok(cand);
        }
    }
    Err(MatError::RetryExhausted(INVERTIBLE_RETRY_CAP))
}

// ---------------------------------------------------------------------------
// RREF / kernel / inverse
// ---------------------------------------------------------------------------

pub struct RrefResult {
    pub mat: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form with first-nonzero pivoting and pivots
/// normalized to 1.
pub fn rref(m: &Mat) -> RrefResult {
    let ctx = m.ctx().clone();
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut pr = 0usize;
    for pc in 0..a.cols {
        if pr == a.rows {
            break;
        }
        let Some(sel) = (pr..a.rows).find(|&r| !ctx.is_zero(a.at(r, pc))) else {
            continue;
        };
        if sel != pr {
            for j in 0..a.cols {
                let tmp = a.at(sel, j).clone();
                a.set(sel, j, a.at(pr, j).clone());
                a.set(pr, j, tmp);
            }
        }
        let inv = ctx.inv(a.at(pr, pc)).expect("nonzero pivot");
        for j in pc..a.cols {
            let v = ctx.mul(a.at(pr, j), &inv);
            a.set(pr, j, v);
        }
        for r in 0..a.rows {
            if r == pr || ctx.is_zero(a.at(r, pc)) {
                continue;
            }
            let f = a.at(r, pc).clone();
            for j in pc..a.cols {
                let t = ctx.mul(&f, a.at(pr, j));
                let v = ctx.sub(a.at(r, j), &t);
                a.set(r, j, v);
            }
        }
        pivots.push(pc);
        pr += 1;
    }
    RrefResult {
        mat: a,
        rank: pr,
        pivots,
    }
}

/// Basis of the right kernel {x : Mx = 0}, canonicalized.
pub fn kernel(m: &Mat) -> Subspace {
    let ctx = m.ctx().clone();
    let RrefResult { mat, rank, pivots } = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut rows = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![ctx.zero(); m.cols];
        v[fc] = ctx.one();
        for (r, &pc) in pivots.iter().enumerate().take(rank) {
            v[pc] = ctx.neg(mat.at(r, fc));
        }
        rows.push(v);
    }
    Subspace::from_span(&ctx, m.cols, rows)
}

/// Inverse of a square matrix, via RREF of [M | I].
pub fn mat_inverse(m: &Mat) -> Result<Mat, MatError> {
    if !m.is_square() {
        return Err(MatError::DimensionMismatch("inverse of non-square".into()));
    }
    let ctx = m.ctx().clone();
    let n = m.rows;
    let mut aug = Mat::zeros(&ctx, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.at(i, j).clone());
        }
        aug.set(i, n + i, ctx.one());
    }
    let r = rref(&aug);
    if r.rank < n || r.pivots.iter().take(n).copied().ne(0..n) {
        return Err(MatError::Singular);
    }
    let mut out = Mat::zeros(&ctx, n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, r.mat.at(i, n + j).clone());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Characteristic polynomial (Hessenberg reduction)
// ---------------------------------------------------------------------------

/// Monic characteristic polynomial det(tI - M), computed by similarity
/// reduction to upper Hessenberg form followed by the minor recurrence.
pub fn charpoly(m: &Mat) -> Poly {
    assert!(m.is_square(), "charpoly of non-square matrix");
    let ctx = m.ctx().clone();
    let n = m.rows;
    if n == 0 {
        return Poly::one(&ctx);
    }
    let mut h = m.clone();
    // Similarity reduction to upper Hessenberg.
    for col in 0..n.saturating_sub(2) {
        let Some(piv) = (col + 1..n).find(|&r| !ctx.is_zero(h.at(r, col))) else {
            continue;
        };
        if piv != col + 1 {
            for j in 0..n {
                let tmp = h.at(piv, j).clone();
                h.set(piv, j, h.at(col + 1, j).clone());
                h.set(col + 1, j, tmp);
            }
            for i in 0..n {
                let tmp = h.at(i, piv).clone();
                h.set(i, piv, h.at(i, col + 1).clone());
                h.set(i, col + 1, tmp);
            }
        }
        let inv = ctx.inv(h.at(col + 1, col)).expect("nonzero pivot");
        for row in col + 2..n {
            if ctx.is_zero(h.at(row, col)) {
                continue;
            }
            let f = ctx.mul(h.at(row, col), &inv);
            // R_row -= f * R_{col+1}; C_{col+1} += f * C_row keeps similarity.
            for j in 0..n {
                let t = ctx.mul(&f, h.at(col + 1, j));
                let v = ctx.sub(h.at(row, j), &t);
                h.set(row, j, v);
            }
            for i in 0..n {
                let t = ctx.mul(&f, h.at(i, row));
                let v = ctx.add(h.at(i, col + 1), &t);
                h.set(i, col + 1, v);
            }
        }
    }
    // p_i = (t - H[i-1][i-1]) p_{i-1}
    //       - sum_j H[i-1-j][i-1] (prod of j subdiagonal entries) p_{i-1-j}
    let mut ps: Vec<Poly> = vec![Poly::one(&ctx)];
    for i in 1..=n {
        let lin = Poly::from_elems(&ctx, vec![ctx.neg(h.at(i - 1, i - 1)), ctx.one()]);
        let mut p = lin.mul(&ctx, &ps[i - 1]);
        let mut subdiag = ctx.one();
        for j in 1..i {
            subdiag = ctx.mul(&subdiag, h.at(i - j, i - j - 1));
            if ctx.is_zero(&subdiag) {
                break;
            }
            let coef = ctx.mul(h.at(i - 1 - j, i - 1), &subdiag);
            let term = Poly::constant(&ctx, coef).mul(&ctx, &ps[i - 1 - j]);
            p = p.sub(&ctx, &term);
        }
        ps.push(p);
    }
    ps.pop().unwrap()
}

// ---------------------------------------------------------------------------
// Trace forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceForm {
    /// Tr(X^T Y): the standard inner product of flattenings.
    Transpose,
    /// Tr(XY): the form defining the hull.
    Plain,
}

/// Tr(X^T Y) or Tr(XY), computed entrywise without forming the product.
pub fn trace_pairing(x: &Mat, y: &Mat, form: TraceForm) -> Result<FieldElem, MatError> {
    let ctx = x.ctx();
    match form {
        TraceForm::Transpose => {
            if (x.rows(), x.cols()) != (y.rows(), y.cols()) {
                return Err(MatError::DimensionMismatch(
                    "transpose pairing needs equal shapes".into(),
                ));
            }
            let mut acc = ctx.zero();
            for i in 0..x.rows() {
                for j in 0..x.cols() {
                    acc = ctx.add(&acc, &ctx.mul(x.at(i, j), y.at(i, j)));
                }
            }
            Ok(acc)
        }
        TraceForm::Plain => {
            if x.cols() != y.rows() || x.rows() != y.cols() {
                return Err(MatError::DimensionMismatch(
                    "plain pairing needs X: m x n, Y: n x m".into(),
                ));
            }
            let mut acc = ctx.zero();
            for i in 0..x.rows() {
                for j in 0..x.cols() {
                    acc = ctx.add(&acc, &ctx.mul(x.at(i, j), y.at(j, i)));
                }
            }
            Ok(acc)
        }
    }
}

// ---------------------------------------------------------------------------
// Sylvester-type commutant
// ---------------------------------------------------------------------------

/// Basis of {X : VX = XU} as a subspace of F_q^{m^2} (row-major flattening).
pub fn solve_sylvester_commutant(u: &Mat, v: &Mat) -> Subspace {
    assert!(u.is_square() && v.is_square() && u.rows() == v.rows());
    let ctx = u.ctx().clone();
    let m = u.rows();
    // Equation (i,j): sum_a V[i][a] X[a][j] - sum_b X[i][b] U[b][j] = 0.
    let mut sys = Mat::zeros(&ctx, m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            let eq = i * m + j;
            for a in 0..m {
                let cur = sys.at(eq, a * m + j).clone();
                sys.set(eq, a * m + j, ctx.add(&cur, v.at(i, a)));
            }
            for b in 0..m {
                let cur = sys.at(eq, i * m + b).clone();
                sys.set(eq, i * m + b, ctx.sub(&cur, u.at(b, j)));
            }
        }
    }
    kernel(&sys)
}

// ---------------------------------------------------------------------------
// Subspaces of F_q^n
// ---------------------------------------------------------------------------

/// A subspace of F_q^n, stored as an RREF basis matrix (full row rank);
/// equality of subspaces is entrywise equality of bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ctx: Arc<FieldCtx>,
    ambient: usize,
    basis: Mat,
}

impl Subspace {
    pub fn from_span(ctx: &Arc<FieldCtx>, ambient: usize, rows: Vec<Vec<FieldElem>>) -> Subspace {
        if rows.is_empty() {
            return Subspace {
                ctx: Arc::clone(ctx),
                ambient,
                basis: Mat::zeros(ctx, 0, ambient),
            };
        }
        let m = Mat::from_rows(ctx, rows);
        assert_eq!(m.cols(), ambient);
        let r = rref(&m);
        let mut basis_rows = Vec::with_capacity(r.rank);
        for i in 0..r.rank {
            basis_rows.push((0..ambient).map(|j| r.mat.at(i, j).clone()).collect());
        }
        Subspace {
            ctx: Arc::clone(ctx),
            ambient,
            basis: Mat::from_rows(ctx, basis_rows),
        }
    }

    pub fn zero(ctx: &Arc<FieldCtx>, ambient: usize) -> Subspace {
        Subspace::from_span(ctx, ambient, Vec::new())
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_row(&self, i: usize) -> Vec<FieldElem> {
        (0..self.ambient).map(|j| self.basis.at(i, j).clone()).collect()
    }

    /// Membership: reduce v against the RREF basis.
    pub fn contains(&self, v: &[FieldElem]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let ctx = &self.ctx;
        let mut v = v.to_vec();
        for i in 0..self.dim() {
            let pivot = (0..self.ambient)
                .find(|&j| !ctx.is_zero(self.basis.at(i, j)))
                .expect("basis rows are nonzero");
            if !ctx.is_zero(&v[pivot]) {
                let f = v[pivot].clone();
                for j in 0..self.ambient {
                    let t = ctx.mul(&f, self.basis.at(i, j));
                    v[j] = ctx.sub(&v[j], &t);
                }
            }
        }
        v.iter().all(|e| ctx.is_zero(e))
    }

    /// Random element: uniform coefficients in the basis.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<FieldElem> {
        let ctx = &self.ctx;
        let mut v = vec![ctx.zero(); self.ambient];
        for i in 0..self.dim() {
            let c = ctx.random_elem(rng);
            if ctx.is_zero(&c) {
                continue;
            }
            for j in 0..self.ambient {
                let t = ctx.mul(&c, self.basis.at(i, j));
                v[j] = ctx.add(&v[j], &t);
            }
        }
        v
    }
}
