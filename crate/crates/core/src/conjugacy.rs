//! Solvers for the distinguished matrix-code conjugacy problem: given
//! square codes C, D with one-dimensional hulls generated by U, V (same
//! separable characteristic polynomial) and an R with V = R U R^{-1}, find
//! P with D = P C P^{-1}.
//!
//! Two routes are provided. The linearized route writes P = R f(U) with
//! f(U)^{-1} = g(U) and solves the bilinear containment R f(U) C g(U) R^{-1}
//! in D after linearizing the products of coefficients; it succeeds exactly
//! when the linear system has a one-dimensional kernel carrying a rank-1
//! coefficient matrix. The diagonalization route passes to the splitting
//! field of the hull charpoly, reduces to a diagonal conjugator f(Delta),
//! solves for the entrywise scale matrix w_ab = f(delta_a)/f(delta_b) that
//! maps one transported code into the other, and interpolates f through the
//! recovered eigenvalues. Every returned P is verified against the
//! conjugation postcondition before being reported.

use rand::Rng;
use thiserror::Error;

use crate::code::MatrixCode;
use crate::field::{
    lagrange_interpolate, poly_is_separable, splitting_degree, FieldCtx, FieldElem, Poly,
};
use crate::matspace::{charpoly, kernel, mat_inverse, solve_sylvester_commutant, Mat};

/// Sampling cap when hunting for an invertible element of the intertwiner
/// space.
const CONJUGATOR_RETRY_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjError {
    #[error("hull generators are not conjugate")]
    NotConjugate,
    #[error("no conjugating matrix found")]
    NoSolution,
    #[error("invalid conjugacy instance: {0}")]
    BadInstance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Linearized,
    Diagonal,
    Auto,
}

/// A conjugacy instance: codes C, D inside F_q^{m x m} whose hulls are
/// spanned by U and V with equal separable characteristic polynomial, and a
/// base-change R in GL_m with V R = R U.
#[derive(Debug, Clone)]
pub struct ConjugacyInstance {
    pub c: MatrixCode,
    pub d: MatrixCode,
    pub u: Mat,
    pub v: Mat,
    pub r: Mat,
}

impl ConjugacyInstance {
    /// Assemble an instance from codes with one-dimensional hulls whose
    /// normalized generators are conjugate; U, V are the given generators
    /// (already scaled to a common characteristic polynomial).
    pub fn new(
        c: MatrixCode,
        d: MatrixCode,
        u: Mat,
        v: Mat,
        rng: &mut impl Rng,
    ) -> Result<ConjugacyInstance, ConjError> {
        let r = find_conjugator(&u, &v, rng)?;
        Ok(ConjugacyInstance { c, d, u, v, r })
    }

    pub fn m(&self) -> usize {
        self.u.rows()
    }
}

/// Outcome of the linearized solver; the kernel dimension is reported for
/// calibration of the one-dimensional-solution-space heuristic.
#[derive(Debug, Clone)]
pub enum Linearized {
    Solved { p: Mat, kernel_dim: usize },
    /// Kernel dimension != 1 or the coefficient matrix is not rank one; the
    /// caller should fall back to the diagonalization route.
    Indeterminate { kernel_dim: usize },
    NoSolution { kernel_dim: usize },
}

impl Linearized {
    pub fn kernel_dim(&self) -> usize {
        match self {
            Linearized::Solved { kernel_dim, .. }
            | Linearized::Indeterminate { kernel_dim }
            | Linearized::NoSolution { kernel_dim } => *kernel_dim,
        }
    }
}

/// Find invertible R with V R = R U, by sampling the intertwiner space
/// {X : VX = XU}. For conjugate U, V with separable charpoly the space has
/// dimension m and invertible elements are dense.
pub fn find_conjugator(u: &Mat, v: &Mat, rng: &mut impl Rng) -> Result<Mat, ConjError> {
    if charpoly(u) != charpoly(v) {
        return Err(ConjError::NotConjugate);
    }
    let space = solve_sylvester_commutant(u, v);
    if space.dim() == 0 {
        return Err(ConjError::NotConjugate);
    }
    let ctx = u.ctx().clone();
    let m = u.rows();
    for _ in 0..CONJUGATOR_RETRY_CAP {
        let flat = space.random_element(rng);
        let cand = Mat::from_flat(&ctx, m, m, flat);
        if cand.is_invertible() {
            debug_assert_eq!(v.mul(&cand), cand.mul(u));
            return Ok(cand);
        }
    }
    Err(ConjError::NotConjugate)
}

/// Linearized solver. Unknowns t_{ab} stand for the products
/// alpha_a beta_b of the coefficients of f and g; one equation per pair
/// (basis element of C, basis element of dual(D)) forces
/// R f(U) C g(U) R^{-1} into D.
pub fn solve_linearized(inst: &ConjugacyInstance) -> Linearized {
    let ctx = inst.c.ctx().clone();
    let m = inst.m();
    let k = inst.c.dim();

    let r_inv = match mat_inverse(&inst.r) {
        Ok(ri) => ri,
        Err(_) => return Linearized::NoSolution { kernel_dim: 0 },
    };
    // Precompute R U^a and U^b R^{-1} for a, b < m.
    let mut u_pows = Vec::with_capacity(m);
    u_pows.push(Mat::identity(&ctx, m));
    for _ in 1..m {
        u_pows.push(u_pows.last().unwrap().mul(&inst.u));
    }
    let left: Vec<Mat> = u_pows.iter().map(|p| inst.r.mul(p)).collect();
    let right: Vec<Mat> = u_pows.iter().map(|p| p.mul(&r_inv)).collect();

    let dual_d = inst.d.dual();
    let rows_count = k * dual_d.dim();
    let mut sys = Mat::zeros(&ctx, rows_count, m * m);
    let mut row = 0;
    for c_l in inst.c.basis() {
        // M_{a,b} = (R U^a) C_l (U^b R^{-1});
        // coefficient of t_{ab} against dual basis B is Tr(B^T M_{a,b}).
        let partial: Vec<Mat> = left.iter().map(|la| la.mul(c_l)).collect();
        for b_r in dual_d.basis() {
            for a in 0..m {
                for b in 0..m {
                    let mab = partial[a].mul(&right[b]);
                    let coeff =
                        crate::matspace::trace_pairing(b_r, &mab, crate::matspace::TraceForm::Transpose)
                            .expect("shapes agree");
                    sys.set(row, a * m + b, coeff);
                }
            }
            row += 1;
        }
    }
    let ker = kernel(&sys);
    let kernel_dim = ker.dim();
    if kernel_dim == 0 {
        return Linearized::NoSolution { kernel_dim };
    }
    if kernel_dim > 1 {
        return Linearized::Indeterminate { kernel_dim };
    }
    // Reshape the solution into the m x m coefficient matrix T = alpha beta^T.
    let t = Mat::from_flat(&ctx, m, m, ker.basis_row(0));
    let Some((pr, pc)) = first_nonzero(&t) else {
        return Linearized::NoSolution { kernel_dim };
    };
    let pivot_inv = ctx.inv(t.at(pr, pc)).expect("nonzero pivot");
    let beta: Vec<FieldElem> = (0..m).map(|b| t.at(pr, b).clone()).collect();
    let alpha: Vec<FieldElem> = (0..m)
        .map(|a| ctx.mul(t.at(a, pc), &pivot_inv))
        .collect();
    // rank-1 check: T must equal alpha beta^T exactly
    for a in 0..m {
        for b in 0..m {
            if ctx.mul(&alpha[a], &beta[b]) != *t.at(a, b) {
                return Linearized::Indeterminate { kernel_dim };
            }
        }
    }
    let f = Poly::from_elems(&ctx, alpha);
    let g = Poly::from_elems(&ctx, beta);
    let fu = inst.u.poly_eval(&f);
    let gu = inst.u.poly_eval(&g);
    // f(U) g(U) must be a nonzero scalar multiple of the identity
    let prod = fu.mul(&gu);
    let c0 = prod.at(0, 0).clone();
    if ctx.is_zero(&c0) || prod != Mat::identity(&ctx, m).scale(&c0) {
        return Linearized::NoSolution { kernel_dim };
    }
    let p = inst.r.mul(&fu);
    if !p.is_invertible() {
        return Linearized::NoSolution { kernel_dim };
    }
    match inst.c.conjugate(&p) {
        Ok(conj) if conj.code_equal(&inst.d) => Linearized::Solved { p, kernel_dim },
        _ => Linearized::NoSolution { kernel_dim },
    }
}

fn first_nonzero(m: &Mat) -> Option<(usize, usize)> {
    let ctx = m.ctx();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !ctx.is_zero(m.at(i, j)) {
                return Some((i, j));
            }
        }
    }
    None
}

/// The instance transported to the splitting field: Cp = S^{-1} R C R^{-1} S
/// and Dp = S^{-1} D S with V = S Delta S^{-1}, Delta diagonal with the
/// (distinct) roots of the hull charpoly on the diagonal.
#[derive(Debug, Clone)]
pub struct DiagonalizedPair {
    pub cp: MatrixCode,
    pub dp: MatrixCode,
    pub delta: Mat,
    pub s: Mat,
}

/// Diagonalize V over the splitting field of its characteristic polynomial
/// and transport both codes; separability guarantees m distinct eigenvalues
/// with one-dimensional eigenspaces.
pub fn reduce_to_diagonal(inst: &ConjugacyInstance) -> Result<DiagonalizedPair, ConjError> {
    let base = inst.c.ctx().clone();
    let m = inst.m();
    let chi = charpoly(&inst.v);
    if !poly_is_separable(&base, &chi).map_err(|e| ConjError::BadInstance(e.to_string()))? {
        return Err(ConjError::BadInstance(
            "hull charpoly must be separable".into(),
        ));
    }
    let deg = splitting_degree(&base, &chi).map_err(|e| ConjError::BadInstance(e.to_string()))?;
    let ext = if deg == 1 {
        base.clone()
    } else {
        FieldCtx::extension(base.q(), deg).map_err(|e| ConjError::BadInstance(e.to_string()))?
    };
    let chi_ext = chi.embed(&ext);
    let roots =
        crate::field::poly_roots(&ext, &chi_ext).map_err(|e| ConjError::BadInstance(e.to_string()))?;
    if roots.len() != m {
        return Err(ConjError::BadInstance(format!(
            "charpoly has {} roots in the splitting field, expected {m}",
            roots.len()
        )));
    }
    let v_ext = inst.v.lift(&ext);
    let mut s = Mat::zeros(&ext, m, m);
    let mut delta = Mat::zeros(&ext, m, m);
    for (i, root) in roots.iter().enumerate() {
        delta.set(i, i, root.clone());
        // eigenvector: kernel of V - root I, one-dimensional by separability
        let mut shifted = v_ext.clone();
        for jj in 0..m {
            let cur = shifted.at(jj, jj).clone();
            shifted.set(jj, jj, ext.sub(&cur, root));
        }
        let eig = kernel(&shifted);
        if eig.dim() != 1 {
            return Err(ConjError::BadInstance(format!(
                "eigenspace of root {i} has dimension {}",
                eig.dim()
            )));
        }
        let col = eig.basis_row(0);
        for (jj, entry) in col.into_iter().enumerate() {
            s.set(jj, i, entry);
        }
    }
    let s_inv = mat_inverse(&s).map_err(|_| ConjError::BadInstance("S is singular".into()))?;
    debug_assert_eq!(s.mul(&delta).mul(&s_inv), v_ext);

    let r_ext = inst.r.lift(&ext);
    let r_ext_inv = mat_inverse(&r_ext).map_err(|_| ConjError::BadInstance("R singular".into()))?;
    let cp_mats: Vec<Mat> = inst
        .c
        .basis()
        .iter()
        .map(|b| s_inv.mul(&r_ext).mul(&b.lift(&ext)).mul(&r_ext_inv).mul(&s))
        .collect();
    let dp_mats: Vec<Mat> = inst
        .d
        .basis()
        .iter()
        .map(|b| s_inv.mul(&b.lift(&ext)).mul(&s))
        .collect();
    let cp = MatrixCode::from_basis(&ext, m, m, inst.c.dim(), &cp_mats)
        .map_err(|e| ConjError::BadInstance(e.to_string()))?;
    let dp = MatrixCode::from_basis(&ext, m, m, inst.d.dim(), &dp_mats)
        .map_err(|e| ConjError::BadInstance(e.to_string()))?;
    Ok(DiagonalizedPair { cp, dp, delta, s })
}

/// Find monic f with deg f < m and Dp = f(Delta) Cp f(Delta)^{-1}, given
/// diagonal Delta with distinct nonzero entries.
///
/// Conjugation by f(Delta) scales entry (a, b) of a matrix by
/// u_a / u_b where u_a = f(delta_a), so the containment
/// f(Delta) Cp f(Delta)^{-1} = Dp is linear in the unknown scale matrix
/// w_ab = u_a / u_b: every basis element C of Cp must satisfy
/// Tr(B^T (w o C)) = 0 against every dual basis element B of Dp, where o is
/// the entrywise product. (The classical slice-and-match route degenerates
/// here: the diagonalized hull generator Delta itself lies in both codes
/// and is cut out by every off-diagonal slice, so one-dimensional slices
/// never expose ratio information.) The kernel of the w-system generically
/// has dimension one, spanned by the true multiplicative matrix
/// w = u (1/u)^T; a rank-one extraction recovers u up to the harmless
/// global scalar and Lagrange interpolation through (delta_a, u_a) gives f.
/// Higher-dimensional kernels are swept by projective enumeration up to a
/// budget, then by random sampling. Every candidate is verified against the
/// conjugation postcondition before being returned.
pub fn find_polynomial_diagonal(
    cp: &MatrixCode,
    dp: &MatrixCode,
    delta: &Mat,
    rng: &mut impl Rng,
    max_rounds: usize,
) -> Result<Poly, ConjError> {
    let ctx = cp.ctx().clone();
    let m = delta.rows();
    let k = cp.dim();
    if dp.dim() != k {
        return Err(ConjError::BadInstance("codes of different dimension".into()));
    }
    let deltas: Vec<FieldElem> = (0..m).map(|i| delta.at(i, i).clone()).collect();

    // w-system: one equation per (basis of Cp, dual basis of Dp) pair.
    let dual_dp = dp.dual();
    let mut sys = Mat::zeros(&ctx, k * dual_dp.dim(), m * m);
    let mut row = 0;
    for c_l in cp.basis() {
        for b_r in dual_dp.basis() {
            for a in 0..m {
                for b in 0..m {
                    let coeff = ctx.mul(b_r.at(a, b), c_l.at(a, b));
                    sys.set(row, a * m + b, coeff);
                }
            }
            row += 1;
        }
    }
    let ker = kernel(&sys);
    match ker.dim() {
        0 => Err(ConjError::NoSolution),
        1 => {
            let w = Mat::from_flat(&ctx, m, m, ker.basis_row(0));
            extract_and_verify(&ctx, cp, dp, &deltas, &w).ok_or(ConjError::NoSolution)
        }
        dim => {
            // kernel has extra (non-multiplicative) directions: sweep the
            // projectivized kernel for a multiplicative point
            let budget: u128 = 4096;
            let points = (ctx.size().pow(dim as u32) - 1) / (ctx.size() - 1);
            if points <= budget {
                let mut combo = vec![ctx.zero(); dim];
                loop {
                    if let Some(f) = try_kernel_combo(&ctx, cp, dp, &deltas, &ker, &combo) {
                        return Ok(f);
                    }
                    if !next_projective(&ctx, &mut combo) {
                        break;
                    }
                }
            } else {
                for _ in 0..max_rounds {
                    let w = Mat::from_flat(&ctx, m, m, ker.random_element(rng));
                    if let Some(f) = extract_and_verify(&ctx, cp, dp, &deltas, &w) {
                        return Ok(f);
                    }
                }
            }
            Err(ConjError::NoSolution)
        }
    }
}

/// Advance a coefficient vector through projective representatives (first
/// nonzero coordinate = 1); returns false after the last one.
fn next_projective(ctx: &FieldCtx, combo: &mut [FieldElem]) -> bool {
    // odometer over all vectors, skipping those whose first nonzero
    // coordinate is not 1
    loop {
        let mut pos = 0;
        loop {
            if pos == combo.len() {
                return false;
            }
            combo[pos] = next_elem(ctx, &combo[pos]);
            if !ctx.is_zero(&combo[pos]) {
                break;
            }
            pos += 1;
        }
        match combo.iter().find(|c| !ctx.is_zero(c)) {
            Some(first) if *first == ctx.one() => return true,
            _ => continue,
        }
    }
}

/// Successor in the fixed enumeration order of field elements (coefficient
/// odometer); wraps to zero after the last element.
fn next_elem(ctx: &FieldCtx, e: &FieldElem) -> FieldElem {
    let mut coeffs = e.coeffs().to_vec();
    for c in coeffs.iter_mut() {
        *c += 1;
        if *c < ctx.q() {
            return ctx.from_coeffs(&coeffs).unwrap();
        }
        *c = 0;
    }
    ctx.zero()
}

fn try_kernel_combo(
    ctx: &std::sync::Arc<FieldCtx>,
    cp: &MatrixCode,
    dp: &MatrixCode,
    deltas: &[FieldElem],
    ker: &crate::matspace::Subspace,
    combo: &[FieldElem],
) -> Option<Poly> {
    let m = deltas.len();
    let mut flat = vec![ctx.zero(); m * m];
    let mut any = false;
    for (i, c) in combo.iter().enumerate() {
        if ctx.is_zero(c) {
            continue;
        }
        any = true;
        for (slot, base) in flat.iter_mut().zip(ker.basis_row(i)) {
            let t = ctx.mul(c, &base);
            *slot = ctx.add(slot, &t);
        }
    }
    if !any {
        return None;
    }
    let w = Mat::from_flat(ctx, m, m, flat);
    extract_and_verify(ctx, cp, dp, deltas, &w)
}

/// Interpret w as a multiplicative ratio matrix u (1/u)^T (up to scalar):
/// all entries nonzero, rank one; read u off the first column, interpolate
/// and verify.
fn extract_and_verify(
    ctx: &std::sync::Arc<FieldCtx>,
    cp: &MatrixCode,
    dp: &MatrixCode,
    deltas: &[FieldElem],
    w: &Mat,
) -> Option<Poly> {
    let m = deltas.len();
    for i in 0..m {
        for j in 0..m {
            if ctx.is_zero(w.at(i, j)) {
                return None;
            }
        }
    }
    // rank-1 check against the first row/column
    let w00_inv = ctx.inv(w.at(0, 0)).ok()?;
    for i in 0..m {
        for j in 0..m {
            let expect = ctx.mul(&ctx.mul(w.at(i, 0), w.at(0, j)), &w00_inv);
            if expect != *w.at(i, j) {
                return None;
            }
        }
    }
    let u_vals: Vec<FieldElem> = (0..m).map(|i| w.at(i, 0).clone()).collect();
    interpolate_and_verify(ctx, cp, dp, deltas, &u_vals)
}

/// Interpolate f through (delta_i, u_i) and verify the conjugation; the
/// monic normalization uses the scalar gauge freedom of f.
fn interpolate_and_verify(
    ctx: &std::sync::Arc<FieldCtx>,
    cp: &MatrixCode,
    dp: &MatrixCode,
    deltas: &[FieldElem],
    u_vals: &[FieldElem],
) -> Option<Poly> {
    let pts: Vec<(FieldElem, FieldElem)> = deltas
        .iter()
        .cloned()
        .zip(u_vals.iter().cloned())
        .collect();
    let f = lagrange_interpolate(ctx, &pts).ok()?;
    let f = f.make_monic(ctx).ok()?;
    let fd = delta_eval(ctx, &f, deltas);
    let conj = cp.conjugate(&fd).ok()?;
    if conj.code_equal(dp) {
        Some(f)
    } else {
        None
    }
}

/// f(Delta) for diagonal Delta, evaluated entrywise.
fn delta_eval(ctx: &FieldCtx, f: &Poly, deltas: &[FieldElem]) -> Mat {
    let m = deltas.len();
    let ctx_arc = std::sync::Arc::new(ctx.clone());
    let mut out = Mat::zeros(&ctx_arc, m, m);
    for (i, d) in deltas.iter().enumerate() {
        out.set(i, i, f.eval(ctx, d));
    }
    out
}

/// Normalizing both hull generators to the canonical characteristic
/// polynomial pins them against each other only up to the diamond
/// stabilizer of the tuple: the solvable relation may be V = nu P U P^{-1}
/// for a stabilizer scalar nu != 1. Enumerate the twisted instances
/// (u -> nu u, fresh intertwiner), the untwisted one first.
fn instance_variants(inst: &ConjugacyInstance, rng: &mut impl Rng) -> Vec<ConjugacyInstance> {
    let mut out = vec![inst.clone()];
    let ctx = inst.c.ctx().clone();
    if !ctx.is_prime_field() {
        return out;
    }
    let Ok(tuple) = crate::canon::tuple_from_poly(&ctx, &charpoly(&inst.u)) else {
        return out;
    };
    if tuple.is_zero() {
        return out;
    }
    for nu in crate::canon::diamond_stabilizer(&ctx, &tuple) {
        if nu == 1 {
            continue;
        }
        let u_twisted = inst.u.scale(&ctx.from_u64(nu));
        if let Ok(r) = find_conjugator(&u_twisted, &inst.v, rng) {
            out.push(ConjugacyInstance {
                c: inst.c.clone(),
                d: inst.d.clone(),
                u: u_twisted,
                v: inst.v.clone(),
                r,
            });
        }
    }
    out
}

/// Diagonalization route across the stabilizer-twisted variants.
pub fn find_p_diag(inst: &ConjugacyInstance, rng: &mut impl Rng) -> Result<Mat, ConjError> {
    for variant in instance_variants(inst, rng) {
        if let Ok(p) = find_p_diag_single(&variant, rng) {
            return Ok(p);
        }
    }
    Err(ConjError::NoSolution)
}

/// Diagonalization route for one instance: reduce to diagonal, find f,
/// descend P = S f(Delta) S^{-1} R to the base field (P is determined up to
/// an extension scalar, so rescaling by the first nonzero entry lands every
/// entry in F_q for genuine solutions), and verify.
fn find_p_diag_single(inst: &ConjugacyInstance, rng: &mut impl Rng) -> Result<Mat, ConjError> {
    let base = inst.c.ctx().clone();
    let m = inst.m();
    let pair = reduce_to_diagonal(inst)?;
    let ext = pair.cp.ctx().clone();
    let s_inv = mat_inverse(&pair.s).map_err(|_| ConjError::BadInstance("S singular".into()))?;
    let r_ext = inst.r.lift(&ext);
    let max_rounds = 8 * m;
    // one retry round for a spurious f that fails base-field descent
    for _ in 0..2 {
        let f = find_polynomial_diagonal(&pair.cp, &pair.dp, &pair.delta, rng, max_rounds)?;
        let deltas: Vec<FieldElem> = (0..m).map(|i| pair.delta.at(i, i).clone()).collect();
        let fd = delta_eval(&ext, &f, &deltas);
        let p_ext = pair.s.mul(&fd).mul(&s_inv).mul(&r_ext);
        let Some((i, j)) = first_nonzero(&p_ext) else {
            continue;
        };
        let scale = ext.inv(p_ext.at(i, j)).expect("nonzero entry");
        let rescaled = p_ext.scale(&scale);
        let Some(p) = rescaled.descend(&base) else {
            // extension coordinates survive: spurious f
            continue;
        };
        if !p.is_invertible() {
            continue;
        }
        match inst.c.conjugate(&p) {
            Ok(conj) if conj.code_equal(&inst.d) => return Ok(p),
            _ => continue,
        }
    }
    Err(ConjError::NoSolution)
}

/// Dispatch across the two solvers, trying each stabilizer-twisted variant
/// of the instance. `Auto` runs the linearized route first and falls back
/// to diagonalization when the kernel is indeterminate.
pub fn solve_conjugacy(
    inst: &ConjugacyInstance,
    strategy: Strategy,
    rng: &mut impl Rng,
) -> Result<Mat, ConjError> {
    for variant in instance_variants(inst, rng) {
        let solved = match strategy {
            Strategy::Linearized => match solve_linearized(&variant) {
                Linearized::Solved { p, .. } => Some(p),
                _ => None,
            },
            Strategy::Diagonal => find_p_diag_single(&variant, rng).ok(),
            Strategy::Auto => match solve_linearized(&variant) {
                Linearized::Solved { p, .. } => Some(p),
                Linearized::Indeterminate { .. } => find_p_diag_single(&variant, rng).ok(),
                Linearized::NoSolution { .. } => None,
            },
        };
        if let Some(p) = solved {
            return Ok(p);
        }
    }
    Err(ConjError::NoSolution)
}
