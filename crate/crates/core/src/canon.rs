//! Normalization of characteristic polynomials of hull generators under the
//! weighted scalar action
//!
//!   lambda ? (a_{m-3}, ..., a_0) = (lambda^3 a_{m-3}, ..., lambda^m a_0),
//!
//! which is how scaling a hull generator U -> lambda U acts on the free
//! coefficients of its characteristic polynomial (the coefficients of
//! t^{m-1} and t^{m-2} vanish because Tr(U) = Tr(U^2) = 0 in odd
//! characteristic).
//!
//! Two canonicalizers are provided. `BruteForce` scans all q - 1 scalars and
//! takes the lexicographically smallest orbit element; it is the reference
//! and the default at desk scale. `Fast` performs a gcd descent on discrete
//! logarithms: at each nonzero weight the residual root-of-unity freedom
//! shrinks from mu_d to mu_{gcd(d, weight)}, and the coefficient's discrete
//! log is reduced to its canonical residue. The two induce the same orbit
//! partition (checked exhaustively in tests); their representatives may
//! differ.

use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::code::{CodeError, MatrixCode};
use crate::field::{FieldCtx, Poly};
use crate::matspace::{charpoly, Mat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("diamond action requires a nonzero scalar")]
    ZeroScalar,
    #[error("cannot canonicalize the zero tuple")]
    ZeroTuple,
    #[error("hull has dimension {0}, expected 1")]
    HullNotOneDim(usize),
    #[error("characteristic polynomial has nonzero coefficient at degree m-1 or m-2")]
    UnexpectedCoefficient,
    #[error("enumeration of q^(m-2) = {0} tuples exceeds the brute-force budget")]
    TooLarge(u128),
    #[error("canonicalization works over the prime field")]
    NotPrimeField,
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// The free coefficients (a_{m-3}, ..., a_0) of a normalized characteristic
/// polynomial chi = t^m + a_{m-3} t^{m-3} + ... + a_0, as prime-field
/// residues. Entry `idx` carries weight `idx + 3` under the diamond action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharTuple {
    pub coeffs: Vec<u64>,
}

impl CharTuple {
    pub fn new(coeffs: Vec<u64>) -> CharTuple {
        CharTuple { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Constant coefficient a_0 (None for m < 3).
    pub fn constant_coeff(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    /// Dictionary eligibility: a_0 != 0, so the lifted polynomial has a
    /// nonzero constant coefficient and its matrix is invertible.
    pub fn dictionary_eligible(&self) -> bool {
        self.constant_coeff().is_some_and(|a0| a0 != 0)
    }

    /// Bit-exact dictionary key: fixed-width big-endian integers. Shared
    /// across parallel workers, so the encoding must not depend on platform.
    pub fn key_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * self.coeffs.len());
        for &c in &self.coeffs {
            out.extend_from_slice(&c.to_be_bytes());
        }
        out
    }

    /// Lift back to the monic polynomial t^m + a_{m-3} t^{m-3} + ... + a_0.
    pub fn to_poly(&self, ctx: &FieldCtx, m: usize) -> Poly {
        assert_eq!(self.coeffs.len() + 2, m, "tuple length must be m - 2");
        let mut coeffs = vec![0u64; m + 1];
        coeffs[m] = 1;
        for (idx, &a) in self.coeffs.iter().enumerate() {
            coeffs[m - 3 - idx] = a;
        }
        Poly::from_residues(ctx, &coeffs)
    }
}

/// Canonical orbit representative together with the scalar that reaches it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormCharPoly {
    pub tuple: CharTuple,
    /// lambda with diamond(lambda, input) = tuple.
    pub scalar: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Canonicalizer {
    /// Scan all scalars, keep the lexicographically smallest orbit element
    /// (integer lift order) and the smallest scalar reaching it.
    BruteForce,
    /// Discrete-log gcd descent over the nonzero weights.
    Fast,
}

/// Extract the char tuple of a degree-m monic polynomial, requiring the
/// coefficients of t^{m-1} and t^{m-2} to vanish.
pub fn tuple_from_poly(ctx: &FieldCtx, chi: &Poly) -> Result<CharTuple, CanonError> {
    if !ctx.is_prime_field() {
        return Err(CanonError::NotPrimeField);
    }
    let m = chi.degree().expect("charpoly is monic");
    assert!(m >= 2);
    if !ctx.is_zero(&chi.coeff(ctx, m - 1)) || !ctx.is_zero(&chi.coeff(ctx, m - 2)) {
        return Err(CanonError::UnexpectedCoefficient);
    }
    let coeffs = (0..m.saturating_sub(2))
        .map(|idx| chi.coeff(ctx, m - 3 - idx).residue())
        .collect();
    Ok(CharTuple::new(coeffs))
}

/// The weighted scalar action: entry idx is multiplied by lambda^(idx + 3).
pub fn diamond(ctx: &FieldCtx, lambda: u64, t: &CharTuple) -> Result<CharTuple, CanonError> {
    let q = ctx.q();
    let lambda = lambda % q;
    if lambda == 0 {
        return Err(CanonError::ZeroScalar);
    }
    let mut pow = mul_mod(mul_mod(lambda, lambda, q), lambda, q); // lambda^3
    let mut coeffs = Vec::with_capacity(t.coeffs.len());
    for &a in &t.coeffs {
        coeffs.push(mul_mod(a, pow, q));
        pow = mul_mod(pow, lambda, q);
    }
    Ok(CharTuple::new(coeffs))
}

/// Reference canonicalizer: the lexicographically smallest orbit element
/// under the canonical integer lift, with the smallest scalar reaching it.
/// O(q * m) time.
pub fn canonicalize_bruteforce(
    ctx: &FieldCtx,
    t: &CharTuple,
) -> Result<(CharTuple, u64), CanonError> {
    if t.is_zero() {
        return Err(CanonError::ZeroTuple);
    }
    let mut best: Option<(CharTuple, u64)> = None;
    for lambda in 1..ctx.q() {
        let cand = diamond(ctx, lambda, t)?;
        match &best {
            Some((cur, _)) if cur.coeffs <= cand.coeffs => {}
            _ => best = Some((cand, lambda)),
        }
    }
    Ok(best.expect("q >= 3"))
}

/// Fast canonicalizer: gcd descent over nonzero weights.
///
/// State: after processing weights i_0 < ... < i_{j-1}, the remaining scalar
/// freedom is the group of d-th roots of unity, d = gcd(q-1, i_0, ..).
/// At the next nonzero weight i the reachable values of the coefficient form
/// a coset of mu_{d/d'}, d' = gcd(d, i); its discrete logs form a residue
/// class mod (q-1) d'/d, and the canonical element is the unique one with
/// log in [0, (q-1) d'/d). The descent stops when d = 1 (the tuple is then
/// pinned) or the weights are exhausted; leftover roots of unity fix every
/// nonzero coefficient, so the representative is orbit-invariant and
/// distinct orbits stay distinct.
pub fn canonicalize_fast(ctx: &FieldCtx, t: &CharTuple) -> Result<(CharTuple, u64), CanonError> {
    if !ctx.is_prime_field() {
        return Err(CanonError::NotPrimeField);
    }
    if t.is_zero() {
        return Err(CanonError::ZeroTuple);
    }
    let q = ctx.q();
    let g = primitive_root(q);
    let dlog = DlogTable::new(q, g);

    let mut d = q - 1;
    let mut lambda: u64 = 1;
    for (idx, &a) in t.coeffs.iter().enumerate() {
        if d == 1 {
            break;
        }
        if a == 0 {
            continue;
        }
        let weight = (idx + 3) as u64;
        // current value of this coefficient after the scalars applied so far
        let v = mul_mod(pow_mod(lambda, weight, q), a, q);
        let s = dlog.log(v);
        let dp = gcd(d, weight);
        // adjustments by alpha in mu_d move the log by multiples of step
        let step = (q - 1) / d * dp;
        let r = s % step;
        let sp = s / step;
        let sub = d / dp;
        if sub > 1 {
            // weight/d' is invertible mod d/d' by maximality of the gcd
            let ip = (weight / dp) % sub;
            let jp = inv_mod(ip, sub).expect("weight/d' coprime to d/d'");
            let e = mul_mod(sp % sub, jp, sub);
            // alpha = g^(-e (q-1)/d) lies in mu_d and alpha^weight v = g^r
            let exp = mod_neg(mul_mod(e, (q - 1) / d, q - 1), q - 1);
            lambda = mul_mod(lambda, pow_mod(g, exp, q), q);
        }
        d = dp;
        debug_assert_eq!(dlog.log(mul_mod(pow_mod(lambda, weight, q), a, q)), r);
    }
    let canon = diamond(ctx, lambda, t)?;
    Ok((canon, lambda))
}

pub fn canonicalize(
    ctx: &FieldCtx,
    t: &CharTuple,
    which: Canonicalizer,
) -> Result<(CharTuple, u64), CanonError> {
    match which {
        Canonicalizer::BruteForce => canonicalize_bruteforce(ctx, t),
        Canonicalizer::Fast => canonicalize_fast(ctx, t),
    }
}

/// Scalars nu with diamond(nu, t) = t: the group of d-th roots of unity for
/// d = gcd(q - 1, weights of the nonzero coefficients). Normalizing the
/// characteristic polynomials of two conjugate hull generators pins them
/// against each other only up to this group, so conjugacy solvers enumerate
/// it. Returned with 1 first, then ascending.
pub fn diamond_stabilizer(ctx: &FieldCtx, t: &CharTuple) -> Vec<u64> {
    let q = ctx.q();
    let mut d = q - 1;
    let mut any_nonzero = false;
    for (idx, &a) in t.coeffs.iter().enumerate() {
        if a != 0 {
            any_nonzero = true;
            d = gcd(d, (idx + 3) as u64);
        }
    }
    if !any_nonzero {
        return (1..q).collect();
    }
    let g = primitive_root(q);
    let step = (q - 1) / d;
    let mut out: Vec<u64> = (0..d).map(|i| pow_mod(g, i * step, q)).collect();
    out.sort_unstable();
    let pos = out.iter().position(|&x| x == 1).expect("identity in group");
    out.swap(0, pos);
    out
}

/// Memo cache for the precomputed-normalization shortcut: when the two
/// highest-weight coefficients (weights 3 and 4, which are coprime) are both
/// nonzero, the canonicalizing scalar is a function of those two residues
/// alone. Off by default; useful for large-q runs. Writes race benignly
/// (all writers store the same value for a key).
pub struct CanonCache {
    which: Canonicalizer,
    map: Mutex<HashMap<(u64, u64), u64>>,
}

impl CanonCache {
    pub fn new(which: Canonicalizer) -> CanonCache {
        CanonCache {
            which,
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Canonicalize with an optional cache keyed by (a_{m-3}, a_{m-4}).
pub fn canonicalize_cached(
    ctx: &FieldCtx,
    t: &CharTuple,
    which: Canonicalizer,
    cache: Option<&CanonCache>,
) -> Result<(CharTuple, u64), CanonError> {
    let Some(cache) = cache else {
        return canonicalize(ctx, t, which);
    };
    assert_eq!(cache.which, which, "cache bound to a different canonicalizer");
    if t.len() < 2 || t.coeffs[0] == 0 || t.coeffs[1] == 0 {
        return canonicalize(ctx, t, which);
    }
    let key = (t.coeffs[0], t.coeffs[1]);
    let hit = cache.map.lock().unwrap().get(&key).copied();
    if let Some(lambda) = hit {
        return Ok((diamond(ctx, lambda, t)?, lambda));
    }
    let (canon, lambda) = canonicalize(ctx, t, which)?;
    cache.map.lock().unwrap().insert(key, lambda);
    Ok((canon, lambda))
}

/// For a square code C inside ker(Tr) whose hull
/// is one-dimensional, return the canonical tuple of the hull generator's
/// characteristic polynomial together with the rescaled generator lambda U.
///
/// A zero tuple (nilpotent-type generator) is returned as-is with scalar 1;
/// it is never dictionary-eligible.
pub fn compute_normalized_charpoly(
    code: &MatrixCode,
    which: Canonicalizer,
    cache: Option<&CanonCache>,
) -> Result<(NormCharPoly, Mat), CanonError> {
    let ctx = code.ctx().clone();
    if !ctx.is_prime_field() {
        return Err(CanonError::NotPrimeField);
    }
    let hull = code.hull()?;
    if hull.dim() != 1 {
        return Err(CanonError::HullNotOneDim(hull.dim()));
    }
    let u = hull.basis()[0].clone();
    let chi = charpoly(&u);
    let tuple = tuple_from_poly(&ctx, &chi)?;
    if tuple.is_zero() {
        return Ok((
            NormCharPoly {
                tuple,
                scalar: 1,
            },
            u,
        ));
    }
    let (canon, lambda) = canonicalize_cached(&ctx, &tuple, which, cache)?;
    let scaled = u.scale(&ctx.from_u64(lambda));
    debug_assert_eq!(
        tuple_from_poly(&ctx, &charpoly(&scaled)).unwrap(),
        canon,
        "scaled generator must realize the canonical tuple"
    );
    Ok((
        NormCharPoly {
            tuple: canon,
            scalar: lambda,
        },
        scaled,
    ))
}

/// Exact number of diamond classes of separable degree-m characteristic
/// polynomials with nonzero constant coefficient, by full enumeration of
/// F_q^{m-2}. Only for tiny parameters: q^{m-2} <= 10^7.
pub fn count_sep_classes(q: u64, m: usize) -> Result<u64, CanonError> {
    let ctx = FieldCtx::prime(q).map_err(|_| CanonError::NotPrimeField)?;
    assert!(m >= 3);
    let width = m - 2;
    let total = (q as u128).pow(width as u32);
    if total > 10_000_000 {
        return Err(CanonError::TooLarge(total));
    }
    let mut classes = std::collections::HashSet::new();
    let mut coeffs = vec![0u64; width];
    loop {
        // a_0 is the last entry; skip non-invertible lifts
        if coeffs[width - 1] != 0 {
            let tuple = CharTuple::new(coeffs.clone());
            let chi = tuple.to_poly(&ctx, m);
            if crate::field::poly_is_separable(&ctx, &chi).unwrap_or(false) {
                let (canon, _) = canonicalize_bruteforce(&ctx, &tuple)?;
                classes.insert(canon.coeffs);
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == width {
                return Ok(classes.len() as u64);
            }
            coeffs[pos] += 1;
            if coeffs[pos] < q {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Residue helpers (prime field, raw u64)
// ---------------------------------------------------------------------------

#[inline]
fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, q);
        }
        a = mul_mod(a, a, q);
        e >>= 1;
    }
    acc
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_neg(a: u64, q: u64) -> u64 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

/// Inverse of a modulo n when gcd(a, n) = 1; None otherwise. n = 1 maps
/// everything to 0.
fn inv_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(n as i128) as u64)
}

/// Smallest primitive root of F_q, by testing prime divisors of q - 1.
pub fn primitive_root(q: u64) -> u64 {
    let factors = prime_factors(q - 1);
    'cand: for g in 2..q {
        for &p in &factors {
            if pow_mod(g, (q - 1) / p, q) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("prime fields have primitive roots")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Baby-step giant-step discrete logarithm table for a fixed generator.
struct DlogTable {
    q: u64,
    g: u64,
    stride: u64,
    giant_step: u64,
    baby: HashMap<u64, u64>,
}

impl DlogTable {
    fn new(q: u64, g: u64) -> DlogTable {
        let stride = (q as f64).sqrt().ceil() as u64 + 1;
        let mut baby = HashMap::with_capacity(stride as usize);
        let mut acc = 1u64;
        for j in 0..stride {
            baby.entry(acc).or_insert(j);
            acc = mul_mod(acc, g, q);
        }
        // g^(-stride)
        let giant_step = pow_mod(pow_mod(g, stride, q), q - 2, q);
        DlogTable {
            q,
            g,
            stride,
            giant_step,
            baby,
        }
    }

    /// s with g^s = v, for v != 0.
    fn log(&self, v: u64) -> u64 {
        debug_assert!(v != 0);
        let mut cur = v % self.q;
        for i in 0..=self.stride {
            if let Some(&j) = self.baby.get(&cur) {
                return (i * self.stride + j) % (self.q - 1);
            }
            cur = mul_mod(cur, self.giant_step, self.q);
        }
        unreachable!("{} is a generator of F_{}^x", self.g, self.q)
    }
}
