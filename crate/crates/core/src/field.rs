//! Exact arithmetic in F_q (q an odd prime) and in extensions F_{q^d},
//! together with univariate polynomial arithmetic, factorization, root
//! finding and Lagrange interpolation over these fields.
//!
//! Elements are vectors of machine-word residues (constant coefficient
//! first); q is restricted to odd primes below 2^61 so products of residues
//! fit in a double-width multiply. Extensions are built in a single level
//! as F_q\[x\]/(modulus_poly).

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Residues are kept below 2^61 so `a * b` fits in u128 with headroom.
pub const MAX_PRIME_BITS: u32 = 61;

/// Retry cap for the probabilistic equal-degree splitting step.
const EDF_RETRY_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime below 2^{MAX_PRIME_BITS}")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size q^d does not fit in 128 bits")]
    SizeOverflow,
    #[error("inverse of zero field element")]
    ZeroInverse,
    #[error("modulus polynomial is not irreducible over F_q")]
    NotIrreducible,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("duplicate abscissa in interpolation points")]
    DuplicateAbscissa,
    #[error("interpolation needs at least one point")]
    EmptyInterpolation,
    #[error("equal-degree splitting gave up after {0} attempts")]
    SplitRetryExhausted(usize),
    #[error("element has {got} coefficients, context expects {want}")]
    CoeffLength { got: usize, want: usize },
    #[error("operation requires a prime-field context")]
    NotPrimeField,
}

// ---------------------------------------------------------------------------
// Field context
// ---------------------------------------------------------------------------

/// A finite field F_{q^d}: the odd prime q, extension degree d and, for
/// d > 1, the monic irreducible modulus polynomial defining the extension.
///
/// Contexts are immutable; operations are pure functions of their inputs, so
/// a context can be shared freely across threads behind an [`Arc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    q: u64,
    d: usize,
    /// Monic modulus of degree d, constant term first; `None` iff d == 1.
    modulus: Option<Vec<u64>>,
    /// q^d, precomputed; bounded to u128 at construction.
    size: u128,
}

impl FieldCtx {
    /// The prime field F_q.
    pub fn prime(q: u64) -> Result<Arc<FieldCtx>, FieldError> {
        check_odd_prime(q)?;
        Ok(Arc::new(FieldCtx {
            q,
            d: 1,
            modulus: None,
            size: q as u128,
        }))
    }

    /// The extension F_{q^d} with a canonical (seed-0) modulus polynomial.
    pub fn extension(q: u64, d: usize) -> Result<Arc<FieldCtx>, FieldError> {
        if d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if d == 1 {
            return Self::prime(q);
        }
        let base = Self::prime(q)?;
        let modulus = find_irreducible(&base, d, 0)?;
        let coeffs: Vec<u64> = modulus.coeffs.iter().map(|c| c.coeffs[0]).collect();
        Self::with_modulus(q, coeffs)
    }

    /// The extension defined by an explicit monic modulus (constant term
    /// first, length d + 1). Irreducibility is verified by factoring.
    pub fn with_modulus(q: u64, modulus: Vec<u64>) -> Result<Arc<FieldCtx>, FieldError> {
        check_odd_prime(q)?;
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let d = modulus.len() - 1;
        let size = checked_pow(q, d).ok_or(FieldError::SizeOverflow)?;
        let modulus: Vec<u64> = modulus.into_iter().map(|c| c % q).collect();
        if modulus[d] != 1 {
            return Err(FieldError::NotIrreducible);
        }
        let base = Self::prime(q)?;
        let modulus_poly = Poly::from_residues(&base, &modulus);
        let factors = poly_factor(&base, &modulus_poly)?;
        if factors.len() != 1 || factors[0].1 != 1 || factors[0].0.degree() != Some(d) {
            return Err(FieldError::NotIrreducible);
        }
        Ok(Arc::new(FieldCtx {
            q,
            d,
            modulus: Some(modulus),
            size,
        }))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Number of elements, q^d.
    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn is_prime_field(&self) -> bool {
        self.d == 1
    }

    pub fn modulus_coeffs(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    // -- element constructors ------------------------------------------------

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.d],
        }
    }

    pub fn one(&self) -> FieldElem {
        let mut coeffs = vec![0; self.d];
        coeffs[0] = 1;
        FieldElem { coeffs }
    }

    /// The element represented by an integer, reduced mod q.
    pub fn from_u64(&self, r: u64) -> FieldElem {
        let mut coeffs = vec![0; self.d];
        coeffs[0] = r % self.q;
        FieldElem { coeffs }
    }

    /// Build an element from its coefficient vector (constant term first);
    /// shorter vectors are zero-padded.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() > self.d {
            return Err(FieldError::CoeffLength {
                got: coeffs.len(),
                want: self.d,
            });
        }
        let mut out = vec![0; self.d];
        for (i, &c) in coeffs.iter().enumerate() {
            out[i] = c % self.q;
        }
        Ok(FieldElem { coeffs: out })
    }

    /// Embed a prime-field element into this context.
    pub fn embed(&self, a: &FieldElem) -> FieldElem {
        debug_assert_eq!(a.coeffs.len(), 1);
        self.from_u64(a.coeffs[0])
    }

    /// The base-field residue of `a` if all extension coordinates vanish.
    pub fn to_base(&self, a: &FieldElem) -> Option<u64> {
        if a.coeffs[1..].iter().all(|&c| c == 0) {
            Some(a.coeffs[0])
        } else {
            None
        }
    }

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem {
            coeffs: (0..self.d).map(|_| rng.random_range(0..self.q)).collect(),
        }
    }

    // -- arithmetic -----------------------------------------------------------

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| add_mod(x, y, self.q))
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| sub_mod(x, y, self.q))
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a.coeffs.iter().map(|&x| sub_mod(0, x, self.q)).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if self.d == 1 {
            return FieldElem {
                coeffs: vec![mul_mod(a.coeffs[0], b.coeffs[0], self.q)],
            };
        }
        // Schoolbook product followed by reduction mod the modulus poly.
        let mut prod = vec![0u64; 2 * self.d - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, self.q), self.q);
            }
        }
        self.reduce_raw(&mut prod);
        prod.truncate(self.d);
        FieldElem { coeffs: prod }
    }

    /// In-place reduction of a raw coefficient vector mod the modulus poly.
    fn reduce_raw(&self, coeffs: &mut Vec<u64>) {
        let modulus = self.modulus.as_ref().expect("reduce_raw on prime field");
        let d = self.d;
        while coeffs.len() > d {
            let top = coeffs.len() - 1;
            let lead = coeffs[top];
            if lead != 0 {
                // modulus is monic: subtract lead * x^(top - d) * modulus.
                for (i, &mc) in modulus.iter().enumerate().take(d) {
                    let idx = top - d + i;
                    coeffs[idx] = sub_mod(coeffs[idx], mul_mod(lead, mc, self.q), self.q);
                }
            }
            coeffs.pop();
        }
        while coeffs.len() < d {
            coeffs.push(0);
        }
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, computed as a^(q^d - 2).
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.size - 2))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

/// An element of F_{q^d}: d residues mod q, constant coefficient first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// The residue of a prime-field element.
    pub fn residue(&self) -> u64 {
        debug_assert_eq!(self.coeffs.len(), 1);
        self.coeffs[0]
    }
}

// ---------------------------------------------------------------------------
// Residue arithmetic helpers
// ---------------------------------------------------------------------------

#[inline]
fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, q: u64) -> u64 {
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

fn checked_pow(q: u64, d: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..d {
        acc = acc.checked_mul(q as u128)?;
    }
    Some(acc)
}

fn check_odd_prime(q: u64) -> Result<(), FieldError> {
    if q < 3 || q.is_multiple_of(2) || q >= (1u64 << MAX_PRIME_BITS) || !is_prime_u64(q) {
        return Err(FieldError::NotOddPrime(q));
    }
    Ok(())
}

/// Deterministic Miller-Rabin; the witness set below is exact for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Univariate polynomial over a [`FieldCtx`], constant coefficient first,
/// without trailing zeros (the zero polynomial has an empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(ctx: &FieldCtx) -> Poly {
        Poly {
            coeffs: vec![ctx.one()],
        }
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem) -> Poly {
        Poly::from_elems(ctx, vec![c])
    }

    /// The monomial t.
    pub fn x(ctx: &FieldCtx) -> Poly {
        Poly {
            coeffs: vec![ctx.zero(), ctx.one()],
        }
    }

    pub fn from_elems(ctx: &FieldCtx, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().is_some_and(|c| ctx.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Convenience constructor from integer residues, constant term first.
    pub fn from_residues(ctx: &FieldCtx, coeffs: &[u64]) -> Poly {
        Poly::from_elems(ctx, coeffs.iter().map(|&c| ctx.from_u64(c)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, ctx: &FieldCtx, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self, ctx: &FieldCtx) -> bool {
        self.leading().is_some_and(|c| *c == ctx.one())
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ctx.add(&self.coeff(ctx, i), &other.coeff(ctx, i)))
            .collect();
        Poly::from_elems(ctx, coeffs)
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ctx.sub(&self.coeff(ctx, i), &other.coeff(ctx, i)))
            .collect();
        Poly::from_elems(ctx, coeffs)
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ctx.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = ctx.mul(a, b);
                coeffs[i + j] = ctx.add(&coeffs[i + j], &t);
            }
        }
        Poly::from_elems(ctx, coeffs)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: &FieldElem) -> Poly {
        Poly::from_elems(ctx, self.coeffs.iter().map(|a| ctx.mul(a, c)).collect())
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn divrem(&self, ctx: &FieldCtx, div: &Poly) -> Result<(Poly, Poly), FieldError> {
        let dd = div.degree().ok_or(FieldError::ZeroDivisor)?;
        let lead_inv = ctx.inv(div.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![ctx.zero(); rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let factor = ctx.mul(&rem[top], &lead_inv);
            if !ctx.is_zero(&factor) {
                quot[top - dd] = factor.clone();
                for (i, dc) in div.coeffs.iter().enumerate() {
                    let t = ctx.mul(&factor, dc);
                    rem[top - dd + i] = ctx.sub(&rem[top - dd + i], &t);
                }
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_elems(ctx, quot), Poly::from_elems(ctx, rem)))
    }

    pub fn rem(&self, ctx: &FieldCtx, div: &Poly) -> Result<Poly, FieldError> {
        Ok(self.divrem(ctx, div)?.1)
    }

    pub fn make_monic(&self, ctx: &FieldCtx) -> Result<Poly, FieldError> {
        match self.leading() {
            None => Err(FieldError::ZeroDivisor),
            Some(lc) => {
                let inv = ctx.inv(lc)?;
                Ok(self.scale(ctx, &inv))
            }
        }
    }

    /// Monic gcd; gcd(f, 0) = monic(f).
    pub fn gcd(&self, ctx: &FieldCtx, other: &Poly) -> Result<Poly, FieldError> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(ctx, &b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.make_monic(ctx)
        }
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Poly {
        if self.coeffs.len() < 2 {
            return Poly::zero();
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| ctx.mul(&ctx.from_u64((i as u64 + 1) % ctx.q()), c))
            .collect();
        Poly::from_elems(ctx, coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, ctx: &FieldCtx, at: &FieldElem) -> FieldElem {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = ctx.add(&ctx.mul(&acc, at), c);
        }
        acc
    }

    /// self^e mod m, square-and-multiply.
    pub fn pow_mod(&self, ctx: &FieldCtx, mut e: u128, m: &Poly) -> Result<Poly, FieldError> {
        let mut base = self.rem(ctx, m)?;
        let mut acc = Poly::one(ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base).rem(ctx, m)?;
            }
            base = base.mul(ctx, &base).rem(ctx, m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Embed a polynomial over the prime field into an extension context.
    pub fn embed(&self, ext: &FieldCtx) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| ext.embed(c)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Separability, factorization, roots
// ---------------------------------------------------------------------------

/// True iff gcd(f, f') = 1.
pub fn poly_is_separable(ctx: &FieldCtx, f: &Poly) -> Result<bool, FieldError> {
    let g = f.gcd(ctx, &f.derivative(ctx))?;
    Ok(g.degree() == Some(0))
}

/// Full factorization of a monic polynomial into monic irreducible factors
/// with multiplicities: squarefree decomposition, then distinct-degree and
/// equal-degree (Cantor-Zassenhaus) splitting.
pub fn poly_factor(ctx: &FieldCtx, f: &Poly) -> Result<Vec<(Poly, usize)>, FieldError> {
    let deg = f.degree().ok_or(FieldError::ZeroDivisor)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let f = f.make_monic(ctx)?;
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(ctx, &f)? {
        for (irr, ddeg) in distinct_degree_split(ctx, &part)? {
            for factor in equal_degree_split(ctx, &irr, ddeg)? {
                out.push((factor, mult));
            }
        }
    }
    out.sort_by_key(|a| poly_sort_key(&a.0));
    Ok(out)
}

fn poly_sort_key(p: &Poly) -> (usize, Vec<Vec<u64>>) {
    (
        p.coeffs.len(),
        p.coeffs.iter().rev().map(|c| c.coeffs.clone()).collect(),
    )
}

/// Squarefree decomposition over F_{q^d} (characteristic q); returns
/// pairwise-coprime squarefree monic parts with their multiplicities.
fn squarefree_decomposition(ctx: &FieldCtx, f: &Poly) -> Result<Vec<(Poly, usize)>, FieldError> {
    let mut out = Vec::new();
    // gcd(f, 0) = monic(f), so a vanishing derivative sends everything to
    // the q-th power branch below.
    let mut c = f.gcd(ctx, &f.derivative(ctx))?;
    let mut w = f.divrem(ctx, &c)?.0;
    let mut i = 1usize;
    while w.degree() != Some(0) {
        let y = w.gcd(ctx, &c)?;
        let part = w.divrem(ctx, &y)?.0;
        if part.degree().unwrap_or(0) > 0 {
            out.push((part, i));
        }
        w = y;
        c = c.divrem(ctx, &w)?.0;
        i += 1;
    }
    if c.degree() != Some(0) {
        // c is a q-th power: take the q-th root and recurse.
        let root = pth_root(ctx, &c);
        for (part, mult) in squarefree_decomposition(ctx, &root)? {
            out.push((part, mult * ctx.q() as usize));
        }
    }
    Ok(out)
}

/// The q-th root of a polynomial all of whose exponents are divisible by q;
/// coefficient roots are c^(q^(d-1)).
fn pth_root(ctx: &FieldCtx, f: &Poly) -> Poly {
    let q = ctx.q() as usize;
    let exp: u128 = ctx.size() / ctx.q() as u128;
    let mut coeffs = Vec::new();
    let mut i = 0;
    while i < f.coeffs.len() {
        coeffs.push(ctx.pow(&f.coeffs[i], exp));
        i += q;
    }
    Poly::from_elems(ctx, coeffs)
}

/// Distinct-degree splitting of a squarefree monic polynomial: returns
/// (product of irreducible factors of degree d, d) pairs.
fn distinct_degree_split(ctx: &FieldCtx, f: &Poly) -> Result<Vec<(Poly, usize)>, FieldError> {
    let mut out = Vec::new();
    let mut rem = f.clone();
    let x = Poly::x(ctx);
    let mut h = x.rem(ctx, &rem)?;
    let mut d = 0usize;
    while rem.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(ctx, ctx.size(), &rem)?;
        let g = h.sub(ctx, &x).gcd(ctx, &rem)?;
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), d));
            rem = rem.divrem(ctx, &g)?.0;
            h = h.rem(ctx, &rem)?;
        }
    }
    if rem.degree().unwrap_or(0) > 0 {
        let dd = rem.degree().unwrap();
        out.push((rem, dd));
    }
    Ok(out)
}

/// Equal-degree splitting (Cantor-Zassenhaus for odd q) of a squarefree
/// monic polynomial whose irreducible factors all have degree `d`.
fn equal_degree_split(ctx: &FieldCtx, f: &Poly, d: usize) -> Result<Vec<Poly>, FieldError> {
    let deg = f.degree().unwrap_or(0);
    if deg == d {
        return Ok(vec![f.clone()]);
    }
    // Deterministic internal randomness: factorization output must not
    // depend on caller state.
    let mut rng = crate::rng::rng_from_seed(
        0x9d5f_c0de ^ (deg as u64) << 32 ^ seed_from_poly(f) ^ (d as u64),
    );
    let half = (ctx.size() - 1) / 2;
    for _ in 0..EDF_RETRY_CAP {
        let t = Poly::from_elems(
            ctx,
            (0..deg).map(|_| ctx.random_elem(&mut rng)).collect(),
        );
        if t.degree().unwrap_or(0) == 0 {
            continue;
        }
        // norm = t^(1 + Q + ... + Q^(d-1)) mod f, then s = norm^((Q-1)/2).
        let mut norm = t.rem(ctx, f)?;
        let mut cur = norm.clone();
        for _ in 1..d {
            cur = cur.pow_mod(ctx, ctx.size(), f)?;
            norm = norm.mul(ctx, &cur).rem(ctx, f)?;
        }
        let s = norm.pow_mod(ctx, half, f)?;
        let g = s.sub(ctx, &Poly::one(ctx)).gcd(ctx, f)?;
        let gdeg = g.degree().unwrap_or(0);
        if gdeg > 0 && gdeg < deg {
            let rest = f.divrem(ctx, &g)?.0;
            let mut out = equal_degree_split(ctx, &g, d)?;
            out.extend(equal_degree_split(ctx, &rest, d)?);
            return Ok(out);
        }
    }
    Err(FieldError::SplitRetryExhausted(EDF_RETRY_CAP))
}

fn seed_from_poly(f: &Poly) -> u64 {
    let mut acc = 0xcbf2_9ce4_8422_2325u64;
    for c in &f.coeffs {
        for &r in &c.coeffs {
            acc ^= r;
            acc = acc.wrapping_mul(0x1000_0000_01b3);
        }
    }
    acc
}

/// Degree of the splitting field of a separable polynomial over F_q:
/// the lcm of the degrees of its irreducible factors.
pub fn splitting_degree(ctx: &FieldCtx, f: &Poly) -> Result<usize, FieldError> {
    let factors = poly_factor(ctx, f)?;
    let mut l = 1usize;
    for (p, _) in &factors {
        l = lcm(l, p.degree().unwrap_or(1));
    }
    Ok(l)
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd_usize(a, b) * b
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

/// All roots of `f` in the field of `ctx`, with multiplicity. Coefficients
/// of `f` must live in `ctx` (embed first when coming from the base field).
pub fn poly_roots(ctx: &FieldCtx, f: &Poly) -> Result<Vec<FieldElem>, FieldError> {
    let mut roots = Vec::new();
    for (factor, mult) in poly_factor(ctx, f)? {
        if factor.degree() == Some(1) {
            // monic t - r: the root is -coeff[0].
            let r = ctx.neg(&factor.coeffs[0]);
            for _ in 0..mult {
                roots.push(r.clone());
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// The unique polynomial of degree < n through n points with pairwise
/// distinct abscissae.
pub fn lagrange_interpolate(
    ctx: &FieldCtx,
    points: &[(FieldElem, FieldElem)],
) -> Result<Poly, FieldError> {
    if points.is_empty() {
        return Err(FieldError::EmptyInterpolation);
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].0 == points[j].0 {
                return Err(FieldError::DuplicateAbscissa);
            }
        }
    }
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut num = Poly::constant(ctx, yi.clone());
        let mut den = ctx.one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            // (t - xj)
            let lin = Poly::from_elems(ctx, vec![ctx.neg(xj), ctx.one()]);
            num = num.mul(ctx, &lin);
            den = ctx.mul(&den, &ctx.sub(xi, xj));
        }
        let den_inv = ctx.inv(&den)?;
        acc = acc.add(ctx, &num.scale(ctx, &den_inv));
    }
    Ok(acc)
}

/// A monic irreducible polynomial of degree d over the prime field of
/// `ctx`, deterministic per (q, d, seed): random monic candidates are
/// drawn from a seeded stream and tested by factoring.
pub fn find_irreducible(ctx: &FieldCtx, d: usize, seed: u64) -> Result<Poly, FieldError> {
    if !ctx.is_prime_field() {
        return Err(FieldError::NotPrimeField);
    }
    if d == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if d == 1 {
        return Ok(Poly::x(ctx));
    }
    let mut rng = crate::rng::rng_from_seed(
        seed ^ ctx.q().rotate_left(24) ^ (d as u64).rotate_left(48) ^ 0x1e5e_ab1e,
    );
    loop {
        let mut coeffs: Vec<FieldElem> = (0..d).map(|_| ctx.random_elem(&mut rng)).collect();
        coeffs.push(ctx.one());
        let candidate = Poly::from_elems(ctx, coeffs);
        let factors = poly_factor(ctx, &candidate)?;
        if factors.len() == 1 && factors[0].1 == 1 && factors[0].0.degree() == Some(d) {
            return Ok(candidate);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn f7() -> Arc<FieldCtx> {
        FieldCtx::prime(7).unwrap()
    }

    fn f9() -> Arc<FieldCtx> {
        // F_9 = F_3[x]/(x^2 + 1)
        FieldCtx::with_modulus(3, vec![1, 0, 1]).unwrap()
    }

    #[test]
    fn rejects_even_and_composite_moduli() {
        assert!(FieldCtx::prime(2).is_err());
        assert!(FieldCtx::prime(9).is_err());
        assert!(FieldCtx::prime(1).is_err());
        assert!(FieldCtx::prime(15).is_err());
        assert!(FieldCtx::prime(1_000_003).is_ok());
    }

    #[test]
    fn inv_examples() {
        let ctx = f7();
        // 3 * 5 = 15 = 1 mod 7
        assert_eq!(ctx.inv(&ctx.from_u64(3)).unwrap(), ctx.from_u64(5));
        assert_eq!(ctx.inv(&ctx.one()).unwrap(), ctx.one());
        assert_eq!(ctx.inv(&ctx.zero()), Err(FieldError::ZeroInverse));

        // F_9: x * 2x = 2x^2 = -2 = 1
        let ctx = f9();
        let x = ctx.from_coeffs(&[0, 1]).unwrap();
        let two_x = ctx.from_coeffs(&[0, 2]).unwrap();
        assert_eq!(ctx.inv(&x).unwrap(), two_x);
        assert_eq!(ctx.mul(&x, &two_x), ctx.one());
    }

    #[test]
    fn field_axioms_randomized() {
        for ctx in [f7(), f9(), FieldCtx::prime(1009).unwrap()] {
            let mut rng = rng_from_seed(17);
            for _ in 0..10_000 {
                let a = ctx.random_elem(&mut rng);
                let b = ctx.random_elem(&mut rng);
                let c = ctx.random_elem(&mut rng);
                assert_eq!(ctx.add(&ctx.add(&a, &b), &c), ctx.add(&a, &ctx.add(&b, &c)));
                assert_eq!(
                    ctx.mul(&a, &ctx.add(&b, &c)),
                    ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c))
                );
                if !ctx.is_zero(&a) {
                    assert_eq!(ctx.mul(&a, &ctx.inv(&a).unwrap()), ctx.one());
                }
            }
        }
    }

    #[test]
    fn separability_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let t2_plus_1 = Poly::from_residues(&f3, &[1, 0, 1]);
        assert!(poly_is_separable(&f3, &t2_plus_1).unwrap());
        let t2 = Poly::from_residues(&f3, &[0, 0, 1]);
        assert!(!poly_is_separable(&f3, &t2).unwrap());

        // (t-1)^2 (t+1) over F_7
        let ctx = f7();
        let lin1 = Poly::from_residues(&ctx, &[6, 1]); // t - 1
        let lin2 = Poly::from_residues(&ctx, &[1, 1]); // t + 1
        let f = lin1.mul(&ctx, &lin1).mul(&ctx, &lin2);
        assert!(!poly_is_separable(&ctx, &f).unwrap());
    }

    /// Brute-force root search oracle over a small prime field.
    fn roots_bruteforce(ctx: &FieldCtx, f: &Poly) -> Vec<u64> {
        (0..ctx.q())
            .filter(|&r| ctx.is_zero(&f.eval(ctx, &ctx.from_u64(r))))
            .collect()
    }

    #[test]
    fn factor_t3_minus_1_over_f7() {
        let ctx = f7();
        let f = Poly::from_residues(&ctx, &[6, 0, 0, 1]); // t^3 - 1
        // Oracle: brute-force roots of t^3 - 1 over F_7.
        assert_eq!(roots_bruteforce(&ctx, &f), vec![1, 2, 4]);
        let factors = poly_factor(&ctx, &f).unwrap();
        assert_eq!(factors.len(), 3);
        let mut roots = Vec::new();
        for (p, mult) in &factors {
            assert_eq!(*mult, 1);
            assert_eq!(p.degree(), Some(1));
            roots.push(ctx.neg(&p.coeffs()[0]).residue());
        }
        roots.sort();
        assert_eq!(roots, vec![1, 2, 4]);
    }

    #[test]
    fn factor_irreducible_quadratic_over_f3() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f = Poly::from_residues(&f3, &[1, 0, 1]); // t^2 + 1
        // Oracle: no roots in F_3 and degree 2 imply irreducibility.
        assert!(roots_bruteforce(&f3, &f).is_empty());
        let factors = poly_factor(&f3, &f).unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].0, f);
        assert_eq!(factors[0].1, 1);
    }

    #[test]
    fn factor_difference_of_squares() {
        let ctx = f7();
        let f = Poly::from_residues(&ctx, &[6, 0, 1]); // t^2 - 1
        let factors = poly_factor(&ctx, &f).unwrap();
        assert_eq!(factors.len(), 2);
        let product = factors
            .iter()
            .fold(Poly::one(&ctx), |acc, (p, _)| acc.mul(&ctx, p));
        assert_eq!(product, f);
    }

    #[test]
    fn factor_product_reconstructs_input() {
        let ctx = f7();
        let mut rng = rng_from_seed(5);
        for _ in 0..200 {
            let deg = rng.random_range(1..=6);
            let mut coeffs: Vec<FieldElem> =
                (0..deg).map(|_| ctx.random_elem(&mut rng)).collect();
            coeffs.push(ctx.one());
            let f = Poly::from_elems(&ctx, coeffs);
            let mut product = Poly::one(&ctx);
            for (p, mult) in poly_factor(&ctx, &f).unwrap() {
                assert!(p.is_monic(&ctx));
                for _ in 0..mult {
                    product = product.mul(&ctx, &p);
                }
            }
            assert_eq!(product, f);
        }
    }

    #[test]
    fn factor_handles_pth_powers() {
        let f3 = FieldCtx::prime(3).unwrap();
        // (t + 1)^3 = t^3 + 1 over F_3 has zero derivative.
        let f = Poly::from_residues(&f3, &[1, 0, 0, 1]);
        let factors = poly_factor(&f3, &f).unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].0, Poly::from_residues(&f3, &[1, 1]));
        assert_eq!(factors[0].1, 3);
    }

    #[test]
    fn splitting_degree_is_lcm_of_factor_degrees() {
        let ctx = f7();
        // degrees {1, 1, 2}: (t-1)(t-2)(t^2+1): t^2+1 has no root mod 7.
        let f = Poly::from_residues(&ctx, &[6, 1])
            .mul(&ctx, &Poly::from_residues(&ctx, &[5, 1]))
            .mul(&ctx, &Poly::from_residues(&ctx, &[1, 0, 1]));
        assert!(roots_bruteforce(&ctx, &Poly::from_residues(&ctx, &[1, 0, 1])).is_empty());
        assert_eq!(splitting_degree(&ctx, &f).unwrap(), 2);

        // irreducible of degree m has splitting degree m
        let irr = find_irreducible(&ctx, 5, 3).unwrap();
        assert_eq!(splitting_degree(&ctx, &irr).unwrap(), 5);

        // all linear factors: degree 1
        let f = Poly::from_residues(&ctx, &[6, 1]).mul(&ctx, &Poly::from_residues(&ctx, &[5, 1]));
        assert_eq!(splitting_degree(&ctx, &f).unwrap(), 1);
    }

    #[test]
    fn roots_examples() {
        let ctx = f7();
        let f = Poly::from_residues(&ctx, &[6, 0, 1]); // t^2 - 1
        let roots = poly_roots(&ctx, &f).unwrap();
        let got: Vec<u64> = roots.iter().map(|r| r.residue()).collect();
        assert_eq!(got, vec![1, 6]);

        // t^2 + 1 over F_9: roots are x and 2x
        let ext = f9();
        let f = Poly::from_residues(&FieldCtx::prime(3).unwrap(), &[1, 0, 1]).embed(&ext);
        let roots = poly_roots(&ext, &f).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(ext.is_zero(&f.eval(&ext, r)));
        }
        assert_ne!(roots[0], roots[1]);
    }

    #[test]
    fn separable_polys_split_completely_in_splitting_field() {
        let ctx = f7();
        let mut rng = rng_from_seed(11);
        let mut checked = 0;
        while checked < 50 {
            let deg = rng.random_range(2..=4);
            let mut coeffs: Vec<FieldElem> =
                (0..deg).map(|_| ctx.random_elem(&mut rng)).collect();
            coeffs.push(ctx.one());
            let f = Poly::from_elems(&ctx, coeffs);
            if !poly_is_separable(&ctx, &f).unwrap() {
                continue;
            }
            checked += 1;
            let d = splitting_degree(&ctx, &f).unwrap();
            let ext = FieldCtx::extension(7, d).unwrap();
            let femb = f.embed(&ext);
            let roots = poly_roots(&ext, &femb).unwrap();
            assert_eq!(roots.len(), deg, "separable must split completely");
            for w in roots.windows(2) {
                assert_ne!(w[0], w[1], "separable roots must be distinct");
            }
            for r in &roots {
                assert!(ext.is_zero(&femb.eval(&ext, r)));
            }
        }
    }

    #[test]
    fn interpolation_examples() {
        let ctx = f7();
        // {(1,1),(2,4),(3,2)}: t^2 passes through these (9 = 2 mod 7).
        let pts = vec![
            (ctx.from_u64(1), ctx.from_u64(1)),
            (ctx.from_u64(2), ctx.from_u64(4)),
            (ctx.from_u64(3), ctx.from_u64(2)),
        ];
        let f = lagrange_interpolate(&ctx, &pts).unwrap();
        assert_eq!(f, Poly::from_residues(&ctx, &[0, 0, 1]));
        for (x, y) in &pts {
            assert_eq!(&f.eval(&ctx, x), y);
        }

        let single = lagrange_interpolate(&ctx, &[(ctx.from_u64(5), ctx.from_u64(3))]).unwrap();
        assert_eq!(single, Poly::from_residues(&ctx, &[3]));

        let dup = lagrange_interpolate(
            &ctx,
            &[
                (ctx.from_u64(1), ctx.from_u64(1)),
                (ctx.from_u64(1), ctx.from_u64(2)),
            ],
        );
        assert_eq!(dup, Err(FieldError::DuplicateAbscissa));
    }

    #[test]
    fn interpolate_then_eval_roundtrip() {
        let ctx = FieldCtx::prime(101).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let n = rng.random_range(1..=8);
            let mut xs: Vec<u64> = (0..ctx.q()).collect();
            // partial shuffle for distinct abscissae
            for i in 0..n {
                let j = rng.random_range(i..xs.len());
                xs.swap(i, j);
            }
            let pts: Vec<(FieldElem, FieldElem)> = (0..n)
                .map(|i| (ctx.from_u64(xs[i]), ctx.random_elem(&mut rng)))
                .collect();
            let f = lagrange_interpolate(&ctx, &pts).unwrap();
            assert!(f.degree().map_or(0, |d| d + 1) <= n);
            for (x, y) in &pts {
                assert_eq!(&f.eval(&ctx, x), y);
            }
        }
    }

    #[test]
    fn find_irreducible_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(find_irreducible(&f3, 1, 0).unwrap(), Poly::x(&f3));

        let f = find_irreducible(&f3, 2, 0).unwrap();
        assert_eq!(f.degree(), Some(2));
        assert!(roots_bruteforce(&f3, &f).is_empty());

        let f7 = FieldCtx::prime(7).unwrap();
        let f = find_irreducible(&f7, 3, 0).unwrap();
        let factors = poly_factor(&f7, &f).unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].1, 1);

        // deterministic per (q, d, seed)
        assert_eq!(find_irreducible(&f7, 3, 9).unwrap(), find_irreducible(&f7, 3, 9).unwrap());
    }

    #[test]
    fn factorization_over_extension_contexts() {
        // F_9: t^2 - x has the two square roots of x as its factors' roots
        let ext = f9();
        let mut rng = rng_from_seed(13);
        for _ in 0..40 {
            let deg = rng.random_range(1..=4);
            let mut coeffs: Vec<FieldElem> = (0..deg).map(|_| ext.random_elem(&mut rng)).collect();
            coeffs.push(ext.one());
            let f = Poly::from_elems(&ext, coeffs);
            let mut product = Poly::one(&ext);
            for (p, mult) in poly_factor(&ext, &f).unwrap() {
                assert!(p.is_monic(&ext));
                for _ in 0..mult {
                    product = product.mul(&ext, &p);
                }
            }
            assert_eq!(product, f);
        }
        // a planted split: (t - a)(t - b) over F_121 with a != b
        let ext = FieldCtx::extension(11, 2).unwrap();
        let a = ext.from_coeffs(&[3, 1]).unwrap();
        let b = ext.from_coeffs(&[7, 5]).unwrap();
        let f = Poly::from_elems(&ext, vec![ext.neg(&a), ext.one()])
            .mul(&ext, &Poly::from_elems(&ext, vec![ext.neg(&b), ext.one()]));
        let roots = poly_roots(&ext, &f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&a) && roots.contains(&b));
    }

    #[test]
    fn arithmetic_at_the_61_bit_bound() {
        // 2^61 - 1 is prime and sits exactly at the residue-width limit
        let q = (1u64 << 61) - 1;
        let ctx = FieldCtx::prime(q).unwrap();
        let mut rng = rng_from_seed(14);
        for _ in 0..200 {
            let a = ctx.random_elem(&mut rng);
            let b = ctx.random_elem(&mut rng);
            assert_eq!(
                ctx.mul(&ctx.add(&a, &b), &ctx.sub(&a, &b)),
                ctx.sub(&ctx.mul(&a, &a), &ctx.mul(&b, &b))
            );
            if !ctx.is_zero(&a) {
                assert_eq!(ctx.mul(&a, &ctx.inv(&a).unwrap()), ctx.one());
            }
        }
        // the extension tower is capped by the u128 size bound
        assert!(FieldCtx::prime(1u64 << 61).is_err());
        assert!(matches!(
            FieldCtx::with_modulus(q, vec![1, 1, 0, 1]),
            Err(FieldError::SizeOverflow) | Err(FieldError::NotIrreducible)
        ));
    }

    #[test]
    fn extension_ctx_verifies_modulus() {
        assert!(FieldCtx::with_modulus(3, vec![2, 0, 1]).is_err()); // t^2+2=(t-1)(t+1)
        assert!(FieldCtx::with_modulus(3, vec![1, 0, 1]).is_ok());
        let ext = FieldCtx::extension(11, 3).unwrap();
        assert_eq!(ext.size(), 11u128.pow(3));
    }
}
