//! Property-based invariants over randomly drawn fields, polynomials,
//! matrices and codes; proptest shrinks counterexamples to minimal size.

use proptest::prelude::*;

use mce_core::canon::{canonicalize_bruteforce, canonicalize_fast, diamond, CharTuple};
use mce_core::code::random_code;
use mce_core::field::{poly_factor, poly_is_separable, FieldCtx, Poly};
use mce_core::matspace::{charpoly, kernel, random_invertible, rref, Mat};
use mce_core::rng::rng_from_seed;
use rand::Rng;

fn small_primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13, 17])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The product of the factorization reproduces the input exactly, with
    /// monic irreducible factors.
    #[test]
    fn factorization_reconstructs(q in small_primes(), coeffs in prop::collection::vec(0u64..97, 1..7), seed in 0u64..1000) {
        let ctx = FieldCtx::prime(q).unwrap();
        let mut all = coeffs.clone();
        all.push(1); // force monic of degree len(coeffs)
        let f = Poly::from_residues(&ctx, &all);
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let factors = poly_factor(&ctx, &f).unwrap();
        let mut product = Poly::one(&ctx);
        for (p, mult) in &factors {
            prop_assert!(p.is_monic(&ctx));
            for _ in 0..*mult {
                product = product.mul(&ctx, p);
            }
        }
        prop_assert_eq!(product, f.clone());
        // separability agrees with squarefreeness of the factorization
        let squarefree = factors.iter().all(|(_, m)| *m == 1);
        let distinct = {
            let mut seen = std::collections::HashSet::new();
            factors.iter().all(|(p, _)| seen.insert(p.clone()))
        };
        prop_assert_eq!(
            poly_is_separable(&ctx, &f).unwrap(),
            squarefree && distinct
        );
        let _ = seed;
    }

    /// rank + kernel dimension = column count, on arbitrary shapes.
    #[test]
    fn rank_nullity(q in small_primes(), rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
        let ctx = FieldCtx::prime(q).unwrap();
        let mut rng = rng_from_seed(seed);
        let entries = (0..rows * cols).map(|_| ctx.random_elem(&mut rng)).collect();
        let m = Mat::from_flat(&ctx, rows, cols, entries);
        prop_assert_eq!(rref(&m).rank + kernel(&m).dim(), cols);
    }

    /// Characteristic polynomials are conjugation invariants.
    #[test]
    fn charpoly_conjugation_invariant(q in small_primes(), n in 1usize..5, seed in 0u64..1000) {
        let ctx = FieldCtx::prime(q).unwrap();
        let mut rng = rng_from_seed(seed);
        let entries = (0..n * n).map(|_| ctx.random_elem(&mut rng)).collect();
        let m = Mat::from_flat(&ctx, n, n, entries);
        let s = random_invertible(&ctx, n, &mut rng).unwrap();
        let conj = s.mul(&m).mul(&mce_core::matspace::mat_inverse(&s).unwrap());
        prop_assert_eq!(charpoly(&m), charpoly(&conj));
    }

    /// Dual is an involution and complements the dimension.
    #[test]
    fn dual_involution(q in small_primes(), m in 2usize..4, n in 2usize..4, seed in 0u64..1000) {
        let ctx = FieldCtx::prime(q).unwrap();
        let mut rng = rng_from_seed(seed);
        let k = rng.random_range(1..m * n);
        let c = random_code(&ctx, m, n, k, &mut rng, false).unwrap();
        prop_assert_eq!(c.dual().dim(), m * n - k);
        prop_assert!(c.dual().dual().code_equal(&c));
    }

    /// The diamond action is a group action and both canonicalizers are
    /// constant on orbits, with valid witnesses.
    #[test]
    fn canonicalizers_orbit_invariant(q in small_primes(), width in 1usize..5, entries in prop::collection::vec(0u64..97, 4), lambda_raw in 1u64..97, mu_raw in 1u64..97) {
        let ctx = FieldCtx::prime(q).unwrap();
        let t = CharTuple::new(entries.iter().take(width).map(|&e| e % q).collect());
        prop_assume!(!t.is_zero());
        let lambda = lambda_raw % (q - 1) + 1;
        let mu = mu_raw % (q - 1) + 1;
        // action composition
        let ab = diamond(&ctx, lambda * mu % q, &t).unwrap();
        let a_then_b = diamond(&ctx, lambda, &diamond(&ctx, mu, &t).unwrap()).unwrap();
        prop_assert_eq!(ab, a_then_b);
        // orbit invariance + witness soundness for both canonicalizers
        let moved = diamond(&ctx, lambda, &t).unwrap();
        for canonicalize in [canonicalize_bruteforce, canonicalize_fast] {
            let (c1, w1) = canonicalize(&ctx, &t).unwrap();
            let (c2, _) = canonicalize(&ctx, &moved).unwrap();
            prop_assert_eq!(&c1, &c2);
            prop_assert_eq!(diamond(&ctx, w1, &t).unwrap(), c1);
        }
    }

    /// Serialized instances survive a round trip bit-exactly.
    #[test]
    fn instance_serialization_roundtrip(q in small_primes(), seed in 0u64..500) {
        let mut rng = rng_from_seed(seed);
        let m = rng.random_range(2..4usize);
        let n = rng.random_range(2..4usize);
        let k = rng.random_range(1..=m * n);
        let (inst, sol) = mce_core::instances::gen_instance(q, m, n, k, seed).unwrap();
        let mut buf = Vec::new();
        mce_core::instances::write_instance(&mut buf, &inst, Some(&sol)).unwrap();
        let (back, back_sol) = mce_core::instances::read_instance(buf.as_slice()).unwrap();
        prop_assert!(inst.c.code_equal(&back.c));
        prop_assert!(inst.d.code_equal(&back.d));
        let mut buf2 = Vec::new();
        mce_core::instances::write_instance(&mut buf2, &back, back_sol.as_ref()).unwrap();
        prop_assert_eq!(buf, buf2);
    }
}
