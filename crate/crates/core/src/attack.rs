//! The full equivalence attack: preprocessing (transpose and dual-swap
//! normalization), dictionary construction over normalized hull
//! characteristic polynomials, collision search with conjugacy resolution,
//! and recovery of the right-hand matrix Q.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::canon::{compute_normalized_charpoly, CanonCache, CanonError, Canonicalizer};
use crate::code::{MapByA, MatrixCode};
use crate::conjugacy::{solve_conjugacy, ConjugacyInstance, Strategy};
use crate::field::poly_is_separable;
use crate::matspace::{kernel, mat_inverse, Mat};
use crate::rng::{derive_stream_seed, rng_from_seed};

/// Sampling cap when hunting for an invertible kernel element in Q-recovery.
const Q_RECOVERY_RETRY_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttackError {
    #[error("no orientation of the instance satisfies k <= m^2 - 2")]
    OutOfRange,
    #[error("probe budget exhausted without a verified collision (dictionary saturated: {saturated})")]
    Exhausted { saturated: bool },
    #[error("no invertible element found in the Q-recovery solution space")]
    NoInvertibleElement,
    #[error("codes are incompatible: {0}")]
    BadInstance(String),
    #[error("internal verification failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Canon(#[from] CanonError),
}

/// Preprocessing record, kept so solutions can be mapped back.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Transform {
    pub transposed: bool,
    pub dual_swapped: bool,
}

/// Normalize an instance: transpose so that m <= n, then swap both codes
/// for their duals when that lowers the dual dimension, and validate
/// k <= m^2 - 2 (falling back to the other orientation if needed).
pub fn preprocess(
    c: &MatrixCode,
    d: &MatrixCode,
) -> Result<(MatrixCode, MatrixCode, Transform), AttackError> {
    if c.shape() != d.shape() || c.dim() != d.dim() {
        return Err(AttackError::BadInstance(
            "codes must share shape and dimension".into(),
        ));
    }
    let (m0, n0) = c.shape();
    let transposed = m0 > n0;
    let (ct, dt) = if transposed {
        (transpose_code(c), transpose_code(d))
    } else {
        (c.clone(), d.clone())
    };
    let (m, n) = ct.shape();
    let k = ct.dim();
    let kperp = m * n - k;
    // prefer the orientation with the smaller dual
    let prefer_swap = kperp > k;
    for dual_swapped in [prefer_swap, !prefer_swap] {
        let k_eff = if dual_swapped { kperp } else { k };
        if (1..=m * m - 2).contains(&k_eff) {
            let (cp, dp) = if dual_swapped {
                (ct.dual(), dt.dual())
            } else {
                (ct.clone(), dt.clone())
            };
            return Ok((
                cp,
                dp,
                Transform {
                    transposed,
                    dual_swapped,
                },
            ));
        }
    }
    Err(AttackError::OutOfRange)
}

fn transpose_code(c: &MatrixCode) -> MatrixCode {
    let (m, n) = c.shape();
    let mats: Vec<Mat> = c.basis().iter().map(|b| b.transpose()).collect();
    MatrixCode::from_span(c.ctx(), n, m, &mats)
}

/// Map a solution of the preprocessed instance back to the original one.
/// Dual swap: (P, Q) -> ((P^T)^{-1}, (Q^T)^{-1}); transpose:
/// (P, Q) -> ((Q^T)^{-1}, (P^T)^{-1}).
pub fn undo_transform(p: &Mat, q: &Mat, t: Transform) -> Result<(Mat, Mat), AttackError> {
    let inv_t = |x: &Mat| -> Result<Mat, AttackError> {
        mat_inverse(&x.transpose()).map_err(|_| AttackError::Internal("singular solution".into()))
    };
    let (mut p, mut q) = (p.clone(), q.clone());
    if t.dual_swapped {
        p = inv_t(&p)?;
        q = inv_t(&q)?;
    }
    if t.transposed {
        let new_p = inv_t(&q)?;
        let new_q = inv_t(&p)?;
        p = new_p;
        q = new_q;
    }
    Ok((p, q))
}

/// Dictionary size L and probe budget N from the collision-count balance:
/// with roughly q^{m-3} normalized classes, either the birthday split
/// L = N' ~ q^{k_perp/2 - 1} applies (case i), or the classes saturate at
/// L ~ q^{m-3} and the probe side grows to N' ~ q^{k_perp - m + 1}
/// (case ii). A factor-4 safety margin is applied to N.
pub fn choose_budgets(q: u64, m: usize, kperp: usize) -> (u64, u64) {
    const SAFETY: f64 = 4.0;
    const CAP: f64 = (1u64 << 40) as f64;
    let qf = q as f64;
    let pow = |e: f64| -> u64 { qf.powf(e.max(0.0)).min(CAP).ceil().max(1.0) as u64 };
    let case_i = kperp as isize - 2 <= 2 * (m as isize - 3);
    if case_i {
        let l = pow(kperp as f64 / 2.0 - 1.0);
        let n = (SAFETY * pow(kperp as f64 / 2.0 - 1.0) as f64).ceil() as u64;
        (l, n.max(1))
    } else {
        let mut l = pow(m as f64 - 3.0);
        // exact class count caps L when the enumeration is feasible
        if (q as u128).pow(m.saturating_sub(2) as u32) <= 10_000_000 {
            if let Ok(classes) = crate::canon::count_sep_classes(q, m) {
                l = l.min(classes.max(1));
            }
        }
        let n = (SAFETY * pow(kperp as f64 - m as f64 + 1.0) as f64).ceil() as u64;
        (l.max(1), n.max(1))
    }
}

/// Attack configuration; `None` budgets are derived by [`choose_budgets`].
#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub dict_size: Option<u64>,
    pub probes: Option<u64>,
    pub max_wall_samples: Option<u64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub threads: usize,
    pub deterministic: bool,
    pub canonicalizer: Canonicalizer,
    pub use_canon_cache: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            dict_size: None,
            probes: None,
            max_wall_samples: None,
            strategy: Strategy::Auto,
            seed: 0,
            threads: 1,
            deterministic: true,
            canonicalizer: Canonicalizer::BruteForce,
            use_canon_cache: false,
        }
    }
}

/// Per-cause rejection counters for one sampling phase.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SampleStats {
    pub draws: u64,
    pub rank_rejects: u64,
    pub dimension_drops: u64,
    pub hull_dim_other: u64,
    pub dim1_hulls: u64,
    pub not_separable: u64,
    pub zero_constant: u64,
    pub duplicate_keys: u64,
}

#[derive(Default)]
struct AtomicSampleStats {
    draws: AtomicU64,
    rank_rejects: AtomicU64,
    dimension_drops: AtomicU64,
    hull_dim_other: AtomicU64,
    dim1_hulls: AtomicU64,
    not_separable: AtomicU64,
    zero_constant: AtomicU64,
    duplicate_keys: AtomicU64,
}

impl SampleStats {
    /// Fieldwise sum; used when a sampling phase resumes.
    pub fn merged(&self, other: &SampleStats) -> SampleStats {
        SampleStats {
            draws: self.draws + other.draws,
            rank_rejects: self.rank_rejects + other.rank_rejects,
            dimension_drops: self.dimension_drops + other.dimension_drops,
            hull_dim_other: self.hull_dim_other + other.hull_dim_other,
            dim1_hulls: self.dim1_hulls + other.dim1_hulls,
            not_separable: self.not_separable + other.not_separable,
            zero_constant: self.zero_constant + other.zero_constant,
            duplicate_keys: self.duplicate_keys + other.duplicate_keys,
        }
    }
}

impl AtomicSampleStats {
    fn snapshot(&self) -> SampleStats {
        SampleStats {
            draws: self.draws.load(Ordering::Relaxed),
            rank_rejects: self.rank_rejects.load(Ordering::Relaxed),
            dimension_drops: self.dimension_drops.load(Ordering::Relaxed),
            hull_dim_other: self.hull_dim_other.load(Ordering::Relaxed),
            dim1_hulls: self.dim1_hulls.load(Ordering::Relaxed),
            not_separable: self.not_separable.load(Ordering::Relaxed),
            zero_constant: self.zero_constant.load(Ordering::Relaxed),
            duplicate_keys: self.duplicate_keys.load(Ordering::Relaxed),
        }
    }
}

/// One draw from the dual-element sampling loop.
enum Draw {
    RankReject,
    DimensionDrop,
    HullDimOther,
    ZeroConstant,
    NotSeparable,
    Qualified {
        coords: Vec<u64>,
        a: Mat,
        mapped: MatrixCode,
        u: Mat,
        key: Vec<u8>,
    },
}

/// Sample a uniform element of the dual (by coordinates in its canonical
/// basis) and run it through the qualification guards.
fn draw_candidate(
    code: &MatrixCode,
    dual_basis: &[Mat],
    rng: &mut impl Rng,
    canonicalizer: Canonicalizer,
    cache: Option<&CanonCache>,
) -> Result<Draw, CanonError> {
    let ctx = code.ctx().clone();
    let (m, n) = code.shape();
    let coords: Vec<u64> = (0..dual_basis.len())
        .map(|_| rng.random_range(0..ctx.q()))
        .collect();
    let mut a = Mat::zeros(&ctx, m, n);
    for (&c, b) in coords.iter().zip(dual_basis) {
        if c != 0 {
            a = a.add(&b.scale(&ctx.from_u64(c)));
        }
    }
    if a.rank() < m {
        return Ok(Draw::RankReject);
    }
    let mapped = match code.map_by_a(&a) {
        MapByA::DimensionDrop { .. } => return Ok(Draw::DimensionDrop),
        MapByA::Full(code_a) => code_a,
    };
    let hull = mapped.hull().map_err(CanonError::from)?;
    if hull.dim() != 1 {
        return Ok(Draw::HullDimOther);
    }
    let (ncp, u) = compute_normalized_charpoly(&mapped, canonicalizer, cache)?;
    if !ncp.tuple.dictionary_eligible() {
        return Ok(Draw::ZeroConstant);
    }
    let chi = ncp.tuple.to_poly(&ctx, m);
    if !poly_is_separable(&ctx, &chi).unwrap_or(false) {
        return Ok(Draw::NotSeparable);
    }
    Ok(Draw::Qualified {
        key: ncp.tuple.key_bytes(),
        coords,
        a,
        mapped,
        u,
    })
}

/// One draw of the dictionary qualification loop, exposed for the
/// class-distribution statistics: sample A in the dual (by coordinates in
/// `dual_basis`), apply the guards, return the canonical key when the draw
/// qualifies, and update the rejection counters. The caller counts draws.
pub fn sample_qualifying_key(
    code: &MatrixCode,
    dual_basis: &[Mat],
    rng: &mut impl Rng,
    stats: &mut SampleStats,
) -> Result<Option<Vec<u8>>, CanonError> {
    match draw_candidate(code, dual_basis, rng, Canonicalizer::BruteForce, None)? {
        Draw::RankReject => {
            stats.rank_rejects += 1;
            Ok(None)
        }
        Draw::DimensionDrop => {
            stats.dimension_drops += 1;
            Ok(None)
        }
        Draw::HullDimOther => {
            stats.hull_dim_other += 1;
            Ok(None)
        }
        Draw::ZeroConstant => {
            stats.dim1_hulls += 1;
            stats.zero_constant += 1;
            Ok(None)
        }
        Draw::NotSeparable => {
            stats.dim1_hulls += 1;
            stats.not_separable += 1;
            Ok(None)
        }
        Draw::Qualified { key, .. } => {
            stats.dim1_hulls += 1;
            Ok(Some(key))
        }
    }
}

/// Collision dictionary: one value per key, first write wins. Values are
/// stored as the coordinates of A in the canonical dual basis (k_perp field
/// elements per entry); A, C_A and the normalized hull generator U are
/// reconstructed on demand.
pub struct HullDict {
    code: MatrixCode,
    dual_basis: Vec<Mat>,
    canonicalizer: Canonicalizer,
    entries: HashMap<Vec<u8>, Vec<u64>>,
    pub stats: SampleStats,
    /// False when the wall-clock sample budget ran out before L keys.
    pub reached_target: bool,
}

impl HullDict {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn code(&self) -> &MatrixCode {
        &self.code
    }

    pub fn contains_key(&self, key: &[u8]) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.entries.keys()
    }

    /// Reconstruct (A, C_A, U) for a stored key.
    pub fn entry(&self, key: &[u8]) -> Option<(Mat, MatrixCode, Mat)> {
        let coords = self.entries.get(key)?;
        let ctx = self.code.ctx().clone();
        let (m, n) = self.code.shape();
        let mut a = Mat::zeros(&ctx, m, n);
        for (&c, b) in coords.iter().zip(&self.dual_basis) {
            if c != 0 {
                a = a.add(&b.scale(&ctx.from_u64(c)));
            }
        }
        let MapByA::Full(mapped) = self.code.map_by_a(&a) else {
            return None;
        };
        let (ncp, u) = compute_normalized_charpoly(&mapped, self.canonicalizer, None).ok()?;
        debug_assert_eq!(ncp.tuple.key_bytes(), key);
        Some((a, mapped, u))
    }
}

/// Build the dictionary: sample A in the dual of C until it holds L
/// distinct normalized-charpoly keys or the wall budget (default 8 q L)
/// runs out; a short dictionary is still returned with
/// `reached_target = false`.
pub fn construct_dict(code: &MatrixCode, l: u64, cfg: &AttackConfig) -> Result<HullDict, AttackError> {
    let dual_basis: Vec<Mat> = code.dual().basis().to_vec();
    let max_wall = cfg
        .max_wall_samples
        .unwrap_or_else(|| 8 * code.ctx().q() * l.max(1));
    let cache = cfg.use_canon_cache.then(|| CanonCache::new(cfg.canonicalizer));
    let stats = AtomicSampleStats::default();
    let map: Mutex<HashMap<Vec<u8>, Vec<u64>>> = Mutex::new(HashMap::new());
    let workers = if cfg.deterministic { 1 } else { cfg.threads.max(1) };
    let failed: Mutex<Option<CanonError>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for w in 0..workers {
            let seed = if workers == 1 {
                derive_stream_seed(cfg.seed, 0xd1c7)
            } else {
                derive_stream_seed(cfg.seed ^ 0xd1c7, w as u64)
            };
            let map = &map;
            let stats = &stats;
            let failed = &failed;
            let cache = cache.as_ref();
            let dual_basis = &dual_basis;
            scope.spawn(move || {
                let mut rng = rng_from_seed(seed);
                loop {
                    if failed.lock().unwrap().is_some() {
                        return;
                    }
                    {
                        let guard = map.lock().unwrap();
                        if guard.len() as u64 >= l {
                            return;
                        }
                    }
                    let draw_no = stats.draws.fetch_add(1, Ordering::Relaxed);
                    if draw_no >= max_wall {
                        stats.draws.fetch_sub(1, Ordering::Relaxed);
                        return;
                    }
                    match draw_candidate(code, dual_basis, &mut rng, cfg.canonicalizer, cache) {
                        Err(e) => {
                            *failed.lock().unwrap() = Some(e);
                            return;
                        }
                        Ok(Draw::RankReject) => {
                            stats.rank_rejects.fetch_add(1, Ordering::Relaxed);
                        }
                        Ok(Draw::DimensionDrop) => {
                            stats.dimension_drops.fetch_add(1, Ordering::Relaxed);
                        }
                        Ok(Draw::HullDimOther) => {
                            stats.hull_dim_other.fetch_add(1, Ordering::Relaxed);
                        }
                        Ok(Draw::ZeroConstant) => {
                            stats.dim1_hulls.fetch_add(1, Ordering::Relaxed);
                            stats.zero_constant.fetch_add(1, Ordering::Relaxed);
                        }
                        Ok(Draw::NotSeparable) => {
                            stats.dim1_hulls.fetch_add(1, Ordering::Relaxed);
                            stats.not_separable.fetch_add(1, Ordering::Relaxed);
                        }
                        Ok(Draw::Qualified { key, coords, .. }) => {
                            stats.dim1_hulls.fetch_add(1, Ordering::Relaxed);
                            let mut guard = map.lock().unwrap();
                            if guard.len() as u64 >= l {
                                return;
                            }
                            if let std::collections::hash_map::Entry::Vacant(e) = guard.entry(key) {
                                e.insert(coords);
                            } else {
                                stats.duplicate_keys.fetch_add(1, Ordering::Relaxed);
                            }
                        }
                    }
                }
            });
        }
    });

    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e.into());
    }
    let entries = map.into_inner().unwrap();
    let reached_target = entries.len() as u64 >= l;
    Ok(HullDict {
        code: code.clone(),
        dual_basis,
        canonicalizer: cfg.canonicalizer,
        entries,
        stats: stats.snapshot(),
        reached_target,
    })
}

/// A verified collision: A in the dual of C, B in the dual of D, and P
/// conjugating C_A onto D_B.
#[derive(Debug, Clone)]
pub struct Collision {
    pub a: Mat,
    pub b: Mat,
    pub p: Mat,
}

/// Probe-phase report; `found` is None when the budget ran out.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub found: Option<Collision>,
    pub stats: SampleStats,
    pub collisions_tried: u64,
    pub false_positives: u64,
}

/// Probe loop: sample B in the dual of D; the probe counter
/// advances exactly on one-dimensional-hull events. On a key hit, rebuild
/// the dictionary side, intertwine the hull generators and run the
/// conjugacy solver; false positives keep probing.
pub fn find_collision(
    d_code: &MatrixCode,
    dict: &HullDict,
    probes: u64,
    cfg: &AttackConfig,
) -> Result<ProbeReport, AttackError> {
    let dual_basis: Vec<Mat> = d_code.dual().basis().to_vec();
    let cache = cfg.use_canon_cache.then(|| CanonCache::new(cfg.canonicalizer));
    let stats = AtomicSampleStats::default();
    let hull_events = AtomicU64::new(0);
    let collisions = AtomicU64::new(0);
    let false_positives = AtomicU64::new(0);
    let done = AtomicBool::new(false);
    let found: Mutex<Option<(Mat, Mat, Mat)>> = Mutex::new(None);
    let failed: Mutex<Option<CanonError>> = Mutex::new(None);
    let workers = if cfg.deterministic { 1 } else { cfg.threads.max(1) };

    std::thread::scope(|scope| {
        for w in 0..workers {
            let seed = if workers == 1 {
                derive_stream_seed(cfg.seed, 0xf1fd)
            } else {
                derive_stream_seed(cfg.seed ^ 0xf1fd, w as u64)
            };
            let stats = &stats;
            let hull_events = &hull_events;
            let collisions = &collisions;
            let false_positives = &false_positives;
            let done = &done;
            let found = &found;
            let failed = &failed;
            let cache = cache.as_ref();
            let dual_basis = &dual_basis;
            scope.spawn(move || {
                let mut rng = rng_from_seed(seed);
                loop {
                    if done.load(Ordering::Acquire) || failed.lock().unwrap().is_some() {
                        return;
                    }
                    if hull_events.load(Ordering::Relaxed) >= probes {
                        return;
                    }
                    stats.draws.fetch_add(1, Ordering::Relaxed);
                    let draw =
                        match draw_candidate(d_code, dual_basis, &mut rng, cfg.canonicalizer, cache)
                        {
                            Err(e) => {
                                *failed.lock().unwrap() = Some(e);
                                return;
                            }
                            Ok(d) => d,
                        };
                    match draw {
                        Draw::RankReject => {
                            stats.rank_rejects.fetch_add(1, Ordering::Relaxed);
                        }
                        Draw::DimensionDrop => {
                            stats.dimension_drops.fetch_add(1, Ordering::Relaxed);
                        }
                        Draw::HullDimOther => {
                            stats.hull_dim_other.fetch_add(1, Ordering::Relaxed);
                        }
                        Draw::ZeroConstant => {
                            stats.dim1_hulls.fetch_add(1, Ordering::Relaxed);
                            stats.zero_constant.fetch_add(1, Ordering::Relaxed);
                            hull_events.fetch_add(1, Ordering::Relaxed);
                        }
                        Draw::NotSeparable => {
                            stats.dim1_hulls.fetch_add(1, Ordering::Relaxed);
                            stats.not_separable.fetch_add(1, Ordering::Relaxed);
                            hull_events.fetch_add(1, Ordering::Relaxed);
                        }
                        Draw::Qualified {
                            key,
                            a: b_mat,
                            mapped: d_b,
                            u: v,
                            ..
                        } => {
                            stats.dim1_hulls.fetch_add(1, Ordering::Relaxed);
                            hull_events.fetch_add(1, Ordering::Relaxed);
                            let Some((a, c_a, u)) = dict.entry(&key) else {
                                continue;
                            };
                            collisions.fetch_add(1, Ordering::Relaxed);
                            let resolved = ConjugacyInstance::new(
                                c_a.clone(),
                                d_b.clone(),
                                u,
                                v,
                                &mut rng,
                            )
                            .ok()
                            .and_then(|inst| solve_conjugacy(&inst, cfg.strategy, &mut rng).ok());
                            match resolved {
                                Some(p) => {
                                    // the solver verified D_B = P C_A P^{-1};
                                    // re-check before publishing
                                    let ok = c_a
                                        .conjugate(&p)
                                        .map(|conj| conj.code_equal(&d_b))
                                        .unwrap_or(false);
                                    if ok {
                                        let mut slot = found.lock().unwrap();
                                        if slot.is_none() {
                                            *slot = Some((a, b_mat, p));
                                            done.store(true, Ordering::Release);
                                        }
                                        return;
                                    }
                                    false_positives.fetch_add(1, Ordering::Relaxed);
                                }
                                None => {
                                    false_positives.fetch_add(1, Ordering::Relaxed);
                                }
                            }
                        }
                    }
                }
            });
        }
    });

    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e.into());
    }
    Ok(ProbeReport {
        found: found
            .into_inner()
            .unwrap()
            .map(|(a, b, p)| Collision { a, b, p }),
        stats: stats.snapshot(),
        collisions_tried: collisions.load(Ordering::Relaxed),
        false_positives: false_positives.load(Ordering::Relaxed),
    })
}

/// Given P with P C and D equivalent by a right factor, solve the linear
/// system Tr(B_j^T (P C_i) X) = 0 for X, sample invertible kernel elements
/// (X = Q_right with D = (P C) Q_right) and return Q = Q_right^{-1} so that
/// D = P C Q^{-1}.
pub fn recover_q(
    c: &MatrixCode,
    d: &MatrixCode,
    p: &Mat,
    rng: &mut impl Rng,
) -> Result<Mat, AttackError> {
    let ctx = c.ctx().clone();
    let (m, n) = c.shape();
    if d.shape() != (m, n) || c.dim() != d.dim() {
        return Err(AttackError::BadInstance("shape mismatch".into()));
    }
    let pc: Vec<Mat> = c.basis().iter().map(|b| p.mul(b)).collect();
    let dual_d = d.dual();
    let k = c.dim();
    let mut sys = Mat::zeros(&ctx, k * dual_d.dim(), n * n);
    let mut row = 0;
    for ci in &pc {
        let ci_t = ci.transpose();
        for bj in dual_d.basis() {
            // Tr(B^T M X) = sum_{t,s} (M^T B)_{t,s} X_{t,s}
            let coeffs = ci_t.mul(bj);
            for t in 0..n {
                for s in 0..n {
                    sys.set(row, t * n + s, coeffs.at(t, s).clone());
                }
            }
            row += 1;
        }
    }
    let ker = kernel(&sys);
    if ker.dim() == 0 {
        return Err(AttackError::NoInvertibleElement);
    }
    for _ in 0..Q_RECOVERY_RETRY_CAP {
        let q_right = Mat::from_flat(&ctx, n, n, ker.random_element(rng));
        if !q_right.is_invertible() {
            continue;
        }
        let q = mat_inverse(&q_right).expect("just checked invertible");
        // verify D = P C Q^{-1} = (P C) Q_right
        if let Ok(moved) = c.apply_equivalence(p, &q) {
            if moved.code_equal(d) {
                return Ok(q);
            }
        }
    }
    Err(AttackError::NoInvertibleElement)
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct PhaseTimesMs {
    pub preprocess: u128,
    pub dict: u128,
    pub collision: u128,
    pub recover_q: u128,
}

/// Run statistics in the shape emitted as JSON by the CLI.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AttackStats {
    pub draws: u64,
    pub dim1_hulls: u64,
    pub keys: u64,
    pub collisions: u64,
    pub false_positives: u64,
    pub phase_times_ms: PhaseTimesMs,
    pub success: bool,
    pub transform: Transform,
    pub dict_size_target: u64,
    pub probe_budget: u64,
    pub dict_stats: SampleStats,
    pub probe_stats: SampleStats,
}

#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub p: Mat,
    pub q: Mat,
    pub stats: AttackStats,
}

#[derive(Debug)]
pub struct AttackFailure {
    pub error: AttackError,
    pub stats: AttackStats,
}

/// The end-to-end attack: preprocess, build the dictionary on C, probe D
/// for collisions, recover Q, map the solution back through the recorded
/// transform and verify it against the original instance.
pub fn attack(
    c: &MatrixCode,
    d: &MatrixCode,
    cfg: &AttackConfig,
) -> Result<AttackOutcome, Box<AttackFailure>> {
    let mut stats = AttackStats::default();
    let fail = |error: AttackError, stats: &AttackStats| {
        Err(Box::new(AttackFailure {
            error,
            stats: stats.clone(),
        }))
    };

    let t0 = Instant::now();
    let (cp, dp, transform) = match preprocess(c, d) {
        Ok(x) => x,
        Err(e) => return fail(e, &stats),
    };
    stats.transform = transform;
    stats.phase_times_ms.preprocess = t0.elapsed().as_millis();

    let (m, n) = cp.shape();
    let kperp = m * n - cp.dim();
    let (auto_l, auto_n) = choose_budgets(cp.ctx().q(), m, kperp);
    let l = cfg.dict_size.unwrap_or(auto_l);
    let probes = cfg.probes.unwrap_or(auto_n);
    stats.dict_size_target = l;
    stats.probe_budget = probes;

    let t1 = Instant::now();
    let dict = match construct_dict(&cp, l, cfg) {
        Ok(d) => d,
        Err(e) => return fail(e, &stats),
    };
    stats.phase_times_ms.dict = t1.elapsed().as_millis();
    stats.dict_stats = dict.stats;
    stats.keys = dict.len() as u64;

    // Probe until a collision survives Q-recovery or the hull-event budget
    // is gone. A collision whose Q-recovery fails is treated as one more
    // false positive and probing resumes on the remaining budget (with a
    // fresh sampling stream so draws are not replayed).
    let mut probes_left = probes;
    let mut attempt = 0u64;
    let (collision, q_mat) = loop {
        let t2 = Instant::now();
        let round_cfg = AttackConfig {
            seed: if attempt == 0 {
                cfg.seed
            } else {
                derive_stream_seed(cfg.seed, 0xc011 + attempt)
            },
            ..cfg.clone()
        };
        let report = match find_collision(&dp, &dict, probes_left, &round_cfg) {
            Ok(r) => r,
            Err(e) => {
                stats.phase_times_ms.collision += t2.elapsed().as_millis();
                stats.draws = dict.stats.draws + stats.probe_stats.draws;
                stats.dim1_hulls = dict.stats.dim1_hulls + stats.probe_stats.dim1_hulls;
                return fail(e, &stats);
            }
        };
        stats.phase_times_ms.collision += t2.elapsed().as_millis();
        stats.probe_stats = stats.probe_stats.merged(&report.stats);
        stats.collisions += report.collisions_tried;
        stats.false_positives += report.false_positives;
        stats.draws = dict.stats.draws + stats.probe_stats.draws;
        stats.dim1_hulls = dict.stats.dim1_hulls + stats.probe_stats.dim1_hulls;
        probes_left = probes_left.saturating_sub(report.stats.dim1_hulls);
        let Some(collision) = report.found else {
            return fail(
                AttackError::Exhausted {
                    saturated: !dict.reached_target,
                },
                &stats,
            );
        };

        let t3 = Instant::now();
        let mut rng = rng_from_seed(derive_stream_seed(cfg.seed, 0x9007 + attempt));
        match recover_q(&cp, &dp, &collision.p, &mut rng) {
            Ok(q) => {
                stats.phase_times_ms.recover_q += t3.elapsed().as_millis();
                break (collision, q);
            }
            Err(e) => {
                stats.phase_times_ms.recover_q += t3.elapsed().as_millis();
                // a conjugacy hit without an equivalence behind it
                stats.false_positives += 1;
                if probes_left == 0 {
                    return fail(e, &stats);
                }
                attempt += 1;
            }
        }
    };

    let (p_final, q_final) = match undo_transform(&collision.p, &q_mat, transform) {
        Ok(pq) => pq,
        Err(e) => return fail(e, &stats),
    };
    // final soundness gate on the original instance
    let verified = c
        .apply_equivalence(&p_final, &q_final)
        .map(|moved| moved.code_equal(d))
        .unwrap_or(false);
    if !verified {
        return fail(
            AttackError::Internal("final verification failed".into()),
            &stats,
        );
    }
    stats.success = true;
    Ok(AttackOutcome {
        p: p_final,
        q: q_final,
        stats,
    })
}
