//! Planted-instance generation, solution verification, JSON serialization
//! and the statistical experiments over hull dimensions and normalized
//! characteristic-polynomial classes.
//!
//! Instances serialize as versioned JSON (`mce-instance/1`); planted
//! solutions as `mce-solution/1`. Serialized files, not seeds, are the
//! primary exchange artifact; seeds reproduce instances only with this
//! crate's pinned generator (see [`crate::rng`]).

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::SampleStats;
use crate::canon::{compute_normalized_charpoly, Canonicalizer};
use crate::code::{random_code, CodeError, MatrixCode};
use crate::conjugacy::ConjugacyInstance;
use crate::field::{poly_is_separable, FieldCtx, FieldError};
use crate::matspace::{charpoly, random_invertible, Mat};
use crate::rng::{derive_stream_seed, rng_from_seed};

pub const INSTANCE_SCHEMA: &str = "mce-instance/1";
pub const SOLUTION_SCHEMA: &str = "mce-solution/1";

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        InstanceError::Parse(format!(
            "{} (line {}, column {})",
            e,
            e.line(),
            e.column()
        ))
    }
}

impl From<FieldError> for InstanceError {
    fn from(e: FieldError) -> Self {
        InstanceError::Validation(e.to_string())
    }
}

impl From<CodeError> for InstanceError {
    fn from(e: CodeError) -> Self {
        InstanceError::Validation(e.to_string())
    }
}

/// An equivalence-problem instance: two k-dimensional codes of the same
/// shape over F_q.
#[derive(Debug, Clone)]
pub struct Instance {
    pub q: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub c: MatrixCode,
    pub d: MatrixCode,
}

/// The planted witness: invertible P, Q with D = P C Q^{-1}.
#[derive(Debug, Clone)]
pub struct PlantedSolution {
    pub p: Mat,
    pub q: Mat,
}

/// Generate a planted instance: C uniform in Gr_k, P, Q uniform invertible,
/// D = P C Q^{-1}. Deterministic per seed.
pub fn gen_instance(
    q: u64,
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<(Instance, PlantedSolution), InstanceError> {
    let ctx = FieldCtx::prime(q)?;
    if k == 0 || k > m * n {
        return Err(InstanceError::Validation(format!(
            "k = {k} out of range for {m} x {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let c = random_code(&ctx, m, n, k, &mut rng, false)?;
    let p = random_invertible(&ctx, m, &mut rng)
        .map_err(|e| InstanceError::Validation(e.to_string()))?;
    let q_mat = random_invertible(&ctx, n, &mut rng)
        .map_err(|e| InstanceError::Validation(e.to_string()))?;
    let d = c.apply_equivalence(&p, &q_mat)?;
    Ok((
        Instance { q, m, n, k, c, d },
        PlantedSolution { p, q: q_mat },
    ))
}

/// Check D = P C Q^{-1} with P, Q invertible; false on any failure.
pub fn verify_solution(inst: &Instance, p: &Mat, q: &Mat) -> bool {
    if p.rows() != inst.m || p.cols() != inst.m || q.rows() != inst.n || q.cols() != inst.n {
        return false;
    }
    if !p.is_invertible() || !q.is_invertible() {
        return false;
    }
    match inst.c.apply_equivalence(p, q) {
        Ok(moved) => moved.code_equal(&inst.d),
        Err(_) => false,
    }
}

/// A planted conjugacy instance for solver experiments: C inside ker(Tr)
/// with a one-dimensional hull whose generator has a separable
/// characteristic polynomial with nonzero constant coefficient,
/// D = P0 C P0^{-1}, and both hull generators normalized through the
/// dictionary pipeline.
pub fn gen_planted_conjugacy(
    q: u64,
    m: usize,
    k: usize,
    seed: u64,
) -> Result<(ConjugacyInstance, Mat), InstanceError> {
    let ctx = FieldCtx::prime(q)?;
    let mut rng = rng_from_seed(seed);
    let (c, u) = loop {
        let c = random_code(&ctx, m, m, k, &mut rng, true)?;
        let Ok((ncp, u)) = compute_normalized_charpoly(&c, Canonicalizer::BruteForce, None) else {
            continue;
        };
        if !ncp.tuple.dictionary_eligible() {
            continue;
        }
        if !poly_is_separable(&ctx, &charpoly(&u)).unwrap_or(false) {
            continue;
        }
        break (c, u);
    };
    let p0 = random_invertible(&ctx, m, &mut rng)
        .map_err(|e| InstanceError::Validation(e.to_string()))?;
    let d = c.conjugate(&p0)?;
    let (_, v) = compute_normalized_charpoly(&d, Canonicalizer::BruteForce, None)
        .map_err(|e| InstanceError::Validation(e.to_string()))?;
    let inst = ConjugacyInstance::new(c, d, u, v, &mut rng)
        .map_err(|e| InstanceError::Validation(e.to_string()))?;
    Ok((inst, p0))
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Histogram of hull dimensions over uniform codes in Gr_k(ker Tr).
#[derive(Debug, Clone, Serialize)]
pub struct HullDimStats {
    pub q: u64,
    pub m: usize,
    pub k: usize,
    pub samples: u64,
    pub histogram: BTreeMap<usize, u64>,
}

impl HullDimStats {
    pub fn fraction(&self, dim: usize) -> f64 {
        *self.histogram.get(&dim).unwrap_or(&0) as f64 / self.samples as f64
    }

    /// CSV with columns dim, count, fraction.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,count,fraction\n");
        for (dim, count) in &self.histogram {
            out.push_str(&format!(
                "{},{},{}\n",
                dim,
                count,
                *count as f64 / self.samples as f64
            ));
        }
        out
    }
}

/// Sample hull dimensions of uniform codes in Gr_k(ker Tr).
pub fn hull_dim_stats(
    q: u64,
    m: usize,
    k: usize,
    samples: u64,
    seed: u64,
) -> Result<HullDimStats, InstanceError> {
    let ctx = FieldCtx::prime(q)?;
    let mut rng = rng_from_seed(derive_stream_seed(seed, 0x4d1));
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..samples {
        let c = random_code(&ctx, m, m, k, &mut rng, true)?;
        let dim = c.hull()?.dim();
        *histogram.entry(dim).or_insert(0) += 1;
    }
    Ok(HullDimStats {
        q,
        m,
        k,
        samples,
        histogram,
    })
}

/// Frequencies of normalized characteristic-polynomial classes produced by
/// the dictionary sampling loop on a random code.
#[derive(Debug, Clone, Serialize)]
pub struct ClassStats {
    pub q: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub draws: u64,
    pub qualifying: u64,
    pub distinct_keys: u64,
    /// Hex-encoded canonical key -> occurrences.
    pub frequencies: BTreeMap<String, u64>,
    /// max/min frequency over observed classes (asymptotic-uniformity gauge).
    pub max_min_ratio: Option<f64>,
    pub sample_stats: SampleStats,
}

impl ClassStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,count,fraction\n");
        for (key, count) in &self.frequencies {
            out.push_str(&format!(
                "{},{},{}\n",
                key,
                count,
                *count as f64 / self.qualifying.max(1) as f64
            ));
        }
        out
    }
}

/// Run the dictionary sampling loop for `samples` draws on a fresh random
/// code, recording every qualifying canonical tuple (no deduplication).
pub fn charpoly_class_stats(
    q: u64,
    m: usize,
    n: usize,
    k: usize,
    samples: u64,
    seed: u64,
) -> Result<ClassStats, InstanceError> {
    let ctx = FieldCtx::prime(q)?;
    let mut rng = rng_from_seed(derive_stream_seed(seed, 0xc1a5));
    let code = random_code(&ctx, m, n, k, &mut rng, false)?;
    let dual_basis: Vec<Mat> = code.dual().basis().to_vec();
    let mut stats = SampleStats::default();
    let mut frequencies: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..samples {
        stats.draws += 1;
        match crate::attack::sample_qualifying_key(&code, &dual_basis, &mut rng, &mut stats)
            .map_err(|e| InstanceError::Validation(e.to_string()))?
        {
            None => {}
            Some(key) => {
                let hex: String = key.iter().map(|b| format!("{b:02x}")).collect();
                *frequencies.entry(hex).or_insert(0) += 1;
            }
        }
    }
    let qualifying: u64 = frequencies.values().sum();
    let max_min_ratio = if frequencies.is_empty() {
        None
    } else {
        let max = *frequencies.values().max().unwrap() as f64;
        let min = *frequencies.values().min().unwrap() as f64;
        Some(max / min)
    };
    Ok(ClassStats {
        q,
        m,
        n,
        k,
        draws: samples,
        qualifying,
        distinct_keys: frequencies.len() as u64,
        frequencies,
        max_min_ratio,
        sample_stats: stats,
    })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    schema: String,
    q: u64,
    m: usize,
    n: usize,
    k: usize,
    c: Vec<Vec<Vec<u64>>>,
    d: Vec<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<SolutionFile>,
}

#[derive(Serialize, Deserialize, Clone)]
struct SolutionFile {
    schema: String,
    p: Vec<Vec<u64>>,
    q: Vec<Vec<u64>>,
}

fn mat_to_rows(m: &Mat) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j).residue()).collect())
        .collect()
}

fn mat_from_rows(
    ctx: &Arc<FieldCtx>,
    rows: &[Vec<u64>],
    want: (usize, usize),
) -> Result<Mat, InstanceError> {
    if rows.len() != want.0 || rows.iter().any(|r| r.len() != want.1) {
        return Err(InstanceError::Validation(format!(
            "matrix shape mismatch, expected {} x {}",
            want.0, want.1
        )));
    }
    Ok(Mat::from_rows(
        ctx,
        rows.iter()
            .map(|r| r.iter().map(|&v| ctx.from_u64(v)).collect())
            .collect(),
    ))
}

fn code_to_rows(c: &MatrixCode) -> Vec<Vec<Vec<u64>>> {
    c.basis().iter().map(mat_to_rows).collect()
}

fn code_from_rows(
    ctx: &Arc<FieldCtx>,
    mats: &[Vec<Vec<u64>>],
    m: usize,
    n: usize,
    k: usize,
) -> Result<MatrixCode, InstanceError> {
    let basis: Vec<Mat> = mats
        .iter()
        .map(|rows| mat_from_rows(ctx, rows, (m, n)))
        .collect::<Result<_, _>>()?;
    MatrixCode::from_basis(ctx, m, n, k, &basis)
        .map_err(|e| InstanceError::Validation(format!("basis does not span k = {k}: {e}")))
}

/// Serialize an instance (optionally with its planted solution embedded).
pub fn write_instance<W: Write>(
    mut w: W,
    inst: &Instance,
    solution: Option<&PlantedSolution>,
) -> Result<(), InstanceError> {
    let file = InstanceFile {
        schema: INSTANCE_SCHEMA.to_string(),
        q: inst.q,
        m: inst.m,
        n: inst.n,
        k: inst.k,
        c: code_to_rows(&inst.c),
        d: code_to_rows(&inst.d),
        solution: solution.map(|s| SolutionFile {
            schema: SOLUTION_SCHEMA.to_string(),
            p: mat_to_rows(&s.p),
            q: mat_to_rows(&s.q),
        }),
    };
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Parse and validate an instance (plus embedded solution when present).
pub fn read_instance<R: Read>(
    r: R,
) -> Result<(Instance, Option<PlantedSolution>), InstanceError> {
    let file: InstanceFile = serde_json::from_reader(r)?;
    if file.schema != INSTANCE_SCHEMA {
        return Err(InstanceError::Validation(format!(
            "unknown schema {:?}, expected {:?}",
            file.schema, INSTANCE_SCHEMA
        )));
    }
    let ctx = FieldCtx::prime(file.q)?;
    let c = code_from_rows(&ctx, &file.c, file.m, file.n, file.k)?;
    let d = code_from_rows(&ctx, &file.d, file.m, file.n, file.k)?;
    let inst = Instance {
        q: file.q,
        m: file.m,
        n: file.n,
        k: file.k,
        c,
        d,
    };
    let solution = match file.solution {
        None => None,
        Some(sol) => Some(parse_solution(&ctx, &sol, file.m, file.n)?),
    };
    Ok((inst, solution))
}

fn parse_solution(
    ctx: &Arc<FieldCtx>,
    sol: &SolutionFile,
    m: usize,
    n: usize,
) -> Result<PlantedSolution, InstanceError> {
    if sol.schema != SOLUTION_SCHEMA {
        return Err(InstanceError::Validation(format!(
            "unknown solution schema {:?}",
            sol.schema
        )));
    }
    Ok(PlantedSolution {
        p: mat_from_rows(ctx, &sol.p, (m, m))?,
        q: mat_from_rows(ctx, &sol.q, (n, n))?,
    })
}

/// Serialize a solution to its own file.
pub fn write_solution<W: Write>(mut w: W, sol: &PlantedSolution) -> Result<(), InstanceError> {
    let file = SolutionFile {
        schema: SOLUTION_SCHEMA.to_string(),
        p: mat_to_rows(&sol.p),
        q: mat_to_rows(&sol.q),
    };
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Parse a solution file against the dimensions of an instance.
pub fn read_solution<R: Read>(r: R, inst: &Instance) -> Result<PlantedSolution, InstanceError> {
    let file: SolutionFile = serde_json::from_reader(r)?;
    let ctx = FieldCtx::prime(inst.q)?;
    parse_solution(&ctx, &file, inst.m, inst.n)
}

pub fn write_instance_file(
    path: &Path,
    inst: &Instance,
    solution: Option<&PlantedSolution>,
) -> Result<(), InstanceError> {
    write_instance(std::fs::File::create(path)?, inst, solution)
}

pub fn read_instance_file(
    path: &Path,
) -> Result<(Instance, Option<PlantedSolution>), InstanceError> {
    read_instance(std::fs::File::open(path)?)
}

pub fn write_solution_file(path: &Path, sol: &PlantedSolution) -> Result<(), InstanceError> {
    write_solution(std::fs::File::create(path)?, sol)
}

pub fn read_solution_file(path: &Path, inst: &Instance) -> Result<PlantedSolution, InstanceError> {
    read_solution(std::fs::File::open(path)?, inst)
}
