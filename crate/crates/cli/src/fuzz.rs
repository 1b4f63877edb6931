//! Differential harness for the four BTP criteria and the semigroup property.
//!
//! Every instance draws from its own ChaCha stream (seed, index), so reports
//! are independent of thread scheduling and of how many instances run.

use btp_core::band::band_profile;
use btp_core::criteria::{
    is_btp_contiguous, is_btp_delta, is_btp_initial, is_btp_oracle_capped, CriterionVerdict,
};
use btp_core::pbf::{pbf_compose, random_pbf_with, FactorShape, ValueBounds};
use btp_core::scalar::int;
use btp_core::{BandedMatrix, Result};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::document::{emit_matrix, MatrixDocument};
use crate::report::verdict_json;

/// Instance families in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Composition of a fully positive factorization.
    Pbf,
    /// Positive factorization with one factor entry set to zero.
    ZeroedFactor,
    /// Nonnegative integer entries inside a random band.
    DenseNonnegative,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Pbf => "pbf",
            InstanceKind::ZeroedFactor => "zeroed-factor",
            InstanceKind::DenseNonnegative => "dense-nonnegative",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [InstanceKind::Pbf, InstanceKind::ZeroedFactor, InstanceKind::DenseNonnegative]
            .into_iter()
            .find(|k| k.name() == text)
    }
}

pub fn instance_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One corpus matrix of the given kind and shape.
pub fn generate(rng: &mut impl Rng, kind: InstanceKind, n: usize, p: usize, q: usize) -> Result<BandedMatrix> {
    let bounds = ValueBounds::default();
    match kind {
        InstanceKind::Pbf => Ok(pbf_compose(&random_pbf_with(rng, n, p, q, &bounds, FactorShape::Full)?)),
        InstanceKind::ZeroedFactor => {
            let f = random_pbf_with(rng, n, p, q, &bounds, FactorShape::Full)?;
            let (mut lower, diag, mut upper) = (f.lower().to_vec(), f.diag().to_vec(), f.upper().to_vec());
            let total = lower.len() + upper.len();
            if total > 0 {
                let pick = rng.gen_range(0..total);
                let slot = rng.gen_range(0..n - 1);
                if pick < lower.len() {
                    lower[pick][slot] = Zero::zero();
                } else {
                    upper[pick - lower.len()][slot] = Zero::zero();
                }
            }
            let dense = product(n, &lower, &diag, &upper);
            BandedMatrix::from_dense(&dense, p, q)
        }
        InstanceKind::DenseNonnegative => {
            let mut t = BandedMatrix::zeros(n, p, q)?;
            for i in 0..n {
                for j in i.saturating_sub(p)..=(i + q).min(n - 1) {
                    t.set(i, j, int(rng.gen_range(0..4)))?;
                }
            }
            Ok(t)
        }
    }
}

/// Product of bidiagonal factors given by their off-diagonals, without the
/// positivity checks a `PBFactorization` would apply.
fn product(
    n: usize,
    lower: &[Vec<btp_core::Rational>],
    diag: &[btp_core::Rational],
    upper: &[Vec<btp_core::Rational>],
) -> btp_core::Matrix {
    use btp_core::Matrix;
    let bidiagonal = |s: &[btp_core::Rational], below: bool| {
        Matrix::from_fn(n, n, |r, c| {
            if r == c {
                int(1)
            } else if below && r == c + 1 {
                s[c].clone()
            } else if !below && c == r + 1 {
                s[r].clone()
            } else {
                Zero::zero()
            }
        })
    };
    let mut m = Matrix::identity(n);
    for s in lower {
        m = &m * &bidiagonal(s, true);
    }
    m = &m * &Matrix::diagonal(diag);
    for s in upper.iter().rev() {
        m = &m * &bidiagonal(s, false);
    }
    m
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub index: usize,
    pub kind: InstanceKind,
    pub matrix: BandedMatrix,
    /// Oracle, contiguous, initial, Δ.
    pub verdicts: [CriterionVerdict; 4],
}

impl InstanceResult {
    pub fn agree(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict == self.verdicts[0].verdict)
    }
}

#[derive(Debug, Clone)]
pub struct PairResult {
    pub index: usize,
    pub bands: [(usize, usize); 2],
    pub product_band: (usize, usize),
    pub expected_band: (usize, usize),
    pub verdict: CriterionVerdict,
}

impl PairResult {
    pub fn holds(&self) -> bool {
        self.verdict.verdict && self.product_band == self.expected_band
    }
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub instances: Vec<InstanceResult>,
    pub pairs: Vec<PairResult>,
}

impl FuzzReport {
    pub fn disagreements(&self) -> usize {
        self.instances.iter().filter(|r| !r.agree()).count()
    }

    pub fn pair_failures(&self) -> usize {
        self.pairs.iter().filter(|r| !r.holds()).count()
    }

    pub fn passed(&self) -> bool {
        self.disagreements() == 0 && self.pair_failures() == 0
    }

    pub fn to_json(&self) -> Value {
        let btp = self.instances.iter().filter(|r| r.verdicts[0].verdict).count();
        let first = self.instances.iter().find(|r| !r.agree()).map(|r| {
            json!({
                "index": r.index,
                "kind": r.kind.name(),
                "matrix": emit_matrix(&MatrixDocument { matrix: r.matrix.clone(), metadata: None }),
                "verdicts": r.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
            })
        });
        let first_pair = self.pairs.iter().find(|r| !r.holds()).map(|r| {
            json!({
                "index": r.index,
                "bands": r.bands,
                "product_band": r.product_band,
                "expected_band": r.expected_band,
                "verdict": verdict_json(&r.verdict),
            })
        });
        json!({
            "seed": self.seed,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "count": self.instances.len(),
            "btp": btp,
            "non_btp": self.instances.len() - btp,
            "instances": self.instances.iter().map(|r| json!({
                "index": r.index,
                "kind": r.kind.name(),
                "n": r.matrix.n(),
                "p": r.matrix.p(),
                "q": r.matrix.q(),
                "verdicts": r.verdicts.iter().map(|v| v.verdict).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "disagreements": self.disagreements(),
            "first_disagreement": first,
            "semigroup": {
                "pairs": self.pairs.len(),
                "failures": self.pair_failures(),
                "first_failure": first_pair,
            },
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub pairs: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub oracle_cap: usize,
}

const KINDS: [InstanceKind; 3] = [InstanceKind::Pbf, InstanceKind::ZeroedFactor, InstanceKind::DenseNonnegative];

fn run_instance(cfg: &FuzzConfig, index: usize) -> Result<InstanceResult> {
    let mut rng = instance_rng(cfg.seed, index as u64);
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let (p, q) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let kind = KINDS[index % KINDS.len()];
    let matrix = generate(&mut rng, kind, n, p, q)?;
    let verdicts = [
        is_btp_oracle_capped(&matrix, cfg.oracle_cap)?,
        is_btp_contiguous(&matrix),
        is_btp_initial(&matrix),
        is_btp_delta(&matrix),
    ];
    Ok(InstanceResult { index, kind, matrix, verdicts })
}

fn run_pair(cfg: &FuzzConfig, index: usize) -> Result<PairResult> {
    // Pair streams live above the instance streams.
    let mut rng = instance_rng(cfg.seed, (1u64 << 32) + index as u64);
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let mut bands = [(0, 0); 2];
    let mut factors = Vec::with_capacity(2);
    for band in &mut bands {
        *band = (rng.gen_range(0..n), rng.gen_range(0..n));
        factors.push(generate(&mut rng, InstanceKind::Pbf, n, band.0, band.1)?.to_dense());
    }
    let product = factors[0].try_mul(&factors[1])?;
    let expected_band = ((bands[0].0 + bands[1].0).min(n - 1), (bands[0].1 + bands[1].1).min(n - 1));
    let product_band = band_profile(&product)?;
    let banded = BandedMatrix::from_dense(&product, expected_band.0.max(product_band.0), expected_band.1.max(product_band.1))?;
    let verdict = is_btp_oracle_capped(&banded, cfg.oracle_cap)?;
    Ok(PairResult { index, bands, product_band, expected_band, verdict })
}

pub fn fuzz_equivalence(cfg: &FuzzConfig) -> Result<FuzzReport> {
    if cfg.n_min == 0 || cfg.n_min > cfg.n_max {
        return Err(btp_core::Error::Contract(format!("need 1 <= n-min <= n-max, got {}..{}", cfg.n_min, cfg.n_max)));
    }
    if cfg.n_max > cfg.oracle_cap {
        return Err(btp_core::Error::Capacity { what: "fuzz oracle", n: cfg.n_max, cap: cfg.oracle_cap });
    }
    let instances = (0..cfg.count).into_par_iter().map(|i| run_instance(cfg, i)).collect::<Result<Vec<_>>>()?;
    let pairs = (0..cfg.pairs).into_par_iter().map(|i| run_pair(cfg, i)).collect::<Result<Vec<_>>>()?;
    Ok(FuzzReport { seed: cfg.seed, n_min: cfg.n_min, n_max: cfg.n_max, instances, pairs })
}
