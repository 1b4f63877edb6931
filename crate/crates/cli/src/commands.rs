//! The `btp` command surface. `run_command` never panics on bad input and
//! never touches the process; the binary only forwards its streams and code.
//!
//! Exit codes: 0 the property holds, 1 it fails (the report says where),
//! 2 usage, parse or capacity errors.

use std::path::{Path, PathBuf};

use btp_core::criteria::{
    find_pinkus_submatrices_capped, is_btp_contiguous, is_btp_delta, is_btp_initial, is_btp_oracle_capped,
    is_intn_gasca_pena, is_oscillatory_price, is_tn_bruteforce_capped, is_tp_fekete, CriterionVerdict,
    DEFAULT_ORACLE_CAP,
};
use btp_core::error::FactorStage;
use btp_core::minor::determinant;
use btp_core::pbf::{
    darboux, lambda_matrix, pbf_compose, pbf_factorize, random_pbf_with, upsilon_matrix, FactorShape,
    PBFactorization, ValueBounds,
};
use btp_core::recpoly::{
    check_normality, leading_block_signs, random_tp_initial, random_unitriangular, BlockSigns, DegreeMismatch,
    InitialConditions, RecursionTable, Side,
};
use btp_core::scalar::{format_rational, format_scientific, pow10_rational};
use btp_core::spectral::{
    discrete_biorthogonality, eigenvalues_hp_capped, hypothesis_initial_conditions, positivity_audit, LambdaReading,
    DEFAULT_SPECTRAL_CAP,
};
use btp_core::{BandedMatrix, Error, Matrix, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::document::{
    emit_matrix, factorization_json, initial_json, matrix_json, parse_factorization, parse_initial, parse_matrix,
    polynomial_json, MatrixDocument, ParseError,
};
use crate::fuzz::{fuzz_equivalence, generate, instance_rng, FuzzConfig, InstanceKind};
use crate::report::{render, sci, sci_matrix, verdict_json};

pub const ORACLE_CAP_VAR: &str = "BTP_ORACLE_CAP";
pub const SPECTRAL_CAP_VAR: &str = "BTP_SPECTRAL_CAP";

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Size limits for the exponential and the dense spectral routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub oracle: usize,
    pub spectral: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { oracle: DEFAULT_ORACLE_CAP, spectral: DEFAULT_SPECTRAL_CAP }
    }
}

impl Caps {
    pub fn from_env() -> Result<Self, String> {
        let read = |var: &str, default: usize| match std::env::var(var) {
            Ok(text) => text.trim().parse::<usize>().map_err(|_| format!("{var}={text:?} is not a size")),
            Err(_) => Ok(default),
        };
        Ok(Caps { oracle: read(ORACLE_CAP_VAR, DEFAULT_ORACLE_CAP)?, spectral: read(SPECTRAL_CAP_VAR, DEFAULT_SPECTRAL_CAP)? })
    }
}

#[derive(Parser, Debug)]
#[command(name = "btp", version, about = "Exact checks for banded totally positive matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a matrix is banded totally positive.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CriterionArg::All)]
        criterion: CriterionArg,
    },
    /// Positive bidiagonal factorization of a matrix.
    Factorize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cyclic rotation of the factorization by k factors.
    Darboux {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
    },
    /// Left and right recursion polynomials.
    Recpoly {
        #[arg(long)]
        input: PathBuf,
        /// Recurrence steps on each side; defaults to as many as the matrix allows.
        #[arg(long)]
        families: Option<usize>,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// Degree and leading-block checks for the recursion polynomials.
    Normality {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// Certified real spectrum.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 256)]
        precision: u32,
        /// Required decimal digits for the trace and determinant residuals.
        #[arg(long, default_value_t = 30)]
        tolerance: u32,
    },
    /// Discrete biorthogonality at the eigenvalues.
    Biorth {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 256)]
        precision: u32,
        /// Required decimal digits for the residual.
        #[arg(long, default_value_t = 20)]
        tolerance: u32,
        /// Audit weight signs against the factorization hypothesis.
        #[arg(long, value_enum)]
        reading: Option<ReadingArg>,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// The triangular matrices built from the lower and upper factors.
    Lambda {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seeded random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Pbf)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Matrix)]
        format: FormatArg,
    },
    /// Differential test of the four criteria and of products.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Random products to check; defaults to half the count.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
}

#[derive(Args, Debug)]
struct InitialArgs {
    /// Initial data file `{"a0": ..., "b0": ...}`.
    #[arg(long, conflicts_with = "initial_kind")]
    initial: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InitialKind::Identity)]
    initial_kind: InitialKind,
    /// Seed for random initial data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CriterionArg {
    Oracle,
    Contiguous,
    Initial,
    Delta,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InitialKind {
    Identity,
    /// Inverses triangular totally positive.
    Tp,
    /// Unitriangular with random signs.
    Signed,
    /// Unitriangular with inverses that are not totally positive.
    NonTp,
    /// Built to meet the factorization hypothesis, leading corner.
    Leading,
    /// Built to meet the factorization hypothesis, trailing corner.
    Trailing,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ReadingArg {
    Leading,
    Trailing,
}

impl ReadingArg {
    fn reading(self) -> LambdaReading {
        match self {
            ReadingArg::Leading => LambdaReading::Leading,
            ReadingArg::Trailing => LambdaReading::Trailing,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Pbf,
    ZeroedFactor,
    DenseNonnegative,
}

impl KindArg {
    fn kind(self) -> InstanceKind {
        match self {
            KindArg::Pbf => InstanceKind::Pbf,
            KindArg::ZeroedFactor => InstanceKind::ZeroedFactor,
            KindArg::DenseNonnegative => InstanceKind::DenseNonnegative,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Matrix,
    Factorization,
}

/// Why a command stopped before producing its report.
#[derive(Debug)]
enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1 with a JSON explanation on stdout.
    Property(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotBtp { .. } => Failure::Property(not_btp_json(&e)),
            Error::MultipleEigenvalue | Error::SpectralInconsistency { .. } => {
                Failure::Property(json!({ "error": e.to_string() }))
            }
            Error::Contract(_) | Error::Capacity { .. } | Error::Precondition(_) => Failure::Usage(e.to_string()),
        }
    }
}

fn not_btp_json(e: &Error) -> Value {
    match e {
        Error::NotBtp { stage, value } => {
            let (kind, factor, index) = match *stage {
                FactorStage::Pivot { index } => ("pivot", None, index),
                FactorStage::Lower { factor, row } => ("lower", Some(factor), row),
                FactorStage::Upper { factor, col } => ("upper", Some(factor), col),
            };
            json!({
                "btp": false,
                "stage": { "kind": kind, "factor": factor, "index": index, "description": stage.to_string() },
                "value": format_rational(value),
            })
        }
        other => json!({ "error": other.to_string() }),
    }
}

/// A finished report: `holds` selects exit 0 or 1.
struct Report {
    holds: bool,
    text: String,
}

impl Report {
    fn json(holds: bool, value: &Value) -> Self {
        Report { holds, text: render(value) }
    }
}

/// Parse `argv` (program name first) and run it with caps from the environment.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Caps::from_env() {
        Ok(caps) => run_with_caps(argv, caps),
        Err(msg) => usage(msg),
    }
}

pub fn run_with_caps<I, S>(argv: I, caps: Caps) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli.command, caps) {
        Ok(report) => Outcome { code: if report.holds { 0 } else { 1 }, stdout: report.text, stderr: String::new() },
        Err(Failure::Property(value)) => Outcome { code: 1, stdout: render(&value), stderr: String::new() },
        Err(Failure::Usage(msg)) => usage(msg),
    }
}

fn usage(msg: String) -> Outcome {
    Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
}

fn dispatch(command: Command, caps: Caps) -> Result<Report, Failure> {
    match command {
        Command::Classify { input, criterion } => classify(&load(&input)?.matrix, criterion, caps),
        Command::Factorize { input } => factorize(&load(&input)?.matrix),
        Command::Darboux { input, k } => darboux_cmd(&load(&input)?, k),
        Command::Recpoly { input, families, initial } => recpoly(&load(&input)?, families, &initial),
        Command::Normality { input, initial } => normality(&load(&input)?, &initial, caps),
        Command::Spectrum { input, precision, tolerance } => {
            spectrum(&load(&input)?.matrix, precision, tolerance, caps)
        }
        Command::Biorth { input, precision, tolerance, reading, initial } => {
            biorth(&load(&input)?, precision, tolerance, reading, &initial, caps)
        }
        Command::Lambda { input } => lambda(&load(&input)?, caps),
        Command::Gen { seed, n, p, q, kind, format } => gen(seed, n, p, q, kind, format),
        Command::Fuzz { seed, count, pairs, n_min, n_max } => {
            let cfg = FuzzConfig { seed, count, pairs: pairs.unwrap_or(count / 2), n_min, n_max, oracle_cap: caps.oracle };
            let report = fuzz_equivalence(&cfg)?;
            Ok(Report::json(report.passed(), &report.to_json()))
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// A matrix, together with its factors when the file gave them.
struct Input {
    matrix: BandedMatrix,
    factors: Option<PBFactorization>,
}

impl Input {
    /// The given factors, or the canonical factorization of the matrix. Only
    /// the former can be strictly positive when `p` or `q` exceeds one.
    fn factors(&self) -> Result<PBFactorization, Failure> {
        match &self.factors {
            Some(f) => Ok(f.clone()),
            None => Ok(pbf_factorize(&self.matrix)?),
        }
    }
}

/// Reads a matrix document, or a factorization document (recognized by its
/// `diag` key) which stands for the product of its factors.
fn load(path: &Path) -> Result<Input, Failure> {
    let text = read_text(path)?;
    let located = |e: ParseError| Failure::Usage(format!("{}: {e}", path.display()));
    let is_factorization = serde_json::from_str::<Value>(&text).is_ok_and(|v| v.get("diag").is_some());
    if is_factorization {
        let f = parse_factorization(&text).map_err(located)?;
        Ok(Input { matrix: pbf_compose(&f), factors: Some(f) })
    } else {
        Ok(Input { matrix: parse_matrix(&text).map_err(located)?.matrix, factors: None })
    }
}

fn shape(t: &BandedMatrix) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("n".into(), t.n().into());
    m.insert("p".into(), t.p().into());
    m.insert("q".into(), t.q().into());
    m
}

fn classify(t: &BandedMatrix, criterion: CriterionArg, caps: Caps) -> Result<Report, Failure> {
    let mut report = shape(t);
    let verdict = match criterion {
        CriterionArg::Oracle => is_btp_oracle_capped(t, caps.oracle)?,
        CriterionArg::Contiguous => is_btp_contiguous(t),
        CriterionArg::Initial => is_btp_initial(t),
        CriterionArg::Delta => is_btp_delta(t),
        CriterionArg::All => return classify_all(t, report, caps),
    };
    report.insert("btp".into(), verdict.verdict.into());
    report.insert("criteria".into(), json!([verdict_json(&verdict)]));
    Ok(Report::json(verdict.verdict, &Value::Object(report)))
}

fn classify_all(t: &BandedMatrix, mut report: Map<String, Value>, caps: Caps) -> Result<Report, Failure> {
    let mut verdicts: Vec<CriterionVerdict> = Vec::new();
    let mut skipped = Vec::new();
    if t.n() <= caps.oracle {
        verdicts.push(is_btp_oracle_capped(t, caps.oracle)?);
    } else {
        skipped.push("oracle");
    }
    verdicts.extend([is_btp_contiguous(t), is_btp_initial(t), is_btp_delta(t)]);
    let agree = verdicts.iter().all(|v| v.verdict == verdicts[0].verdict);
    let btp = agree && verdicts[0].verdict;

    let dense = t.to_dense();
    let intn = is_intn_gasca_pena(&dense)?;
    let mut extra = Map::new();
    extra.insert("tp".into(), verdict_json(&is_tp_fekete(&dense)?));
    extra.insert("intn".into(), verdict_json(&intn));
    if t.n() <= caps.oracle {
        extra.insert("tn".into(), verdict_json(&is_tn_bruteforce_capped(&dense, caps.oracle)?));
    }
    if intn.verdict {
        let osc = is_oscillatory_price(t)?;
        extra.insert(
            "oscillatory".into(),
            json!({
                "sufficient": verdict_json(&osc.sufficient),
                "tp_power": osc.tp_power,
                "max_power": osc.max_power,
            }),
        );
        if t.n() <= caps.oracle {
            let triples = find_pinkus_submatrices_capped(&dense, caps.oracle)?;
            extra.insert(
                "pinkus".into(),
                Value::Array(
                    triples.iter().map(|s| json!({ "alpha": s.alpha, "beta": s.beta, "r": s.r })).collect(),
                ),
            );
        }
    }

    report.insert("btp".into(), btp.into());
    report.insert("agree".into(), agree.into());
    report.insert("criteria".into(), Value::Array(verdicts.iter().map(verdict_json).collect()));
    report.insert("skipped".into(), json!(skipped));
    report.insert("related".into(), Value::Object(extra));
    Ok(Report::json(btp, &Value::Object(report)))
}

fn factorize(t: &BandedMatrix) -> Result<Report, Failure> {
    let f = pbf_factorize(t)?;
    let matches = &pbf_compose(&f) == t;
    let report = json!({ "btp": true, "factorization": factorization_json(&f), "recomposed_matches": matches });
    Ok(Report::json(matches, &report))
}

fn darboux_cmd(input: &Input, k: i64) -> Result<Report, Failure> {
    let f = input.factors()?;
    let image = darboux(&f, k)?;
    let mut meta = Map::new();
    meta.insert("darboux_k".into(), k.into());
    Ok(Report { holds: true, text: emit_matrix(&MatrixDocument { matrix: image, metadata: Some(meta) }) })
}

fn signed_with_positive_corner(rng: &mut ChaCha8Rng, w: usize) -> Result<Matrix, Error> {
    let mut m = random_unitriangular(rng, w, &ValueBounds::default(), true)?;
    // The (0, 1) entry of the inverse is minus this one.
    if w >= 2 {
        let v = m.get(0, 1).abs();
        m.set(0, 1, v);
    }
    Ok(m)
}

fn initial_conditions(input: &Input, args: &InitialArgs) -> Result<InitialConditions, Failure> {
    if let Some(path) = &args.initial {
        return parse_initial(&read_text(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
    }
    let (p, q) = (input.matrix.p(), input.matrix.q());
    let bounds = ValueBounds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    Ok(match args.initial_kind {
        InitialKind::Identity => InitialConditions::identity(p, q),
        InitialKind::Tp => random_tp_initial(&mut rng, p, q, &bounds)?,
        InitialKind::Signed => InitialConditions::new(
            random_unitriangular(&mut rng, p, &bounds, true)?,
            random_unitriangular(&mut rng, q, &bounds, true)?.transpose(),
        )?,
        InitialKind::NonTp => InitialConditions::new(
            signed_with_positive_corner(&mut rng, p)?,
            signed_with_positive_corner(&mut rng, q)?.transpose(),
        )?,
        InitialKind::Leading | InitialKind::Trailing => {
            let reading =
                if args.initial_kind == InitialKind::Leading { LambdaReading::Leading } else { LambdaReading::Trailing };
            let f = input.factors()?;
            let tp = random_tp_initial(&mut rng, p, q, &bounds)?;
            let script_a = tp.a0().inverse().expect("unitriangular");
            let script_b = tp.b0().inverse().expect("unitriangular");
            hypothesis_initial_conditions(&f, reading, &script_a, &script_b)?
        }
    })
}

fn families_json(table: &RecursionTable, side: Side) -> Value {
    Value::Array(
        table.family(side).iter().map(|fam| Value::Array(fam.iter().map(polynomial_json).collect())).collect(),
    )
}

fn recpoly(input: &Input, steps: Option<usize>, args: &InitialArgs) -> Result<Report, Failure> {
    let t = &input.matrix;
    let init = initial_conditions(input, args)?;
    let table = match steps {
        Some(s) => RecursionTable::with_counts(t, &init, s, s)?,
        None => RecursionTable::build(t, &init)?,
    };
    let residual_free = [Side::Left, Side::Right].into_iter().all(|side| {
        (0..table.width(side)).all(|a| (0..table.relation_count(side)).all(|j| table.residual(side, a, j).is_zero()))
    });
    let mut report = shape(t);
    report.insert("initial".into(), initial_json(&init));
    report.insert("left".into(), families_json(&table, Side::Left));
    report.insert("right".into(), families_json(&table, Side::Right));
    report.insert("residual_free".into(), residual_free.into());
    Ok(Report::json(residual_free, &Value::Object(report)))
}

fn mismatch_json(m: &DegreeMismatch) -> Value {
    json!({ "side": m.side.name(), "family": m.family, "index": m.index, "degree": m.degree, "bound": m.bound })
}

fn block_json(b: &Option<BlockSigns>) -> Value {
    match b {
        None => Value::Null,
        Some(b) => json!({
            "block": matrix_json(&b.block),
            "triangular": b.triangular,
            "checkerboard": b.checkerboard,
            "closed_form_matches": b.closed_form_matches,
        }),
    }
}

/// `m` is upper triangular and totally positive as a band `(0, w - 1)` matrix.
fn upper_tp(m: &Matrix, cap: usize) -> Result<bool, Error> {
    let w = m.n_rows();
    if !m.is_upper_triangular() {
        return Ok(false);
    }
    Ok(w == 0 || is_btp_oracle_capped(&BandedMatrix::from_dense(m, 0, w - 1)?, cap)?.verdict)
}

fn normality(input: &Input, args: &InitialArgs, caps: Caps) -> Result<Report, Failure> {
    let t = &input.matrix;
    let init = initial_conditions(input, args)?;
    let table = RecursionTable::build(t, &init)?;
    let report = check_normality(&table);
    let a_tp = upper_tp(&init.a0().inverse().expect("unitriangular"), caps.oracle)?;
    let b_tp = upper_tp(&init.b0().inverse().expect("unitriangular").transpose(), caps.oracle)?;

    let mut blocks = Vec::new();
    let mut signs_hold = true;
    for k in 0.. {
        let signs = leading_block_signs(&table, k);
        if signs.left.is_none() && signs.right.is_none() {
            break;
        }
        signs_hold &= signs.holds();
        blocks.push(json!({ "k": k, "holds": signs.holds(), "left": block_json(&signs.left), "right": block_json(&signs.right) }));
    }
    let degrees = |side: Side| -> Value {
        Value::Array(
            table.family(side).iter().map(|fam| json!(fam.iter().map(|p| p.degree()).collect::<Vec<_>>())).collect(),
        )
    };
    let holds = report.normal && report.bound_violations.is_empty() && signs_hold;
    let mut out = shape(t);
    out.insert("initial".into(), initial_json(&init));
    out.insert("initial_tp".into(), json!({ "a0_inverse": a_tp, "b0_inverse": b_tp }));
    out.insert("normal".into(), report.normal.into());
    out.insert("guaranteed_hold".into(), report.guaranteed_hold.into());
    out.insert("bound_violations".into(), report.bound_violations.iter().map(mismatch_json).collect());
    out.insert("mismatches".into(), report.mismatches.iter().map(mismatch_json).collect());
    out.insert("checkerboard".into(), signs_hold.into());
    out.insert("degrees".into(), json!({ "left": degrees(Side::Left), "right": degrees(Side::Right) }));
    out.insert("leading_blocks".into(), Value::Array(blocks));
    Ok(Report::json(holds, &Value::Object(out)))
}

/// Significant decimal digits carried by `bits` binary digits.
fn decimal_digits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

fn relative_residual(approx: &Rational, exact: &Rational) -> Rational {
    let diff = (approx - exact).abs();
    if exact.is_zero() {
        diff
    } else {
        diff / exact.abs()
    }
}

fn check_precision(bits: u32) -> Result<(), Failure> {
    if bits < 16 {
        return Err(Failure::Usage(format!("precision {bits} is below 16 bits")));
    }
    Ok(())
}

fn spectrum(t: &BandedMatrix, bits: u32, tolerance: u32, caps: Caps) -> Result<Report, Failure> {
    check_precision(bits)?;
    let report = match eigenvalues_hp_capped(t, bits, caps.spectral) {
        Err(Error::MultipleEigenvalue) => {
            let mut out = shape(t);
            out.insert("simple".into(), false.into());
            out.insert("error".into(), Error::MultipleEigenvalue.to_string().into());
            return Ok(Report::json(false, &Value::Object(out)));
        }
        r => r?,
    };
    let dense = t.to_dense();
    let trace = relative_residual(&report.sum(), &dense.trace());
    let det = relative_residual(&report.product(), &determinant(&dense)?);
    let tol = pow10_rational(-i64::from(tolerance));
    let digits = decimal_digits(bits);
    let passed = report.all_real()
        && report.all_positive()
        && report.separated()
        && trace <= tol
        && det <= tol;

    let mut out = shape(t);
    out.insert("precision_bits".into(), bits.into());
    out.insert("tolerance_digits".into(), tolerance.into());
    out.insert("char_poly".into(), polynomial_json(&report.char_poly));
    out.insert(
        "eigenvalues".into(),
        report.eigenvalues.iter().map(|e| json!({ "value": sci(&e.value, digits), "radius": sci(&e.radius, 3) })).collect(),
    );
    out.insert("real".into(), report.all_real().into());
    out.insert("positive".into(), report.all_positive().into());
    out.insert("simple".into(), report.separated().into());
    out.insert("trace_residual".into(), sci(&trace, 6));
    out.insert("det_residual".into(), sci(&det, 6));
    out.insert("passed".into(), passed.into());
    Ok(Report::json(passed, &Value::Object(out)))
}

/// `log10 |value|` from its decimal rendering; `None` for zero.
pub fn log10_of(value: &Rational) -> Option<f64> {
    if value.is_zero() {
        return None;
    }
    format_scientific(&value.abs(), 17).parse::<f64>().ok().map(f64::log10)
}

fn biorth(
    input: &Input,
    bits: u32,
    tolerance: u32,
    reading: Option<ReadingArg>,
    args: &InitialArgs,
    caps: Caps,
) -> Result<Report, Failure> {
    check_precision(bits)?;
    let t = &input.matrix;
    let init = initial_conditions(input, args)?;
    let spectrum = eigenvalues_hp_capped(t, bits, caps.spectral)?;
    let bio = discrete_biorthogonality(t, &init, &spectrum)?;
    let max = bio.max_residual();
    let within = max <= pow10_rational(-i64::from(tolerance));

    let reading = reading.map(ReadingArg::reading).or(match (args.initial.is_none(), args.initial_kind) {
        (true, InitialKind::Leading) => Some(LambdaReading::Leading),
        (true, InitialKind::Trailing) => Some(LambdaReading::Trailing),
        _ => None,
    });
    let mut signs_consistent = true;
    let audit = match reading {
        None => Value::Null,
        Some(reading) => {
            let f = input.factors()?;
            let audit = positivity_audit(&bio.weights, &init, &f, reading)?;
            signs_consistent = !audit.hypothesis_holds || audit.weights_nonnegative();
            json!({
                "reading": reading.name(),
                "hypothesis_holds": audit.hypothesis_holds,
                "weights_nonnegative": audit.weights_nonnegative(),
                "min_weight": audit.min_weight.as_ref().map(|w| sci(w, 12)),
                "violations": audit.violations.iter().map(|v| json!({
                    "k": v.k, "b": v.b, "a": v.a, "value": sci(&v.value, 12),
                })).collect::<Vec<_>>(),
            })
        }
    };
    let digits = decimal_digits(bits).min(40);
    let weights: Vec<Value> = (0..bio.weights.len())
        .map(|k| {
            json!({
                "k": k + 1,
                "eigenvalue": sci(&bio.weights.eigenvalues[k], digits),
                "block": sci_matrix(&bio.weights.block(k), digits),
            })
        })
        .collect();

    let mut out = shape(t);
    out.insert("initial".into(), initial_json(&init));
    out.insert("precision_bits".into(), bits.into());
    out.insert("tolerance_digits".into(), tolerance.into());
    out.insert("window".into(), bio.window.into());
    out.insert("max_residual".into(), sci(&max, 6));
    out.insert("max_residual_log10".into(), json!(log10_of(&max)));
    out.insert("weights".into(), Value::Array(weights));
    out.insert("audit".into(), audit);
    out.insert("passed".into(), (within && signs_consistent).into());
    Ok(Report::json(within && signs_consistent, &Value::Object(out)))
}

fn lambda(input: &Input, caps: Caps) -> Result<Report, Failure> {
    let f = input.factors()?;
    let l = lambda_matrix(&f)?;
    let u = upsilon_matrix(&f)?;
    let lv = is_btp_oracle_capped(&BandedMatrix::from_dense(&l, 0, f.p())?, caps.oracle)?;
    let uv = is_btp_oracle_capped(&BandedMatrix::from_dense(&u, f.q(), 0)?, caps.oracle)?;
    let holds = lv.verdict && uv.verdict;
    let report = json!({
        "n": f.n(),
        "p": f.p(),
        "q": f.q(),
        "fully_positive": f.is_fully_positive(),
        "lambda": matrix_json(&l),
        "upsilon": matrix_json(&u),
        "lambda_tp": verdict_json(&lv),
        "upsilon_tp": verdict_json(&uv),
    });
    Ok(Report::json(holds, &report))
}

fn gen(seed: u64, n: usize, p: usize, q: usize, kind: KindArg, format: FormatArg) -> Result<Report, Failure> {
    if n == 0 || p >= n || q >= n {
        return Err(Failure::Usage(format!("need n >= 1 and p, q < n; got n={n} p={p} q={q}")));
    }
    let mut rng = instance_rng(seed, 0);
    let mut meta = Map::new();
    meta.insert("seed".into(), seed.into());
    meta.insert("kind".into(), kind.kind().name().into());
    match format {
        FormatArg::Matrix => {
            let matrix = generate(&mut rng, kind.kind(), n, p, q)?;
            Ok(Report { holds: true, text: emit_matrix(&MatrixDocument { matrix, metadata: Some(meta) }) })
        }
        FormatArg::Factorization => {
            if kind != KindArg::Pbf {
                return Err(Failure::Usage("only the pbf kind has a factorization".into()));
            }
            let f: PBFactorization = random_pbf_with(&mut rng, n, p, q, &ValueBounds::default(), FactorShape::Full)?;
            let mut value = factorization_json(&f);
            value["metadata"] = Value::Object(meta);
            Ok(Report::json(true, &value))
        }
    }
}
