//! Subcommands and their report bodies.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use semsec_core::avc::symmetrizability_check;
use semsec_core::counterexample::{scenarios, ScenarioConfig};
use semsec_core::extraction::{
    audit_extracted, check_preconditions, extract, measure_base, schedules, ExtractionError, ScheduleInput,
    DEFAULT_RETRY_BUDGET,
};
use semsec_core::metrics::audit_values;
use semsec_core::metrics::{optimize_single_letter, AdvantageReport, MetricsError, SearchConfig, SingleLetterConfig};
use semsec_core::{Channel, ModelError, RandomEncoderCode, UnknownStrategy};
use serde_json::json;

use crate::format::{load_str, FormatError, Loaded, Model};
use crate::report::{AnalysisReport, Measured};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SEMSEC_OUTPUT_DIR";

/// Numerical accuracy of closed-form and enumerated quantities.
const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "semsec", version, about = "Secrecy analysis for arbitrarily varying wiretap channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strong leakage, MIS, DS and SS advantages of a code with their audit.
    Metrics(MetricsArgs),
    /// Decide symmetrizability of the main channels of a model.
    Symmetrize(InputArgs),
    /// Extract a maximal-error semantically secure code from a base code.
    Extract(ExtractArgs),
    /// Run a counterexample scenario and emit its curve.
    Counterexample(ScenarioArgs),
    /// Optimize the single-letter secrecy objective of a family.
    SingleLetter(SingleLetterArgs),
    /// Check that files parse and satisfy the schema.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Model, code or system document.
    #[arg(long)]
    pub input: PathBuf,
    /// Report path; defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Seed of the SS prior search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Capacity duality-gap tolerance in bits.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Dirichlet priors tried by the SS search.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Parameter schedule: 1 for AVWC, 3 for GAVWC with Θ exponent `a`.
    #[arg(long, default_value = "1", value_parser = ["1", "3"])]
    pub theorem: String,
    /// Rate-loss exponent of the schedule.
    #[arg(long, default_value_t = 0.75)]
    pub epsilon: f64,
    /// Θ exponent for schedule 3.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    /// Seed of the cluster draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Retry budget per extraction step.
    #[arg(long, default_value_t = DEFAULT_RETRY_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// naive-strong, skewed, case1, case2 or gavc-erasure.
    #[arg(long)]
    pub scenario: String,
    /// Report path; the CSV curve is written beside it.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed of the random Θ draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random Θ sets per block length.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    /// Θ exponent; each scenario has its own default.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SingleLetterArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Seed of the restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid step of the inner minimization.
    #[arg(long, default_value_t = 1e-2)]
    pub tolerance: f64,
    /// Random restarts of the outer search.
    #[arg(long, default_value_t = 8)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Documents to check; repeat for several.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Report path; defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Failure reported to the caller as `{"error": {"kind", "message"}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind, "message": self.message}}).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        let kind = match e {
            FormatError::Io { .. } => "io",
            FormatError::UnsupportedVersion { .. } | FormatError::MissingVersion => "version",
            FormatError::Model { .. } => "model",
            _ => "schema",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::new("model", e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        Self::new("metrics", e.to_string())
    }
}

impl From<ExtractionError> for CliError {
    fn from(e: ExtractionError) -> Self {
        Self::new("extraction", e.to_string())
    }
}

impl From<UnknownStrategy> for CliError {
    fn from(e: UnknownStrategy) -> Self {
        Self::new("usage", e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::new("io", format!("{}: {e}", path.display()))
}

/// Reads a file, returning its loaded form and a report carrying its digest.
fn read_input(path: &Path) -> Result<(Vec<u8>, Loaded), CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::new("schema", format!("{}: {e}", path.display())))?;
    let loaded = load_str(text)?;
    Ok((bytes, loaded))
}

fn digest_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn system(loaded: Loaded) -> Result<(RandomEncoderCode, Model), CliError> {
    match loaded {
        Loaded::System { code, model } => Ok((code, model)),
        _ => Err(CliError::new("schema", "expected a `system` file (code plus model)")),
    }
}

fn model(loaded: Loaded) -> Result<Model, CliError> {
    match loaded {
        Loaded::Model(m) => Ok(m),
        Loaded::System { model, .. } => Ok(model),
        _ => Err(CliError::new("schema", "expected a model or system file")),
    }
}

fn mains_of(model: &Model) -> Vec<Channel> {
    match model {
        Model::Family(f) => f.mains().into_iter().cloned().collect(),
        Model::Gavwc(g) => g.mains().to_vec(),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("result types serialize")
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Where the report went; `None` means standard output.
    pub report_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
    /// Report text, also returned when written to a file.
    pub report: String,
}

fn resolve_output(explicit: Option<&Path>, command: &str) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{command}.json")))
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(report: &AnalysisReport, output: Option<&Path>, csv: Option<String>) -> Result<Outcome, CliError> {
    let text = report.to_json();
    let report_path = resolve_output(output, &report.command);
    let mut csv_path = None;
    if let Some(path) = &report_path {
        write_file(path, &text)?;
        if let Some(csv) = csv {
            let p = path.with_extension("csv");
            write_file(&p, &csv)?;
            csv_path = Some(p);
        }
    }
    Ok(Outcome {
        report_path,
        csv_path,
        report: text,
    })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Metrics(a) => metrics(a),
        Command::Symmetrize(a) => symmetrize(a),
        Command::Extract(a) => extraction(a),
        Command::Counterexample(a) => counterexample(a),
        Command::SingleLetter(a) => single_letter(a),
        Command::Validate(a) => validate(a),
    }
}

fn metrics(args: &MetricsArgs) -> Result<Outcome, CliError> {
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        return Err(CliError::new("usage", "--tolerance must be positive"));
    }
    let (bytes, loaded) = read_input(&args.io.input)?;
    let (code, model) = system(loaded)?;
    let (mains, wiretaps) = model.channels_for(code.input_size())?;
    let search = SearchConfig {
        dirichlet_samples: args.samples,
        seed: args.seed,
        ..SearchConfig::default()
    };
    let adv = AdvantageReport::compute(&code, &wiretaps, &search, args.tolerance, semsec_core::metrics::DEFAULT_BA_MAX_ITER)?;
    let z = wiretaps[0].output_size();
    let audit = audit_values(adv.ss.value, adv.ds.value, adv.mis.value, z, args.tolerance);

    let mut avg = 0.0f64;
    let mut max = 0.0f64;
    for w in &mains {
        avg = avg.max(code.average_error(w)?);
        max = max.max(code.max_error(w)?);
    }
    let symmetrizable = symmetrizability_check(&mains_of(&model))?;

    let body = json!({
        "message_count": code.message_count(),
        "wiretap_count": wiretaps.len(),
        "strong_leakage": Measured::exact(adv.strong_leakage.value, EXACT_TOL),
        "mis": Measured {
            value: adv.mis.value,
            tolerance: args.tolerance,
            exact: adv.mis.converged,
        },
        "ds": Measured::exact(adv.ds.value, EXACT_TOL),
        "ss_lower": Measured::heuristic(adv.ss.value, EXACT_TOL),
        "average_error": Measured::exact(avg, EXACT_TOL),
        "max_error": Measured::exact(max, EXACT_TOL),
        "witnesses": to_value(&adv),
        "audit": to_value(&audit),
        "symmetrizable": symmetrizable.is_feasible(),
        "symmetrizability": to_value(&symmetrizable),
    });
    let report = AnalysisReport::new("metrics", body)
        .with_input(digest_name(&args.io.input), &bytes)
        .with_seed("ss_search", args.seed);
    emit(&report, args.io.output.as_deref(), None)
}

fn symmetrize(args: &InputArgs) -> Result<Outcome, CliError> {
    let (bytes, loaded) = read_input(&args.input)?;
    let model = model(loaded)?;
    let decision = symmetrizability_check(&mains_of(&model))?;
    let body = json!({
        "symmetrizable": decision.is_feasible(),
        "zero_capacity_advisory": decision.zero_capacity_advisory(),
        "decision": to_value(&decision),
    });
    let report = AnalysisReport::new("symmetrize", body).with_input(digest_name(&args.input), &bytes);
    emit(&report, args.output.as_deref(), None)
}

fn extraction(args: &ExtractArgs) -> Result<Outcome, CliError> {
    let (bytes, loaded) = read_input(&args.io.input)?;
    let (base, model) = system(loaded)?;
    let (mains, wiretaps) = model.channels_for(base.input_size())?;
    let n = model
        .block_length(base.input_size())
        .ok_or_else(|| CliError::new("model", "cannot infer the block length"))?;
    let stats = measure_base(&base, &mains, &wiretaps)?;
    let input = ScheduleInput {
        n,
        epsilon: args.epsilon,
        lambda: 8.0 * stats.lambda,
        mu: 8.0 * stats.mu,
        base_message_count: base.message_count(),
        delta: stats.delta,
        a: args.a,
        retry_budget: args.budget,
        seed: args.seed,
    };
    let name = if args.theorem == "3" { "theorem3" } else { "theorem1" };
    let reg = schedules();
    let schedule = reg.get(name)?;
    let params = schedule.derive(&input)?;
    let preconditions = check_preconditions(&params, (mains.len(), wiretaps.len()));
    let result = extract(&base, &mains, &wiretaps, &params)?;
    let audit = audit_extracted(&result, &base, &mains, &wiretaps, &params)?;
    let body = json!({
        "schedule": name,
        "schedule_rule": schedule.describe(),
        "schedule_input": to_value(&input),
        "params": to_value(&params),
        "preconditions": to_value(&preconditions),
        "base": to_value(&result.base_stats),
        "clusters": result.clusters,
        "derived_code": to_value(&result.derived),
        "step_log": to_value(&result.step_log),
        "total_retries": result.total_retries(),
        "audit": to_value(&audit),
    });
    let report = AnalysisReport::new("extract", body)
        .with_input(digest_name(&args.io.input), &bytes)
        .with_seed("extraction", args.seed);
    emit(&report, args.io.output.as_deref(), None)
}

fn counterexample(args: &ScenarioArgs) -> Result<Outcome, CliError> {
    let reg = scenarios();
    let scenario = reg.get(&args.scenario)?;
    let defaults = scenario.defaults();
    let cfg = ScenarioConfig {
        a: args.a.unwrap_or(defaults.a),
        samples: args.samples,
        seed: args.seed,
        ..defaults
    };
    let out = scenario.run(&cfg)?;
    let body = json!({
        "description": scenario.describe(),
        "output": to_value(&out),
    });
    let report = AnalysisReport::new("counterexample", body).with_seed("theta_sampling", args.seed);
    emit(&report, args.output.as_deref(), Some(out.to_csv()))
}

fn single_letter(args: &SingleLetterArgs) -> Result<Outcome, CliError> {
    if !(args.tolerance > 0.0 && args.tolerance <= 1.0) {
        return Err(CliError::new("usage", "--tolerance (grid step) must lie in (0, 1]"));
    }
    let (bytes, loaded) = read_input(&args.io.input)?;
    let family = match model(loaded)? {
        Model::Family(f) => f,
        Model::Gavwc(_) => return Err(CliError::new("schema", "single-letter needs an avwc_family model")),
    };
    let cfg = SingleLetterConfig {
        grid: args.tolerance,
        restarts: args.budget,
        seed: args.seed,
        ..SingleLetterConfig::default()
    };
    let res = optimize_single_letter(&family, &cfg)?;
    let body = json!({
        "config": to_value(&cfg),
        "value": Measured::heuristic(res.value, res.inner.gap.max(0.0)),
        "result": to_value(&res),
    });
    let report = AnalysisReport::new("single-letter", body)
        .with_input(digest_name(&args.io.input), &bytes)
        .with_seed("outer_search", args.seed);
    emit(&report, args.io.output.as_deref(), None)
}

fn validate(args: &ValidateArgs) -> Result<Outcome, CliError> {
    let mut files = Vec::new();
    let mut report = AnalysisReport::new("validate", serde_json::Value::Null);
    for path in &args.input {
        let (bytes, loaded) = read_input(path)?;
        let kind = match loaded {
            Loaded::Model(Model::Family(_)) => "avwc_family",
            Loaded::Model(Model::Gavwc(_)) => "gavwc",
            Loaded::Code(_) => "code",
            Loaded::System { .. } => "system",
            Loaded::Report(_) => "report",
        };
        files.push(json!({"file": digest_name(path), "kind": kind, "valid": true}));
        report = report.with_input(digest_name(path), &bytes);
    }
    report.body = json!({ "files": files });
    emit(&report, args.output.as_deref(), None)
}
