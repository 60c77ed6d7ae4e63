//! Command-line front end: region tracing, scheme simulation, divergence
//! probes, codebook generation, and region comparison. All outputs embed
//! the resolved configuration and tool version; CSV boundaries use the
//! header `R1,R2` with vertices in increasing R1.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use qmacfb::codesim::{generate_codebook, simulate_qcl_scheme};
use qmacfb::codesim::network::build_qcl_network;
use qmacfb::ensemble::{adder_ensemble, build_joint_state, EnsembleConfig, InputEnsemble};
use qmacfb::qcore::{
    adder_channel, adder_instrument, matrix_from_rows, CMat, DensityOperator, HilbertLabel,
    InstrumentBranch, KrausChannel, QuantumInstrument, Space,
};
use qmacfb::qinfo::{hypothesis_testing_divergence, stein_probe};
use qmacfb::regions::{
    adder_closed_form, bounds_to_pentagon, compare_regions, general_bounds, qcl_bounds_variant,
    trace_boundary, AdderParams, GridPlan, QclVariant, RateBounds, RegionBoundary, RegionError,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const COMPARE_FAN: usize = 256;

#[derive(Parser)]
#[command(name = "qmacfb", version, about = "rate regions for quantum MACs with classical feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form adder region: a parameter grid trace, or one pentagon.
    RegionAdder(RegionAdderArgs),
    /// Feedback region evaluated through the ensemble/instrument pipeline.
    RegionQcl(RegionQclArgs),
    /// Layered rate bounds for an ensemble loaded from JSON.
    RegionGeneral(RegionGeneralArgs),
    /// Monte Carlo simulation of the block-Markov feedback scheme.
    SimulateQcl(SimulateArgs),
    /// Hypothesis-testing divergence of two density matrices.
    Dh(DhArgs),
    /// Per-copy divergence rate over growing block lengths.
    SteinProbe(SteinArgs),
    /// Generate a random codebook (JSON) or export its network as DOT.
    CodebookGen(CodebookArgs),
    /// Containment report between two CSV boundary files.
    Compare(CompareArgs),
}

/// Four Bernoulli parameters; either all present (single-point mode) or
/// all absent (grid mode where applicable).
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ParamArgs {
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    /// Widen the per-component domain from [0, 1/2] to [0, 1].
    #[arg(long, default_value_t = false)]
    full_range: bool,
}

impl ParamArgs {
    fn point(&self) -> Result<Option<AdderParams>, CliError> {
        let given = [self.alpha0, self.alpha1, self.beta0, self.beta1];
        if given.iter().all(Option::is_none) {
            return Ok(None);
        }
        if given.iter().any(Option::is_none) {
            return Err(CliError::Config(
                "point mode needs all of --alpha0 --alpha1 --beta0 --beta1".to_string(),
            ));
        }
        let p = AdderParams::new(
            self.alpha0.unwrap(),
            self.alpha1.unwrap(),
            self.beta0.unwrap(),
            self.beta1.unwrap(),
            self.full_range,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Some(p))
    }

    fn domain_hi(&self) -> f64 {
        if self.full_range {
            1.0
        } else {
            0.5
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RegionAdderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
    /// Points per parameter axis in grid mode.
    #[arg(long, default_value_t = 33)]
    grid: usize,
    /// Polish the support in 64 directions after the grid pass.
    #[arg(long, default_value_t = false)]
    refine: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    Statement,
    Outline,
    OutlineSwapped,
}

impl From<VariantArg> for QclVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Statement => QclVariant::Statement,
            VariantArg::Outline => QclVariant::Outline,
            VariantArg::OutlineSwapped => QclVariant::OutlineSwapped,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RegionQclArgs {
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
    /// Points per parameter axis in grid mode; the pipeline evaluation is
    /// far heavier than the closed form, so the default grid is coarse.
    #[arg(long, default_value_t = 7)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Statement)]
    variant: VariantArg,
    #[arg(long, default_value_t = false)]
    refine: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RegionGeneralArgs {
    /// Input ensemble JSON (alphabet sizes, tables, sender states).
    #[arg(long)]
    ensemble: PathBuf,
    /// Channel JSON; defaults to the binary adder channel.
    #[arg(long)]
    channel: Option<PathBuf>,
    /// Instrument JSON; defaults to the adder feedback instrument.
    #[arg(long)]
    instrument: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
    /// Ensemble JSON; overrides the Bernoulli parameter flags.
    #[arg(long)]
    ensemble: Option<PathBuf>,
    #[arg(long)]
    r1: f64,
    #[arg(long)]
    r2: f64,
    /// Symbols per block.
    #[arg(long, default_value_t = 200)]
    blocklen: usize,
    #[arg(long, default_value_t = 4)]
    blocks: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct DhArgs {
    /// Density matrix JSON: rows of [re, im] pairs.
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SteinArgs {
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CodebookArgs {
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
    #[arg(long)]
    ensemble: Option<PathBuf>,
    #[arg(long)]
    r1: f64,
    #[arg(long)]
    r2: f64,
    #[arg(long, default_value_t = 16)]
    blocklen: usize,
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the codebook network as a DOT graph instead of the codebook.
    #[arg(long, default_value_t = false)]
    dot: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CompareArgs {
    /// CSV boundary expected to contain the other.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    /// Bad flags or malformed input files: exit 2.
    Config(String),
    /// Well-formed request that failed numerically: exit 1.
    Numeric(String),
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::DomainError { .. } => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("QMACFB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::RegionAdder(a) => region_adder(a),
        Command::RegionQcl(a) => region_qcl(a),
        Command::RegionGeneral(a) => region_general(a),
        Command::SimulateQcl(a) => simulate(a),
        Command::Dh(a) => dh(a),
        Command::SteinProbe(a) => stein(a),
        Command::CodebookGen(a) => codebook_gen(a),
        Command::Compare(a) => compare(a),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Numeric(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn config_json<T: Serialize>(command: &str, args: &T) -> String {
    let mut v = serde_json::to_value(args).expect("args serialize");
    v["command"] = json!(command);
    v.to_string()
}

fn boundary_csv(config: &str, boundary: &RegionBoundary) -> String {
    let mut s = format!("# qmacfb {VERSION}\n# config: {config}\nR1,R2\n");
    for &(x, y) in &boundary.vertices {
        s.push_str(&format!("{x:.12},{y:.12}\n"));
    }
    s
}

fn json_report(command: &str, config: &str, body: serde_json::Value) -> String {
    let config: serde_json::Value = serde_json::from_str(config).expect("config re-parses");
    let mut root = json!({
        "tool": "qmacfb",
        "version": VERSION,
        "command": command,
        "config": config,
    });
    for (k, v) in body.as_object().expect("object body") {
        root[k] = v.clone();
    }
    format!("{root:#}\n")
}

fn region_adder(a: RegionAdderArgs) -> Result<(), CliError> {
    let config = config_json("region-adder", &a);
    let boundary = match a.params.point()? {
        Some(p) => bounds_to_pentagon(&adder_closed_form(&p)),
        None => {
            if a.grid < 2 {
                return Err(CliError::Config("--grid must be at least 2".to_string()));
            }
            let full = a.params.full_range;
            let grid = GridPlan::uniform(4, 0.0, a.params.domain_hi(), a.grid);
            trace_boundary(
                |t| {
                    let p = AdderParams::new(t[0], t[1], t[2], t[3], full)?;
                    Ok(adder_closed_form(&p))
                },
                &grid,
                a.refine,
            )?
        }
    };
    emit(&a.out, &boundary_csv(&config, &boundary))
}

fn region_qcl(a: RegionQclArgs) -> Result<(), CliError> {
    let config = config_json("region-qcl", &a);
    let channel = adder_channel();
    let inst = adder_instrument();
    let variant: QclVariant = a.variant.into();
    let eval = |t: &[f64]| -> Result<RateBounds, RegionError> {
        let ens = adder_ensemble([t[0], t[1]], [t[2], t[3]]);
        let joint = build_joint_state(&ens, &channel, &inst)
            .map_err(RegionError::from)?;
        qcl_bounds_variant(&joint, variant)
    };
    let boundary = match a.params.point()? {
        Some(p) => bounds_to_pentagon(&eval(&p.as_array()).map_err(CliError::from)?),
        None => {
            if a.grid < 2 {
                return Err(CliError::Config("--grid must be at least 2".to_string()));
            }
            let grid = GridPlan::uniform(4, 0.0, a.params.domain_hi(), a.grid);
            trace_boundary(eval, &grid, a.refine)?
        }
    };
    emit(&a.out, &boundary_csv(&config, &boundary))
}

fn load_ensemble(path: &PathBuf) -> Result<InputEnsemble, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let cfg: EnsembleConfig = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.build()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Space as a list of [name, dim] labels.
#[derive(Deserialize)]
struct SpaceSpec(Vec<(String, usize)>);

impl SpaceSpec {
    fn build(self) -> Result<Space, CliError> {
        Space::new(
            self.0
                .into_iter()
                .map(|(n, d)| HilbertLabel::new(n, d))
                .collect(),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMat, CliError> {
    matrix_from_rows(rows).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSpec {
    input: SpaceSpec,
    output: SpaceSpec,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

fn load_channel(path: &PathBuf) -> Result<KrausChannel, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let spec: ChannelSpec = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let kraus = spec
        .kraus
        .iter()
        .map(|rows| rows_to_matrix(rows))
        .collect::<Result<Vec<_>, _>>()?;
    KrausChannel::new(spec.input.build()?, spec.output.build()?, kraus)
        .map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Deserialize)]
struct BranchSpec {
    outcome: (u32, u32),
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstrumentSpec {
    input: SpaceSpec,
    output: SpaceSpec,
    branches: Vec<BranchSpec>,
}

fn load_instrument(path: &PathBuf) -> Result<QuantumInstrument, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let spec: InstrumentSpec = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut branches = Vec::with_capacity(spec.branches.len());
    for b in &spec.branches {
        let kraus = b
            .kraus
            .iter()
            .map(|rows| rows_to_matrix(rows))
            .collect::<Result<Vec<_>, _>>()?;
        branches.push(InstrumentBranch {
            outcome: b.outcome,
            kraus,
        });
    }
    QuantumInstrument::new(spec.input.build()?, spec.output.build()?, branches)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn region_general(a: RegionGeneralArgs) -> Result<(), CliError> {
    let config = config_json("region-general", &a);
    let ens = load_ensemble(&a.ensemble)?;
    let channel = match &a.channel {
        Some(p) => load_channel(p)?,
        None => adder_channel(),
    };
    let inst = match &a.instrument {
        Some(p) => load_instrument(p)?,
        None => adder_instrument(),
    };
    let joint = build_joint_state(&ens, &channel, &inst)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let bounds = general_bounds(&joint)?;
    let body = json!({ "bounds": serde_json::to_value(bounds).expect("bounds serialize") });
    emit(&a.out, &json_report("region-general", &config, body))
}

fn ensemble_from_flags(
    file: &Option<PathBuf>,
    params: &ParamArgs,
) -> Result<InputEnsemble, CliError> {
    if let Some(path) = file {
        return load_ensemble(path);
    }
    let p = params.point()?.unwrap_or(
        AdderParams::new(0.5, 0.5, 0.5, 0.5, false).expect("midpoint is in domain"),
    );
    let [a0, a1, b0, b1] = p.as_array();
    Ok(adder_ensemble([a0, a1], [b0, b1]))
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let config = config_json("simulate-qcl", &a);
    let ens = ensemble_from_flags(&a.ensemble, &a.params)?;
    let report = simulate_qcl_scheme(
        &ens,
        &adder_channel(),
        &adder_instrument(),
        a.r1,
        a.r2,
        a.blocklen,
        a.blocks,
        a.delta,
        a.trials,
        a.seed,
    )
    .map_err(|e| CliError::Numeric(e.to_string()))?;
    let body = json!({ "report": serde_json::to_value(&report).expect("report serialize") });
    emit(&a.out, &json_report("simulate-qcl", &config, body))
}

fn load_density(path: &PathBuf) -> Result<DensityOperator, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let m = rows_to_matrix(&rows)?;
    let dim = m.nrows();
    DensityOperator::from_matrix(m, Space::single("m", dim))
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn dh(a: DhArgs) -> Result<(), CliError> {
    let config = config_json("dh", &a);
    let rho = load_density(&a.rho)?;
    let sigma = load_density(&a.sigma)?;
    let test = hypothesis_testing_divergence(&rho, &sigma, a.eps)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let body = json!({
        "value_bits": test.value_bits,
        "threshold": test.threshold,
        "boundary_weight": test.boundary_weight,
    });
    match &a.out {
        Some(_) => emit(&a.out, &json_report("dh", &config, body))?,
        None => println!("{:?}", test.value_bits),
    }
    if test.value_bits.is_finite() {
        Ok(())
    } else {
        Err(CliError::Numeric(
            "divergence is infinite (states have disjoint support within the test)".to_string(),
        ))
    }
}

fn stein(a: SteinArgs) -> Result<(), CliError> {
    let config = config_json("stein-probe", &a);
    let rho = load_density(&a.rho)?;
    let sigma = load_density(&a.sigma)?;
    let values = stein_probe(&rho, &sigma, a.eps, a.nmax).map_err(|e| match e {
        qmacfb::qinfo::InfoError::DimensionCapExceeded { .. } => CliError::Numeric(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    let mut s = format!("# qmacfb {VERSION}\n# config: {config}\nn,rate\n");
    for (n, v) in values {
        s.push_str(&format!("{n},{v:.12}\n"));
    }
    emit(&a.out, &s)
}

fn codebook_gen(a: CodebookArgs) -> Result<(), CliError> {
    let config = config_json("codebook-gen", &a);
    let ens = ensemble_from_flags(&a.ensemble, &a.params)?;
    let net = build_qcl_network(&ens, a.blocks, a.r1, a.r2, a.blocklen)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    if a.dot {
        return emit(&a.out, &net.to_dot());
    }
    let cb = generate_codebook(&net, a.blocklen, a.seed)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let body = json!({ "codebook": serde_json::to_value(&cb).expect("codebook serialize") });
    emit(&a.out, &json_report("codebook-gen", &config, body))
}

fn read_boundary_csv(path: &PathBuf) -> Result<RegionBoundary, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    let mut vertices = Vec::new();
    for line in raw.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("r1,r2") {
            continue;
        }
        let (x, y) = line.split_once(',').ok_or_else(|| {
            CliError::Config(format!("{}: malformed row `{line}`", path.display()))
        })?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{}: {e} in `{line}`", path.display())))
        };
        vertices.push((parse(x)?, parse(y)?));
    }
    if vertices.is_empty() {
        return Err(CliError::Config(format!(
            "{}: no vertices found",
            path.display()
        )));
    }
    Ok(RegionBoundary { vertices })
}

fn compare(a: CompareArgs) -> Result<(), CliError> {
    let config = config_json("compare", &a);
    let region_a = read_boundary_csv(&a.a)?;
    let region_b = read_boundary_csv(&a.b)?;
    let report = compare_regions(&region_a, &region_b);
    let per_direction: Vec<serde_json::Value> = (0..COMPARE_FAN)
        .map(|k| {
            let mu = k as f64 / (COMPARE_FAN - 1) as f64;
            let sa = region_a.support(mu);
            let sb = region_b.support(mu);
            json!({ "mu": mu, "support_a": sa, "support_b": sb, "gap": sa - sb })
        })
        .collect();
    let body = json!({
        "contains": report.contains,
        "max_gap": report.max_gap,
        "direction": report.direction,
        "min_gap": report.min_gap,
        "per_direction": per_direction,
    });
    emit(&a.out, &json_report("compare", &config, body))
}
