//! Command-line front end: `generate`, `estimate`, `ph`, `manifold` and
//! `bottleneck`.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use superlevel::datagen::{generate, Family, GenSpec};
use superlevel::estimators::{
    default_epsilon, estimate_level_homology, estimate_ph, recover_manifold_homology, Backend,
    EstimateOptions,
};
use superlevel::homology::Arithmetic;
use superlevel::io::{read_csv, write_csv};
use superlevel::kernels::{
    estimate_at_samples, fallback_bandwidth, recommended_bandwidth, KernelShape, KernelSpec,
    LabeledSample, Mode, ModelBounds, DEFAULT_GAUSSIAN_WIDTH,
};
use superlevel::persistence::diagram::degree_of;
use superlevel::persistence::{bottleneck, parse_tsv, render_barcode, write_tsv, BarcodeFormat};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] superlevel::Error),
}

impl CliError {
    /// 2 configuration, 3 capacity, 4 no stable level, 5 I/O or parse.
    pub fn exit_code(&self) -> i32 {
        use superlevel::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::CapacityExceeded { .. }) => 3,
            CliError::Core(E::NoStableLevel) => 4,
            CliError::File { .. } | CliError::Core(E::Io(_) | E::Parse { .. }) => 5,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "superlevel",
    version,
    about = "Homology of super-level sets estimated from samples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic sample and write it as CSV.
    Generate(Settings),
    /// Homology of one level: image of the upper complex in the lower one.
    Estimate(Settings),
    /// Persistence diagrams of the estimated function.
    Ph(Settings),
    /// Recover the homology of a manifold from noisy samples.
    Manifold(Settings),
    /// Bottleneck distance between two diagram files in one degree.
    Bottleneck(BottleneckArgs),
}

#[derive(Debug, Args)]
pub struct BottleneckArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub degree: usize,
}

/// Flags mirror the configuration keys, with `-` in place of `_`.
#[derive(Debug, Default, Args)]
pub struct Settings {
    /// Flat `key = value` file; flags given here take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub longitude_spread: Option<String>,
    /// `density` or `regression`
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    /// `fallback` or `theory` (needs the model bounds)
    #[arg(long)]
    pub bandwidth_rule: Option<String>,
    #[arg(long)]
    pub k_max: Option<String>,
    /// `truncated_gaussian` or `bump`
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub kernel_s: Option<String>,
    /// `rational` or `prime`
    #[arg(long)]
    pub field: Option<String>,
    /// `auto`, `explicit` or `implicit`
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub budget_simplices: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub p_max: Option<String>,
    #[arg(long)]
    pub p_min: Option<String>,
    #[arg(long)]
    pub y_max: Option<String>,
    #[arg(long)]
    pub svg: Option<String>,
    #[arg(long)]
    pub text_barcode: Option<String>,
    #[arg(long)]
    pub min_length: Option<String>,
}

impl Settings {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut flags = RunConfig::default();
        let pairs: [(&str, &Option<String>); 25] = [
            ("input", &self.input),
            ("out", &self.out),
            ("family", &self.family),
            ("n", &self.n),
            ("seed", &self.seed),
            ("sigma", &self.sigma),
            ("longitude_spread", &self.longitude_spread),
            ("mode", &self.mode),
            ("level", &self.level),
            ("epsilon", &self.epsilon),
            ("r", &self.r),
            ("bandwidth_rule", &self.bandwidth_rule),
            ("k_max", &self.k_max),
            ("kernel", &self.kernel),
            ("kernel_s", &self.kernel_s),
            ("field", &self.field),
            ("backend", &self.backend),
            ("budget_simplices", &self.budget_simplices),
            ("m", &self.m),
            ("p_max", &self.p_max),
            ("p_min", &self.p_min),
            ("y_max", &self.y_max),
            ("svg", &self.svg),
            ("text_barcode", &self.text_barcode),
            ("min_length", &self.min_length),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        Ok(base.merge(flags))
    }
}

/// Runs a parsed command line, writing reports to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(s) => cmd_generate(&s.resolve()?, stdout),
        Command::Estimate(s) => cmd_estimate(&s.resolve()?, stdout),
        Command::Ph(s) => cmd_ph(&s.resolve()?, stdout),
        Command::Manifold(s) => cmd_manifold(&s.resolve()?, stdout),
        Command::Bottleneck(a) => cmd_bottleneck(&a, stdout),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Core(e.into())
}

pub(crate) fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::File {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(cfg: &RunConfig, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match cfg.raw("out") {
        Some(path) => write_atomic(Path::new(path), bytes),
        None => stdout.write_all(bytes).map_err(io_err),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable report");
    bytes.push(b'\n');
    bytes
}

fn cmd_generate(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let family: Family = cfg
        .require::<String>("family")?
        .parse()
        .map_err(|e: superlevel::Error| CliError::Config(e.to_string()))?;
    let mut spec = GenSpec::new(family, cfg.require("n")?, cfg.get("seed")?.unwrap_or(0));
    spec.sigma = cfg.get("sigma")?;
    spec.longitude_spread = cfg.get("longitude_spread")?;
    let sample = generate(&spec).map_err(config_if_invalid)?;
    emit(cfg, &write_csv(&sample)?, stdout)
}

fn config_if_invalid(e: superlevel::Error) -> CliError {
    match e {
        superlevel::Error::InvalidInput(m) => CliError::Config(m),
        other => CliError::Core(other),
    }
}

/// Shared inputs of the estimating commands.
struct Setup {
    input: String,
    data: LabeledSample,
    mode: Mode,
    kernel: KernelSpec,
    opts: EstimateOptions,
    bounds: ModelBounds,
    seed: u64,
}

#[derive(Serialize)]
struct SetupReport<'a> {
    input: &'a str,
    n: usize,
    dim: usize,
    mode: Mode,
    kernel: KernelShape,
    c_k: f64,
    r: f64,
    r_rule: &'a str,
    arithmetic: Arithmetic,
    budget_simplices: usize,
    seed: u64,
}

impl Setup {
    fn load(cfg: &RunConfig) -> Result<Self, CliError> {
        let input: String = cfg.require("input")?;
        let bytes = std::fs::read(&input).map_err(file_err(Path::new(&input)))?;
        let mut data = read_csv(&bytes)?;
        let bounds = ModelBounds {
            p_max: cfg.get("p_max")?,
            p_min: cfg.get("p_min")?,
            y_max: cfg.get("y_max")?,
        };
        if bounds.y_max.is_some() {
            data = LabeledSample::new(data.points, data.responses, bounds.y_max)
                .map_err(config_if_invalid)?;
        }
        let mode = match cfg.raw("mode") {
            None if data.responses.is_some() => Mode::Regression,
            None | Some("density") => Mode::Density,
            Some("regression") => Mode::Regression,
            Some(other) => return Err(CliError::Config(format!("unknown mode `{other}`"))),
        };
        let shape = match cfg.raw("kernel").unwrap_or("truncated_gaussian") {
            "truncated_gaussian" => KernelShape::TruncatedGaussian {
                s: cfg.get("kernel_s")?.unwrap_or(DEFAULT_GAUSSIAN_WIDTH),
            },
            "bump" => KernelShape::Bump,
            other => return Err(CliError::Config(format!("unknown kernel `{other}`"))),
        };
        let kernel =
            KernelSpec::new(shape, data.dim()).map_err(|e| CliError::Config(e.to_string()))?;
        let arithmetic = match cfg.raw("field").unwrap_or("rational") {
            "rational" => Arithmetic::Rational,
            "prime" => Arithmetic::Prime,
            other => return Err(CliError::Config(format!("unknown field `{other}`"))),
        };
        let backend: Backend = cfg
            .raw("backend")
            .unwrap_or("auto")
            .parse()
            .map_err(config_if_invalid)?;
        let budget = cfg
            .get("budget_simplices")?
            .unwrap_or(superlevel::complexes::DEFAULT_BUDGET);
        Ok(Self {
            input,
            data,
            mode,
            kernel,
            opts: EstimateOptions {
                arithmetic,
                backend,
                budget,
            },
            bounds,
            seed: cfg.get("seed")?.unwrap_or(0),
        })
    }

    /// `r` from the configuration, else from the bandwidth rule.
    fn radius(
        &self,
        cfg: &RunConfig,
        epsilon: Option<f64>,
    ) -> Result<(f64, &'static str), CliError> {
        if let Some(r) = cfg.get::<f64>("r")? {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("r must be positive, got {r}")));
            }
            return Ok((r, "given"));
        }
        let n = self.data.len();
        match cfg.raw("bandwidth_rule").unwrap_or("fallback") {
            "fallback" => Ok((fallback_bandwidth(n, self.data.dim()), "fallback")),
            "theory" => {
                let eps = epsilon
                    .ok_or_else(|| CliError::Config("the theory rule needs epsilon".into()))?;
                let r = recommended_bandwidth(
                    n as f64,
                    &self.kernel,
                    eps,
                    self.mode,
                    Some(&self.bounds),
                )
                .map_err(|e| CliError::Config(e.to_string()))?;
                Ok((r, "theory"))
            }
            other => Err(CliError::Config(format!(
                "unknown bandwidth rule `{other}`"
            ))),
        }
    }

    fn report<'a>(&'a self, r: f64, r_rule: &'a str) -> SetupReport<'a> {
        SetupReport {
            input: &self.input,
            n: self.data.len(),
            dim: self.data.dim(),
            mode: self.mode,
            kernel: self.kernel.shape(),
            c_k: self.kernel.c_k(),
            r,
            r_rule,
            arithmetic: self.opts.arithmetic,
            budget_simplices: self.opts.budget,
            seed: self.seed,
        }
    }

    /// `epsilon` from the configuration, else a fiftieth of the range of
    /// the estimates at radius `r`.
    fn epsilon_or_default(&self, given: Option<f64>, r: f64) -> Result<f64, CliError> {
        match given {
            Some(e) => Ok(e),
            None => Ok(default_epsilon(&estimate_at_samples(
                &self.data,
                r,
                &self.kernel,
                self.mode,
            )?)
            .map_err(config_if_invalid)?),
        }
    }
}

fn positive(key: &str, value: Option<f64>) -> Result<Option<f64>, CliError> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => {
            Err(CliError::Config(format!("{key} must be positive, got {v}")))
        }
        v => Ok(v),
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    setup: SetupReport<'a>,
    result: T,
}

fn cmd_estimate(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let setup = Setup::load(cfg)?;
    let level: f64 = cfg.require("level")?;
    let epsilon = positive("epsilon", cfg.get("epsilon")?)?;
    let (r, rule) = setup.radius(cfg, epsilon)?;
    let epsilon = setup.epsilon_or_default(epsilon, r)?;
    let k_max = cfg.get("k_max")?.unwrap_or(setup.data.dim());
    let est = estimate_level_homology(
        &setup.data,
        level,
        epsilon,
        r,
        k_max,
        setup.mode,
        &setup.kernel,
        &setup.opts,
    )
    .map_err(config_if_invalid)?;
    emit(
        cfg,
        &to_json(&Report {
            command: "estimate",
            setup: setup.report(r, rule),
            result: est,
        }),
        stdout,
    )
}

#[derive(Serialize)]
struct PhSummary {
    epsilon: f64,
    l_max: f64,
    levels: usize,
    k_max: usize,
    backend: Backend,
    bars: Vec<usize>,
    assumptions: Vec<String>,
}

fn cmd_ph(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let setup = Setup::load(cfg)?;
    let epsilon = positive("epsilon", cfg.get("epsilon")?)?;
    let (r, rule) = setup.radius(cfg, epsilon)?;
    let k_max = cfg.get("k_max")?.unwrap_or(setup.data.dim());
    let ph = estimate_ph(
        &setup.data,
        epsilon,
        r,
        k_max,
        setup.mode,
        &setup.kernel,
        &setup.opts,
    )
    .map_err(config_if_invalid)?;
    let min_length = cfg.get("min_length")?.unwrap_or(0.0);
    if let Some(path) = cfg.raw("svg") {
        write_atomic(
            Path::new(path),
            &render_barcode(&ph.diagrams, BarcodeFormat::Svg, min_length),
        )?;
    }
    if let Some(path) = cfg.raw("text_barcode") {
        write_atomic(
            Path::new(path),
            &render_barcode(&ph.diagrams, BarcodeFormat::Text, min_length),
        )?;
    }
    let tsv = write_tsv(&ph.diagrams);
    match cfg.raw("out") {
        // the diagram goes to stdout when no file is named
        None => stdout.write_all(tsv.as_bytes()).map_err(io_err),
        Some(path) => {
            write_atomic(Path::new(path), tsv.as_bytes())?;
            let summary = PhSummary {
                epsilon: ph.epsilon,
                l_max: ph.l_max,
                levels: ph.levels.len(),
                k_max,
                backend: ph.backend,
                bars: ph.diagrams.iter().map(|d| d.len()).collect(),
                assumptions: ph.assumptions,
            };
            stdout
                .write_all(&to_json(&Report {
                    command: "ph",
                    setup: setup.report(r, rule),
                    result: summary,
                }))
                .map_err(io_err)
        }
    }
}

fn cmd_manifold(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let setup = Setup::load(cfg)?;
    if setup.mode != Mode::Density {
        return Err(CliError::Config(
            "manifold recovery works on densities only".into(),
        ));
    }
    let m: usize = cfg.require("m")?;
    let epsilon = positive("epsilon", cfg.get("epsilon")?)?;
    let (r, rule) = setup.radius(cfg, epsilon)?;
    let epsilon = setup.epsilon_or_default(epsilon, r)?;
    let k_max = cfg.get("k_max")?.unwrap_or(m + 1);
    let rec = recover_manifold_homology(
        &setup.data,
        epsilon,
        m,
        r,
        k_max,
        &setup.kernel,
        &setup.opts,
    )
    .map_err(config_if_invalid)?;
    emit(
        cfg,
        &to_json(&Report {
            command: "manifold",
            setup: setup.report(r, rule),
            result: rec,
        }),
        stdout,
    )
}

/// Twelve decimals, `inf` for an infinite distance.
pub fn format_distance(d: f64) -> String {
    if d.is_infinite() {
        "inf".to_string()
    } else {
        format!("{d:.12}")
    }
}

fn cmd_bottleneck(args: &BottleneckArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let read = |p: &Path| -> Result<_, CliError> {
        let text = std::fs::read_to_string(p).map_err(file_err(p))?;
        Ok(parse_tsv(&text)?)
    };
    let a = degree_of(&read(&args.first)?, args.degree);
    let b = degree_of(&read(&args.second)?, args.degree);
    writeln!(stdout, "{}", format_distance(bottleneck(&a, &b))).map_err(io_err)
}
