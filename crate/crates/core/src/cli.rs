//! The `fisherflow` command line.
//!
//! Every subcommand is first turned into a [`RunConfig`], which can also be
//! loaded from JSON with `fisherflow run CONFIG`. [`run`] executes a config
//! and [`main_with_args`] maps the outcome onto exit codes: `0` on success,
//! `1` for invalid input and `2` for numerical failures, an LP that hit its
//! horizon, or a failed invariant suite.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::check::{run_checks, Suite};
use crate::error::{Error, Result};
use crate::flow::{closed_form_trajectory, flow_ode, solve_lp, LpStatus};
use crate::hamiltonian::{
    bracket_table, embed_simplex, hamiltonian_flow, hamiltonian_value, integrability_report,
    momentum_s1, momentum_torus, project, psi, random_state, ComplexState,
};
use crate::io::{emit_trajectory, fmt_f64, geodesic_csv, render_trajectory, Format};
use crate::metric::{bhattacharyya_angle, fr_distance, geodesic, geodesic_samples};
use crate::simplex::{
    make_simplex, random_simplex, realize_cost, CostSpec, SimplexPoint, Tolerances,
};
use crate::transform::{q_root, q_root_inverse, SphereQPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Transform,
    Distance,
    Geodesic,
    Flow,
    SolveLp,
    Hamiltonian,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianVerb {
    #[default]
    Evolve,
    Brackets,
    Momentum,
    Report,
}

/// Where a point comes from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointSpec {
    #[default]
    Uniform,
    /// Seeded draw; see [`random_simplex`].
    Random { concentration: f64 },
    /// Raw weights, normalized on use.
    Weights { values: Vec<f64> },
}

impl PointSpec {
    fn len(&self) -> Option<usize> {
        match self {
            PointSpec::Weights { values } => Some(values.len()),
            _ => None,
        }
    }
}

impl std::str::FromStr for PointSpec {
    type Err = Error;

    /// `uniform`, `random`, `random:CONCENTRATION` or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "uniform" => return Ok(PointSpec::Uniform),
            "random" => return Ok(PointSpec::Random { concentration: 1.0 }),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("random:") {
            return Ok(PointSpec::Random {
                concentration: parse_number(rest)?,
            });
        }
        Ok(PointSpec::Weights {
            values: parse_list(s)?,
        })
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_number).collect()
}

/// Parses `geometric:R`, `power:S`, `explicit:V1,V2,…` or a JSON object.
/// Families that need a truncation size take it from `n`.
pub fn parse_cost(text: &str, n: Option<usize>) -> Result<CostSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::Parse(format!("cost: {e}")));
    }
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("cost {text:?} is not KIND:ARGS")))?;
    let need_n = || n.ok_or_else(|| Error::InvalidArgument(format!("cost {kind} needs --n")));
    let spec = match kind {
        "geometric" => CostSpec::Geometric {
            ratio: parse_number(arg)?,
            n: need_n()?,
        },
        "power" => CostSpec::Power {
            exponent: parse_number(arg)?,
            n: need_n()?,
        },
        "explicit" => CostSpec::Explicit {
            values: parse_list(arg)?,
        },
        other => return Err(Error::Parse(format!("unknown cost kind {other:?}"))),
    };
    Ok(spec)
}

/// Fully resolved description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub initial: PointSpec,
    /// Second point for `distance` and `geodesic`.
    #[serde(default)]
    pub target: Option<PointSpec>,
    #[serde(default = "default_q")]
    pub q: f64,
    /// For `transform`: read `initial` as sphere coordinates and map back.
    #[serde(default)]
    pub inverse: bool,
    /// Horizon for `flow` and `hamiltonian evolve`.
    #[serde(default = "default_t")]
    pub t: f64,
    /// Output rows for `flow` and `evolve`, segments for `geodesic`.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// RK4 step for `flow`; the closed form is used when absent.
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default)]
    pub verb: HamiltonianVerb,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_suite")]
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_q() -> f64 {
    2.0
}
fn default_t() -> f64 {
    1.0
}
fn default_steps() -> usize {
    10
}
fn default_gap_tol() -> f64 {
    1e-6
}
fn default_t_max() -> f64 {
    1e4
}
fn default_samples() -> usize {
    100
}
fn default_suite() -> Suite {
    Suite::All
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            n: None,
            cost: None,
            initial: PointSpec::Uniform,
            target: None,
            q: default_q(),
            inverse: false,
            t: default_t(),
            steps: default_steps(),
            step: None,
            gap_tol: default_gap_tol(),
            t_max: default_t_max(),
            verb: HamiltonianVerb::default(),
            samples: default_samples(),
            suite: default_suite(),
            seed: 0,
            tolerances: Tolerances::default(),
            format: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// The truncation size implied by `n`, the cost and the explicit points;
    /// all of them must agree.
    pub fn dimension(&self) -> Result<Option<usize>> {
        let mut found = self.n;
        let mut sources = vec![self.cost.as_ref().map(CostSpec::n), self.initial.len()];
        sources.push(self.target.as_ref().and_then(PointSpec::len));
        for size in sources.into_iter().flatten() {
            match found {
                Some(expected) if expected != size => {
                    return Err(Error::DimensionMismatch {
                        expected,
                        found: size,
                    })
                }
                _ => found = Some(size),
            }
        }
        Ok(found)
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if let Some(cost) = &self.cost {
            cost.validate()?;
        }
        if let Some(n) = self.dimension()? {
            if n < 2 {
                return Err(Error::InvalidDimension { n });
            }
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} = {v} must be positive"
                )))
            }
        };
        positive("gap_tol", self.gap_tol)?;
        if let Some(step) = self.step {
            positive("step", step)?;
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t = {} must be non-negative",
                self.t
            )));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_max = {} must be non-negative",
                self.t_max
            )));
        }
        if self.steps == 0 || self.samples == 0 {
            return Err(Error::InvalidArgument(
                "steps and samples must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn need_dimension(&self) -> Result<usize> {
        self.dimension()?
            .ok_or_else(|| Error::InvalidArgument("dimension unknown; pass --n".into()))
    }

    fn need_cost(&self) -> Result<Vec<f64>> {
        let cost = self
            .cost
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("this command needs --cost".into()))?;
        realize_cost(cost)
    }

    fn point(&self, spec: &PointSpec, salt: u64) -> Result<SimplexPoint> {
        let n = self.need_dimension()?;
        match spec {
            PointSpec::Uniform => SimplexPoint::uniform(n),
            PointSpec::Random { concentration } => {
                random_simplex(n, self.seed.wrapping_add(salt), *concentration)
            }
            PointSpec::Weights { values } => make_simplex(values, &self.tolerances),
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
    /// One-line note for the error stream when `exit_code` is non-zero.
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            exit_code: EXIT_OK,
            diagnostic: None,
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Executes `config` and renders its result; nothing is written.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let format = config.format;
    match config.command {
        CommandKind::Transform => run_transform(config, format.unwrap_or(Format::Json)),
        CommandKind::Distance => run_distance(config, format.unwrap_or(Format::Json)),
        CommandKind::Geodesic => run_geodesic(config, format.unwrap_or(Format::Csv)),
        CommandKind::Flow => {
            let traj = flow_trajectory(config)?;
            render_trajectory(&traj, format.unwrap_or(Format::Csv)).map(Outcome::ok)
        }
        CommandKind::SolveLp => run_solve_lp(config, format.unwrap_or(Format::Json)),
        CommandKind::Hamiltonian => run_hamiltonian(config, format.unwrap_or(Format::Json)),
        CommandKind::Check => {
            let report = run_checks(config.suite, config.n.unwrap_or(8), config.seed)?;
            let mut out = Outcome::ok(json(&report)?);
            if !report.passed {
                out.exit_code = EXIT_NUMERICAL;
                let names: Vec<String> = report
                    .failures()
                    .map(|i| format!("{}/{}", i.suite, i.name))
                    .collect();
                out.diagnostic = Some(format!("failed checks: {}", names.join(", ")));
            }
            Ok(out)
        }
    }
}

/// Executes `config`, writes its artifact to `config.output` (or `stdout`)
/// and returns the exit code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let outcome = execute(config)?;
    match &config.output {
        Some(path) => write_artifact(config, &outcome, path)?,
        None => stdout.write_all(outcome.text.as_bytes())?,
    }
    if let Some(d) = &outcome.diagnostic {
        eprintln!("fisherflow: {d}");
    }
    Ok(outcome.exit_code)
}

fn write_artifact(config: &RunConfig, outcome: &Outcome, path: &Path) -> Result<()> {
    if config.command == CommandKind::Flow {
        // re-render through the checked emitter
        let traj = flow_trajectory(config)?;
        return emit_trajectory(&traj, config.format.unwrap_or(Format::Csv), path);
    }
    std::fs::write(path, &outcome.text)?;
    Ok(())
}

fn run_transform(config: &RunConfig, format: Format) -> Result<Outcome> {
    let (input, output) = if config.inverse {
        let PointSpec::Weights { values } = &config.initial else {
            return Err(Error::InvalidArgument(
                "--inverse needs explicit coordinates".into(),
            ));
        };
        let x = SphereQPoint::new(values.clone(), config.q, &config.tolerances)?;
        (values.clone(), q_root_inverse(&x)?.into_weights())
    } else {
        let p = config.point(&config.initial, 0)?;
        let x = q_root(&p, config.q)?;
        (p.weights().to_vec(), x.coords().to_vec())
    };
    let text = match format {
        Format::Json => json(&serde_json::json!({
            "q": config.q,
            "inverse": config.inverse,
            "input": input,
            "output": output,
        }))?,
        Format::Csv => {
            let mut s = String::from("index,input,output\n");
            for (k, (a, b)) in input.iter().zip(&output).enumerate() {
                s += &format!("{k},{},{}\n", fmt_f64(*a), fmt_f64(*b));
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn target(config: &RunConfig) -> Result<SimplexPoint> {
    let spec = config
        .target
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("this command needs --r".into()))?;
    config.point(spec, 1)
}

fn run_distance(config: &RunConfig, format: Format) -> Result<Outcome> {
    let p = config.point(&config.initial, 0)?;
    let r = target(config)?;
    let d = fr_distance(&p, &r)?;
    let angle = bhattacharyya_angle(&p, &r)?;
    let text = match format {
        Format::Json => json(&serde_json::json!({ "distance": d, "bhattacharyya_angle": angle }))?,
        Format::Csv => format!(
            "distance,bhattacharyya_angle\n{},{}\n",
            fmt_f64(d),
            fmt_f64(angle)
        ),
    };
    Ok(Outcome::ok(text))
}

fn run_geodesic(config: &RunConfig, format: Format) -> Result<Outcome> {
    let p = config.point(&config.initial, 0)?;
    let r = target(config)?;
    let samples = geodesic_samples(&geodesic(&p, &r)?, config.steps)?;
    let text = match format {
        Format::Csv => geodesic_csv(&samples)?,
        Format::Json => json(&samples)?,
    };
    Ok(Outcome::ok(text))
}

fn flow_trajectory(config: &RunConfig) -> Result<crate::flow::FlowTrajectory> {
    let c = config.need_cost()?;
    let p0 = config.point(&config.initial, 0)?;
    match config.step {
        Some(step) => flow_ode(&p0, &c, config.t, step),
        None => {
            let times: Vec<f64> = (0..=config.steps)
                .map(|i| config.t * i as f64 / config.steps as f64)
                .collect();
            closed_form_trajectory(&p0, &c, &times)
        }
    }
}

fn run_solve_lp(config: &RunConfig, format: Format) -> Result<Outcome> {
    let c = config.need_cost()?;
    let p0 = config.point(&config.initial, 0)?;
    let sol = solve_lp(&p0, &c, config.gap_tol, config.t_max)?;
    let text = match format {
        Format::Json => json(&sol)?,
        Format::Csv => {
            let mut s = String::from("index,maximizer,flow_point\n");
            for (k, (a, b)) in sol
                .maximizer
                .weights()
                .iter()
                .zip(sol.flow_point.weights())
                .enumerate()
            {
                s += &format!("{k},{},{}\n", fmt_f64(*a), fmt_f64(*b));
            }
            s
        }
    };
    let mut out = Outcome::ok(text);
    if sol.status == LpStatus::HorizonExceeded {
        out.exit_code = EXIT_NUMERICAL;
        out.diagnostic = Some(format!(
            "horizon {} reached with gap {:e} above {:e}",
            sol.horizon, sol.certificate_gap, config.gap_tol
        ));
    }
    Ok(out)
}

fn initial_state(config: &RunConfig) -> Result<ComplexState> {
    match &config.initial {
        PointSpec::Random { .. } => random_state(config.need_dimension()?, config.seed),
        spec => Ok(embed_simplex(&config.point(spec, 0)?)),
    }
}

#[derive(Serialize)]
struct EvolveRow {
    t: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    hamiltonian: f64,
}

fn run_hamiltonian(config: &RunConfig, format: Format) -> Result<Outcome> {
    let c = config.need_cost()?;
    match config.verb {
        HamiltonianVerb::Evolve => {
            let s0 = initial_state(config)?;
            let rows = (0..=config.steps)
                .map(|i| {
                    let t = config.t * i as f64 / config.steps as f64;
                    let s = hamiltonian_flow(&s0, &c, t)?;
                    Ok(EvolveRow {
                        t,
                        re: s.amplitudes().iter().map(|z| z.re).collect(),
                        im: s.amplitudes().iter().map(|z| z.im).collect(),
                        hamiltonian: hamiltonian_value(&s, &c)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let text = match format {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let mut s = String::from("t");
                    for k in 0..c.len() {
                        s += &format!(",re_{k},im_{k}");
                    }
                    s += ",hamiltonian\n";
                    for row in &rows {
                        s += &fmt_f64(row.t);
                        for (a, b) in row.re.iter().zip(&row.im) {
                            s += &format!(",{},{}", fmt_f64(*a), fmt_f64(*b));
                        }
                        s += &format!(",{}\n", fmt_f64(row.hamiltonian));
                    }
                    s
                }
            };
            Ok(Outcome::ok(text))
        }
        HamiltonianVerb::Brackets => {
            let s = initial_state(config)?;
            let table = bracket_table(&s, &c, config.tolerances.fd_step)?;
            Ok(Outcome::ok(json(&table)?))
        }
        HamiltonianVerb::Momentum => {
            let s = initial_state(config)?;
            let amps: Vec<Complex64> = s.amplitudes().to_vec();
            let torus = momentum_torus(&project(&s));
            Ok(Outcome::ok(json(&serde_json::json!({
                "s1": momentum_s1(&amps),
                "torus": torus,
                "psi": psi(&s),
                "doubled_torus": torus.doubled_as_simplex(&config.tolerances)?,
            }))?))
        }
        HamiltonianVerb::Report => {
            let report = integrability_report(&c, config.samples, config.seed)?;
            let mut out = Outcome::ok(json(&report)?);
            if !report.passed() {
                out.exit_code = EXIT_NUMERICAL;
                out.diagnostic = Some("integrability thresholds exceeded".into());
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "fisherflow",
    version,
    about = "Fisher-Rao geometry and gradient flows on truncated simplices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a simplex point through the q-root transform (or back).
    Transform(TransformArgs),
    /// Fisher-Rao distance between two points.
    Distance(PairArgs),
    /// Sample the Fisher-Rao geodesic between two points.
    Geodesic(GeodesicArgs),
    /// Trajectory of the gradient flow of a linear objective.
    Flow(FlowArgs),
    /// Maximize a linear objective by following the flow.
    SolveLp(LpArgs),
    /// Hamiltonian system on projective space.
    Hamiltonian(HamiltonianArgs),
    /// Run the invariant suites.
    Check(CheckArgs),
    /// Execute a JSON run configuration.
    Run { config: PathBuf },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Truncation size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for every random draw.
    #[arg(long, env = "FISHERFLOW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output format; each command has its own default.
    #[arg(long = "emit", alias = "format", value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// geometric:R, power:S, explicit:V1,V2,... or a JSON object.
    #[arg(long)]
    pub cost: Option<String>,
    /// Read the cost as JSON from a file.
    #[arg(long, conflicts_with = "cost")]
    pub cost_file: Option<PathBuf>,
    /// Constant added to every cost entry.
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,
}

impl CostArgs {
    fn resolve(&self, n: Option<usize>) -> Result<Option<CostSpec>> {
        let base = match (&self.cost, &self.cost_file) {
            (Some(text), _) => parse_cost(text, n)?,
            (None, Some(path)) => parse_cost(&std::fs::read_to_string(path)?, n)?,
            (None, None) => return Ok(None),
        };
        Ok(Some(match self.shift {
            Some(shift) => CostSpec::Shifted {
                base: Box::new(base),
                shift,
            },
            None => base,
        }))
    }
}

fn point_arg(s: &str) -> std::result::Result<PointSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// uniform, random[:CONCENTRATION] or a comma list.
    #[arg(long = "p", alias = "init", default_value = "uniform", value_parser = point_arg)]
    pub p: PointSpec,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Treat --p as sphere coordinates and map them back to the simplex.
    #[arg(long)]
    pub inverse: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long = "p", alias = "init", default_value = "uniform", value_parser = point_arg)]
    pub p: PointSpec,
    #[arg(long = "r", value_parser = point_arg)]
    pub r: PointSpec,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Number of segments.
    #[arg(long, default_value_t = 100)]
    pub segments: usize,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, default_value = "uniform", value_parser = point_arg)]
    pub init: PointSpec,
    /// Final time.
    #[arg(long, alias = "t-end", default_value_t = 1.0)]
    pub t: f64,
    /// Number of equally spaced output intervals (closed form).
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Integrate with RK4 at this step instead of the closed form.
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, default_value = "uniform", value_parser = point_arg)]
    pub init: PointSpec,
    #[arg(long, default_value_t = 1e-6)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 1e4)]
    pub t_max: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HamiltonianArgs {
    #[arg(value_enum)]
    pub verb: HamiltonianVerb,
    #[command(flatten)]
    pub cost: CostArgs,
    /// Initial state: `random` draws a complex unit vector, anything else is
    /// embedded through square roots.
    #[arg(long, default_value = "uniform", value_parser = point_arg)]
    pub init: PointSpec,
    #[arg(long, alias = "t-end", default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[command(flatten)]
    pub common: Common,
}

fn base(kind: CommandKind, common: &Common) -> RunConfig {
    let mut c = RunConfig::new(kind);
    c.n = common.n;
    c.seed = common.seed;
    c.format = common.format;
    c.output = common.out.clone();
    c
}

impl Command {
    /// The run configuration this command line describes.
    pub fn to_config(&self) -> Result<RunConfig> {
        Ok(match self {
            Command::Transform(a) => {
                let mut c = base(CommandKind::Transform, &a.common);
                c.initial = a.p.clone();
                c.q = a.q;
                c.inverse = a.inverse;
                c
            }
            Command::Distance(a) => pair_config(CommandKind::Distance, a),
            Command::Geodesic(a) => {
                let mut c = pair_config(CommandKind::Geodesic, &a.pair);
                c.steps = a.segments;
                c
            }
            Command::Flow(a) => {
                let mut c = base(CommandKind::Flow, &a.common);
                c.initial = a.init.clone();
                c.cost = a.cost.resolve(dimension_hint(c.n, &c.initial))?;
                c.t = a.t;
                c.steps = a.steps;
                c.step = a.step;
                c
            }
            Command::SolveLp(a) => {
                let mut c = base(CommandKind::SolveLp, &a.common);
                c.initial = a.init.clone();
                c.cost = a.cost.resolve(dimension_hint(c.n, &c.initial))?;
                c.gap_tol = a.gap_tol;
                c.t_max = a.t_max;
                c
            }
            Command::Hamiltonian(a) => {
                let mut c = base(CommandKind::Hamiltonian, &a.common);
                c.verb = a.verb;
                c.initial = a.init.clone();
                c.cost = a.cost.resolve(dimension_hint(c.n, &c.initial))?;
                c.t = a.t;
                c.steps = a.steps;
                c.samples = a.samples;
                c
            }
            Command::Check(a) => {
                let mut c = base(CommandKind::Check, &a.common);
                c.suite = a.suite;
                c
            }
            Command::Run { config } => RunConfig::from_json(&std::fs::read_to_string(config)?)?,
        })
    }
}

fn dimension_hint(n: Option<usize>, initial: &PointSpec) -> Option<usize> {
    n.or(initial.len())
}

fn pair_config(kind: CommandKind, a: &PairArgs) -> RunConfig {
    let mut c = base(kind, &a.common);
    c.initial = a.p.clone();
    c.target = Some(a.r.clone());
    c
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error as a single line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let result = cli
        .command
        .to_config()
        .and_then(|config| run(&config, &mut std::io::stdout().lock()));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fisherflow: error: {e}");
            exit_code(&e)
        }
    }
}
