//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the network admits no solution (the
//! reason goes to stderr and into the JSON report), 2 for usage, I/O and
//! parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiments::{self, ExperimentError, SweepRecord};
use crate::graph::{erdos_renyi, parse_edge_list, DirectedGraph, GraphError, GraphJson, Laplacian};
use crate::link_ilp::{self, LinkError, LinkPerturbation};
use crate::sim::{self, NormEnvelope, SimError};
use crate::spectral::{self, SpectralError};
use crate::weight_qp::{self, WeightError};

#[derive(Debug, Parser)]
#[command(
    name = "minreact",
    version,
    about = "Reactivity analysis and balancing of directed consensus networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report reactivity, balance, connectivity and (with --x0) the consensus value
    Analyze(AnalyzeArgs),
    /// Minimal weight perturbation that makes the network minimally reactive
    BalanceWeights(BalanceWeightsArgs),
    /// Minimal link additions/removals that balance an unweighted network
    BalanceLinks(BalanceLinksArgs),
    /// Integrate dx/dt = sigma L x and write the trajectory as CSV
    Simulate(SimulateArgs),
    /// Norm trajectories of a network and its balanced counterpart
    Compare(CompareArgs),
    /// Structural reactivity of Erdős–Rényi graphs over a grid of p
    Sweep(SweepArgs),
    /// Sample an Erdős–Rényi digraph
    Generate(GenerateArgs),
}

/// Network file: edge list, `{n, arcs}` JSON, or a JSON report from
/// `balance-weights` (`L_star`) or `balance-links` (`graph`). `-` reads stdin.
#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(value_name = "INPUT", required_unless_present = "input")]
    pub path: Option<PathBuf>,
    /// Same as the positional INPUT
    #[arg(short, long, value_name = "INPUT", conflicts_with = "path")]
    pub input: Option<PathBuf>,
}

impl InputArgs {
    fn path(&self) -> &Path {
        self.path
            .as_deref()
            .or(self.input.as_deref())
            .expect("clap enforces an input")
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Initial state for the consensus prediction, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    /// Write the report here instead of stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BalanceWeightsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Minimum arc weight kept after balancing [default: 1e-3 × smallest arc weight]
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkMode {
    Add,
    Remove,
    Both,
}

#[derive(Debug, Args)]
pub struct BalanceLinksArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = LinkMode::Both)]
    pub mode: LinkMode,
    /// With --mode both, break ties towards additions
    #[arg(long)]
    pub prefer_add: bool,
    /// Tie-break weight for --prefer-add, in (0, 1/n²) [default: 0.5/n²]
    #[arg(long, requires = "prefer_add")]
    pub bias: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Initial state, comma separated [default: standard normal draws from --seed]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coupling strength
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// RK4 step [default: 0.01 / (sigma × max|L_ii|)]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon [default: 10 / (sigma × max(|Re λ₂|, 0.1))]
    #[arg(long = "t-end", visible_alias = "horizon")]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// CSV destination; a JSON summary is then printed on stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Balanced network to compare against [default: balance-weights of INPUT]
    #[arg(long)]
    pub against: Option<PathBuf>,
    /// Margin used when computing the balanced network
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// CSV destination; a JSON summary is then printed on stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Node counts
    #[arg(long = "n", value_delimiter = ',', default_values_t = experiments::DEFAULT_NODE_COUNTS)]
    pub ns: Vec<usize>,
    /// Grid step for p over [0, 1]
    #[arg(long, default_value_t = experiments::DEFAULT_P_STEP)]
    pub p_step: f64,
    /// Explicit probabilities instead of a grid
    #[arg(long = "p", value_delimiter = ',', conflicts_with = "p_step")]
    pub ps: Option<Vec<f64>>,
    #[arg(long, default_value_t = experiments::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: available cores]
    #[arg(long, env = "MINREACT_JOBS")]
    pub jobs: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Edges,
    Json,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GraphFormat::Edges)]
    pub format: GraphFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: String,
        #[source]
        source: GraphError,
    },
    #[error("{0}")]
    Usage(String),
    /// The request is well formed but has no solution.
    #[error("{reason}")]
    Domain {
        reason: String,
        report: Option<String>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain { .. } => 1,
            _ => 2,
        }
    }

    fn domain(reason: impl Into<String>) -> Self {
        let reason = reason.into();
        let report = Some(to_json(&ErrorReport {
            error: reason.clone(),
        }));
        CliError::Domain { reason, report }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::domain(e.to_string())
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::BiasOutOfRange { .. } => CliError::Usage(e.to_string()),
            other => CliError::domain(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Link(l) => l.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ErrorReport {
    pub error: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ConsensusReport {
    pub value: f64,
    pub left_vector: Vec<f64>,
    pub warning: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct AnalyzeReport {
    pub n: usize,
    pub arcs: usize,
    pub reactivity: f64,
    pub minimally_reactive: bool,
    pub column_sum_residual: f64,
    pub balanced: bool,
    pub strongly_connected: bool,
    pub has_spanning_tree: bool,
    pub convergence_rate: Option<f64>,
    pub consensus: Option<ConsensusReport>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct WeightReport {
    #[serde(rename = "P")]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(rename = "L_star")]
    pub l_star: Option<Vec<Vec<f64>>>,
    pub objective: Option<f64>,
    pub epsilon: f64,
    pub kkt_residual: Option<f64>,
    pub feasible: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct LinkReport {
    pub mode: LinkMode,
    pub prefer_add: bool,
    pub added: Vec<(usize, usize)>,
    pub removed: Vec<(usize, usize)>,
    #[serde(rename = "J_star")]
    pub j_star: usize,
    pub psi: f64,
    pub graph: GraphJson,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EnvelopeReport {
    pub initial_growth_rate: f64,
    pub max_norm: f64,
    pub monotone: bool,
    pub final_norm: f64,
    pub consensus: Option<f64>,
}

impl EnvelopeReport {
    fn new(env: &NormEnvelope, final_norm: f64, consensus: Option<f64>) -> Self {
        EnvelopeReport {
            initial_growth_rate: env.initial_growth_rate,
            max_norm: env.max_norm,
            monotone: env.monotone,
            final_norm,
            consensus,
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SimulateReport {
    pub n: usize,
    pub sigma: f64,
    pub dt: f64,
    pub t_end: f64,
    pub samples: usize,
    pub x0: Vec<f64>,
    pub final_state: Vec<f64>,
    pub envelope: EnvelopeReport,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CompareReport {
    pub sigma: f64,
    pub dt: f64,
    pub t_end: f64,
    pub samples: usize,
    pub x0: Vec<f64>,
    pub original: EnvelopeReport,
    pub optimized: EnvelopeReport,
}

/// A network as read from disk. Laplacians from reports are kept verbatim
/// rather than rebuilt from their arcs.
#[derive(Debug, Clone)]
pub struct Network {
    pub graph: DirectedGraph,
    pub laplacian: Laplacian,
}

impl Network {
    fn from_graph(graph: DirectedGraph) -> Self {
        let laplacian = graph.laplacian();
        Network { graph, laplacian }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io)
    }
}

pub fn parse_network(text: &str) -> Result<Network, GraphError> {
    if !text.trim_start().starts_with('{') {
        return parse_edge_list(text).map(Network::from_graph);
    }
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
    let json = |e: serde_json::Error| GraphError::Json(e.to_string());
    if let Some(m) = value.get("L_star") {
        let rows: Vec<Vec<f64>> = serde_json::from_value(m.clone()).map_err(json)?;
        let laplacian = Laplacian::from_rows(&rows)?;
        return Ok(Network {
            graph: laplacian.to_graph(),
            laplacian,
        });
    }
    let g = value.get("graph").unwrap_or(&value);
    let gj: GraphJson = serde_json::from_value(g.clone()).map_err(json)?;
    DirectedGraph::from_json(&gj).map(Network::from_graph)
}

pub fn load_network(path: &Path) -> Result<Network, CliError> {
    let text = read_text(path)?;
    parse_network(&text).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn initial_state(x0: &Option<Vec<f64>>, n: usize, seed: u64) -> Result<Vec<f64>, CliError> {
    match x0 {
        Some(v) if v.len() != n => Err(CliError::Usage(format!(
            "--x0 has {} entries, network has {n} nodes",
            v.len()
        ))),
        Some(v) => Ok(v.clone()),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
        }
    }
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_network(args.input.path())?;
    let l = &net.laplacian;
    let r = spectral::reactivity(l)?;
    let consensus = match &args.x0 {
        None => None,
        Some(_) => {
            let x0 = initial_state(&args.x0, l.n(), 0)?;
            let c = spectral::consensus_value(l, &x0)?;
            Some(ConsensusReport {
                value: c.consensus_value,
                left_vector: c.left_vector,
                warning: c.warning,
            })
        }
    };
    let report = AnalyzeReport {
        n: l.n(),
        arcs: net.graph.arc_count(),
        reactivity: r.reactivity,
        minimally_reactive: r.minimally_reactive,
        column_sum_residual: r.column_sum_residual,
        balanced: r.minimally_reactive,
        strongly_connected: net.graph.is_strongly_connected(),
        has_spanning_tree: net.graph.has_directed_spanning_tree(),
        convergence_rate: spectral::convergence_rate(l),
        consensus,
    };
    emit(out, args.output.as_deref(), &to_json(&report))
}

fn balance_weights(args: &BalanceWeightsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_network(args.input.path())?;
    let l = &net.laplacian;
    let epsilon = args
        .epsilon
        .unwrap_or_else(|| weight_qp::default_epsilon(l));
    match weight_qp::solve_weight_perturbation(l, epsilon) {
        Ok(w) => {
            let report = WeightReport {
                p: Some(w.p.to_rows()),
                l_star: Some(w.l_star.matrix().to_rows()),
                objective: Some(w.objective),
                epsilon,
                kkt_residual: w.kkt_residual,
                feasible: true,
                reason: None,
            };
            emit(out, args.output.as_deref(), &to_json(&report))
        }
        Err(WeightError::BadEpsilon(e)) => Err(CliError::Usage(format!(
            "--epsilon must be positive and finite, got {e}"
        ))),
        Err(e) => {
            let reason = match &e {
                WeightError::Infeasible(r) => r.to_string(),
                other => other.to_string(),
            };
            let report = WeightReport {
                p: None,
                l_star: None,
                objective: None,
                epsilon,
                kkt_residual: None,
                feasible: false,
                reason: Some(reason.clone()),
            };
            Err(CliError::Domain {
                reason,
                report: Some(to_json(&report)),
            })
        }
    }
}

fn balance_links(args: &BalanceLinksArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_network(args.input.path())?;
    let g = &net.graph;
    if args.prefer_add && args.mode != LinkMode::Both {
        return Err(CliError::Usage(
            "--prefer-add only applies to --mode both".into(),
        ));
    }
    let p: LinkPerturbation = match args.mode {
        LinkMode::Add => link_ilp::solve_link_addition(g)?,
        LinkMode::Remove => link_ilp::solve_link_removal(g)?,
        LinkMode::Both => {
            let bias = args
                .prefer_add
                .then(|| args.bias.unwrap_or_else(|| link_ilp::default_bias(g.n())));
            link_ilp::solve_link_addrem(g, bias)?
        }
    };
    let report = LinkReport {
        mode: args.mode,
        prefer_add: args.prefer_add,
        psi: p.psi(),
        j_star: p.j_star,
        graph: p.a_star.to_json(),
        added: p.added,
        removed: p.removed,
    };
    emit(out, args.output.as_deref(), &to_json(&report))
}

struct Resolved {
    x0: Vec<f64>,
    dt: f64,
    t_end: f64,
}

fn resolve_dynamics(d: &DynamicsArgs, ls: &[&Laplacian]) -> Result<Resolved, CliError> {
    if !(d.sigma.is_finite() && d.sigma > 0.0) {
        return Err(CliError::Usage(format!(
            "--sigma must be positive, got {}",
            d.sigma
        )));
    }
    let x0 = initial_state(&d.x0, ls[0].n(), d.seed)?;
    let dt = d.dt.unwrap_or_else(|| {
        ls.iter()
            .map(|l| sim::default_dt(l, d.sigma))
            .fold(f64::INFINITY, f64::min)
    });
    let t_end = d.t_end.unwrap_or_else(|| {
        ls.iter()
            .map(|l| sim::default_horizon(l, d.sigma))
            .fold(0.0, f64::max)
    });
    Ok(Resolved { x0, dt, t_end })
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_network(args.input.path())?;
    let l = &net.laplacian;
    let r = resolve_dynamics(&args.dynamics, &[l])?;
    let traj = sim::simulate(l, &r.x0, args.dynamics.sigma, r.dt, r.t_end)?;
    match &args.output {
        None => emit(out, None, &traj.to_csv()),
        Some(path) => {
            emit(out, Some(path), &traj.to_csv())?;
            let env = sim::norm_envelope(&traj)?;
            let consensus = spectral::consensus_value(l, &r.x0)
                .ok()
                .map(|c| c.consensus_value);
            let report = SimulateReport {
                n: l.n(),
                sigma: args.dynamics.sigma,
                dt: r.dt,
                t_end: r.t_end,
                samples: traj.len(),
                final_state: traj.final_state().to_vec(),
                envelope: EnvelopeReport::new(&env, *traj.norms.last().unwrap(), consensus),
                x0: r.x0,
            };
            emit(out, None, &to_json(&report))
        }
    }
}

fn compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_network(args.input.path())?;
    let l = &net.laplacian;
    let l_star = match &args.against {
        Some(p) => load_network(p)?.laplacian,
        None => {
            let eps = args
                .epsilon
                .unwrap_or_else(|| weight_qp::default_epsilon(l));
            match weight_qp::solve_weight_perturbation(l, eps) {
                Ok(w) => w.l_star,
                Err(WeightError::BadEpsilon(e)) => {
                    return Err(CliError::Usage(format!(
                        "--epsilon must be positive, got {e}"
                    )))
                }
                Err(WeightError::Infeasible(r)) => return Err(CliError::domain(r.to_string())),
                Err(e) => return Err(CliError::domain(e.to_string())),
            }
        }
    };
    if l_star.n() != l.n() {
        return Err(CliError::Usage(format!(
            "networks have {} and {} nodes",
            l.n(),
            l_star.n()
        )));
    }
    let r = resolve_dynamics(&args.dynamics, &[l, &l_star])?;
    let sigma = args.dynamics.sigma;
    let c = experiments::compare_trajectories(l, &l_star, &r.x0, sigma, r.dt, r.t_end)?;
    match &args.output {
        None => emit(out, None, &c.to_csv()),
        Some(path) => {
            emit(out, Some(path), &c.to_csv())?;
            let report = CompareReport {
                sigma,
                dt: r.dt,
                t_end: r.t_end,
                samples: c.original.len(),
                original: EnvelopeReport::new(
                    &c.original_envelope,
                    *c.original.norms.last().unwrap(),
                    c.original_consensus,
                ),
                optimized: EnvelopeReport::new(
                    &c.optimized_envelope,
                    *c.optimized.norms.last().unwrap(),
                    c.optimized_consensus,
                ),
                x0: r.x0,
            };
            emit(out, None, &to_json(&report))
        }
    }
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ps = match &args.ps {
        Some(ps) => ps.clone(),
        None => {
            if !(args.p_step.is_finite() && args.p_step > 0.0 && args.p_step <= 1.0) {
                return Err(CliError::Usage(format!(
                    "--p-step must be in (0, 1], got {}",
                    args.p_step
                )));
            }
            experiments::p_grid(args.p_step)
        }
    };
    if args.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let records: Vec<SweepRecord> = experiments::with_jobs(args.jobs, || {
        experiments::sweep_structural_reactivity(&args.ns, &ps, args.samples, args.seed)
    })??;
    emit(
        out,
        args.output.as_deref(),
        &experiments::sweep_csv(&records),
    )
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&args.p) {
        return Err(CliError::Usage(format!(
            "--p must be in [0, 1], got {}",
            args.p
        )));
    }
    let g = erdos_renyi(args.n, args.p, args.seed);
    let text = match args.format {
        GraphFormat::Edges => g.to_edge_list(),
        GraphFormat::Json => to_json(&g.to_json()),
    };
    emit(out, args.output.as_deref(), &text)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::BalanceWeights(a) => balance_weights(a, out),
        Command::BalanceLinks(a) => balance_links(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Generate(a) => generate(a, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Domain {
                report: Some(r), ..
            } = &e
            {
                let _ = out.write_all(r.as_bytes());
            }
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
