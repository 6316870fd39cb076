//! Command-line front end for the lightforest library.
//!
//! Exit codes: 0 success, 1 validation violations, 2 infeasible session,
//! 64 bad flags or unknown node, 65 malformed topology or structure input,
//! 66 unreadable input file, 73 unwritable output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lightforest::algorithms::{route, Algorithm, ConnectorRule, MulticastSession, RoutingError, TieBreakPolicy};
use lightforest::metrics::evaluate;
use lightforest::oracle::{check_heuristic, min_forest_size_with_root, OracleBudget, OracleError};
use lightforest::simulation::{
    format_sig6, plot_script, run_metric_campaign, run_throughput, to_csv, CampaignConfig, MemberSpec,
    SimulationError,
};
use lightforest::structures::{LightStructure, StructureKind};
use lightforest::topology::{
    builtin_constraint_violations, builtin_topology, degree_expectation_violations, load_topology, Network,
    NodeId, TopologyError, BUILTIN_TOPOLOGIES,
};
use lightforest::wavelength::{first_fit, WavelengthState};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_CANT_CREATE: u8 = 73;

#[derive(Parser)]
#[command(name = "lightforest", version, about = "Multicast routing with sparse light splitting in WDM networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Route one session and print its structures, wavelengths and metrics.
    Route(RouteArgs),
    /// Average per-session metrics over seeded random sessions.
    Campaign(CampaignArgs),
    /// Sessions accepted before the first blocking, averaged over trials.
    Throughput(CampaignArgs),
    /// Check a topology file, its degree profile, or saved structures.
    Validate(ValidateArgs),
    /// Exact minimum light-forest size on a small instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct PolicyArgs {
    /// Destination tie-break: `smallest-id` or `explicit:<id,id,...>`.
    #[arg(long, default_value = "smallest-id")]
    order: String,
    /// Connector tie-break for GRDP: in-tree-distance, smallest-id or most-recent.
    #[arg(long, value_enum, default_value_t = ConnectorArg::InTreeDistance)]
    connector: ConnectorArg,
    /// Make an MI source obey the one-output rule.
    #[arg(long)]
    mi_source_single_output: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnectorArg {
    InTreeDistance,
    SmallestId,
    MostRecent,
}

#[derive(Args)]
struct RouteArgs {
    /// Bundled topology name (nsf, longhaul, cost239) or a topology file.
    #[arg(long)]
    topology: String,
    #[arg(long)]
    source: u32,
    /// Destination ids, comma separated.
    #[arg(long)]
    dest: String,
    /// MC node ids (`all`, `none` or a list); defaults to the topology's own capabilities.
    #[arg(long)]
    mc: Option<String>,
    /// mo, grdp-lt or grdp-lh.
    #[arg(long, default_value = "grdp-lt")]
    algo: String,
    /// Wavelengths per fiber for the assignment; defaults to the topology's value.
    #[arg(long)]
    wavelengths: Option<u32>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    topology: String,
    /// Group size as a fraction of the node count, source included.
    #[arg(long, conflicts_with = "members")]
    ratio: Option<f64>,
    /// Group size as an absolute count, source included.
    #[arg(long)]
    members: Option<usize>,
    /// Algorithms, comma separated.
    #[arg(long, default_value = "mo,grdp-lt,grdp-lh")]
    algos: String,
    /// MC counts: a list (`0,4,8`) and/or inclusive ranges (`0..28:4`).
    #[arg(long, default_value = "0")]
    mc: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    wavelengths: u32,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write `<out>.plot.py`, a matplotlib script for the CSV.
    #[arg(long, requires = "out")]
    plot: bool,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    topology: String,
    /// Required degree counts, e.g. `4:7,5:1`.
    #[arg(long)]
    expect_degrees: Option<String>,
    /// Check the structural facts of a bundled topology (nsf, longhaul, cost239).
    #[arg(long)]
    check_constraints: Option<String>,
    /// Structure file, as printed by `route`, to validate against the topology.
    #[arg(long)]
    structure: Option<PathBuf>,
    /// Session source the structures must be rooted at.
    #[arg(long, requires = "structure")]
    source: Option<u32>,
    /// Kind for structure blocks without a `kind` header.
    #[arg(long, value_enum, default_value_t = KindArg::Tree)]
    kind: KindArg,
    /// MC node ids (`all`, `none` or a list) to apply before validating structures.
    #[arg(long)]
    mc: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Tree,
    Hierarchy,
    Both,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    topology: String,
    #[arg(long)]
    source: u32,
    #[arg(long)]
    dest: String,
    #[arg(long)]
    mc: Option<String>,
    #[arg(long, value_enum, default_value_t = KindArg::Both)]
    kind: KindArg,
    /// Also run these algorithms and compare them with the optimum.
    #[arg(long)]
    algos: Option<String>,
    #[arg(long, default_value_t = 8)]
    max_nodes: usize,
    #[arg(long, default_value_t = 3)]
    max_destinations: usize,
    #[arg(long, default_value_t = 10)]
    max_edges: usize,
    #[command(flatten)]
    policy: PolicyArgs,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

impl From<RoutingError> for Failure {
    fn from(e: RoutingError) -> Self {
        let code = match e {
            RoutingError::Infeasible(_) => EXIT_INFEASIBLE,
            RoutingError::Structure(_) => EXIT_DATA,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        let code = match e {
            SimulationError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Routing(r) => r.into(),
            OracleError::BudgetExceeded(_) => Failure::usage(e.to_string()),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Route(a) => cmd_route(&a),
        Command::Campaign(a) => cmd_campaign(&a, false),
        Command::Throughput(a) => cmd_campaign(&a, true),
        Command::Validate(a) => cmd_validate(&a),
        Command::Oracle(a) => cmd_oracle(&a),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NO_INPUT, format!("cannot read {}: {e}", path.display())))
}

enum TopologySource {
    Builtin(Network),
    File(Result<Network, TopologyError>),
}

fn resolve_topology(arg: &str) -> Result<TopologySource, Failure> {
    if BUILTIN_TOPOLOGIES.contains(&arg.to_ascii_lowercase().as_str()) || !Path::new(arg).exists() {
        return match builtin_topology(arg) {
            Ok(net) => Ok(TopologySource::Builtin(net)),
            Err(_) => Err(Failure::new(
                EXIT_NO_INPUT,
                format!("`{arg}` is neither a bundled topology ({}) nor a readable file", BUILTIN_TOPOLOGIES.join(", ")),
            )),
        };
    }
    Ok(TopologySource::File(load_topology(&read_input(Path::new(arg))?)))
}

fn load_network(arg: &str) -> Result<Network, Failure> {
    match resolve_topology(arg)? {
        TopologySource::Builtin(net) => Ok(net),
        TopologySource::File(Ok(net)) => Ok(net),
        TopologySource::File(Err(e)) => Err(Failure::new(EXIT_DATA, format!("{arg}: {e}"))),
    }
}

fn parse_ids(list: &str) -> Result<Vec<NodeId>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<NodeId>().map_err(|_| Failure::usage(format!("bad node id `{s}`"))))
        .collect()
}

fn apply_mc(net: Network, mc: Option<&str>) -> Result<Network, Failure> {
    let ids = match mc.map(str::trim) {
        None => return Ok(net),
        Some("all") => net.nodes().collect(),
        Some("none") => Vec::new(),
        Some(list) => parse_ids(list)?,
    };
    net.with_mc_nodes(&ids).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_policy(p: &PolicyArgs) -> Result<TieBreakPolicy, Failure> {
    let mut policy = match p.order.trim() {
        "smallest-id" => TieBreakPolicy::default(),
        other => match other.strip_prefix("explicit:") {
            Some(list) => TieBreakPolicy::explicit(parse_ids(list)?),
            None => return Err(Failure::usage(format!("bad --order `{other}`"))),
        },
    };
    policy.connector_rule = match p.connector {
        ConnectorArg::InTreeDistance => ConnectorRule::InTreeDistance,
        ConnectorArg::SmallestId => ConnectorRule::SmallestId,
        ConnectorArg::MostRecent => ConnectorRule::MostRecent,
    };
    policy.mi_source_single_output = p.mi_source_single_output;
    Ok(policy)
}

fn parse_algos(list: &str) -> Result<Vec<Algorithm>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Algorithm>().map_err(Failure::usage))
        .collect()
}

/// `0,4,8` and inclusive `a..b` or `a..b:step` ranges, in the order given.
fn parse_counts(spec: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::usage(format!("bad count list `{spec}`"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once("..") {
            None => out.push(part.parse().map_err(|_| bad())?),
            Some((a, rest)) => {
                let (b, step) = match rest.split_once(':') {
                    Some((b, s)) => (b, s.parse::<usize>().map_err(|_| bad())?),
                    None => (rest, 1),
                };
                let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if step == 0 || a > b {
                    return Err(bad());
                }
                out.extend((a..=b).step_by(step));
            }
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn join_ids<'a>(ids: impl IntoIterator<Item = &'a NodeId>) -> String {
    ids.into_iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn kind_name(kind: StructureKind) -> &'static str {
    match kind {
        StructureKind::Tree => "tree",
        StructureKind::Hierarchy => "hierarchy",
    }
}

fn cmd_route(a: &RouteArgs) -> Outcome {
    let mut net = apply_mc(load_network(&a.topology)?, a.mc.as_deref())?;
    if let Some(w) = a.wavelengths {
        net = net.with_wavelengths(w).map_err(|e| Failure::usage(e.to_string()))?;
    }
    let algorithm: Algorithm = a.algo.parse().map_err(Failure::usage)?;
    let policy = parse_policy(&a.policy)?;
    let session = MulticastSession::new(NodeId(a.source), parse_ids(&a.dest)?)?;
    session.check(&net)?;
    let forest = route(&net, &session, algorithm, &policy)?;
    let metrics = evaluate(&net, &forest, &session).map_err(RoutingError::from)?;
    let assignment = first_fit(&WavelengthState::new(&net), &forest).ok().map(|(a, _)| a);

    let mut out = format!(
        "session source {} destinations {} algorithm {}\n",
        session.source(),
        join_ids(session.destinations()),
        algorithm
    );
    for (k, s) in forest.structures.iter().enumerate() {
        let w = assignment
            .as_ref()
            .map_or("blocked".to_string(), |a| a.indices[k].to_string());
        out.push_str(&format!("structure {} kind {} wavelength {}\n", k + 1, kind_name(s.kind()), w));
        out.push_str(&s.to_string());
    }
    match &assignment {
        Some(a) => out.push_str(&format!("wavelengths {a}\n")),
        None => out.push_str(&format!("wavelengths blocked (W = {})\n", net.wavelengths())),
    }
    out.push_str(&format!(
        "metrics stress {} cost {} delay {} diameter {} structures {}\n",
        metrics.link_stress,
        format_sig6(metrics.total_cost),
        format_sig6(metrics.average_delay),
        metrics.diameter,
        metrics.structure_count
    ));
    Ok((out, 0))
}

fn cmd_campaign(a: &CampaignArgs, throughput: bool) -> Outcome {
    let net = load_network(&a.topology)?;
    let mut cfg = CampaignConfig::new(net);
    cfg.algorithms = parse_algos(&a.algos)?;
    cfg.members = match (a.ratio, a.members) {
        (_, Some(m)) => MemberSpec::Count(m),
        (Some(r), None) => MemberSpec::Ratio(r),
        (None, None) => MemberSpec::Ratio(0.25),
    };
    cfg.mc_counts = parse_counts(&a.mc)?;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.wavelengths = a.wavelengths;
    cfg.policy = parse_policy(&a.policy)?;
    cfg.jobs = a.jobs;
    let rows = if throughput {
        run_throughput(&cfg)?
    } else {
        run_metric_campaign(&cfg)?
    };
    let csv = to_csv(&rows);
    let Some(path) = &a.out else {
        return Ok((csv, 0));
    };
    let write = |p: &Path, text: &str| {
        fs::write(p, text).map_err(|e| Failure::new(EXIT_CANT_CREATE, format!("cannot write {}: {e}", p.display())))
    };
    write(path, &csv)?;
    let mut report = format!("wrote {}\n", path.display());
    if a.plot {
        let script = PathBuf::from(format!("{}.plot.py", path.display()));
        let name = path.file_name().map_or("campaign.csv".into(), |n| n.to_string_lossy().into_owned());
        write(&script, &plot_script(&name))?;
        report.push_str(&format!("wrote {}\n", script.display()));
    }
    Ok((report, 0))
}

/// Splits route-style output into structure blocks with their kinds.
fn structure_blocks(text: &str, default: StructureKind) -> Vec<(StructureKind, String)> {
    let mut blocks: Vec<(StructureKind, String)> = Vec::new();
    for line in text.lines() {
        let t = line.trim_start();
        if t.starts_with("structure") {
            let kind = if t.contains("kind hierarchy") {
                StructureKind::Hierarchy
            } else if t.contains("kind tree") {
                StructureKind::Tree
            } else {
                default
            };
            blocks.push((kind, String::new()));
        } else if t.starts_with("visit") || t.starts_with("served") {
            if blocks.is_empty() {
                blocks.push((default, String::new()));
            }
            let block = &mut blocks.last_mut().expect("just ensured").1;
            block.push_str(line);
            block.push('\n');
        }
    }
    blocks
}

fn cmd_validate(a: &ValidateArgs) -> Outcome {
    let mut problems: Vec<String> = Vec::new();
    let net = match resolve_topology(&a.topology)? {
        TopologySource::Builtin(net) | TopologySource::File(Ok(net)) => net,
        TopologySource::File(Err(e)) => {
            return Err(Failure::new(EXIT_VIOLATIONS, format!("{}: {e}", a.topology)));
        }
    };
    let net = apply_mc(net, a.mc.as_deref())?;

    if let Some(spec) = &a.expect_degrees {
        let mut expected = BTreeMap::new();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (d, c) = part
                .split_once(':')
                .and_then(|(d, c)| Some((d.parse::<usize>().ok()?, c.parse::<usize>().ok()?)))
                .ok_or_else(|| Failure::usage(format!("bad degree expectation `{part}`")))?;
            expected.insert(d, c);
        }
        problems.extend(degree_expectation_violations(&net, &expected));
    }
    if let Some(name) = &a.check_constraints {
        problems.extend(builtin_constraint_violations(name, &net).map_err(|e| Failure::usage(e.to_string()))?);
    }
    let mut checked = 0;
    if let Some(path) = &a.structure {
        let text = read_input(path)?;
        let default = if a.kind == KindArg::Hierarchy {
            StructureKind::Hierarchy
        } else {
            StructureKind::Tree
        };
        for (k, (kind, block)) in structure_blocks(&text, default).into_iter().enumerate() {
            let s = LightStructure::parse(&block, &net, kind)
                .map_err(|e| Failure::new(EXIT_DATA, format!("{}: structure {}: {e}", path.display(), k + 1)))?;
            let source = a.source.map_or(s.source(), NodeId);
            problems.extend(
                s.validate(&net, source)
                    .into_iter()
                    .map(|v| format!("structure {}: {v}", k + 1)),
            );
            checked += 1;
        }
    }
    if !problems.is_empty() {
        return Err(Failure::new(EXIT_VIOLATIONS, problems.join("\nerror: ")));
    }
    let hist: Vec<String> = net.degree_histogram().iter().map(|(d, c)| format!("{d}:{c}")).collect();
    let mut out = format!(
        "ok: {} nodes, {} links, degrees {}\n",
        net.node_count(),
        net.edge_count(),
        hist.join(",")
    );
    if checked > 0 {
        out.push_str(&format!("ok: {checked} structures valid\n"));
    }
    Ok((out, 0))
}

fn cmd_oracle(a: &OracleArgs) -> Outcome {
    let net = apply_mc(load_network(&a.topology)?, a.mc.as_deref())?;
    let session = MulticastSession::new(NodeId(a.source), parse_ids(&a.dest)?)?;
    session.check(&net)?;
    let policy = parse_policy(&a.policy)?;
    let budget = OracleBudget {
        max_nodes: a.max_nodes,
        max_destinations: a.max_destinations,
        max_edges_per_structure: a.max_edges,
    };
    let kinds: &[StructureKind] = match a.kind {
        KindArg::Tree => &[StructureKind::Tree],
        KindArg::Hierarchy => &[StructureKind::Hierarchy],
        KindArg::Both => &[StructureKind::Tree, StructureKind::Hierarchy],
    };
    let mut out = String::new();
    for kind in kinds {
        let k = min_forest_size_with_root(&net, &session, *kind, &budget, !policy.mi_source_single_output)?;
        out.push_str(&format!("optimum {} {k}\n", kind_name(*kind)));
    }
    let mut code = 0;
    if let Some(list) = &a.algos {
        for algorithm in parse_algos(list)? {
            let report = check_heuristic(&net, &session, &policy, algorithm, &budget)?;
            if !report.passed() {
                code = EXIT_VIOLATIONS;
            }
            out.push_str(&report.to_string());
        }
    }
    Ok((out, code))
}
