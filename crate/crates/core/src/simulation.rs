//! Seeded Monte-Carlo campaigns: per-session metric averages and
//! sessions accepted before the first blocking, both versus MC-node count.
//!
//! Every trial draws from its own ChaCha8 stream, selected by
//! `(mc_count << 32) | trial` under the campaign seed. All algorithms of a
//! trial replay the same stream, so they see identical MC placements and
//! sessions, and parallel execution gives the same bytes as sequential.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algorithms::{route, Algorithm, MulticastSession, RoutingError, TieBreakPolicy};
use crate::metrics::{evaluate, MetricsRecord};
use crate::topology::{Network, NodeId};
use crate::wavelength::{WavelengthError, WavelengthState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("member count {count} outside 2..={nodes}")]
    MemberCount { count: usize, nodes: usize },
    #[error("MC count {count} exceeds {nodes} nodes")]
    McCount { count: usize, nodes: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("wavelength count must be positive")]
    ZeroWavelengths,
    #[error("throughput needs at least 4 nodes for group sizes in [3, N-1]")]
    TooSmallForThroughput,
    #[error("gave up after {0} infeasible session draws")]
    Infeasible(usize),
    #[error("routing failed: {0}")]
    Routing(#[from] RoutingError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Group size as a fraction of N (rounded, source included) or an absolute count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemberSpec {
    Ratio(f64),
    Count(usize),
}

impl MemberSpec {
    pub fn resolve(self, nodes: usize) -> usize {
        match self {
            MemberSpec::Ratio(r) => (r * nodes as f64).round().max(0.0) as usize,
            MemberSpec::Count(m) => m,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub network: Network,
    pub algorithms: Vec<Algorithm>,
    /// Ignored by throughput runs, which draw group sizes uniformly.
    pub members: MemberSpec,
    pub mc_counts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub wavelengths: u32,
    pub policy: TieBreakPolicy,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl CampaignConfig {
    pub fn new(network: Network) -> Self {
        CampaignConfig {
            network,
            algorithms: Algorithm::ALL.to_vec(),
            members: MemberSpec::Ratio(0.25),
            mc_counts: vec![0],
            trials: 1000,
            seed: 0,
            wavelengths: 20,
            policy: TieBreakPolicy::default(),
            jobs: 1,
        }
    }

    pub fn member_count(&self) -> usize {
        self.members.resolve(self.network.node_count())
    }

    fn check(&self) -> Result<(), SimulationError> {
        let nodes = self.network.node_count();
        let m = self.member_count();
        if !(2..=nodes).contains(&m) {
            return Err(SimulationError::MemberCount { count: m, nodes });
        }
        if let Some(c) = self.mc_counts.iter().find(|c| **c > nodes) {
            return Err(SimulationError::McCount { count: *c, nodes });
        }
        if self.trials == 0 {
            return Err(SimulationError::NoTrials);
        }
        if self.algorithms.is_empty() {
            return Err(SimulationError::NoAlgorithms);
        }
        if self.wavelengths == 0 {
            return Err(SimulationError::ZeroWavelengths);
        }
        Ok(())
    }
}

/// Mean and sample standard deviation (0 for a single sample).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Stat::default();
        }
        let mean = kahan_sum(samples.iter().copied()) / n as f64;
        let sd = if n > 1 {
            let ss = kahan_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, sd }
    }
}

/// Compensated (Kahan-Babuska-Neumaier) summation.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub stress: Stat,
    pub cost: Stat,
    pub delay: Stat,
    pub diameter: Stat,
    pub structures: Stat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRow {
    pub algorithm: Algorithm,
    pub mc_count: usize,
    pub trials: usize,
    /// Metric campaigns only.
    pub metrics: Option<MetricSummary>,
    /// Throughput runs only.
    pub accepted: Option<Stat>,
    /// Session draws discarded because some member was unreachable.
    pub resampled: usize,
}

fn trial_rng(seed: u64, mc_count: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((mc_count as u64) << 32) | trial as u64);
    rng
}

/// Uniform group of `member_count` distinct nodes; the first drawn is the source.
pub fn gen_session(
    rng: &mut impl Rng,
    network: &Network,
    member_count: usize,
) -> Result<MulticastSession, SimulationError> {
    let nodes: Vec<NodeId> = network.nodes().collect();
    if !(2..=nodes.len()).contains(&member_count) {
        return Err(SimulationError::MemberCount {
            count: member_count,
            nodes: nodes.len(),
        });
    }
    let picked = sample(rng, nodes.len(), member_count);
    let mut members = picked.iter().map(|i| nodes[i]);
    let source = members.next().expect("at least two members");
    Ok(MulticastSession::new(source, members)?)
}

/// Copy of `network` with `count` uniformly chosen MC nodes and the rest MI.
pub fn gen_mc_nodes(rng: &mut impl Rng, network: &Network, count: usize) -> Result<Network, SimulationError> {
    let nodes: Vec<NodeId> = network.nodes().collect();
    if count > nodes.len() {
        return Err(SimulationError::McCount {
            count,
            nodes: nodes.len(),
        });
    }
    let mut mc: Vec<NodeId> = sample(rng, nodes.len(), count).iter().map(|i| nodes[i]).collect();
    mc.sort();
    Ok(network.with_mc_nodes(&mc).expect("sampled from the network"))
}

const MAX_RESAMPLES: usize = 1000;

fn is_infeasible(e: &RoutingError) -> bool {
    matches!(e, RoutingError::Infeasible(_))
}

/// One trial: every algorithm on the same MC placement and session.
fn metric_trial(
    cfg: &CampaignConfig,
    mc_count: usize,
    trial: usize,
) -> Result<(Vec<MetricsRecord>, usize), SimulationError> {
    let mut rng = trial_rng(cfg.seed, mc_count, trial);
    let net = gen_mc_nodes(&mut rng, &cfg.network, mc_count)?;
    let m = cfg.member_count();
    for resampled in 0..MAX_RESAMPLES {
        let session = gen_session(&mut rng, &net, m)?;
        let mut records = Vec::with_capacity(cfg.algorithms.len());
        let mut infeasible = false;
        for a in &cfg.algorithms {
            match route(&net, &session, *a, &cfg.policy) {
                Ok(r) => records.push(evaluate(&net, &r, &session).map_err(RoutingError::from)?),
                Err(e) if is_infeasible(&e) => {
                    infeasible = true;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !infeasible {
            return Ok((records, resampled));
        }
    }
    Err(SimulationError::Infeasible(MAX_RESAMPLES))
}

/// Sessions accepted by `algorithm` before the first blocked one.
fn throughput_trial(
    cfg: &CampaignConfig,
    algorithm: Algorithm,
    mc_count: usize,
    trial: usize,
) -> Result<(usize, usize), SimulationError> {
    let mut rng = trial_rng(cfg.seed, mc_count, trial);
    let net = gen_mc_nodes(&mut rng, &cfg.network, mc_count)?;
    let n = net.node_count();
    let mut state = WavelengthState::with_capacity(net.edge_count(), cfg.wavelengths)
        .map_err(|_| SimulationError::ZeroWavelengths)?;
    let (mut accepted, mut resampled) = (0, 0);
    loop {
        let size = rng.gen_range(3..=n - 1);
        let session = gen_session(&mut rng, &net, size)?;
        let forest = match route(&net, &session, algorithm, &cfg.policy) {
            Ok(f) => f,
            Err(e) if is_infeasible(&e) => {
                resampled += 1;
                if resampled >= MAX_RESAMPLES {
                    return Err(SimulationError::Infeasible(resampled));
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        match state.admit(&forest) {
            Ok(_) => accepted += 1,
            Err(WavelengthError::Blocked { .. }) => return Ok((accepted, resampled)),
            Err(e) => unreachable!("forest edges come from the same network: {e}"),
        }
    }
}

fn run_trials<T: Send>(
    cfg: &CampaignConfig,
    f: impl Fn(usize) -> Result<T, SimulationError> + Sync + Send,
) -> Result<Vec<T>, SimulationError> {
    if cfg.jobs == 1 {
        return (0..cfg.trials).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| SimulationError::Pool(e.to_string()))?;
    pool.install(|| (0..cfg.trials).into_par_iter().map(f).collect())
}

pub fn run_metric_campaign(cfg: &CampaignConfig) -> Result<Vec<CampaignRow>, SimulationError> {
    cfg.check()?;
    let mut rows = Vec::new();
    for &mc_count in &cfg.mc_counts {
        let results = run_trials(cfg, |t| metric_trial(cfg, mc_count, t))?;
        let resampled = results.iter().map(|(_, r)| r).sum();
        for (k, a) in cfg.algorithms.iter().enumerate() {
            let column = |f: fn(&MetricsRecord) -> f64| -> Stat {
                let xs: Vec<f64> = results.iter().map(|(recs, _)| f(&recs[k])).collect();
                Stat::of(&xs)
            };
            rows.push(CampaignRow {
                algorithm: *a,
                mc_count,
                trials: cfg.trials,
                metrics: Some(MetricSummary {
                    stress: column(|m| m.link_stress as f64),
                    cost: column(|m| m.total_cost),
                    delay: column(|m| m.average_delay),
                    diameter: column(|m| m.diameter as f64),
                    structures: column(|m| m.structure_count as f64),
                }),
                accepted: None,
                resampled,
            });
        }
    }
    Ok(rows)
}

pub fn run_throughput(cfg: &CampaignConfig) -> Result<Vec<CampaignRow>, SimulationError> {
    cfg.check()?;
    if cfg.network.node_count() < 4 {
        return Err(SimulationError::TooSmallForThroughput);
    }
    let mut rows = Vec::new();
    for &mc_count in &cfg.mc_counts {
        for a in &cfg.algorithms {
            let results = run_trials(cfg, |t| throughput_trial(cfg, *a, mc_count, t))?;
            let xs: Vec<f64> = results.iter().map(|(n, _)| *n as f64).collect();
            rows.push(CampaignRow {
                algorithm: *a,
                mc_count,
                trials: cfg.trials,
                metrics: None,
                accepted: Some(Stat::of(&xs)),
                resampled: results.iter().map(|(_, r)| r).sum(),
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "algorithm,mc_count,trials,stress_mean,stress_sd,cost_mean,cost_sd,\
delay_mean,delay_sd,diameter_mean,diameter_sd,structures_mean,accepted_mean,accepted_sd";

/// `x` with 6 significant digits, `%g` style.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

pub fn to_csv(rows: &[CampaignRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let stat = |s: Option<Stat>| match s {
        Some(s) => format!("{},{}", format_sig6(s.mean), format_sig6(s.sd)),
        None => ",".into(),
    };
    for r in rows {
        let metrics = match &r.metrics {
            Some(m) => format!(
                "{},{},{},{},{}",
                stat(Some(m.stress)),
                stat(Some(m.cost)),
                stat(Some(m.delay)),
                stat(Some(m.diameter)),
                format_sig6(m.structures.mean)
            ),
            None => ",,,,,,,,".into(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.algorithm,
            r.mc_count,
            r.trials,
            metrics,
            stat(r.accepted)
        );
    }
    out
}

/// Self-contained matplotlib script that plots every populated column of
/// `csv_name` against mc_count, one line per algorithm.
pub fn plot_script(csv_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Plot a lightforest campaign CSV. Usage: python3 this_script.py [csv]"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_name:?}
panels = [
    ("stress_mean", "Link stress"),
    ("delay_mean", "Average delay (hops)"),
    ("diameter_mean", "Diameter (hops)"),
    ("cost_mean", "Total cost"),
    ("accepted_mean", "Sessions accepted before blocking"),
]
labels = {{"member_only": "MO", "grdp_lt": "GRDP-LT", "grdp_lh": "GRDP-LH"}}

with open(path, newline="") as f:
    rows = list(csv.DictReader(f))

series = {{}}
for row in rows:
    for column, _ in panels:
        if row[column] != "":
            key = (column, row["algorithm"])
            series.setdefault(key, []).append((int(row["mc_count"]), float(row[column])))

present = [(c, t) for c, t in panels if any(k[0] == c for k in series)]
if not present:
    sys.exit("no plottable columns in " + path)
fig, axes = plt.subplots(1, len(present), figsize=(4.5 * len(present), 3.6), squeeze=False)
for ax, (column, title) in zip(axes[0], present):
    for (c, algorithm), points in sorted(series.items()):
        if c != column:
            continue
        points.sort()
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o",
                label=labels.get(algorithm, algorithm))
    ax.set_xlabel("Number of MC nodes")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print("wrote", out)
"#
    )
}
