//! Seeded experiment drivers: structural reactivity over Erdős–Rényi
//! ensembles and side-by-side norm trajectories.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{erdos_renyi, Laplacian};
use crate::link_ilp::{self, LinkError};
use crate::sim::{self, NormEnvelope, SimError, Trajectory};
use crate::spectral;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("at least one sample per grid point is required")]
    NoSamples,
    #[error("Laplacians have {0} and {1} nodes")]
    Dimension(usize, usize),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub p: f64,
    pub samples: usize,
    pub psi_mean: f64,
    /// Population standard deviation.
    pub psi_std: f64,
    pub seed: u64,
}

pub const DEFAULT_NODE_COUNTS: [usize; 3] = [8, 12, 16];
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_P_STEP: f64 = 0.05;

/// `0, 1/m, ..., 1` with `m = round(1/step)`.
pub fn p_grid(step: f64) -> Vec<f64> {
    let m = (1.0 / step).round().max(1.0) as usize;
    (0..=m).map(|k| k as f64 / m as f64).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one sampled graph, independent of evaluation order.
pub fn sample_seed(base: u64, n: usize, p_index: usize, sample: usize) -> u64 {
    [n as u64, p_index as u64, sample as u64]
        .iter()
        .fold(splitmix64(base), |h, &v| splitmix64(h ^ v))
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool for `None`.
pub fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, ExperimentError> {
    match jobs {
        None => Ok(f()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| ExperimentError::ThreadPool(e.to_string())),
    }
}

/// Mean and standard deviation of `ψ` over `samples` Erdős–Rényi graphs per
/// `(n, p)` pair. Output is ordered by `(n, p)` as given, and depends only on
/// the arguments.
pub fn sweep_structural_reactivity(
    ns: &[usize],
    ps: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<SweepRecord>, ExperimentError> {
    if samples == 0 {
        return Err(ExperimentError::NoSamples);
    }
    if let Some(&p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(ExperimentError::BadProbability(p));
    }
    let cells: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| (0..ps.len()).map(move |pi| (n, pi)))
        .collect();
    let tasks: Vec<(usize, usize, usize)> = cells
        .iter()
        .flat_map(|&(n, pi)| (0..samples).map(move |s| (n, pi, s)))
        .collect();
    let psis: Vec<f64> = tasks
        .par_iter()
        .map(|&(n, pi, s)| {
            let g = erdos_renyi(n, ps[pi], sample_seed(seed, n, pi, s));
            link_ilp::structural_reactivity(&g)
        })
        .collect::<Result<_, _>>()?;

    Ok(cells
        .iter()
        .zip(psis.chunks(samples))
        .map(|(&(n, pi), chunk)| {
            let mean = chunk.iter().sum::<f64>() / samples as f64;
            let var = chunk.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / samples as f64;
            SweepRecord {
                n,
                p: ps[pi],
                samples,
                psi_mean: mean,
                psi_std: var.sqrt(),
                seed,
            }
        })
        .collect())
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("n,p,psi_mean,psi_std,samples,seed\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.p, r.psi_mean, r.psi_std, r.samples, r.seed
        );
    }
    out
}

/// Trajectories of the same initial state under two Laplacians.
#[derive(Debug, Clone)]
pub struct TrajectoryComparison {
    pub original: Trajectory,
    pub optimized: Trajectory,
    pub original_envelope: NormEnvelope,
    pub optimized_envelope: NormEnvelope,
    pub original_consensus: Option<f64>,
    pub optimized_consensus: Option<f64>,
}

impl TrajectoryComparison {
    /// `t,norm_L,norm_Lstar`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm_L,norm_Lstar\n");
        for ((t, a), b) in self
            .original
            .times
            .iter()
            .zip(&self.original.norms)
            .zip(&self.optimized.norms)
        {
            let _ = writeln!(out, "{t},{a},{b}");
        }
        out
    }
}

/// Integrates both systems with identical `σ`, step and horizon so the norm
/// series line up sample by sample.
pub fn compare_trajectories(
    l: &Laplacian,
    l_star: &Laplacian,
    x0: &[f64],
    sigma: f64,
    dt: f64,
    t_end: f64,
) -> Result<TrajectoryComparison, ExperimentError> {
    if l.n() != l_star.n() {
        return Err(ExperimentError::Dimension(l.n(), l_star.n()));
    }
    let original = sim::simulate(l, x0, sigma, dt, t_end)?;
    let optimized = sim::simulate(l_star, x0, sigma, dt, t_end)?;
    let original_envelope = sim::norm_envelope(&original)?;
    let optimized_envelope = sim::norm_envelope(&optimized)?;
    let consensus = |m: &Laplacian| {
        spectral::consensus_value(m, x0)
            .ok()
            .map(|c| c.consensus_value)
    };
    Ok(TrajectoryComparison {
        original_consensus: consensus(l),
        optimized_consensus: consensus(l_star),
        original,
        optimized,
        original_envelope,
        optimized_envelope,
    })
}

/// Step size that satisfies the stability guard for both Laplacians.
pub fn shared_dt(l: &Laplacian, l_star: &Laplacian, sigma: f64) -> f64 {
    sim::default_dt(l, sigma).min(sim::default_dt(l_star, sigma))
}
