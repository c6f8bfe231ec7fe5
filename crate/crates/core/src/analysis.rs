//! Exact enumeration, repeated trials, RMSD and parameter sweeps.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{index_to_string, DiagonalOperator, InteractionTable, PenaltyConfig};
use crate::lattice::Peptide;
use crate::solver::{run_algorithm, FoldingProblem, FoldingResult, RunSpec};

/// Widest operator `exact_ground_state` will enumerate.
pub const EXACT_LIMIT: usize = 24;
/// Distance from the exact minimum counted as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.01;
/// States within this of the minimum are listed as minimizers.
const DEGENERACY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub num_qubits: usize,
    pub min_energy: f64,
    pub argmin_bitstrings: Vec<String>,
    pub argmin_indices: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_spectrum: Option<BTreeMap<String, f64>>,
}

pub fn exact_ground_state(op: &DiagonalOperator, keep_spectrum: bool) -> Result<ExactSolution> {
    let n = op.num_qubits();
    if n > EXACT_LIMIT {
        return Err(Error::Capacity {
            what: "enumerated qubits",
            requested: n,
            limit: EXACT_LIMIT,
        });
    }
    let energies = op.energies()?;
    Ok(solution_from(n, &energies, keep_spectrum))
}

fn solution_from(n: usize, energies: &[f64], keep_spectrum: bool) -> ExactSolution {
    let min_energy = energies
        .par_iter()
        .cloned()
        .reduce(|| f64::INFINITY, f64::min);
    let argmin_indices: Vec<u64> = (0..energies.len() as u64)
        .into_par_iter()
        .filter(|&i| energies[i as usize] - min_energy <= DEGENERACY_TOLERANCE)
        .collect();
    ExactSolution {
        num_qubits: n,
        min_energy,
        argmin_bitstrings: argmin_indices
            .iter()
            .map(|&i| index_to_string(n, i))
            .collect(),
        argmin_indices,
        full_spectrum: keep_spectrum.then(|| {
            energies
                .iter()
                .enumerate()
                .map(|(i, &e)| (index_to_string(n, i as u64), e))
                .collect()
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub reported_energy: f64,
    pub best_objective: f64,
    pub best_bitstring: String,
    pub structure: String,
    pub top_probability: f64,
    pub overlaps: bool,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatabilityReport {
    pub algorithm: String,
    pub trials: usize,
    pub base_seed: u64,
    pub exact_min: f64,
    pub tolerance: f64,
    /// Reported energies rounded to three decimals.
    pub energy_histogram: BTreeMap<String, u64>,
    /// Most frequent sampled structure of each trial, by turn string.
    pub structure_histogram: BTreeMap<String, u64>,
    pub overlap_fraction: f64,
    pub convergence_rate: f64,
    pub top_structure_frequency: f64,
    pub mean_top_probability: f64,
    pub median_reported_energy: f64,
    pub median_best_objective: f64,
    pub variational_violations: usize,
    pub per_trial: Vec<TrialSummary>,
}

fn energy_key(e: f64) -> String {
    let s = format!("{e:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn summarize(result: &FoldingResult, seed: u64, exact_min: f64) -> TrialSummary {
    let shots: u64 = result.final_samples.values().sum();
    TrialSummary {
        seed,
        reported_energy: result.reported_energy,
        best_objective: result.best_objective,
        best_bitstring: result.best_bitstring.clone(),
        structure: result
            .most_frequent_turns
            .clone()
            .unwrap_or_else(|| result.most_frequent.clone()),
        top_probability: result.final_samples[&result.most_frequent] as f64 / shots as f64,
        overlaps: result.most_frequent_overlap.unwrap_or(false),
        converged: (result.reported_energy - exact_min).abs() <= CONVERGENCE_TOLERANCE,
    }
}

/// Runs `trials` seeded copies of `spec`, seeds `base_seed + t`.
pub fn repeat_experiment(
    problem: &FoldingProblem,
    spec: &RunSpec,
    trials: usize,
    base_seed: u64,
) -> Result<RepeatabilityReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if problem.num_qubits() > EXACT_LIMIT {
        return Err(Error::Capacity {
            what: "enumerated qubits",
            requested: problem.num_qubits(),
            limit: EXACT_LIMIT,
        });
    }
    spec.validate(problem.num_qubits())?;
    let exact_min = problem
        .energies()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let per_trial: Vec<TrialSummary> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = base_seed.wrapping_add(t);
            let r = run_algorithm(problem, &spec.clone().with_seed(seed))?;
            Ok(summarize(&r, seed, exact_min))
        })
        .collect::<Result<_>>()?;

    let mut energy_histogram = BTreeMap::new();
    let mut structure_histogram = BTreeMap::new();
    for t in &per_trial {
        *energy_histogram
            .entry(energy_key(t.reported_energy))
            .or_insert(0) += 1;
        *structure_histogram.entry(t.structure.clone()).or_insert(0) += 1;
    }
    let frac = |count: usize| count as f64 / trials as f64;
    let reported: Vec<f64> = per_trial.iter().map(|t| t.reported_energy).collect();
    Ok(RepeatabilityReport {
        algorithm: spec.algorithm.name().into(),
        trials,
        base_seed,
        exact_min,
        tolerance: CONVERGENCE_TOLERANCE,
        overlap_fraction: frac(per_trial.iter().filter(|t| t.overlaps).count()),
        convergence_rate: frac(per_trial.iter().filter(|t| t.converged).count()),
        top_structure_frequency: frac(*structure_histogram.values().max().unwrap() as usize),
        mean_top_probability: per_trial.iter().map(|t| t.top_probability).sum::<f64>()
            / trials as f64,
        median_reported_energy: median(&reported),
        median_best_objective: median(
            &per_trial
                .iter()
                .map(|t| t.best_objective)
                .collect::<Vec<_>>(),
        ),
        variational_violations: reported.iter().filter(|&&e| e < exact_min).count(),
        energy_histogram,
        structure_histogram,
        per_trial,
    })
}

fn centroid(p: &[[f64; 3]]) -> Vector3<f64> {
    p.iter().map(|x| Vector3::from(*x)).sum::<Vector3<f64>>() / p.len() as f64
}

fn check_pair(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Data(format!(
            "structures have {} and {} points",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 3 {
        return Err(Error::Data(format!(
            "RMSD needs at least 3 points, got {}",
            a.len()
        )));
    }
    Ok(())
}

/// RMSD between corresponding points with no alignment.
pub fn plain_rmsd(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<f64> {
    check_pair(a, b)?;
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| (Vector3::from(*p) - Vector3::from(*q)).norm_squared())
        .sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// RMSD after the optimal proper rigid superposition of `b` onto `a`.
pub fn kabsch_rmsd(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<f64> {
    check_pair(a, b)?;
    let (ca, cb) = (centroid(a), centroid(b));
    let pa: Vec<Vector3<f64>> = a.iter().map(|x| Vector3::from(*x) - ca).collect();
    let pb: Vec<Vector3<f64>> = b.iter().map(|x| Vector3::from(*x) - cb).collect();
    let h: Matrix3<f64> = pb.iter().zip(&pa).map(|(q, p)| q * p.transpose()).sum();
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (v_t.transpose() * u.transpose()).determinant().signum();
    let r = v_t.transpose() * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let sum: f64 = pa
        .iter()
        .zip(&pb)
        .map(|(p, q)| (r * q - p).norm_squared())
        .sum();
    Ok((sum / a.len() as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyName {
    PenaltyChiral,
    PenaltyBack,
    #[serde(rename = "penalty_1")]
    Penalty1,
}

impl PenaltyName {
    pub fn parse(s: &str) -> Result<PenaltyName> {
        match s {
            "penalty_chiral" => Ok(PenaltyName::PenaltyChiral),
            "penalty_back" => Ok(PenaltyName::PenaltyBack),
            "penalty_1" => Ok(PenaltyName::Penalty1),
            _ => Err(Error::InvalidConfig(format!("unknown penalty \"{s}\""))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PenaltyName::PenaltyChiral => "penalty_chiral",
            PenaltyName::PenaltyBack => "penalty_back",
            PenaltyName::Penalty1 => "penalty_1",
        }
    }

    pub fn set(self, penalties: &mut PenaltyConfig, value: f64) {
        match self {
            PenaltyName::PenaltyChiral => penalties.penalty_chiral = value,
            PenaltyName::PenaltyBack => penalties.penalty_back = value,
            PenaltyName::Penalty1 => penalties.penalty_1 = value,
        }
    }
}

pub const DEFAULT_PENALTY_GRID: [f64; 5] = [0.1, 1.0, 10.0, 100.0, 1000.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub metric: String,
    pub values: Vec<f64>,
    pub reports: Vec<RepeatabilityReport>,
}

fn check_grid(grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "sweep grid must be strictly increasing".into(),
        ));
    }
    if positive && grid.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidConfig(
            "sweep grid values must be positive".into(),
        ));
    }
    Ok(())
}

/// Rebuilds the Hamiltonian for each value of one penalty and repeats `spec`.
///
/// The metric is the mean probability of the most frequent sampled structure.
#[allow(clippy::too_many_arguments)]
pub fn penalty_sweep(
    peptide: &Peptide,
    table: &InteractionTable,
    base: &PenaltyConfig,
    parameter: PenaltyName,
    grid: &[f64],
    spec: &RunSpec,
    trials: usize,
    base_seed: u64,
) -> Result<SweepResult> {
    check_grid(grid, true)?;
    let reports = grid
        .par_iter()
        .map(|&g| {
            let mut penalties = *base;
            parameter.set(&mut penalties, g);
            let problem = FoldingProblem::new(peptide, &penalties, table)?;
            repeat_experiment(&problem, spec, trials, base_seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter: parameter.name().into(),
        grid: grid.to_vec(),
        metric: "mean_top_probability".into(),
        values: reports.iter().map(|r| r.mean_top_probability).collect(),
        reports,
    })
}

/// Repeats a QAOA-family `spec` at each depth; the metric is the median reported energy.
pub fn depth_sweep(
    problem: &FoldingProblem,
    depths: &[usize],
    spec: &RunSpec,
    trials: usize,
    base_seed: u64,
) -> Result<SweepResult> {
    if !spec.algorithm.uses_qaoa() {
        return Err(Error::InvalidConfig(
            "depth sweep needs a QAOA algorithm".into(),
        ));
    }
    let grid: Vec<f64> = depths.iter().map(|&p| p as f64).collect();
    check_grid(&grid, true)?;
    let reports = depths
        .par_iter()
        .map(|&p| {
            let mut s = spec.clone();
            s.p = p;
            repeat_experiment(problem, &s, trials, base_seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter: "p".into(),
        grid,
        metric: "median_reported_energy".into(),
        values: reports.iter().map(|r| r.median_reported_energy).collect(),
        reports,
    })
}
