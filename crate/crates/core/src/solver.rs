//! Sampled objectives, the COBYLA driver and the four folding algorithms.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_hamiltonian, compress, index_to_string, Bits, DiagonalOperator, InteractionTable,
    PenaltyConfig, QubitMap,
};
use crate::lattice::{
    decode_turns, detect_overlap, turns_to_coordinates, Conformation, OverlapReport, Peptide,
    TurnSequence,
};
use crate::mitigation::{mitigate, CalibrationMatrix, QuasiDistribution};
use crate::simulator::{
    build_qaoa_circuit, build_real_amplitudes, run_circuit, sample_probabilities, Circuit,
    Entanglement, ReadoutNoise, SampleSet, MAX_QUBITS,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Expectation,
    Cvar { alpha: f64 },
}

impl ObjectiveSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ObjectiveSpec::Cvar { alpha } if !(alpha > 0.0 && alpha <= 1.0) => Err(
                Error::InvalidConfig(format!("alpha must lie in (0, 1], got {alpha}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Measurement outcomes with weights in units of shots.
pub trait Outcomes {
    fn num_qubits(&self) -> usize;
    fn shots(&self) -> u64;
    fn weighted(&self) -> Vec<(u64, f64)>;
}

impl Outcomes for SampleSet {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn shots(&self) -> u64 {
        self.shots
    }

    fn weighted(&self) -> Vec<(u64, f64)> {
        self.counts.iter().map(|(&k, &c)| (k, c as f64)).collect()
    }
}

impl Outcomes for QuasiDistribution {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn shots(&self) -> u64 {
        self.shots
    }

    fn weighted(&self) -> Vec<(u64, f64)> {
        let s = self.shots as f64;
        self.weights.iter().map(|(&k, &w)| (k, w * s)).collect()
    }
}

/// Number of shots averaged by the CVaR tail.
pub fn tail_size(alpha: f64, shots: u64) -> u64 {
    ((alpha * shots as f64 - 1e-9).ceil() as u64).clamp(1, shots)
}

/// Mean energy of the lowest `k` shot units.
fn tail_mean(mut entries: Vec<(f64, f64)>, k: f64) -> f64 {
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut grouped: Vec<(f64, f64)> = Vec::with_capacity(entries.len());
    for (e, w) in entries {
        match grouped.last_mut() {
            Some(last) if last.0 == e => last.1 += w,
            _ => grouped.push((e, w)),
        }
    }
    let mut taken = 0.0;
    let mut sum = 0.0;
    for (e, w) in grouped {
        if taken >= k {
            break;
        }
        let take = w.min(k - taken);
        sum += take / k * e;
        taken += take;
    }
    sum
}

fn check_width(outcomes: &impl Outcomes, op: &DiagonalOperator) -> Result<()> {
    if outcomes.num_qubits() != op.num_qubits() {
        return Err(Error::RegisterWidth {
            expected: op.num_qubits(),
            actual: outcomes.num_qubits(),
        });
    }
    if outcomes.shots() == 0 {
        return Err(Error::EmptySamples);
    }
    Ok(())
}

fn objective_with(
    spec: ObjectiveSpec,
    outcomes: &impl Outcomes,
    energy: impl Fn(u64) -> f64,
) -> f64 {
    let shots = outcomes.shots();
    let k = match spec {
        ObjectiveSpec::Expectation => shots,
        ObjectiveSpec::Cvar { alpha } => tail_size(alpha, shots),
    };
    let entries = outcomes
        .weighted()
        .into_iter()
        .map(|(b, w)| (energy(b), w))
        .collect();
    tail_mean(entries, k as f64)
}

pub fn expectation_from_samples(samples: &impl Outcomes, op: &DiagonalOperator) -> Result<f64> {
    check_width(samples, op)?;
    Ok(objective_with(ObjectiveSpec::Expectation, samples, |b| {
        op.evaluate_index(b)
    }))
}

/// Mean of the lowest ⌈alpha·shots⌉ per-shot energies.
pub fn cvar_from_samples(
    samples: &impl Outcomes,
    op: &DiagonalOperator,
    alpha: f64,
) -> Result<f64> {
    let spec = ObjectiveSpec::Cvar { alpha };
    spec.validate()?;
    check_width(samples, op)?;
    Ok(objective_with(spec, samples, |b| op.evaluate_index(b)))
}

pub fn objective_from_samples(
    spec: ObjectiveSpec,
    samples: &impl Outcomes,
    op: &DiagonalOperator,
) -> Result<f64> {
    spec.validate()?;
    check_width(samples, op)?;
    Ok(objective_with(spec, samples, |b| op.evaluate_index(b)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub iterations: Vec<Evaluation>,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
}

/// Runs COBYLA for at most `max_iterations` objective evaluations.
///
/// The objective also receives a per-evaluation seed drawn from `seed`.
pub fn minimize(
    mut objective: impl FnMut(&[f64], u64) -> f64,
    initial: &[f64],
    max_iterations: usize,
    seed: u64,
) -> Result<OptimizationTrace> {
    if max_iterations == 0 {
        return Err(Error::InvalidConfig(
            "max_iterations must be at least 1".into(),
        ));
    }
    if initial.is_empty() {
        return Err(Error::InvalidConfig(
            "optimizer needs at least one parameter".into(),
        ));
    }
    struct State<'f> {
        rng: ChaCha8Rng,
        trace: Vec<Evaluation>,
        failure: Option<Evaluation>,
        objective: &'f mut dyn FnMut(&[f64], u64) -> f64,
    }
    let state = RefCell::new(State {
        rng: ChaCha8Rng::seed_from_u64(seed),
        trace: Vec::new(),
        failure: None,
        objective: &mut objective,
    });
    let f = |x: &[f64], _: &mut ()| -> f64 {
        let mut s = state.borrow_mut();
        if s.failure.is_some() || s.trace.len() >= max_iterations {
            return f64::MAX;
        }
        let eval_seed = s.rng.random::<u64>();
        let value = (s.objective)(x, eval_seed);
        if !value.is_finite() {
            s.failure = Some(Evaluation {
                params: x.to_vec(),
                value,
            });
            return f64::MAX;
        }
        s.trace.push(Evaluation {
            params: x.to_vec(),
            value,
        });
        value
    };
    let bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); initial.len()];
    let cons: Vec<&dyn cobyla::Func<()>> = vec![];
    let _ = cobyla::minimize(
        f,
        initial,
        &bounds,
        &cons,
        (),
        max_iterations,
        cobyla::RhoBeg::All(1.0),
        None,
    );
    let s = state.into_inner();
    if let Some(bad) = s.failure {
        return Err(Error::NonFiniteObjective {
            params: bad.params,
            value: bad.value,
        });
    }
    let best = s
        .trace
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .cloned()
        .ok_or_else(|| Error::InvalidConfig("optimizer made no evaluations".into()))?;
    Ok(OptimizationTrace {
        evaluations: s.trace.len(),
        best_params: best.params,
        best_value: best.value,
        iterations: s.trace,
    })
}

/// A compressed folding Hamiltonian with what is needed to decode its states.
#[derive(Clone, Debug)]
pub struct FoldingProblem {
    pub peptide: Option<Peptide>,
    pub operator: DiagonalOperator,
    pub map: QubitMap,
    energies: Arc<Vec<f64>>,
}

impl FoldingProblem {
    pub fn new(
        peptide: &Peptide,
        penalties: &PenaltyConfig,
        table: &InteractionTable,
    ) -> Result<FoldingProblem> {
        let full = build_hamiltonian(peptide, penalties, table)?;
        let (operator, map) = compress(&full);
        FoldingProblem::assemble(Some(peptide.clone()), operator, map)
    }

    /// Wraps an operator with no lattice interpretation.
    pub fn synthetic(operator: DiagonalOperator) -> Result<FoldingProblem> {
        let map = QubitMap::identity(operator.num_qubits());
        FoldingProblem::assemble(None, operator, map)
    }

    fn assemble(
        peptide: Option<Peptide>,
        operator: DiagonalOperator,
        map: QubitMap,
    ) -> Result<FoldingProblem> {
        if operator.num_qubits() > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "simulated qubits",
                requested: operator.num_qubits(),
                limit: MAX_QUBITS,
            });
        }
        let energies = Arc::new(operator.energies()?);
        Ok(FoldingProblem {
            peptide,
            operator,
            map,
            energies,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.operator.num_qubits()
    }

    /// Energy of every basis state of the compressed register.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn turns(&self, index: u64) -> Option<Result<TurnSequence>> {
        let peptide = self.peptide.as_ref()?;
        Some((|| {
            let full = self.map.lift(&Bits::from_index(self.num_qubits(), index))?;
            decode_turns(&crate::hamiltonian::config_bits(&full, peptide)?, peptide)
        })())
    }

    /// Structure and overlap report of a compressed basis state.
    pub fn decode(&self, index: u64) -> Option<Result<(Conformation, OverlapReport)>> {
        let peptide = self.peptide.as_ref()?;
        Some(self.turns(index)?.map(|t| {
            let conf = turns_to_coordinates(&t, peptide);
            let overlap = detect_overlap(&conf);
            (conf, overlap)
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Vqe,
    Qaoa,
    CvarVqe,
    CvarQaoa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Vqe,
        Algorithm::Qaoa,
        Algorithm::CvarVqe,
        Algorithm::CvarQaoa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Vqe => "vqe",
            Algorithm::Qaoa => "qaoa",
            Algorithm::CvarVqe => "cvar_vqe",
            Algorithm::CvarQaoa => "cvar_qaoa",
        }
    }

    pub fn parse(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm \"{s}\"")))
    }

    pub fn uses_qaoa(self) -> bool {
        matches!(self, Algorithm::Qaoa | Algorithm::CvarQaoa)
    }

    pub fn default_objective(self) -> ObjectiveSpec {
        match self {
            Algorithm::Vqe | Algorithm::Qaoa => ObjectiveSpec::Expectation,
            Algorithm::CvarVqe | Algorithm::CvarQaoa => ObjectiveSpec::Cvar { alpha: 0.01 },
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub objective: ObjectiveSpec,
    pub reps: usize,
    pub entanglement: Entanglement,
    pub p: usize,
    pub shots: u64,
    pub iterations: usize,
    pub noise: Option<ReadoutNoise>,
    pub calibration: Option<Arc<CalibrationMatrix>>,
    pub seed: u64,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm) -> RunSpec {
        RunSpec {
            algorithm,
            objective: algorithm.default_objective(),
            reps: 1,
            entanglement: Entanglement::Full,
            p: 2,
            shots: 8192,
            iterations: 50,
            noise: None,
            calibration: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> RunSpec {
        self.seed = seed;
        self
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        self.objective.validate()?;
        if self.shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.algorithm.uses_qaoa() && self.p == 0 {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        if let Some(noise) = &self.noise {
            noise.validate(num_qubits)?;
        }
        if let Some(cal) = &self.calibration {
            if cal.num_qubits != num_qubits {
                return Err(Error::RegisterWidth {
                    expected: num_qubits,
                    actual: cal.num_qubits,
                });
            }
        }
        Ok(())
    }

    fn circuit(&self, problem: &FoldingProblem) -> Result<Circuit> {
        if self.algorithm.uses_qaoa() {
            build_qaoa_circuit(&problem.operator, self.p)
        } else {
            Ok(build_real_amplitudes(
                problem.num_qubits(),
                self.reps,
                self.entanglement,
            ))
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldingResult {
    pub algorithm: Algorithm,
    pub num_qubits: usize,
    pub trace: OptimizationTrace,
    /// Energy of `best_bitstring`, the lowest-energy sampled state.
    pub reported_energy: f64,
    /// Best objective value seen during optimization.
    pub best_objective: f64,
    /// Objective at the best parameters, from the final sampling.
    pub final_objective: f64,
    pub final_samples: BTreeMap<String, u64>,
    pub energy_per_bitstring: BTreeMap<String, f64>,
    pub best_bitstring: String,
    pub most_frequent: String,
    pub turns: Option<String>,
    pub most_frequent_turns: Option<String>,
    pub decoded: Option<Conformation>,
    pub overlap: Option<OverlapReport>,
    pub most_frequent_overlap: Option<bool>,
}

/// Optimizes one ansatz on `problem` and decodes the lowest-energy sample.
pub fn run_algorithm(problem: &FoldingProblem, spec: &RunSpec) -> Result<FoldingResult> {
    let n = problem.num_qubits();
    spec.validate(n)?;
    let circuit = spec.circuit(problem)?;
    let energies = problem.energies();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let initial: Vec<f64> = (0..circuit.num_params())
        .map(|_| rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI))
        .collect();
    let optimizer_seed = rng.random::<u64>();
    let final_seed = rng.random::<u64>();

    let measure = |params: &[f64], seed: u64| -> Result<SampleSet> {
        let state = run_circuit(&circuit, params)?;
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        sample_probabilities(
            &state.probabilities(),
            n,
            spec.shots,
            spec.noise.as_ref(),
            &mut r,
        )
    };
    let score = |samples: &SampleSet| -> Result<f64> {
        let energy = |b: u64| energies[b as usize];
        match &spec.calibration {
            Some(cal) => Ok(objective_with(
                spec.objective,
                &mitigate(samples, cal)?,
                energy,
            )),
            None => Ok(objective_with(spec.objective, samples, energy)),
        }
    };

    let mut inner_error: Option<Error> = None;
    let trace = minimize(
        |params, seed| match measure(params, seed).and_then(|s| score(&s)) {
            Ok(v) => v,
            Err(e) => {
                inner_error.get_or_insert(e);
                f64::NAN
            }
        },
        &initial,
        spec.iterations,
        optimizer_seed,
    );
    if let Some(e) = inner_error {
        return Err(e);
    }
    let trace = trace?;

    let samples = measure(&trace.best_params, final_seed)?;
    let final_objective = score(&samples)?;
    let best = *samples
        .counts
        .keys()
        .min_by(|a, b| {
            energies[**a as usize]
                .total_cmp(&energies[**b as usize])
                .then(a.cmp(b))
        })
        .ok_or(Error::EmptySamples)?;
    let top = samples.most_frequent().ok_or(Error::EmptySamples)?;

    let (turns, decoded, overlap) = match problem.decode(best).transpose()? {
        Some((conf, ov)) => (Some(conf.turns.label()), Some(conf), Some(ov)),
        None => (None, None, None),
    };
    let (most_frequent_turns, most_frequent_overlap) = match problem.decode(top).transpose()? {
        Some((conf, ov)) => (Some(conf.turns.label()), Some(!ov.is_self_avoiding())),
        None => (None, None),
    };
    Ok(FoldingResult {
        algorithm: spec.algorithm,
        num_qubits: n,
        reported_energy: energies[best as usize],
        best_objective: trace.best_value,
        trace,
        final_objective,
        energy_per_bitstring: samples
            .counts
            .keys()
            .map(|&b| (index_to_string(n, b), energies[b as usize]))
            .collect(),
        final_samples: samples.to_string_map(),
        best_bitstring: index_to_string(n, best),
        most_frequent: index_to_string(n, top),
        turns,
        most_frequent_turns,
        decoded,
        overlap,
        most_frequent_overlap,
    })
}
