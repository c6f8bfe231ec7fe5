//! Statevector simulation, ansatz construction and measurement sampling.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{index_to_string, DiagonalOperator};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The all-zero basis state.
    pub fn zero(n: usize) -> Result<Statevector> {
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "statevector qubits",
                requested: n,
                limit: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    pub fn basis(n: usize, index: u64) -> Result<Statevector> {
        let mut s = Statevector::zero(n)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for block in self.amps.chunks_mut(bit << 1) {
            let (lo, hi) = block.split_at_mut(bit);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    pub fn ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
        self.apply_1q(q, [[c, -s], [s, c]]);
    }

    pub fn rx(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let (c, ms) = (Complex64::new(c, 0.0), Complex64::new(0.0, -s));
        self.apply_1q(q, [[c, ms], [ms, c]]);
    }

    pub fn h(&mut self, q: usize) {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [[r, r], [r, -r]]);
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Multiplies amplitude i by exp(-i·gamma·energies[i]).
    pub fn phase(&mut self, energies: &[f64], gamma: f64) {
        for (a, &e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
    }
}

/// A rotation angle, fixed or read from the parameter vector and scaled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn param(index: usize) -> Angle {
        Angle::Param { index, scale: 1.0 }
    }

    fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(v) => v,
            Angle::Param { index, scale } => scale * params[index],
        }
    }

    fn slot(&self) -> Option<usize> {
        match *self {
            Angle::Fixed(_) => None,
            Angle::Param { index, .. } => Some(index),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Gate {
    Ry(usize, Angle),
    Rx(usize, Angle),
    H(usize),
    Cx(usize, usize),
    /// exp(-i·angle·E) with E the tabulated diagonal of an operator.
    DiagonalPhase {
        energies: Arc<Vec<f64>>,
        angle: Angle,
    },
}

#[derive(Clone, Debug)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<Gate>,
    num_params: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            ops: Vec::new(),
            num_params: 0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn cx_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, Gate::Cx(..)))
            .count()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let check = |q: usize| {
            if q < self.num_qubits {
                Ok(())
            } else {
                Err(Error::RegisterWidth {
                    expected: self.num_qubits,
                    actual: q + 1,
                })
            }
        };
        let slot = match &gate {
            Gate::Ry(q, a) | Gate::Rx(q, a) => {
                check(*q)?;
                a.slot()
            }
            Gate::H(q) => {
                check(*q)?;
                None
            }
            Gate::Cx(c, t) => {
                check(*c)?;
                check(*t)?;
                None
            }
            Gate::DiagonalPhase { energies, angle } => {
                if energies.len() != 1 << self.num_qubits {
                    return Err(Error::RegisterWidth {
                        expected: self.num_qubits,
                        actual: energies.len().trailing_zeros() as usize,
                    });
                }
                angle.slot()
            }
        };
        if let Some(s) = slot {
            self.num_params = self.num_params.max(s + 1);
        }
        self.ops.push(gate);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    #[default]
    Full,
    Linear,
}

/// RY layers separated by CX blocks. Parameter `layer * n + q` drives qubit q.
pub fn build_real_amplitudes(n: usize, reps: usize, entanglement: Entanglement) -> Circuit {
    let mut c = Circuit::new(n);
    let layer = |c: &mut Circuit, r: usize| {
        for q in 0..n {
            c.push(Gate::Ry(q, Angle::param(r * n + q)))
                .expect("qubit in range");
        }
    };
    layer(&mut c, 0);
    for r in 1..=reps {
        let pairs: Vec<(usize, usize)> = match entanglement {
            Entanglement::Full => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            Entanglement::Linear => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        };
        for (i, j) in pairs {
            c.push(Gate::Cx(i, j)).expect("qubit in range");
        }
        layer(&mut c, r);
    }
    c
}

/// Hadamards, then p rounds of cost phase and RX mixer.
/// Parameters are `[gamma_1..gamma_p, beta_1..beta_p]`.
pub fn build_qaoa_circuit(cost: &DiagonalOperator, p: usize) -> Result<Circuit> {
    if p == 0 {
        return Err(Error::InvalidConfig(
            "QAOA depth p must be at least 1".into(),
        ));
    }
    let n = cost.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "statevector qubits",
            requested: n,
            limit: MAX_QUBITS,
        });
    }
    let energies = Arc::new(cost.energies()?);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::H(q))?;
    }
    for k in 0..p {
        c.push(Gate::DiagonalPhase {
            energies: energies.clone(),
            angle: Angle::param(k),
        })?;
        for q in 0..n {
            c.push(Gate::Rx(
                q,
                Angle::Param {
                    index: p + k,
                    scale: 2.0,
                },
            ))?;
        }
    }
    Ok(c)
}

pub fn run_circuit(circuit: &Circuit, params: &[f64]) -> Result<Statevector> {
    if params.len() != circuit.num_params {
        return Err(Error::ParameterCount {
            expected: circuit.num_params,
            actual: params.len(),
        });
    }
    let mut s = Statevector::zero(circuit.num_qubits)?;
    for g in &circuit.ops {
        match g {
            Gate::Ry(q, a) => s.ry(*q, a.resolve(params)),
            Gate::Rx(q, a) => s.rx(*q, a.resolve(params)),
            Gate::H(q) => s.h(*q),
            Gate::Cx(c, t) => s.cx(*c, *t),
            Gate::DiagonalPhase { energies, angle } => s.phase(energies, angle.resolve(params)),
        }
    }
    Ok(s)
}

/// Shot histogram keyed by basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    pub num_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub shots: u64,
}

impl SampleSet {
    pub fn new(num_qubits: usize, counts: BTreeMap<u64, u64>) -> SampleSet {
        let shots = counts.values().sum();
        SampleSet {
            num_qubits,
            counts,
            shots,
        }
    }

    pub fn most_frequent(&self) -> Option<u64> {
        let mut best: Option<(u64, u64)> = None;
        for (&k, &c) in &self.counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((k, c));
            }
        }
        best.map(|b| b.0)
    }

    pub fn to_string_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&k, &c)| (index_to_string(self.num_qubits, k), c))
            .collect()
    }

    /// Empirical probabilities as a dense vector over all 2^n outcomes.
    pub fn dense(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.num_qubits];
        for (&k, &c) in &self.counts {
            p[k as usize] = c as f64 / self.shots as f64;
        }
        p
    }
}

/// Independent per-qubit bit flips at readout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNoise {
    /// (P(read 1 | 0), P(read 0 | 1)) per qubit.
    pub per_qubit: Vec<(f64, f64)>,
}

impl ReadoutNoise {
    pub fn uniform(n: usize, p01: f64, p10: f64) -> ReadoutNoise {
        ReadoutNoise {
            per_qubit: vec![(p01, p10); n],
        }
    }

    pub fn symmetric(n: usize, p: f64) -> ReadoutNoise {
        ReadoutNoise::uniform(n, p, p)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.per_qubit.len() != n {
            return Err(Error::InvalidConfig(format!(
                "noise model covers {} qubits, register has {n}",
                self.per_qubit.len()
            )));
        }
        for &(a, b) in &self.per_qubit {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidConfig(format!(
                    "flip probabilities must lie in [0, 1], got ({a}, {b})"
                )));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.per_qubit.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    /// Pushes one measured outcome through the channel.
    pub fn corrupt(&self, outcome: u64, rng: &mut impl Rng) -> u64 {
        let mut out = outcome;
        for (q, &(p01, p10)) in self.per_qubit.iter().enumerate() {
            let p = if outcome >> q & 1 == 0 { p01 } else { p10 };
            if p > 0.0 && rng.random::<f64>() < p {
                out ^= 1 << q;
            }
        }
        out
    }
}

/// Draws `shots` outcomes from a probability vector over 2^n basis states.
pub fn sample_probabilities(
    probs: &[f64],
    n: usize,
    shots: u64,
    noise: Option<&ReadoutNoise>,
    rng: &mut ChaCha8Rng,
) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    if let Some(noise) = noise {
        noise.validate(n)?;
    }
    let dist = WeightedIndex::new(probs)
        .map_err(|e| Error::Data(format!("bad probability vector: {e}")))?;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut k = dist.sample(rng) as u64;
        if let Some(noise) = noise {
            k = noise.corrupt(k, rng);
        }
        *counts.entry(k).or_insert(0) += 1;
    }
    Ok(SampleSet {
        num_qubits: n,
        counts,
        shots,
    })
}

pub fn sample(
    state: &Statevector,
    shots: u64,
    noise: Option<&ReadoutNoise>,
    seed: u64,
) -> Result<SampleSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_probabilities(&state.probabilities(), state.n, shots, noise, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ZMask;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn real_amplitudes_shape() {
        let c = build_real_amplitudes(6, 1, Entanglement::Full);
        assert_eq!(c.num_params(), 12);
        assert_eq!(c.cx_count(), 15);
        let c = build_real_amplitudes(2, 0, Entanglement::Full);
        assert_eq!((c.num_params(), c.cx_count()), (2, 0));
        let c = build_real_amplitudes(5, 2, Entanglement::Linear);
        assert_eq!((c.num_params(), c.cx_count()), (15, 8));
        let s = run_circuit(&build_real_amplitudes(4, 1, Entanglement::Full), &[0.0; 8]).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn elementary_gates() {
        let s = run_circuit(&Circuit::new(3), &[]).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        let mut c = Circuit::new(1);
        c.push(Gate::Ry(0, Angle::Fixed(PI))).unwrap();
        let s = run_circuit(&c, &[]).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0), 1e-12));
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Ry(1, Angle::Fixed(0.3))).unwrap();
        let once = run_circuit(&c, &[]).unwrap();
        c.push(Gate::Cx(0, 1)).unwrap();
        c.push(Gate::Cx(0, 1)).unwrap();
        let twice = run_circuit(&c, &[]).unwrap();
        for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
            assert!(close(*a, *b, 1e-15));
        }
        assert!(Circuit::new(2).push(Gate::Cx(0, 2)).is_err());
        assert!(matches!(
            run_circuit(&build_real_amplitudes(2, 1, Entanglement::Full), &[0.0; 3]),
            Err(Error::ParameterCount {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn qaoa_shape_and_identity_evolution() {
        let op = DiagonalOperator::new(
            6,
            [(ZMask::from_qubits(&[0, 3]), 1.5), (ZMask::single(5), -0.5)],
        )
        .unwrap();
        let c = build_qaoa_circuit(&op, 2).unwrap();
        assert_eq!(c.num_params(), 4);
        let s = run_circuit(&c, &[0.0; 4]).unwrap();
        for a in s.amplitudes() {
            assert!(close(*a, Complex64::new(0.125, 0.0), 1e-12));
        }
        let id = DiagonalOperator::new(3, [(ZMask::identity(), 2.0)]).unwrap();
        let c = build_qaoa_circuit(&id, 1).unwrap();
        let s = run_circuit(&c, &[0.7, 0.4]).unwrap();
        let free = run_circuit(&c, &[0.0, 0.4]).unwrap();
        for (a, b) in s.probabilities().iter().zip(free.probabilities()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(build_qaoa_circuit(&id, 0).is_err());
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(Statevector::zero(27), Err(Error::Capacity { .. })));
    }

    #[test]
    fn deterministic_outcomes() {
        let s = Statevector::basis(3, 0b101).unwrap();
        let set = sample(&s, 1000, None, 1).unwrap();
        assert_eq!(
            set.to_string_map(),
            BTreeMap::from([("101".to_string(), 1000)])
        );
        let s = Statevector::zero(1).unwrap();
        let set = sample(&s, 500, Some(&ReadoutNoise::uniform(1, 1.0, 0.0)), 2).unwrap();
        assert_eq!(set.counts, BTreeMap::from([(1, 500)]));
    }

    #[test]
    fn uniform_sampling_within_five_sigma() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::H(1)).unwrap();
        let s = run_circuit(&c, &[]).unwrap();
        let set = sample(&s, 8192, None, 11).unwrap();
        let sigma = (8192.0f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            let n = *set.counts.get(&k).unwrap_or(&0) as f64;
            assert!((n - 2048.0).abs() < 5.0 * sigma);
        }
        assert_eq!(set, sample(&s, 8192, None, 11).unwrap());
    }

    proptest! {
        #[test]
        fn real_amplitudes_stay_real(params in proptest::collection::vec(0.0..PI, 10)) {
            let s = run_circuit(&build_real_amplitudes(5, 1, Entanglement::Full), &params).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!(s.amplitudes().iter().all(|a| a.im == 0.0));
        }

        #[test]
        fn phase_keeps_distribution(gamma in -5.0..5.0f64, coeffs in proptest::collection::vec(-3.0..3.0f64, 8)) {
            let op = DiagonalOperator::new(3, coeffs.iter().enumerate().map(|(m, &c)| (ZMask::from_u64(m as u64), c))).unwrap();
            let base = run_circuit(&build_real_amplitudes(3, 1, Entanglement::Full), &[0.3, 1.1, -0.4, 2.0, 0.9, -1.3]).unwrap();
            let mut phased = base.clone();
            phased.phase(&op.energies().unwrap(), gamma);
            for (a, b) in base.probabilities().iter().zip(phased.probabilities()) {
                prop_assert!((a - b).abs() < 1e-14);
            }
        }
    }
}
