mod common;

use std::collections::BTreeSet;

use latfold::analysis::{exact_ground_state, kabsch_rmsd, plain_rmsd};
use latfold::hamiltonian::{compress, DiagonalOperator, InteractionTable, PenaltyConfig, ZMask};
use latfold::lattice::{cartesian, read_structure};
use latfold::mitigation::{
    build_calibration, mitigate, tv_distance, CalibrationMode, QuasiDistribution,
};
use latfold::simulator::{build_real_amplitudes, run_circuit, sample, Entanglement, ReadoutNoise};
use latfold::solver::{run_algorithm, Algorithm, FoldingProblem, RunSpec};
use proptest::prelude::*;

fn argmin_labels(penalties: &PenaltyConfig) -> BTreeSet<String> {
    let problem = FoldingProblem::new(
        &common::peptide("ypyfip"),
        penalties,
        &InteractionTable::bundled(),
    )
    .unwrap();
    let exact = exact_ground_state(&problem.operator, false).unwrap();
    exact
        .argmin_indices
        .iter()
        .map(|&i| problem.turns(i).unwrap().unwrap().label())
        .collect()
}

#[test]
fn doubled_penalties_keep_the_argmin_structures() {
    let base = PenaltyConfig::default();
    let doubled = PenaltyConfig {
        penalty_chiral: 2.0 * base.penalty_chiral,
        penalty_back: 2.0 * base.penalty_back,
        penalty_1: 2.0 * base.penalty_1,
    };
    let a = argmin_labels(&base);
    assert!(!a.is_empty());
    assert_eq!(a, argmin_labels(&doubled));
}

#[test]
fn ground_state_structure_is_self_avoiding() {
    let problem = common::problem("ypyfip");
    let exact = exact_ground_state(&problem.operator, true).unwrap();
    assert_eq!(exact.full_spectrum.as_ref().unwrap().len(), 64);
    for &i in &exact.argmin_indices {
        let (_, overlap) = problem.decode(i).unwrap().unwrap();
        assert!(overlap.is_self_avoiding());
    }
}

#[test]
fn cvar_vqe_folds_the_plain_instance() {
    let problem = common::problem("ypyfip");
    for seed in 0..3 {
        let r = run_algorithm(&problem, &RunSpec::new(Algorithm::CvarVqe).with_seed(seed)).unwrap();
        assert!(
            (r.reported_energy + 1.019).abs() < 0.01,
            "seed {seed}: {}",
            r.reported_energy
        );
        let decoded = r.decoded.as_ref().unwrap();
        let index = u64::from_str_radix(&r.best_bitstring, 2).unwrap();
        assert_eq!(decoded, &problem.decode(index).unwrap().unwrap().0);
        assert_eq!(r.turns.as_deref(), Some(decoded.turns.label().as_str()));
    }
}

#[test]
fn side_chain_instance_runs() {
    let problem = common::problem("ypyfip_ipfy");
    assert_eq!(problem.num_qubits(), 17);
    let mut spec = RunSpec::new(Algorithm::CvarQaoa).with_seed(1);
    spec.iterations = 5;
    spec.shots = 1024;
    let r = run_algorithm(&problem, &spec).unwrap();
    let min = problem
        .energies()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    assert!(r.reported_energy >= min);
    assert_eq!(r.decoded.unwrap().side_coords.iter().flatten().count(), 4);
}

#[test]
fn bundled_fixtures_rmsd() {
    let a = read_structure(&common::data("fixtures/top_qaoa_130.xyz")).unwrap();
    let b = read_structure(&common::data("fixtures/top_vqe_310.xyz")).unwrap();
    let r = kabsch_rmsd(&a, &b).unwrap();
    assert!((r - 0.6357).abs() < 1e-3, "{r}");
    assert!(r <= plain_rmsd(&a, &b).unwrap());
    assert!(kabsch_rmsd(&a, &a).unwrap() < 1e-9);
}

#[test]
fn fixtures_match_decoded_structures() {
    let problem = common::problem("ypyfip");
    let fixture = read_structure(&common::data("fixtures/top_qaoa_130.xyz")).unwrap();
    let found = (0..64u64)
        .filter_map(|i| problem.decode(i).unwrap().ok())
        .find(|(c, _)| c.turns.label() == "130")
        .unwrap();
    let coords = cartesian(&found.0, 1.0);
    for (p, q) in coords.iter().zip(&fixture) {
        for k in 0..3 {
            assert!((p[k] - q[k]).abs() < 1e-5);
        }
    }
}

#[test]
fn mitigation_improves_total_variation() {
    let circuit = build_real_amplitudes(6, 1, Entanglement::Full);
    let params: Vec<f64> = (0..12).map(|k| 0.37 * k as f64 - 1.5).collect();
    let state = run_circuit(&circuit, &params).unwrap();
    let truth = state.probabilities();
    let noise = ReadoutNoise::symmetric(6, 0.05);
    let mut better = 0;
    for seed in 0..40u64 {
        let cal = build_calibration(6, &noise, 4096, CalibrationMode::Full, 1000 + seed).unwrap();
        let raw = sample(&state, 8192, Some(&noise), seed).unwrap();
        let fixed = mitigate(&raw, &cal).unwrap();
        if tv_distance(&fixed.dense(), &truth) <= tv_distance(&raw.dense(), &truth) {
            better += 1;
        }
        assert!((fixed.total() - 1.0).abs() < 1e-9);
    }
    assert!(better >= 38, "{better}/40");
}

#[test]
fn tensored_mitigation_on_seventeen_qubits() {
    let circuit = build_real_amplitudes(17, 1, Entanglement::Linear);
    let state = run_circuit(&circuit, &vec![0.1; 34]).unwrap();
    let noise = ReadoutNoise::symmetric(17, 0.02);
    let cal = build_calibration(17, &noise, 4096, CalibrationMode::Tensored, 3).unwrap();
    let raw = sample(&state, 4096, Some(&noise), 4).unwrap();
    let fixed = mitigate(&raw, &cal).unwrap();
    assert!((fixed.total() - 1.0).abs() < 1e-9);
    let truth = state.probabilities();
    assert!(
        tv_distance(&fixed.dense(), &truth)
            < tv_distance(&QuasiDistribution::from_samples(&raw).dense(), &truth)
    );
}

fn sparse_operator() -> impl Strategy<Value = DiagonalOperator> {
    let qubits = proptest::sample::subsequence((0..20usize).collect::<Vec<_>>(), 1..8);
    (
        qubits,
        proptest::collection::vec((any::<u8>(), -2.0f64..2.0), 1..10),
    )
        .prop_map(|(qs, raw)| {
            let terms = raw.into_iter().map(|(pick, c)| {
                let chosen: Vec<usize> = qs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| pick >> (k % 8) & 1 == 1)
                    .map(|(_, &q)| q)
                    .collect();
                (ZMask::from_qubits(&chosen), c)
            });
            DiagonalOperator::new(20, terms).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn compression_preserves_the_minimum(op in sparse_operator()) {
        let (small, map) = compress(&op);
        let full = exact_ground_state(&op, false).unwrap();
        let reduced = exact_ground_state(&small, false).unwrap();
        prop_assert_eq!(full.min_energy, reduced.min_energy);
        prop_assert_eq!(map.original_width, 20);
        prop_assert!(small.num_qubits() <= 8);
    }
}
