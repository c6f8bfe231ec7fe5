mod common;

use common::dense::dense_qaoa;
use latfold::hamiltonian::{DiagonalOperator, ZMask};
use latfold::simulator::{
    build_qaoa_circuit, build_real_amplitudes, run_circuit, sample, Entanglement, ReadoutNoise,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn qaoa_matches_matrix_exponential() {
    let op = DiagonalOperator::new(
        3,
        vec![
            (ZMask::identity(), 0.3),
            (ZMask::single(0), 0.7),
            (ZMask::from_qubits(&[0, 1]), -1.1),
            (ZMask::from_qubits(&[1, 2]), 0.45),
            (ZMask::from_qubits(&[0, 1, 2]), 0.2),
        ],
    )
    .unwrap();
    let circuit = build_qaoa_circuit(&op, 1).unwrap();
    for (gamma, beta) in [(0.4, 0.9), (-1.3, 0.2), (2.1, -0.7)] {
        let sim = run_circuit(&circuit, &[gamma, beta]).unwrap();
        let reference = dense_qaoa(&op, gamma, beta);
        for (a, b) in sim.amplitudes().iter().zip(&reference) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn norm_is_kept_on_seventeen_qubits() {
    let circuit = build_real_amplitudes(17, 1, Entanglement::Full);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let params: Vec<f64> = (0..circuit.num_params())
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    let state = run_circuit(&circuit, &params).unwrap();
    assert!((state.norm_sqr() - 1.0).abs() <= 1e-10);
    let op = DiagonalOperator::new(
        17,
        (0..17).map(|q| (ZMask::from_qubits(&[q, (q + 5) % 17]), 0.1 * q as f64)),
    )
    .unwrap();
    let qaoa = build_qaoa_circuit(&op, 2).unwrap();
    let state = run_circuit(&qaoa, &[0.3, -0.8, 1.1, 0.4]).unwrap();
    assert!((state.norm_sqr() - 1.0).abs() <= 1e-10);
}

#[test]
fn seeded_sampling_is_reproducible() {
    let circuit = build_real_amplitudes(6, 1, Entanglement::Full);
    let state = run_circuit(
        &circuit,
        &[
            0.2, 1.0, -0.4, 2.5, 0.1, -1.7, 0.9, 0.3, -2.2, 1.4, 0.0, 0.6,
        ],
    )
    .unwrap();
    let noise = ReadoutNoise::symmetric(6, 0.05);
    let a = sample(&state, 8192, Some(&noise), 99).unwrap();
    let b = sample(&state, 8192, Some(&noise), 99).unwrap();
    assert_eq!(a, b);
    let other = sample(&state, 8192, Some(&noise), 100).unwrap();
    assert_ne!(a, other);
}
