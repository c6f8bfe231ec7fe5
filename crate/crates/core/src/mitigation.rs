//! Readout-error mitigation with calibration matrices.
//!
//! Column `j` of a calibration matrix is the distribution of measured
//! outcomes when basis state `j` is prepared. The tensored mode keeps one
//! 2×2 matrix per qubit and is an extension for registers too wide for the
//! full matrix.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{ReadoutNoise, SampleSet};

/// Widest register accepted by the full calibration mode.
pub const FULL_MODE_LIMIT: usize = 12;
/// Calibrations with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    Full,
    Tensored,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationMatrix {
    pub num_qubits: usize,
    pub mode: CalibrationMode,
    /// Row-major 2^n × 2^n matrix in full mode, empty otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrix: Vec<Vec<f64>>,
    /// `[[P(0|0), P(0|1)], [P(1|0), P(1|1)]]` per qubit in tensored mode.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_qubit: Vec<[[f64; 2]; 2]>,
}

/// Normalized weights over outcomes, possibly produced by mitigation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiDistribution {
    pub num_qubits: usize,
    /// Shot count of the measurement this came from.
    pub shots: u64,
    pub weights: BTreeMap<u64, f64>,
}

impl QuasiDistribution {
    pub fn from_samples(samples: &SampleSet) -> QuasiDistribution {
        let shots = samples.shots as f64;
        QuasiDistribution {
            num_qubits: samples.num_qubits,
            shots: samples.shots,
            weights: samples
                .counts
                .iter()
                .map(|(&k, &c)| (k, c as f64 / shots))
                .collect(),
        }
    }

    pub fn dense(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.num_qubits];
        for (&k, &w) in &self.weights {
            p[k as usize] = w;
        }
        p
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// Total-variation distance between two dense distributions.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions differ in length");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn counts_of(
    prepared: u64,
    shots: u64,
    noise: &ReadoutNoise,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<u64, u64> {
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(noise.corrupt(prepared, rng)).or_insert(0) += 1;
    }
    counts
}

/// Estimates a calibration by sampling prepared basis states through `noise`.
pub fn build_calibration(
    n: usize,
    noise: &ReadoutNoise,
    shots: u64,
    mode: CalibrationMode,
    seed: u64,
) -> Result<CalibrationMatrix> {
    if shots == 0 {
        return Err(Error::InvalidConfig(
            "calibration shots must be at least 1".into(),
        ));
    }
    noise.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = shots as f64;
    match mode {
        CalibrationMode::Full => {
            if n > FULL_MODE_LIMIT {
                return Err(Error::Capacity {
                    what: "full calibration qubits",
                    requested: n,
                    limit: FULL_MODE_LIMIT,
                });
            }
            let dim = 1usize << n;
            let mut matrix = vec![vec![0.0; dim]; dim];
            for j in 0..dim {
                for (i, c) in counts_of(j as u64, shots, noise, &mut rng) {
                    matrix[i as usize][j] = c as f64 / s;
                }
            }
            Ok(CalibrationMatrix {
                num_qubits: n,
                mode,
                matrix,
                per_qubit: Vec::new(),
            })
        }
        CalibrationMode::Tensored => {
            let all_ones = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let zeros = counts_of(0, shots, noise, &mut rng);
            let ones = counts_of(all_ones, shots, noise, &mut rng);
            let per_qubit = (0..n)
                .map(|q| {
                    let flipped = |counts: &BTreeMap<u64, u64>, bit: u64| {
                        counts
                            .iter()
                            .filter(|(&k, _)| (k >> q) & 1 != bit)
                            .map(|(_, &c)| c)
                            .sum::<u64>() as f64
                            / s
                    };
                    let up = flipped(&zeros, 0);
                    let down = flipped(&ones, 1);
                    [[1.0 - up, down], [up, 1.0 - down]]
                })
                .collect();
            Ok(CalibrationMatrix {
                num_qubits: n,
                mode,
                matrix: Vec::new(),
                per_qubit,
            })
        }
    }
}

fn apply_2x2(v: &mut [f64], q: usize, m: &[[f64; 2]; 2]) {
    let bit = 1usize << q;
    for i in 0..v.len() {
        if i & bit == 0 {
            let (a, b) = (v[i], v[i | bit]);
            v[i] = m[0][0] * a + m[0][1] * b;
            v[i | bit] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn transpose(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

fn invert_2x2(m: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    (det != 0.0).then(|| {
        [
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]
    })
}

fn condition_2x2(m: &[[f64; 2]; 2]) -> f64 {
    let sv = DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]).singular_values();
    sv.max() / sv.min()
}

impl CalibrationMatrix {
    pub fn identity(n: usize, mode: CalibrationMode) -> CalibrationMatrix {
        match mode {
            CalibrationMode::Full => {
                let dim = 1usize << n;
                let matrix = (0..dim)
                    .map(|i| (0..dim).map(|j| (i == j) as u8 as f64).collect())
                    .collect();
                CalibrationMatrix {
                    num_qubits: n,
                    mode,
                    matrix,
                    per_qubit: Vec::new(),
                }
            }
            CalibrationMode::Tensored => CalibrationMatrix {
                num_qubits: n,
                mode,
                matrix: Vec::new(),
                per_qubit: vec![[[1.0, 0.0], [0.0, 1.0]]; n],
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let columns: Vec<Vec<f64>> = match self.mode {
            CalibrationMode::Full => {
                let dim = 1usize << self.num_qubits;
                if self.num_qubits > FULL_MODE_LIMIT
                    || self.matrix.len() != dim
                    || self.matrix.iter().any(|r| r.len() != dim)
                {
                    return Err(Error::Schema(format!(
                        "full calibration must be {dim}×{dim}"
                    )));
                }
                (0..dim)
                    .map(|j| self.matrix.iter().map(|r| r[j]).collect())
                    .collect()
            }
            CalibrationMode::Tensored => {
                if self.per_qubit.len() != self.num_qubits {
                    return Err(Error::Schema(format!(
                        "tensored calibration needs {} blocks",
                        self.num_qubits
                    )));
                }
                self.per_qubit
                    .iter()
                    .flat_map(|m| [vec![m[0][0], m[1][0]], vec![m[0][1], m[1][1]]])
                    .collect()
            }
        };
        for col in columns {
            if col.iter().any(|&x| !(0.0..=1.0).contains(&x))
                || (col.iter().sum::<f64>() - 1.0).abs() > 1e-9
            {
                return Err(Error::Data(
                    "calibration columns must be probability vectors".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        match self.mode {
            CalibrationMode::Full => self.matrix.iter().enumerate().all(|(i, r)| {
                r.iter()
                    .enumerate()
                    .all(|(j, &x)| x == (i == j) as u8 as f64)
            }),
            CalibrationMode::Tensored => self
                .per_qubit
                .iter()
                .all(|m| *m == [[1.0, 0.0], [0.0, 1.0]]),
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let dim = self.matrix.len();
        DMatrix::from_fn(dim, dim, |i, j| self.matrix[i][j])
    }

    /// Ratio of extreme singular values; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        match self.mode {
            CalibrationMode::Full => {
                let sv = self.dense().singular_values();
                sv.max() / sv.min()
            }
            CalibrationMode::Tensored => self.per_qubit.iter().map(condition_2x2).product(),
        }
    }

    /// Applies the calibration (or its transpose) to a dense vector.
    fn apply(&self, x: &[f64], transposed: bool) -> Vec<f64> {
        match self.mode {
            CalibrationMode::Full => {
                let a = self.dense();
                let v = DVector::from_column_slice(x);
                let y = if transposed { a.transpose() * v } else { a * v };
                y.as_slice().to_vec()
            }
            CalibrationMode::Tensored => {
                let mut y = x.to_vec();
                for (q, m) in self.per_qubit.iter().enumerate() {
                    apply_2x2(&mut y, q, &if transposed { transpose(m) } else { *m });
                }
                y
            }
        }
    }

    fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        match self.mode {
            CalibrationMode::Full => self
                .dense()
                .lu()
                .solve(&DVector::from_column_slice(b))
                .map(|x| x.as_slice().to_vec()),
            CalibrationMode::Tensored => {
                let mut x = b.to_vec();
                for (q, m) in self.per_qubit.iter().enumerate() {
                    apply_2x2(&mut x, q, &invert_2x2(m)?);
                }
                Some(x)
            }
        }
    }

    /// Bound on the largest eigenvalue of AᵀA.
    fn lipschitz(&self) -> f64 {
        let norms = |cols: &[Vec<f64>]| -> (f64, f64) {
            let one = cols
                .iter()
                .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            let dim = cols.len();
            let inf = (0..dim)
                .map(|i| cols.iter().map(|c| c[i].abs()).sum::<f64>())
                .fold(0.0, f64::max);
            (one, inf)
        };
        match self.mode {
            CalibrationMode::Full => {
                let dim = self.matrix.len();
                let cols: Vec<Vec<f64>> = (0..dim)
                    .map(|j| self.matrix.iter().map(|r| r[j]).collect())
                    .collect();
                let (one, inf) = norms(&cols);
                one * inf
            }
            CalibrationMode::Tensored => self
                .per_qubit
                .iter()
                .map(|m| {
                    let (one, inf) = norms(&[vec![m[0][0], m[1][0]], vec![m[0][1], m[1][1]]]);
                    one * inf
                })
                .product(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn from_json(text: &str) -> Result<CalibrationMatrix> {
        let cal: CalibrationMatrix = serde_json::from_str(text)?;
        cal.validate()?;
        Ok(cal)
    }

    pub fn load(path: &Path) -> Result<CalibrationMatrix> {
        CalibrationMatrix::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Minimizes ‖A x − b‖² over the simplex with accelerated projected gradient.
fn constrained_least_squares(cal: &CalibrationMatrix, b: &[f64], start: Vec<f64>) -> Vec<f64> {
    let step = 1.0 / cal.lipschitz();
    let mut x = project_simplex(&start);
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..5000 {
        let r: Vec<f64> = cal
            .apply(&y, false)
            .iter()
            .zip(b)
            .map(|(a, b)| a - b)
            .collect();
        let g = cal.apply(&r, true);
        let next = project_simplex(
            &y.iter()
                .zip(&g)
                .map(|(y, g)| y - step * g)
                .collect::<Vec<_>>(),
        );
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let moved: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        y = next
            .iter()
            .zip(&x)
            .map(|(n, o)| n + (t - 1.0) / t_next * (n - o))
            .collect();
        x = next;
        t = t_next;
        if moved < 1e-13 {
            break;
        }
    }
    x
}

/// Corrects measured counts for readout error.
///
/// The result is non-negative and sums to one. Returns the empirical
/// distribution unchanged for an identity calibration.
pub fn mitigate(samples: &SampleSet, cal: &CalibrationMatrix) -> Result<QuasiDistribution> {
    if samples.num_qubits != cal.num_qubits {
        return Err(Error::RegisterWidth {
            expected: cal.num_qubits,
            actual: samples.num_qubits,
        });
    }
    if samples.shots == 0 {
        return Err(Error::EmptySamples);
    }
    if cal.is_identity() {
        return Ok(QuasiDistribution::from_samples(samples));
    }
    let condition = cal.condition_number();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let b = samples.dense();
    let direct = cal.solve(&b).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let x = if direct.iter().all(|&v| v >= -1e-12) {
        normalize(direct)
    } else {
        normalize(constrained_least_squares(cal, &b, direct))
    };
    let weights = x
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| w > 0.0)
        .map(|(k, w)| (k as u64, w))
        .collect();
    Ok(QuasiDistribution {
        num_qubits: samples.num_qubits,
        shots: samples.shots,
        weights,
    })
}
