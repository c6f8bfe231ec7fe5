use latfold::hamiltonian::DiagonalOperator;
use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Single-qubit operator `m` on qubit `q` of an `n`-qubit register, qubit 0 least significant.
fn on_qubit(n: usize, q: usize, m: &CMat) -> CMat {
    let id = CMat::identity(2, 2);
    let mut out = CMat::identity(1, 1);
    for k in (0..n).rev() {
        out = kron(&out, if k == q { m } else { &id });
    }
    out
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// QAOA p = 1 state from dense matrix exponentials.
pub fn dense_qaoa(op: &DiagonalOperator, gamma: f64, beta: f64) -> Vec<Complex64> {
    let n = op.num_qubits();
    let dim = 1 << n;
    let x = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let z = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let mut h = CMat::zeros(dim, dim);
    for (mask, coeff) in op.terms() {
        let mut term = CMat::identity(dim, dim);
        for q in mask.qubits() {
            term = on_qubit(n, q, &z) * term;
        }
        h += term * c(*coeff);
    }
    let mut mixer = CMat::zeros(dim, dim);
    for q in 0..n {
        mixer += on_qubit(n, q, &x);
    }
    let i = Complex64::new(0.0, 1.0);
    let plus = CMat::from_element(dim, 1, c(1.0 / (dim as f64).sqrt()));
    let state = (mixer * (-i * beta)).exp() * (h * (-i * gamma)).exp() * plus;
    state.iter().cloned().collect()
}
