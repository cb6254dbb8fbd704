//! Shared brute-force oracles for the integration tests. Everything here is
//! deliberately independent of the implementation paths it checks: dense
//! outer products, explicit index sums, and closed-form 2x2 eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use advq_core::qstate::StateVector;

/// Full 2^m x 2^m density matrix |psi><psi| by explicit outer product.
pub fn outer_product(psi: &StateVector) -> DMatrix<Complex64> {
    let a = psi.amplitudes();
    DMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
}

/// Partial trace of a dense density matrix down to qubit `q` by explicit
/// index summation over all other qubits.
pub fn partial_trace_to_qubit(rho: &DMatrix<Complex64>, num_qubits: usize, q: usize) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    let bit = 1usize << q;
    let dim = 1usize << num_qubits;
    for a in 0..2usize {
        for b in 0..2usize {
            let mut acc = Complex64::new(0.0, 0.0);
            for rest in 0..dim {
                if rest & bit != 0 {
                    continue;
                }
                let row = rest | (a * bit);
                let col = rest | (b * bit);
                acc += rho[(row, col)];
            }
            out[a][b] = acc;
        }
    }
    out
}

/// Von Neumann entropy (nats) of a 2x2 density matrix from its closed-form
/// eigenvalues.
pub fn eigen_entropy_2x2(rho: &[[Complex64; 2]; 2]) -> f64 {
    let trace = (rho[0][0] + rho[1][1]).re;
    let det = (rho[0][0] * rho[1][1] - rho[0][1] * rho[1][0]).re;
    let disc = (trace * trace / 4.0 - det).max(0.0).sqrt();
    let lambdas = [trace / 2.0 + disc, trace / 2.0 - disc];
    lambdas
        .iter()
        .map(|&l| if l > 1e-15 { -l * l.ln() } else { 0.0 })
        .sum()
}

/// Von Neumann entropy (nats) of a dense Hermitian density matrix.
pub fn eigen_entropy_dense(rho: &DMatrix<Complex64>) -> f64 {
    let eig = rho.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .map(|&l| if l > 1e-15 { -l * l.ln() } else { 0.0 })
        .sum()
}

/// Partial trace keeping an arbitrary subset of qubits, dense route.
pub fn partial_trace_keep(rho: &DMatrix<Complex64>, num_qubits: usize, keep: &[usize]) -> DMatrix<Complex64> {
    let keep_dim = 1usize << keep.len();
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !keep.contains(q)).collect();
    let traced_dim = 1usize << traced.len();
    let expand = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            if kept_bits & (1 << pos) != 0 {
                idx |= 1 << q;
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if traced_bits & (1 << pos) != 0 {
                idx |= 1 << q;
            }
        }
        idx
    };
    DMatrix::from_fn(keep_dim, keep_dim, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..traced_dim {
            acc += rho[(expand(i, t), expand(j, t))];
        }
        acc
    })
}

/// Normalized complex Gaussian amplitudes: a Haar-like random pure state.
pub fn random_state(num_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let dim = 1usize << num_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::new(r * (2.0 * std::f64::consts::PI * u2).cos(), r * (2.0 * std::f64::consts::PI * u2).sin())
        })
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps).unwrap()
}
