//! Exact state-discrimination oracle: the Gamma operator, the optimal
//! two-element POVM, the minimal-error identity against trace distance, and
//! a simulated swap test.
//!
//! Everything here is dense, simulator-only diagnostics; the adversarial
//! trainer never calls into this module.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grad::Priors;
use crate::measure::{prob_zero_exact, sample_zero, ExpectationEstimate, ShotPlan};
use crate::qstate::{is_hermitian, trace_distance_pure, StateVector, MAX_DENSE_QUBITS, MAX_QUBITS, TOL_CONSTRUCT};
use crate::streams::tags;

/// The Hermitian operator `Gamma = P(t) rho_t - P(g) rho_g` whose eigenbasis
/// diagonalizes the optimal POVM.
#[derive(Clone, Debug)]
pub struct GammaOperator {
    matrix: DMatrix<Complex64>,
    priors: Priors,
}

impl GammaOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn priors(&self) -> Priors {
        self.priors
    }
}

/// Build Gamma from two pure states. Dense oracle, capped at
/// [`MAX_DENSE_QUBITS`] qubits.
pub fn gamma(target: &StateVector, generated: &StateVector, priors: Priors) -> Result<GammaOperator> {
    if target.num_qubits() != generated.num_qubits() {
        return Err(Error::DimensionMismatch { left: target.num_qubits(), right: generated.num_qubits() });
    }
    if target.num_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::QubitCountOutOfRange { got: target.num_qubits(), max: MAX_DENSE_QUBITS });
    }
    let dim = target.amplitudes().len();
    let t = target.amplitudes();
    let g = generated.amplitudes();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        priors.target() * t[i] * t[j].conj() - priors.generated() * g[i] * g[j].conj()
    });
    debug_assert!(is_hermitian(&matrix));
    let trace: Complex64 = matrix.diagonal().iter().sum();
    debug_assert!((trace.re - (priors.target() - priors.generated())).abs() < TOL_CONSTRUCT);
    Ok(GammaOperator { matrix, priors })
}

/// The optimal two-element POVM for discriminating the pair behind a Gamma
/// operator; outcome 0 labels the input 'target'.
#[derive(Clone, Debug)]
pub struct OptimalPovm {
    /// Projector for outcome 0; E1 = I - E0 implicitly.
    pub e0: DMatrix<Complex64>,
    /// Minimal probability of a labeling error, P(t) - tr(E0 Gamma).
    pub p_err: f64,
}

/// Eigendecompose Gamma and project outcome 0 onto the eigenspace that
/// minimizes the error probability. Both sign conventions are evaluated
/// explicitly; the positive eigenspace always wins since
/// `P_err = P(t) - tr(E0 Gamma)` and the positive eigenvalues carry the
/// largest trace. Zero eigenvalues (|gamma_j| below tolerance) are excluded;
/// they contribute nothing to the error either way.
pub fn optimal_povm(g: &GammaOperator) -> OptimalPovm {
    let dim = g.matrix.nrows();
    let eig = g.matrix.clone().symmetric_eigen();
    let projector_for = |keep: &dyn Fn(f64) -> bool| -> (DMatrix<Complex64>, f64) {
        let mut e0 = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let mut trace_e0_gamma = 0.0f64;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() > TOL_CONSTRUCT && keep(lambda) {
                let v = eig.eigenvectors.column(j);
                for r in 0..dim {
                    for c in 0..dim {
                        e0[(r, c)] += v[r] * v[c].conj();
                    }
                }
                trace_e0_gamma += lambda;
            }
        }
        (e0, g.priors.target() - trace_e0_gamma)
    };
    let (e0_pos, p_err_pos) = projector_for(&|l: f64| l > 0.0);
    let (e0_neg, p_err_neg) = projector_for(&|l: f64| l < 0.0);
    if p_err_pos <= p_err_neg {
        OptimalPovm { e0: e0_pos, p_err: p_err_pos }
    } else {
        OptimalPovm { e0: e0_neg, p_err: p_err_neg }
    }
}

/// For equal priors, the minimal error probability must equal
/// `(1 - D(rho_t, rho_g)) / 2`. Returns true when both routes agree within
/// 1e-9.
pub fn helstrom_bound_check(target: &StateVector, generated: &StateVector, priors: Priors) -> Result<bool> {
    if !priors.is_equal() {
        return Err(Error::UnequalPriors);
    }
    let povm = optimal_povm(&gamma(target, generated, priors)?);
    let distance = trace_distance_pure(target, generated)?;
    Ok((povm.p_err - 0.5 * (1.0 - distance)).abs() < 1e-9)
}

/// Verify the closed-form traces
/// `tr[Gamma rho_g] = P(t) |<psi_g|psi_t>|^2 - P(g)` and
/// `tr[Gamma rho_t] = P(t) - P(g) |<psi_g|psi_t>|^2`
/// against direct dense evaluation, within 1e-10.
pub fn overlap_identities_check(target: &StateVector, generated: &StateVector, priors: Priors) -> Result<bool> {
    let g = gamma(target, generated, priors)?;
    let overlap_sq = target.inner(generated)?.norm_sqr();

    let quadratic_form = |psi: &StateVector| -> f64 {
        let dim = psi.amplitudes().len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += psi.amplitudes()[i].conj() * g.matrix[(i, j)] * psi.amplitudes()[j];
            }
        }
        acc.re
    };

    let tr_gamma_rho_g = quadratic_form(generated);
    let tr_gamma_rho_t = quadratic_form(target);
    let expected_g = priors.target() * overlap_sq - priors.generated();
    let expected_t = priors.target() - priors.generated() * overlap_sq;
    Ok((tr_gamma_rho_g - expected_g).abs() < 1e-10 && (tr_gamma_rho_t - expected_t).abs() < 1e-10)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapTestMode {
    /// Sample straight from the known ancilla distribution.
    Analytic,
    /// Build the (2n+1)-qubit controlled-swap circuit and measure it.
    FullCircuit,
}

/// Exact ancilla-zero probability of the swap test, `(1 + |<t|g>|^2) / 2`,
/// computed per mode.
pub fn swap_test_p0(target: &StateVector, generated: &StateVector, mode: SwapTestMode) -> Result<f64> {
    if target.num_qubits() != generated.num_qubits() {
        return Err(Error::DimensionMismatch { left: target.num_qubits(), right: generated.num_qubits() });
    }
    let n = target.num_qubits();
    match mode {
        SwapTestMode::Analytic => Ok((1.0 + target.inner(generated)?.norm_sqr()) / 2.0),
        SwapTestMode::FullCircuit => {
            let total = 2 * n + 1;
            if total > MAX_QUBITS {
                return Err(Error::QubitCountOutOfRange { got: total, max: MAX_QUBITS });
            }
            let control = 2 * n;
            // |t> on qubits 0..n, |g> on qubits n..2n, control on top.
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
            for (i, &a) in target.amplitudes().iter().enumerate() {
                for (j, &b) in generated.amplitudes().iter().enumerate() {
                    amps[i | (j << n)] = a * b;
                }
            }
            let mut state = StateVector::from_amplitudes(amps)?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let hadamard = [
                [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            ];
            state.apply_one_qubit(&hadamard, control)?;
            for q in 0..n {
                state.apply_controlled_swap(control, q, n + q)?;
            }
            state.apply_one_qubit(&hadamard, control)?;
            prob_zero_exact(&state, control)
        }
    }
}

/// Shot-based estimate of the squared overlap `|<psi_t|psi_g>|^2` via the
/// swap test: the estimator is `2 p_hat(0) - 1`, clamped into [0, 1].
pub fn swap_test_overlap(
    target: &StateVector,
    generated: &StateVector,
    plan: &ShotPlan,
    mode: SwapTestMode,
) -> Result<ExpectationEstimate> {
    let p0 = swap_test_p0(target, generated, mode)?;
    // A one-qubit register holding sqrt(p0)|0> + sqrt(1-p0)|1> reproduces the
    // ancilla statistics for sampling purposes.
    let proxy = StateVector::from_amplitudes(vec![
        Complex64::new(p0.clamp(0.0, 1.0).sqrt(), 0.0),
        Complex64::new((1.0 - p0.clamp(0.0, 1.0)).max(0.0).sqrt(), 0.0),
    ])?;
    let est = sample_zero(&proxy, 0, &plan.child(tags::SWAP_TEST))?;
    Ok(ExpectationEstimate { mean: (2.0 * est.mean - 1.0).clamp(0.0, 1.0), shots: est.shots })
}

/// One random rank-k projective measurement, for optimality spot checks.
pub fn random_projector(dim: usize, rank: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    // Orthonormalize `rank` random complex vectors with Gram-Schmidt.
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| {
                let (a, b) = gaussian_pair(rng);
                Complex64::new(a, b)
            })
            .collect();
        for u in &basis {
            let dot: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (ve, ue) in v.iter_mut().zip(u) {
                *ve -= dot * ue;
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for e in v.iter_mut() {
                *e /= norm;
            }
            basis.push(v);
        }
    }
    let mut p = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for v in &basis {
        for r in 0..dim {
            for c in 0..dim {
                p[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    p
}

/// Error probability of an arbitrary two-element POVM {E0, I - E0}:
/// `tr[(I - E0) rho_t] P(t) + tr[E0 rho_g] P(g)`.
pub fn povm_error_probability(
    e0: &DMatrix<Complex64>,
    target: &StateVector,
    generated: &StateVector,
    priors: Priors,
) -> f64 {
    let form = |psi: &StateVector| -> f64 {
        let dim = psi.amplitudes().len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += psi.amplitudes()[i].conj() * e0[(i, j)] * psi.amplitudes()[j];
            }
        }
        acc.re
    };
    (1.0 - form(target)) * priors.target() + form(generated) * priors.generated()
}

fn gaussian_pair(rng: &mut impl Rng) -> (f64, f64) {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    (r * (2.0 * std::f64::consts::PI * u2).cos(), r * (2.0 * std::f64::consts::PI * u2).sin())
}

/// Haar-like random pure state: normalized complex Gaussian amplitudes.
pub fn random_pure_state(num_qubits: usize, rng: &mut impl Rng) -> Result<StateVector> {
    let dim = 1usize << num_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| {
            let (a, b) = gaussian_pair(rng);
            Complex64::new(a, b)
        })
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::StreamKey;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn basis_state(num_qubits: usize, index: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector::from_amplitudes(amps).unwrap()
    }

    fn plus_state() -> StateVector {
        StateVector::from_amplitudes(vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn gamma_examples() {
        let zero = basis_state(1, 0);
        let one = basis_state(1, 1);
        let g = gamma(&zero, &zero, Priors::equal()).unwrap();
        assert!(g.matrix().iter().all(|e| e.norm() < 1e-12));

        let g = gamma(&zero, &one, Priors::equal()).unwrap();
        assert!((g.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((g.matrix()[(1, 1)].re + 0.5).abs() < 1e-12);

        for p_t in [0.5, 0.3, 0.8] {
            let priors = Priors::new(p_t).unwrap();
            let g = gamma(&zero, &plus_state(), priors).unwrap();
            let trace: Complex64 = g.matrix().diagonal().iter().sum();
            assert!((trace.re - (priors.target() - priors.generated())).abs() < 1e-12);
        }

        assert!(gamma(&zero, &basis_state(2, 0), Priors::equal()).is_err());
    }

    #[test]
    fn povm_examples() {
        let zero = basis_state(1, 0);
        let one = basis_state(1, 1);

        // orthogonal states discriminate perfectly
        let povm = optimal_povm(&gamma(&zero, &one, Priors::equal()).unwrap());
        assert!(povm.p_err.abs() < 1e-12);

        // |0> vs |+>: (1 - 1/sqrt(2)) / 2
        let povm = optimal_povm(&gamma(&zero, &plus_state(), Priors::equal()).unwrap());
        assert!((povm.p_err - (1.0 - FRAC_1_SQRT_2) / 2.0).abs() < 1e-10);

        // identical states: guess the likelier label
        for p_t in [0.5, 0.2, 0.7] {
            let priors = Priors::new(p_t).unwrap();
            let povm = optimal_povm(&gamma(&zero, &zero, priors).unwrap());
            assert!((povm.p_err - priors.target().min(priors.generated())).abs() < 1e-10, "p_t = {p_t}");
        }
    }

    #[test]
    fn e0_is_a_projector_commuting_with_gamma() {
        let mut rng = StreamKey::root(4).rng();
        for _ in 0..20 {
            let t = random_pure_state(3, &mut rng).unwrap();
            let g = random_pure_state(3, &mut rng).unwrap();
            let gam = gamma(&t, &g, Priors::equal()).unwrap();
            let povm = optimal_povm(&gam);
            let e0 = &povm.e0;
            let idem = e0 * e0 - e0;
            assert!(idem.iter().all(|x| x.norm() < 1e-9));
            let comm = e0 * gam.matrix() - gam.matrix() * e0;
            assert!(comm.iter().all(|x| x.norm() < 1e-9));
        }
    }

    #[test]
    fn helstrom_bound_examples() {
        let zero = basis_state(1, 0);
        let one = basis_state(1, 1);
        assert!(helstrom_bound_check(&zero, &one, Priors::equal()).unwrap());
        assert!(helstrom_bound_check(&zero, &zero, Priors::equal()).unwrap());
        assert!(matches!(
            helstrom_bound_check(&zero, &one, Priors::new(0.3).unwrap()),
            Err(Error::UnequalPriors)
        ));
    }

    #[test]
    fn overlap_identities_examples() {
        let zero = basis_state(1, 0);
        let one = basis_state(1, 1);
        assert!(overlap_identities_check(&zero, &zero, Priors::equal()).unwrap());
        assert!(overlap_identities_check(&zero, &one, Priors::equal()).unwrap());
        let mut rng = StreamKey::root(77).rng();
        for _ in 0..10 {
            let t = random_pure_state(2, &mut rng).unwrap();
            let g = random_pure_state(2, &mut rng).unwrap();
            assert!(overlap_identities_check(&t, &g, Priors::new(0.37).unwrap()).unwrap());
        }
    }

    #[test]
    fn swap_test_examples() {
        let zero = basis_state(1, 0);
        let one = basis_state(1, 1);
        assert!((swap_test_p0(&zero, &zero, SwapTestMode::Analytic).unwrap() - 1.0).abs() < 1e-12);
        assert!((swap_test_p0(&zero, &one, SwapTestMode::Analytic).unwrap() - 0.5).abs() < 1e-12);

        let mut rng = StreamKey::root(123).rng();
        for _ in 0..10 {
            let t = random_pure_state(3, &mut rng).unwrap();
            let g = random_pure_state(3, &mut rng).unwrap();
            let analytic = swap_test_p0(&t, &g, SwapTestMode::Analytic).unwrap();
            let circuit = swap_test_p0(&t, &g, SwapTestMode::FullCircuit).unwrap();
            assert!((analytic - circuit).abs() < 1e-10);
            assert!((analytic - (1.0 + t.inner(&g).unwrap().norm_sqr()) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_test_sampling() {
        let zero = basis_state(1, 0);
        let plan = ShotPlan::new(10_000, 5).unwrap();
        let est = swap_test_overlap(&zero, &zero, &plan, SwapTestMode::Analytic).unwrap();
        assert_eq!(est.mean, 1.0);

        let est = swap_test_overlap(&zero, &basis_state(1, 1), &plan, SwapTestMode::FullCircuit).unwrap();
        assert!(est.mean <= 0.05, "orthogonal overlap estimate {}", est.mean);
    }

    #[test]
    fn swap_test_full_circuit_size_cap() {
        let mut rng = StreamKey::root(9).rng();
        let t = random_pure_state(13, &mut rng);
        // 13 qubits would need 27 total; expect a size error before allocation
        if let Ok(t) = t {
            let g = t.clone();
            assert!(swap_test_p0(&t, &g, SwapTestMode::FullCircuit).is_err());
        }
    }

    #[test]
    fn optimal_povm_beats_random_projectors() {
        let mut rng = StreamKey::root(55).rng();
        for n in 1..=3usize {
            let t = random_pure_state(n, &mut rng).unwrap();
            let g = random_pure_state(n, &mut rng).unwrap();
            let priors = Priors::equal();
            let best = optimal_povm(&gamma(&t, &g, priors).unwrap());
            for _ in 0..300 {
                let rank = rng.gen_range(0..=(1 << n));
                let e0 = if rank == 0 {
                    DMatrix::from_element(1 << n, 1 << n, Complex64::new(0.0, 0.0))
                } else {
                    random_projector(1 << n, rank, &mut rng)
                };
                let p = povm_error_probability(&e0, &t, &g, priors);
                assert!(best.p_err <= p + 1e-9, "random projector beat the optimum: {p} < {}", best.p_err);
            }
        }
    }
}
