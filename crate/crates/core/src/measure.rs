//! Shot-based sampling of a single qubit, Pauli-expectation estimation, and
//! scaled direct inversion (SDI) single-qubit tomography.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::{bloch_from_density, entropy_from_bloch, BlochVector, StateVector};
use crate::streams::{tags, StreamKey};

/// Measurement budget and the RNG stream it draws from.
#[derive(Clone, Copy, Debug)]
pub struct ShotPlan {
    shots: u32,
    key: StreamKey,
}

impl ShotPlan {
    pub fn new(shots: u32, seed: u64) -> Result<Self> {
        Self::with_key(shots, StreamKey::root(seed))
    }

    pub fn with_key(shots: u32, key: StreamKey) -> Result<Self> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(ShotPlan { shots, key })
    }

    pub fn shots(&self) -> u32 {
        self.shots
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    /// Same budget on a derived child stream.
    #[must_use]
    pub fn child(&self, tag: u64) -> ShotPlan {
        ShotPlan { shots: self.shots, key: self.key.child(tag) }
    }
}

/// A sample mean together with the number of shots behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectationEstimate {
    pub mean: f64,
    pub shots: u32,
}

/// Exact probability of reading 0 on qubit `q`.
pub fn prob_zero_exact(state: &StateVector, q: usize) -> Result<f64> {
    if q >= state.num_qubits() {
        return Err(Error::QubitIndexOutOfRange { q, num_qubits: state.num_qubits() });
    }
    let bit = 1usize << q;
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & bit == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Estimate the zero probability of qubit `q` from `plan.shots` Bernoulli
/// samples. Deterministic given the plan's stream.
pub fn sample_zero(state: &StateVector, q: usize, plan: &ShotPlan) -> Result<ExpectationEstimate> {
    let p = prob_zero_exact(state, q)?.clamp(0.0, 1.0);
    let mut rng = plan.key.rng();
    let mut zeros = 0u32;
    for _ in 0..plan.shots {
        if rng.gen::<f64>() < p {
            zeros += 1;
        }
    }
    Ok(ExpectationEstimate { mean: f64::from(zeros) / f64::from(plan.shots), shots: plan.shots })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Rotate a copy of the state so a computational-basis measurement of `q`
/// reads out the requested Pauli axis: H for x, H then S-dagger (applied as
/// H * S^dag) for y, nothing for z.
fn rotate_to_axis(state: &StateVector, q: usize, axis: PauliAxis) -> Result<StateVector> {
    let mut rotated = state.clone();
    let h = FRAC_1_SQRT_2;
    let hadamard = [
        [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ];
    match axis {
        PauliAxis::X => rotated.apply_one_qubit(&hadamard, q)?,
        PauliAxis::Y => {
            let s_dag = [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            ];
            rotated.apply_one_qubit(&s_dag, q)?;
            rotated.apply_one_qubit(&hadamard, q)?;
        }
        PauliAxis::Z => {
            if q >= rotated.num_qubits() {
                return Err(Error::QubitIndexOutOfRange { q, num_qubits: rotated.num_qubits() });
            }
        }
    }
    Ok(rotated)
}

/// Shot-based estimate of <sigma_axis> on qubit `q`: the mean is
/// p_hat(0) - p_hat(1) in [-1, 1].
pub fn pauli_expectation(state: &StateVector, q: usize, axis: PauliAxis, plan: &ShotPlan) -> Result<ExpectationEstimate> {
    let rotated = rotate_to_axis(state, q, axis)?;
    let est = sample_zero(&rotated, q, plan)?;
    Ok(ExpectationEstimate { mean: 2.0 * est.mean - 1.0, shots: est.shots })
}

/// Infinite-shot limit of [`pauli_expectation`].
pub fn pauli_expectation_exact(state: &StateVector, q: usize, axis: PauliAxis) -> Result<f64> {
    let rotated = rotate_to_axis(state, q, axis)?;
    Ok(2.0 * prob_zero_exact(&rotated, q)? - 1.0)
}

/// Scaled direct inversion: keep the raw expectation triple if it lies in the
/// unit ball, otherwise rescale it onto the sphere.
pub fn sdi_bloch(ex: &ExpectationEstimate, ey: &ExpectationEstimate, ez: &ExpectationEstimate) -> BlochVector {
    let raw = BlochVector::new(ex.mean, ey.mean, ez.mean);
    let norm = raw.norm();
    if norm <= 1.0 {
        raw
    } else {
        BlochVector::new(raw.x / norm, raw.y / norm, raw.z / norm)
    }
}

/// Bipartite entanglement entropy of qubit `q` estimated from shots: three
/// independent Pauli batches (3 * shots measurements total), SDI, then the
/// single-qubit entropy closed form. Always lands in [0, ln 2].
pub fn bee_estimate(state: &StateVector, q: usize, plan: &ShotPlan) -> Result<f64> {
    let ex = pauli_expectation(state, q, PauliAxis::X, &plan.child(tags::AXIS_X))?;
    let ey = pauli_expectation(state, q, PauliAxis::Y, &plan.child(tags::AXIS_Y))?;
    let ez = pauli_expectation(state, q, PauliAxis::Z, &plan.child(tags::AXIS_Z))?;
    entropy_from_bloch(&sdi_bloch(&ex, &ey, &ez))
}

/// Exact bipartite entanglement entropy of qubit `q` via the reduced density
/// matrix; simulator-only diagnostic.
pub fn bee_exact(state: &StateVector, q: usize) -> Result<f64> {
    let rho = state.reduce_to_qubit(q)?;
    entropy_from_bloch(&bloch_from_density(&rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn plus_state() -> StateVector {
        let h = FRAC_1_SQRT_2;
        StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap()
    }

    fn bell_state() -> StateVector {
        let h = FRAC_1_SQRT_2;
        StateVector::from_amplitudes(vec![
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn prob_zero_examples() {
        let zeros = StateVector::zero(3).unwrap();
        for q in 0..3 {
            assert_eq!(prob_zero_exact(&zeros, q).unwrap(), 1.0);
        }
        assert!((prob_zero_exact(&plus_state(), 0).unwrap() - 0.5).abs() < 1e-12);
        let bell = bell_state();
        assert!((prob_zero_exact(&bell, 0).unwrap() - 0.5).abs() < 1e-12);
        assert!((prob_zero_exact(&bell, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!(prob_zero_exact(&bell, 2).is_err());
    }

    #[test]
    fn sample_zero_degenerate_probabilities() {
        let plan = ShotPlan::new(100, 7).unwrap();
        let zeros = StateVector::zero(2).unwrap();
        assert_eq!(sample_zero(&zeros, 0, &plan).unwrap().mean, 1.0);

        let one = StateVector::from_amplitudes(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(sample_zero(&one, 0, &plan).unwrap().mean, 0.0);
    }

    #[test]
    fn sample_zero_concentrates() {
        let plan = ShotPlan::new(10_000, 12345).unwrap();
        let est = sample_zero(&plus_state(), 0, &plan).unwrap();
        assert!((est.mean - 0.5).abs() < 0.02, "mean {}", est.mean);
    }

    #[test]
    fn sample_zero_is_deterministic() {
        let plan = ShotPlan::new(100, 99).unwrap();
        let a = sample_zero(&plus_state(), 0, &plan).unwrap();
        let b = sample_zero(&plus_state(), 0, &plan).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pauli_expectation_examples() {
        assert!((pauli_expectation_exact(&plus_state(), 0, PauliAxis::X).unwrap() - 1.0).abs() < 1e-12);
        let zero = StateVector::zero(1).unwrap();
        assert!((pauli_expectation_exact(&zero, 0, PauliAxis::Z).unwrap() - 1.0).abs() < 1e-12);
        assert!(pauli_expectation_exact(&zero, 0, PauliAxis::X).unwrap().abs() < 1e-12);

        let plan = ShotPlan::new(100, 4242).unwrap();
        let est = pauli_expectation(&zero, 0, PauliAxis::X, &plan).unwrap();
        assert!(est.mean.abs() <= 0.35, "100-shot estimate {}", est.mean);
    }

    #[test]
    fn y_axis_convention() {
        // |+i> = (|0> + i|1>)/sqrt(2) has <Y> = +1.
        let h = FRAC_1_SQRT_2;
        let plus_i = StateVector::from_amplitudes(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        assert!((pauli_expectation_exact(&plus_i, 0, PauliAxis::Y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sdi_examples() {
        let e = |mean| ExpectationEstimate { mean, shots: 100 };
        let r = sdi_bloch(&e(0.2), &e(0.1), &e(0.3));
        assert_eq!((r.x, r.y, r.z), (0.2, 0.1, 0.3));

        let r = sdi_bloch(&e(1.0), &e(1.0), &e(1.0));
        let s = 1.0 / 3f64.sqrt();
        assert!((r.x - s).abs() < 1e-12 && (r.y - s).abs() < 1e-12 && (r.z - s).abs() < 1e-12);

        let r = sdi_bloch(&e(0.0), &e(0.0), &e(0.0));
        assert_eq!(r.norm(), 0.0);
        assert!((entropy_from_bloch(&r).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn bee_product_and_entangled() {
        // |+> (x) |0>: qubit 1 is pure, exact BEE is 0.
        let h = FRAC_1_SQRT_2;
        let product = StateVector::from_amplitudes(vec![
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(bee_exact(&product, 1).unwrap() < 1e-12);

        let bell = bell_state();
        assert!((bee_exact(&bell, 1).unwrap() - LN_2).abs() < 1e-12);

        let plan = ShotPlan::new(100, 31).unwrap();
        let est = bee_estimate(&bell, 1, &plan).unwrap();
        assert!((0.0..=LN_2 + 1e-12).contains(&est));
    }
}
