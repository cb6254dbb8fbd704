//! Parametrized gate model: Pauli-generator rotations, the 15-parameter
//! general two-qubit block, layered circuit construction, and hidden target
//! preparation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::StateVector;
use crate::streams::{tags, StreamKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// Tensor product of one or two Pauli operators, used as a rotation
/// generator. Generators square to the identity, which is what makes the
/// pi/2 parameter-shift rule exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn single(p: Pauli) -> Result<Self> {
        if p == Pauli::I {
            return Err(Error::IdentityGenerator);
        }
        Ok(PauliString(vec![p]))
    }

    pub fn pair(a: Pauli, b: Pauli) -> Result<Self> {
        if a == Pauli::I && b == Pauli::I {
            return Err(Error::IdentityGenerator);
        }
        Ok(PauliString(vec![a, b]))
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Either a 2x2 or a 4x4 unitary, depending on the generator width.
#[derive(Clone, Debug)]
pub enum RotationMatrix {
    Single([[Complex64; 2]; 2]),
    Pair([[Complex64; 4]; 4]),
}

/// exp(-i theta H / 2) = cos(theta/2) I - i sin(theta/2) H for a Pauli-string
/// generator H. For pairs the matrix is `kron(ops[1], ops[0])`, matching the
/// local basis convention of [`StateVector::apply_two_qubit`] when the gate's
/// qubit list is passed as `(q_low = qubits[0], q_high = qubits[1])`.
pub fn rotation_matrix(generator: &PauliString, theta: f64) -> RotationMatrix {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let ms = Complex64::new(0.0, -(theta / 2.0).sin());
    match generator.ops() {
        [p] => {
            let h = p.matrix();
            let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (r, row) in u.iter_mut().enumerate() {
                for (col, e) in row.iter_mut().enumerate() {
                    let ident = if r == col { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                    *e = c * ident + ms * h[r][col];
                }
            }
            RotationMatrix::Single(u)
        }
        [a, b] => {
            let ha = a.matrix();
            let hb = b.matrix();
            let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
            for r in 0..4 {
                for col in 0..4 {
                    // local index = bit(qubits[0]) + 2*bit(qubits[1])
                    let h = hb[r >> 1][col >> 1] * ha[r & 1][col & 1];
                    let ident = if r == col { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                    u[r][col] = c * ident + ms * h;
                }
            }
            RotationMatrix::Pair(u)
        }
        other => unreachable!("Pauli string of length {} cannot be constructed", other.len()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Cnot {
        control: usize,
        target: usize,
    },
    Rotation {
        generator: PauliString,
        qubits: Vec<usize>,
        param_index: usize,
    },
}

impl Gate {
    fn rotation1(p: Pauli, q: usize, param_index: usize) -> Gate {
        Gate::Rotation {
            generator: PauliString::single(p).expect("non-identity Pauli"),
            qubits: vec![q],
            param_index,
        }
    }

    fn qubits_in_range(&self, num_qubits: usize) -> bool {
        match self {
            Gate::Cnot { control, target } => {
                *control < num_qubits && *target < num_qubits && control != target
            }
            Gate::Rotation { generator, qubits, .. } => {
                qubits.len() == generator.len()
                    && qubits.iter().all(|q| *q < num_qubits)
                    && (qubits.len() < 2 || qubits[0] != qubits[1])
            }
        }
    }
}

/// Ordered gate list over a fixed register with a flat parameter vector.
/// Parameter indices `first_param..num_params` each appear on exactly one
/// rotation gate (`first_param` is zero for stand-alone circuits and nonzero
/// only when a layered section is built for embedding).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    first_param: usize,
    num_params: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        Self::with_first_param(num_qubits, gates, 0)
    }

    pub fn with_first_param(num_qubits: usize, gates: Vec<Gate>, first_param: usize) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::QubitCountOutOfRange { got: num_qubits, max: crate::qstate::MAX_QUBITS });
        }
        let mut indices: Vec<usize> = Vec::new();
        for g in &gates {
            if !g.qubits_in_range(num_qubits) {
                let q = match g {
                    Gate::Cnot { control, target } => (*control).max(*target),
                    Gate::Rotation { qubits, .. } => qubits.iter().copied().max().unwrap_or(0),
                };
                return Err(Error::QubitIndexOutOfRange { q, num_qubits });
            }
            if let Gate::Rotation { param_index, .. } = g {
                indices.push(*param_index);
            }
        }
        indices.sort_unstable();
        for (offset, idx) in indices.iter().enumerate() {
            if *idx != first_param + offset {
                return Err(Error::ParamIndexCoverage);
            }
        }
        let num_params = first_param + indices.len();
        Ok(Circuit { num_qubits, gates, first_param, num_params })
    }

    pub fn empty(num_qubits: usize) -> Self {
        Circuit { num_qubits, gates: Vec::new(), first_param: 0, num_params: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Apply the circuit to `state` with the given parameter vector. The
    /// state may have more qubits than the circuit; gates act on the low
    /// qubits.
    pub fn apply(&self, params: &[f64], state: &mut StateVector) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParamCountMismatch { expected: self.num_params, got: params.len() });
        }
        if state.num_qubits() < self.num_qubits {
            return Err(Error::DimensionMismatch { left: state.num_qubits(), right: self.num_qubits });
        }
        for gate in &self.gates {
            match gate {
                Gate::Cnot { control, target } => state.apply_cnot(*control, *target)?,
                Gate::Rotation { generator, qubits, param_index } => {
                    match rotation_matrix(generator, params[*param_index]) {
                        RotationMatrix::Single(u) => state.apply_one_qubit(&u, qubits[0])?,
                        RotationMatrix::Pair(u) => state.apply_two_qubit(&u, qubits[0], qubits[1])?,
                    }
                }
            }
        }
        Ok(())
    }

    /// Run the circuit from |0...0> on a register of `total_qubits` qubits.
    pub fn run_from_zero(&self, params: &[f64], total_qubits: usize) -> Result<StateVector> {
        let mut state = StateVector::zero(total_qubits)?;
        self.apply(params, &mut state)?;
        Ok(state)
    }
}

/// Layered-circuit shape: `num_layers` layers of `num_qubits - 1` general
/// two-qubit blocks on adjacent pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub num_qubits: usize,
    pub num_layers: usize,
}

impl LayerSpec {
    pub fn new(num_qubits: usize, num_layers: usize) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::QubitCountOutOfRange { got: num_qubits, max: crate::qstate::MAX_QUBITS });
        }
        if num_layers < 1 {
            return Err(Error::InvalidConfig("layer count must be at least 1".into()));
        }
        Ok(LayerSpec { num_qubits, num_layers })
    }

    pub fn num_blocks(&self) -> usize {
        self.num_layers * (self.num_qubits - 1)
    }

    pub fn num_params(&self) -> usize {
        self.num_blocks() * BLOCK_PARAMS
    }
}

pub const BLOCK_PARAMS: usize = 15;
pub const BLOCK_GATES: usize = 18;

/// General two-qubit block: three CNOTs and 15 single-qubit rotations,
/// enough to realize any element of SU(4) up to global phase. Consumes
/// parameter indices `param_base..param_base + 15`.
///
/// Layout: Rz Ry Rz on each qubit, CNOT(q1 -> q2), Rz(q1) and Ry(q2),
/// CNOT(q2 -> q1), Ry(q2), CNOT(q1 -> q2), then Rz Ry Rz on each qubit.
/// With every angle zero the three CNOTs compose to a plain SWAP.
pub fn two_qubit_block(q1: usize, q2: usize, param_base: usize) -> Result<Vec<Gate>> {
    if q1 == q2 {
        return Err(Error::DuplicateQubit { q: q1 });
    }
    let p = param_base;
    Ok(vec![
        Gate::rotation1(Pauli::Z, q1, p),
        Gate::rotation1(Pauli::Y, q1, p + 1),
        Gate::rotation1(Pauli::Z, q1, p + 2),
        Gate::rotation1(Pauli::Z, q2, p + 3),
        Gate::rotation1(Pauli::Y, q2, p + 4),
        Gate::rotation1(Pauli::Z, q2, p + 5),
        Gate::Cnot { control: q1, target: q2 },
        Gate::rotation1(Pauli::Z, q1, p + 6),
        Gate::rotation1(Pauli::Y, q2, p + 7),
        Gate::Cnot { control: q2, target: q1 },
        Gate::rotation1(Pauli::Y, q2, p + 8),
        Gate::Cnot { control: q1, target: q2 },
        Gate::rotation1(Pauli::Z, q1, p + 9),
        Gate::rotation1(Pauli::Y, q1, p + 10),
        Gate::rotation1(Pauli::Z, q1, p + 11),
        Gate::rotation1(Pauli::Z, q2, p + 12),
        Gate::rotation1(Pauli::Y, q2, p + 13),
        Gate::rotation1(Pauli::Z, q2, p + 14),
    ])
}

/// Build the layered circuit: each layer places blocks on adjacent pairs
/// (0,1), (1,2), ..., (m-2, m-1) in order. Total parameter count is
/// `start_param + num_layers * (m - 1) * 15`.
pub fn build_layered(spec: &LayerSpec, start_param: usize) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(spec.num_blocks() * BLOCK_GATES);
    let mut next = start_param;
    for _layer in 0..spec.num_layers {
        for q in 0..spec.num_qubits - 1 {
            gates.extend(two_qubit_block(q, q + 1, next)?);
            next += BLOCK_PARAMS;
        }
    }
    Circuit::with_first_param(spec.num_qubits, gates, start_param)
}

/// A target-state preparation: a layered circuit with frozen random
/// parameters and the state it prepares. Training code must only look at
/// `state`; circuit and parameters exist for diagnostics and tests.
#[derive(Clone, Debug)]
pub struct PreparedTarget {
    pub circuit: Circuit,
    pub params: Vec<f64>,
    pub state: StateVector,
}

/// Prepare a hidden target: layered circuit with parameters drawn uniformly
/// from [-pi, pi] under `seed`.
pub fn make_target(seed: u64, num_qubits: usize, num_layers: usize) -> Result<PreparedTarget> {
    let spec = LayerSpec::new(num_qubits, num_layers)?;
    let circuit = build_layered(&spec, 0)?;
    let mut rng = StreamKey::root(seed).child(tags::TARGET_PARAMS).rng();
    let params: Vec<f64> = (0..circuit.num_params()).map(|_| rng.gen_range(-PI..PI)).collect();
    let state = circuit.run_from_zero(&params, num_qubits)?;
    Ok(PreparedTarget { circuit, params, state })
}

/// Draw a fresh uniform [-pi, pi] parameter vector for a circuit.
pub fn random_params(circuit: &Circuit, key: StreamKey) -> Vec<f64> {
    let mut rng = key.rng();
    (0..circuit.num_params()).map(|_| rng.gen_range(-PI..PI)).collect()
}
