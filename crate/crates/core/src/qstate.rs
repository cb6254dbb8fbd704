//! Dense complex linear-algebra kernel: statevectors, single-qubit reduced
//! density matrices, Bloch vectors, entropy, and trace distance.
//!
//! Basis convention is little-endian: bit `k` of an amplitude index is the
//! computational-basis value of qubit `k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the simulator will allocate (2^24 amplitudes = 256 MiB).
pub const MAX_QUBITS: usize = 24;

/// Largest register for which dense 2^n x 2^n oracle matrices may be built.
pub const MAX_DENSE_QUBITS: usize = 8;

/// Tolerance for construction-time contract checks (unitarity, Hermiticity).
pub const TOL_CONSTRUCT: f64 = 1e-10;

/// Tolerance for property checks and cross-route comparisons.
pub const TOL_PROPERTY: f64 = 1e-9;

/// Dense state of an `m`-qubit register: 2^m complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0...0>.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits < 1 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange { got: num_qubits, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Build from raw amplitudes; the length must be a power of two and the
    /// vector must be normalized within [`TOL_CONSTRUCT`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(Error::QubitCountOutOfRange { got: len.max(1).ilog2() as usize, max: MAX_QUBITS });
        }
        let num_qubits = len.ilog2() as usize;
        let state = StateVector { num_qubits, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidDensity("statevector is not normalized"));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor `extra` fresh |0> qubits onto the high end of the register.
    pub fn tensor_zero(&self, extra: usize) -> Result<Self> {
        let total = self.num_qubits + extra;
        if total > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange { got: total, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(StateVector { num_qubits: total, amps })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitIndexOutOfRange { q, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// Apply a 2x2 unitary to qubit `q`, in place.
    pub fn apply_one_qubit(&mut self, u: &[[Complex64; 2]; 2], q: usize) -> Result<()> {
        self.check_qubit(q)?;
        if !is_unitary2(u) {
            return Err(Error::NonUnitary);
        }
        let stride = 1usize << q;
        let low_mask = stride - 1;
        let pairs = self.amps.len() >> 1;
        for k in 0..pairs {
            let i0 = ((k & !low_mask) << 1) | (k & low_mask);
            let i1 = i0 | stride;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(())
    }

    /// Apply a 4x4 unitary to the pair (`q_low`, `q_high`), in place.
    ///
    /// The local two-qubit basis index is `bit(q_low) + 2*bit(q_high)`, i.e.
    /// `q_high` is the more significant local bit and the matrix equals
    /// `kron(op_on_q_high, op_on_q_low)` for product operators.
    pub fn apply_two_qubit(&mut self, u: &[[Complex64; 4]; 4], q_low: usize, q_high: usize) -> Result<()> {
        self.check_qubit(q_low)?;
        self.check_qubit(q_high)?;
        if q_low == q_high {
            return Err(Error::DuplicateQubit { q: q_low });
        }
        if !is_unitary4(u) {
            return Err(Error::NonUnitary);
        }
        let (lo, hi) = if q_low < q_high { (q_low, q_high) } else { (q_high, q_low) };
        let groups = self.amps.len() >> 2;
        for k in 0..groups {
            let base = insert_zero_bit(insert_zero_bit(k, lo), hi);
            let idx = [
                base,
                base | (1 << q_low),
                base | (1 << q_high),
                base | (1 << q_low) | (1 << q_high),
            ];
            let a = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for (row, &i) in idx.iter().enumerate() {
                self.amps[i] = u[row][0] * a[0] + u[row][1] * a[1] + u[row][2] * a[2] + u[row][3] * a[3];
            }
        }
        Ok(())
    }

    /// Apply a CNOT: flip `target` wherever `control` is set. Exact (no
    /// floating-point arithmetic).
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::DuplicateQubit { q: control });
        }
        let c_bit = 1usize << control;
        let t_bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & c_bit != 0 && i & t_bit == 0 {
                self.amps.swap(i, i | t_bit);
            }
        }
        Ok(())
    }

    /// Controlled swap of qubits `a` and `b` on `control`; used by the
    /// full-circuit swap test.
    pub fn apply_controlled_swap(&mut self, control: usize, a: usize, b: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if control == a || control == b || a == b {
            return Err(Error::DuplicateQubit { q: if a == b { a } else { control } });
        }
        let c_bit = 1usize << control;
        let a_bit = 1usize << a;
        let b_bit = 1usize << b;
        for i in 0..self.amps.len() {
            if i & c_bit != 0 && i & a_bit != 0 && i & b_bit == 0 {
                self.amps.swap(i, (i & !a_bit) | b_bit);
            }
        }
        Ok(())
    }

    /// Reduced density matrix of qubit `q`, tracing out everything else.
    pub fn reduce_to_qubit(&self, q: usize) -> Result<QubitDensity> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        let low_mask = stride - 1;
        let pairs = self.amps.len() >> 1;
        let mut d00 = 0.0f64;
        let mut d11 = 0.0f64;
        let mut d01 = Complex64::new(0.0, 0.0);
        for k in 0..pairs {
            let i0 = ((k & !low_mask) << 1) | (k & low_mask);
            let i1 = i0 | stride;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            d00 += a0.norm_sqr();
            d11 += a1.norm_sqr();
            d01 += a0 * a1.conj();
        }
        QubitDensity::new([
            [Complex64::new(d00, 0.0), d01],
            [d01.conj(), Complex64::new(d11, 0.0)],
        ])
    }
}

/// Insert a zero bit at `pos`, shifting higher bits left.
fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1 << pos) - 1);
    ((x & !((1 << pos) - 1)) << 1) | low
}

fn is_unitary2(u: &[[Complex64; 2]; 2]) -> bool {
    let mut max_dev = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                s += u[k][i].conj() * u[k][j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            max_dev = max_dev.max((s - expect).norm());
        }
    }
    max_dev <= TOL_CONSTRUCT
}

fn is_unitary4(u: &[[Complex64; 4]; 4]) -> bool {
    let mut max_dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..4 {
                s += u[k][i].conj() * u[k][j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            max_dev = max_dev.max((s - expect).norm());
        }
    }
    max_dev <= TOL_CONSTRUCT
}

/// 2x2 single-qubit density matrix, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitDensity {
    entries: [[Complex64; 2]; 2],
}

impl QubitDensity {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let trace = entries[0][0] + entries[1][1];
        if (trace.re - 1.0).abs() > TOL_CONSTRUCT || trace.im.abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidDensity("trace is not 1"));
        }
        if (entries[0][1] - entries[1][0].conj()).norm() > TOL_CONSTRUCT
            || entries[0][0].im.abs() > TOL_CONSTRUCT
            || entries[1][1].im.abs() > TOL_CONSTRUCT
        {
            return Err(Error::InvalidDensity("matrix is not Hermitian"));
        }
        let rho = QubitDensity { entries };
        let [lo, _] = rho.eigenvalues();
        if lo < -TOL_CONSTRUCT {
            return Err(Error::InvalidDensity("matrix has a negative eigenvalue"));
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    /// Eigenvalues in ascending order, from the trace/determinant closed form.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let t = (self.entries[0][0] + self.entries[1][1]).re;
        let det = (self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]).re;
        let disc = (t * t / 4.0 - det).max(0.0).sqrt();
        [t / 2.0 - disc, t / 2.0 + disc]
    }
}

/// Bloch vector of a single qubit; `rho = (I + r . sigma) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Bloch components r_i = tr(sigma_i rho).
pub fn bloch_from_density(rho: &QubitDensity) -> BlochVector {
    let e = rho.entries();
    BlochVector {
        x: 2.0 * e[0][1].re,
        y: -2.0 * e[0][1].im,
        z: e[0][0].re - e[1][1].re,
    }
}

/// Von Neumann entropy (nats) of a qubit with Bloch norm `||r||`:
/// the binary entropy of (1 + ||r||)/2, with the convention 0 ln 0 = 0.
pub fn entropy_from_bloch(r: &BlochVector) -> Result<f64> {
    let norm = r.norm();
    if norm > 1.0 + TOL_PROPERTY {
        return Err(Error::BlochNormOutOfRange { norm });
    }
    let norm = norm.min(1.0);
    let p = (1.0 + norm) / 2.0;
    let q = (1.0 - norm) / 2.0;
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    Ok(term(p) + term(q))
}

/// Trace distance between two pure states: sqrt(1 - |<psi1|psi2>|^2).
pub fn trace_distance_pure(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    let overlap = psi1.inner(psi2)?;
    Ok((1.0 - overlap.norm_sqr()).max(0.0).sqrt())
}

/// Dense density matrix |psi><psi| for oracle use; capped at
/// [`MAX_DENSE_QUBITS`] qubits.
pub fn dense_density(psi: &StateVector) -> Result<DMatrix<Complex64>> {
    if psi.num_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::QubitCountOutOfRange { got: psi.num_qubits(), max: MAX_DENSE_QUBITS });
    }
    let n = psi.amplitudes().len();
    Ok(DMatrix::from_fn(n, n, |i, j| psi.amplitudes()[i] * psi.amplitudes()[j].conj()))
}

/// Trace distance between two density matrices: half the sum of the absolute
/// eigenvalues of their difference. Dense oracle path, inputs must be
/// Hermitian with unit trace.
pub fn trace_distance_dense(rho1: &DMatrix<Complex64>, rho2: &DMatrix<Complex64>) -> Result<f64> {
    if rho1.nrows() != rho2.nrows() || rho1.ncols() != rho2.ncols() || rho1.nrows() != rho1.ncols() {
        return Err(Error::DimensionMismatch { left: rho1.nrows(), right: rho2.nrows() });
    }
    if rho1.nrows() > (1 << MAX_DENSE_QUBITS) {
        return Err(Error::QubitCountOutOfRange { got: rho1.nrows().ilog2() as usize, max: MAX_DENSE_QUBITS });
    }
    for m in [rho1, rho2] {
        if !is_hermitian(m) {
            return Err(Error::InvalidDensity("matrix is not Hermitian"));
        }
        let trace: Complex64 = m.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > TOL_PROPERTY || trace.im.abs() > TOL_PROPERTY {
            return Err(Error::InvalidDensity("trace is not 1"));
        }
    }
    let diff = rho1 - rho2;
    let eig = diff.symmetric_eigen();
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

pub(crate) fn is_hermitian(m: &DMatrix<Complex64>) -> bool {
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > TOL_PROPERTY {
                return false;
            }
        }
    }
    true
}
