//! Adversarial learning of quantum state-preparation circuits.
//!
//! A generator circuit learns to prepare an approximation of an unknown pure
//! target state by playing a minimax game against a discriminator circuit
//! that labels incoming states via a single-ancilla measurement. Gradients
//! come from the pi/2 parameter-shift rule with shot-based estimation;
//! optimization uses sign-based resilient backpropagation; training stops
//! when the ancilla's entanglement entropy saturates at ln 2.
//!
//! Modules:
//! - [`qstate`]: dense statevector kernel, reduced density matrices, Bloch
//!   vectors, entropy, trace distance.
//! - [`circuits`]: Pauli-rotation gate model, the 15-parameter two-qubit
//!   block, layered circuits, hidden target preparation.
//! - [`measure`]: shot sampling, Pauli expectations, scaled direct inversion.
//! - [`grad`]: parameter-shift gradient estimators for both players.
//! - [`optim`]: iRprop-minus, gradient descent with momentum.
//! - [`adversarial`]: the alternating training loop and stopping heuristic.
//! - [`helstrom`]: exact state-discrimination oracles and the swap test.

pub mod adversarial;
pub mod circuits;
pub mod error;
pub mod grad;
pub mod helstrom;
pub mod measure;
pub mod optim;
pub mod qstate;
pub mod streams;

pub use error::{Error, Result};
