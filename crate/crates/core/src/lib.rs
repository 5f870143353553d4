//! Fisher–Rao geometry on truncated probability simplices.
//!
//! * [`simplex`]: points, tangent vectors and cost sequences.
//! * [`transform`]: the q-root map onto the unit ℓq sphere and its differential.
//! * [`metric`]: Fisher–Rao inner product, ℓq Finsler norm, distance and geodesics.
//! * [`flow`]: the gradient flow of a linear objective and the LP solver built on it.
//! * [`hamiltonian`]: the integrable Hamiltonian system on projective space,
//!   Poisson brackets and momentum maps.
//! * [`check`], [`io`] and [`cli`]: invariant suites, CSV/JSON output and the
//!   `fisherflow` command line.

// `!(x > 0.0)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod cli;
pub mod error;
pub mod flow;
pub mod hamiltonian;
pub mod io;
pub mod metric;
mod ode;
pub mod simplex;
pub mod transform;
