//! Bound-entanglement communication witnesses.
//!
//! The crate builds the two-ququart bound entangled state and its tensor
//! powers, evaluates the three-party communication witness exactly (by brute
//! force, by per-copy factorization and in closed form), certifies the
//! separable bound `D / 16^N`, and runs heuristic searches: see-saw lower
//! bounds on the separable value and projected ascent of the CCNR value over
//! PPT Bloch-diagonal states.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex kernel (Jacobi eigensolver, singular values,
//!   Kronecker products, partial transpose, norms)
//! * [`pauli`]: task combinatorics and the Pauli product basis
//! * [`states`]: Bloch-diagonal states and entanglement diagnostics
//! * [`protocol`]: strategies, witness evaluation, exact bounds
//! * [`optimize`]: see-saw and CCNR ascent
//! * [`random`]: seeded samplers for states, observables and strategies
//! * [`cli`]: batch commands behind the `boundent` binary
//! * [`verify`]: the reproduction checklist run by `boundent verify`

pub mod cli;
pub mod linalg;
pub mod optimize;
pub mod pauli;
pub mod protocol;
pub mod random;
pub mod states;
pub mod verify;
