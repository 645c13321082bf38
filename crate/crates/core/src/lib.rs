//! Calculus of quantum histories over finite-dimensional ray spaces.
//!
//! Events are rays in a complex vector space. A history joins events
//! with `&` (sequential transition) and `|` (mutually exclusive
//! alternatives), e.g. `a & (b1 | b2) & c`, and can be evaluated in two
//! independent representations:
//!
//! * **projectors** ([`projector`]) — the history operator `Γ`, a
//!   palindromic product of slot operators, whose trace is the degree
//!   of certainty of the history;
//! * **amplitudes** ([`amplitude`]) — bracket products along expanded
//!   paths, summed over alternatives, with
//!   `tr(Γ) = A(γ)·A(γ⁻¹)` tying the two routes together.
//!
//! [`probability`] turns traces into absolute and conditional
//! probabilities (the trace generalizes counting: unit trace per
//! elementary projector, trace `N` for the identity), implements the
//! actualization rule, and models an `N`-face quantum die.

pub mod amplitude;
pub mod error;
pub mod lang;
pub mod linalg;
pub mod probability;
pub mod projector;
pub mod sampling;
pub mod space;

/// Tolerances used across the crate.
///
/// Two regimes are kept apart on purpose: `1e-12` for identities that
/// hold exactly in real arithmetic (only rounding noise is forgiven)
/// and `1e-9` for validating user input, where modeling slack is
/// expected. Ray component input gets an even wider `1e-6` so that
/// hand-typed decimals pass.
pub mod tol {
    /// Exact algebraic identities (idempotence, Hermiticity, trace
    /// identities).
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Validation of user-supplied data: unitarity, orthogonality of
    /// alternatives, basis completeness.
    pub const VALIDATION: f64 = 1e-9;
    /// Accepted deviation of input ray norms from 1 before rejection.
    pub const RAY_NORM_INPUT: f64 = 1e-6;
    /// Agreement required between the projector and amplitude routes.
    pub const CROSS_REPRESENTATION: f64 = 1e-10;
    /// Proportionality of a history operator to its final-event
    /// projector.
    pub const PROPORTIONALITY: f64 = 1e-10;
    /// Traces at or below this mark a forbidden history.
    pub const FORBIDDEN_TRACE: f64 = 1e-12;
    /// Imaginary residue allowed on projector-route traces.
    pub const TRACE_RESIDUE: f64 = 1e-9;
    /// Imaginary residue allowed on amplitude-route traces.
    pub const AMPLITUDE_RESIDUE: f64 = 1e-10;
    /// Upper slack of the certainty reporting domain `[0, 1 + slack]`.
    pub const CERTAINTY_SLACK: f64 = 1e-9;
}

pub use amplitude::{
    amplitude_of, closed_loops, path_amplitude, trace_via_amplitudes, Amplitude, ClosedLoop,
    LoopKind,
};
pub use error::{Error, ParseError, Result};
pub use lang::{parse, render, ElementaryPath, HistoryExpr};
pub use linalg::{Operator, Projector, Ray, MAX_DIMENSION};
pub use num_complex::Complex64;
pub use probability::{
    absolute_probability, actualize, conditional_probability, make_die, memory_loss_check,
    ProbabilityKind, ProbabilityResult, QuantumDie,
};
pub use projector::{
    certainty_of, gamma_of, interference_split, slot_operator, HistoryOperator, InterferenceSplit,
    Strictness,
};
pub use space::EventSpace;
