//! Probability queries over histories.
//!
//! The trace plays the role of counting: an elementary projector has
//! unit trace and the identity has trace `N`, so the absolute
//! probability of a history is `tr(Γ)/N` and the probability
//! conditioned on its first event is `tr(Γ)` itself. Conditioning on a
//! history that has already happened is the actualization rule: the
//! accumulated operator renormalizes to `Γ/tr(Γ)`, which collapses to
//! the final event's projector — earlier events are forgotten.
//!
//! Whenever a history has elementary endpoints the amplitude route is
//! computed alongside the projector route and the two must agree within
//! [`tol::CROSS_REPRESENTATION`]; a disagreement is reported as an
//! error instead of silently picking one number.

use crate::amplitude::trace_via_amplitudes;
use crate::error::{Error, Result};
use crate::lang::HistoryExpr;
use crate::linalg::{Operator, Projector, Ray, MAX_DIMENSION};
use crate::projector::{gamma_of, Strictness};
use crate::space::EventSpace;
use crate::tol;

/// Whether a probability is taken against the whole sample space or
/// against the history's first event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbabilityKind {
    Absolute,
    Conditional,
}

/// A probability with its defining ratio preserved. `value` is the
/// clamped ratio; `numerator` and `denominator` keep the raw parts so
/// that floating-point residues stay visible.
#[derive(Debug, Clone)]
pub struct ProbabilityResult {
    pub value: f64,
    pub kind: ProbabilityKind,
    pub numerator: f64,
    pub denominator: f64,
    /// Amplitude-route value of the same ratio, when the history has
    /// elementary endpoints.
    pub cross_check: Option<f64>,
    pub warnings: Vec<String>,
}

impl ProbabilityResult {
    pub fn raw(&self) -> f64 {
        self.numerator / self.denominator
    }

    /// Absolute difference between the two representations, when both
    /// were computed.
    pub fn cross_difference(&self) -> Option<f64> {
        self.cross_check.map(|c| (self.raw() - c).abs())
    }
}

fn real_trace(gamma: &Operator) -> Result<f64> {
    let tr = gamma.trace();
    if tr.im.abs() > tol::TRACE_RESIDUE {
        return Err(Error::InternalConsistency {
            message: format!("history operator trace has imaginary residue {:e}", tr.im),
        });
    }
    Ok(tr.re)
}

fn checked_cross(h: &HistoryExpr, space: &EventSpace, projector_value: f64) -> Result<Option<f64>> {
    if !h.has_elementary_endpoints() {
        return Ok(None);
    }
    let amplitude_value = trace_via_amplitudes(h, space)?;
    if (projector_value - amplitude_value).abs() > tol::CROSS_REPRESENTATION {
        return Err(Error::RepresentationMismatch {
            projector: projector_value,
            amplitude: amplitude_value,
        });
    }
    Ok(Some(amplitude_value))
}

/// Probability of a history against the whole sample space:
/// `p(γ/I) = tr(Γ)/N`.
pub fn absolute_probability(
    h: &HistoryExpr,
    space: &EventSpace,
    strictness: Strictness,
) -> Result<ProbabilityResult> {
    let ho = gamma_of(h, space, strictness)?;
    let trace = real_trace(ho.gamma())?;
    let n = space.dimension() as f64;
    let cross = checked_cross(h, space, trace)?;
    Ok(ProbabilityResult {
        value: (trace / n).clamp(0.0, 1.0),
        kind: ProbabilityKind::Absolute,
        numerator: trace,
        denominator: n,
        cross_check: cross.map(|c| c / n),
        warnings: ho.warnings().to_vec(),
    })
}

/// Probability of a history conditioned on its first event:
/// `p(γ/a) = p(γ)/p(a) = tr(Γ)`, using `tr(P_a) = 1`.
pub fn conditional_probability(
    h: &HistoryExpr,
    space: &EventSpace,
    strictness: Strictness,
) -> Result<ProbabilityResult> {
    let (first, _) = h.endpoints();
    if !first.is_event() {
        return Err(Error::AlternativeEndpoint);
    }
    let ho = gamma_of(h, space, strictness)?;
    let trace = real_trace(ho.gamma())?;
    let n = space.dimension() as f64;
    let cross = checked_cross(h, space, trace)?;
    Ok(ProbabilityResult {
        value: trace.clamp(0.0, 1.0),
        kind: ProbabilityKind::Conditional,
        numerator: trace / n,
        denominator: 1.0 / n,
        cross_check: cross,
        warnings: ho.warnings().to_vec(),
    })
}

/// The actualized state after a history happened: `Γ/tr(Γ)`, the
/// projector onto the final event's ray. Conditioning on a history of
/// vanishing trace is an error, not a silent `0/0`.
pub fn actualize(h: &HistoryExpr, space: &EventSpace, strictness: Strictness) -> Result<Operator> {
    let (_, last) = h.endpoints();
    if !last.is_event() {
        return Err(Error::AlternativeEndpoint);
    }
    let ho = gamma_of(h, space, strictness)?;
    let trace = real_trace(ho.gamma())?;
    if trace <= tol::FORBIDDEN_TRACE {
        return Err(Error::ForbiddenHistory { trace });
    }
    Ok(ho.gamma().scaled(1.0 / trace))
}

/// Compares the probability of reaching `c` after the chain `a & b`
/// with the probability of reaching `c` from `b` alone. The pair is
/// `(tr(P_c P_b P_a P_b P_c)/tr(P_b P_a P_b), tr(P_c P_b P_c))`; the two
/// agree because the actualized chain operator is exactly `P_b`.
pub fn memory_loss_check(a: &str, b: &str, c: &str, space: &EventSpace) -> Result<(f64, f64)> {
    let pa = space.projector(a)?.into_op();
    let pb = space.projector(b)?.into_op();
    let pc = space.projector(c)?.into_op();
    let chain = &(&pb * &pa) * &pb;
    let chain_trace = real_trace(&chain)?;
    if chain_trace <= tol::FORBIDDEN_TRACE {
        return Err(Error::ForbiddenHistory { trace: chain_trace });
    }
    let full = &(&pc * &chain) * &pc;
    let chained = (real_trace(&full)? / chain_trace).clamp(0.0, 1.0);
    let direct = real_trace(&(&(&pc * &pb) * &pc))?.clamp(0.0, 1.0);
    Ok((chained, direct))
}

/// An `N`-level system whose faces form an orthonormal basis, named
/// `f1 … fN`. All faces carry the same a priori probability `1/N`.
#[derive(Debug, Clone)]
pub struct QuantumDie {
    space: EventSpace,
}

/// Smallest number of faces a die can have.
pub const MIN_DIE_FACES: usize = 2;

/// Builds a die with standard-basis faces.
pub fn make_die(faces: usize) -> Result<QuantumDie> {
    if !(MIN_DIE_FACES..=MAX_DIMENSION).contains(&faces) {
        return Err(Error::DimensionOutOfRange {
            dim: faces,
            min: MIN_DIE_FACES,
            max: MAX_DIMENSION,
        });
    }
    let mut space = EventSpace::new(faces)?;
    for i in 0..faces {
        space.register(&format!("f{}", i + 1), Ray::standard_basis(faces, i))?;
    }
    Ok(QuantumDie { space })
}

impl QuantumDie {
    pub fn space(&self) -> &EventSpace {
        &self.space
    }

    pub fn faces(&self) -> usize {
        self.space.dimension()
    }

    /// Name of the 1-based face `i`.
    pub fn face_name(&self, i: usize) -> Result<String> {
        if i == 0 || i > self.faces() {
            return Err(Error::FaceIndexOutOfRange {
                index: i,
                faces: self.faces(),
            });
        }
        Ok(format!("f{i}"))
    }

    /// Absolute probability of throwing face `i` (1-based).
    pub fn face_probability(&self, i: usize) -> Result<ProbabilityResult> {
        let name = self.face_name(i)?;
        absolute_probability(&HistoryExpr::event(name), &self.space, Strictness::Strict)
    }

    /// Conditional probability of landing on the rotated face `U(f_j)`
    /// given that face `f_i` came out:
    /// `tr(P' P_fi P') / tr(P_fi)` with `P' = U P_fj U⁻¹`.
    pub fn rotated_face_probability(&self, i: usize, u: &Operator, j: usize) -> Result<f64> {
        let face_i = self.face_name(i)?;
        let face_j = self.face_name(j)?;
        if u.dim() != self.faces() {
            return Err(Error::DimensionMismatch {
                expected: self.faces(),
                got: u.dim(),
            });
        }
        let rotated = self.space.projector(&face_j)?.conjugated_by(u)?;
        let pi = self.space.projector(&face_i)?.into_op();
        let sandwich = &(rotated.op() * &pi) * rotated.op();
        let numerator = real_trace(&sandwich)?;
        let denominator = real_trace(&pi)?;
        Ok((numerator / denominator).clamp(0.0, 1.0))
    }
}

/// Validates that an operator normalized by [`actualize`] really is the
/// projector onto the given ray; mainly a test and report helper.
pub fn matches_event_projector(op: &Operator, space: &EventSpace, event: &str) -> Result<f64> {
    let expected = space.projector(event)?;
    Projector::try_from_operator(op.clone())
        .map_err(|_| Error::InternalConsistency {
            message: "actualized operator is not a projector".into(),
        })
        .map(|p| p.op().max_diff(expected.op()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn plane_space(events: &[(&str, f64)]) -> EventSpace {
        let mut space = EventSpace::new(2).unwrap();
        for (name, angle) in events {
            space.register(name, Ray::from_angle(*angle)).unwrap();
        }
        space
    }

    #[test]
    fn single_face_of_a_six_sided_die() {
        let die = make_die(6).unwrap();
        let p = die.face_probability(5).unwrap();
        assert!((p.value - 1.0 / 6.0).abs() < tol::ALGEBRAIC);
        assert_eq!(p.kind, ProbabilityKind::Absolute);
        assert!((p.numerator - 1.0).abs() < tol::ALGEBRAIC);
        assert!((p.denominator - 6.0).abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn die_fails_outside_supported_faces() {
        assert!(make_die(1).is_err());
        assert!(make_die(2).is_ok());
        assert!(make_die(64).is_ok());
        assert!(make_die(65).is_err());
    }

    #[test]
    fn face_probabilities_sum_to_one() {
        let die = make_die(6).unwrap();
        let total: f64 = (1..=6)
            .map(|i| die.face_probability(i).unwrap().value)
            .sum();
        assert!((total - 1.0).abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn two_face_die_is_a_fair_coin() {
        let die = make_die(2).unwrap();
        for i in 1..=2 {
            assert!((die.face_probability(i).unwrap().value - 0.5).abs() < tol::ALGEBRAIC);
        }
    }

    #[test]
    fn forbidden_transition_has_zero_probability() {
        let space = plane_space(&[("a", 0.0), ("abar", FRAC_PI_2)]);
        let p =
            absolute_probability(&parse("a & abar").unwrap(), &space, Strictness::Strict).unwrap();
        assert!(p.value < tol::ALGEBRAIC);
    }

    #[test]
    fn conditional_probability_is_the_born_value() {
        let space = plane_space(&[("a", 0.2), ("b", 0.2 + FRAC_PI_6)]);
        let p =
            conditional_probability(&parse("a & b").unwrap(), &space, Strictness::Strict).unwrap();
        assert!((p.value - FRAC_PI_6.cos().powi(2)).abs() < tol::ALGEBRAIC);
        assert_eq!(p.kind, ProbabilityKind::Conditional);
        assert!((p.value - p.raw()).abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn conditional_probability_of_staying_is_one() {
        let space = plane_space(&[("a", 0.2)]);
        let p =
            conditional_probability(&parse("a & a").unwrap(), &space, Strictness::Strict).unwrap();
        assert!((p.value - 1.0).abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn conditional_probability_rejects_alternative_start() {
        let space = plane_space(&[("a1", 0.0), ("a2", FRAC_PI_2), ("b", 0.4)]);
        let h = parse("(a1 | a2) & b").unwrap();
        assert_eq!(
            conditional_probability(&h, &space, Strictness::Strict).unwrap_err(),
            Error::AlternativeEndpoint
        );
    }

    #[test]
    fn absolute_probability_cross_checks_both_routes() {
        let space = plane_space(&[("a", 0.3), ("b", 0.8), ("c", 1.9)]);
        let p =
            absolute_probability(&parse("a & b & c").unwrap(), &space, Strictness::Strict).unwrap();
        let diff = p.cross_difference().expect("cross check expected");
        assert!(diff < tol::CROSS_REPRESENTATION);
    }

    #[test]
    fn actualize_two_event_history_gives_final_projector() {
        let space = plane_space(&[("a", 0.2), ("b", 0.9)]);
        let op = actualize(&parse("a & b").unwrap(), &space, Strictness::Strict).unwrap();
        let residual = matches_event_projector(&op, &space, "b").unwrap();
        assert!(residual < tol::PROPORTIONALITY);
    }

    #[test]
    fn actualize_staying_gives_own_projector() {
        let space = plane_space(&[("a", 0.2)]);
        let op = actualize(&parse("a & a").unwrap(), &space, Strictness::Strict).unwrap();
        assert!(op.max_diff(space.projector("a").unwrap().op()) < tol::PROPORTIONALITY);
    }

    #[test]
    fn actualize_rejects_forbidden_history() {
        let space = plane_space(&[("a", 0.0), ("abar", FRAC_PI_2)]);
        let err = actualize(&parse("a & abar").unwrap(), &space, Strictness::Strict).unwrap_err();
        assert!(matches!(err, Error::ForbiddenHistory { .. }));
    }

    #[test]
    fn memory_loss_at_thirty_degrees() {
        let space = plane_space(&[("a", 0.0), ("b", FRAC_PI_6), ("c", 2.0 * FRAC_PI_6)]);
        let (chained, direct) = memory_loss_check("a", "b", "c", &space).unwrap();
        let expected = FRAC_PI_6.cos().powi(2);
        assert!((chained - expected).abs() < tol::CROSS_REPRESENTATION);
        assert!((direct - expected).abs() < tol::CROSS_REPRESENTATION);
        assert!((chained - direct).abs() < tol::CROSS_REPRESENTATION);
    }

    #[test]
    fn memory_loss_with_coinciding_events() {
        let space = plane_space(&[("a", 0.3), ("b", 0.7)]);
        let (chained, direct) = memory_loss_check("a", "b", "b", &space).unwrap();
        assert!((chained - 1.0).abs() < tol::CROSS_REPRESENTATION);
        assert!((direct - 1.0).abs() < tol::CROSS_REPRESENTATION);
    }

    #[test]
    fn memory_loss_rejects_orthogonal_prefix() {
        let space = plane_space(&[("a", 0.0), ("abar", FRAC_PI_2), ("c", 0.4)]);
        assert!(matches!(
            memory_loss_check("a", "abar", "c", &space).unwrap_err(),
            Error::ForbiddenHistory { .. }
        ));
    }

    #[test]
    fn rotated_face_probability_identity_case() {
        let die = make_die(4).unwrap();
        let u = Operator::identity(4);
        for i in 1..=4 {
            assert!((die.rotated_face_probability(i, &u, i).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rotated_face_probability_is_cosine_squared() {
        let die = make_die(2).unwrap();
        for theta in [0.0, 0.3, FRAC_PI_3, 1.2, FRAC_PI_2] {
            let u = Operator::rotation_2d(theta);
            let p = die.rotated_face_probability(1, &u, 1).unwrap();
            assert!((p - theta.cos().powi(2)).abs() < tol::ALGEBRAIC);
        }
    }

    #[test]
    fn rotated_face_probabilities_resolve_unity() {
        let die = make_die(2).unwrap();
        let u = Operator::rotation_2d(0.77);
        let total: f64 = (1..=2)
            .map(|j| die.rotated_face_probability(1, &u, j).unwrap())
            .sum();
        assert!((total - 1.0).abs() < tol::CROSS_REPRESENTATION);
    }

    #[test]
    fn rotated_face_probability_rejects_bad_input() {
        let die = make_die(2).unwrap();
        assert!(matches!(
            die.rotated_face_probability(0, &Operator::identity(2), 1)
                .unwrap_err(),
            Error::FaceIndexOutOfRange { .. }
        ));
        assert!(matches!(
            die.rotated_face_probability(1, &Operator::identity(2), 3)
                .unwrap_err(),
            Error::FaceIndexOutOfRange { .. }
        ));
        let not_unitary = Operator::from_rows(&[
            vec![
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
            ],
            vec![
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
            ],
        ]);
        assert!(matches!(
            die.rotated_face_probability(1, &not_unitary, 1)
                .unwrap_err(),
            Error::NotUnitary { .. }
        ));
    }
}
