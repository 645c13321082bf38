//! Projector representation of histories.
//!
//! Each top-level slot of a history contributes an operator: `P_a` for a
//! single event, `P_b1 + P_b2 + …` for a group of alternatives. The
//! history operator is the palindromic sandwich
//!
//! ```text
//! Γ = Qn · … · Q2 · Q1 · Q2 · … · Qn
//! ```
//!
//! with the slots `Q1 … Qn` taken in history order, so `a & b & c`
//! yields `Pc·Pb·Pa·Pb·Pc`. Its trace is the degree of certainty of the
//! history, a real number in `[0, 1]` whenever the endpoints are single
//! events and every alternative group is orthogonal.

use crate::error::{Error, Result};
use crate::lang::{ElementaryPath, HistoryExpr};
use crate::linalg::Operator;
use crate::space::EventSpace;
use crate::tol;

/// How to treat alternative groups whose branches overlap. Alternatives
/// stand for mutually exclusive events, so their rays should be
/// orthogonal; lenient mode records a warning instead of failing, which
/// is useful for exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

/// A history together with its operator.
#[derive(Debug, Clone)]
pub struct HistoryOperator<'s> {
    gamma: Operator,
    history: HistoryExpr,
    space: &'s EventSpace,
    warnings: Vec<String>,
}

impl<'s> HistoryOperator<'s> {
    pub fn gamma(&self) -> &Operator {
        &self.gamma
    }

    pub fn into_gamma(self) -> Operator {
        self.gamma
    }

    pub fn history(&self) -> &HistoryExpr {
        &self.history
    }

    pub fn space(&self) -> &'s EventSpace {
        self.space
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The degree of certainty `λ = tr(Γ)`.
    ///
    /// The trace of a history operator is real; an imaginary residue
    /// beyond [`tol::TRACE_RESIDUE`] indicates a bug and is reported as
    /// an internal consistency failure. For histories with elementary
    /// endpoints and orthogonal alternatives the value is clamped to the
    /// reporting domain `[0, 1 + 1e-9]`; otherwise (an alternative at an
    /// endpoint, or overlapping alternatives admitted leniently) the raw
    /// trace is returned, since it may legitimately exceed 1.
    pub fn certainty(&self) -> Result<f64> {
        let tr = self.gamma.trace();
        if tr.im.abs() > tol::TRACE_RESIDUE {
            return Err(Error::InternalConsistency {
                message: format!("history operator trace has imaginary residue {:e}", tr.im),
            });
        }
        if self.history.has_elementary_endpoints() && self.warnings.is_empty() {
            Ok(tr.re.clamp(0.0, 1.0 + tol::CERTAINTY_SLACK))
        } else {
            Ok(tr.re)
        }
    }
}

/// Operator of a single slot: the projector of an event, or the sum of
/// branch projectors for a group of alternatives.
pub fn slot_operator(e: &HistoryExpr, space: &EventSpace) -> Result<Operator> {
    match e {
        HistoryExpr::Event(name) => Ok(space.projector(name)?.into_op()),
        HistoryExpr::Alt(branches) => {
            let mut sum = Operator::zeros(space.dimension());
            for branch in branches {
                match branch {
                    HistoryExpr::Event(name) => sum = &sum + space.projector(name)?.op(),
                    _ => return Err(Error::NestedSequenceInSlot),
                }
            }
            Ok(sum)
        }
        HistoryExpr::Seq(_) => Err(Error::NestedSequenceInSlot),
    }
}

fn check_alt_orthogonality(
    slot: &HistoryExpr,
    space: &EventSpace,
    strictness: Strictness,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let HistoryExpr::Alt(branches) = slot else {
        return Ok(());
    };
    for (i, left) in branches.iter().enumerate() {
        for right in &branches[i + 1..] {
            let (Some(ln), Some(rn)) = (left.event_name(), right.event_name()) else {
                // Non-event branches are reported by `slot_operator`.
                continue;
            };
            let overlap = space.ray(ln)?.inner(space.ray(rn)?)?.norm();
            if overlap > tol::VALIDATION {
                match strictness {
                    Strictness::Strict => {
                        return Err(Error::NonOrthogonalAlternatives {
                            left: ln.to_owned(),
                            right: rn.to_owned(),
                            overlap,
                        })
                    }
                    Strictness::Lenient => warnings.push(format!(
                        "alternatives '{ln}' and '{rn}' are not orthogonal (|\u{27e8}{ln}|{rn}\u{27e9}| = {overlap:.3e})"
                    )),
                }
            }
        }
    }
    Ok(())
}

/// Builds the history operator `Γ` for a history whose top-level slots
/// are events or alternative groups of events.
pub fn gamma_of<'s>(
    h: &HistoryExpr,
    space: &'s EventSpace,
    strictness: Strictness,
) -> Result<HistoryOperator<'s>> {
    let slots = h.slots();
    let mut ops = Vec::with_capacity(slots.len());
    let mut warnings = Vec::new();
    for slot in slots {
        ops.push(slot_operator(slot, space)?);
        check_alt_orthogonality(slot, space, strictness, &mut warnings)?;
    }
    let mut gamma = ops[0].clone();
    for q in &ops[1..] {
        gamma = &(q * &gamma) * q;
    }
    Ok(HistoryOperator {
        gamma,
        history: h.clone(),
        space,
        warnings,
    })
}

/// Degree of certainty of a history; shorthand for
/// [`gamma_of`]`(…)?.certainty()`.
pub fn certainty_of(h: &HistoryExpr, space: &EventSpace, strictness: Strictness) -> Result<f64> {
    gamma_of(h, space, strictness)?.certainty()
}

/// The history operator split into per-path contributions plus the
/// cross-term remainder.
#[derive(Debug, Clone)]
pub struct InterferenceSplit {
    /// One operator per elementary path, in expansion order.
    pub direct_terms: Vec<(ElementaryPath, Operator)>,
    /// `Γ(full) − Σ direct`: what separates the quantum history from the
    /// Boolean union of its paths.
    pub interference: Operator,
    pub warnings: Vec<String>,
}

/// Splits the operator of a history with alternatives into the sum of
/// its elementary-path operators plus an interference term. For the
/// two-slit history `a & (b1 | b2) & c` the interference term equals
/// `Pc·P_b1·Pa·P_b2·Pc + Pc·P_b2·Pa·P_b1·Pc`.
pub fn interference_split(
    h: &HistoryExpr,
    space: &EventSpace,
    strictness: Strictness,
) -> Result<InterferenceSplit> {
    if !h.has_elementary_endpoints() {
        return Err(Error::AlternativeEndpoint);
    }
    if !h.slots().iter().any(|s| matches!(s, HistoryExpr::Alt(_))) {
        return Err(Error::NoAlternatives);
    }
    let full = gamma_of(h, space, strictness)?;
    let mut sum = Operator::zeros(space.dimension());
    let mut direct_terms = Vec::new();
    for path in h.expand_paths() {
        let term = gamma_of(&path.to_history(), space, strictness)?.into_gamma();
        sum = &sum + &term;
        direct_terms.push((path, term));
    }
    let interference = full.gamma() - &sum;
    Ok(InterferenceSplit {
        direct_terms,
        interference,
        warnings: full.warnings,
    })
}
