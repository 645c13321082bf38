//! Amplitude representation of histories.
//!
//! An elementary path `a & b & c` carries the complex amplitude
//! `⟨a|b⟩·⟨b|c⟩` (product rule); a history with alternatives sums the
//! amplitudes of its expanded paths (sum rule). The probability-level
//! link to the projector representation is
//!
//! ```text
//! tr(Γ(γ)) = A(γ) · A(γ⁻¹)
//! ```
//!
//! where `γ⁻¹` is the reversed history. That identity only holds when
//! both endpoints are single events; for alternative endpoints the two
//! sides genuinely differ, so [`trace_via_amplitudes`] refuses them
//! rather than returning a silently wrong number.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lang::{ElementaryPath, HistoryExpr};
use crate::space::EventSpace;
use crate::tol;

/// Amplitude of a history, kept together with the history it came from.
#[derive(Debug, Clone)]
pub struct Amplitude {
    pub value: Complex64,
    pub history: HistoryExpr,
}

/// Product of consecutive brackets along a path; a single-event path has
/// the empty product 1.
pub fn path_amplitude(path: &ElementaryPath, space: &EventSpace) -> Result<Complex64> {
    for name in path.events() {
        space.ray(name)?;
    }
    let mut amp = Complex64::new(1.0, 0.0);
    for pair in path.events().windows(2) {
        amp *= space.ray(&pair[0])?.inner(space.ray(&pair[1])?)?;
    }
    Ok(amp)
}

/// Total amplitude of a history: sum of the amplitudes of its expanded
/// paths, in expansion order.
pub fn amplitude_of(h: &HistoryExpr, space: &EventSpace) -> Result<Amplitude> {
    let mut value = Complex64::new(0.0, 0.0);
    for path in h.expand_paths() {
        value += path_amplitude(&path, space)?;
    }
    Ok(Amplitude {
        value,
        history: h.clone(),
    })
}

/// The trace of the history operator computed entirely from amplitudes:
/// `A(γ)·A(γ⁻¹)`. Requires elementary endpoints; the result is real up
/// to [`tol::AMPLITUDE_RESIDUE`].
pub fn trace_via_amplitudes(h: &HistoryExpr, space: &EventSpace) -> Result<f64> {
    if !h.has_elementary_endpoints() {
        return Err(Error::AlternativeEndpoint);
    }
    let forward = amplitude_of(h, space)?.value;
    let backward = amplitude_of(&h.reversed(), space)?.value;
    let product = forward * backward;
    if product.im.abs() > tol::AMPLITUDE_RESIDUE {
        return Err(Error::InternalConsistency {
            message: format!(
                "amplitude-route trace has imaginary residue {:e}",
                product.im
            ),
        });
    }
    Ok(product.re)
}

/// Whether a closed loop returns along its own forward path or crosses
/// over to another one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    Direct,
    Interference,
}

impl LoopKind {
    pub fn label(self) -> &'static str {
        match self {
            LoopKind::Direct => "direct",
            LoopKind::Interference => "interference",
        }
    }
}

/// A forward path followed by a backward path returning to the start.
/// The backward path begins at the forward path's final event and ends
/// at its initial one, which is guaranteed by requiring elementary
/// endpoints.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub forward: ElementaryPath,
    pub backward: ElementaryPath,
    pub amplitude: Complex64,
    pub kind: LoopKind,
}

/// Enumerates every closed loop of a history: the full Cartesian product
/// of forward expansions and backward (reversed-history) expansions,
/// forward-major. Loop amplitudes sum to [`trace_via_amplitudes`]; the
/// loops flagged [`LoopKind::Interference`] sum to the trace of the
/// interference operator.
pub fn closed_loops(h: &HistoryExpr, space: &EventSpace) -> Result<Vec<ClosedLoop>> {
    if !h.has_elementary_endpoints() {
        return Err(Error::AlternativeEndpoint);
    }
    let forward_paths = h.expand_paths();
    let backward_paths = h.reversed().expand_paths();
    let mut loops = Vec::with_capacity(forward_paths.len() * backward_paths.len());
    for forward in &forward_paths {
        let forward_amp = path_amplitude(forward, space)?;
        let returned = forward.reversed();
        for backward in &backward_paths {
            let amplitude = forward_amp * path_amplitude(backward, space)?;
            let kind = if *backward == returned {
                LoopKind::Direct
            } else {
                LoopKind::Interference
            };
            loops.push(ClosedLoop {
                forward: forward.clone(),
                backward: backward.clone(),
                amplitude,
                kind,
            });
        }
    }
    Ok(loops)
}
