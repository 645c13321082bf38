//! Dispatch of scenario queries onto the core evaluators. Every block
//! carries the inputs it was computed from, and whenever both
//! representations apply their values and absolute difference are
//! reported; a difference beyond tolerance marks the block as an
//! internal consistency failure.

use qhist_core::{
    absolute_probability, actualize, amplitude_of, closed_loops, conditional_probability, gamma_of,
    interference_split, memory_loss_check, render, tol, trace_via_amplitudes, Complex64,
    HistoryExpr, ProbabilityResult, Strictness,
};

use crate::report::{Block, ErrorClass, Table, Value};
use crate::scenario::{QueryKind, QuerySpec, Scenario, Target};

pub fn effective_strictness(query: &QuerySpec, global_lenient: bool) -> Strictness {
    if query.options.lenient.unwrap_or(global_lenient) {
        Strictness::Lenient
    } else {
        Strictness::Strict
    }
}

pub fn run_query(scenario: &Scenario, query: &QuerySpec, global_lenient: bool) -> Block {
    let title = format!("{} {}", query.kind.label(), query.target.describe());
    let strictness = effective_strictness(query, global_lenient);
    let block = match (query.kind, &query.target) {
        (QueryKind::MemoryCheck, Target::Events(names)) => {
            memory_check_block(scenario, &title, names)
        }
        (kind, Target::Name(name)) => {
            // Load-time validation guarantees the reference resolves.
            let history = scenario.history(name).expect("validated history name");
            history_query_block(scenario, kind, &title, history, strictness)
        }
        _ => Block::new(&title).fail(ErrorClass::Validation, "malformed query target"),
    };
    block.precision(query.options.precision)
}

fn memory_check_block(scenario: &Scenario, title: &str, names: &[String]) -> Block {
    let (a, b, c) = (&names[0], &names[1], &names[2]);
    let block = Block::new(title)
        .str("events", format!("{a}, {b}, {c}"))
        .str("chained_history", format!("({a} & {b}) & {c}"));
    match memory_loss_check(a, b, c, &scenario.space) {
        Ok((chained, direct)) => {
            let diff = (chained - direct).abs();
            let block = block
                .float("p_c_given_a_then_b", chained)
                .float("p_c_given_b", direct)
                .float("difference", diff);
            if diff > tol::CROSS_REPRESENTATION {
                block.fail(
                    ErrorClass::Internal,
                    format!("memory-loss values differ by {diff:e}"),
                )
            } else {
                block
            }
        }
        Err(e) => block.fail_with(&e),
    }
}

fn history_query_block(
    scenario: &Scenario,
    kind: QueryKind,
    title: &str,
    history: &HistoryExpr,
    strictness: Strictness,
) -> Block {
    let space = &scenario.space;
    let block = Block::new(title).str("history", render(history));
    match kind {
        QueryKind::Operator => match gamma_of(history, space, strictness) {
            Ok(ho) => {
                let trace = ho.gamma().trace();
                Block::new(title)
                    .str("history", render(history))
                    .warnings(ho.warnings())
                    .complex("trace", trace)
                    .bool("hermitian", ho.gamma().is_hermitian(tol::ALGEBRAIC))
                    .matrix("gamma", ho.into_gamma())
            }
            Err(e) => block.fail_with(&e),
        },
        QueryKind::Certainty => match gamma_of(history, space, strictness) {
            Ok(ho) => {
                let block = block.warnings(ho.warnings());
                match ho.certainty() {
                    Ok(lambda) => {
                        cross_checked(block.float("certainty", lambda), history, scenario, lambda)
                    }
                    Err(e) => block.fail_with(&e),
                }
            }
            Err(e) => block.fail_with(&e),
        },
        QueryKind::Amplitude => match amplitude_of(history, space) {
            Ok(amp) => block
                .complex("amplitude", amp.value)
                .float("modulus", amp.value.norm())
                .float("modulus_squared", amp.value.norm_sqr()),
            Err(e) => block.fail_with(&e),
        },
        QueryKind::AbsoluteProb => match absolute_probability(history, space, strictness) {
            Ok(p) => probability_fields(block, &p),
            Err(e) => block.fail_with(&e),
        },
        QueryKind::ConditionalProb => match conditional_probability(history, space, strictness) {
            Ok(p) => probability_fields(block, &p),
            Err(e) => block.fail_with(&e),
        },
        QueryKind::Interference => match interference_split(history, space, strictness) {
            Ok(split) => {
                let direct_total: f64 =
                    split.direct_terms.iter().map(|(_, op)| op.trace().re).sum();
                let rows: Vec<Vec<Value>> = split
                    .direct_terms
                    .iter()
                    .map(|(path, op)| {
                        vec![Value::Str(path.to_string()), Value::Float(op.trace().re)]
                    })
                    .collect();
                let itrace = split.interference.trace();
                let block = block
                    .warnings(&split.warnings)
                    .int("paths", split.direct_terms.len() as i64)
                    .table(
                        "direct terms",
                        Table {
                            columns: vec!["path".into(), "trace".into()],
                            rows,
                        },
                    )
                    .float("direct_trace_sum", direct_total)
                    .complex("interference_trace", itrace)
                    .float("interference_max_abs", split.interference.max_abs())
                    .matrix("interference", split.interference.clone());
                // The interference trace must equal the sum of the
                // crossed closed-loop amplitudes.
                match closed_loops(history, space) {
                    Ok(loops) => {
                        let cross: Complex64 = loops
                            .iter()
                            .filter(|l| l.kind == qhist_core::LoopKind::Interference)
                            .map(|l| l.amplitude)
                            .sum();
                        let gap = (cross - itrace).norm();
                        let block = block
                            .complex("interference_loop_sum", cross)
                            .float("loop_trace_difference", gap);
                        if gap > tol::ALGEBRAIC {
                            block.fail(
                                ErrorClass::Internal,
                                format!("interference trace and loop sum differ by {gap:e}"),
                            )
                        } else {
                            block
                        }
                    }
                    Err(e) => block.fail_with(&e),
                }
            }
            Err(e) => block.fail_with(&e),
        },
        QueryKind::Loops => match closed_loops(history, space) {
            Ok(loops) => {
                let rows: Vec<Vec<Value>> = loops
                    .iter()
                    .map(|l| {
                        vec![
                            Value::Str(l.forward.to_string()),
                            Value::Str(l.backward.to_string()),
                            Value::Complex(l.amplitude),
                            Value::Str(l.kind.label().into()),
                        ]
                    })
                    .collect();
                let total: Complex64 = loops.iter().map(|l| l.amplitude).sum();
                let direct: Complex64 = loops
                    .iter()
                    .filter(|l| l.kind == qhist_core::LoopKind::Direct)
                    .map(|l| l.amplitude)
                    .sum();
                let block = block
                    .int("loop_count", loops.len() as i64)
                    .table(
                        "loops",
                        Table {
                            columns: vec![
                                "forward".into(),
                                "backward".into(),
                                "amplitude".into(),
                                "kind".into(),
                            ],
                            rows,
                        },
                    )
                    .complex("loop_sum", total)
                    .complex("direct_sum", direct)
                    .complex("interference_sum", total - direct);
                cross_checked(block, history, scenario, total.re)
            }
            Err(e) => block.fail_with(&e),
        },
        QueryKind::Actualize => {
            match actualize(history, space, strictness) {
                Ok(op) => {
                    let last = history
                        .endpoints()
                        .1
                        .event_name()
                        .expect("elementary final");
                    let expected = space.projector(last).expect("registered event");
                    let residual = op.max_diff(expected.op());
                    let block = block
                        .str("final_event", last)
                        .float("projector_residual", residual)
                        .matrix("actualized", op);
                    if residual > tol::PROPORTIONALITY {
                        block.fail(
                        ErrorClass::Internal,
                        format!("actualized operator differs from the final projector by {residual:e}"),
                    )
                    } else {
                        block
                    }
                }
                Err(e) => block.fail_with(&e),
            }
        }
        QueryKind::MemoryCheck => unreachable!("handled by caller"),
    }
}

/// Adds the amplitude-route value and the absolute difference whenever
/// the identity applies (elementary endpoints); flags a gap beyond
/// tolerance as an internal failure.
fn cross_checked(
    block: Block,
    history: &HistoryExpr,
    scenario: &Scenario,
    projector_value: f64,
) -> Block {
    if !history.has_elementary_endpoints() {
        return block.str("amplitude_route", "not applicable (alternative endpoint)");
    }
    match trace_via_amplitudes(history, &scenario.space) {
        Ok(amp) => {
            let diff = (projector_value - amp).abs();
            let block = block
                .float("projector_route", projector_value)
                .float("amplitude_route", amp)
                .float("representation_difference", diff);
            if diff > tol::CROSS_REPRESENTATION {
                block.fail(
                    ErrorClass::Internal,
                    format!("representations differ by {diff:e}"),
                )
            } else {
                block
            }
        }
        Err(e) => block.fail_with(&e),
    }
}

fn probability_fields(block: Block, p: &ProbabilityResult) -> Block {
    let block = block
        .warnings(&p.warnings)
        .str(
            "kind",
            match p.kind {
                qhist_core::ProbabilityKind::Absolute => "absolute",
                qhist_core::ProbabilityKind::Conditional => "conditional",
            },
        )
        .float("probability", p.value)
        .float("numerator", p.numerator)
        .float("denominator", p.denominator);
    match (p.cross_check, p.cross_difference()) {
        (Some(amp), Some(diff)) => block
            .float("amplitude_route", amp)
            .float("representation_difference", diff),
        _ => block.str("amplitude_route", "not applicable (alternative endpoint)"),
    }
}
