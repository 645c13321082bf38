//! Built-in demonstrations: the three-polarizer chain, the two-slit
//! history with its interference decomposition, and the quantum die.
//! Each demo recomputes its numbers along both representations and
//! reports every difference, so a demo run doubles as a consistency
//! check.

use std::f64::consts::{FRAC_PI_2, PI};

use qhist_core::{
    certainty_of, closed_loops, gamma_of, interference_split, make_die, parse, render, tol,
    trace_via_amplitudes, Complex64, EventSpace, LoopKind, Operator, Ray, Strictness,
};

use crate::report::{Block, ErrorClass, Report, Table, Value};
use crate::scenario::CliFailure;

/// `(a & b) & abar`: two crossed polarizers with an intermediate one at
/// angle `theta`. The certainty is `cos²θ·sin²θ`, peaking at 1/4 for
/// `θ = π/4` and vanishing at both endpoints.
pub fn polarizer(theta: f64, sweep: Option<usize>) -> Result<Report, CliFailure> {
    if !theta.is_finite() {
        return Err(CliFailure::validation("theta must be finite"));
    }
    if let Some(steps) = sweep {
        if steps == 0 {
            return Err(CliFailure::validation("--sweep needs at least one step"));
        }
    }
    let mut report = Report::new("demo polarizer");
    report.meta.push(("theta".into(), Value::Float(theta)));

    let evaluate = |theta: f64| -> (f64, f64, f64) {
        let mut space = EventSpace::new(2).expect("dimension 2");
        space.register("a", Ray::from_angle(0.0)).unwrap();
        space.register("b", Ray::from_angle(theta)).unwrap();
        space.register("abar", Ray::from_angle(FRAC_PI_2)).unwrap();
        let h = parse("(a & b) & abar").unwrap();
        let lambda = certainty_of(&h, &space, Strictness::Strict).unwrap();
        let amp = trace_via_amplitudes(&h, &space).unwrap();
        let analytic = theta.cos().powi(2) * theta.sin().powi(2);
        (lambda, amp, analytic)
    };

    let (lambda, amp, analytic) = evaluate(theta);
    let mut block = Block::new("certainty")
        .str("history", "(a & b) & abar")
        .str("events", "a at 0, b at theta, abar at pi/2")
        .float("certainty", lambda)
        .float("amplitude_route", amp)
        .float("analytic_cos2_sin2", analytic)
        .float("representation_difference", (lambda - amp).abs())
        .float("analytic_difference", (lambda - analytic).abs());
    if (lambda - amp).abs() > tol::CROSS_REPRESENTATION {
        block = block.fail(
            ErrorClass::Internal,
            format!("representations differ by {:e}", (lambda - amp).abs()),
        );
    }
    report.push(block);

    if let Some(steps) = sweep {
        let rows: Vec<Vec<Value>> = (0..=steps)
            .map(|k| {
                let t = k as f64 * FRAC_PI_2 / steps as f64;
                let (l, _, a) = evaluate(t);
                vec![
                    Value::Float(t),
                    Value::Float(l),
                    Value::Float(a),
                    Value::Float((l - a).abs()),
                ]
            })
            .collect();
        report.push(Block::new("sweep").table(
            "certainty over theta in [0, pi/2]",
            Table {
                columns: vec![
                    "theta".into(),
                    "certainty".into(),
                    "analytic".into(),
                    "difference".into(),
                ],
                rows,
            },
        ));
    }
    Ok(report)
}

/// `a & (b1 | b2) & c` over a plane: the source ray `a`, two orthogonal
/// slit rays, and the screen ray `c`. Shows the operator decomposition
/// into the two through-one-slit terms plus the interference term, and
/// the four closed loops whose crossed pair carries `tr(I)`. With
/// `commuting` the source sits on the first slit and the interference
/// vanishes.
pub fn double_slit(commuting: bool) -> Result<Report, CliFailure> {
    let source_angle = if commuting { 0.0 } else { PI / 6.0 };
    let screen_angle = PI / 3.0;
    let mut space = EventSpace::new(2).expect("dimension 2");
    space.register("a", Ray::from_angle(source_angle)).unwrap();
    space.register("b1", Ray::from_angle(0.0)).unwrap();
    space.register("b2", Ray::from_angle(FRAC_PI_2)).unwrap();
    space.register("c", Ray::from_angle(screen_angle)).unwrap();
    let h = parse("a & (b1 | b2) & c").unwrap();

    let mut report = Report::new("demo double-slit");
    report.meta.push(("history".into(), Value::Str(render(&h))));
    report
        .meta
        .push(("source_angle".into(), Value::Float(source_angle)));
    report
        .meta
        .push(("screen_angle".into(), Value::Float(screen_angle)));
    report
        .meta
        .push(("commuting".into(), Value::Bool(commuting)));

    let full = gamma_of(&h, &space, Strictness::Strict)
        .map_err(|e| CliFailure::validation(e.to_string()))?;
    let split = interference_split(&h, &space, Strictness::Strict)
        .map_err(|e| CliFailure::validation(e.to_string()))?;

    // Independent cross-term operator from the explicit products, to
    // check the split rather than restate it.
    let pa = space.projector("a").unwrap().into_op();
    let p1 = space.projector("b1").unwrap().into_op();
    let p2 = space.projector("b2").unwrap().into_op();
    let pc = space.projector("c").unwrap().into_op();
    let cross = &(&(&(&pc * &p1) * &pa) * &p2) * &pc;
    let cross = &cross + &(&(&(&(&pc * &p2) * &pa) * &p1) * &pc);
    let mut reassembled = cross.clone();
    for (_, term) in &split.direct_terms {
        reassembled = &reassembled + term;
    }
    let residual = reassembled.max_diff(full.gamma());

    let rows: Vec<Vec<Value>> = split
        .direct_terms
        .iter()
        .map(|(path, op)| vec![Value::Str(path.to_string()), Value::Float(op.trace().re)])
        .collect();
    let direct_sum: f64 = split.direct_terms.iter().map(|(_, op)| op.trace().re).sum();
    let mut decomposition = Block::new("operator decomposition")
        .table(
            "direct terms",
            Table {
                columns: vec!["path".into(), "trace".into()],
                rows,
            },
        )
        .float("direct_trace_sum", direct_sum)
        .complex("interference_trace", split.interference.trace())
        .float("interference_max_abs", split.interference.max_abs())
        .float("reassembly_residual", residual)
        .matrix("gamma_full", full.gamma().clone())
        .matrix("interference", split.interference.clone());
    if residual > tol::ALGEBRAIC {
        decomposition = decomposition.fail(
            ErrorClass::Internal,
            format!("Γ differs from Γ₁ + Γ₂ + I by {residual:e}"),
        );
    }
    report.push(decomposition);

    let loops = closed_loops(&h, &space).unwrap();
    let loop_rows: Vec<Vec<Value>> = loops
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
    let loop_cross: Complex64 = loops
        .iter()
        .filter(|l| l.kind == LoopKind::Interference)
        .map(|l| l.amplitude)
        .sum();
    let gap = (loop_cross - split.interference.trace()).norm();
    let mut loop_block = Block::new("closed loops")
        .table(
            "loops",
            Table {
                columns: vec![
                    "forward".into(),
                    "backward".into(),
                    "amplitude".into(),
                    "kind".into(),
                ],
                rows: loop_rows,
            },
        )
        .complex("interference_loop_sum", loop_cross)
        .float("loop_trace_difference", gap);
    if gap > tol::ALGEBRAIC {
        loop_block = loop_block.fail(
            ErrorClass::Internal,
            format!("tr(I) and crossed loops differ by {gap:e}"),
        );
    }
    report.push(loop_block);

    let total = full.certainty().unwrap();
    let amp_total = trace_via_amplitudes(&h, &space).unwrap();
    let boolean_gap = (total - direct_sum).abs();
    let mut prob_block = Block::new("probabilities")
        .float("certainty", total)
        .float("amplitude_route", amp_total)
        .float("representation_difference", (total - amp_total).abs())
        .float("boolean_path_sum", direct_sum)
        .float("boolean_difference", boolean_gap);
    if (total - amp_total).abs() > tol::CROSS_REPRESENTATION {
        prob_block = prob_block.fail(
            ErrorClass::Internal,
            format!("representations differ by {:e}", (total - amp_total).abs()),
        );
    } else if commuting && boolean_gap > tol::ALGEBRAIC {
        prob_block = prob_block.fail(
            ErrorClass::Internal,
            format!("commuting case should be Boolean, gap {boolean_gap:e}"),
        );
    }
    report.push(prob_block);
    Ok(report)
}

/// `N`-face die: uniform face probabilities, plus conditional
/// probabilities against a basis rotated in the plane of the first two
/// faces when `rotate` is given.
pub fn die(faces: usize, rotate: Option<f64>) -> Result<Report, CliFailure> {
    let die = make_die(faces).map_err(|e| CliFailure::validation(e.to_string()))?;
    let mut report = Report::new("demo die");
    report.meta.push(("faces".into(), Value::Int(faces as i64)));

    let expected = 1.0 / faces as f64;
    let rows: Vec<Vec<Value>> = (1..=faces)
        .map(|i| {
            let p = die.face_probability(i).unwrap();
            vec![
                Value::Str(die.face_name(i).unwrap()),
                Value::Float(p.value),
                Value::Float(expected),
                Value::Float((p.value - expected).abs()),
            ]
        })
        .collect();
    let total: f64 = (1..=faces)
        .map(|i| die.face_probability(i).unwrap().value)
        .sum();
    report.push(
        Block::new("faces")
            .table(
                "absolute probabilities",
                Table {
                    columns: vec![
                        "face".into(),
                        "probability".into(),
                        "expected".into(),
                        "difference".into(),
                    ],
                    rows,
                },
            )
            .float("total", total),
    );

    if let Some(theta) = rotate {
        if !theta.is_finite() {
            return Err(CliFailure::validation("--rotate must be finite"));
        }
        let mut u = Operator::identity(faces);
        let (s, c) = theta.sin_cos();
        u.set(0, 0, Complex64::new(c, 0.0));
        u.set(0, 1, Complex64::new(s, 0.0));
        u.set(1, 0, Complex64::new(-s, 0.0));
        u.set(1, 1, Complex64::new(c, 0.0));

        let analytic = |j: usize| -> f64 {
            match j {
                1 => theta.cos().powi(2),
                2 => theta.sin().powi(2),
                _ => 0.0,
            }
        };
        let rows: Vec<Vec<Value>> = (1..=faces)
            .map(|j| {
                let p = die.rotated_face_probability(1, &u, j).unwrap();
                vec![
                    Value::Str(format!("R(f{j})")),
                    Value::Float(p),
                    Value::Float(analytic(j)),
                    Value::Float((p - analytic(j)).abs()),
                ]
            })
            .collect();
        let sum: f64 = (1..=faces)
            .map(|j| die.rotated_face_probability(1, &u, j).unwrap())
            .sum();
        let mut block = Block::new("rotated faces")
            .str(
                "description",
                "conditional probability of each rotated face given f1, \
                 with the first two axes rotated by theta",
            )
            .float("theta", theta)
            .table(
                "conditional probabilities",
                Table {
                    columns: vec![
                        "face".into(),
                        "probability".into(),
                        "analytic".into(),
                        "difference".into(),
                    ],
                    rows,
                },
            )
            .float("sum", sum)
            .float("sum_deviation", (sum - 1.0).abs());
        if (sum - 1.0).abs() > tol::CROSS_REPRESENTATION {
            block = block.fail(
                ErrorClass::Internal,
                format!("rotated probabilities sum to {sum}"),
            );
        }
        report.push(block);
    }
    Ok(report)
}
