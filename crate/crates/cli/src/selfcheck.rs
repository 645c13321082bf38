//! Seeded self-check: regenerates the randomized equivalence suites at
//! runtime so an installation can verify itself. Any deviation beyond
//! tolerance marks the block as an internal consistency failure (exit
//! code 4).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhist_core::sampling::{random_history_instance, random_orthonormal_rays, random_ray};
use qhist_core::{
    certainty_of, closed_loops, conditional_probability, gamma_of, parse, tol,
    trace_via_amplitudes, Complex64, EventSpace, Strictness,
};

use crate::report::{Block, ErrorClass, Report};
use crate::scenario::CliFailure;

fn suite_block(name: &str, cases: usize, tolerance: f64, worst: f64) -> Block {
    let block = Block::new(name)
        .int("cases", cases as i64)
        .float("max_deviation", worst)
        .float("tolerance", tolerance)
        .bool("pass", worst < tolerance);
    if worst < tolerance {
        block
    } else {
        block.fail(
            ErrorClass::Internal,
            format!("max deviation {worst:e} exceeds {tolerance:e}"),
        )
    }
}

pub fn run(seed: u64, cases: usize) -> Result<Report, CliFailure> {
    if cases == 0 {
        return Err(CliFailure::validation("--cases must be positive"));
    }
    let mut report = Report::new("selfcheck");
    report = report
        .meta_int("seed", seed as i64)
        .meta_int("cases", cases as i64);

    // Representation equivalence over random slot-form histories.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let dim = rng.random_range(2..=8);
        let slots = rng.random_range(2..=6);
        let inst = random_history_instance(dim, slots, 3, &mut rng);
        let via_gamma = certainty_of(&inst.history, &inst.space, Strictness::Strict)
            .map_err(|e| CliFailure::validation(e.to_string()))?;
        let via_amps = trace_via_amplitudes(&inst.history, &inst.space)
            .map_err(|e| CliFailure::validation(e.to_string()))?;
        worst = worst.max((via_gamma - via_amps).abs());
    }
    report.push(suite_block(
        "representation equivalence",
        cases,
        tol::CROSS_REPRESENTATION,
        worst,
    ));

    // Closed loops reassemble the amplitude-route trace.
    let loop_cases = cases.min(300);
    let mut worst = 0.0f64;
    for _ in 0..loop_cases {
        let dim = rng.random_range(2..=6);
        let slots = rng.random_range(2..=5);
        let inst = random_history_instance(dim, slots, 3, &mut rng);
        let loops = closed_loops(&inst.history, &inst.space)
            .map_err(|e| CliFailure::validation(e.to_string()))?;
        let total: Complex64 = loops.iter().map(|l| l.amplitude).sum();
        let trace = trace_via_amplitudes(&inst.history, &inst.space)
            .map_err(|e| CliFailure::validation(e.to_string()))?;
        worst = worst.max((total.re - trace).abs()).max(total.im.abs());
    }
    report.push(suite_block(
        "loop completeness",
        loop_cases,
        tol::ALGEBRAIC,
        worst,
    ));

    // The history operator is proportional to the final projector.
    let prop_cases = cases.min(300);
    let mut worst = 0.0f64;
    for _ in 0..prop_cases {
        let dim = rng.random_range(2..=8);
        let slots = rng.random_range(1..=6);
        let inst = random_history_instance(dim, slots, 3, &mut rng);
        let ho = gamma_of(&inst.history, &inst.space, Strictness::Strict)
            .map_err(|e| CliFailure::validation(e.to_string()))?;
        let last = inst.history.endpoints().1.event_name().expect("elementary");
        let pz = inst.space.projector(last).unwrap().into_op();
        worst = worst.max(ho.gamma().max_diff(&pz.scaled(ho.gamma().trace().re)));
    }
    report.push(suite_block(
        "final-event proportionality",
        prop_cases,
        tol::PROPORTIONALITY,
        worst,
    ));

    // Conditional probabilities over a random orthonormal basis sum to 1.
    let basis_cases = cases.min(50);
    let mut worst = 0.0f64;
    for _ in 0..basis_cases {
        let dim = rng.random_range(2..=8);
        let mut space = EventSpace::new(dim).unwrap();
        space.register("a", random_ray(dim, &mut rng)).unwrap();
        for (k, ray) in random_orthonormal_rays(dim, dim, &mut rng)
            .into_iter()
            .enumerate()
        {
            space.register(&format!("b{k}"), ray).unwrap();
        }
        let total: f64 = (0..dim)
            .map(|k| {
                conditional_probability(
                    &parse(&format!("a & b{k}")).unwrap(),
                    &space,
                    Strictness::Strict,
                )
                .unwrap()
                .value
            })
            .sum();
        worst = worst.max((total - 1.0).abs());
    }
    report.push(suite_block(
        "basis normalization",
        basis_cases,
        tol::CROSS_REPRESENTATION,
        worst,
    ));

    Ok(report)
}
