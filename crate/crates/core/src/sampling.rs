//! Random instances for property suites and self-checks.
//!
//! Rays are drawn isotropically (Gaussian components, normalized),
//! unitaries come from Gram-Schmidt over Gaussian matrices, and random
//! histories are built with orthonormal alternative groups and
//! elementary endpoints so that every generated instance satisfies the
//! contracts the projector/amplitude equivalence needs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::lang::HistoryExpr;
use crate::linalg::{Operator, Ray};
use crate::space::EventSpace;

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller keeps the generated stream independent of any
    // distribution crate's internals, so seeded runs stay reproducible.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
        .collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// A uniformly random ray.
pub fn random_ray<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ray {
    loop {
        let v = gaussian_vector(dim, rng);
        let n = norm(&v);
        if n > 1e-6 {
            return Ray::new(v.into_iter().map(|c| c / n).collect()).expect("normalized vector");
        }
    }
}

/// `count` mutually orthogonal random rays (`count <= dim`).
pub fn random_orthonormal_rays<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<Ray> {
    assert!(
        count <= dim,
        "cannot fit {count} orthogonal rays in dimension {dim}"
    );
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v = gaussian_vector(dim, rng);
        // Two projection passes; the second mops up rounding from the first.
        for _ in 0..2 {
            for u in &basis {
                let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= overlap * ui;
                }
            }
        }
        let n = norm(&v);
        if n < 1e-6 {
            continue;
        }
        basis.push(v.into_iter().map(|c| c / n).collect());
    }
    basis
        .into_iter()
        .map(|v| Ray::new(v).expect("normalized vector"))
        .collect()
}

/// A random unitary whose columns are an orthonormal set.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let columns = random_orthonormal_rays(dim, dim, rng);
    let mut u = Operator::zeros(dim);
    for (k, col) in columns.iter().enumerate() {
        for (i, &c) in col.components().iter().enumerate() {
            u.set(i, k, c);
        }
    }
    u
}

/// A random square matrix with Gaussian entries; handy as an
/// unstructured operator in algebraic identities.
pub fn random_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let mut m = Operator::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(
                i,
                j,
                Complex64::new(standard_normal(rng), standard_normal(rng)),
            );
        }
    }
    m
}

/// A history instance: the event space carrying all generated rays plus
/// the history referring to them.
#[derive(Debug, Clone)]
pub struct HistoryInstance {
    pub space: EventSpace,
    pub history: HistoryExpr,
}

/// Builds a random slot-form history: `slots` steps, elementary
/// endpoints, interior slots turning into alternative groups of
/// mutually orthogonal rays (up to `max_alt` branches) about half of
/// the time.
pub fn random_history_instance<R: Rng + ?Sized>(
    dim: usize,
    slots: usize,
    max_alt: usize,
    rng: &mut R,
) -> HistoryInstance {
    assert!(slots >= 1, "a history needs at least one slot");
    assert!(
        max_alt >= 2,
        "alternative groups need at least two branches"
    );
    let mut space = EventSpace::new(dim).expect("dimension in range");
    let mut steps = Vec::with_capacity(slots);
    for s in 0..slots {
        let interior = s > 0 && s + 1 < slots;
        let branches = if interior && dim >= 2 && rng.random_bool(0.5) {
            rng.random_range(2..=max_alt.min(dim))
        } else {
            1
        };
        if branches == 1 {
            let name = format!("e{s}");
            space
                .register(&name, random_ray(dim, rng))
                .expect("fresh name");
            steps.push(HistoryExpr::event(name));
        } else {
            let rays = random_orthonormal_rays(dim, branches, rng);
            let mut alts = Vec::with_capacity(branches);
            for (k, ray) in rays.into_iter().enumerate() {
                let name = format!("e{s}_{k}");
                space.register(&name, ray).expect("fresh name");
                alts.push(HistoryExpr::event(name));
            }
            steps.push(HistoryExpr::alt(alts));
        }
    }
    HistoryInstance {
        space,
        history: HistoryExpr::seq(steps),
    }
}

/// A random normal-form AST over a small name pool; purely structural,
/// for parser and transform properties.
pub fn random_ast<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, max_width: usize) -> HistoryExpr {
    const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    if max_depth == 0 || rng.random_bool(0.35) {
        return HistoryExpr::event(NAMES[rng.random_range(0..NAMES.len())]);
    }
    let width = rng.random_range(2..=max_width.max(2));
    let children = (0..width)
        .map(|_| random_ast(rng, max_depth - 1, max_width))
        .collect();
    if rng.random_bool(0.5) {
        HistoryExpr::seq(children)
    } else {
        HistoryExpr::alt(children)
    }
}
