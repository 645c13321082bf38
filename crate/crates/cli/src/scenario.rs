//! Scenario files: a JSON document declaring a dimension, named events,
//! named histories and a list of queries.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "events": {
//!     "a":    { "angle": 0.0 },
//!     "b":    { "angle": 0.7853981633974483 },
//!     "abar": { "basis": 2 },
//!     "c":    { "components": [[0.6, 0.0], [0.8, 0.0]] }
//!   },
//!   "histories": { "pol": "(a & b) & abar" },
//!   "queries": [ { "kind": "certainty", "target": "pol" } ]
//! }
//! ```
//!
//! Ray specifications take exactly one of `components` (pairs of
//! `[re, im]`), `angle` (dimension 2 only) or `basis` (1-based index of
//! a standard basis vector). Everything is validated up front: rays
//! must normalize, history strings must parse, and every query
//! reference must resolve.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use qhist_core::{parse, Complex64, EventSpace, HistoryExpr, Ray};

use crate::report::ErrorClass;

/// A failure before or during command execution, tagged with the class
/// that decides the process exit code.
#[derive(Debug, Clone)]
pub struct CliFailure {
    pub class: ErrorClass,
    pub message: String,
}

impl CliFailure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Validation,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    dimension: usize,
    #[serde(default)]
    events: BTreeMap<String, RaySpec>,
    #[serde(default)]
    histories: BTreeMap<String, String>,
    #[serde(default)]
    queries: Vec<QuerySpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RaySpec {
    #[serde(default)]
    components: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    angle: Option<f64>,
    #[serde(default)]
    basis: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Operator,
    Certainty,
    Amplitude,
    AbsoluteProb,
    ConditionalProb,
    Interference,
    Loops,
    Actualize,
    MemoryCheck,
}

impl QueryKind {
    pub fn label(self) -> &'static str {
        match self {
            QueryKind::Operator => "operator",
            QueryKind::Certainty => "certainty",
            QueryKind::Amplitude => "amplitude",
            QueryKind::AbsoluteProb => "absolute_prob",
            QueryKind::ConditionalProb => "conditional_prob",
            QueryKind::Interference => "interference",
            QueryKind::Loops => "loops",
            QueryKind::Actualize => "actualize",
            QueryKind::MemoryCheck => "memory_check",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Name(String),
    Events(Vec<String>),
}

impl Target {
    pub fn describe(&self) -> String {
        match self {
            Target::Name(n) => n.clone(),
            Target::Events(names) => format!("[{}]", names.join(", ")),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryOptions {
    #[serde(default)]
    pub lenient: Option<bool>,
    #[serde(default)]
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub kind: QueryKind,
    pub target: Target,
    #[serde(default)]
    pub options: QueryOptions,
}

/// A fully validated scenario: all events registered, all histories
/// parsed, all query references resolved.
pub struct Scenario {
    pub space: EventSpace,
    pub histories: Vec<(String, HistoryExpr)>,
    pub history_index: HashMap<String, usize>,
    pub queries: Vec<QuerySpec>,
}

impl Scenario {
    pub fn history(&self, name: &str) -> Option<&HistoryExpr> {
        self.history_index.get(name).map(|&i| &self.histories[i].1)
    }
}

fn build_ray(name: &str, spec: &RaySpec, dim: usize) -> Result<Ray, CliFailure> {
    let chosen = [
        spec.components.is_some(),
        spec.angle.is_some(),
        spec.basis.is_some(),
    ]
    .iter()
    .filter(|&&x| x)
    .count();
    if chosen != 1 {
        return Err(CliFailure::validation(format!(
            "event '{name}': exactly one of \"components\", \"angle\" or \"basis\" is required"
        )));
    }
    if let Some(components) = &spec.components {
        if components.len() != dim {
            return Err(CliFailure::validation(format!(
                "event '{name}': {} components given, dimension is {dim}",
                components.len()
            )));
        }
        let v = components
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        return Ray::new(v).map_err(|e| CliFailure::validation(format!("event '{name}': {e}")));
    }
    if let Some(angle) = spec.angle {
        if dim != 2 {
            return Err(CliFailure::validation(format!(
                "event '{name}': \"angle\" is only defined for dimension 2 (dimension is {dim})"
            )));
        }
        if !angle.is_finite() {
            return Err(CliFailure::validation(format!(
                "event '{name}': angle must be finite"
            )));
        }
        return Ok(Ray::from_angle(angle));
    }
    let basis = spec.basis.unwrap();
    if basis == 0 || basis > dim {
        return Err(CliFailure::validation(format!(
            "event '{name}': basis index {basis} out of range 1..={dim}"
        )));
    }
    Ok(Ray::standard_basis(dim, basis - 1))
}

fn referenced_events(h: &HistoryExpr, into: &mut Vec<String>) {
    match h {
        HistoryExpr::Event(name) => into.push(name.clone()),
        HistoryExpr::Seq(children) | HistoryExpr::Alt(children) => {
            for c in children {
                referenced_events(c, into);
            }
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliFailure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliFailure::validation(format!("cannot read scenario '{}': {e}", path.display()))
    })?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliFailure::validation(format!("scenario schema error: {e}")))?;

    let mut space =
        EventSpace::new(file.dimension).map_err(|e| CliFailure::validation(e.to_string()))?;
    for (name, spec) in &file.events {
        let ray = build_ray(name, spec, file.dimension)?;
        space
            .register(name, ray)
            .map_err(|e| CliFailure::validation(format!("event '{name}': {e}")))?;
    }

    let mut histories = Vec::new();
    let mut history_index = HashMap::new();
    for (name, text) in &file.histories {
        let expr =
            parse(text).map_err(|e| CliFailure::validation(format!("history '{name}': {e}")))?;
        let mut refs = Vec::new();
        referenced_events(&expr, &mut refs);
        for event in refs {
            if !space.contains(&event) {
                return Err(CliFailure::validation(format!(
                    "history '{name}': unknown event '{event}'"
                )));
            }
        }
        history_index.insert(name.clone(), histories.len());
        histories.push((name.clone(), expr));
    }

    for (i, query) in file.queries.iter().enumerate() {
        let at = format!("query #{} ({})", i + 1, query.kind.label());
        match (query.kind, &query.target) {
            (QueryKind::MemoryCheck, Target::Events(names)) => {
                if names.len() != 3 {
                    return Err(CliFailure::validation(format!(
                        "{at}: memory_check takes exactly three event names, got {}",
                        names.len()
                    )));
                }
                for event in names {
                    if !space.contains(event) {
                        return Err(CliFailure::validation(format!(
                            "{at}: unknown event '{event}'"
                        )));
                    }
                }
            }
            (QueryKind::MemoryCheck, Target::Name(_)) => {
                return Err(CliFailure::validation(format!(
                    "{at}: memory_check takes a three-event tuple target"
                )));
            }
            (_, Target::Name(name)) => {
                if !history_index.contains_key(name) {
                    return Err(CliFailure::validation(format!(
                        "{at}: unknown history '{name}'"
                    )));
                }
            }
            (_, Target::Events(_)) => {
                return Err(CliFailure::validation(format!(
                    "{at}: this query kind takes a history name target"
                )));
            }
        }
    }

    Ok(Scenario {
        space,
        histories,
        history_index,
        queries: file.queries,
    })
}
