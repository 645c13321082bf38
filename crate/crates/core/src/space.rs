//! The event space: a dimension plus a registry of named rays.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{Projector, Ray, MAX_DIMENSION};

/// Sample space for histories: every event name maps to a ray of the
/// common dimension. Registration order is preserved so that reports
/// listing events are reproducible.
#[derive(Debug, Clone)]
pub struct EventSpace {
    dim: usize,
    names: Vec<String>,
    rays: Vec<Ray>,
    index: HashMap<String, usize>,
}

fn is_valid_event_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl EventSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIMENSION,
            });
        }
        Ok(Self {
            dim,
            names: Vec::new(),
            rays: Vec::new(),
            index: HashMap::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Registers a named event. Names must be grammar identifiers so
    /// that history expressions can refer to them.
    pub fn register(&mut self, name: &str, ray: Ray) -> Result<()> {
        if !is_valid_event_name(name) {
            return Err(Error::InvalidEventName { name: name.into() });
        }
        if self.index.contains_key(name) {
            return Err(Error::DuplicateEvent { name: name.into() });
        }
        if ray.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: ray.dim(),
            });
        }
        self.index.insert(name.to_owned(), self.names.len());
        self.names.push(name.to_owned());
        self.rays.push(ray);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn ray(&self, name: &str) -> Result<&Ray> {
        self.index
            .get(name)
            .map(|&i| &self.rays[i])
            .ok_or_else(|| Error::UnknownEvent { name: name.into() })
    }

    pub fn projector(&self, name: &str) -> Result<Projector> {
        Ok(self.ray(name)?.projector())
    }

    /// Events in registration order.
    pub fn events(&self) -> impl Iterator<Item = (&str, &Ray)> {
        self.names.iter().map(String::as_str).zip(self.rays.iter())
    }
}
