//! Name-keyed registries of boxed strategy objects.

use crate::error::{Error, Result};

/// Anything that can live in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a strategy, replacing any previous one with the same name.
    pub fn register(&mut self, item: Box<T>) {
        let name = item.name();
        self.entries.retain(|e| e.name() != name);
        self.entries.push(item);
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown(format!("'{name}' (known: {})", self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Op: Named {
        fn apply(&self, x: f64) -> f64;
    }
    struct Double;
    impl Named for Double {
        fn name(&self) -> &'static str {
            "double"
        }
    }
    impl Op for Double {
        fn apply(&self, x: f64) -> f64 {
            2.0 * x
        }
    }

    #[test]
    fn lookup_and_unknown() {
        let mut r: Registry<dyn Op> = Registry::new();
        r.register(Box::new(Double));
        r.register(Box::new(Double));
        assert_eq!(r.len(), 1);
        assert_eq!(r.get("double").unwrap().apply(3.0), 6.0);
        assert!(matches!(r.get("triple"), Err(Error::Unknown(_))));
    }
}
