//! Name-keyed registries of interchangeable algorithm implementations.
//!
//! Root finders, germ builders, fixed-point counters and verification
//! checks all sit behind small traits; a `Registry` maps a stable name to a
//! boxed implementation so callers can pick one at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Box<T>>,
    order: Vec<&'static str>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Register an implementation under its own name. Re-registering a
    /// name replaces the previous entry but keeps its position.
    pub fn register(&mut self, item: Box<T>) -> &mut Self {
        let name = item.name();
        if self.entries.insert(name, item).is_none() {
            self.order.push(name);
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.order.join(", "),
            })
    }

    /// Names in registration order.
    pub fn names(&self) -> &[&'static str] {
        &self.order
    }

    /// Entries in registration order.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.order.iter().map(move |n| self.entries[n].as_ref())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello;
    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }

    struct Hi;
    impl Named for Hi {
        fn name(&self) -> &'static str {
            "hi"
        }
    }
    impl Greeter for Hi {
        fn greet(&self) -> String {
            "hi".into()
        }
    }

    #[test]
    fn lookup_by_name_and_unknown_names() {
        let mut r: Registry<dyn Greeter> = Registry::new("greeter");
        r.register(Box::new(Hi)).register(Box::new(Hello));
        assert_eq!(r.get("hello").unwrap().greet(), "hello");
        assert_eq!(r.names(), &["hi", "hello"]);
        match r.get("hey") {
            Err(Error::UnknownStrategy { kind, available, .. }) => {
                assert_eq!(kind, "greeter");
                assert_eq!(available, "hi, hello");
            }
            _ => panic!("expected an unknown-strategy error"),
        }
    }
}
