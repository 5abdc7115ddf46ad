//! Reporting helpers for the acceptance suite in `tests/acceptance.rs`.
//!
//! A [`Criterion`] collects failed checks and a one-line summary, then prints
//! a single `PASS` or `FAIL` line followed by the individual failures.

use std::fmt;

#[derive(Debug, Clone, Default)]
pub struct Criterion {
    pub name: String,
    pub detail: String,
    failures: Vec<String>,
}

impl Criterion {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Records a failure when `ok` is false. The message is only built on
    /// failure.
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)?;
        for failure in &self.failures {
            write!(f, "\n    - {failure}")?;
        }
        Ok(())
    }
}

/// Prints every criterion and returns whether all of them passed.
pub fn report(criteria: &[Criterion]) -> bool {
    for c in criteria {
        println!("{c}");
    }
    let passed = criteria.iter().filter(|c| c.passed()).count();
    println!("{passed}/{} criteria passed", criteria.len());
    passed == criteria.len()
}
