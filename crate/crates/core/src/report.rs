//! Pass/fail records shared by every verification routine.

use alloc::string::String;
use alloc::vec::Vec;

/// How `lhs` is compared with `rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// `lhs ≤ rhs + tolerance`.
    AtMost,
    /// `|lhs − rhs| ≤ tolerance`.
    Within,
}

impl Comparison {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::AtMost => "le",
            Comparison::Within => "close",
        }
    }
}

/// One verified property: `passed` holds exactly when the comparison does.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub detail: String,
}

impl Check {
    fn build(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, comparison: Comparison) -> Self {
        let passed = match comparison {
            Comparison::AtMost => lhs <= rhs + tolerance,
            Comparison::Within => (lhs - rhs).abs() <= tolerance,
        };
        Check { name: name.into(), passed, lhs, rhs, tolerance, comparison, detail: String::new() }
    }

    /// `lhs ≤ rhs + tolerance`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Check::build(name, lhs, rhs, tolerance, Comparison::AtMost)
    }

    /// `|lhs − rhs| ≤ tolerance`.
    pub fn close(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Check::build(name, lhs, rhs, tolerance, Comparison::Within)
    }

    /// Exact equality of two counts.
    pub fn count(name: impl Into<String>, lhs: u64, rhs: u64) -> Self {
        let mut c = Check::build(name, lhs as f64, rhs as f64, 0.0, Comparison::Within);
        c.passed = lhs == rhs;
        c
    }

    /// A boolean property recorded as `1 = 1` or `0 = 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::count(name, ok as u64, 1)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn failures(checks: &[Check]) -> Vec<&Check> {
    checks.iter().filter(|c| !c.passed).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Check::le("a", 1.0, 1.0, 0.0).passed);
        assert!(!Check::le("a", 1.1, 1.0, 0.05).passed);
        assert!(Check::close("b", 1.0, 1.05, 0.06).passed);
        assert!(!Check::close("b", f64::NAN, 1.0, 1.0).passed);
        assert!(!Check::count("c", 3, 4).passed);
        assert!(Check::holds("d", true).passed);
        let checks = [Check::holds("x", true), Check::holds("y", false)];
        assert!(!all_passed(&checks));
        assert_eq!(failures(&checks)[0].name, "y");
    }
}
