//! Reporting helpers for the acceptance gate in `tests/acceptance.rs`.
//!
//! Each check prints one line, `PASS` or `FAIL`, followed by the criterion
//! id, a short label and the measured value against its target.

use std::time::Instant;

pub struct Gate {
    filter: Vec<String>,
    passed: usize,
    failed: Vec<String>,
    start: Instant,
}

impl Gate {
    /// Criterion ids given on the command line restrict which groups run.
    pub fn from_args() -> Self {
        let filter = std::env::args()
            .skip(1)
            .filter(|a| !a.starts_with('-'))
            .map(|a| a.to_ascii_uppercase())
            .collect();
        Gate {
            filter,
            passed: 0,
            failed: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn wants(&self, id: &str) -> bool {
        self.filter.is_empty() || self.filter.iter().any(|f| f == id)
    }

    pub fn check(&mut self, id: &str, label: &str, pass: bool, detail: impl AsRef<str>) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag}  {id:<4} {label:<44} {}", detail.as_ref());
        if pass {
            self.passed += 1;
        } else {
            self.failed.push(format!("{id} {label}"));
        }
    }

    /// A measured value that is reported but not judged.
    pub fn info(&self, id: &str, label: &str, detail: impl AsRef<str>) {
        println!("INFO  {id:<4} {label:<44} {}", detail.as_ref());
    }

    /// `|got - target| <= tol`, reported with three decimals.
    pub fn within(&mut self, id: &str, label: &str, got: f64, target: f64, tol: f64) {
        let pass = (got - target).abs() <= tol;
        self.check(
            id,
            label,
            pass,
            format!("{got:.3} dB (target {target:.3} +/- {tol})"),
        );
    }

    /// Prints the summary and returns the process exit code.
    pub fn finish(self) -> i32 {
        let total = self.passed + self.failed.len();
        println!(
            "acceptance: {}/{} checks passed in {:.1} s",
            self.passed,
            total,
            self.start.elapsed().as_secs_f64()
        );
        for f in &self.failed {
            println!("  failed: {f}");
        }
        i32::from(!self.failed.is_empty())
    }
}
