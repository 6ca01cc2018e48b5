//! Line-by-line PASS/FAIL reporting for the acceptance criteria.

use std::time::Duration;

#[derive(Debug, Default)]
pub struct Report {
    failed: Vec<String>,
}

impl Report {
    /// Prints one line and records it when `pass` is false.
    pub fn line(&mut self, id: &str, what: &str, value: f64, tol: f64, pass: bool) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:<5} {what:<58} value={value:<12.6e} tol={tol:.1e}");
        if !pass {
            self.failed.push(format!("{id} {what}"));
        }
    }

    /// Passes when `|value| <= tol`.
    pub fn within(&mut self, id: &str, what: &str, value: f64, tol: f64) {
        self.line(id, what, value, tol, value.abs() <= tol);
    }

    pub fn timed(&mut self, id: &str, what: &str, elapsed: Duration, limit: Duration) {
        let secs = elapsed.as_secs_f64();
        self.line(id, what, secs, limit.as_secs_f64(), elapsed < limit);
    }

    pub fn failures(&self) -> &[String] {
        &self.failed
    }

    /// Prints the summary and exits nonzero if any line failed.
    pub fn finish(self) {
        if self.failed.is_empty() {
            println!("\nacceptance: all criteria pass");
            return;
        }
        println!("\nacceptance: {} failing line(s):", self.failed.len());
        for f in &self.failed {
            println!("  {f}");
        }
        std::process::exit(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_failures_only() {
        let mut r = Report::default();
        r.within("X", "ok", 0.5, 1.0);
        r.within("X", "bad", -2.0, 1.0);
        assert_eq!(r.failures(), ["X bad"]);
    }
}
