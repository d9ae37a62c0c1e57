use serde::Serialize;

use crate::lift::Parity;

/// Direction of a numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Passes when the value is strictly below the threshold.
    Below,
    /// Passes when the value is at least the threshold.
    Above,
}

/// One named numerical check with its verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub bound: Bound,
    #[serde(skip)]
    pub pass: bool,
}

impl Check {
    /// A residual that must stay below `tol`. NaN fails.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::build(name.into(), value, tol, Bound::Below, value < tol)
    }

    /// A figure of merit that must reach `threshold`. NaN fails.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::build(name.into(), value, threshold, Bound::Above, value >= threshold)
    }

    fn build(name: String, value: f64, threshold: f64, bound: Bound, pass: bool) -> Self {
        Check { name, status: if pass { "PASS" } else { "FAIL" }, value, threshold, bound, pass }
    }
}

/// Output of the `check` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub instance: String,
    pub connexion: String,
    pub parity: Option<Parity>,
    pub seed: u64,
    pub cutoff: [usize; 2],
    pub ladder: Vec<[usize; 2]>,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// One rung of a norm ladder.
#[derive(Debug, Clone, Serialize)]
pub struct Rung {
    pub k: usize,
    pub m: usize,
    pub norm: f64,
}

/// Output of the `norm1` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub instance: String,
    pub rungs: Vec<Rung>,
    pub variation: f64,
    pub tolerance: f64,
    pub status: &'static str,
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes rows as CSV, preceded by a `#` comment line.
pub fn to_csv(comment: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv");
    format!("# {comment}\n{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(Check::below("a", 1e-10, 1e-9).pass);
        assert!(!Check::below("a", 1e-9, 1e-9).pass);
        assert!(!Check::below("a", f64::NAN, 1.0).pass);
        assert!(Check::above("b", 12.0, 12.0).pass);
        assert!(!Check::above("b", f64::NAN, 1.0).pass);
        assert_eq!(Check::above("b", 3.0, 12.0).status, "FAIL");
    }

    #[test]
    fn csv_layout() {
        let s = to_csv("k=1", &["t", "trace"], &[vec!["0.5".into(), "2".into()]]);
        assert_eq!(s, "# k=1\nt,trace\n0.5,2\n");
    }
}
