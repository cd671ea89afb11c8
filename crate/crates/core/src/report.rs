//! Verification report model shared by the CLI, the FFI and the tests.

use serde::{Deserialize, Serialize};

use crate::prob::Unit;

pub const REPORT_SCHEMA: &str = "fbregion.verify-report.v1";

/// How `lhs` and `rhs` of a record are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs + tolerance`; `gap = rhs − lhs`.
    AtMost,
    /// `|lhs − rhs| ≤ tolerance`; `gap = |lhs − rhs|`.
    Equal,
    /// `lhs > rhs + tolerance`; `gap = lhs − rhs`.
    Exceeds,
}

impl Relation {
    pub fn gap(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::AtMost => rhs - lhs,
            Relation::Equal => (lhs - rhs).abs(),
            Relation::Exceeds => lhs - rhs,
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        let gap = self.gap(lhs, rhs);
        match self {
            Relation::AtMost => gap >= -tolerance,
            Relation::Equal => gap <= tolerance,
            Relation::Exceeds => gap > tolerance,
        }
    }
}

/// One checked instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub construction: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Record {
    /// Compares in the working unit (nats), then stores values in `unit`.
    pub fn nats(
        index: usize,
        construction: String,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        unit: Unit,
    ) -> Self {
        let pass = relation.holds(lhs, rhs, tolerance);
        Self {
            index,
            construction,
            lhs: unit.from_nats(lhs),
            rhs: unit.from_nats(rhs),
            gap: unit.from_nats(relation.gap(lhs, rhs)),
            tolerance: unit.from_nats(tolerance),
            pass,
        }
    }
}

/// Records that share a claim and a relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    pub claim: String,
    pub relation: Relation,
    /// Diagnostic groups are reported but do not decide the suite outcome.
    pub diagnostic: bool,
    pub instances: usize,
    pub failures: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    pub records: Vec<Record>,
}

impl Group {
    pub fn new(name: &str, claim: &str, relation: Relation, diagnostic: bool, records: Vec<Record>) -> Self {
        let gaps = records.iter().map(|r| r.gap);
        let min_gap = gaps.clone().fold(f64::INFINITY, f64::min);
        let max_gap = gaps.fold(f64::NEG_INFINITY, f64::max);
        Self {
            name: name.into(),
            claim: claim.into(),
            relation,
            diagnostic,
            instances: records.len(),
            failures: records.iter().filter(|r| !r.pass).count(),
            min_gap: if records.is_empty() { 0.0 } else { min_gap },
            max_gap: if records.is_empty() { 0.0 } else { max_gap },
            records,
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub unit: Unit,
    /// Failures in non-diagnostic groups.
    pub failures: usize,
    pub pass: bool,
    pub groups: Vec<Group>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, unit: Unit, groups: Vec<Group>) -> Self {
        let failures = groups.iter().filter(|g| !g.diagnostic).map(|g| g.failures).sum();
        Self {
            schema: REPORT_SCHEMA.into(),
            suite: suite.into(),
            seed,
            unit,
            failures,
            pass: failures == 0,
            groups,
        }
    }

    pub fn group(&self, name: &str) -> Option<&Group> {
        self.groups.iter().find(|g| g.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::AtMost.holds(1.0, 1.0 - 1e-13, 1e-12));
        assert!(!Relation::AtMost.holds(1.0, 0.9, 1e-12));
        assert!(Relation::Equal.holds(1.0, 1.0 + 1e-13, 1e-12));
        assert!(Relation::Exceeds.holds(1.0, 0.5, 1e-9));
        assert!(!Relation::Exceeds.holds(1.0, 1.0, 1e-9));
    }

    #[test]
    fn diagnostic_groups_do_not_decide() {
        let bad = Record::nats(0, "x".into(), Relation::AtMost, 1.0, 0.0, 0.0, Unit::Nats);
        let report = SuiteReport::new(
            "demo",
            1,
            Unit::Nats,
            vec![Group::new("diag", "c", Relation::AtMost, true, vec![bad])],
        );
        assert!(report.pass);
        assert_eq!(report.groups[0].failures, 1);
    }
}
