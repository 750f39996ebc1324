//! Verdict reports shared by the condition, geometry and weight checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::geometry::Point;
use crate::scalar::Real;

/// Number of witnesses retained per report.
pub const MAX_WITNESSES: usize = 32;

/// Which inequality a report is about.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Condition {
    A0,
    A1,
    A1Omega,
    A2,
    AInc,
    ADec,
    Equivalence,
    QuasiConvex,
    EpsDelta,
    MuckenhouptA1,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::A0 => "a0",
            Condition::A1 => "a1",
            Condition::A1Omega => "a1omega",
            Condition::A2 => "a2",
            Condition::AInc => "ainc",
            Condition::ADec => "adec",
            Condition::Equivalence => "equivalence",
            Condition::QuasiConvex => "quasi_convex",
            Condition::EpsDelta => "eps_delta",
            Condition::MuckenhouptA1 => "muckenhoupt_a1",
        }
    }

    /// β-type conditions report a constant in (0, 1]; the rest report L >= 1.
    pub fn is_beta_type(&self) -> bool {
        matches!(
            self,
            Condition::A0 | Condition::A1 | Condition::A1Omega | Condition::A2 | Condition::EpsDelta
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A sample at which the checked inequality `lhs <= rhs` fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness<T> {
    pub x: Point<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Point<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<T>,
    /// Second parameter value, e.g. the smaller `s` of an (aInc)/(aDec) pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<T>,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> Witness<T> {
    /// Violation size used for ranking: `ln(lhs / rhs)` when both are
    /// positive, otherwise `lhs - rhs`.
    pub fn severity(&self) -> f64 {
        let (l, r) = (self.lhs.as_f64(), self.rhs.as_f64());
        if l > 0.0 && r > 0.0 {
            (l / r).ln()
        } else {
            l - r
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleCounts {
    pub points: usize,
    pub pairs: usize,
    pub balls: usize,
    pub t_values: usize,
    pub evaluations: usize,
}

/// Outcome of one structural check on a finite sample set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport<T> {
    pub condition: Condition,
    pub parameters: BTreeMap<String, f64>,
    pub verdict: bool,
    /// Constant under test (β or L).
    pub tested_constant: T,
    /// Best constant certified by the samples: the largest β, or the
    /// smallest L, for which no sample fails.
    pub best_constant: T,
    pub witnesses: Vec<Witness<T>>,
    pub samples: SampleCounts,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl<T: Real> ConditionReport<T> {
    pub fn param(&self, key: &str) -> Option<f64> {
        self.parameters.get(key).copied()
    }
}

/// Accumulates witnesses and the best constant while a check runs.
#[derive(Debug)]
pub(crate) struct ReportBuilder<T> {
    condition: Condition,
    parameters: BTreeMap<String, f64>,
    tested: T,
    best: T,
    failures: usize,
    witnesses: Vec<Witness<T>>,
    pub samples: SampleCounts,
    warnings: Vec<String>,
}

impl<T: Real> ReportBuilder<T> {
    pub fn new(condition: Condition, tested: T) -> Self {
        Self {
            condition,
            parameters: BTreeMap::new(),
            tested,
            best: T::one(),
            failures: 0,
            witnesses: Vec::new(),
            samples: SampleCounts::default(),
            warnings: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.parameters.insert(key.to_string(), v);
        self
    }

    /// Folds in the constant needed by one sample: the largest admissible β
    /// (minimum is kept) or the smallest admissible L (maximum is kept).
    pub fn constant(&mut self, c: T) {
        if c.is_nan() {
            return;
        }
        if self.condition.is_beta_type() {
            self.best = self.best.min(c);
        } else {
            self.best = self.best.max(c);
        }
    }

    pub fn fail(&mut self, w: Witness<T>) {
        self.failures += 1;
        self.witnesses.push(w);
        if self.witnesses.len() > 4 * MAX_WITNESSES {
            self.trim();
        }
    }

    pub fn warn(&mut self, msg: String) {
        if self.warnings.len() < MAX_WITNESSES {
            self.warnings.push(msg);
        }
    }

    fn trim(&mut self) {
        self.witnesses.sort_by(|a, b| {
            b.severity()
                .total_cmp(&a.severity())
                .then(a.x.lex_cmp(&b.x))
                .then_with(|| match (&a.y, &b.y) {
                    (Some(p), Some(q)) => p.lex_cmp(q),
                    _ => std::cmp::Ordering::Equal,
                })
                .then_with(|| match (&a.t, &b.t) {
                    (Some(p), Some(q)) => p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal),
                    _ => std::cmp::Ordering::Equal,
                })
        });
        self.witnesses.truncate(MAX_WITNESSES);
    }

    pub fn finish(mut self) -> ConditionReport<T> {
        self.trim();
        ConditionReport {
            condition: self.condition,
            parameters: self.parameters,
            verdict: self.failures == 0,
            tested_constant: self.tested,
            best_constant: self.best,
            witnesses: self.witnesses,
            samples: self.samples,
            warnings: self.warnings,
        }
    }
}

/// `lhs <= rhs` up to a relative tolerance.
#[inline]
pub(crate) fn le_tol<T: Real>(lhs: T, rhs: T, rtol: T) -> bool {
    lhs <= rhs + rtol * rhs.abs().max(lhs.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_keeps_worst_witnesses_deterministically() {
        let mut b = ReportBuilder::<f64>::new(Condition::A1, 0.5);
        for i in 0..500 {
            b.fail(Witness {
                x: Point(i as f64, 0.0),
                y: None,
                t: None,
                s: None,
                lhs: 1.0 + (i % 17) as f64,
                rhs: 1.0,
            });
            b.constant(1.0 / (1.0 + (i % 17) as f64));
        }
        let r = b.finish();
        assert!(!r.verdict);
        assert_eq!(r.witnesses.len(), MAX_WITNESSES);
        assert!(r.witnesses.windows(2).all(|w| w[0].severity() >= w[1].severity()));
        assert_eq!(r.witnesses.iter().filter(|w| w.lhs == 17.0).count(), 29);
        assert_eq!(r.witnesses[0].x, Point(16.0, 0.0));
        assert!((r.best_constant - 1.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let r = ReportBuilder::<f64>::new(Condition::ADec, 1.0)
            .param("q", 2.0)
            .finish();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["condition"], "adec");
        assert_eq!(v["verdict"], true);
        assert_eq!(v["parameters"]["q"], 2.0);
        assert!(v.get("warnings").is_none());
    }
}
