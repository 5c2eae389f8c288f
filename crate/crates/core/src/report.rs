//! Verdict/witness reports shared by all checkers.
//!
//! Failure witnesses are first-class data: every false verdict carries at
//! least one witness that can be re-evaluated against the same scene.

use serde::Serialize;

/// A witness attached to a verdict: points, directions, and measured values,
/// all serialized deterministically.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    pub kind: String,
    /// Points as (chart, coordinates as "p/q" strings).
    pub points: Vec<(usize, Vec<String>)>,
    /// Directions as (chart, coordinate vector as "p/q" strings).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directions: Vec<(usize, Vec<String>)>,
    /// Measured values (lengths, angles, parameters).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    pub note: String,
}

impl Witness {
    pub fn new(kind: &str, note: &str) -> Witness {
        Witness {
            kind: kind.to_string(),
            points: Vec::new(),
            directions: Vec::new(),
            values: Vec::new(),
            note: note.to_string(),
        }
    }

    pub fn with_point(mut self, chart: usize, p: &crate::exact::QVec) -> Witness {
        self.points
            .push((chart, p.0.iter().map(crate::exact::rat_str).collect()));
        self
    }

    pub fn with_direction(mut self, chart: usize, d: &crate::exact::QVec) -> Witness {
        self.directions
            .push((chart, d.0.iter().map(crate::exact::rat_str).collect()));
        self
    }

    pub fn with_value(mut self, v: f64) -> Witness {
        self.values.push(v);
        self
    }
}

/// Verdict plus reproducible witnesses for a single check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConvexityReport {
    pub verdict: bool,
    pub witnesses: Vec<Witness>,
    pub tolerance: f64,
}

impl ConvexityReport {
    pub fn pass() -> ConvexityReport {
        ConvexityReport {
            verdict: true,
            witnesses: Vec::new(),
            tolerance: crate::TOL,
        }
    }

    pub fn pass_with(witnesses: Vec<Witness>) -> ConvexityReport {
        ConvexityReport {
            verdict: true,
            witnesses,
            tolerance: crate::TOL,
        }
    }

    pub fn fail(witnesses: Vec<Witness>) -> ConvexityReport {
        debug_assert!(!witnesses.is_empty(), "failure verdicts carry a witness");
        ConvexityReport {
            verdict: false,
            witnesses,
            tolerance: crate::TOL,
        }
    }

    pub fn and(self, other: ConvexityReport) -> ConvexityReport {
        ConvexityReport {
            verdict: self.verdict && other.verdict,
            witnesses: {
                let mut w = self.witnesses;
                w.extend(other.witnesses);
                w
            },
            tolerance: self.tolerance.max(other.tolerance),
        }
    }
}
