//! Truth bounds and primary-state classification.

use std::fmt;

use thiserror::Error;

/// Bound crossings smaller than this are rounding noise, not contradictions.
pub const CONTRADICTION_TOLERANCE: f64 = 1e-9;

/// Default threshold of truth.
pub const DEFAULT_ALPHA: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("threshold of truth must satisfy 1/2 < alpha <= 1, got {0}")]
    Alpha(f64),
    #[error("bounds must lie in [0, 1], got ({0}, {1})")]
    Bounds(f64, f64),
    #[error("{0}")]
    Invalid(String),
}

/// A `[lower, upper]` pair over a truth value. `lower > upper` is allowed and
/// represents a contradiction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthBounds {
    pub lower: f64,
    pub upper: f64,
}

impl TruthBounds {
    pub const TRUE: TruthBounds = TruthBounds { lower: 1.0, upper: 1.0 };
    pub const FALSE: TruthBounds = TruthBounds { lower: 0.0, upper: 0.0 };
    pub const UNKNOWN: TruthBounds = TruthBounds { lower: 0.0, upper: 1.0 };

    pub fn new(lower: f64, upper: f64) -> Result<TruthBounds, ConfigError> {
        let ok = |v: f64| (0.0..=1.0).contains(&v);
        if ok(lower) && ok(upper) {
            Ok(TruthBounds { lower, upper })
        } else {
            Err(ConfigError::Bounds(lower, upper))
        }
    }

    /// A point value `v` as the degenerate interval `[v, v]`.
    pub fn exact(v: f64) -> TruthBounds {
        TruthBounds { lower: v, upper: v }
    }

    /// Bounds of `1 - x`.
    pub fn complement(self) -> TruthBounds {
        TruthBounds { lower: 1.0 - self.upper, upper: 1.0 - self.lower }
    }

    /// Intersection; may produce a crossed interval.
    pub fn tighten(self, other: TruthBounds) -> TruthBounds {
        TruthBounds { lower: self.lower.max(other.lower), upper: self.upper.min(other.upper) }
    }

    pub fn is_contradiction(self) -> bool {
        self.lower > self.upper + CONTRADICTION_TOLERANCE
    }

    /// `max(0, lower - upper)`.
    pub fn contradiction_amount(self) -> f64 {
        (self.lower - self.upper).max(0.0)
    }
}

impl fmt::Display for TruthBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} {:.4}", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimaryState {
    True,
    False,
    Unknown,
    Contradiction,
}

impl fmt::Display for PrimaryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimaryState::True => "TRUE",
            PrimaryState::False => "FALSE",
            PrimaryState::Unknown => "UNKNOWN",
            PrimaryState::Contradiction => "CONTRADICTION",
        })
    }
}

pub fn check_alpha(alpha: f64) -> Result<(), ConfigError> {
    if alpha > 0.5 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(ConfigError::Alpha(alpha))
    }
}

/// Maps bounds to one of the four primary states. Thresholds are closed:
/// `lower >= alpha` is true, `upper <= 1 - alpha` is false.
pub fn classify_state(b: TruthBounds, alpha: f64) -> Result<PrimaryState, ConfigError> {
    check_alpha(alpha)?;
    Ok(if b.is_contradiction() {
        PrimaryState::Contradiction
    } else if b.lower >= alpha {
        PrimaryState::True
    } else if b.upper <= 1.0 - alpha {
        PrimaryState::False
    } else {
        PrimaryState::Unknown
    })
}
