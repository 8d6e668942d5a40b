use serde::Serialize;

/// Acceptance threshold for a claimed inequality `lhs <= rhs`.
///
/// An instance passes when `rhs - lhs >= -(relative * max(|lhs|, |rhs|) + absolute)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Tolerance {
    pub const DEFAULT_RELATIVE: f64 = 1e-9;

    pub fn relative(relative: f64) -> Self {
        Self {
            relative,
            absolute: 0.0,
        }
    }

    pub fn threshold(&self, lhs: f64, rhs: f64) -> f64 {
        self.relative * lhs.abs().max(rhs.abs()) + self.absolute
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::relative(Self::DEFAULT_RELATIVE)
    }
}

/// Evaluation of one inequality instance `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Set when the weight sits at an endpoint `ν ∈ {0, 1}`.
    pub degenerate: bool,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, tol: Tolerance) -> Self {
        let slack = rhs - lhs;
        let threshold = tol.threshold(lhs, rhs);
        Self {
            lhs,
            rhs,
            slack,
            threshold,
            pass: slack >= -threshold,
            degenerate: false,
        }
    }

    pub(crate) fn with_degenerate(mut self, degenerate: bool) -> Self {
        self.degenerate = degenerate;
        self
    }

    /// `slack / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub fn relative_slack(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.slack / scale
        }
    }
}

/// Which form of a displayed inequality to evaluate.
///
/// A few displays in the source material do not match what their proofs
/// establish. `Proof` evaluates the form the proof actually derives (and which
/// holds); `Displayed` evaluates the statement exactly as typeset, which is
/// useful only for exhibiting counterexamples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    #[default]
    Proof,
    Displayed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_within_threshold() {
        let tol = Tolerance::relative(1e-9);
        assert!(InequalityReport::new(1.0, 1.0, tol).pass);
        assert!(InequalityReport::new(1.0 + 5e-10, 1.0, tol).pass);
        assert!(!InequalityReport::new(1.0 + 5e-9, 1.0, tol).pass);
    }

    #[test]
    fn relative_slack_of_zero_sides() {
        let r = InequalityReport::new(0.0, 0.0, Tolerance::default());
        assert!(r.pass);
        assert_eq!(r.relative_slack(), 0.0);
    }
}
