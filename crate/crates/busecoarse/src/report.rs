use serde::{Deserialize, Serialize};

/// Outcome of a sampled property check. Sampling can refute a property or
/// support it; it never proves it, so `Pass` means "no violation found at
/// the stated tolerance" and reports say which samples were drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// Quantified verdict of a property check: the worst margin observed, how
/// many samples were drawn, and a counterexample when one was found.
/// Margins are oriented so that nonnegative (up to tolerance) means the
/// property held.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: CheckStatus,
    /// Worst (smallest) margin over all samples.
    pub margin: f64,
    pub samples: usize,
    /// Counterexample data when `status == Fail`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}
