use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Configuration;

/// The selection strategies the toolkit implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    None,
    All,
    Random,
    MaxScore,
    SLoo,
    TLoo,
    Css,
    Cbrs,
    Exhaustive,
}

impl Strategy {
    pub const ALL: [Strategy; 9] = [
        Strategy::None,
        Strategy::All,
        Strategy::Random,
        Strategy::MaxScore,
        Strategy::SLoo,
        Strategy::TLoo,
        Strategy::Css,
        Strategy::Cbrs,
        Strategy::Exhaustive,
    ];

    /// Kebab-case name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::All => "all",
            Strategy::Random => "random",
            Strategy::MaxScore => "max-score",
            Strategy::SLoo => "s-loo",
            Strategy::TLoo => "t-loo",
            Strategy::Css => "css",
            Strategy::Cbrs => "cbrs",
            Strategy::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|st| st.cli_name() == s || st.cli_name().replace('-', "_") == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

/// The result of running one selection strategy on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub problem_id: String,
    pub strategy: Strategy,
    pub selected: Configuration,
    /// Pooled accuracy of `selected` in the table the decision was made on.
    /// `None` means the chosen configuration has not been evaluated yet
    /// (possible for the random and LOO-pruning strategies, which may pick
    /// a subset outside the measured cells).
    pub est_accuracy: Option<f64>,
    /// Distinct provider evaluations this selection requested.
    pub evaluations_requested: u64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}
