use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Binary NLI label. Non-entailment covers both contradiction and neutral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Entailment,
    NonEntailment,
}

/// A yes/no response to a polar question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
}

impl Label {
    /// Entailment corresponds to a yes response, non-entailment to no.
    pub fn answer(self) -> Answer {
        match self {
            Label::Entailment => Answer::Yes,
            Label::NonEntailment => Answer::No,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Entailment => "entailment",
            Label::NonEntailment => "non_entailment",
        }
    }
}

impl Answer {
    pub fn label(self) -> Label {
        match self {
            Answer::Yes => Label::Entailment,
            Answer::No => Label::NonEntailment,
        }
    }

    pub fn flip(self) -> Answer {
        match self {
            Answer::Yes => Answer::No,
            Answer::No => Answer::Yes,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Answer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "yes" => Ok(Answer::Yes),
            "no" => Ok(Answer::No),
            other => Err(format!("expected yes or no, got {other:?}")),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entailment" => Ok(Label::Entailment),
            "non_entailment" => Ok(Label::NonEntailment),
            other => Err(format!(
                "expected entailment or non_entailment, got {other:?}"
            )),
        }
    }
}
