//! Candidate premise generation and triage.
//!
//! Candidates come either from a chat-completion endpoint or from a premise
//! bank file. Either way each sentence is checked against the lexicon and the
//! construction's plausible pattern and given a review status.

mod client;
mod prompt;

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constructions::{analyze_premise, Construction, PremiseIssue};
use crate::lexicon::Lexicon;

pub use client::{fetch_candidates, Completion, EndpointConfig, API_KEY_VAR};
pub use prompt::{build_prompt, construction_name, positions, PromptSpec};

#[derive(Debug, thiserror::Error)]
pub enum SeederError {
    #[error("prompt needs at least one verb")]
    EmptyVerbList,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("authentication failed with status {0}")]
    Auth(u16),
    #[error("request failed: {0}")]
    Http(String),
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("malformed response body: {0}")]
    MalformedResponse(String),
    #[error("no sentences found in model output: {raw:?}")]
    NoSentences { raw: String },
    #[error("{path}:{line}: {message}")]
    Bank {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewStatus {
    AutoAccepted,
    NeedsReview,
    Rejected,
}

impl ReviewStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ReviewStatus::AutoAccepted => "auto_accepted",
            ReviewStatus::NeedsReview => "needs_review",
            ReviewStatus::Rejected => "rejected",
        }
    }
}

impl fmt::Display for ReviewStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePremise {
    pub text: String,
    pub construction: Construction,
    pub verb: String,
    pub review_status: ReviewStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

/// Splits model output into candidate sentences. Numbering ("1.", "2)", "-")
/// is stripped and only lines ending in "." are kept.
pub fn parse_candidates(raw: &str) -> Result<Vec<String>, SeederError> {
    let normalized = raw.replace("\r\n", "\n").replace('\r', "\n");
    let out: Vec<String> = normalized
        .lines()
        .map(strip_numbering)
        .map(str::trim)
        .filter(|l| l.len() > 1 && l.ends_with('.'))
        .map(str::to_owned)
        .collect();
    if out.is_empty() {
        return Err(SeederError::NoSentences {
            raw: raw.to_owned(),
        });
    }
    Ok(out)
}

fn strip_numbering(line: &str) -> &str {
    let t = line.trim_start();
    let t = t.strip_prefix(['-', '*', '•']).unwrap_or(t);
    let digits = t.len() - t.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 {
        let rest = &t[digits..];
        if let Some(r) = rest.strip_prefix(['.', ')', ':']) {
            return r;
        }
    }
    t
}

/// Checks a sentence against `construction`'s plausible pattern. Unknown
/// nouns leave the candidate for a human; every other issue rejects it.
pub fn validate_premise(text: &str, construction: Construction, lex: &Lexicon) -> CandidatePremise {
    let (frame, issues) = analyze_premise(text, construction, lex);
    let review_status = if issues.is_empty() {
        ReviewStatus::AutoAccepted
    } else if issues.iter().all(PremiseIssue::is_soft) {
        ReviewStatus::NeedsReview
    } else {
        ReviewStatus::Rejected
    };
    CandidatePremise {
        text: text.trim().to_owned(),
        construction,
        verb: frame
            .map(|f| f.verb.lemma)
            .or_else(|| guess_verb(text, construction, lex))
            .unwrap_or_default(),
        review_status,
        reasons: issues.iter().map(ToString::to_string).collect(),
    }
}

fn guess_verb(text: &str, construction: Construction, lex: &Lexicon) -> Option<String> {
    let lowered = text.to_lowercase();
    lowered.split(|c: char| !c.is_alphabetic()).find_map(|t| {
        lex.verbs_in(construction.verb_class())
            .find(|v| v.past == t || v.participle == t)
            .map(|v| v.lemma.clone())
    })
}

/// Re-validates every entry of a bank, keeping its text and construction.
pub fn revalidate(bank: &[CandidatePremise], lex: &Lexicon) -> Vec<CandidatePremise> {
    bank.iter()
        .map(|c| validate_premise(&c.text, c.construction, lex))
        .collect()
}

pub fn parse_bank(text: &str, source: &str) -> Result<Vec<CandidatePremise>, SeederError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| SeederError::Bank {
                path: source.to_owned(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_bank(path: impl AsRef<Path>) -> Result<Vec<CandidatePremise>, SeederError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let file = fs::File::open(path).map_err(|source| SeederError::Io {
        path: shown.clone(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| SeederError::Io {
            path: shown.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| SeederError::Bank {
            path: shown.clone(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> SeederError + '_ {
    move |source| SeederError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_bank(path: impl AsRef<Path>, bank: &[CandidatePremise]) -> Result<(), SeederError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    for c in bank {
        serde_json::to_writer(&mut buf, c).expect("serializable");
        buf.push(b'\n');
    }
    fs::write(path, buf).map_err(io_err(path))
}

/// Writes needs_review candidates as `construction<TAB>text<TAB>reasons`.
/// Returns how many lines were written.
pub fn write_review_queue(
    path: impl AsRef<Path>,
    candidates: &[CandidatePremise],
) -> Result<usize, SeederError> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    let mut n = 0;
    for c in candidates
        .iter()
        .filter(|c| c.review_status == ReviewStatus::NeedsReview)
    {
        writeln!(
            f,
            "{}\t{}\t{}",
            c.construction,
            c.text,
            c.reasons.join("; ")
        )
        .map_err(io_err(path))?;
        n += 1;
    }
    Ok(n)
}

/// Reads back a review queue after a human has edited it. Each remaining
/// line is re-validated.
pub fn read_review_queue(
    path: impl AsRef<Path>,
    lex: &Lexicon,
) -> Result<Vec<CandidatePremise>, SeederError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let mut cols = l.split('\t');
            let construction = cols
                .next()
                .and_then(|c| Construction::from_str(c).ok())
                .ok_or_else(|| SeederError::Bank {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: "unknown construction".into(),
                })?;
            let sentence = cols.next().unwrap_or_default();
            Ok(validate_premise(sentence, construction, lex))
        })
        .collect()
}
