//! Premise realization for the eight argument-structure constructions, the
//! plausibility swap, hypothesis pairs, and polar questions.
//!
//! A [`PremiseFrame`] stores its nouns by animacy. Which noun lands in which
//! slot is decided by the construction's plausible pattern and the frame's
//! plausibility, so swapping arguments is just a plausibility flip.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::labels::{Answer, Label};
use crate::lexicon::{Animacy, Lexicon, LexiconError, NounEntry, VerbClass, VerbEntry};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("verb {lemma:?} of class {class} cannot realize a {construction} premise")]
    VerbMismatch {
        lemma: String,
        class: VerbClass,
        construction: Construction,
    },
    #[error("{construction} frame {problem}")]
    BadFrame {
        construction: Construction,
        problem: &'static str,
    },
    #[error("sentence {sentence:?} is not the realization of its frame ({expected:?})")]
    FrameMismatch { sentence: String, expected: String },
    #[error("no lemma for past form {0:?}")]
    UnknownPast(String),
}

impl From<LexiconError> for RealizeError {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::UnknownPast(p) => RealizeError::UnknownPast(p),
            other => RealizeError::UnknownPast(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Transitive,
    Passive,
    Doc,
    Dative,
    BenefactiveDoc,
    BenefactiveFor,
    ExperiencerSubject,
    ExperiencerObject,
}

impl Construction {
    pub const ALL: [Construction; 8] = [
        Construction::Transitive,
        Construction::Passive,
        Construction::Doc,
        Construction::Dative,
        Construction::BenefactiveDoc,
        Construction::BenefactiveFor,
        Construction::ExperiencerSubject,
        Construction::ExperiencerObject,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Transitive => "transitive",
            Construction::Passive => "passive",
            Construction::Doc => "doc",
            Construction::Dative => "dative",
            Construction::BenefactiveDoc => "benefactive_doc",
            Construction::BenefactiveFor => "benefactive_for",
            Construction::ExperiencerSubject => "experiencer_subject",
            Construction::ExperiencerObject => "experiencer_object",
        }
    }

    /// The verb class that supplies this construction's verbs.
    pub fn verb_class(self) -> VerbClass {
        match self {
            Construction::Transitive | Construction::Passive => VerbClass::Transitive,
            Construction::Doc | Construction::Dative => VerbClass::Ditransitive,
            Construction::BenefactiveDoc | Construction::BenefactiveFor => VerbClass::Benefactive,
            Construction::ExperiencerSubject => VerbClass::ExperiencerSubject,
            Construction::ExperiencerObject => VerbClass::ExperiencerObject,
        }
    }

    /// Three-place constructions carry an extra animate subject.
    pub fn has_extra_np(self) -> bool {
        matches!(
            self,
            Construction::Doc
                | Construction::Dative
                | Construction::BenefactiveDoc
                | Construction::BenefactiveFor
        )
    }

    fn plausible_order(self) -> [Animacy; 2] {
        use Animacy::*;
        match self {
            Construction::Transitive | Construction::ExperiencerSubject => [Animate, Inanimate],
            Construction::Passive | Construction::ExperiencerObject => [Inanimate, Animate],
            Construction::Doc | Construction::BenefactiveDoc => [Animate, Inanimate],
            Construction::Dative | Construction::BenefactiveFor => [Inanimate, Animate],
        }
    }

    fn layout(self) -> Layout {
        match self {
            Construction::Transitive
            | Construction::ExperiencerSubject
            | Construction::ExperiencerObject => Layout::Active,
            Construction::Passive => Layout::Passive,
            Construction::Doc | Construction::BenefactiveDoc => Layout::DoubleObject,
            Construction::Dative => Layout::Prepositional("to"),
            Construction::BenefactiveFor => Layout::Prepositional("for"),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construction::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown construction {s:?}"))
    }
}

#[derive(Debug, Clone, Copy)]
enum Layout {
    /// `S V O`
    Active,
    /// `S was V-en by A`
    Passive,
    /// `X V O1 O2`
    DoubleObject,
    /// `X V O1 prep O2`
    Prepositional(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plausibility {
    Plausible,
    Implausible,
}

impl Plausibility {
    pub fn flip(self) -> Self {
        match self {
            Plausibility::Plausible => Plausibility::Implausible,
            Plausibility::Implausible => Plausibility::Plausible,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Plausibility::Plausible => "plausible",
            Plausibility::Implausible => "implausible",
        }
    }
}

impl fmt::Display for Plausibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PremiseFrame {
    pub construction: Construction,
    pub verb: VerbEntry,
    pub animate_np: NounEntry,
    pub inanimate_np: NounEntry,
    /// Subject of three-place constructions ("the boy" in "The boy gave ...").
    pub extra_np: Option<NounEntry>,
    pub plausibility: Plausibility,
}

impl PremiseFrame {
    pub fn check(&self) -> Result<(), RealizeError> {
        let construction = self.construction;
        if self.verb.class != construction.verb_class() {
            return Err(RealizeError::VerbMismatch {
                lemma: self.verb.lemma.clone(),
                class: self.verb.class,
                construction,
            });
        }
        let bad = |problem| {
            Err(RealizeError::BadFrame {
                construction,
                problem,
            })
        };
        if self.animate_np.animacy != Animacy::Animate {
            return bad("animate slot holds an inanimate noun");
        }
        if self.inanimate_np.animacy != Animacy::Inanimate {
            return bad("inanimate slot holds an animate noun");
        }
        match (&self.extra_np, construction.has_extra_np()) {
            (None, true) => bad("is missing its extra noun phrase"),
            (Some(_), false) => bad("has an unexpected extra noun phrase"),
            _ => Ok(()),
        }
    }

    /// The two swappable nouns in surface order.
    fn ordered(&self) -> [&NounEntry; 2] {
        let pick = |a: Animacy| match a {
            Animacy::Animate => &self.animate_np,
            Animacy::Inanimate => &self.inanimate_np,
        };
        let [first, second] = self.construction.plausible_order();
        match self.plausibility {
            Plausibility::Plausible => [pick(first), pick(second)],
            Plausibility::Implausible => [pick(second), pick(first)],
        }
    }

    /// Grammatical subject noun of the realized sentence.
    pub fn subject(&self) -> &NounEntry {
        match &self.extra_np {
            Some(x) if self.construction.has_extra_np() => x,
            _ => self.ordered()[0],
        }
    }

    /// Every noun in the realized sentence, in surface order.
    pub fn surface_nouns(&self) -> Vec<&NounEntry> {
        let [a, b] = self.ordered();
        match &self.extra_np {
            Some(x) if self.construction.has_extra_np() => vec![x, a, b],
            _ => vec![a, b],
        }
    }
}

fn np(noun: &NounEntry) -> String {
    format!("the {}", noun.surface)
}

pub(crate) fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub(crate) fn decapitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Realizes a frame as a capitalized sentence with a final period.
pub fn realize_premise(frame: &PremiseFrame) -> Result<String, RealizeError> {
    frame.check()?;
    let [a, b] = frame.ordered();
    let verb = &frame.verb;
    let body = match frame.construction.layout() {
        Layout::Active => format!("{} {} {}", np(a), verb.past, np(b)),
        Layout::Passive => format!("{} was {} by {}", np(a), verb.participle, np(b)),
        Layout::DoubleObject => {
            format!("{} {} {} {}", np(frame.subject()), verb.past, np(a), np(b))
        }
        Layout::Prepositional(prep) => format!(
            "{} {} {} {} {}",
            np(frame.subject()),
            verb.past,
            np(a),
            prep,
            np(b)
        ),
    };
    Ok(format!("{}.", capitalize(&body)))
}

/// Exchanges the animate and inanimate positions and flips plausibility.
pub fn swap_arguments(frame: &PremiseFrame) -> PremiseFrame {
    PremiseFrame {
        plausibility: frame.plausibility.flip(),
        ..frame.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisMode {
    /// The premise entails its verbatim copy for every construction.
    #[default]
    Logical,
    /// Labels as printed in the original table, including the inverted
    /// experiencer rows.
    TableFaithful,
}

impl FromStr for HypothesisMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logical" => Ok(HypothesisMode::Logical),
            "table_faithful" | "table-faithful" => Ok(HypothesisMode::TableFaithful),
            other => Err(format!("unknown hypothesis mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisKind {
    /// String-identical to the premise.
    Identical,
    /// Premise with its animate and inanimate arguments exchanged.
    Swapped,
}

impl HypothesisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HypothesisKind::Identical => "ident",
            HypothesisKind::Swapped => "swap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliPair {
    pub premise: String,
    pub hypothesis: String,
    pub label: Label,
    pub question: String,
    pub correct_answer: Answer,
    pub kind: HypothesisKind,
}

/// Builds the identical and swapped hypotheses for a premise frame, in that
/// order. Each carries the polar question formed from its own content.
pub fn make_hypotheses(
    frame: &PremiseFrame,
    mode: HypothesisMode,
    lex: &Lexicon,
) -> Result<[NliPair; 2], RealizeError> {
    let premise = realize_premise(frame)?;
    let swapped_frame = swap_arguments(frame);
    let swapped = realize_premise(&swapped_frame)?;

    let inverted = mode == HypothesisMode::TableFaithful
        && matches!(
            frame.construction,
            Construction::ExperiencerSubject | Construction::ExperiencerObject
        );
    let (ident_label, swap_label) = if inverted {
        (Label::NonEntailment, Label::Entailment)
    } else {
        (Label::Entailment, Label::NonEntailment)
    };

    let pair = |hypothesis: String, hframe: &PremiseFrame, label: Label, kind| {
        Ok::<_, RealizeError>(NliPair {
            premise: premise.clone(),
            question: to_polar_question(&hypothesis, hframe, lex)?,
            hypothesis,
            label,
            correct_answer: label.answer(),
            kind,
        })
    };
    Ok([
        pair(
            premise.clone(),
            frame,
            ident_label,
            HypothesisKind::Identical,
        )?,
        pair(swapped, &swapped_frame, swap_label, HypothesisKind::Swapped)?,
    ])
}

/// Turns a realized sentence into a yes/no question: do-support with the
/// verb's base form for actives, subject-auxiliary inversion for passives.
pub fn to_polar_question(
    sentence: &str,
    frame: &PremiseFrame,
    lex: &Lexicon,
) -> Result<String, RealizeError> {
    let expected = realize_premise(frame)?;
    if sentence != expected {
        return Err(RealizeError::FrameMismatch {
            sentence: sentence.to_owned(),
            expected,
        });
    }
    let body = decapitalize(sentence.trim_end_matches('.'));
    let subject_len = 1 + frame.subject().surface.split_whitespace().count();
    let tokens: Vec<&str> = body.split(' ').collect();
    let subject = tokens[..subject_len].join(" ");
    let rest = &tokens[subject_len..];
    let question = match frame.construction.layout() {
        Layout::Passive => format!("Was {} {}?", subject, rest[1..].join(" ")),
        _ => {
            let base = lex.base_form(rest[0])?;
            let mut words = vec![subject.as_str(), base];
            words.extend(&rest[1..]);
            format!("Did {}?", words.join(" "))
        }
    };
    Ok(question)
}

/// Problems found while reading a sentence back into a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PremiseIssue {
    Pronoun(String),
    /// A token sits between a determiner and its noun.
    Modifier(String),
    Determiner(String),
    /// The noun phrases and function words do not match the construction.
    Shape {
        expected: String,
        found: String,
    },
    VerbClass {
        word: String,
        class: VerbClass,
    },
    UnknownNoun(String),
    FillerNoun(String),
    Animacy {
        noun: String,
        expected: Animacy,
    },
    Punctuation,
}

impl PremiseIssue {
    /// Issues a reviewer can resolve; everything else is a hard violation.
    pub fn is_soft(&self) -> bool {
        matches!(self, PremiseIssue::UnknownNoun(_))
    }
}

impl fmt::Display for PremiseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PremiseIssue::Pronoun(w) => write!(f, "pronoun {w:?}"),
            PremiseIssue::Modifier(w) => write!(f, "modifier in noun phrase {w:?}"),
            PremiseIssue::Determiner(w) => write!(f, "noun phrase {w:?} must start with \"the\""),
            PremiseIssue::Shape { expected, found } => {
                write!(f, "expected shape {expected}, found {found}")
            }
            PremiseIssue::VerbClass { word, class } => {
                write!(f, "{word:?} is not a {class} verb form")
            }
            PremiseIssue::UnknownNoun(w) => write!(f, "unknown noun {w:?}"),
            PremiseIssue::FillerNoun(w) => write!(f, "filler noun {w:?} in a target premise"),
            PremiseIssue::Animacy { noun, expected } => {
                write!(f, "{noun:?} should be {expected} in this position")
            }
            PremiseIssue::Punctuation => write!(f, "sentence must end with a single period"),
        }
    }
}

const PRONOUNS: &[&str] = &[
    "i",
    "me",
    "my",
    "mine",
    "you",
    "your",
    "yours",
    "he",
    "him",
    "his",
    "she",
    "her",
    "hers",
    "it",
    "its",
    "we",
    "us",
    "our",
    "ours",
    "they",
    "them",
    "their",
    "theirs",
    "this",
    "that",
    "these",
    "those",
    "someone",
    "something",
    "everyone",
    "everything",
    "himself",
    "herself",
    "itself",
    "themselves",
    "myself",
    "yourself",
    "ourselves",
];

const MARKERS: &[&str] = &["to", "for", "by"];

#[derive(Debug)]
enum Chunk<'a> {
    Np(Vec<&'a str>),
    Marker(&'a str),
}

impl Chunk<'_> {
    fn tag(&self) -> &str {
        match self {
            Chunk::Np(_) => "NP",
            Chunk::Marker(m) => m,
        }
    }
}

fn expected_tail(c: Construction) -> &'static [&'static str] {
    match c.layout() {
        Layout::Active => &["NP"],
        Layout::Passive => &["by", "NP"],
        Layout::DoubleObject => &["NP", "NP"],
        Layout::Prepositional("to") => &["NP", "to", "NP"],
        Layout::Prepositional(_) => &["NP", "for", "NP"],
    }
}

fn chunk<'a>(tokens: &[&'a str]) -> Vec<Chunk<'a>> {
    let mut out = Vec::new();
    let mut current: Option<Vec<&'a str>> = None;
    for &t in tokens {
        if MARKERS.contains(&t) {
            if let Some(np) = current.take() {
                out.push(Chunk::Np(np));
            }
            out.push(Chunk::Marker(t));
        } else if t == "the" || current.is_none() {
            if let Some(np) = current.take() {
                out.push(Chunk::Np(np));
            }
            current = Some(vec![t]);
        } else if let Some(np) = current.as_mut() {
            np.push(t);
        }
    }
    if let Some(np) = current {
        out.push(Chunk::Np(np));
    }
    out
}

/// Reads a plausible premise back into a frame, reporting every problem
/// found. A frame is returned only when there are no issues.
pub fn analyze_premise(
    text: &str,
    construction: Construction,
    lex: &Lexicon,
) -> (Option<PremiseFrame>, Vec<PremiseIssue>) {
    let mut issues = Vec::new();
    let trimmed = text.trim();
    let Some(body) = trimmed.strip_suffix('.') else {
        return (None, vec![PremiseIssue::Punctuation]);
    };
    if body.contains(['.', '?', '!', ',']) {
        issues.push(PremiseIssue::Punctuation);
    }
    let lowered = body.to_lowercase();
    let tokens: Vec<&str> = lowered.split_whitespace().collect();
    for t in &tokens {
        if PRONOUNS.contains(t) {
            issues.push(PremiseIssue::Pronoun((*t).to_owned()));
        }
    }

    let class = construction.verb_class();
    let passive = matches!(construction.layout(), Layout::Passive);
    // locate the verb: first token after position 0 that is a known form
    let is_form = |t: &str| {
        lex.verbs().iter().any(|v| {
            if passive {
                v.participle == t
            } else {
                v.past == t
            }
        })
    };
    let verb_pos = if passive {
        tokens
            .iter()
            .position(|&t| t == "was")
            .filter(|&i| i >= 1 && i + 1 < tokens.len())
            .map(|i| i + 1)
    } else {
        (1..tokens.len()).find(|&i| is_form(tokens[i]))
    }
    .or_else(|| (tokens.len() > 2).then_some(2));
    let Some(verb_pos) = verb_pos else {
        issues.push(PremiseIssue::Shape {
            expected: "a full clause".into(),
            found: body.to_owned(),
        });
        return (None, issues);
    };

    let verb_word = tokens[verb_pos];
    let verb = lex.verbs_in(class).find(|v| {
        if passive {
            v.participle == verb_word
        } else {
            v.past == verb_word
        }
    });
    if verb.is_none() {
        issues.push(PremiseIssue::VerbClass {
            word: verb_word.to_owned(),
            class,
        });
    }

    let subject_end = if passive { verb_pos - 1 } else { verb_pos };
    let mut chunks = vec![Chunk::Np(tokens[..subject_end].to_vec())];
    chunks.extend(chunk(&tokens[verb_pos + 1..]));

    let mut expected = vec!["NP"];
    expected.extend(expected_tail(construction));
    let found: Vec<&str> = chunks.iter().map(Chunk::tag).collect();
    if found != expected {
        issues.push(PremiseIssue::Shape {
            expected: expected.join(" "),
            found: found.join(" "),
        });
    }

    // slot animacy in surface order
    let order = construction.plausible_order();
    let mut slots: Vec<Animacy> = Vec::new();
    if construction.has_extra_np() {
        slots.push(Animacy::Animate);
    }
    slots.extend(order);

    let mut nouns: Vec<Option<NounEntry>> = Vec::new();
    for c in &chunks {
        let Chunk::Np(words) = c else { continue };
        if words.is_empty() {
            continue;
        }
        if words[0] != "the" {
            if !PRONOUNS.contains(&words[0]) {
                issues.push(PremiseIssue::Determiner(words.join(" ")));
            }
            nouns.push(None);
            continue;
        }
        if words.len() > 2 {
            issues.push(PremiseIssue::Modifier(words.join(" ")));
        }
        let Some(&head) = words.last().filter(|_| words.len() >= 2) else {
            issues.push(PremiseIssue::Determiner(words.join(" ")));
            nouns.push(None);
            continue;
        };
        match lex.noun(head) {
            Some(n) => nouns.push(Some(n.clone())),
            None if lex.filler_noun(head).is_some() => {
                issues.push(PremiseIssue::FillerNoun(head.to_owned()));
                nouns.push(None);
            }
            None => {
                issues.push(PremiseIssue::UnknownNoun(head.to_owned()));
                nouns.push(None);
            }
        }
    }
    if nouns.len() == slots.len() {
        for (n, want) in nouns.iter().zip(&slots) {
            if let Some(n) = n {
                if n.animacy != *want {
                    issues.push(PremiseIssue::Animacy {
                        noun: n.surface.clone(),
                        expected: *want,
                    });
                }
            }
        }
    }

    if !issues.is_empty() {
        return (None, issues);
    }
    let nouns: Vec<NounEntry> = nouns.into_iter().flatten().collect();
    let (extra, pair) = if construction.has_extra_np() {
        (Some(nouns[0].clone()), &nouns[1..])
    } else {
        (None, &nouns[..])
    };
    let (animate_np, inanimate_np) = match order {
        [Animacy::Animate, _] => (pair[0].clone(), pair[1].clone()),
        _ => (pair[1].clone(), pair[0].clone()),
    };
    let frame = PremiseFrame {
        construction,
        verb: verb.expect("checked above").clone(),
        animate_np,
        inanimate_np,
        extra_np: extra,
        plausibility: Plausibility::Plausible,
    };
    (Some(frame), issues)
}
