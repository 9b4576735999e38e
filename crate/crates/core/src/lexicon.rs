//! Verb and noun inventories.
//!
//! A lexicon file is UTF-8, line oriented, with six tab-separated columns:
//!
//! ```text
//! kind    surface   past     participle  class         animacy
//! verb    kick      kicked   kicked      transitive
//! noun    ball                                         inanimate
//! noun    singer                         filler        animate
//! ```
//!
//! Lines starting with `#` are comments. Unused columns are left empty and
//! trailing empty columns may be omitted. Nouns with class `filler` belong to
//! the filler inventory used for composed premises; all other nouns are
//! target nouns.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Number of verbs each target class holds in strict mode.
pub const STRICT_CLASS_SIZE: usize = 40;
/// Filler verb count required in strict mode.
pub const STRICT_FILLER_VERBS: usize = 201;
/// Filler noun count required in strict mode.
pub const STRICT_FILLER_NOUNS: usize = 515;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon failed validation: {0}")]
    Invalid(ValidationReport),
    #[error("unknown past form {0:?}")]
    UnknownPast(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerbClass {
    Transitive,
    Ditransitive,
    Benefactive,
    ExperiencerSubject,
    ExperiencerObject,
    FillerTransitive,
}

impl VerbClass {
    /// The five classes that supply target premises.
    pub const TARGETS: [VerbClass; 5] = [
        VerbClass::Transitive,
        VerbClass::Ditransitive,
        VerbClass::Benefactive,
        VerbClass::ExperiencerSubject,
        VerbClass::ExperiencerObject,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerbClass::Transitive => "transitive",
            VerbClass::Ditransitive => "ditransitive",
            VerbClass::Benefactive => "benefactive",
            VerbClass::ExperiencerSubject => "experiencer_subject",
            VerbClass::ExperiencerObject => "experiencer_object",
            VerbClass::FillerTransitive => "filler_transitive",
        }
    }

    pub fn is_filler(self) -> bool {
        self == VerbClass::FillerTransitive
    }
}

impl fmt::Display for VerbClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VerbClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "transitive" => VerbClass::Transitive,
            "ditransitive" => VerbClass::Ditransitive,
            "benefactive" => VerbClass::Benefactive,
            "experiencer_subject" => VerbClass::ExperiencerSubject,
            "experiencer_object" => VerbClass::ExperiencerObject,
            "filler_transitive" => VerbClass::FillerTransitive,
            other => return Err(format!("unknown verb class {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Animacy {
    Animate,
    Inanimate,
}

impl fmt::Display for Animacy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Animacy::Animate => "animate",
            Animacy::Inanimate => "inanimate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VerbEntry {
    pub lemma: String,
    pub past: String,
    pub participle: String,
    pub class: VerbClass,
}

impl VerbEntry {
    pub fn new(lemma: &str, past: &str, participle: &str, class: VerbClass) -> Self {
        VerbEntry {
            lemma: lemma.to_owned(),
            past: past.to_owned(),
            participle: participle.to_owned(),
            class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NounEntry {
    pub surface: String,
    pub animacy: Animacy,
}

impl NounEntry {
    pub fn new(surface: &str, animacy: Animacy) -> Self {
        NounEntry {
            surface: surface.to_owned(),
            animacy,
        }
    }

    pub fn animate(surface: &str) -> Self {
        Self::new(surface, Animacy::Animate)
    }

    pub fn inanimate(surface: &str) -> Self {
        Self::new(surface, Animacy::Inanimate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Exact inventory sizes are enforced.
    Strict,
    /// Sizes are relaxed; structural invariants still hold.
    Sample,
}

/// One invariant violation found by [`validate_lexicon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ClassCount {
        class: VerbClass,
        expected: usize,
        found: usize,
    },
    FillerCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    DuplicateLemma {
        class: VerbClass,
        lemma: String,
    },
    DuplicateNoun {
        surface: String,
    },
    VerbOverlap {
        lemma: String,
    },
    NounOverlap {
        surface: String,
    },
    InanimateFiller {
        surface: String,
    },
    ConflictingAnimacy {
        surface: String,
    },
    AmbiguousPast {
        past: String,
        lemmas: Vec<String>,
    },
    Malformed {
        surface: String,
        reason: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ClassCount {
                class,
                expected,
                found,
            } => write!(f, "class {class} has {found} verbs, expected {expected}"),
            Violation::FillerCount {
                what,
                expected,
                found,
            } => write!(f, "{found} filler {what}, expected {expected}"),
            Violation::DuplicateLemma { class, lemma } => {
                write!(f, "duplicate lemma {lemma:?} in class {class}")
            }
            Violation::DuplicateNoun { surface } => write!(f, "duplicate noun {surface:?}"),
            Violation::VerbOverlap { lemma } => {
                write!(f, "verb {lemma:?} appears in both target and filler sets")
            }
            Violation::NounOverlap { surface } => {
                write!(f, "noun {surface:?} appears in both target and filler sets")
            }
            Violation::InanimateFiller { surface } => {
                write!(f, "filler noun {surface:?} is not animate")
            }
            Violation::ConflictingAnimacy { surface } => {
                write!(f, "noun {surface:?} listed as both animate and inanimate")
            }
            Violation::AmbiguousPast { past, lemmas } => {
                write!(
                    f,
                    "past form {past:?} maps to several lemmas: {}",
                    lemmas.join(", ")
                )
            }
            Violation::Malformed { surface, reason } => write!(f, "{surface:?}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Immutable verb and noun inventory. Iteration follows load order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    verbs: Vec<VerbEntry>,
    nouns: Vec<NounEntry>,
    filler_nouns: Vec<NounEntry>,
    by_class: BTreeMap<VerbClass, Vec<usize>>,
    past_index: HashMap<String, Vec<usize>>,
    noun_index: HashMap<String, usize>,
    filler_noun_index: HashMap<String, usize>,
}

impl Lexicon {
    pub fn from_entries(
        verbs: Vec<VerbEntry>,
        nouns: Vec<NounEntry>,
        filler_nouns: Vec<NounEntry>,
    ) -> Self {
        let mut by_class: BTreeMap<VerbClass, Vec<usize>> = BTreeMap::new();
        let mut past_index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, v) in verbs.iter().enumerate() {
            by_class.entry(v.class).or_default().push(i);
            past_index.entry(v.past.clone()).or_default().push(i);
        }
        let mut noun_index = HashMap::new();
        for (i, n) in nouns.iter().enumerate() {
            noun_index.entry(n.surface.clone()).or_insert(i);
        }
        let mut filler_noun_index = HashMap::new();
        for (i, n) in filler_nouns.iter().enumerate() {
            filler_noun_index.entry(n.surface.clone()).or_insert(i);
        }
        Lexicon {
            verbs,
            nouns,
            filler_nouns,
            by_class,
            past_index,
            noun_index,
            filler_noun_index,
        }
    }

    /// Parses one or more lexicon sources, given as `(name, text)` pairs,
    /// into a single lexicon. Names only appear in error messages.
    pub fn parse_sources<'a, I>(sources: I, mode: LoadMode) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut verbs = Vec::new();
        let mut nouns = Vec::new();
        let mut fillers = Vec::new();
        for (name, text) in sources {
            parse_into(name, text, &mut verbs, &mut nouns, &mut fillers)?;
        }
        let lex = Lexicon::from_entries(verbs, nouns, fillers);
        let report = validate_lexicon(&lex, mode);
        if report.is_empty() {
            Ok(lex)
        } else {
            Err(LexiconError::Invalid(report))
        }
    }

    /// The lexicon shipped with the crate: the target verb lists, the
    /// target nouns used by the sample premise bank, and a sample filler set.
    pub fn bundled_sample() -> Self {
        Lexicon::parse_sources(crate::bundled::LEXICON_SOURCES, LoadMode::Sample)
            .expect("bundled lexicon is valid")
    }

    pub fn verbs(&self) -> &[VerbEntry] {
        &self.verbs
    }

    pub fn nouns(&self) -> &[NounEntry] {
        &self.nouns
    }

    pub fn filler_nouns(&self) -> &[NounEntry] {
        &self.filler_nouns
    }

    pub fn verbs_in(&self, class: VerbClass) -> impl Iterator<Item = &VerbEntry> + '_ {
        self.by_class
            .get(&class)
            .into_iter()
            .flatten()
            .map(move |&i| &self.verbs[i])
    }

    pub fn filler_verbs(&self) -> impl Iterator<Item = &VerbEntry> + '_ {
        self.verbs_in(VerbClass::FillerTransitive)
    }

    pub fn class_len(&self, class: VerbClass) -> usize {
        self.by_class.get(&class).map_or(0, Vec::len)
    }

    /// Target noun by surface form.
    pub fn noun(&self, surface: &str) -> Option<&NounEntry> {
        self.noun_index.get(surface).map(|&i| &self.nouns[i])
    }

    pub fn filler_noun(&self, surface: &str) -> Option<&NounEntry> {
        self.filler_noun_index
            .get(surface)
            .map(|&i| &self.filler_nouns[i])
    }

    /// Verbs whose past form is `past`.
    pub fn verbs_with_past<'a>(&'a self, past: &str) -> impl Iterator<Item = &'a VerbEntry> + 'a {
        self.past_index
            .get(past)
            .into_iter()
            .flatten()
            .map(move |&i| &self.verbs[i])
    }

    /// Lemma whose past form equals `past`.
    pub fn base_form(&self, past: &str) -> Result<&str, LexiconError> {
        self.verbs_with_past(past)
            .next()
            .map(|v| v.lemma.as_str())
            .ok_or_else(|| LexiconError::UnknownPast(past.to_owned()))
    }
}

/// Loads and validates a lexicon file.
pub fn load_lexicon(path: impl AsRef<Path>, mode: LoadMode) -> Result<Lexicon, LexiconError> {
    load_lexicon_files(&[path], mode)
}

/// Loads several lexicon files as one inventory.
pub fn load_lexicon_files<P: AsRef<Path>>(
    paths: &[P],
    mode: LoadMode,
) -> Result<Lexicon, LexiconError> {
    let mut texts = Vec::with_capacity(paths.len());
    for p in paths {
        let p = p.as_ref();
        let text = fs::read_to_string(p).map_err(|source| LexiconError::Io {
            path: p.to_owned(),
            source,
        })?;
        texts.push((p.display().to_string(), text));
    }
    Lexicon::parse_sources(texts.iter().map(|(n, t)| (n.as_str(), t.as_str())), mode)
}

fn parse_into(
    name: &str,
    text: &str,
    verbs: &mut Vec<VerbEntry>,
    nouns: &mut Vec<NounEntry>,
    fillers: &mut Vec<NounEntry>,
) -> Result<(), LexiconError> {
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| LexiconError::Parse {
            source_name: name.to_owned(),
            line,
            message,
        };
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let mut cols: Vec<String> = raw.split('\t').map(|c| c.trim().nfc().collect()).collect();
        if cols.len() > 6 {
            return Err(err(format!(
                "expected at most 6 columns, found {}",
                cols.len()
            )));
        }
        cols.resize(6, String::new());
        let [kind, surface, past, participle, class, animacy] = &cols[..] else {
            unreachable!()
        };
        if surface.is_empty() {
            return Err(err("empty surface column".into()));
        }
        match kind.as_str() {
            "verb" => {
                if past.is_empty() || participle.is_empty() {
                    return Err(err(format!("verb {surface:?} needs past and participle")));
                }
                let class = class.parse::<VerbClass>().map_err(err)?;
                if !animacy.is_empty() {
                    return Err(err(format!("verb {surface:?} has an animacy value")));
                }
                verbs.push(VerbEntry::new(surface, past, participle, class));
            }
            "noun" => {
                let animacy = match animacy.as_str() {
                    "animate" => Animacy::Animate,
                    "inanimate" => Animacy::Inanimate,
                    other => return Err(err(format!("bad animacy {other:?}"))),
                };
                let entry = NounEntry::new(surface, animacy);
                match class.as_str() {
                    "" => nouns.push(entry),
                    "filler" => fillers.push(entry),
                    other => return Err(err(format!("bad noun class {other:?}"))),
                }
            }
            other => return Err(err(format!("unknown kind {other:?}"))),
        }
    }
    Ok(())
}

fn check_token(word: &str, what: &str, out: &mut Vec<Violation>) {
    let reason = if word.is_empty() {
        Some(format!("empty {what}"))
    } else if word.split_whitespace().count() != 1 {
        Some(format!("{what} must be a single token"))
    } else if word.chars().any(char::is_uppercase) {
        Some(format!("{what} must be lowercase"))
    } else {
        None
    };
    if let Some(reason) = reason {
        out.push(Violation::Malformed {
            surface: word.to_owned(),
            reason,
        });
    }
}

/// Lists every violated invariant. An empty report means the lexicon is valid
/// for `mode`.
pub fn validate_lexicon(lex: &Lexicon, mode: LoadMode) -> ValidationReport {
    let mut v = Vec::new();

    for verb in &lex.verbs {
        check_token(&verb.lemma, "lemma", &mut v);
        check_token(&verb.past, "past form", &mut v);
        check_token(&verb.participle, "participle", &mut v);
    }
    for noun in lex.nouns.iter().chain(&lex.filler_nouns) {
        if noun.surface.trim().is_empty() {
            v.push(Violation::Malformed {
                surface: noun.surface.clone(),
                reason: "empty noun".into(),
            });
        }
    }

    // duplicates within a class
    for (class, idxs) in &lex.by_class {
        let mut seen = HashSet::new();
        for &i in idxs {
            if !seen.insert(lex.verbs[i].lemma.as_str()) {
                v.push(Violation::DuplicateLemma {
                    class: *class,
                    lemma: lex.verbs[i].lemma.clone(),
                });
            }
        }
    }

    let mut seen: HashMap<&str, Animacy> = HashMap::new();
    for n in &lex.nouns {
        match seen.insert(&n.surface, n.animacy) {
            Some(prev) if prev != n.animacy => v.push(Violation::ConflictingAnimacy {
                surface: n.surface.clone(),
            }),
            Some(_) => v.push(Violation::DuplicateNoun {
                surface: n.surface.clone(),
            }),
            None => {}
        }
    }
    let mut filler_seen = HashSet::new();
    for n in &lex.filler_nouns {
        if !filler_seen.insert(n.surface.as_str()) {
            v.push(Violation::DuplicateNoun {
                surface: n.surface.clone(),
            });
        }
        if n.animacy != Animacy::Animate {
            v.push(Violation::InanimateFiller {
                surface: n.surface.clone(),
            });
        }
    }

    // filler vocabulary must stay disjoint from target vocabulary
    let target_lemmas: HashSet<&str> = lex
        .verbs
        .iter()
        .filter(|e| !e.class.is_filler())
        .map(|e| e.lemma.as_str())
        .collect();
    let mut reported = HashSet::new();
    for e in lex.filler_verbs() {
        if target_lemmas.contains(e.lemma.as_str()) && reported.insert(e.lemma.as_str()) {
            v.push(Violation::VerbOverlap {
                lemma: e.lemma.clone(),
            });
        }
    }
    for n in &lex.filler_nouns {
        if lex.noun_index.contains_key(&n.surface) {
            v.push(Violation::NounOverlap {
                surface: n.surface.clone(),
            });
        }
    }

    let mut pasts: Vec<&String> = lex.past_index.keys().collect();
    pasts.sort();
    for past in pasts {
        let mut lemmas: Vec<String> = lex.verbs_with_past(past).map(|e| e.lemma.clone()).collect();
        lemmas.sort();
        lemmas.dedup();
        if lemmas.len() > 1 {
            v.push(Violation::AmbiguousPast {
                past: past.clone(),
                lemmas,
            });
        }
    }

    if mode == LoadMode::Strict {
        for class in VerbClass::TARGETS {
            let found = lex.class_len(class);
            if found != STRICT_CLASS_SIZE {
                v.push(Violation::ClassCount {
                    class,
                    expected: STRICT_CLASS_SIZE,
                    found,
                });
            }
        }
        // a target-only inventory is complete on its own; filler sizes are
        // enforced once any filler vocabulary is supplied
        let filler_verbs = lex.class_len(VerbClass::FillerTransitive);
        let filler_nouns = lex.filler_nouns.len();
        if filler_verbs + filler_nouns > 0 {
            if filler_verbs != STRICT_FILLER_VERBS {
                v.push(Violation::FillerCount {
                    what: "verbs",
                    expected: STRICT_FILLER_VERBS,
                    found: filler_verbs,
                });
            }
            if filler_nouns != STRICT_FILLER_NOUNS {
                v.push(Violation::FillerCount {
                    what: "nouns",
                    expected: STRICT_FILLER_NOUNS,
                    found: filler_nouns,
                });
            }
        }
    }

    ValidationReport { violations: v }
}
