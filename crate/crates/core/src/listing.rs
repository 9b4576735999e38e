//! Dataset assembly, counterbalanced list partitioning and JSON Lines I/O.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::composer::{
    compose_with, enumerate_templates, generate_distractor, generate_filler, join_propositions,
    ComposeError, Connective, Distractor, FillerProposition, MemoryLoad, Template,
};
use crate::constructions::{
    analyze_premise, make_hypotheses, swap_arguments, Construction, HypothesisKind, HypothesisMode,
    NliPair, Plausibility, RealizeError,
};
use crate::labels::{Answer, Label};
use crate::lexicon::Lexicon;
use crate::seeder::{CandidatePremise, ReviewStatus};
use crate::seeding::{rng_for, Provenance};

pub const ITEMS_FILE: &str = "gelp.items.jsonl";
pub const LISTS_FILE: &str = "gelp.lists.jsonl";
pub const QUALIFICATION_FILE: &str = "gelp.qualification.jsonl";
pub const LIST_COUNT: usize = 160;
pub const LIST_SIZE: usize = 96;
pub const QUALIFICATION_SIZE: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum ListingError {
    #[error("premise bank is missing auto-accepted premises for: {}", fmt_missing(.0))]
    IncompleteBank(Vec<(Construction, usize, usize)>),
    #[error("bank premise {text:?} ({construction}) does not parse: {reason}")]
    BadPremise {
        text: String,
        construction: Construction,
        reason: String,
    },
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("cannot split {items} items into {lists} lists of {size}")]
    WrongSize {
        items: usize,
        lists: usize,
        size: usize,
    },
    #[error("stratum {stratum} has {count} items, not a multiple of {lists}")]
    Unbalanced {
        stratum: String,
        count: usize,
        lists: usize,
    },
    #[error("{path}:{line}: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },
    #[error("inconsistent dataset: {0}")]
    Inconsistent(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_missing(missing: &[(Construction, usize, usize)]) -> String {
    missing
        .iter()
        .map(|(c, have, need)| format!("{c} ({have}/{need})"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Target,
    Distractor,
    Qualification,
}

impl ItemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemKind::Target => "target",
            ItemKind::Distractor => "distractor",
            ItemKind::Qualification => "qualification",
        }
    }
}

/// Memory load for targets; proposition count for distractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ItemLoad {
    #[serde(rename = "low")]
    Low,
    #[serde(rename = "medium")]
    Medium,
    #[serde(rename = "high")]
    High,
    #[serde(rename = "1p")]
    OneProp,
    #[serde(rename = "2p")]
    TwoProp,
    #[serde(rename = "3p")]
    ThreeProp,
}

impl ItemLoad {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemLoad::Low => "low",
            ItemLoad::Medium => "medium",
            ItemLoad::High => "high",
            ItemLoad::OneProp => "1p",
            ItemLoad::TwoProp => "2p",
            ItemLoad::ThreeProp => "3p",
        }
    }

    pub fn memory_load(self) -> Option<MemoryLoad> {
        match self {
            ItemLoad::Low => Some(MemoryLoad::Low),
            ItemLoad::Medium => Some(MemoryLoad::Medium),
            ItemLoad::High => Some(MemoryLoad::High),
            _ => None,
        }
    }

    fn propositions(n: usize) -> ItemLoad {
        match n {
            1 => ItemLoad::OneProp,
            2 => ItemLoad::TwoProp,
            _ => ItemLoad::ThreeProp,
        }
    }
}

impl From<MemoryLoad> for ItemLoad {
    fn from(l: MemoryLoad) -> Self {
        match l {
            MemoryLoad::Low => ItemLoad::Low,
            MemoryLoad::Medium => ItemLoad::Medium,
            MemoryLoad::High => ItemLoad::High,
        }
    }
}

impl fmt::Display for ItemLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of `gelp.items.jsonl`. Field order here is the serialized order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetItem {
    pub id: String,
    pub kind: ItemKind,
    pub construction: Option<Construction>,
    pub plausibility: Option<Plausibility>,
    pub load: ItemLoad,
    pub connectives: Vec<Connective>,
    pub target_position: Option<usize>,
    pub premise: String,
    pub hypothesis: String,
    pub label: Label,
    pub question: String,
    pub correct_answer: Answer,
    pub template_id: String,
    pub list_id: Option<String>,
    pub seed_provenance: Provenance,
}

impl DatasetItem {
    pub fn is_target(&self) -> bool {
        self.kind == ItemKind::Target
    }

    /// Checks the per-item invariants.
    pub fn check(&self) -> Result<(), String> {
        if self.label.answer() != self.correct_answer {
            return Err(format!(
                "{}: label {} disagrees with correct_answer {}",
                self.id, self.label, self.correct_answer
            ));
        }
        if !self.premise.ends_with('.') || !self.hypothesis.ends_with('.') {
            return Err(format!(
                "{}: premise and hypothesis must end with \".\"",
                self.id
            ));
        }
        if !self.question.ends_with('?') {
            return Err(format!("{}: question must end with \"?\"", self.id));
        }
        let target = self.kind == ItemKind::Target;
        if target != self.load.memory_load().is_some() {
            return Err(format!(
                "{}: load {} does not fit kind {}",
                self.id,
                self.load,
                self.kind.as_str()
            ));
        }
        if target && (self.construction.is_none() || self.plausibility.is_none()) {
            return Err(format!(
                "{}: targets need construction and plausibility",
                self.id
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentList {
    pub list_id: String,
    pub item_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub items: Vec<DatasetItem>,
    pub qualification: Vec<DatasetItem>,
}

impl Dataset {
    pub fn targets(&self) -> impl Iterator<Item = &DatasetItem> {
        self.items.iter().filter(|i| i.is_target())
    }

    pub fn distractors(&self) -> impl Iterator<Item = &DatasetItem> {
        self.items.iter().filter(|i| i.kind == ItemKind::Distractor)
    }

    pub fn by_id(&self) -> HashMap<&str, &DatasetItem> {
        self.items.iter().map(|i| (i.id.as_str(), i)).collect()
    }

    /// Records each item's list membership in its `list_id` field.
    pub fn attach_lists(&mut self, lists: &[ExperimentList]) {
        let owner: HashMap<&str, &str> = lists
            .iter()
            .flat_map(|l| {
                l.item_ids
                    .iter()
                    .map(move |id| (id.as_str(), l.list_id.as_str()))
            })
            .collect();
        for item in &mut self.items {
            item.list_id = owner.get(item.id.as_str()).map(|s| (*s).to_owned());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildConfig {
    pub premises_per_construction: usize,
    pub hypothesis_mode: HypothesisMode,
    pub two_prop_distractors_per_premise: usize,
    pub three_prop_distractors_per_premise: usize,
    pub qualification_items: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            premises_per_construction: 80,
            hypothesis_mode: HypothesisMode::Logical,
            two_prop_distractors_per_premise: 2,
            three_prop_distractors_per_premise: 4,
            qualification_items: QUALIFICATION_SIZE,
        }
    }
}

/// Takes the first `n` auto-accepted premises of each construction, in bank
/// order.
pub fn select_premises(
    bank: &[CandidatePremise],
    n: usize,
) -> Result<BTreeMap<Construction, Vec<&CandidatePremise>>, ListingError> {
    let mut by: BTreeMap<Construction, Vec<&CandidatePremise>> =
        Construction::ALL.iter().map(|&c| (c, Vec::new())).collect();
    for c in bank {
        if c.review_status == ReviewStatus::AutoAccepted {
            let slot = by
                .get_mut(&c.construction)
                .expect("all constructions present");
            if slot.len() < n {
                slot.push(c);
            }
        }
    }
    let missing: Vec<_> = by
        .iter()
        .filter(|(_, v)| v.len() < n)
        .map(|(c, v)| (*c, v.len(), n))
        .collect();
    if !missing.is_empty() {
        return Err(ListingError::IncompleteBank(missing));
    }
    Ok(by)
}

fn short_plaus(p: Plausibility) -> &'static str {
    match p {
        Plausibility::Plausible => "pl",
        Plausibility::Implausible => "im",
    }
}

struct LowItem {
    construction: Construction,
    index: usize,
    plausibility: Plausibility,
    pair: NliPair,
}

impl LowItem {
    fn stem(&self) -> String {
        format!(
            "{}.{:03}.{}",
            self.construction,
            self.index,
            short_plaus(self.plausibility)
        )
    }

    fn target_id(&self, load: MemoryLoad) -> String {
        format!("t.{}.{}.{}", self.stem(), self.pair.kind.as_str(), load)
    }
}

fn target_item(
    low: &LowItem,
    template: Template,
    fillers: &[FillerProposition],
    provenance: Provenance,
) -> Result<DatasetItem, ListingError> {
    let composed = compose_with(&low.pair, template, fillers)?;
    Ok(DatasetItem {
        id: low.target_id(composed.load),
        kind: ItemKind::Target,
        construction: Some(low.construction),
        plausibility: Some(low.plausibility),
        load: composed.load.into(),
        connectives: composed.connectives,
        target_position: Some(composed.target_position),
        premise: composed.premise_text,
        hypothesis: low.pair.hypothesis.clone(),
        label: low.pair.label,
        question: low.pair.question.clone(),
        correct_answer: low.pair.correct_answer,
        template_id: template.id(),
        list_id: None,
        seed_provenance: provenance,
    })
}

fn distractor_item(
    id: String,
    d: Distractor,
    load: ItemLoad,
    kind: ItemKind,
    provenance: Provenance,
) -> DatasetItem {
    DatasetItem {
        id,
        kind,
        construction: None,
        plausibility: None,
        load,
        connectives: d.connectives,
        target_position: Some(d.target_position),
        premise: d.premise,
        hypothesis: d.hypothesis,
        label: d.label,
        question: d.question,
        correct_answer: d.correct_answer,
        template_id: d.template,
        list_id: None,
        seed_provenance: provenance,
    }
}

/// Round-robin template assignment over seed-shuffled strata. The position
/// counter carries across strata so usage stays within one of the mean.
fn assign_templates(
    strata: &BTreeMap<(Plausibility, HypothesisKind), Vec<usize>>,
    templates: &[Template],
    master_seed: u64,
    tag: &str,
) -> HashMap<usize, Template> {
    let mut out = HashMap::new();
    let mut counter = 0usize;
    for (key, members) in strata {
        let mut order = members.clone();
        let path = format!("assign/{tag}/{}.{}", short_plaus(key.0), key.1.as_str());
        order.shuffle(&mut rng_for(master_seed, &path));
        for m in order {
            out.insert(m, templates[counter % templates.len()]);
            counter += 1;
        }
    }
    out
}

/// Builds targets for all three loads, distractors, and qualification items.
pub fn build_dataset(
    lex: &Lexicon,
    bank: &[CandidatePremise],
    config: &BuildConfig,
    master_seed: u64,
) -> Result<Dataset, ListingError> {
    let selected = select_premises(bank, config.premises_per_construction)?;

    let mut lows = Vec::new();
    for (construction, premises) in &selected {
        for (index, cand) in premises.iter().enumerate() {
            let (frame, issues) = analyze_premise(&cand.text, *construction, lex);
            let frame = frame.ok_or_else(|| ListingError::BadPremise {
                text: cand.text.clone(),
                construction: *construction,
                reason: issues
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            })?;
            for f in [frame.clone(), swap_arguments(&frame)] {
                for pair in make_hypotheses(&f, config.hypothesis_mode, lex)? {
                    lows.push(LowItem {
                        construction: *construction,
                        index,
                        plausibility: f.plausibility,
                        pair,
                    });
                }
            }
        }
    }

    let mut strata: BTreeMap<(Plausibility, HypothesisKind), Vec<usize>> = BTreeMap::new();
    for (i, low) in lows.iter().enumerate() {
        strata
            .entry((low.plausibility, low.pair.kind))
            .or_default()
            .push(i);
    }
    let medium = assign_templates(
        &strata,
        &enumerate_templates(MemoryLoad::Medium),
        master_seed,
        "medium",
    );
    let high = assign_templates(
        &strata,
        &enumerate_templates(MemoryLoad::High),
        master_seed,
        "high",
    );

    let mut items = Vec::with_capacity(lows.len() * 6);
    for (i, low) in lows.iter().enumerate() {
        let low_id = low.target_id(MemoryLoad::Low);
        items.push(target_item(
            low,
            Template::Low,
            &[],
            Provenance {
                master_seed,
                path: format!("compose/{low_id}"),
            },
        )?);
        for template in [medium[&i], high[&i]] {
            let id = low.target_id(template.load());
            let path = format!("compose/{id}");
            let mut rng = rng_for(master_seed, &path);
            let fillers = (0..template.load().propositions() - 1)
                .map(|_| generate_filler(lex, &mut rng))
                .collect::<Result<Vec<_>, _>>()?;
            items.push(target_item(
                low,
                template,
                &fillers,
                Provenance { master_seed, path },
            )?);
        }
    }

    // Distractors hang off each low-load premise via its identical hypothesis.
    let hosts: Vec<&LowItem> = lows
        .iter()
        .filter(|l| l.pair.kind == HypothesisKind::Identical)
        .collect();
    for (n_props, per_premise) in [
        (2, config.two_prop_distractors_per_premise),
        (3, config.three_prop_distractors_per_premise),
    ] {
        let load = ItemLoad::propositions(n_props);
        let mut slots: Vec<(usize, usize)> = (0..hosts.len())
            .flat_map(|h| (0..per_premise).map(move |k| (h, k)))
            .collect();
        slots.shuffle(&mut rng_for(master_seed, &format!("answers/{load}")));
        let mut answers: HashMap<(usize, usize), Answer> = HashMap::new();
        for (pos, slot) in slots.into_iter().enumerate() {
            answers.insert(
                slot,
                if pos % 2 == 0 {
                    Answer::Yes
                } else {
                    Answer::No
                },
            );
        }
        for (h, host) in hosts.iter().enumerate() {
            for k in 0..per_premise {
                let id = format!("d.{}.{load}.{k}", host.stem());
                let path = format!("distract/{id}");
                let mut rng = rng_for(master_seed, &path);
                let d = generate_distractor(lex, &mut rng, n_props, answers[&(h, k)], &host.pair)?;
                items.push(distractor_item(
                    id,
                    d,
                    load,
                    ItemKind::Distractor,
                    Provenance { master_seed, path },
                ));
            }
        }
    }

    let qualification = build_qualification(lex, config.qualification_items, master_seed)?;
    Ok(Dataset {
        items,
        qualification,
    })
}

/// Filler-only screening items with 1 to 3 propositions, half yes and half no.
pub fn build_qualification(
    lex: &Lexicon,
    n: usize,
    master_seed: u64,
) -> Result<Vec<DatasetItem>, ListingError> {
    let mut out = Vec::with_capacity(n);
    for q in 0..n {
        let id = format!("q-{q:02}");
        let path = format!("qualification/{id}");
        let mut rng = rng_for(master_seed, &path);
        let want = if q % 2 == 0 { Answer::Yes } else { Answer::No };
        let n_props = 1 + q % 3;
        let fillers = (0..n_props)
            .map(|_| generate_filler(lex, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let mut connectives = Connective::ALL.to_vec();
        connectives.shuffle(&mut rng);
        connectives.truncate(n_props - 1);
        let probe = rng.random_range(0..n_props);
        let asked = match want {
            Answer::Yes => fillers[probe].clone(),
            Answer::No => fillers[probe].swapped(),
        };
        let sentences: Vec<String> = fillers.iter().map(FillerProposition::sentence).collect();
        let d = Distractor {
            premise: join_propositions(&sentences, &connectives),
            propositions: sentences,
            template: format!("qualification-{n_props}p"),
            connectives,
            target_position: 0,
            probed_position: probe + 1,
            hypothesis: asked.sentence(),
            question: asked.question(),
            label: want.label(),
            correct_answer: want,
        };
        let mut item = distractor_item(
            id,
            d,
            ItemLoad::propositions(n_props),
            ItemKind::Qualification,
            Provenance { master_seed, path },
        );
        item.target_position = None;
        out.push(item);
    }
    Ok(out)
}

fn stratum_key(item: &DatasetItem) -> (ItemKind, ItemLoad, Answer) {
    (item.kind, item.load, item.correct_answer)
}

/// Splits items into `n_lists` lists by dealing each (kind, load, answer)
/// stratum round-robin after a seeded shuffle, then shuffling each list.
/// Every stratum must divide evenly.
pub fn partition_items(
    items: &[DatasetItem],
    n_lists: usize,
    master_seed: u64,
) -> Result<Vec<ExperimentList>, ListingError> {
    let mut strata: BTreeMap<(ItemKind, ItemLoad, Answer), Vec<&str>> = BTreeMap::new();
    for item in items {
        strata.entry(stratum_key(item)).or_default().push(&item.id);
    }
    let mut lists: Vec<ExperimentList> = (0..n_lists)
        .map(|i| ExperimentList {
            list_id: format!("list_{i:03}"),
            item_ids: Vec::new(),
        })
        .collect();
    for ((kind, load, answer), mut ids) in strata {
        let name = format!("{}.{load}.{answer}", kind.as_str());
        if ids.len() % n_lists != 0 {
            return Err(ListingError::Unbalanced {
                stratum: name,
                count: ids.len(),
                lists: n_lists,
            });
        }
        ids.shuffle(&mut rng_for(master_seed, &format!("lists/{name}")));
        for (j, id) in ids.into_iter().enumerate() {
            lists[j % n_lists].item_ids.push(id.to_owned());
        }
    }
    for list in &mut lists {
        let path = format!("lists/order/{}", list.list_id);
        list.item_ids.shuffle(&mut rng_for(master_seed, &path));
    }
    Ok(lists)
}

/// The 160 x 96 partition of a full dataset.
pub fn partition_lists(
    dataset: &Dataset,
    master_seed: u64,
) -> Result<Vec<ExperimentList>, ListingError> {
    if dataset.items.len() != LIST_COUNT * LIST_SIZE {
        return Err(ListingError::WrongSize {
            items: dataset.items.len(),
            lists: LIST_COUNT,
            size: LIST_SIZE,
        });
    }
    partition_items(&dataset.items, LIST_COUNT, master_seed)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ListingError + '_ {
    move |source| ListingError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn to_jsonl<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut buf = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut buf, r).expect("serializable");
        buf.push(b'\n');
    }
    buf
}

/// Writes `bytes` to a temporary sibling, syncs, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ListingError> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

/// Writes the items, lists and qualification files into `dir`, which must
/// already exist. Returns the written paths.
pub fn write_dataset(
    dataset: &Dataset,
    lists: &[ExperimentList],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, ListingError> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(ListingError::Io {
            path: dir.display().to_string(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "output directory does not exist",
            ),
        });
    }
    let files = [
        (ITEMS_FILE, to_jsonl(&dataset.items)),
        (LISTS_FILE, to_jsonl(lists)),
        (QUALIFICATION_FILE, to_jsonl(&dataset.qualification)),
    ];
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, ListingError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_jsonl(&text, &path.display().to_string())
}

pub fn parse_jsonl<T: serde::de::DeserializeOwned>(
    text: &str,
    source: &str,
) -> Result<Vec<T>, ListingError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ListingError::Schema {
                path: source.to_owned(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_items(path: impl AsRef<Path>) -> Result<Vec<DatasetItem>, ListingError> {
    let path = path.as_ref();
    let items: Vec<DatasetItem> = read_jsonl(path)?;
    for (i, item) in items.iter().enumerate() {
        item.check().map_err(|message| ListingError::Schema {
            path: path.display().to_string(),
            line: i + 1,
            message,
        })?;
    }
    Ok(items)
}

pub fn read_lists(path: impl AsRef<Path>) -> Result<Vec<ExperimentList>, ListingError> {
    read_jsonl(path.as_ref())
}

/// Reads the files written by [`write_dataset`] and re-checks consistency.
/// The qualification file is optional.
pub fn read_dataset(dir: impl AsRef<Path>) -> Result<(Dataset, Vec<ExperimentList>), ListingError> {
    let dir = dir.as_ref();
    let items = read_items(dir.join(ITEMS_FILE))?;
    let lists = read_lists(dir.join(LISTS_FILE))?;
    let qpath = dir.join(QUALIFICATION_FILE);
    let qualification = if qpath.exists() {
        read_items(&qpath)?
    } else {
        Vec::new()
    };
    let dataset = Dataset {
        items,
        qualification,
    };
    check_consistency(&dataset, &lists)?;
    Ok((dataset, lists))
}

/// Unique ids, every list entry resolves, lists are disjoint and agree with
/// each item's `list_id`.
pub fn check_consistency(dataset: &Dataset, lists: &[ExperimentList]) -> Result<(), ListingError> {
    let mut ids = HashSet::new();
    for item in dataset.items.iter().chain(&dataset.qualification) {
        if !ids.insert(item.id.as_str()) {
            return Err(ListingError::Inconsistent(format!(
                "duplicate id {}",
                item.id
            )));
        }
    }
    let by_id = dataset.by_id();
    let mut seen = HashSet::new();
    for list in lists {
        for id in &list.item_ids {
            let item = by_id.get(id.as_str()).ok_or_else(|| {
                ListingError::Inconsistent(format!("{} references unknown item {id}", list.list_id))
            })?;
            if !seen.insert(id.as_str()) {
                return Err(ListingError::Inconsistent(format!(
                    "{id} appears in more than one list"
                )));
            }
            if item.list_id.as_deref().is_some_and(|l| l != list.list_id) {
                return Err(ListingError::Inconsistent(format!(
                    "{id} is in {} but records list_id {:?}",
                    list.list_id, item.list_id
                )));
            }
        }
    }
    Ok(())
}
