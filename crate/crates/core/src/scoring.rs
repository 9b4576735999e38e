//! Human accuracy, model accuracy and human-model matching, with binomial
//! standard errors and condition-wise breakdowns.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::composer::MemoryLoad;
use crate::constructions::{Construction, Plausibility};
use crate::expserver::{ResponseRecord, RESPONSES_PER_ITEM};
use crate::labels::{Answer, Label};
use crate::listing::DatasetItem;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScoreError {
    #[error("majority vote needs an odd number of responses, got {0}")]
    EvenCount(usize),
    #[error("no items selected by {0}")]
    EmptySelection(String),
    #[error("missing predictions for {} item(s): {}", .0.len(), .0.join(", "))]
    MissingPredictions(Vec<String>),
    #[error("unknown dimension {0:?} (expected load, construction, plausibility or answer)")]
    UnknownDimension(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HumanAnswer {
    pub item_id: String,
    pub answer: Answer,
    pub n_responses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub item_id: String,
    pub predicted: Label,
    #[serde(default)]
    pub model_meta: serde_json::Value,
}

/// A proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_counts(hits: usize, n: usize) -> Estimate {
        let p = hits as f64 / n as f64;
        Estimate {
            p,
            se: standard_error(p, n),
            n,
        }
    }
}

pub fn standard_error(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn majority_answer(item_id: &str, responses: &[Answer]) -> Result<HumanAnswer, ScoreError> {
    if responses.len().is_multiple_of(2) {
        return Err(ScoreError::EvenCount(responses.len()));
    }
    let yes = responses.iter().filter(|&&r| r == Answer::Yes).count();
    Ok(HumanAnswer {
        item_id: item_id.to_owned(),
        answer: if yes * 2 > responses.len() {
            Answer::Yes
        } else {
            Answer::No
        },
        n_responses: responses.len(),
    })
}

/// Majority answers for items with exactly three responses. Other items are
/// left out with a warning.
pub fn human_answers(records: &[ResponseRecord]) -> BTreeMap<String, HumanAnswer> {
    let mut by_item: BTreeMap<&str, Vec<Answer>> = BTreeMap::new();
    for r in records {
        by_item.entry(&r.item_id).or_default().push(r.response);
    }
    let mut out = BTreeMap::new();
    let mut skipped = 0usize;
    for (item, answers) in by_item {
        if answers.len() != RESPONSES_PER_ITEM as usize {
            skipped += 1;
            log::debug!("{item}: {} responses, excluded", answers.len());
            continue;
        }
        let h = majority_answer(item, &answers).expect("three is odd");
        out.insert(item.to_owned(), h);
    }
    if skipped > 0 {
        log::warn!("excluded {skipped} item(s) without exactly {RESPONSES_PER_ITEM} responses");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Load,
    Construction,
    Plausibility,
    Answer,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Load,
        Dimension::Construction,
        Dimension::Plausibility,
        Dimension::Answer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Load => "load",
            Dimension::Construction => "construction",
            Dimension::Plausibility => "plausibility",
            Dimension::Answer => "answer",
        }
    }

    /// Levels in report order.
    pub fn levels(self) -> Vec<&'static str> {
        match self {
            Dimension::Load => MemoryLoad::ALL.iter().map(|l| l.as_str()).collect(),
            Dimension::Construction => Construction::ALL.iter().map(|c| c.as_str()).collect(),
            Dimension::Plausibility => [Plausibility::Plausible, Plausibility::Implausible]
                .iter()
                .map(|p| p.as_str())
                .collect(),
            Dimension::Answer => vec![Answer::Yes.as_str(), Answer::No.as_str()],
        }
    }

    /// The item's level on this dimension, if it has one.
    pub fn level_of(self, item: &DatasetItem) -> Option<&'static str> {
        match self {
            Dimension::Load => item.load.memory_load().map(MemoryLoad::as_str),
            Dimension::Construction => item.construction.map(Construction::as_str),
            Dimension::Plausibility => item.plausibility.map(Plausibility::as_str),
            Dimension::Answer => Some(item.correct_answer.as_str()),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = ScoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.as_str() == s.trim())
            .ok_or_else(|| ScoreError::UnknownDimension(s.to_owned()))
    }
}

pub fn parse_dimensions(spec: &str) -> Result<Vec<Dimension>, ScoreError> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Dimension::from_str)
        .collect()
}

/// A conjunction of `dimension = level` conditions over target items.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selector(Vec<(Dimension, String)>);

impl Selector {
    pub fn all() -> Selector {
        Selector::default()
    }

    pub fn with(mut self, dim: Dimension, level: impl Into<String>) -> Selector {
        self.0.push((dim, level.into()));
        self
    }

    pub fn matches(&self, item: &DatasetItem) -> bool {
        item.is_target()
            && self
                .0
                .iter()
                .all(|(d, l)| d.level_of(item) == Some(l.as_str()))
    }

    pub fn conditions(&self) -> &[(Dimension, String)] {
        &self.0
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("overall");
        }
        let parts: Vec<String> = self.0.iter().map(|(d, l)| format!("{d}={l}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Proportion of selected target items whose answer equals the gold answer.
/// Items without an answer are not counted.
pub fn accuracy(
    items: &[DatasetItem],
    answers: &HashMap<String, Answer>,
    selector: &Selector,
) -> Result<Estimate, ScoreError> {
    let mut n = 0;
    let mut hits = 0;
    for item in items.iter().filter(|i| selector.matches(i)) {
        if let Some(a) = answers.get(&item.id) {
            n += 1;
            hits += usize::from(*a == item.correct_answer);
        }
    }
    if n == 0 {
        return Err(ScoreError::EmptySelection(selector.to_string()));
    }
    Ok(Estimate::from_counts(hits, n))
}

/// Proportion of selected items with a human answer where the model's label,
/// mapped to yes/no, equals that answer.
pub fn matching_score(
    items: &[DatasetItem],
    predictions: &HashMap<String, Label>,
    humans: &HashMap<String, Answer>,
    selector: &Selector,
) -> Result<Estimate, ScoreError> {
    let mut n = 0;
    let mut hits = 0;
    let mut missing = Vec::new();
    for item in items.iter().filter(|i| selector.matches(i)) {
        let Some(h) = humans.get(&item.id) else {
            continue;
        };
        match predictions.get(&item.id) {
            Some(p) => {
                n += 1;
                hits += usize::from(p.answer() == *h);
            }
            None => missing.push(item.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(ScoreError::MissingPredictions(missing));
    }
    if n == 0 {
        return Err(ScoreError::EmptySelection(selector.to_string()));
    }
    Ok(Estimate::from_counts(hits, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    HumanAccuracy,
    ModelAccuracy,
    Matching,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::HumanAccuracy => "human_accuracy",
            Metric::ModelAccuracy => "model_accuracy",
            Metric::Matching => "matching",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub metric: Metric,
    pub group: String,
    #[serde(flatten)]
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ScoreReport {
    pub rows: Vec<ReportRow>,
}

impl ScoreReport {
    pub fn get(&self, metric: Metric, group: &str) -> Option<Estimate> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.group == group)
            .map(|r| r.estimate)
    }

    pub fn groups(&self, metric: Metric) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tgroup\tn\tproportion\tse\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.4}\t{:.4}\n",
                r.metric.as_str(),
                r.group,
                r.estimate.n,
                r.estimate.p,
                r.estimate.se
            ));
        }
        out
    }

    /// Bar-chart data: for each metric, every group's conditions with its
    /// estimate, in report order.
    pub fn plot_data(&self) -> serde_json::Value {
        let mut metrics: BTreeMap<&str, Vec<serde_json::Value>> = BTreeMap::new();
        for r in &self.rows {
            let conditions: BTreeMap<&str, &str> = if r.group == "overall" {
                BTreeMap::new()
            } else {
                r.group
                    .split(',')
                    .filter_map(|kv| kv.split_once('='))
                    .collect()
            };
            metrics
                .entry(r.metric.as_str())
                .or_default()
                .push(serde_json::json!({
                    "group": r.group,
                    "conditions": conditions,
                    "n": r.estimate.n,
                    "p": r.estimate.p,
                    "se": r.estimate.se,
                }));
        }
        serde_json::json!({ "metrics": metrics })
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), ScoreError> {
        let dir = dir.as_ref();
        let io = |p: &Path, e: std::io::Error| ScoreError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        };
        let tsv = dir.join("report.tsv");
        fs::write(&tsv, self.to_tsv()).map_err(|e| io(&tsv, e))?;
        let plot = dir.join("plotdata.json");
        let text = serde_json::to_string_pretty(&self.plot_data()).expect("serializable");
        fs::write(&plot, text + "\n").map_err(|e| io(&plot, e))
    }
}

/// Selectors for the overall score, each single dimension, and each pair of
/// dimensions.
pub fn breakdown_selectors(dims: &[Dimension]) -> Vec<Selector> {
    let mut out = vec![Selector::all()];
    for &d in dims {
        for level in d.levels() {
            out.push(Selector::all().with(d, level));
        }
    }
    for (i, &a) in dims.iter().enumerate() {
        for &b in &dims[i + 1..] {
            for la in a.levels() {
                for lb in b.levels() {
                    out.push(Selector::all().with(a, la).with(b, lb));
                }
            }
        }
    }
    out
}

/// Human accuracy, and when predictions are given model accuracy and
/// matching, for every selector of [`breakdown_selectors`]. Empty groups are
/// omitted.
pub fn breakdown_report(
    items: &[DatasetItem],
    humans: &HashMap<String, Answer>,
    predictions: Option<&HashMap<String, Label>>,
    dims: &[Dimension],
) -> Result<ScoreReport, ScoreError> {
    let mut rows = Vec::new();
    let model_answers: Option<HashMap<String, Answer>> =
        predictions.map(|p| p.iter().map(|(k, v)| (k.clone(), v.answer())).collect());
    for sel in breakdown_selectors(dims) {
        let group = sel.to_string();
        let mut push = |metric, r: Result<Estimate, ScoreError>| match r {
            Ok(estimate) => {
                rows.push(ReportRow {
                    metric,
                    group: group.clone(),
                    estimate,
                });
                Ok(())
            }
            Err(ScoreError::EmptySelection(_)) => Ok(()),
            Err(e) => Err(e),
        };
        push(Metric::HumanAccuracy, accuracy(items, humans, &sel))?;
        if let (Some(preds), Some(model)) = (predictions, &model_answers) {
            push(Metric::ModelAccuracy, accuracy(items, model, &sel))?;
            push(Metric::Matching, matching_score(items, preds, humans, &sel))?;
        }
    }
    Ok(ScoreReport { rows })
}

pub fn parse_predictions(text: &str, source: &str) -> Result<Vec<PredictionRecord>, ScoreError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ScoreError::Parse {
                path: source.to_owned(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, ScoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ScoreError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_predictions(&text, &path.display().to_string())
}
