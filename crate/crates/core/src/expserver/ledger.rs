use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::labels::Answer;
use crate::listing::ExperimentList;

use super::{QualificationResult, ResponseRecord};

pub const RESPONSES_PER_ITEM: u32 = 3;

/// One line of the append-only log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Qualification {
        result: QualificationResult,
        at: DateTime<Utc>,
    },
    Assign {
        worker_id: String,
        list_id: String,
        item_ids: Vec<String>,
        at: DateTime<Utc>,
    },
    Response {
        record: ResponseRecord,
        at: DateTime<Utc>,
    },
    Expire {
        worker_id: String,
        list_id: String,
        at: DateTime<Utc>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignError {
    #[error("worker {0} has not passed qualification")]
    Unqualified(String),
    #[error("no eligible list left for worker {0}")]
    Exhausted(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("worker {worker_id} holds no assignment containing {item_id} in {list_id}")]
    NoAssignment {
        worker_id: String,
        item_id: String,
        list_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pending {
    pub list_id: String,
    pub item_ids: Vec<String>,
    pub remaining: BTreeSet<String>,
    pub last_activity: DateTime<Utc>,
}

impl Pending {
    /// Unanswered items in presentation order.
    pub fn open_items(&self) -> Vec<String> {
        self.item_ids
            .iter()
            .filter(|i| self.remaining.contains(*i))
            .cloned()
            .collect()
    }
}

pub enum AssignPlan {
    Resume,
    New(Event),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordCheck {
    Fresh,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Progress {
    pub items_total: usize,
    pub responses: u64,
    pub completion: f64,
    pub min_count: u32,
    pub max_count: u32,
    pub pending: usize,
    pub qualified_workers: usize,
    pub per_list_served: BTreeMap<String, u32>,
    pub per_item: BTreeMap<String, u32>,
}

/// Assignment and response state, a pure fold over [`Event`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ledger {
    lists: BTreeMap<String, Vec<String>>,
    counts: HashMap<String, u32>,
    inflight: HashMap<String, u32>,
    answered: HashSet<(String, String)>,
    seen: HashMap<String, BTreeSet<String>>,
    completed: HashMap<String, BTreeSet<String>>,
    served: BTreeMap<String, u32>,
    pending: BTreeMap<String, Pending>,
    qualifications: HashMap<String, QualificationResult>,
}

impl Ledger {
    pub fn new(lists: &[ExperimentList]) -> Ledger {
        let mut ledger = Ledger::default();
        for l in lists {
            ledger.lists.insert(l.list_id.clone(), l.item_ids.clone());
            ledger.served.insert(l.list_id.clone(), 0);
            for id in &l.item_ids {
                ledger.counts.insert(id.clone(), 0);
                ledger.inflight.insert(id.clone(), 0);
            }
        }
        ledger
    }

    pub fn replay<'a>(
        lists: &[ExperimentList],
        events: impl IntoIterator<Item = &'a Event>,
    ) -> Ledger {
        let mut ledger = Ledger::new(lists);
        for e in events {
            ledger.apply(e);
        }
        ledger
    }

    pub fn apply(&mut self, event: &Event) {
        match event {
            Event::Qualification { result, .. } => {
                self.qualifications
                    .entry(result.worker_id.clone())
                    .or_insert_with(|| result.clone());
            }
            Event::Assign {
                worker_id,
                list_id,
                item_ids,
                at,
            } => {
                self.seen
                    .entry(worker_id.clone())
                    .or_default()
                    .insert(list_id.clone());
                for id in item_ids {
                    *self.inflight.entry(id.clone()).or_default() += 1;
                }
                self.pending.insert(
                    worker_id.clone(),
                    Pending {
                        list_id: list_id.clone(),
                        item_ids: item_ids.clone(),
                        remaining: item_ids.iter().cloned().collect(),
                        last_activity: *at,
                    },
                );
            }
            Event::Response { record, at } => {
                let key = (record.worker_id.clone(), record.item_id.clone());
                if !self.answered.insert(key) {
                    return;
                }
                *self.counts.entry(record.item_id.clone()).or_default() += 1;
                let Some(p) = self.pending.get_mut(&record.worker_id) else {
                    return;
                };
                if p.list_id != record.list_id || !p.remaining.remove(&record.item_id) {
                    return;
                }
                if let Some(n) = self.inflight.get_mut(&record.item_id) {
                    *n = n.saturating_sub(1);
                }
                p.last_activity = *at;
                if p.remaining.is_empty() {
                    let list_id = p.list_id.clone();
                    self.pending.remove(&record.worker_id);
                    self.completed
                        .entry(record.worker_id.clone())
                        .or_default()
                        .insert(list_id.clone());
                    *self.served.entry(list_id).or_default() += 1;
                }
            }
            Event::Expire {
                worker_id, list_id, ..
            } => {
                if self
                    .pending
                    .get(worker_id)
                    .is_some_and(|p| &p.list_id == list_id)
                {
                    let p = self.pending.remove(worker_id).expect("checked");
                    for id in p.remaining {
                        if let Some(n) = self.inflight.get_mut(&id) {
                            *n = n.saturating_sub(1);
                        }
                    }
                }
            }
        }
    }

    pub fn qualification(&self, worker_id: &str) -> Option<&QualificationResult> {
        self.qualifications.get(worker_id)
    }

    pub fn pending(&self, worker_id: &str) -> Option<&Pending> {
        self.pending.get(worker_id)
    }

    pub fn completed_lists(&self, worker_id: &str) -> impl Iterator<Item = &str> {
        self.completed
            .get(worker_id)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn count(&self, item_id: &str) -> u32 {
        self.counts.get(item_id).copied().unwrap_or(0)
    }

    pub fn list_of(&self, list_id: &str) -> Option<&[String]> {
        self.lists.get(list_id).map(Vec::as_slice)
    }

    /// Expire events for pending assignments idle for longer than `timeout`.
    pub fn stale(&self, now: DateTime<Utc>, timeout: Duration) -> Vec<Event> {
        self.pending
            .iter()
            .filter(|(_, p)| now - p.last_activity > timeout)
            .map(|(w, p)| Event::Expire {
                worker_id: w.clone(),
                list_id: p.list_id.clone(),
                at: now,
            })
            .collect()
    }

    fn open_in(&self, items: &[String]) -> Vec<String> {
        items
            .iter()
            .filter(|i| {
                self.count(i) + self.inflight.get(*i).copied().unwrap_or(0) < RESPONSES_PER_ITEM
            })
            .cloned()
            .collect()
    }

    /// Decides what a session request gets: the worker's pending assignment,
    /// or the least-loaded list they have never been given (ties to the
    /// lowest id), restricted to items still below the response target.
    pub fn plan_assign(
        &self,
        worker_id: &str,
        now: DateTime<Utc>,
    ) -> Result<AssignPlan, AssignError> {
        if !self.qualifications.get(worker_id).is_some_and(|q| q.passed) {
            return Err(AssignError::Unqualified(worker_id.to_owned()));
        }
        if self.pending.contains_key(worker_id) {
            return Ok(AssignPlan::Resume);
        }
        let seen = self.seen.get(worker_id);
        let mut best: Option<(u64, &String, Vec<String>)> = None;
        for (list_id, items) in &self.lists {
            if seen.is_some_and(|s| s.contains(list_id)) {
                continue;
            }
            let open = self.open_in(items);
            if open.is_empty() {
                continue;
            }
            let load: u64 = items
                .iter()
                .map(|i| u64::from(self.count(i) + self.inflight.get(i).copied().unwrap_or(0)))
                .sum();
            if best.as_ref().is_none_or(|(b, _, _)| load < *b) {
                best = Some((load, list_id, open));
            }
        }
        let (_, list_id, item_ids) =
            best.ok_or_else(|| AssignError::Exhausted(worker_id.to_owned()))?;
        Ok(AssignPlan::New(Event::Assign {
            worker_id: worker_id.to_owned(),
            list_id: list_id.clone(),
            item_ids,
            at: now,
        }))
    }

    pub fn check_record(&self, rec: &ResponseRecord) -> Result<RecordCheck, RecordError> {
        if self
            .answered
            .contains(&(rec.worker_id.clone(), rec.item_id.clone()))
        {
            return Ok(RecordCheck::Duplicate);
        }
        match self.pending.get(&rec.worker_id) {
            Some(p) if p.list_id == rec.list_id && p.remaining.contains(&rec.item_id) => {
                Ok(RecordCheck::Fresh)
            }
            _ => Err(RecordError::NoAssignment {
                worker_id: rec.worker_id.clone(),
                item_id: rec.item_id.clone(),
                list_id: rec.list_id.clone(),
            }),
        }
    }

    pub fn progress(&self) -> Progress {
        let items_total = self.counts.len();
        let per_item: BTreeMap<String, u32> =
            self.counts.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let responses: u64 = per_item.values().map(|&v| u64::from(v)).sum();
        let target = items_total as u64 * u64::from(RESPONSES_PER_ITEM);
        let capped: u64 = per_item
            .values()
            .map(|&v| u64::from(v.min(RESPONSES_PER_ITEM)))
            .sum();
        Progress {
            items_total,
            responses,
            completion: if target == 0 {
                0.0
            } else {
                capped as f64 / target as f64
            },
            min_count: per_item.values().copied().min().unwrap_or(0),
            max_count: per_item.values().copied().max().unwrap_or(0),
            pending: self.pending.len(),
            qualified_workers: self.qualifications.values().filter(|q| q.passed).count(),
            per_list_served: self.served.clone(),
            per_item,
        }
    }

    /// Responses recorded for `worker_id` on `item_id`, if any.
    pub fn has_answered(&self, worker_id: &str, item_id: &str) -> bool {
        self.answered
            .contains(&(worker_id.to_owned(), item_id.to_owned()))
    }
}

/// Grades a qualification attempt. Passing needs strictly more than 70%.
pub fn grade_qualification(
    worker_id: &str,
    answers: &[(String, Answer)],
    gold: &HashMap<String, Answer>,
) -> Result<QualificationResult, String> {
    if answers.len() != gold.len() {
        return Err(format!(
            "expected {} answers, got {}",
            gold.len(),
            answers.len()
        ));
    }
    let mut seen = HashSet::new();
    let mut n_correct = 0u32;
    for (id, a) in answers {
        let g = gold
            .get(id)
            .ok_or_else(|| format!("unknown qualification item {id}"))?;
        if !seen.insert(id) {
            return Err(format!("item {id} answered twice"));
        }
        if g == a {
            n_correct += 1;
        }
    }
    let total = answers.len() as u32;
    Ok(QualificationResult {
        worker_id: worker_id.to_owned(),
        n_correct,
        total,
        passed: n_correct * 10 > total * 7,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists(n: usize, size: usize) -> Vec<ExperimentList> {
        (0..n)
            .map(|l| ExperimentList {
                list_id: format!("list_{l:03}"),
                item_ids: (0..size).map(|i| format!("i{l}.{i}")).collect(),
            })
            .collect()
    }

    fn qualify(ledger: &mut Ledger, w: &str) {
        ledger.apply(&Event::Qualification {
            result: QualificationResult {
                worker_id: w.into(),
                n_correct: 20,
                total: 20,
                passed: true,
            },
            at: Utc::now(),
        });
    }

    fn answer_all(ledger: &mut Ledger, w: &str) {
        let p = ledger.pending(w).unwrap().clone();
        for item in p.open_items() {
            ledger.apply(&Event::Response {
                record: ResponseRecord {
                    worker_id: w.into(),
                    item_id: item,
                    list_id: p.list_id.clone(),
                    response: Answer::Yes,
                    rt_premise_ms: 1,
                    rt_question_ms: 1,
                    timestamp: Utc::now(),
                },
                at: Utc::now(),
            });
        }
    }

    fn assign(ledger: &mut Ledger, w: &str) -> Result<String, AssignError> {
        match ledger.plan_assign(w, Utc::now())? {
            AssignPlan::Resume => {}
            AssignPlan::New(e) => ledger.apply(&e),
        }
        Ok(ledger.pending(w).unwrap().list_id.clone())
    }

    fn gold() -> HashMap<String, Answer> {
        (0..20)
            .map(|i| (format!("q-{i:02}"), Answer::Yes))
            .collect()
    }

    fn answers(correct: usize) -> Vec<(String, Answer)> {
        (0..20)
            .map(|i| {
                let a = if i < correct { Answer::Yes } else { Answer::No };
                (format!("q-{i:02}"), a)
            })
            .collect()
    }

    #[test]
    fn qualification_threshold() {
        assert!(
            grade_qualification("w", &answers(15), &gold())
                .unwrap()
                .passed
        );
        assert!(
            !grade_qualification("w", &answers(14), &gold())
                .unwrap()
                .passed
        );
        let all = grade_qualification("w", &answers(20), &gold()).unwrap();
        assert!(all.passed);
        assert_eq!(all.n_correct, 20);
        assert!(grade_qualification("w", &answers(20)[..19], &gold()).is_err());
    }

    #[test]
    fn fresh_worker_gets_lowest_list() {
        let mut l = Ledger::new(&lists(5, 4));
        qualify(&mut l, "w");
        assert_eq!(assign(&mut l, "w").unwrap(), "list_000");
    }

    #[test]
    fn unqualified_worker_is_refused() {
        let l = Ledger::new(&lists(2, 2));
        assert!(matches!(
            l.plan_assign("w", Utc::now()),
            Err(AssignError::Unqualified(_))
        ));
    }

    #[test]
    fn completed_list_never_returns() {
        let mut l = Ledger::new(&lists(3, 2));
        qualify(&mut l, "w");
        let mut got = Vec::new();
        for _ in 0..1000 {
            match assign(&mut l, "w") {
                Ok(id) => {
                    got.push(id);
                    answer_all(&mut l, "w");
                }
                Err(AssignError::Exhausted(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert_eq!(got, ["list_000", "list_001", "list_002"]);
    }

    #[test]
    fn three_workers_fill_a_list() {
        let mut l = Ledger::new(&lists(1, 3));
        for w in ["a", "b", "c", "d"] {
            qualify(&mut l, w);
        }
        for w in ["a", "b", "c"] {
            assert_eq!(assign(&mut l, w).unwrap(), "list_000");
        }
        assert!(matches!(
            assign(&mut l, "d"),
            Err(AssignError::Exhausted(_))
        ));
        for w in ["a", "b", "c"] {
            answer_all(&mut l, w);
        }
        assert_eq!(l.progress().min_count, 3);
        assert_eq!(l.progress().completion, 1.0);
    }

    #[test]
    fn expiry_releases_capacity() {
        let mut l = Ledger::new(&lists(1, 2));
        for w in ["a", "b", "c", "d"] {
            qualify(&mut l, w);
        }
        for w in ["a", "b", "c"] {
            assign(&mut l, w).unwrap();
        }
        let later = Utc::now() + Duration::hours(3);
        let stale = l.stale(later, Duration::hours(1));
        assert_eq!(stale.len(), 3);
        l.apply(&stale[0]);
        assert_eq!(assign(&mut l, "d").unwrap(), "list_000");
        // the expired worker has seen the list and cannot get it again
        let expired = match &stale[0] {
            Event::Expire { worker_id, .. } => worker_id.clone(),
            _ => unreachable!(),
        };
        assert!(matches!(
            assign(&mut l, &expired),
            Err(AssignError::Exhausted(_))
        ));
    }

    #[test]
    fn duplicate_and_unassigned_records() {
        let mut l = Ledger::new(&lists(1, 2));
        qualify(&mut l, "w");
        assign(&mut l, "w").unwrap();
        let rec = ResponseRecord {
            worker_id: "w".into(),
            item_id: "i0.0".into(),
            list_id: "list_000".into(),
            response: Answer::No,
            rt_premise_ms: 5,
            rt_question_ms: 5,
            timestamp: Utc::now(),
        };
        assert_eq!(l.check_record(&rec), Ok(RecordCheck::Fresh));
        let e = Event::Response {
            record: rec.clone(),
            at: Utc::now(),
        };
        l.apply(&e);
        assert_eq!(l.check_record(&rec), Ok(RecordCheck::Duplicate));
        l.apply(&e);
        assert_eq!(l.count("i0.0"), 1);
        let stranger = ResponseRecord {
            worker_id: "x".into(),
            ..rec
        };
        assert!(l.check_record(&stranger).is_err());
    }

    #[test]
    fn events_round_trip_through_json() {
        let e = Event::Assign {
            worker_id: "w".into(),
            list_id: "list_000".into(),
            item_ids: vec!["a".into()],
            at: Utc::now(),
        };
        let line = serde_json::to_string(&e).unwrap();
        assert!(line.starts_with(r#"{"event":"assign""#));
        assert_eq!(serde_json::from_str::<Event>(&line).unwrap(), e);
    }
}
