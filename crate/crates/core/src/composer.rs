//! Medium and high memory-load premises: a target proposition coordinated
//! with one or two filler clauses of the form "the N1 V1 the N2".

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{capitalize, decapitalize, NliPair};
use crate::labels::{Answer, Label};
use crate::lexicon::{Lexicon, NounEntry, VerbEntry};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error(
        "filler lexicon needs at least one verb and two nouns (has {verbs} verbs, {nouns} nouns)"
    )]
    InsufficientFillers { verbs: usize, nouns: usize },
    #[error("connectives must differ, got {0} twice")]
    RepeatedConnective(Connective),
    #[error("target position {0} is outside 1..=3")]
    BadPosition(usize),
    #[error("{template} cannot realize a {props}-proposition premise")]
    TemplateArity { template: String, props: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connective {
    And,
    After,
    When,
    But,
    Because,
}

impl Connective {
    pub const ALL: [Connective; 5] = [
        Connective::And,
        Connective::After,
        Connective::When,
        Connective::But,
        Connective::Because,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::After => "after",
            Connective::When => "when",
            Connective::But => "but",
            Connective::Because => "because",
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Connective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Connective::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown connective {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryLoad {
    Low,
    Medium,
    High,
}

impl MemoryLoad {
    pub const ALL: [MemoryLoad; 3] = [MemoryLoad::Low, MemoryLoad::Medium, MemoryLoad::High];

    pub fn propositions(self) -> usize {
        match self {
            MemoryLoad::Low => 1,
            MemoryLoad::Medium => 2,
            MemoryLoad::High => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MemoryLoad::Low => "low",
            MemoryLoad::Medium => "medium",
            MemoryLoad::High => "high",
        }
    }
}

impl fmt::Display for MemoryLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    TargetFirst,
    FillerFirst,
}

/// "the N1 V1 the N2" with nouns and verb drawn from the filler inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillerProposition {
    pub subject: NounEntry,
    pub verb: VerbEntry,
    pub object: NounEntry,
}

impl FillerProposition {
    pub fn sentence(&self) -> String {
        capitalize(&format!(
            "the {} {} the {}.",
            self.subject.surface, self.verb.past, self.object.surface
        ))
    }

    /// The clause with subject and object exchanged.
    pub fn swapped(&self) -> FillerProposition {
        FillerProposition {
            subject: self.object.clone(),
            verb: self.verb.clone(),
            object: self.subject.clone(),
        }
    }

    pub fn question(&self) -> String {
        format!(
            "Did the {} {} the {}?",
            self.subject.surface, self.verb.lemma, self.object.surface
        )
    }
}

/// Draws a filler clause uniformly from the filler inventory, with distinct
/// subject and object.
pub fn generate_filler<R: Rng + ?Sized>(
    lex: &Lexicon,
    rng: &mut R,
) -> Result<FillerProposition, ComposeError> {
    let verbs: Vec<&VerbEntry> = lex.filler_verbs().collect();
    let nouns = lex.filler_nouns();
    if verbs.is_empty() || nouns.len() < 2 {
        return Err(ComposeError::InsufficientFillers {
            verbs: verbs.len(),
            nouns: nouns.len(),
        });
    }
    let subject = rng.random_range(0..nouns.len());
    let mut object = rng.random_range(0..nouns.len() - 1);
    if object >= subject {
        object += 1;
    }
    let verb = *verbs.choose(rng).expect("non-empty");
    Ok(FillerProposition {
        subject: nouns[subject].clone(),
        verb: verb.clone(),
        object: nouns[object].clone(),
    })
}

/// A premise shape: how many propositions, which connectives, and where the
/// target sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Template {
    Low,
    Medium {
        connective: Connective,
        order: Order,
    },
    High {
        first: Connective,
        second: Connective,
        target_position: usize,
    },
}

impl Template {
    pub fn load(&self) -> MemoryLoad {
        match self {
            Template::Low => MemoryLoad::Low,
            Template::Medium { .. } => MemoryLoad::Medium,
            Template::High { .. } => MemoryLoad::High,
        }
    }

    pub fn id(&self) -> String {
        match self {
            Template::Low => "low".to_owned(),
            Template::Medium { connective, order } => {
                let o = match order {
                    Order::TargetFirst => "tf",
                    Order::FillerFirst => "ff",
                };
                format!("medium-{connective}-{o}")
            }
            Template::High {
                first,
                second,
                target_position,
            } => format!("high-{first}-{second}-p{target_position}"),
        }
    }

    pub fn connectives(&self) -> Vec<Connective> {
        match *self {
            Template::Low => vec![],
            Template::Medium { connective, .. } => vec![connective],
            Template::High { first, second, .. } => vec![first, second],
        }
    }

    /// 1-based position of the target proposition.
    pub fn target_position(&self) -> usize {
        match *self {
            Template::Low => 1,
            Template::Medium { order, .. } => match order {
                Order::TargetFirst => 1,
                Order::FillerFirst => 2,
            },
            Template::High {
                target_position, ..
            } => target_position,
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Premise shapes for a load: 1 low, 10 medium (5 connectives x 2 orders),
/// 60 high (20 ordered distinct connective pairs x 3 target positions).
pub fn enumerate_templates(load: MemoryLoad) -> Vec<Template> {
    match load {
        MemoryLoad::Low => vec![Template::Low],
        MemoryLoad::Medium => Connective::ALL
            .into_iter()
            .flat_map(|connective| {
                [Order::TargetFirst, Order::FillerFirst]
                    .into_iter()
                    .map(move |order| Template::Medium { connective, order })
            })
            .collect(),
        MemoryLoad::High => {
            let mut out = Vec::with_capacity(60);
            for first in Connective::ALL {
                for second in Connective::ALL {
                    if first == second {
                        continue;
                    }
                    for target_position in 1..=3 {
                        out.push(Template::High {
                            first,
                            second,
                            target_position,
                        });
                    }
                }
            }
            out
        }
    }
}

/// Premise shapes crossed with the two hypothesis types. Medium load yields
/// 20 of these.
pub fn pairing_templates(load: MemoryLoad) -> Vec<(Template, Label)> {
    enumerate_templates(load)
        .into_iter()
        .flat_map(|t| [(t, Label::Entailment), (t, Label::NonEntailment)])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedItem {
    pub base: NliPair,
    pub load: MemoryLoad,
    pub propositions: Vec<String>,
    pub connectives: Vec<Connective>,
    pub target_position: usize,
    pub premise_text: String,
}

impl ComposedItem {
    pub fn hypothesis(&self) -> &str {
        &self.base.hypothesis
    }

    pub fn template(&self) -> Template {
        match self.load {
            MemoryLoad::Low => Template::Low,
            MemoryLoad::Medium => Template::Medium {
                connective: self.connectives[0],
                order: if self.target_position == 1 {
                    Order::TargetFirst
                } else {
                    Order::FillerFirst
                },
            },
            MemoryLoad::High => Template::High {
                first: self.connectives[0],
                second: self.connectives[1],
                target_position: self.target_position,
            },
        }
    }
}

/// Joins propositions into one sentence: "P1 c P2." or "P1 c1 P2, c2 P3.".
/// Non-initial propositions are lower-cased at their first character.
pub fn join_propositions(propositions: &[String], connectives: &[Connective]) -> String {
    debug_assert_eq!(propositions.len(), connectives.len() + 1);
    let mut out = String::new();
    for (i, p) in propositions.iter().enumerate() {
        let clause = p.trim_end_matches('.');
        if i == 0 {
            out.push_str(&capitalize(clause));
            continue;
        }
        if i >= 2 {
            out.push(',');
        }
        out.push(' ');
        out.push_str(connectives[i - 1].as_str());
        out.push(' ');
        out.push_str(&decapitalize(clause));
    }
    out.push('.');
    out
}

pub fn compose_low(base: &NliPair) -> ComposedItem {
    ComposedItem {
        base: base.clone(),
        load: MemoryLoad::Low,
        propositions: vec![base.premise.clone()],
        connectives: vec![],
        target_position: 1,
        premise_text: base.premise.clone(),
    }
}

pub fn compose_medium(
    base: &NliPair,
    connective: Connective,
    order: Order,
    filler: &FillerProposition,
) -> ComposedItem {
    let target = base.premise.clone();
    let (propositions, target_position) = match order {
        Order::TargetFirst => (vec![target, filler.sentence()], 1),
        Order::FillerFirst => (vec![filler.sentence(), target], 2),
    };
    let connectives = vec![connective];
    ComposedItem {
        base: base.clone(),
        load: MemoryLoad::Medium,
        premise_text: join_propositions(&propositions, &connectives),
        propositions,
        connectives,
        target_position,
    }
}

/// Places the target at `position` (1-based) and fills the other two slots
/// with `first` then `second`.
fn place(target: &str, position: usize, first: String, second: String) -> Vec<String> {
    let mut fillers = [first, second].into_iter();
    (1..=3)
        .map(|slot| {
            if slot == position {
                target.to_owned()
            } else {
                fillers.next().expect("two fillers")
            }
        })
        .collect()
}

pub fn compose_high(
    base: &NliPair,
    first: Connective,
    second: Connective,
    f1: &FillerProposition,
    f2: &FillerProposition,
    position: usize,
) -> Result<ComposedItem, ComposeError> {
    if first == second {
        return Err(ComposeError::RepeatedConnective(first));
    }
    if !(1..=3).contains(&position) {
        return Err(ComposeError::BadPosition(position));
    }
    let propositions = place(&base.premise, position, f1.sentence(), f2.sentence());
    let connectives = vec![first, second];
    Ok(ComposedItem {
        base: base.clone(),
        load: MemoryLoad::High,
        premise_text: join_propositions(&propositions, &connectives),
        propositions,
        connectives,
        target_position: position,
    })
}

/// Composes `base` into the shape described by `template`.
pub fn compose_with(
    base: &NliPair,
    template: Template,
    fillers: &[FillerProposition],
) -> Result<ComposedItem, ComposeError> {
    let need = template.load().propositions() - 1;
    if fillers.len() < need {
        return Err(ComposeError::TemplateArity {
            template: template.id(),
            props: fillers.len() + 1,
        });
    }
    match template {
        Template::Low => Ok(compose_low(base)),
        Template::Medium { connective, order } => {
            Ok(compose_medium(base, connective, order, &fillers[0]))
        }
        Template::High {
            first,
            second,
            target_position,
        } => compose_high(
            base,
            first,
            second,
            &fillers[0],
            &fillers[1],
            target_position,
        ),
    }
}

/// A multi-proposition item whose question probes a filler clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distractor {
    pub premise: String,
    pub propositions: Vec<String>,
    pub connectives: Vec<Connective>,
    /// 1-based position of the embedded target proposition.
    pub target_position: usize,
    /// 1-based position of the proposition the question asks about.
    pub probed_position: usize,
    pub hypothesis: String,
    pub question: String,
    pub label: Label,
    pub correct_answer: Answer,
    pub template: String,
}

/// Builds a distractor from an explicit template and fillers. `probe` picks
/// which filler (0-based) the question asks about; a `no` answer swaps that
/// filler's subject and object in the question.
pub fn compose_distractor(
    target: &NliPair,
    template: Template,
    fillers: &[FillerProposition],
    probe: usize,
    want: Answer,
) -> Result<Distractor, ComposeError> {
    if template == Template::Low {
        return Err(ComposeError::TemplateArity {
            template: template.id(),
            props: 1,
        });
    }
    let item = compose_with(target, template, fillers)?;
    let probe = probe.min(item.propositions.len() - 2);
    let probed = &fillers[probe];
    let asked = match want {
        Answer::Yes => probed.clone(),
        Answer::No => probed.swapped(),
    };
    let probed_sentence = probed.sentence();
    let probed_position = item
        .propositions
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 1 != item.target_position)
        .nth(probe)
        .map(|(i, _)| i + 1)
        .expect("probe within fillers");
    debug_assert_eq!(item.propositions[probed_position - 1], probed_sentence);
    Ok(Distractor {
        premise: item.premise_text,
        propositions: item.propositions,
        connectives: item.connectives,
        target_position: item.target_position,
        probed_position,
        hypothesis: asked.sentence(),
        question: asked.question(),
        label: want.label(),
        correct_answer: want,
        template: template.id(),
    })
}

/// Samples a template, fillers and the probed filler, then composes a
/// distractor with `n_props` propositions.
pub fn generate_distractor<R: Rng + ?Sized>(
    lex: &Lexicon,
    rng: &mut R,
    n_props: usize,
    want: Answer,
    target: &NliPair,
) -> Result<Distractor, ComposeError> {
    let load = match n_props {
        2 => MemoryLoad::Medium,
        3 => MemoryLoad::High,
        n => {
            return Err(ComposeError::TemplateArity {
                template: "distractor".into(),
                props: n,
            })
        }
    };
    let templates = enumerate_templates(load);
    let template = *templates.choose(rng).expect("non-empty");
    let fillers = (0..n_props - 1)
        .map(|_| generate_filler(lex, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let probe = rng.random_range(0..fillers.len());
    compose_distractor(target, template, &fillers, probe, want)
}
