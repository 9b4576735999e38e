#![allow(dead_code)]

use std::path::PathBuf;
use std::str::FromStr;

use gelp::constructions::{Construction, Plausibility, PremiseFrame};
use gelp::labels::{Answer, Label};
use gelp::lexicon::{Animacy, Lexicon, NounEntry};
use gelp::listing::{DatasetItem, ItemKind, ItemLoad};
use gelp::seeding::Provenance;
use proptest::prelude::*;

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn golden_rows(name: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(golden(name))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').map(str::to_owned).collect())
        .collect()
}

/// Builds a frame from golden columns: construction, verb, animate,
/// inanimate, extra, plausibility.
pub fn frame(lex: &Lexicon, cols: &[String]) -> PremiseFrame {
    let construction = Construction::from_str(&cols[0]).unwrap();
    let verb = lex
        .verbs_in(construction.verb_class())
        .find(|v| v.lemma == cols[1])
        .unwrap_or_else(|| panic!("{} is not a {} verb", cols[1], construction))
        .clone();
    PremiseFrame {
        construction,
        verb,
        animate_np: NounEntry::animate(&cols[2]),
        inanimate_np: NounEntry::inanimate(&cols[3]),
        extra_np: (!cols[4].is_empty()).then(|| NounEntry::animate(&cols[4])),
        plausibility: match cols[5].as_str() {
            "plausible" => Plausibility::Plausible,
            "implausible" => Plausibility::Implausible,
            other => panic!("{other}"),
        },
    }
}

/// Splits "Sentence. (E)" into the sentence and its label.
pub fn labelled(cell: &str) -> (String, Label) {
    let (s, tag) = cell.rsplit_once(" (").unwrap();
    let label = match tag {
        "E)" => Label::Entailment,
        "N)" => Label::NonEntailment,
        other => panic!("{other}"),
    };
    (s.to_owned(), label)
}

/// Random well-formed frames over the bundled lexicon.
pub fn arb_frame() -> impl Strategy<Value = PremiseFrame> {
    let lex = Lexicon::bundled_sample();
    let animate: Vec<NounEntry> = lex
        .nouns()
        .iter()
        .filter(|n| n.animacy == Animacy::Animate)
        .cloned()
        .collect();
    let inanimate: Vec<NounEntry> = lex
        .nouns()
        .iter()
        .filter(|n| n.animacy == Animacy::Inanimate)
        .cloned()
        .collect();
    (
        0..Construction::ALL.len(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<bool>(),
    )
        .prop_map(move |(c, v, a, i, x, plausible)| {
            let construction = Construction::ALL[c];
            let verbs: Vec<_> = lex.verbs_in(construction.verb_class()).collect();
            let animate_np = a.get(&animate).clone();
            let mut extra = x.get(&animate).clone();
            if extra == animate_np {
                let k = (x.index(animate.len()) + 1) % animate.len();
                extra = animate[k].clone();
            }
            PremiseFrame {
                construction,
                verb: v.get(&verbs).to_owned().clone(),
                animate_np,
                inanimate_np: i.get(&inanimate).clone(),
                extra_np: construction.has_extra_np().then_some(extra),
                plausibility: if plausible {
                    Plausibility::Plausible
                } else {
                    Plausibility::Implausible
                },
            }
        })
}

/// A low-content target item with the given gold answer and load.
pub fn scoring_item(id: usize, gold: Answer, load: ItemLoad) -> DatasetItem {
    DatasetItem {
        id: format!("i{id}"),
        kind: ItemKind::Target,
        construction: Some(gelp::constructions::Construction::Transitive),
        plausibility: Some(gelp::constructions::Plausibility::Plausible),
        load,
        connectives: vec![],
        target_position: Some(1),
        premise: "The boy kicked the ball.".into(),
        hypothesis: "The boy kicked the ball.".into(),
        label: gold.label(),
        question: "Did the boy kick the ball?".into(),
        correct_answer: gold,
        template_id: "low".into(),
        list_id: None,
        seed_provenance: Provenance {
            master_seed: 0,
            path: String::new(),
        },
    }
}

/// Crafted seeder violations: text, construction, and a fragment of the
/// expected reason.
pub const VIOLATIONS: [(&str, Construction, &str); 10] = [
    ("He bent the spoon.", Construction::Transitive, "pronoun"),
    ("The boy bent it.", Construction::Transitive, "pronoun"),
    (
        "The tall boy bent the spoon.",
        Construction::Transitive,
        "modifier",
    ),
    (
        "The boy bent the shiny spoon.",
        Construction::Transitive,
        "modifier",
    ),
    (
        "The spoon bent the boy.",
        Construction::Transitive,
        "should be animate",
    ),
    (
        "The boy bent the girl.",
        Construction::Transitive,
        "should be inanimate",
    ),
    (
        "The boy surprised the spoon.",
        Construction::Transitive,
        "not a transitive verb",
    ),
    (
        "The boy bent the spoon to the girl.",
        Construction::Transitive,
        "expected shape",
    ),
    (
        "The boy gave the girl.",
        Construction::Doc,
        "expected shape",
    ),
    (
        "The ball was kicked by the boy the girl.",
        Construction::Passive,
        "expected shape",
    ),
];
