mod common;

use std::collections::{HashMap, HashSet};

use chrono::Utc;
use gelp::composer::{
    compose_high, compose_medium, generate_filler, Connective, MemoryLoad, Order,
};
use gelp::constructions::{
    make_hypotheses, realize_premise, swap_arguments, to_polar_question, HypothesisMode,
};
use gelp::expserver::{AssignPlan, Event, Ledger, QualificationResult, ResponseRecord};
use gelp::labels::{Answer, Label};
use gelp::lexicon::Lexicon;
use gelp::listing::{DatasetItem, ExperimentList, ItemLoad};
use gelp::scoring::{accuracy, matching_score, Selector};
use gelp::seeding::rng_for;
use proptest::prelude::*;

fn lex() -> &'static Lexicon {
    use std::sync::OnceLock;
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(Lexicon::bundled_sample)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn swap_is_an_involution(f in common::arb_frame()) {
        prop_assert_eq!(swap_arguments(&swap_arguments(&f)), f);
    }

    #[test]
    fn one_entailment_per_pair(f in common::arb_frame(), faithful in any::<bool>()) {
        let mode = if faithful { HypothesisMode::TableFaithful } else { HypothesisMode::Logical };
        let pairs = make_hypotheses(&f, mode, lex()).unwrap();
        let entailed = pairs.iter().filter(|p| p.label == Label::Entailment).count();
        prop_assert_eq!(entailed, 1);
        let identical = pairs.iter().filter(|p| p.hypothesis == p.premise).count();
        prop_assert_eq!(identical, 1);
        for p in &pairs {
            prop_assert_eq!(p.label.answer(), p.correct_answer);
            prop_assert_eq!(p.correct_answer.label(), p.label);
            prop_assert!(p.premise.ends_with('.') && p.hypothesis.ends_with('.'));
            prop_assert!(p.question.ends_with('?'));
        }
    }

    #[test]
    fn logical_labels_follow_the_surface_string(f in common::arb_frame()) {
        let a = make_hypotheses(&f, HypothesisMode::Logical, lex()).unwrap();
        let b = make_hypotheses(&swap_arguments(&f), HypothesisMode::Logical, lex()).unwrap();
        let entailed = |ps: &[gelp::constructions::NliPair; 2]| {
            ps.iter().find(|p| p.label == Label::Entailment).unwrap().hypothesis.clone()
        };
        prop_assert_ne!(entailed(&a), entailed(&b));
        prop_assert_eq!(entailed(&a), realize_premise(&f).unwrap());
        prop_assert_eq!(entailed(&b), realize_premise(&swap_arguments(&f)).unwrap());
    }

    #[test]
    fn swap_changes_exactly_two_noun_slots(f in common::arb_frame()) {
        let a = realize_premise(&f).unwrap().to_lowercase();
        let b = realize_premise(&swap_arguments(&f)).unwrap().to_lowercase();
        let ta: Vec<&str> = a.split(' ').collect();
        let tb: Vec<&str> = b.split(' ').collect();
        prop_assert_eq!(ta.len(), tb.len());
        let diff: Vec<usize> = (0..ta.len()).filter(|&i| ta[i] != tb[i]).collect();
        prop_assert_eq!(diff.len(), 2);
        let nouns = [f.animate_np.surface.as_str(), f.inanimate_np.surface.as_str()];
        for i in diff {
            let tok = ta[i].trim_end_matches('.');
            prop_assert!(nouns.contains(&tok), "{} is not a swapped noun", tok);
        }
    }

    #[test]
    fn questions_keep_content_words(f in common::arb_frame()) {
        let premise = realize_premise(&f).unwrap();
        let q = to_polar_question(&premise, &f, lex()).unwrap();
        prop_assert!(q.starts_with("Did ") || q.starts_with("Was "));
        for n in f.surface_nouns() {
            prop_assert!(q.contains(&n.surface));
        }
        prop_assert!(q.contains(&f.verb.lemma) || q.contains(&f.verb.participle));
    }

    #[test]
    fn composition_preserves_base_fields(
        f in common::arb_frame(),
        seed in any::<u64>(),
        c1 in 0..5usize,
        c2 in 0..4usize,
        pos in 1..=3usize,
        target_first in any::<bool>(),
    ) {
        let [base, _] = make_hypotheses(&f, HypothesisMode::Logical, lex()).unwrap();
        let mut rng = rng_for(seed, "prop");
        let f1 = generate_filler(lex(), &mut rng).unwrap();
        let f2 = generate_filler(lex(), &mut rng).unwrap();
        prop_assert_ne!(&f1.subject, &f1.object);
        let first = Connective::ALL[c1];
        let others: Vec<Connective> = Connective::ALL.into_iter().filter(|c| *c != first).collect();
        let second = others[c2];
        let order = if target_first { Order::TargetFirst } else { Order::FillerFirst };
        let m = compose_medium(&base, first, order, &f1);
        let h = compose_high(&base, first, second, &f1, &f2, pos).unwrap();
        for (item, load) in [(&m, MemoryLoad::Medium), (&h, MemoryLoad::High)] {
            prop_assert_eq!(item.load, load);
            prop_assert_eq!(&item.base, &base);
            prop_assert_eq!(item.propositions.len(), load.propositions());
            prop_assert_eq!(item.connectives.len(), load.propositions() - 1);
            prop_assert!(item.premise_text.ends_with('.'));
            let target = base.premise.trim_end_matches('.');
            let tail = &target[1..];
            prop_assert!(item.premise_text.contains(tail));
        }
        prop_assert_ne!(h.connectives[0], h.connectives[1]);
        prop_assert_eq!(h.target_position, pos);
    }
}

#[test]
fn base_form_round_trips_whole_inventory() {
    for v in lex().verbs() {
        assert_eq!(lex().base_form(&v.past).unwrap(), v.lemma, "{}", v.past);
    }
}

fn answer(b: bool) -> Answer {
    if b {
        Answer::Yes
    } else {
        Answer::No
    }
}

proptest! {
    #[test]
    fn flipping_one_prediction_moves_matching_by_one_over_n(
        rows in prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>()), 1..200),
        which in any::<prop::sample::Index>(),
    ) {
        let items: Vec<DatasetItem> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| common::scoring_item(i, answer(r.0), ItemLoad::Low))
            .collect();
        let humans: HashMap<String, Answer> =
            rows.iter().enumerate().map(|(i, r)| (format!("i{i}"), answer(r.1))).collect();
        let mut preds: HashMap<String, Label> =
            rows.iter().enumerate().map(|(i, r)| (format!("i{i}"), answer(r.2).label())).collect();
        let before = matching_score(&items, &preds, &humans, &Selector::all()).unwrap();
        let k = format!("i{}", which.index(rows.len()));
        let flipped = preds[&k].answer().flip().label();
        preds.insert(k, flipped);
        let after = matching_score(&items, &preds, &humans, &Selector::all()).unwrap();
        let n = rows.len() as f64;
        prop_assert!(((after.p - before.p).abs() - 1.0 / n).abs() < 1e-12);
    }

    #[test]
    fn matching_is_invariant_under_relabeling(
        rows in prop::collection::vec((any::<bool>(), any::<bool>()), 1..100),
    ) {
        let items: Vec<DatasetItem> = rows
            .iter()
            .enumerate()
            .map(|(i, _)| common::scoring_item(i, Answer::Yes, ItemLoad::Low))
            .collect();
        let humans: HashMap<String, Answer> =
            rows.iter().enumerate().map(|(i, r)| (format!("i{i}"), answer(r.0))).collect();
        let preds: HashMap<String, Label> =
            rows.iter().enumerate().map(|(i, r)| (format!("i{i}"), answer(r.1).label())).collect();
        // apply the yes<->no bijection to both sides
        let humans_flipped: HashMap<String, Answer> =
            humans.iter().map(|(k, v)| (k.clone(), v.flip())).collect();
        let preds_flipped: HashMap<String, Label> =
            preds.iter().map(|(k, v)| (k.clone(), v.answer().flip().label())).collect();
        let a = matching_score(&items, &preds, &humans, &Selector::all()).unwrap();
        let b = matching_score(&items, &preds_flipped, &humans_flipped, &Selector::all()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn union_score_is_weighted_mean_of_groups(
        rows in prop::collection::vec((any::<bool>(), any::<bool>(), 0..3usize), 3..300),
    ) {
        let loads = [ItemLoad::Low, ItemLoad::Medium, ItemLoad::High];
        let items: Vec<DatasetItem> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| common::scoring_item(i, answer(r.0), loads[r.2]))
            .collect();
        let humans: HashMap<String, Answer> =
            rows.iter().enumerate().map(|(i, r)| (format!("i{i}"), answer(r.1))).collect();
        let all = accuracy(&items, &humans, &Selector::all()).unwrap();
        let mut weighted = 0.0;
        let mut total = 0;
        for l in ["low", "medium", "high"] {
            if let Ok(e) = accuracy(&items, &humans, &Selector::all().with(gelp::scoring::Dimension::Load, l)) {
                weighted += e.p * e.n as f64;
                total += e.n;
            }
        }
        prop_assert_eq!(total, all.n);
        prop_assert!((weighted / total as f64 - all.p).abs() < 1e-12);
    }
}

#[derive(Debug, Clone)]
enum Op {
    Assign(usize),
    Answer(usize, usize),
    Expire,
}

fn arb_ops() -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        prop_oneof![
            3 => (0..6usize).prop_map(Op::Assign),
            8 => (0..6usize, 0..4usize).prop_map(|(w, k)| Op::Answer(w, k)),
            1 => Just(Op::Expire),
        ],
        1..300,
    )
}

proptest! {
    #[test]
    fn ledger_invariants_hold_under_any_interleaving(ops in arb_ops()) {
        let lists: Vec<ExperimentList> = (0..4)
            .map(|l| ExperimentList {
                list_id: format!("list_{l:03}"),
                item_ids: (0..4).map(|i| format!("i{l}.{i}")).collect(),
            })
            .collect();
        let mut ledger = Ledger::new(&lists);
        let mut log: Vec<Event> = Vec::new();
        let workers: Vec<String> = (0..6).map(|w| format!("w{w}")).collect();
        let mut commit = |ledger: &mut Ledger, e: Event| {
            ledger.apply(&e);
            log.push(e);
        };
        for w in &workers {
            commit(&mut ledger, Event::Qualification {
                result: QualificationResult { worker_id: w.clone(), n_correct: 20, total: 20, passed: true },
                at: Utc::now(),
            });
        }
        let mut assigned: HashMap<&str, Vec<String>> = HashMap::new();
        for op in ops {
            match op {
                Op::Assign(w) => {
                    if let Ok(AssignPlan::New(e)) = ledger.plan_assign(&workers[w], Utc::now()) {
                        if let Event::Assign { list_id, .. } = &e {
                            assigned.entry(&workers[w]).or_default().push(list_id.clone());
                        }
                        commit(&mut ledger, e);
                    }
                }
                Op::Answer(w, k) => {
                    let Some(p) = ledger.pending(&workers[w]).cloned() else { continue };
                    let open = p.open_items();
                    let item = &open[k % open.len()];
                    let rec = ResponseRecord {
                        worker_id: workers[w].clone(),
                        item_id: item.clone(),
                        list_id: p.list_id.clone(),
                        response: Answer::Yes,
                        rt_premise_ms: 1,
                        rt_question_ms: 1,
                        timestamp: Utc::now(),
                    };
                    prop_assert!(ledger.check_record(&rec).is_ok());
                    commit(&mut ledger, Event::Response { record: rec, at: Utc::now() });
                }
                Op::Expire => {
                    let later = Utc::now() + chrono::Duration::days(1);
                    for e in ledger.stale(later, chrono::Duration::hours(1)) {
                        commit(&mut ledger, e);
                    }
                }
            }
            let progress = ledger.progress();
            prop_assert!(progress.max_count <= 3);
        }
        for lists in assigned.values() {
            let unique: HashSet<&String> = lists.iter().collect();
            prop_assert_eq!(unique.len(), lists.len());
        }
        prop_assert_eq!(Ledger::replay(&lists, &log), ledger);
    }
}
