//! Scores synthetic human responses and model predictions against a built
//! corpus and prints a breakdown by memory load and plausibility.
//!
//! ```bash
//! cargo run --release --example score_responses
//! ```

use std::collections::HashMap;

use chrono::Utc;
use gelp::expserver::ResponseRecord;
use gelp::labels::{Answer, Label};
use gelp::lexicon::Lexicon;
use gelp::listing::{build_dataset, BuildConfig, ItemLoad};
use gelp::scoring::{breakdown_report, human_answers, Dimension, Metric};
use gelp::seeder::parse_bank;
use gelp::seeding::rng_for;
use rand::Rng;

fn main() -> anyhow::Result<()> {
    let lex = Lexicon::bundled_sample();
    let bank = parse_bank(gelp::bundled::SAMPLE_BANK, "sample_bank.jsonl")?;
    let dataset = build_dataset(&lex, &bank, &BuildConfig::default(), 42)?;

    // three simulated responses per target; accuracy falls with load
    let mut rng = rng_for(7, "example/score");
    let mut records = Vec::new();
    for item in dataset.targets() {
        let p_correct = match item.load {
            ItemLoad::Low => 0.93,
            ItemLoad::Medium => 0.86,
            _ => 0.81,
        };
        for w in 0..3 {
            let right = rng.random_bool(p_correct);
            records.push(ResponseRecord {
                worker_id: format!("w{w}"),
                item_id: item.id.clone(),
                list_id: String::new(),
                response: if right {
                    item.correct_answer
                } else {
                    item.correct_answer.flip()
                },
                rt_premise_ms: 0,
                rt_question_ms: 0,
                timestamp: Utc::now(),
            });
        }
    }
    let humans: HashMap<String, Answer> = human_answers(&records)
        .into_iter()
        .map(|(id, h)| (id, h.answer))
        .collect();

    // a model that always answers entailment
    let preds: HashMap<String, Label> = dataset
        .targets()
        .map(|t| (t.id.clone(), Label::Entailment))
        .collect();

    let report = breakdown_report(
        &dataset.items,
        &humans,
        Some(&preds),
        &[Dimension::Load, Dimension::Plausibility],
    )?;
    for metric in [
        Metric::HumanAccuracy,
        Metric::ModelAccuracy,
        Metric::Matching,
    ] {
        for row in report.groups(metric).filter(|r| !r.group.contains(',')) {
            let e = row.estimate;
            println!(
                "{:<15} {:<24} {:>5.1} ({:.1})  n={}",
                metric.as_str(),
                row.group,
                100.0 * e.p,
                100.0 * e.se,
                e.n
            );
        }
    }
    Ok(())
}
