//! Builds the full corpus from the bundled lexicon and premise bank,
//! partitions it into lists, and writes the JSONL files.
//!
//! ```bash
//! cargo run --release --example build_corpus -- /tmp/gelp-out 42
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use gelp::lexicon::Lexicon;
use gelp::listing::{build_dataset, partition_lists, write_dataset, BuildConfig};
use gelp::seeder::parse_bank;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "gelp-out".into());
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);

    let start = Instant::now();
    let lex = Lexicon::bundled_sample();
    let bank = parse_bank(gelp::bundled::SAMPLE_BANK, "sample_bank.jsonl")?;
    let mut dataset = build_dataset(&lex, &bank, &BuildConfig::default(), seed)?;
    let lists = partition_lists(&dataset, seed)?;
    dataset.attach_lists(&lists);

    let mut counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for item in &dataset.items {
        *counts
            .entry((item.kind.as_str(), item.load.as_str()))
            .or_default() += 1;
    }
    for ((kind, load), n) in &counts {
        println!("{kind:<12} {load:<7} {n:>5}");
    }
    println!("{} lists of {}", lists.len(), lists[0].item_ids.len());
    println!(
        "first item of {}: {}",
        lists[0].list_id, lists[0].item_ids[0]
    );

    std::fs::create_dir_all(&out)?;
    write_dataset(&dataset, &lists, &out)?;
    println!("wrote {out} in {:.2?}", start.elapsed());
    Ok(())
}
