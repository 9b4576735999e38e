//! Runs the experiment server in-process on a small corpus and walks one
//! simulated worker through qualification, a session and one response.
//!
//! ```bash
//! cargo run --example experiment_server
//! ```

use std::time::Duration;

use gelp::expserver::{Server, ServerConfig};
use gelp::lexicon::Lexicon;
use gelp::listing::{
    build_dataset, partition_lists, write_dataset, BuildConfig, ITEMS_FILE, LISTS_FILE,
    QUALIFICATION_FILE,
};
use gelp::seeder::parse_bank;
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join(format!("gelp-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let lex = Lexicon::bundled_sample();
    let bank = parse_bank(gelp::bundled::SAMPLE_BANK, "sample_bank.jsonl")?;
    let mut dataset = build_dataset(&lex, &bank, &BuildConfig::default(), 42)?;
    let lists = partition_lists(&dataset, 42)?;
    dataset.attach_lists(&lists);
    write_dataset(&dataset, &lists, &dir)?;

    let server = Server::bind(&ServerConfig {
        items: dir.join(ITEMS_FILE),
        lists: dir.join(LISTS_FILE),
        qualification: dir.join(QUALIFICATION_FILE),
        log: dir.join("gelp.log.jsonl"),
        static_dir: None,
        addr: "127.0.0.1:0".parse()?,
        fsync: true,
        pending_timeout: Duration::from_secs(7200),
    })
    .await?;
    let base = format!("http://{}", server.local_addr());
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let handle = tokio::spawn(server.run_until(async {
        stopped.await.ok();
    }));
    println!("serving on {base}");

    let http = reqwest::Client::new();
    let answers: Vec<Value> = dataset
        .qualification
        .iter()
        .map(|q| json!({"item_id": q.id, "response": q.correct_answer}))
        .collect();
    let qual: Value = http
        .post(format!("{base}/api/qualification"))
        .json(&json!({"worker_id": "demo", "answers": answers}))
        .send()
        .await?
        .json()
        .await?;
    println!("qualification: {qual}");

    let session: Value = http
        .post(format!("{base}/api/session"))
        .json(&json!({"worker_id": "demo"}))
        .send()
        .await?
        .json()
        .await?;
    let first = &session["items"][0];
    println!(
        "{}: {} items; first: {} / {}",
        session["list_id"],
        session["items"].as_array().map_or(0, Vec::len),
        first["premise"],
        first["question"]
    );

    let ack: Value = http
        .post(format!("{base}/api/response"))
        .json(&json!({
            "worker_id": "demo",
            "item_id": first["id"],
            "list_id": session["list_id"],
            "response": "yes",
            "rt_premise_ms": 2150,
            "rt_question_ms": 940,
        }))
        .send()
        .await?
        .json()
        .await?;
    println!("response: {ack}");

    let progress: Value = http
        .get(format!("{base}/api/progress"))
        .send()
        .await?
        .json()
        .await?;
    println!(
        "progress: {} responses, {} pending, completion {}",
        progress["responses"], progress["pending"], progress["completion"]
    );

    stop.send(()).ok();
    handle.await??;
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
