//! Command-line front end. `dispatch` is the whole program; the binary only
//! forwards its arguments and exit code.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::bundled;
use crate::constructions::{Construction, HypothesisMode};
use crate::expserver::{default_log_path, read_responses, Server, ServerConfig};
use crate::labels::Answer;
use crate::lexicon::{load_lexicon_files, validate_lexicon, Lexicon, LoadMode, VerbClass};
use crate::listing::{
    build_dataset, partition_items, read_items, write_dataset, BuildConfig, Dataset, ItemKind,
    LIST_COUNT, QUALIFICATION_FILE,
};
use crate::scoring::{breakdown_report, human_answers, parse_dimensions, read_predictions};
use crate::seeder::{
    build_prompt, fetch_candidates, parse_bank, parse_candidates, read_bank, revalidate,
    validate_premise, write_bank, write_review_queue, EndpointConfig, PromptSpec, ReviewStatus,
};

const USAGE_EXIT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "gelp",
    version,
    about = "Build, serve and score GELP evaluation suites"
)]
struct Cli {
    /// Flat key=value file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load lexicon files and report invariant violations.
    LexiconCheck(LexiconCheckArgs),
    /// Generate candidate premises, or re-validate a bank offline.
    Seed(SeedArgs),
    /// Build the full dataset and its experiment lists.
    Build(BuildArgs),
    /// Re-partition an existing items file into experiment lists.
    Lists(ListsArgs),
    /// Run the experiment server.
    Serve(ServeArgs),
    /// Score human responses and optional model predictions.
    Score(ScoreArgs),
}

#[derive(Args, Debug)]
struct LexiconArgs {
    /// Lexicon file; repeat to merge several. Defaults to the bundled sample.
    #[arg(long = "lexicon", value_name = "FILE")]
    lexicon: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct LexiconCheckArgs {
    #[command(flatten)]
    lex: LexiconArgs,
    /// strict or sample
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug)]
struct SeedArgs {
    #[command(flatten)]
    lex: LexiconArgs,
    /// Construction to generate premises for.
    #[arg(long)]
    construction: Option<String>,
    /// Re-validate an existing bank instead of calling the endpoint.
    #[arg(long)]
    offline: bool,
    /// Premise bank to re-validate (offline mode).
    #[arg(long, value_name = "FILE")]
    bank: Option<PathBuf>,
    /// Where to write validated candidates.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write candidates that need a human decision.
    #[arg(long, value_name = "FILE")]
    review: Option<PathBuf>,
    /// Print the prompt and exit without contacting the endpoint.
    #[arg(long)]
    print_prompt: bool,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    lex: LexiconArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Premise bank; defaults to the bundled sample bank.
    #[arg(long, value_name = "FILE")]
    bank: Option<PathBuf>,
    /// logical or table_faithful
    #[arg(long)]
    hypothesis_mode: Option<String>,
}

#[derive(Args, Debug)]
struct ListsArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "FILE")]
    items: Option<PathBuf>,
    /// Output directory; defaults to the items file's directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, value_name = "FILE")]
    items: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    lists: Option<PathBuf>,
    /// Defaults to gelp.qualification.jsonl next to the items file.
    #[arg(long, value_name = "FILE")]
    qualification: Option<PathBuf>,
    /// Defaults to gelp.log.jsonl next to the items file.
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,
    /// 0 picks a free port.
    #[arg(long)]
    port: Option<u16>,
    #[arg(long)]
    host: Option<IpAddr>,
    /// Directory with the trial UI bundle.
    #[arg(long = "static", value_name = "DIR")]
    static_dir: Option<PathBuf>,
    /// Skip fsync after each append (flush only).
    #[arg(long)]
    no_fsync: bool,
    /// Idle seconds before a pending assignment expires.
    #[arg(long)]
    pending_timeout_secs: Option<u64>,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long, value_name = "FILE")]
    items: Option<PathBuf>,
    /// Server log containing response events.
    #[arg(long, value_name = "FILE")]
    responses: Option<PathBuf>,
    /// Model predictions, one {item_id, predicted, model_meta} per line.
    #[arg(long, value_name = "FILE")]
    preds: Option<PathBuf>,
    /// Comma-separated dimensions: load, construction, plausibility, answer.
    #[arg(long)]
    by: Option<String>,
    /// Directory for report.tsv and plotdata.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// A problem with how the command was invoked.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

/// Flat `key = value` configuration. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config(BTreeMap<String, String>);

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            map.insert(k.trim().replace('-', "_"), v.trim().to_owned());
        }
        Ok(Config(map))
    }

    pub fn load(path: &Path) -> anyhow::Result<Config> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Config::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn typed<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow::Error::new(UsageError(format!("config {key}: {e}"))))
            })
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }
}

fn required<T>(value: Option<T>, flag: &str) -> anyhow::Result<T> {
    value.ok_or_else(|| UsageError(format!("missing required --{flag}")).into())
}

fn parse_flag<T: FromStr>(value: Option<&str>, flag: &str) -> anyhow::Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| UsageError(format!("--{flag}: {e}")).into())
        })
        .transpose()
}

fn load_mode(s: &str) -> anyhow::Result<LoadMode> {
    match s {
        "strict" => Ok(LoadMode::Strict),
        "sample" => Ok(LoadMode::Sample),
        other => {
            Err(UsageError(format!("--mode: expected strict or sample, got {other:?}")).into())
        }
    }
}

fn lexicon_paths(args: &LexiconArgs, cfg: &Config) -> Vec<PathBuf> {
    if !args.lexicon.is_empty() {
        return args.lexicon.clone();
    }
    cfg.get("lexicon")
        .map(|v| v.split(',').map(|p| PathBuf::from(p.trim())).collect())
        .unwrap_or_default()
}

fn load_lex(args: &LexiconArgs, cfg: &Config, mode: LoadMode) -> anyhow::Result<Lexicon> {
    let paths = lexicon_paths(args, cfg);
    if paths.is_empty() {
        return Lexicon::parse_sources(bundled::LEXICON_SOURCES, mode).context("bundled lexicon");
    }
    Ok(load_lexicon_files(&paths, mode)?)
}

/// Runs the command line in `argv` (including the program name) and returns
/// the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE_EXIT } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            eprintln!("run with --help for usage");
            USAGE_EXIT
        }
        Err(e) => {
            let chain: Vec<String> = e.chain().map(ToString::to_string).collect();
            eprintln!("error: {}", chain.join(": "));
            1
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::LexiconCheck(a) => lexicon_check(a, &cfg),
        Command::Seed(a) => seed(a, &cfg),
        Command::Build(a) => build(a, &cfg),
        Command::Lists(a) => lists(a, &cfg),
        Command::Serve(a) => serve(a, &cfg),
        Command::Score(a) => score(a, &cfg),
    }
}

fn lexicon_check(a: LexiconCheckArgs, cfg: &Config) -> anyhow::Result<()> {
    let mode = load_mode(a.mode.as_deref().or(cfg.get("mode")).unwrap_or("sample"))?;
    // load leniently so every violation is reported, not just the first
    let lex = load_lex(&a.lex, cfg, LoadMode::Sample)?;
    let mut out = std::io::stdout().lock();
    for class in VerbClass::TARGETS {
        writeln!(out, "{}\t{}", class, lex.class_len(class))?;
    }
    writeln!(
        out,
        "filler_transitive\t{}",
        lex.class_len(VerbClass::FillerTransitive)
    )?;
    writeln!(out, "nouns\t{}", lex.nouns().len())?;
    writeln!(out, "filler_nouns\t{}", lex.filler_nouns().len())?;
    let report = validate_lexicon(&lex, mode);
    if report.is_empty() {
        writeln!(out, "ok")?;
        return Ok(());
    }
    for v in &report.violations {
        writeln!(out, "violation\t{v}")?;
    }
    bail!("{} violation(s)", report.violations.len())
}

fn seed(a: SeedArgs, cfg: &Config) -> anyhow::Result<()> {
    let lex = load_lex(&a.lex, cfg, LoadMode::Sample)?;
    let review = a.review.or_else(|| cfg.path("review"));
    let candidates = if a.offline {
        let bank = match a.bank.or_else(|| cfg.path("bank")) {
            Some(p) => read_bank(&p)?,
            None => parse_bank(bundled::SAMPLE_BANK, "sample_bank.jsonl")?,
        };
        revalidate(&bank, &lex)
    } else {
        let construction: Construction = parse_flag(a.construction.as_deref(), "construction")?
            .ok_or_else(|| UsageError("missing required --construction (or --offline)".into()))?;
        let prompt = build_prompt(&PromptSpec::for_construction(construction, &lex))?;
        if a.print_prompt {
            print!("{prompt}");
            return Ok(());
        }
        let endpoint = endpoint_config(cfg)?;
        let rt = tokio::runtime::Runtime::new()?;
        let completion = rt.block_on(fetch_candidates(&endpoint, &prompt))?;
        eprintln!("completion after {} attempt(s)", completion.attempts);
        parse_candidates(&completion.text)?
            .iter()
            .map(|s| validate_premise(s, construction, &lex))
            .collect()
    };
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &candidates {
        *tally.entry(c.review_status.as_str()).or_default() += 1;
    }
    for status in [
        ReviewStatus::AutoAccepted,
        ReviewStatus::NeedsReview,
        ReviewStatus::Rejected,
    ] {
        println!("{status}\t{}", tally.get(status.as_str()).unwrap_or(&0));
    }
    for c in candidates
        .iter()
        .filter(|c| c.review_status == ReviewStatus::Rejected)
    {
        println!(
            "rejected\t{}\t{}\t{}",
            c.construction,
            c.text,
            c.reasons.join("; ")
        );
    }
    let out = a
        .out
        .or_else(|| (!a.offline).then(|| cfg.path("bank")).flatten());
    if let Some(out) = out {
        write_bank(&out, &candidates)?;
    }
    if let Some(review) = review {
        let n = write_review_queue(&review, &candidates)?;
        println!("review queue: {n} item(s) in {}", review.display());
    }
    Ok(())
}

fn endpoint_config(cfg: &Config) -> anyhow::Result<EndpointConfig> {
    let mut e = EndpointConfig::default().with_env_key();
    if let Some(url) = cfg.get("endpoint_url") {
        e.endpoint_url = url.to_owned();
    }
    if let Some(m) = cfg.get("model_name") {
        e.model_name = m.to_owned();
    }
    if let Some(t) = cfg.typed::<f64>("temperature")? {
        e.temperature = t;
    }
    Ok(e)
}

fn require_seed(flag: Option<u64>, cfg: &Config) -> anyhow::Result<u64> {
    required(flag.or(cfg.typed::<u64>("seed")?), "seed")
}

fn build(a: BuildArgs, cfg: &Config) -> anyhow::Result<()> {
    let seed = require_seed(a.seed, cfg)?;
    let out = required(a.out.or_else(|| cfg.path("out")), "out")?;
    let mode = parse_flag::<HypothesisMode>(
        a.hypothesis_mode.as_deref().or(cfg.get("hypothesis_mode")),
        "hypothesis-mode",
    )?
    .unwrap_or_default();
    let lex = load_lex(&a.lex, cfg, LoadMode::Sample)?;
    let bank = match a.bank.or_else(|| cfg.path("bank")) {
        Some(p) => read_bank(&p)?,
        None => parse_bank(bundled::SAMPLE_BANK, "sample_bank.jsonl")?,
    };
    let config = BuildConfig {
        hypothesis_mode: mode,
        ..BuildConfig::default()
    };
    let mut dataset = build_dataset(&lex, &bank, &config, seed)?;
    let lists = crate::listing::partition_lists(&dataset, seed)?;
    dataset.attach_lists(&lists);
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    for path in write_dataset(&dataset, &lists, &out)? {
        println!("wrote {}", path.display());
    }
    summarize(&dataset, lists.len());
    Ok(())
}

fn summarize(d: &Dataset, n_lists: usize) {
    let mut counts: BTreeMap<(ItemKind, &str), usize> = BTreeMap::new();
    for i in &d.items {
        *counts.entry((i.kind, i.load.as_str())).or_default() += 1;
    }
    for ((kind, load), n) in counts {
        println!("{}\t{load}\t{n}", kind.as_str());
    }
    println!("lists\t{n_lists}");
}

fn lists(a: ListsArgs, cfg: &Config) -> anyhow::Result<()> {
    let seed = require_seed(a.seed, cfg)?;
    let items_path = required(a.items.or_else(|| cfg.path("items")), "items")?;
    let out = match a.out {
        Some(o) => o,
        None => items_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let items = read_items(&items_path)?;
    let qpath = items_path.with_file_name(QUALIFICATION_FILE);
    let qualification = if qpath.exists() {
        read_items(&qpath)?
    } else {
        Vec::new()
    };
    let mut dataset = Dataset {
        items,
        qualification,
    };
    let lists = partition_items(&dataset.items, LIST_COUNT, seed)?;
    dataset.attach_lists(&lists);
    fs::create_dir_all(&out)?;
    for path in write_dataset(&dataset, &lists, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn serve(a: ServeArgs, cfg: &Config) -> anyhow::Result<()> {
    let items = required(a.items.or_else(|| cfg.path("items")), "items")?;
    let lists = required(a.lists.or_else(|| cfg.path("lists")), "lists")?;
    let qualification = a
        .qualification
        .or_else(|| cfg.path("qualification"))
        .unwrap_or_else(|| items.with_file_name(QUALIFICATION_FILE));
    let log = a
        .log
        .or_else(|| cfg.path("log"))
        .unwrap_or_else(|| default_log_path(&items));
    let port = match a.port {
        Some(p) => p,
        None => cfg.typed::<u16>("port")?.unwrap_or(8080),
    };
    let host = match a.host {
        Some(h) => h,
        None => cfg
            .typed::<IpAddr>("host")?
            .unwrap_or(IpAddr::from([127, 0, 0, 1])),
    };
    let fsync = !a.no_fsync && cfg.typed::<bool>("fsync")?.unwrap_or(true);
    let timeout = match a.pending_timeout_secs {
        Some(s) => s,
        None => cfg
            .typed::<u64>("pending_timeout_secs")?
            .unwrap_or(2 * 3600),
    };
    let config = ServerConfig {
        items,
        lists,
        qualification,
        log,
        static_dir: a.static_dir.or_else(|| cfg.path("static_dir")),
        addr: SocketAddr::new(host, port),
        fsync,
        pending_timeout: Duration::from_secs(timeout),
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let server = Server::bind(&config).await?;
        println!("listening on http://{}", server.local_addr());
        std::io::stdout().flush()?;
        server.run_until(shutdown_signal()).await?;
        anyhow::Ok(())
    })
}

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let mut term = signal(SignalKind::terminate()).expect("signal handler");
        tokio::select! {
            _ = tokio::signal::ctrl_c() => {}
            _ = term.recv() => {}
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokio::signal::ctrl_c().await;
    }
}

fn score(a: ScoreArgs, cfg: &Config) -> anyhow::Result<()> {
    let items_path = required(a.items.or_else(|| cfg.path("items")), "items")?;
    let responses = required(a.responses.or_else(|| cfg.path("responses")), "responses")?;
    let dims = parse_dimensions(
        a.by.as_deref()
            .or(cfg.get("by"))
            .unwrap_or("load,construction,plausibility,answer"),
    )
    .map_err(|e| UsageError(e.to_string()))?;
    let items = read_items(&items_path)?;
    let records = read_responses(&responses)?;
    let humans: HashMap<String, Answer> = human_answers(&records)
        .into_values()
        .map(|h| (h.item_id, h.answer))
        .collect();
    let preds = match a.preds.or_else(|| cfg.path("preds")) {
        Some(p) => {
            let known: std::collections::HashSet<&str> =
                items.iter().map(|i| i.id.as_str()).collect();
            let records = read_predictions(&p)?;
            if let Some(bad) = records.iter().find(|r| !known.contains(r.item_id.as_str())) {
                bail!("{}: unknown item {}", p.display(), bad.item_id);
            }
            Some(
                records
                    .into_iter()
                    .map(|r| (r.item_id, r.predicted))
                    .collect::<HashMap<_, _>>(),
            )
        }
        None => None,
    };
    let report = breakdown_report(&items, &humans, preds.as_ref(), &dims)?;
    print!("{}", report.to_tsv());
    if let Some(out) = a.out.or_else(|| cfg.path("out")) {
        fs::create_dir_all(&out)?;
        report.write(&out)?;
    }
    Ok(())
}
