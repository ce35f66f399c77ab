use std::io::Read;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use graphqa_core::benchmark::{emit_report, load_benchmark, run_benchmark, BenchConfig, BenchmarkReport, RunConfig};
use graphqa_core::checker::check_and_repair;
use graphqa_core::cypher::parse_query;
use graphqa_core::fixture::{generate_fixture, record_oracle_transcripts, write_fixture, DefectPlan, DEFAULT_SEED};
use graphqa_core::graph::execute_query;
use graphqa_core::llm::{
    load_llm_configs, LlmGateway, StubConfig, StubReply, StubServer, TemplateSet, TranscriptStore,
};
use graphqa_core::pipeline::{answer_question, KnowledgeBase, PipelineParams};
use graphqa_server::{router, AppState, ServerOptions};

#[derive(Parser)]
#[command(
    name = "graphqa",
    version,
    about = "Question answering over a knowledge graph with LLM-generated, schema-checked Cypher"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark runs.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Serve the HTTP API (and optionally the built UI).
    Serve(ServeArgs),
    /// Answer one question and print the full trace as JSON.
    Ask(AskArgs),
    /// Check and repair a query against the graph schema; prints the repair report.
    Check(QueryArgs),
    /// Execute a query as written; prints a tab-separated table.
    Query(QueryArgs),
    /// Print the schema text shown to the model.
    Schema(SchemaArgs),
    /// Write the synthetic fixture graph, transforms and benchmark.
    Fixture(FixtureArgs),
    /// Record an oracle transcript: gold queries, optionally with injected defects.
    Oracle(OracleArgs),
    /// Run a local completion server that echoes prompts or answers from rules.
    StubLlm(StubArgs),
}

#[derive(Subcommand)]
enum BenchCommand {
    Run(BenchRunArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph directory (nodes.tsv, edges.tsv) or a graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Relation rename / direction config applied after loading.
    #[arg(long)]
    transforms: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<KnowledgeBase> {
        KnowledgeBase::load(&self.graph, self.transforms.as_deref())
            .with_context(|| format!("loading graph from {}", self.graph.display()))
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct TranscriptArgs {
    /// Answer every completion from this transcript file; no network.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Call the live backends and append every exchange to this file.
    #[arg(long)]
    record: Option<PathBuf>,
}

impl TranscriptArgs {
    fn gateway(&self) -> Result<LlmGateway> {
        Ok(match (&self.replay, &self.record) {
            (Some(path), _) => LlmGateway::replay(Arc::new(
                TranscriptStore::open(path).with_context(|| format!("reading transcripts {}", path.display()))?,
            )),
            (None, Some(path)) => LlmGateway::recording(Arc::new(TranscriptStore::open_for_append(path)?)),
            (None, None) => LlmGateway::live(),
        })
    }
}

#[derive(Args)]
struct BenchRunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Benchmark items (JSON array).
    #[arg(long)]
    questions: PathBuf,
    /// Models, template ids and concurrency (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    transcripts: TranscriptArgs,
    /// Output directory for results.csv, summary.md, summary.json and traces/.
    #[arg(long)]
    out: PathBuf,
    /// Directory holding cypher/*.txt and answer_sentence.txt.
    #[arg(long, default_value = "templates")]
    templates: PathBuf,
    /// Overrides the config's concurrency.
    #[arg(long)]
    concurrency: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value = "templates")]
    templates: PathBuf,
    /// One LLM config object or an array of them.
    #[arg(long)]
    llm_config: PathBuf,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    #[command(flatten)]
    transcripts: TranscriptArgs,
    /// Allowed browser origin; any origin when omitted.
    #[arg(long)]
    cors_origin: Option<String>,
    /// Built UI assets to serve next to the API.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

#[derive(Args)]
struct AskArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value = "templates")]
    templates: PathBuf,
    #[arg(long)]
    llm_config: PathBuf,
    /// Model name from the config; defaults to the first entry.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value = "zero_shot")]
    template: String,
    /// Also ask the model for an answer sentence.
    #[arg(long)]
    sentence: bool,
    #[command(flatten)]
    transcripts: TranscriptArgs,
    question: String,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Query text, or `-` to read it from stdin.
    query: String,
}

impl QueryArgs {
    fn text(&self) -> Result<String> {
        if self.query == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        } else {
            Ok(self.query.clone())
        }
    }
}

#[derive(Args)]
struct SchemaArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Print labels and triples as JSON instead.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Defects {
    None,
    Repairable,
    Mixed,
}

impl From<Defects> for DefectPlan {
    fn from(d: Defects) -> Self {
        match d {
            Defects::None => DefectPlan::None,
            Defects::Repairable => DefectPlan::Repairable,
            Defects::Mixed => DefectPlan::Mixed,
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    questions: PathBuf,
    /// Benchmark config whose models and templates the transcript covers.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "templates")]
    templates: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    defects: Defects,
    /// Transcript file to write (replaced if present).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StubArgs {
    #[arg(long, default_value_t = 11434)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// JSON `{"rules": [[needle, reply], ...], "fallback": "..."}`; echo when omitted.
    #[arg(long)]
    rules: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Bench(BenchCommand::Run(args)) => bench_run(args)?,
        Command::Serve(args) => serve(args)?,
        Command::Ask(args) => return ask(args),
        Command::Check(args) => {
            let kb = args.graph.load()?;
            let report = check_and_repair(&args.text()?, &kb.schema, &kb.index);
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.unresolved.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Query(args) => {
            let kb = args.graph.load()?;
            let query = parse_query(&args.text()?)?;
            let result = execute_query(&kb.graph, &query)?;
            println!("{}", result.columns.join("\t"));
            for row in &result.rows {
                println!("{}", row.join("\t"));
            }
        }
        Command::Schema(args) => {
            let kb = args.graph.load()?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&kb.schema)?);
            } else {
                print!("{}", kb.schema_text);
            }
        }
        Command::Fixture(args) => {
            let fixture = generate_fixture(args.seed);
            write_fixture(&fixture, &args.out)?;
            log::info!(
                "wrote {} nodes, {} raw edges and {} questions to {}",
                fixture.raw_graph.node_count(),
                fixture.raw_graph.edge_count(),
                fixture.items.len(),
                args.out.display()
            );
        }
        Command::Oracle(args) => oracle(args)?,
        Command::StubLlm(args) => stub_llm(args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_configs(cfg: &BenchConfig, templates: &TemplateSet) -> Result<Vec<RunConfig>> {
    let mut out = Vec::new();
    for llm in &cfg.models {
        for id in &cfg.templates {
            let Some(template) = templates.get(id) else {
                bail!("unknown template '{id}'; available: {}", templates.ids().join(", "));
            };
            out.push(RunConfig { llm: llm.clone(), template: template.clone() });
        }
    }
    Ok(out)
}

fn load_templates(dir: &Path) -> Result<TemplateSet> {
    TemplateSet::load(dir).with_context(|| format!("loading templates from {}", dir.display()))
}

fn bench_run(args: BenchRunArgs) -> Result<()> {
    let kb = args.graph.load()?;
    let items = load_benchmark(&args.questions)?;
    let cfg = BenchConfig::load(&args.config)?;
    let templates = load_templates(&args.templates)?;
    let configs = run_configs(&cfg, &templates)?;
    let gateway = args.transcripts.gateway()?;
    let reports = run_benchmark(&items, &configs, &kb, &gateway, args.concurrency.unwrap_or(cfg.concurrency))?;
    emit_report(&reports, &args.out)?;
    print_totals(&reports);
    Ok(())
}

fn print_totals(reports: &[BenchmarkReport]) {
    for r in reports {
        let c = r.correction_stats;
        println!(
            "{:<24} {:<20} {:>3}/{:<3} fixed by checker {}/{} ({:.1}%)",
            r.model_name,
            r.template_id,
            r.totals.correct,
            r.totals.total,
            c.fixed_by_checker,
            c.wrong_before_checker,
            c.percent_fixed
        );
    }
}

fn serve(args: ServeArgs) -> Result<()> {
    let kb = args.graph.load()?;
    let templates = load_templates(&args.templates)?;
    let models = load_llm_configs(&args.llm_config)?;
    let gateway = args.transcripts.gateway()?;
    let state = Arc::new(AppState { kb, templates, models, gateway });
    let options = ServerOptions { cors_origin: args.cors_origin, static_dir: args.static_dir };
    let app = router(state, &options);
    let addr = SocketAddr::new(args.host, args.port);
    tokio::runtime::Runtime::new()?.block_on(graphqa_server::serve(addr, app))?;
    Ok(())
}

fn ask(args: AskArgs) -> Result<ExitCode> {
    let kb = args.graph.load()?;
    let templates = load_templates(&args.templates)?;
    let models = load_llm_configs(&args.llm_config)?;
    let llm = match &args.model {
        Some(name) => {
            models.iter().find(|m| &m.model_name == name).with_context(|| format!("no model '{name}' in config"))?
        }
        None => models.first().context("the LLM config lists no models")?,
    };
    let Some(template) = templates.get(&args.template) else {
        bail!("unknown template '{}'; available: {}", args.template, templates.ids().join(", "));
    };
    let gateway = args.transcripts.gateway()?;
    let params = PipelineParams { llm, template, sentence: args.sentence.then_some(&templates.answer) };
    let trace = answer_question(&args.question, &kb, &gateway, params);
    println!("{}", serde_json::to_string_pretty(&trace)?);
    Ok(if trace.failure.is_some() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn oracle(args: OracleArgs) -> Result<()> {
    let kb = args.graph.load()?;
    let items = load_benchmark(&args.questions)?;
    let cfg = BenchConfig::load(&args.config)?;
    let templates = load_templates(&args.templates)?;
    if args.out.exists() {
        std::fs::remove_file(&args.out)?;
    }
    let store = TranscriptStore::open_for_append(&args.out)?;
    let runs = run_configs(&cfg, &templates)?;
    let skipped = record_oracle_transcripts(&store, &kb, &items, &runs, DefectPlan::from(args.defects))?;
    if skipped > 0 {
        log::warn!("{skipped} item/config pairs have no gold query and were left out");
    }
    log::info!("recorded {} exchanges to {}", store.len(), args.out.display());
    Ok(())
}

fn stub_llm(args: StubArgs) -> Result<()> {
    let reply = match &args.rules {
        None => StubReply::Echo,
        Some(path) => {
            let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let rules: Vec<(String, String)> =
                serde_json::from_value(v["rules"].clone()).context("rules must be [[needle, reply], ...]")?;
            StubReply::Rules(rules, v["fallback"].as_str().unwrap_or_default().to_string())
        }
    };
    let server = StubServer::start(StubConfig {
        reply,
        addr: Some(SocketAddr::new(args.host, args.port)),
        ..Default::default()
    })?;
    log::info!("stub completion server on {}", server.url());
    server.wait();
    Ok(())
}
