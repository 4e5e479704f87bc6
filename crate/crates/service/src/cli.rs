//! Command-line interface. Usage errors exit 2 (clap), data errors exit 1.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rulebridge::catalog::{clean_and_split, load_recipes};
use rulebridge::config::Config;
use rulebridge::evaluation::{
    dataset_stats, evaluate, load_annotations, render_summary_table, sample_for_annotation, validate_annotations,
};
use rulebridge::pipeline::TranslationResult;
use rulebridge::records::{render_canonical, render_keyed_embedding, render_records};
use rulebridge::rulestore::{sync_remote, RuleStore};
use rulebridge::{Kind, Method};

use crate::client::HttpContainer;
use crate::engine::{load_catalog, load_ontology_from, Engine};

#[derive(Debug, Parser)]
#[command(name = "rulebridge", version, about = "Translate trigger-action rule vocabulary into ontology terms")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, env = "RULEBRIDGE_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub recipes: Option<PathBuf>,
    /// Prepared proprietary catalog (JSON), used instead of --recipes.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ontology: Option<PathBuf>,
    #[arg(long, global = true)]
    pub vectors: Option<PathBuf>,
    /// Review and rule store log.
    #[arg(long, global = true)]
    pub store: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the prepared catalogs and print dataset statistics.
    Prepare {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Translate one term, or the whole catalog with --batch.
    Translate(TranslateArgs),
    /// Score methods against gold annotations.
    Evaluate {
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// `all` or a comma-separated list.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long)]
        json: bool,
    },
    /// Dataset statistics.
    Stats {
        #[arg(long)]
        json: bool,
    },
    /// Draw a reproducible sample of terms for annotation.
    Sample {
        #[arg(long)]
        kind: Kind,
        #[arg(long, short = 'n')]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reconcile the local store with the remote container.
    Sync {
        #[arg(long)]
        url: Option<String>,
        #[arg(long)]
        token: Option<String>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        addr: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// One ranked line per candidate.
    Text,
    /// The API's result object.
    Json,
    /// Flat legacy records.
    Records,
    /// Keyed embedding layout.
    Keyed,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(long, required_unless_present = "batch")]
    pub name: Option<String>,
    #[arg(long, required_unless_present = "batch")]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Translate every catalog term and write canonical results.
    #[arg(long, conflicts_with_all = ["name", "kind"])]
    pub batch: bool,
    /// Batch output file; defaults to corpus.results, then stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn load_config(&self) -> anyhow::Result<Config> {
        let mut config = Config::load(self.config.as_deref())?;
        let corpus = &mut config.corpus;
        for (slot, value) in [
            (&mut corpus.recipes, &self.recipes),
            (&mut corpus.catalog, &self.catalog),
            (&mut corpus.ontology, &self.ontology),
            (&mut corpus.vectors, &self.vectors),
            (&mut config.store.path, &self.store),
        ] {
            if value.is_some() {
                slot.clone_from(value);
            }
        }
        if self.recipes.is_some() && self.catalog.is_none() {
            config.corpus.catalog = None;
        }
        if let Some(t) = self.threshold {
            config.pipeline.threshold = t;
        }
        config.pipeline.validate()?;
        Ok(config)
    }
}

fn parse_methods(spec: &str) -> anyhow::Result<Vec<Method>> {
    if spec == "all" {
        return Ok(Method::ALL.to_vec());
    }
    spec.split(',')
        .map(|m| m.trim().parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

pub fn render_text(result: &TranslationResult) -> String {
    if result.candidates.is_empty() {
        return format!("{} ({}): no result\n", result.source_name, result.kind);
    }
    let width = result.candidates.iter().map(|c| c.candidate_name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in &result.candidates {
        let score = c.sort_key(result.method).map_or_else(|| "-".to_string(), |s| format!("{s:.2}"));
        let pin = if c.pinned_by_review { "  (reviewed)" } else { "" };
        out.push_str(&format!("{}. {:<width$}  {score}{pin}\n", c.rank, c.candidate_name));
    }
    out
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let config = cli.global.load_config()?;
    match cli.command {
        Command::Prepare { out_dir } => {
            let Some(path) = &config.corpus.recipes else {
                bail!("prepare needs --recipes or corpus.recipes");
            };
            let raw = load_recipes(path, &config.corpus.recipe_format())?;
            let (catalog, report) = clean_and_split(&raw)?;
            let ontology = load_ontology_from(&config)?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            for (file, body) in [("catalog.json", catalog.to_json()), ("ontology.json", ontology.to_json())] {
                let path = out_dir.join(file);
                std::fs::write(&path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            write!(out, "{}", dataset_stats(&raw, &catalog).render())?;
            writeln!(
                out,
                "ontology: {} triggers, {} actions",
                ontology.triggers.len(),
                ontology.actions.len()
            )?;
            writeln!(out, "wrote catalog.json and ontology.json to {}", out_dir.display())?;
            if !report.dropped.is_empty() {
                writeln!(out, "{} names were empty after cleaning", report.dropped.len())?;
            }
        }
        Command::Translate(args) => {
            let engine = Engine::load(config)?;
            let method = args.method.unwrap_or(engine.config.pipeline.method);
            if args.batch {
                let Some(catalog) = &engine.catalog else {
                    bail!("batch translation needs a catalog (--recipes or --catalog)");
                };
                let batch = engine.translator().translate_batch(catalog, method);
                for f in &batch.failures {
                    eprintln!("warning: {} ({}): {}", f.source_name, f.kind, f.error);
                }
                let text = render_canonical(&batch.results);
                match args.output.as_ref().or(engine.config.corpus.results.as_ref()) {
                    Some(path) => {
                        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
                        writeln!(out, "{} results written to {}", batch.results.len(), path.display())?;
                    }
                    None => out.write_all(text.as_bytes())?,
                }
                if !batch.failures.is_empty() {
                    bail!("{} terms failed to translate", batch.failures.len());
                }
                return Ok(());
            }
            let (Some(name), Some(kind)) = (args.name, args.kind) else {
                bail!("--name and --kind are required without --batch");
            };
            let result = engine.translate(&name, kind, method, args.top)?;
            match args.format {
                OutputFormat::Text => write!(out, "{}", render_text(&result))?,
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?,
                OutputFormat::Records => writeln!(out, "{}", render_records(&result, None))?,
                OutputFormat::Keyed => writeln!(out, "{}", render_keyed_embedding(&result, None)?)?,
            }
        }
        Command::Evaluate {
            annotations,
            methods,
            json,
        } => {
            let methods = parse_methods(&methods)?;
            let engine = Engine::load(config)?;
            let Some(path) = annotations.or(engine.config.corpus.annotations.clone()) else {
                bail!("evaluate needs --annotations or corpus.annotations");
            };
            let gold = load_annotations(&path)?;
            validate_annotations(&gold, &engine.ontology)?;
            let report = evaluate(&engine.translator(), &gold, &methods)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                for k in &report {
                    let title = match k.kind {
                        Kind::Trigger => "Triggers",
                        Kind::Action => "Actions",
                    };
                    writeln!(out, "{}", render_summary_table(title, &k.ranking))?;
                }
            }
        }
        Command::Stats { json } => {
            let Some(path) = &config.corpus.recipes else {
                bail!("stats needs --recipes or corpus.recipes");
            };
            let raw = load_recipes(path, &config.corpus.recipe_format())?;
            let (catalog, _) = clean_and_split(&raw)?;
            let stats = dataset_stats(&raw, &catalog);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?;
            } else {
                write!(out, "{}", stats.render())?;
            }
        }
        Command::Sample { kind, n, seed } => {
            let Some(catalog) = load_catalog(&config)? else {
                bail!("sample needs --recipes or --catalog");
            };
            for term in sample_for_annotation(&catalog, kind, n, seed)? {
                writeln!(out, "{}", term.name)?;
            }
        }
        Command::Sync { url, token } => {
            let Some(url) = url.or(config.remote.url.clone()) else {
                bail!("sync needs --url or remote.url");
            };
            let Some(path) = &config.store.path else {
                bail!("sync needs --store or store.path");
            };
            let store = RuleStore::open(path)?;
            let remote = HttpContainer::new(&url, token.or(config.remote.token.clone()), Duration::from_secs(30));
            let report = sync_remote(&store, &remote)?;
            writeln!(
                out,
                "pushed {}, pulled {}, conflicted {}, failed {}",
                report.pushed.len(),
                report.pulled.len(),
                report.conflicted.len(),
                report.failed.len()
            )?;
            for (id, why) in &report.failed {
                writeln!(out, "failed {id}: {why}")?;
            }
            if !report.failed.is_empty() {
                bail!("{} documents failed to sync", report.failed.len());
            }
        }
        Command::Serve { addr } => {
            let addr = addr.unwrap_or_else(|| config.server.addr.clone());
            let engine = Engine::load(config)?;
            tokio::runtime::Runtime::new()?.block_on(crate::api::serve(engine, &addr))?;
        }
    }
    Ok(())
}
