use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dlviz_core::record::{Normalizer, RecordError};
use dlviz_core::vocab::Vocabulary;
use dlviz_core::Index;

use crate::api::{Params, Service, ENDPOINTS};
use crate::config::{ServiceConfig, DEFAULT_PAGE_SIZE, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(
    name = "dlviz",
    version,
    about = "Faceted search over bibliographic metadata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index directory from a corpus file (`.jsonl` or `.jsonl.gz`).
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replace the default junk-value list (repeatable).
        #[arg(long = "junk", value_name = "VALUE")]
        junk: Vec<String>,
    },
    /// Run the HTTP server.
    Serve {
        #[arg(long, conflicts_with_all = ["index", "port", "static_dir", "cors_origin", "page_size"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        index: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PORT as u32)]
        port: u32,
        #[arg(long)]
        static_dir: Option<PathBuf>,
        #[arg(long)]
        cors_origin: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PAGE_SIZE)]
        page_size: usize,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Evaluate a query against an index and print the API payload.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Query text; empty matches everything.
        #[arg(default_value = "")]
        q: String,
        /// Endpoint payload to print instead of the result page.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(ENDPOINTS))]
        aggregate: Option<String>,
        #[arg(long = "type")]
        info_type: Option<String>,
        #[arg(long)]
        database: Option<String>,
        #[arg(long)]
        person: Option<String>,
        #[arg(long)]
        subject: Option<String>,
        #[arg(long)]
        from: Option<i32>,
        #[arg(long)]
        to: Option<i32>,
        #[arg(long)]
        page: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
        /// Facet field for `--aggregate facets`.
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Center term for `--aggregate terms`.
        #[arg(long)]
        term: Option<String>,
        /// Vocabulary id for `--aggregate terms`.
        #[arg(long)]
        vocab: Option<String>,
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    /// Vocabulary as `ID=PATH` (repeatable).
    #[arg(long = "vocabulary", value_name = "ID=PATH", value_parser = parse_vocab_arg)]
    vocabularies: Vec<(String, PathBuf)>,
    #[arg(long)]
    reference_year: Option<i32>,
}

fn parse_vocab_arg(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((id, path)) if !id.is_empty() && !path.is_empty() => {
            Ok((id.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected ID=PATH, got {s:?}")),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Index { corpus, out, junk } => {
            let normalizer = if junk.is_empty() {
                Normalizer::default()
            } else {
                Normalizer::with_junk_values(junk)
            };
            let records = normalizer.read_corpus_file(&corpus).map_err(|e| match e {
                RecordError::Io { .. } => anyhow!(e),
                other => anyhow!(other).context(corpus.display().to_string()),
            })?;
            let index = Index::build(records).with_context(|| format!("{}", corpus.display()))?;
            index.save(&out)?;
            eprintln!(
                "indexed {} records into {}",
                index.doc_count(),
                out.display()
            );
            Ok(())
        }
        Command::Serve {
            config,
            index,
            port,
            static_dir,
            cors_origin,
            page_size,
            data,
        } => {
            let mut cfg = match config {
                Some(path) => ServiceConfig::load(&path)?,
                None => {
                    let mut cfg = ServiceConfig::new(index.expect("required by clap"));
                    cfg.port = port;
                    cfg.static_dir = static_dir;
                    cfg.cors_origin = cors_origin;
                    cfg.page_size = page_size;
                    cfg
                }
            };
            if data.gazetteer.is_some() {
                cfg.gazetteer = data.gazetteer;
            }
            cfg.vocabularies.extend(data.vocabularies);
            cfg.reference_year = data.reference_year.or(cfg.reference_year);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::http::serve(cfg))
        }
        Command::Query {
            index,
            q,
            aggregate,
            info_type,
            database,
            person,
            subject,
            from,
            to,
            page,
            size,
            field,
            k,
            term,
            vocab,
            data,
        } => {
            let mut service = Service::new(
                Index::load(&index)?,
                data.reference_year.unwrap_or_else(crate::api::current_year),
            );
            if let Some(path) = &data.gazetteer {
                service = service.with_gazetteer(crate::api::load_gazetteer(path)?);
            }
            for (id, path) in data.vocabularies {
                service = service.with_vocabulary(Vocabulary::load(id, &path)?);
            }
            let mut params = Params::new();
            let mut set = |name: &str, value: Option<String>| {
                if let Some(v) = value {
                    params.insert(name.to_string(), v);
                }
            };
            set("q", Some(q));
            set("type", info_type);
            set("database", database);
            set("person", person);
            set("subject", subject);
            set("from", from.map(|v| v.to_string()));
            set("to", to.map(|v| v.to_string()));
            set("page", page.map(|v| v.to_string()));
            set("size", size.map(|v| v.to_string()));
            set("field", field);
            set("k", k.map(|v| v.to_string()));
            set("term", term);
            set("vocab", vocab);
            let kind = aggregate.as_deref().unwrap_or("search");
            match service.handle(kind, &params) {
                Ok(body) => {
                    println!("{body}");
                    Ok(())
                }
                Err(e) => bail!("{e}"),
            }
        }
    }
}

/// Entry point: clap exits 2 on usage errors, runtime failures exit 1.
pub fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dlviz: {e:#}");
            std::process::ExitCode::from(1)
        }
    }
}
