use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use g2g::engine::{run, EngineError, RunOptions, Source};
use g2g::g2gml::parse_g2gml;
use g2g::remote::EndpointConfig;
use g2g::serial::{export_db, write_json_pg, write_pg, DbDialect};
use g2g::turtle::parse_turtle;
use g2g::TripleStore;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_SOURCE: u8 = 3;
const EXIT_OUTPUT: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Flat PG text
    Pg,
    /// JSON-PG
    Json,
    /// Bulk-load CSV files for neo4j-admin import
    Neo4j,
    /// Flat files for Oracle property-graph loading
    Oracle,
    /// Bulk-load CSV files for Amazon Neptune
    Neptune,
}

/// Convert RDF data into a property graph using a G2GML mapping.
#[derive(Debug, Parser)]
#[command(name = "g2g", version)]
struct Cli {
    /// G2GML mapping file
    g2g_file: PathBuf,

    /// Turtle file, or a SPARQL endpoint URL (http:// or https://)
    source: String,

    /// Output file (directory for database formats); defaults to stdout
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Output format
    #[arg(short, long, value_enum, default_value = "pg")]
    format: OutputFormat,

    /// Keep nodes that have no incident edges
    #[arg(long)]
    include_orphans: bool,

    /// Endpoint request timeout in seconds
    #[arg(long, env = "G2G_ENDPOINT_TIMEOUT")]
    timeout: Option<u64>,

    /// Fetch endpoint results in LIMIT/OFFSET pages of this size
    #[arg(long)]
    page_size: Option<usize>,

    /// Number of concurrent endpoint requests
    #[arg(long, default_value = "1")]
    parallel: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("g2g: {message}");
            ExitCode::from(code)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), (u8, String)> {
    let g2g_text = std::fs::read_to_string(&cli.g2g_file).map_err(|e| {
        (
            EXIT_PARSE,
            format!("cannot read {}: {e}", cli.g2g_file.display()),
        )
    })?;
    let doc = parse_g2gml(&g2g_text)
        .map_err(|e| (EXIT_PARSE, format!("{}: {e}", cli.g2g_file.display())))?;

    let is_endpoint = cli.source.starts_with("http://") || cli.source.starts_with("https://");
    let source = if is_endpoint {
        let mut endpoint = EndpointConfig::new(cli.source.clone());
        if let Some(secs) = cli.timeout {
            endpoint.timeout = Duration::from_secs(secs);
        }
        endpoint.page_size = cli.page_size;
        Source::Remote(endpoint)
    } else {
        let ttl = std::fs::read_to_string(&cli.source)
            .map_err(|e| (EXIT_SOURCE, format!("cannot read {}: {e}", cli.source)))?;
        let triples =
            parse_turtle(&ttl).map_err(|e| (EXIT_PARSE, format!("{}: {e}", cli.source)))?;
        Source::Local(TripleStore::new(triples))
    };

    let options = RunOptions {
        source,
        include_orphans: cli.include_orphans,
        parallelism: cli.parallel,
    };
    let report = run(&doc, &options).map_err(|e| match e {
        EngineError::Validation(_) | EngineError::Compile(_) => (EXIT_PARSE, e.to_string()),
        EngineError::Remote(_) => (EXIT_SOURCE, e.to_string()),
    })?;
    for warning in &report.warnings {
        eprintln!("g2g: {warning}");
    }

    match cli.format {
        OutputFormat::Pg => emit_text(cli, write_pg(&report.graph))?,
        OutputFormat::Json => emit_text(cli, write_json_pg(&report.graph))?,
        OutputFormat::Neo4j => emit_files(cli, DbDialect::Neo4j, &report.graph)?,
        OutputFormat::Oracle => emit_files(cli, DbDialect::Oracle, &report.graph)?,
        OutputFormat::Neptune => emit_files(cli, DbDialect::Neptune, &report.graph)?,
    }

    let (nodes, edges) = report.graph.stats();
    eprintln!("g2g: wrote {nodes} nodes and {edges} edges");
    Ok(())
}

fn emit_text(cli: &Cli, text: String) -> Result<(), (u8, String)> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| (EXIT_OUTPUT, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_files(
    cli: &Cli,
    dialect: DbDialect,
    graph: &g2g::PropertyGraph,
) -> Result<(), (u8, String)> {
    let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = export_db(graph, dialect).map_err(|e| (EXIT_OUTPUT, e.to_string()))?;
    std::fs::create_dir_all(&dir)
        .map_err(|e| (EXIT_OUTPUT, format!("cannot create {}: {e}", dir.display())))?;
    for (name, content) in files {
        let path: &Path = &dir.join(&name);
        std::fs::write(path, content)
            .map_err(|e| (EXIT_OUTPUT, format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
