//! Command-line workflow: triplify trial XML, run link specs, inspect
//! tokenization, weights and joins.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data or parse errors.
//! Diagnostics go to stderr; data goes to stdout or the `--out` path.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use triallink::ingest::{self, TrialDocument};
use triallink::linkpipe::{
    compute_stats, emit_links, load_entity_set_csv, load_link_config, run_linkspec,
    write_stats_tsv, StatsRow,
};
use triallink::ntriples;
use triallink::qgram::{tokenize, WeightTable};
use triallink::semjoin::{load_thesaurus, semantic_join_with_depth};
use triallink::simjoin::{brute_force_join, indexed_join};
use triallink::{Error, Result, Triple};

#[derive(Parser)]
#[command(name = "triallink", version, about = "Trial data triplification and link discovery")]
struct Cli {
    /// Maximum worker threads for parallel stages.
    #[arg(long, global = true, default_value_t = default_jobs())]
    jobs: usize,

    /// Print progress diagnostics to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a directory of trial XML files and emit sorted N-Triples.
    Triplify {
        /// Directory containing one `.xml` file per trial.
        #[arg(long = "in")]
        input: PathBuf,
        /// URI prefix for minted entity URIs.
        #[arg(long)]
        base: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the link specs of a config file and emit typed links.
    Link {
        /// TOML config file; see the repository docs for the schema.
        #[arg(long)]
        config: PathBuf,
        /// Stats table output file; printed to stderr when omitted.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// N-Triples output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entity counts per type for a directory of trial XML files.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print the q-gram tokens of a string, one per line.
    Tokenize {
        #[arg(long, default_value_t = 2)]
        q: usize,
        text: String,
    },
    /// Print `token<TAB>n_t<TAB>weight` for a base corpus file
    /// (one value per line), sorted by weight descending.
    Weights {
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value_t = 2)]
        q: usize,
    },
    /// String-similarity threshold join between two entity set CSVs.
    Simjoin {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 2)]
        q: usize,
        /// Use the brute-force oracle instead of the indexed join.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thesaurus-based semantic join between two entity set CSVs.
    Semjoin {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        thesaurus: PathBuf,
        #[arg(long, default_value = "synonym")]
        rel: String,
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let jobs = cli.jobs.max(1);
    let verbose = cli.verbose;
    match cli.command {
        Command::Triplify { input, base, out } => {
            let docs = parse_trials(&input, jobs)?;
            if verbose {
                eprintln!("parsed {} trial document(s) from {}", docs.len(), input.display());
            }
            let graph = ingest::build_entity_graph(&docs)?;
            let triples = ingest::triplify(&graph, &base)?;
            if verbose {
                eprintln!("{} entities, {} triples", graph.entity_count(), triples.len());
            }
            write_output(out.as_deref(), &ntriples::to_document(&triples))
        }
        Command::Link { config, stats, out } => {
            let specs = load_link_config(&config)?;
            let base_dir = config
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."))
                .to_path_buf();
            let mut groups: Vec<(String, StatsRow)> = Vec::new();
            let mut triples: Vec<Triple> = Vec::new();
            for spec_config in &specs {
                let (spec, thesaurus) = spec_config.resolve(&base_dir)?;
                let link_set = run_linkspec(&spec, thesaurus.as_ref())?;
                if verbose {
                    eprintln!(
                        "spec {}: {} overall link(s)",
                        spec.name,
                        link_set.overall.len()
                    );
                }
                groups.push((
                    spec.name.clone(),
                    compute_stats(&link_set, &spec.source_occurrences())?,
                ));
                triples.extend(emit_links(&link_set, &spec)?);
            }
            let mut stats_buf = Vec::new();
            write_stats_tsv(&groups, &mut stats_buf).map_err(|e| Error::Io {
                path: stats.clone().unwrap_or_else(|| PathBuf::from("<stats>")),
                source: e,
            })?;
            match &stats {
                Some(path) => write_file(path, &stats_buf)?,
                None => eprint!("{}", String::from_utf8_lossy(&stats_buf)),
            }
            write_output(out.as_deref(), &ntriples::to_document(&triples))
        }
        Command::Stats { input } => {
            let docs = parse_trials(&input, jobs)?;
            let graph = ingest::build_entity_graph(&docs)?;
            let stats = ingest::entity_stats(&graph);
            let mut out = String::new();
            for (ty, count) in &stats.rows {
                out.push_str(&format!("{ty}\t{count}\n"));
            }
            out.push_str(&format!("total\t{}\n", stats.total));
            write_output(None, &out)
        }
        Command::Tokenize { q, text } => {
            let tokens = tokenize(&text, q)?;
            let mut out = String::new();
            for t in tokens.iter() {
                out.push_str(t);
                out.push('\n');
            }
            write_output(None, &out)
        }
        Command::Weights { base, q } => {
            let text = std::fs::read_to_string(&base).map_err(|source| Error::Io {
                path: base.clone(),
                source,
            })?;
            let values: Vec<&str> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let table = WeightTable::build(&values, q)?;
            if verbose {
                eprintln!(
                    "{} base value(s), {} distinct token(s)",
                    values.len(),
                    table.entries().len()
                );
            }
            let mut out = String::new();
            for (token, n_t, weight) in table.entries() {
                out.push_str(&format!("{token}\t{n_t}\t{weight:.6}\n"));
            }
            write_output(None, &out)
        }
        Command::Simjoin { base, target, theta, q, oracle, out } => {
            let base_set = load_entity_set_csv(&base, "base", "base")?;
            let target_set = load_entity_set_csv(&target, "target", "target")?;
            let values: Vec<&str> = base_set
                .records()
                .iter()
                .map(|r| r.match_field.as_str())
                .collect();
            let w = WeightTable::build(&values, q)?;
            let result = if oracle {
                brute_force_join(&base_set, &target_set, theta, &w)?
            } else {
                indexed_join(&base_set, &target_set, theta, &w)?
            };
            if verbose {
                eprintln!("{} qualifying pair(s)", result.pairs.len());
            }
            let mut text = String::new();
            for pair in &result.pairs {
                text.push_str(&format!(
                    "{}\t{}\t{:.6}\n",
                    pair.base_id, pair.target_id, pair.score
                ));
            }
            write_output(out.as_deref(), &text)
        }
        Command::Semjoin { base, target, thesaurus, rel, depth, out } => {
            let base_set = load_entity_set_csv(&base, "base", "base")?;
            let target_set = load_entity_set_csv(&target, "target", "target")?;
            let th = load_thesaurus(&thesaurus)?;
            if verbose {
                eprintln!("thesaurus: {} entries, {} concepts", th.len(), th.concept_count());
            }
            let pairs = semantic_join_with_depth(&base_set, &target_set, &th, &rel, depth);
            let mut text = String::new();
            for (b, t) in &pairs {
                text.push_str(&format!("{b}\t{t}\n"));
            }
            write_output(out.as_deref(), &text)
        }
    }
}

/// Parse trial files with at most `jobs` worker threads. Document order is
/// irrelevant downstream: graph construction sorts by nct_id.
fn parse_trials(dir: &Path, jobs: usize) -> Result<Vec<TrialDocument>> {
    let files = ingest::list_trial_files(dir)?;
    if files.is_empty() {
        return Err(Error::Data(format!(
            "no .xml files found in {}",
            dir.display()
        )));
    }
    let jobs = jobs.min(files.len()).max(1);
    if jobs == 1 {
        return files.iter().map(ingest::parse_trial_file).collect();
    }
    let chunk_size = files.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .chunks(chunk_size)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(ingest::parse_trial_file)
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut docs = Vec::new();
        for handle in handles {
            docs.extend(handle.join().expect("parser thread panicked")?);
        }
        Ok(docs)
    })
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => write_file(path, content.as_bytes()),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
