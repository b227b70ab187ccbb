use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use manasik_core::{DEFAULT_ALPHA, DEFAULT_K};

#[derive(Debug, Parser)]
#[command(name = "manasik", version, about = "Concept-based search over annotated video collections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and index a corpus, writing the index cache
    Index(IndexArgs),
    /// Run one query and print the ranking
    Search(SearchArgs),
    /// Interactive search with relevance feedback
    Session(SessionArgs),
    /// Simulated feedback sessions, written as precision/recall curves
    Eval(EvalArgs),
    /// Generate a synthetic corpus with planted relevance
    Gen(GenArgs),
    /// Start the HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    /// Weight attributes of the concept file, as written
    Precomputed,
    /// TF-IDF from the shot listings
    Recompute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expansion {
    /// Ontology neighbours are only listed
    Suggest,
    /// Ontology neighbours join the query
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LangHint {
    Ar,
    En,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Concept description file (concepts and their videos)
    #[arg(long, env = "MANASIK_CORPUS", value_name = "FILE")]
    pub corpus: PathBuf,
    /// Context description file
    #[arg(long, env = "MANASIK_CONTEXTS", value_name = "FILE")]
    pub contexts: Option<PathBuf>,
    /// Shot listing file (needed for --weights recompute)
    #[arg(long, env = "MANASIK_SHOTS", value_name = "FILE")]
    pub shots: Option<PathBuf>,
    /// Ontology file; defaults to the contexts
    #[arg(long, env = "MANASIK_ONTOLOGY", value_name = "FILE")]
    pub ontology: Option<PathBuf>,
    /// Extra query terms, `term<TAB>concept_id` per line
    #[arg(long, env = "MANASIK_SYNONYMS", value_name = "FILE")]
    pub synonyms: Option<PathBuf>,
    /// Stop word list replacing the built-in ones
    #[arg(long, env = "MANASIK_STOPWORDS", value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Shot listing marker map, `fNum<TAB>concept_id` per line
    #[arg(long, env = "MANASIK_MARKERS", value_name = "FILE")]
    pub markers: Option<PathBuf>,
    /// Source of video/concept weights
    #[arg(long, env = "MANASIK_WEIGHTS", value_enum, default_value = "precomputed")]
    pub weights: Weights,
}

#[derive(Debug, Clone, Args)]
pub struct SearchSettings {
    /// Feedback step added or removed per judged concept
    #[arg(long, env = "MANASIK_ALPHA", default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Number of results (also the judged window)
    #[arg(long, env = "MANASIK_K", default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Whether ontology neighbours join the query
    #[arg(long, env = "MANASIK_EXPAND", value_enum, default_value = "suggest")]
    pub expand: Expansion,
    /// Index cache to reuse (rebuilt when stale)
    #[arg(long, env = "MANASIK_INDEX", value_name = "FILE")]
    pub index: Option<PathBuf>,
    /// Preferred label language for display
    #[arg(long, env = "MANASIK_LANG", value_enum)]
    pub lang: Option<LangHint>,
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Where to write the index cache
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub settings: SearchSettings,
    /// Query text (Arabic or English)
    #[arg(value_name = "QUERY")]
    pub query: String,
    /// Concept ids to search, instead of the best-matching ones
    #[arg(long, value_delimiter = ',', value_name = "IDS")]
    pub concepts: Vec<u32>,
    /// Only rank videos carrying a concept of this context
    #[arg(long, value_name = "ID")]
    pub context: Option<u32>,
    /// Aligned columns instead of tab-separated values
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SessionArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub settings: SearchSettings,
    /// Query text; read from the first input line when absent
    #[arg(value_name = "QUERY")]
    pub query: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub settings: SearchSettings,
    /// Relevance judgments, `query_id<TAB>video_num` per line
    #[arg(long, value_name = "FILE")]
    pub qrels: PathBuf,
    /// Queries, `query_id<TAB>text` per line
    #[arg(long, value_name = "FILE")]
    pub queries: PathBuf,
    /// Feedback iterations per query, Q0 included
    #[arg(long, default_value_t = 3)]
    pub iterations: u32,
    /// Directory receiving `<query>_Q<i>.csv` curves
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Directory receiving the corpus files
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Random seed
    #[arg(long, env = "MANASIK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of videos
    #[arg(long, default_value_t = 1000)]
    pub videos: usize,
    /// Number of concepts
    #[arg(long = "concepts", default_value_t = 130)]
    pub n_concepts: usize,
    /// Number of contexts
    #[arg(long = "contexts", default_value_t = 12)]
    pub n_contexts: usize,
    /// Planted queries (fewer when the corpus is too small)
    #[arg(long = "queries", default_value_t = 5)]
    pub n_queries: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    /// TOML configuration file
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Concept description file
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Context description file
    #[arg(long, value_name = "FILE")]
    pub contexts: Option<PathBuf>,
    /// Shot listing file
    #[arg(long, value_name = "FILE")]
    pub shots: Option<PathBuf>,
    /// Ontology file
    #[arg(long, value_name = "FILE")]
    pub ontology: Option<PathBuf>,
    /// Feedback step
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Results per search (also the judged window)
    #[arg(long)]
    pub k: Option<usize>,
    /// Listening port
    #[arg(long)]
    pub port: Option<u16>,
    /// Listening address
    #[arg(long)]
    pub host: Option<String>,
    /// Index cache file
    #[arg(long, value_name = "FILE")]
    pub index: Option<PathBuf>,
    /// Directory of web UI assets served under /ui
    #[arg(long, value_name = "DIR")]
    pub ui: Option<PathBuf>,
}
