//! `manasik` command-line tool. [`run`] is the whole program with its
//! streams injected, so tests drive it without spawning processes.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 I/O error.

pub mod args;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use manasik_core::corpus::Labels;
use manasik_core::engine::{CorpusPaths, EngineSettings};
use manasik_core::eval::{parse_queries, simulate_session, GeneratorConfig, Qrels, SessionConfig};
use manasik_core::index::WeightSource;
use manasik_core::ontology::ExpansionMode;
use manasik_core::retrieval::JudgmentSet;
use manasik_core::{ConceptId, Hit, SearchEngine, VideoNum};
use manasik_service::{ServeError, ServiceConfig};

use args::{Cli, Command, CorpusArgs, Expansion, LangHint, SearchSettings, Weights};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Io(m) => m,
        }
    }
}

impl From<manasik_core::Error> for Failure {
    fn from(e: manasik_core::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<manasik_core::eval::EvalError> for Failure {
    fn from(e: manasik_core::eval::EvalError) -> Self {
        manasik_core::Error::from(e).into()
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs the program; returns the exit code.
pub fn run<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Index(a) => index(&a, out),
        Command::Search(a) => search(&a, out, err),
        Command::Session(a) => session(&a, input, out),
        Command::Eval(a) => eval(&a, out, err),
        Command::Gen(a) => gen(&a, out),
        Command::Serve(a) => serve(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn corpus_paths(args: &CorpusArgs) -> CorpusPaths {
    CorpusPaths {
        concepts: args.corpus.clone(),
        contexts: args.contexts.clone(),
        shots: args.shots.clone(),
        ontology: args.ontology.clone(),
        stop_words: args.stopwords.clone(),
        synonyms: args.synonyms.clone(),
        markers: args.markers.clone(),
    }
}

fn weight_source(w: Weights) -> WeightSource {
    match w {
        Weights::Precomputed => WeightSource::Precomputed,
        Weights::Recompute => WeightSource::Recompute,
    }
}

/// Fails before any work when an input path does not exist.
fn check_inputs(paths: &CorpusPaths, extra: &[&Path]) -> Outcome {
    let optional = [&paths.contexts, &paths.shots, &paths.ontology, &paths.stop_words, &paths.synonyms, &paths.markers];
    let all = std::iter::once(paths.concepts.as_path())
        .chain(optional.into_iter().flatten().map(PathBuf::as_path))
        .chain(extra.iter().copied());
    for p in all {
        if !p.is_file() {
            return Err(Failure::Io(format!("{}: no such file", p.display())));
        }
    }
    Ok(())
}

fn engine_settings(s: &SearchSettings) -> EngineSettings {
    EngineSettings {
        alpha: s.alpha,
        k: s.k,
        expansion_mode: match s.expand {
            Expansion::Suggest => ExpansionMode::Suggest,
            Expansion::Auto => ExpansionMode::Auto,
        },
        ..EngineSettings::default()
    }
}

fn load(corpus: &CorpusArgs, settings: &SearchSettings, extra: &[&Path]) -> Result<SearchEngine, Failure> {
    let paths = corpus_paths(corpus);
    check_inputs(&paths, extra)?;
    if !(settings.alpha >= 0.0 && settings.alpha.is_finite()) {
        return Err(Failure::Usage(format!("--alpha must be a non-negative number, got {}", settings.alpha)));
    }
    if settings.k == 0 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let source = weight_source(corpus.weights);
    let engine_settings = engine_settings(settings);
    Ok(match &settings.index {
        Some(cache) => SearchEngine::load_cached(&paths, source, engine_settings, cache)?.0,
        None => SearchEngine::load(&paths, source, engine_settings)?,
    })
}

fn label(labels: &Labels, lang: Option<LangHint>) -> &str {
    match lang {
        Some(LangHint::En) => labels.en.as_deref().unwrap_or(&labels.ar),
        _ => &labels.ar,
    }
}

fn concept_label(engine: &SearchEngine, id: ConceptId, lang: Option<LangHint>) -> String {
    engine
        .corpus()
        .concept(id)
        .map(|c| label(&c.labels, lang).to_string())
        .unwrap_or_default()
}

fn index(a: &args::IndexArgs, out: &mut dyn Write) -> Outcome {
    let paths = corpus_paths(&a.corpus);
    check_inputs(&paths, &[])?;
    let bytes = paths.read()?;
    let source = weight_source(a.corpus.weights);
    let engine = SearchEngine::from_bytes(&bytes, source, EngineSettings::default())?;
    engine.write_cache(&a.out, &bytes.hash(source))?;
    let corpus = engine.corpus();
    writeln!(out, "videos\t{}", corpus.n_videos())?;
    writeln!(out, "concepts\t{}", corpus.concepts().len())?;
    writeln!(out, "contexts\t{}", corpus.contexts().len())?;
    writeln!(out, "indexed_concepts\t{}", engine.index().indexed_concepts().count())?;
    writeln!(out, "index\t{}", a.out.display())?;
    Ok(())
}

fn write_ranking(engine: &SearchEngine, hits: &[Hit], pretty: bool, out: &mut dyn Write) -> Outcome {
    if pretty {
        writeln!(out, "{:>4}  {:>8}  {:<10}  name", "rank", "score", "video")?;
        for h in hits {
            let name = engine.corpus().video(&h.video_num).map_or("", |d| d.name.as_str());
            writeln!(out, "{:>4}  {:>8.4}  {:<10}  {name}", h.rank, h.score, h.video_num.as_str())?;
        }
    } else {
        writeln!(out, "rank\tscore\tvideo_num\tname")?;
        for h in hits {
            let name = engine.corpus().video(&h.video_num).map_or("", |d| d.name.as_str());
            writeln!(out, "{}\t{:.6}\t{}\t{name}", h.rank, h.score, h.video_num.as_str())?;
        }
    }
    Ok(())
}

fn known_concepts(engine: &SearchEngine, ids: &[u32]) -> Result<BTreeSet<ConceptId>, Failure> {
    for &id in ids {
        if engine.corpus().concept(id).is_none() {
            return Err(Failure::Data(format!("unknown concept {id}")));
        }
    }
    Ok(ids.iter().copied().collect())
}

fn search(a: &args::SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if a.query.trim().is_empty() {
        return Err(Failure::Usage("the query is empty".into()));
    }
    let engine = load(&a.corpus, &a.settings, &[])?;
    let selected = if a.concepts.is_empty() {
        engine.suggest(&a.query).best()
    } else {
        known_concepts(&engine, &a.concepts)?
    };
    if selected.is_empty() {
        writeln!(err, "no concept matches the query")?;
    } else {
        let names: Vec<String> = selected
            .iter()
            .map(|&c| format!("{c} ({})", concept_label(&engine, c, a.settings.lang)))
            .collect();
        writeln!(err, "concepts: {}", names.join(", "))?;
    }
    let state = engine.initial_state(&a.query, selected)?;
    let hits = engine.search(&state, None, a.context)?;
    write_ranking(&engine, &hits, a.pretty, out)
}

fn prompt(out: &mut dyn Write, text: &str) -> Outcome {
    write!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

fn read_line(input: &mut dyn BufRead) -> Result<Option<String>, Failure> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_string()))
}

fn parse_judgments(line: &str) -> Result<JudgmentSet, String> {
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for token in line.split([' ', ',']).filter(|t| !t.is_empty()) {
        if let Some(v) = token.strip_prefix('+') {
            pos.push(VideoNum::new(v));
        } else if let Some(v) = token.strip_prefix('-') {
            neg.push(VideoNum::new(v));
        } else {
            return Err(format!("`{token}`: mark videos as +VIDEO or -VIDEO"));
        }
    }
    JudgmentSet::new(pos, neg).map_err(|e| e.to_string())
}

/// Terminal loop: candidates, concept choice, ranking, then judgments
/// (`+video -video`, empty for none) until `q` or end of input.
fn session(a: &args::SessionArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    let engine = load(&a.corpus, &a.settings, &[])?;
    let lang = a.settings.lang;
    let query = match &a.query {
        Some(q) => q.clone(),
        None => {
            prompt(out, "query> ")?;
            read_line(input)?.unwrap_or_default()
        }
    };
    if query.trim().is_empty() {
        return Err(Failure::Usage("the query is empty".into()));
    }
    let s = engine.suggest(&query);
    writeln!(out, "candidates:")?;
    for c in &s.candidates {
        writeln!(out, "  {}\t{:.3}\t{}", c.concept_id, c.score, concept_label(&engine, c.concept_id, lang))?;
    }
    if !s.related.is_empty() {
        writeln!(out, "related:")?;
        for (&c, &w) in &s.related {
            writeln!(out, "  {c}\t{w:.3}\t{}", concept_label(&engine, c, lang))?;
        }
    }
    let selected = loop {
        prompt(out, "concepts (ids, empty for best match)> ")?;
        let Some(line) = read_line(input)? else { return Ok(()) };
        if line.is_empty() {
            break s.best();
        }
        let ids: Result<Vec<u32>, _> = line.split([' ', ',']).filter(|t| !t.is_empty()).map(str::parse).collect();
        match ids.map_err(|_| "concept ids are integers".to_string()).and_then(|ids| {
            known_concepts(&engine, &ids).map_err(|f| f.message().to_string())
        }) {
            Ok(ids) => break ids,
            Err(e) => writeln!(out, "{e}")?,
        }
    };
    let mut state = engine.initial_state(&query, selected)?;
    let mut hits = engine.search(&state, None, None)?;
    loop {
        writeln!(out, "Q{}:", state.iteration())?;
        write_ranking(&engine, &hits, true, out)?;
        let presented: Vec<VideoNum> = hits.iter().map(|h| h.video_num.clone()).collect();
        let next = loop {
            prompt(out, "judge (+video -video, empty for none, q to quit)> ")?;
            let Some(line) = read_line(input)? else { return Ok(()) };
            if line == "q" {
                return Ok(());
            }
            match parse_judgments(&line)
                .and_then(|j| engine.feedback(&state, &j, &presented).map_err(|e| e.to_string()))
            {
                Ok(next) => break next,
                Err(e) => writeln!(out, "{e}")?,
            }
        };
        state = next;
        hits = engine.search(&state, None, None)?;
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn eval(a: &args::EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if a.iterations == 0 {
        return Err(Failure::Usage("--iterations must be at least 1".into()));
    }
    let engine = load(&a.corpus, &a.settings, &[&a.qrels, &a.queries])?;
    let qrels = Qrels::parse(&read_text(&a.qrels)?)?;
    let queries = parse_queries(&read_text(&a.queries)?)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Failure::Io(format!("{}: {e}", a.out.display())))?;
    writeln!(out, "query\titeration\tprecision@10\trecall@{}\tfile", a.settings.k)?;
    for (qid, text) in &queries {
        let Some(relevant) = qrels.get(qid) else {
            writeln!(err, "skipping {qid}: no relevance judgments")?;
            continue;
        };
        let selected = engine.suggest(text).best();
        if selected.is_empty() {
            writeln!(err, "skipping {qid}: no concept matches `{text}`")?;
            continue;
        }
        let state = engine.initial_state(text, selected)?;
        let config = SessionConfig {
            query_id: qid.clone(),
            iterations: a.iterations,
            judge_window: a.settings.k,
            k: a.settings.k,
            context: None,
        };
        for c in simulate_session(engine.index(), &state, relevant, &config)? {
            let path = a.out.join(format!("{qid}_Q{}.csv", c.iteration));
            std::fs::write(&path, c.to_csv()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let p10 = c.precision_at(10).unwrap_or(0.0);
            let recall = c.points.last().map_or(0.0, |p| p.recall);
            writeln!(out, "{qid}\tQ{}\t{p10:.4}\t{recall:.4}\t{}", c.iteration, path.display())?;
        }
    }
    Ok(())
}

fn gen(a: &args::GenArgs, out: &mut dyn Write) -> Outcome {
    let config = GeneratorConfig {
        n_videos: a.videos,
        n_concepts: a.n_concepts,
        n_contexts: a.n_contexts,
        n_queries: a.n_queries,
        seed: a.seed,
    };
    let generated = config.generate().map_err(|e| match e {
        manasik_core::eval::EvalError::Size(m) => Failure::Usage(m),
        other => other.into(),
    })?;
    for path in generated.write_to(&a.out)? {
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn serve(a: &args::ServeArgs) -> Outcome {
    let mut config = match &a.config {
        Some(path) => ServiceConfig::from_file(path).map_err(|e| match e {
            manasik_service::ConfigError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Data(other.to_string()),
        })?,
        None => ServiceConfig::default(),
    };
    config
        .apply_env(|name| std::env::var(name).ok())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(p) = &a.corpus {
        config.corpus.concepts = p.clone();
    }
    for (flag, slot) in [
        (&a.contexts, &mut config.corpus.contexts),
        (&a.shots, &mut config.corpus.shots),
        (&a.ontology, &mut config.corpus.ontology),
        (&a.index, &mut config.cache),
        (&a.ui, &mut config.ui_dir),
    ] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    config.alpha = a.alpha.unwrap_or(config.alpha);
    config.k = a.k.unwrap_or(config.k);
    config.port = a.port.unwrap_or(config.port);
    if let Some(h) = &a.host {
        config.host = h.clone();
    }
    if config.corpus.concepts.as_os_str().is_empty() {
        return Err(Failure::Usage("no corpus: pass --corpus or set it in the config file".into()));
    }
    check_inputs(&config.corpus, &[])?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(manasik_service::serve(config)).map_err(|e| match e {
        ServeError::Config(c) => Failure::Usage(c.to_string()),
        ServeError::Engine(e) => e.into(),
        ServeError::Bind { .. } | ServeError::Io(_) => Failure::Io(e.to_string()),
    })
}
