use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use semican::linalg::rational_to_string;
use semican::quiver::{deg_leq, peel_top, refine_order, t_top, total_generic_flag};
use semican::selftest::{run_all, SelftestConfig};
use semican::{
    DimVector, Error, HallAlgebra, HallCache, LambdaSampler, Multisegment, QuiverSpec,
    SamplingConfig, SemicanEngine, TransitionReport, Word, WordCombo,
};

const EXIT_PARSE: u8 = 10;
const EXIT_CONSENSUS: u8 = 20;
const EXIT_INTERPOLATION: u8 = 21;
const EXIT_ROUTES: u8 = 30;
const EXIT_INTERNAL: u8 = 40;

#[derive(Parser, Debug)]
#[command(name = "semican", version, about = "PBW to semicanonical transition matrices for the A_n quiver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute and certify the transition matrix for one dimension vector.
    Transition(Common),
    /// Query a single primitive.
    Inspect {
        #[command(subcommand)]
        what: Inspect,
    },
    /// Run the regression and oracle suites.
    Selftest(Common),
    /// Manage the Hall-count cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum Inspect {
    /// Classes of a dimension vector along the degeneration order.
    DegOrder(Common),
    /// Total generic flag word of a class, or the PBW expansion of a word.
    Flag(Common),
    /// Submodules with quotient S_i^a, counted per prime and at q = 1.
    Hall(Common),
    /// t_i of a class or of its component.
    T(Common),
    /// Peel the top S_i of a class or of its component.
    Peel(Common),
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    Stats(CacheArgs),
    Clear(CacheArgs),
}

#[derive(Args, Debug)]
struct CacheArgs {
    #[arg(long, env = "SEMICAN_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    #[default]
    Pretty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Level {
    #[default]
    Quiver,
    Component,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    /// Dimension vector, e.g. 2,2.
    #[arg(long)]
    dim: Option<String>,
    /// Multisegment, e.g. "1[1,2]+1[1,1]+1[2,2]".
    #[arg(long)]
    module: Option<String>,
    #[arg(long)]
    vertex: Option<usize>,
    /// Word of divided powers, e.g. "(2,1)(1,2)(2,1)".
    #[arg(long)]
    word: Option<String>,
    /// Size a of the quotient S_i^a for `inspect hall`.
    #[arg(long, default_value_t = 1)]
    size: usize,
    #[arg(long, value_enum, default_value_t = Level::Quiver)]
    level: Level,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per prime.
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Prime pool override, e.g. 5,7,11,13.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    #[arg(long, env = "SEMICAN_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Bound on |d| for the selftest suites.
    #[arg(long, default_value_t = 6)]
    dim_bound: usize,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl Common {
    fn spec(&self) -> Result<QuiverSpec, Error> {
        QuiverSpec::new(self.n.ok_or_else(|| parse_err("--n is required"))?)
    }

    fn dim(&self, spec: QuiverSpec) -> Result<DimVector, Error> {
        let text = self.dim.as_deref().ok_or_else(|| parse_err("--dim is required"))?;
        let d: DimVector = text.parse()?;
        DimVector::for_spec(spec, d.as_slice().to_vec())
    }

    fn module(&self, spec: QuiverSpec) -> Result<Multisegment, Error> {
        let text = self.module.as_deref().ok_or_else(|| parse_err("--module is required"))?;
        let m = Multisegment::parse(spec, text)?;
        if self.dim.is_some() {
            let d = self.dim(spec)?;
            if m.dim_vector() != d {
                return Err(Error::Dimension(format!(
                    "module {m} has dimension vector {}, not {d}",
                    m.dim_vector()
                )));
            }
        }
        Ok(m)
    }

    fn vertex(&self, spec: QuiverSpec) -> Result<usize, Error> {
        let i = self.vertex.ok_or_else(|| parse_err("--vertex is required"))?;
        spec.check_vertex(i)?;
        Ok(i)
    }

    fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            root_seed: self.seed,
            samples_per_prime: self.samples,
            primes: self.primes.clone(),
            ..SamplingConfig::default()
        }
    }

    fn hall(&self) -> Result<Arc<HallAlgebra>, Error> {
        Ok(Arc::new(match &self.cache_dir {
            Some(dir) => HallAlgebra::with_cache(Arc::new(HallCache::open(dir)?)),
            None => HallAlgebra::new(),
        }))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Dimension(_) => EXIT_PARSE,
        Error::Consensus { .. } => EXIT_CONSENSUS,
        Error::Interpolation { .. } => EXIT_INTERPOLATION,
        Error::RouteDisagreement { .. } => EXIT_ROUTES,
        Error::NotUnitriangular(_) | Error::Internal(_) | Error::Cache(_) | Error::Io(_) => EXIT_INTERNAL,
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn json_text(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn cmd_transition(c: &Common) -> Result<u8, Error> {
    let spec = c.spec()?;
    let d = c.dim(spec)?;
    let engine = SemicanEngine::new(spec, c.hall()?, c.sampling());
    let out = engine.transition_matrix(&d)?;
    let report = TransitionReport::from_certified(&out);
    match c.format {
        Format::Json => emit(&report.to_json()),
        Format::Csv => emit(&report.to_csv()),
        Format::Pretty => emit(&format!("{}elapsed: {:.3} s", report.to_pretty(), out.elapsed.as_secs_f64())),
    }
    if c.format != Format::Pretty {
        eprintln!("elapsed: {:.3} s", out.elapsed.as_secs_f64());
    }
    if !out.certification.integral {
        eprintln!("warning: non-integral transition entries for {d}");
    }
    if out.certification.passed() {
        Ok(0)
    } else {
        eprintln!(
            "certification failed: unitriangular={} routes_agree={} delta_identity={}",
            out.certification.unitriangular, out.certification.routes_agree, out.certification.delta_identity
        );
        Ok(EXIT_ROUTES)
    }
}

fn cmd_deg_order(c: &Common) -> Result<u8, Error> {
    let spec = c.spec()?;
    let d = c.dim(spec)?;
    let order = refine_order(&semican::quiver::enumerate_multisegments(spec, &d)?)?;
    let k = order.len();
    // Covering relations of the degeneration order.
    let below = |a: usize, b: usize| a != b && deg_leq(&order[a], &order[b]);
    let covers: Vec<Vec<usize>> = (0..k)
        .map(|b| {
            (0..k)
                .filter(|&a| below(a, b) && !(0..k).any(|m| below(a, m) && below(m, b)))
                .collect()
        })
        .collect();
    match c.format {
        Format::Json => {
            let relations: Vec<[usize; 2]> = (0..k)
                .flat_map(|a| (0..k).filter(move |&b| below(a, b)).map(move |b| [a, b]))
                .collect();
            let names: Vec<String> = order.iter().map(|m| m.to_string()).collect();
            emit(&json_text(&json!({ "dim": d.to_string(), "order": names, "leq": relations, "covers": covers })));
        }
        _ => {
            for (b, m) in order.iter().enumerate() {
                let cov: Vec<String> = covers[b].iter().map(|a| a.to_string()).collect();
                if cov.is_empty() {
                    emit(&format!("{b:>3}  {m}"));
                } else {
                    emit(&format!("{b:>3}  {m}  degenerates from {}", cov.join(",")));
                }
            }
        }
    }
    Ok(0)
}

fn pbw_json(v: &semican::PbwVector) -> serde_json::Value {
    let map: BTreeMap<String, String> = v.iter().map(|(m, c)| (m.to_string(), rational_to_string(c))).collect();
    json!(map)
}

fn cmd_flag(c: &Common) -> Result<u8, Error> {
    let spec = c.spec()?;
    let hall = c.hall()?;
    let (module, word) = match (&c.module, &c.word) {
        (Some(_), _) => {
            let m = c.module(spec)?;
            let w = total_generic_flag(&m)?;
            (Some(m), w)
        }
        (None, Some(w)) => (None, Word::parse(spec, w)?),
        (None, None) => return Err(parse_err("--module or --word is required")),
    };
    let pbw = hall.word_to_pbw(spec, &WordCombo::word(spec, word.clone()))?;
    match c.format {
        Format::Json => emit(&json_text(&json!({
            "module": module.as_ref().map(|m| m.to_string()),
            "word": word.to_string(),
            "pbw": pbw_json(&pbw),
        }))),
        _ => {
            emit(&word.to_string());
            if module.is_none() {
                emit(&pbw.to_string());
            }
        }
    }
    Ok(0)
}

fn cmd_hall(c: &Common) -> Result<u8, Error> {
    let spec = c.spec()?;
    let l = c.module(spec)?;
    let i = c.vertex(spec)?;
    let a = c.size;
    let hall = c.hall()?;
    let primes = c.primes.clone().unwrap_or_else(|| vec![2, 3, 5]);
    let mut per_prime = BTreeMap::new();
    for &p in &primes {
        if !semican::linalg::is_prime(p) {
            return Err(parse_err(format!("{p} is not prime")));
        }
        let counts: BTreeMap<String, String> = hall
            .counts(&l, i, a, p)?
            .into_iter()
            .map(|(m, k)| (m.to_string(), k.to_string()))
            .collect();
        per_prime.insert(p, counts);
    }
    let at_one: BTreeMap<String, String> = hall
        .structure_constants(&l, i, a)?
        .iter()
        .map(|(m, k)| (m.to_string(), k.to_string()))
        .collect();
    match c.format {
        Format::Json => emit(&json_text(&json!({
            "module": l.to_string(), "vertex": i, "size": a,
            "counts": per_prime, "q_equals_1": at_one,
        }))),
        _ => {
            for (p, counts) in &per_prime {
                let parts: Vec<String> = counts.iter().map(|(m, k)| format!("{m}: {k}")).collect();
                emit(&format!("p={p}: {}", if parts.is_empty() { "-".into() } else { parts.join(", ") }));
            }
            let parts: Vec<String> = at_one.iter().map(|(m, k)| format!("{m}: {k}")).collect();
            emit(&format!("q=1: {}", if parts.is_empty() { "-".into() } else { parts.join(", ") }));
        }
    }
    Ok(0)
}

fn cmd_t_or_peel(c: &Common, peel: bool) -> Result<u8, Error> {
    let spec = c.spec()?;
    let m = c.module(spec)?;
    let i = c.vertex(spec)?;
    let sampler = LambdaSampler::new(c.sampling());
    let value = match (peel, c.level) {
        (false, Level::Quiver) => t_top(&m, i).to_string(),
        (false, Level::Component) => sampler.t_component(&m, i)?.to_string(),
        (true, Level::Quiver) => peel_top(&m, i).to_string(),
        (true, Level::Component) => sampler.peel_component(&m, i)?.to_string(),
    };
    match c.format {
        Format::Json => {
            let key = if peel { "peel" } else { "t" };
            let level = match c.level {
                Level::Quiver => "quiver",
                Level::Component => "component",
            };
            emit(&json_text(&json!({ "module": m.to_string(), "vertex": i, "level": level, key: value })));
        }
        _ => emit(&value),
    }
    Ok(0)
}

fn cmd_selftest(c: &Common) -> Result<u8, Error> {
    let cache = match &c.cache_dir {
        Some(dir) => Some(Arc::new(HallCache::open(dir)?)),
        None => None,
    };
    let results = run_all(&SelftestConfig {
        dim_bound: c.dim_bound,
        sampling: c.sampling(),
        cache,
    });
    let mut failed = Vec::new();
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        emit(&format!(
            "{mark} {:<18} {:>7} checks  {:.3} s",
            r.name,
            r.checks,
            r.elapsed.as_secs_f64()
        ));
        for f in &r.failures {
            emit(&format!("     {f}"));
        }
        if !r.passed {
            failed.push(r.name.clone());
        }
    }
    if failed.is_empty() {
        emit("selftest: PASS");
        Ok(0)
    } else {
        eprintln!("failing suites: {}", failed.join(", "));
        emit("selftest: FAIL");
        Ok(EXIT_INTERNAL)
    }
}

fn cmd_cache(action: &CacheAction) -> Result<u8, Error> {
    let dir = |a: &CacheArgs| {
        a.cache_dir
            .clone()
            .ok_or_else(|| parse_err("--cache-dir or SEMICAN_CACHE_DIR is required"))
    };
    match action {
        CacheAction::Stats(a) => {
            let cache = HallCache::open(dir(a)?)?;
            let s = cache.stats();
            emit(&format!(
                "path: {}\nrecords: {}\nmalformed lines: {}",
                s.path.display(),
                s.records,
                s.malformed_lines
            ));
        }
        CacheAction::Clear(a) => {
            let removed = HallCache::clear(dir(a)?)?;
            emit(if removed { "cache cleared" } else { "cache was empty" });
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Transition(c) => cmd_transition(c),
        Command::Inspect { what } => match what {
            Inspect::DegOrder(c) => cmd_deg_order(c),
            Inspect::Flag(c) => cmd_flag(c),
            Inspect::Hall(c) => cmd_hall(c),
            Inspect::T(c) => cmd_t_or_peel(c, false),
            Inspect::Peel(c) => cmd_t_or_peel(c, true),
        },
        Command::Selftest(c) => cmd_selftest(c),
        Command::Cache { action } => cmd_cache(action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
