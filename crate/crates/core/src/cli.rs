//! Batch command-line surface binding enumeration, evaluation,
//! classification, search, and table generation.
//!
//! Every command writes its results to stdout (JSON lines or CSV) and a
//! run manifest to stderr: one JSON object carrying the tool version, the
//! fully resolved arguments, the seed, per-channel residuals and bounds,
//! and the wall time. Re-running a command from a manifest's `args`
//! reproduces stdout byte-for-byte; only the wall time differs.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 infeasible constraint,
//! 4 budget exceeded.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::channel::{parse_channel_arg, ChannelSpec};
use crate::cyclic::{cyclic_span_stabilizer, enumerate_cyclic};
use crate::fer::{geometric_mean_fer, ErrorSetCache, EstimatorKind, FerEstimate, GeoMeanFer};
use crate::pauli::{equivalence_classes, PauliVector, Stabilizer};
use crate::search::{
    hill_climb, random_search, Constraint, MutationKind, SearchConfig, SearchResult,
};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "stabopt",
    version,
    about = "Construct, evaluate, and optimize short stabilizer codes \
             on asymmetric Pauli channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (also: STABOPT_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Error budget per cached error set (also: STABOPT_CACHE_ERRORS).
    #[arg(long, global = true)]
    cache_errors: Option<usize>,

    /// Flat key=value file supplying defaults for the flags above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Also write the run manifest JSON to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the distinct cyclic stabilizer codes at (n, k).
    EnumerateCyclic {
        /// Block length (number of physical qubits), at most 12.
        #[arg(long)]
        n: u8,
        /// Number of logical qubits, at most 3.
        #[arg(long)]
        k: u8,
        /// Add structural classification fields to each line.
        #[arg(long)]
        classify: bool,
        /// Collapse qubit-relabeling equivalents to one line per class.
        #[arg(long)]
        dedupe_equivalence: bool,
    },
    /// Estimate frame-error rates for one code on one or more channels.
    Fer {
        /// Inline code: comma-separated generators, or cyc:GENERATOR.
        #[arg(long, conflicts_with = "code_file")]
        code: Option<String>,
        /// File holding one generator per line (or the inline forms).
        #[arg(long)]
        code_file: Option<PathBuf>,
        /// xz:p=..,eta=.. | ad:p=..,eta=.. | grid:xz | grid:ad
        #[arg(long)]
        channel: String,
        /// map | se | seo
        #[arg(long, default_value = "map")]
        kind: String,
        /// Relative-error bound each estimate must reach.
        #[arg(long, default_value_t = 0.01)]
        bound: f64,
    },
    /// Family summary: best single code vs per-channel minima, as CSV.
    Tables {
        /// cyclic:N,K or a file of codes (one per line).
        #[arg(long)]
        family: String,
        /// Channel set to summarize over (same syntax as fer --channel).
        #[arg(long, default_value = "grid:xz")]
        channels: String,
        /// map | se | seo
        #[arg(long, default_value = "map")]
        kind: String,
        /// Relative-error bound each estimate must reach.
        #[arg(long, default_value_t = 0.01)]
        bound: f64,
    },
    /// Hill-climbing search with random restarts.
    Hillclimb {
        /// Block length (number of physical qubits), at most 12.
        #[arg(long)]
        n: u8,
        /// Number of logical qubits, at most 3.
        #[arg(long)]
        k: u8,
        /// Channels the objective averages over (same syntax as fer --channel).
        #[arg(long, default_value = "grid:xz")]
        channels: String,
        /// none | weight4 | css | cssy | linear
        #[arg(long, default_value = "none")]
        constraint: String,
        /// permutation | generator | combined | random
        #[arg(long, default_value = "combined")]
        mutation: String,
        /// Independent restart instances.
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Mutation steps per restart.
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        /// Base RNG seed; each restart derives its own stream from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative-error bound for every estimate the search scores.
        #[arg(long, default_value_t = 0.01)]
        bound: f64,
        /// Write a per-iteration percentile trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Percentile tracked by --trace.
        #[arg(long, default_value_t = 95.0)]
        trace_percentile: f64,
        /// Let the per-qubit relabeling draw the identity too.
        #[arg(long)]
        include_identity_perm: bool,
    },
    /// Score random stabilizers with the MAP estimate, one JSON line each.
    RandomSearch {
        /// Block length (number of physical qubits), at most 12.
        #[arg(long)]
        n: u8,
        /// Number of logical qubits, at most 3.
        #[arg(long)]
        k: u8,
        /// Channels the objective averages over (same syntax as fer --channel).
        #[arg(long, default_value = "grid:xz")]
        channels: String,
        /// none | weight4 | css | cssy | linear
        #[arg(long, default_value = "none")]
        constraint: String,
        /// How many random codes to draw and score.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// RNG seed for the code draw.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative-error bound each estimate must reach.
        #[arg(long, default_value_t = 0.01)]
        bound: f64,
    },
}

#[derive(serde::Serialize)]
struct ManifestChannel {
    family: &'static str,
    p: f64,
    eta: f64,
    residual: f64,
    bound: Option<f64>,
}

#[derive(serde::Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    args: Vec<String>,
    seed: Option<u64>,
    channels: Vec<ManifestChannel>,
    wall_time_ms: f64,
}

/// What a command hands back for the manifest.
struct CommandReport {
    command: &'static str,
    args: Vec<String>,
    seed: Option<u64>,
    channels: Vec<ManifestChannel>,
}

fn manifest_channels(specs: &[ChannelSpec], estimates: &[FerEstimate]) -> Vec<ManifestChannel> {
    specs
        .iter()
        .zip(estimates)
        .map(|(spec, est)| ManifestChannel {
            family: spec.family.tag(),
            p: spec.p,
            eta: spec.eta,
            residual: est.residual,
            bound: est.bound,
        })
        .collect()
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        // A closed output pipe (e.g. piping into `head`) is not a failure.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::UnsatisfiableChannel(_) => 2,
                Error::InfeasibleConstraint(_) => 3,
                Error::BudgetExceeded { .. } => 4,
                _ => 1,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let start = Instant::now();
    let file_settings = match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    let threads = resolve_setting(cli.threads, "STABOPT_THREADS", &file_settings, "threads")?;
    let cache_errors = resolve_setting(
        cli.cache_errors,
        "STABOPT_CACHE_ERRORS",
        &file_settings,
        "cache-errors",
    )?;
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        // A later call in the same process keeps the first pool; results
        // do not depend on the worker count.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let cache = match cache_errors {
        Some(budget) => ErrorSetCache::new(budget),
        None => ErrorSetCache::with_default_budget(),
    };

    let mut report = match &cli.command {
        Command::EnumerateCyclic { n, k, classify, dedupe_equivalence } => {
            cmd_enumerate_cyclic(*n, *k, *classify, *dedupe_equivalence)?
        }
        Command::Fer { code, code_file, channel, kind, bound } => {
            cmd_fer(code.as_deref(), code_file.as_deref(), channel, kind, *bound, &cache)?
        }
        Command::Tables { family, channels, kind, bound } => {
            cmd_tables(family, channels, kind, *bound, &cache)?
        }
        Command::Hillclimb {
            n,
            k,
            channels,
            constraint,
            mutation,
            restarts,
            iterations,
            seed,
            bound,
            trace,
            trace_percentile,
            include_identity_perm,
        } => cmd_hillclimb(
            HillclimbArgs {
                n: *n,
                k: *k,
                channels,
                constraint,
                mutation,
                restarts: *restarts,
                iterations: *iterations,
                seed: *seed,
                bound: *bound,
                trace: trace.as_deref(),
                trace_percentile: *trace_percentile,
                include_identity_perm: *include_identity_perm,
            },
            &cache,
        )?,
        Command::RandomSearch { n, k, channels, constraint, count, seed, bound } => {
            cmd_random_search(*n, *k, channels, constraint, *count, *seed, *bound, &cache)?
        }
    };

    if let Some(t) = threads {
        report.args.extend(["--threads".into(), t.to_string()]);
    }
    if let Some(b) = cache_errors {
        report.args.extend(["--cache-errors".into(), b.to_string()]);
    }
    let manifest = RunManifest {
        tool: "stabopt",
        version: env!("CARGO_PKG_VERSION"),
        command: report.command,
        args: report.args,
        seed: report.seed,
        channels: report.channels,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let line = serde_json::to_string(&manifest)
        .map_err(|e| Error::InvalidArgument(format!("manifest serialization failed: {e}")))?;
    eprintln!("{line}");
    if let Some(path) = &cli.manifest {
        std::fs::write(path, format!("{line}\n"))?;
    }
    Ok(())
}

/// Reads a flat key=value settings file ('#' starts a comment).
fn load_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut settings = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidArgument(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim();
        if !matches!(key, "threads" | "cache-errors") {
            return Err(Error::InvalidArgument(format!(
                "{}:{}: unknown setting {key:?} (supported: threads, cache-errors)",
                path.display(),
                idx + 1
            )));
        }
        settings.insert(key.to_string(), value.trim().to_string());
    }
    Ok(settings)
}

/// Flag > environment > config file > none.
fn resolve_setting(
    flag: Option<usize>,
    env_key: &str,
    file_settings: &HashMap<String, String>,
    file_key: &str,
) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    let parse = |source: &str, raw: &str| {
        raw.parse::<usize>().map_err(|_| {
            Error::InvalidArgument(format!("{source}: expected a nonnegative integer, got {raw:?}"))
        })
    };
    if let Ok(raw) = std::env::var(env_key) {
        return Ok(Some(parse(env_key, &raw)?));
    }
    if let Some(raw) = file_settings.get(file_key) {
        return Ok(Some(parse(file_key, raw)?));
    }
    Ok(None)
}

/// Parses a code given inline (`XZIZX,...` or `cyc:XZIZXII`) or in a file
/// (same forms; newline-separated generators allowed).
fn parse_code_text(text: &str) -> Result<Stabilizer> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("cyc:") {
        return cyclic_span_stabilizer(&PauliVector::parse(rest.trim())?);
    }
    let gens = text
        .split([',', ';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(PauliVector::parse)
        .collect::<Result<Vec<_>>>()?;
    Stabilizer::new(gens)
}

fn parse_code_arg(code: Option<&str>, code_file: Option<&Path>) -> Result<Stabilizer> {
    match (code, code_file) {
        (Some(inline), None) => parse_code_text(inline),
        (None, Some(path)) => parse_code_text(&std::fs::read_to_string(path)?),
        _ => Err(Error::InvalidArgument("pass exactly one of --code and --code-file".into())),
    }
}

fn generator_strings(s: &Stabilizer) -> Vec<String> {
    s.generators().iter().map(|g| g.to_string()).collect()
}

fn cmd_enumerate_cyclic(
    n: u8,
    k: u8,
    classify: bool,
    dedupe_equivalence: bool,
) -> Result<CommandReport> {
    let specs = enumerate_cyclic(n, k)?;
    let stabilizers: Vec<Stabilizer> =
        specs.iter().map(|c| c.to_stabilizer()).collect::<Result<_>>()?;
    let (keep, class_sizes) = if dedupe_equivalence {
        if n > 8 {
            eprintln!("note: equivalence grouping scans qubit relabelings; n = {n} may be slow");
        }
        let classes = equivalence_classes(&stabilizers);
        let mut first_of = Vec::new();
        let mut sizes: Vec<usize> = Vec::new();
        let mut seen = HashMap::new();
        for (i, &class) in classes.iter().enumerate() {
            match seen.get(&class) {
                Some(&slot) => sizes[slot] += 1,
                None => {
                    seen.insert(class, first_of.len());
                    first_of.push(i);
                    sizes.push(1);
                }
            }
        }
        (first_of, Some(sizes))
    } else {
        ((0..specs.len()).collect(), None)
    };

    let poly_len = n as usize + 1;
    let mut out = std::io::stdout().lock();
    use std::io::Write;
    for (slot, &i) in keep.iter().enumerate() {
        let spec = &specs[i];
        let s = &stabilizers[i];
        let mut line = serde_json::json!({
            "n": n,
            "k": k,
            "p": spec.p_poly().to_bitstring(poly_len),
            "q": spec.q_poly().to_bitstring(poly_len),
            "r": spec.r_poly().to_bitstring(poly_len),
            "stabilizer": generator_strings(s),
            "distance": s.distance()?,
        });
        if classify {
            let structure = s.classify_structure();
            let (one_gen, _) = spec.has_single_generator()?;
            let extra = serde_json::json!({
                "one_generator": one_gen,
                "weight4": structure.has_weight4_rep,
                "css": structure.is_css,
                "cssy": structure.is_cssy,
                "dual_containing_css": structure.is_dual_containing_css,
                "linear": structure.is_linear,
            });
            merge(&mut line, extra);
        }
        if let Some(sizes) = &class_sizes {
            merge(&mut line, serde_json::json!({ "class_size": sizes[slot] }));
        }
        writeln!(out, "{line}")?;
    }

    let mut args = vec![
        "enumerate-cyclic".to_string(),
        "--n".into(),
        n.to_string(),
        "--k".into(),
        k.to_string(),
    ];
    if classify {
        args.push("--classify".into());
    }
    if dedupe_equivalence {
        args.push("--dedupe-equivalence".into());
    }
    Ok(CommandReport { command: "enumerate-cyclic", args, seed: None, channels: Vec::new() })
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (Some(a), serde_json::Value::Object(b)) = (into.as_object_mut(), from) {
        a.extend(b);
    }
}

fn cmd_fer(
    code: Option<&str>,
    code_file: Option<&Path>,
    channel: &str,
    kind: &str,
    bound: f64,
    cache: &ErrorSetCache,
) -> Result<CommandReport> {
    let s = parse_code_arg(code, code_file)?;
    let specs = parse_channel_arg(channel)?;
    let kind = EstimatorKind::from_str(kind)?;
    let gm = geometric_mean_fer(&s, &specs, kind, bound, cache)?;
    let channels: Vec<serde_json::Value> = specs
        .iter()
        .zip(&gm.per_channel)
        .map(|(spec, est)| {
            serde_json::json!({
                "family": spec.family.tag(),
                "p": spec.p,
                "eta": spec.eta,
                "estimate": est,
            })
        })
        .collect();
    let line = serde_json::json!({
        "stabilizer": generator_strings(&s),
        "n": s.n(),
        "k": s.k(),
        "kind": kind.tag(),
        "value": gm.value,
        "bound": gm.bound,
        "channels": channels,
    });
    println!("{line}");

    let mut args = vec!["fer".to_string()];
    match (code, code_file) {
        (Some(inline), _) => args.extend(["--code".into(), inline.to_string()]),
        (_, Some(path)) => args.extend(["--code-file".into(), path.display().to_string()]),
        _ => unreachable!("parse_code_arg checked"),
    }
    args.extend([
        "--channel".into(),
        channel.to_string(),
        "--kind".into(),
        kind.tag().to_string(),
        "--bound".into(),
        bound.to_string(),
    ]);
    Ok(CommandReport {
        command: "fer",
        args,
        seed: None,
        channels: manifest_channels(&specs, &gm.per_channel),
    })
}

/// Loads a family of codes: `cyclic:N,K` or a file with one code per line.
fn parse_family(family: &str) -> Result<Vec<Stabilizer>> {
    if let Some(rest) = family.strip_prefix("cyclic:") {
        let (n, k) = rest.split_once(',').ok_or_else(|| {
            Error::InvalidArgument(format!("expected cyclic:N,K, got {family:?}"))
        })?;
        let parse_u8 = |raw: &str, what: &str| {
            raw.trim().parse::<u8>().map_err(|_| {
                Error::InvalidArgument(format!("{what} must be a small integer, got {raw:?}"))
            })
        };
        let n = parse_u8(n, "n")?;
        let k = parse_u8(k, "k")?;
        return enumerate_cyclic(n, k)?.iter().map(|spec| spec.to_stabilizer()).collect();
    }
    let text = std::fs::read_to_string(family)?;
    let codes: Vec<Stabilizer> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_code_text)
        .collect::<Result<_>>()?;
    if codes.is_empty() {
        return Err(Error::InvalidArgument(format!("family file {family:?} holds no codes")));
    }
    Ok(codes)
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn cmd_tables(
    family: &str,
    channels: &str,
    kind: &str,
    bound: f64,
    cache: &ErrorSetCache,
) -> Result<CommandReport> {
    let codes = parse_family(family)?;
    if codes.is_empty() {
        return Err(Error::InvalidArgument(format!("family {family:?} is empty")));
    }
    let specs = parse_channel_arg(channels)?;
    let kind = EstimatorKind::from_str(kind)?;
    let scored: Vec<(Stabilizer, GeoMeanFer)> = codes
        .into_iter()
        .map(|s| {
            let gm = geometric_mean_fer(&s, &specs, kind, bound, cache)?;
            Ok((s, gm))
        })
        .collect::<Result<_>>()?;
    let (best, best_gm) = scored
        .iter()
        .min_by(|(sa, a), (sb, b)| {
            a.value.total_cmp(&b.value).then_with(|| sa.canonical_key().cmp(&sb.canonical_key()))
        })
        .map(|(s, gm)| (s, gm))
        .expect("family is nonempty");
    let lambda = best_gm.value;
    // Geometric mean of the per-channel minima over the whole family.
    let mu = {
        let ln_sum: f64 = (0..specs.len())
            .map(|j| {
                scored
                    .iter()
                    .map(|(_, gm)| gm.per_channel[j].value)
                    .fold(f64::INFINITY, f64::min)
                    .ln()
            })
            .sum();
        (ln_sum / specs.len() as f64).exp()
    };
    println!("family,channels,kind,codes,lambda,mu,ratio,best_code");
    println!(
        "{},{},{},{},{},{},{},{}",
        csv_field(family),
        csv_field(channels),
        kind.tag(),
        scored.len(),
        lambda,
        mu,
        lambda / mu,
        csv_field(&generator_strings(best).join(";")),
    );

    let args = vec![
        "tables".to_string(),
        "--family".into(),
        family.to_string(),
        "--channels".into(),
        channels.to_string(),
        "--kind".into(),
        kind.tag().to_string(),
        "--bound".into(),
        bound.to_string(),
    ];
    Ok(CommandReport {
        command: "tables",
        args,
        seed: None,
        channels: manifest_channels(&specs, &best_gm.per_channel),
    })
}

struct HillclimbArgs<'a> {
    n: u8,
    k: u8,
    channels: &'a str,
    constraint: &'a str,
    mutation: &'a str,
    restarts: usize,
    iterations: usize,
    seed: u64,
    bound: f64,
    trace: Option<&'a Path>,
    trace_percentile: f64,
    include_identity_perm: bool,
}

fn cmd_hillclimb(a: HillclimbArgs<'_>, cache: &ErrorSetCache) -> Result<CommandReport> {
    let specs = parse_channel_arg(a.channels)?;
    let config = SearchConfig {
        n: a.n,
        k: a.k,
        restarts: a.restarts,
        iterations: a.iterations,
        objective_channels: specs.clone(),
        constraint: Constraint::from_str(a.constraint)?,
        mutation: MutationKind::from_str(a.mutation)?,
        seed: a.seed,
        target_bound: a.bound,
        include_identity_perm: a.include_identity_perm,
        trace_percentile: a.trace.is_some().then_some(a.trace_percentile),
    };
    let SearchResult { best_stabilizer, objective_seo, final_fer_map, trace } =
        hill_climb(&config, cache)?;
    if let (Some(path), Some(series)) = (a.trace, &trace) {
        let mut csv = String::from("iteration,objective\n");
        for (t, value) in series.iter().enumerate() {
            csv.push_str(&format!("{t},{value}\n"));
        }
        std::fs::write(path, csv)?;
    }
    let line = serde_json::json!({
        "stabilizer": generator_strings(&best_stabilizer),
        "n": a.n,
        "k": a.k,
        "objective_seo": objective_seo,
        "fer_map": final_fer_map,
    });
    println!("{line}");

    let mut args = vec![
        "hillclimb".to_string(),
        "--n".into(),
        a.n.to_string(),
        "--k".into(),
        a.k.to_string(),
        "--channels".into(),
        a.channels.to_string(),
        "--constraint".into(),
        config.constraint.to_string(),
        "--mutation".into(),
        config.mutation.to_string(),
        "--restarts".into(),
        a.restarts.to_string(),
        "--iterations".into(),
        a.iterations.to_string(),
        "--seed".into(),
        a.seed.to_string(),
        "--bound".into(),
        a.bound.to_string(),
    ];
    if let Some(path) = a.trace {
        args.extend([
            "--trace".into(),
            path.display().to_string(),
            "--trace-percentile".into(),
            a.trace_percentile.to_string(),
        ]);
    }
    if a.include_identity_perm {
        args.push("--include-identity-perm".into());
    }
    Ok(CommandReport {
        command: "hillclimb",
        args,
        seed: Some(a.seed),
        channels: manifest_channels(&specs, &final_fer_map.per_channel),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_random_search(
    n: u8,
    k: u8,
    channels: &str,
    constraint: &str,
    count: usize,
    seed: u64,
    bound: f64,
    cache: &ErrorSetCache,
) -> Result<CommandReport> {
    let specs = parse_channel_arg(channels)?;
    let mut config = SearchConfig::new(n, k, specs.clone());
    config.restarts = count;
    config.constraint = Constraint::from_str(constraint)?;
    config.mutation = MutationKind::Random;
    config.seed = seed;
    config.target_bound = bound;
    let rows = random_search(&config, cache)?;
    let mut out = std::io::stdout().lock();
    use std::io::Write;
    for row in &rows {
        let line = serde_json::json!({
            "stabilizer": generator_strings(&row.stabilizer),
            "value": row.fer_map.value,
            "bound": row.fer_map.bound,
        });
        writeln!(out, "{line}")?;
    }
    let best = rows
        .iter()
        .min_by(|a, b| {
            a.fer_map
                .value
                .total_cmp(&b.fer_map.value)
                .then_with(|| a.stabilizer.canonical_key().cmp(&b.stabilizer.canonical_key()))
        })
        .ok_or_else(|| Error::InvalidArgument("count must be at least 1".into()))?;

    let args = vec![
        "random-search".to_string(),
        "--n".into(),
        n.to_string(),
        "--k".into(),
        k.to_string(),
        "--channels".into(),
        channels.to_string(),
        "--constraint".into(),
        config.constraint.to_string(),
        "--count".into(),
        count.to_string(),
        "--seed".into(),
        seed.to_string(),
        "--bound".into(),
        bound.to_string(),
    ];
    Ok(CommandReport {
        command: "random-search",
        args,
        seed: Some(seed),
        channels: manifest_channels(&specs, &best.fer_map.per_channel),
    })
}
