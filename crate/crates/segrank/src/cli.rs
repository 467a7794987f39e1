//! Command-line interface over the library pipeline.
//!
//! Exit codes: 0 on success, 1 when `validate` finds submission issues,
//! 2 on any input or usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::{evaluate_challenge, validate_submission};
use crate::manifest::{ChallengeManifest, Metric};
use crate::ordinal::{self, OrdinalPredictionSet};
use crate::ranking::{rank_koos, write_json, RankingOutcome, ResultsTable, Scheme};
use crate::report::write_report;
use crate::stability::{
    bootstrap_stability, compare_schemes, read_per_sample_ranks, SchemeComparison,
};
use crate::synth::{generate_challenge, PerturbationOp, SynthSpec};

#[derive(Parser)]
#[command(
    name = "segrank",
    version,
    about = "Evaluate, rank, and stability-test segmentation challenge submissions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a submission tree for missing, extra, or malformed files
    Validate(ValidateArgs),
    /// Compute all metric values into a long-form results CSV
    Evaluate(EvaluateArgs),
    /// Rank teams from a results CSV under one aggregation scheme
    Rank(RankArgs),
    /// Bootstrap the case set and measure ranking stability
    Stability(StabilityArgs),
    /// Final ranks under all four aggregation schemes
    CompareSchemes(CompareSchemesArgs),
    /// Score ordinal grade predictions (MA-MAE) and rank teams
    Koos(KoosArgs),
    /// Generate a synthetic challenge with a known team ordering
    Synth(SynthArgs),
    /// Render the leaderboard and SVG plots from saved outputs
    Report(ReportArgs),
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    Scheme::parse(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct ValidateArgs {
    /// Challenge manifest JSON
    #[arg(long)]
    manifest: PathBuf,
    /// Challenge root directory (defaults to the manifest's directory)
    #[arg(long)]
    root: Option<PathBuf>,
    /// Also write the report as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    root: Option<PathBuf>,
    /// Results CSV to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Results CSV from `evaluate`
    #[arg(long)]
    results: PathBuf,
    /// Aggregation scheme
    #[arg(long, default_value = "rank-then-aggregate-mean", value_parser = parse_scheme)]
    scheme: Scheme,
    /// Ranking outcome JSON to write
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leaderboard CSV (team, rank_score, final_rank) to write
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value = "rank-then-aggregate-mean", value_parser = parse_scheme)]
    scheme: Scheme,
    /// Number of bootstrap samples
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict ranking to a comma-separated metric subset (e.g. "DSC")
    #[arg(long)]
    metrics: Option<String>,
    /// Summary JSON to write
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-sample final ranks CSV to write
    #[arg(long)]
    ranks_csv: Option<PathBuf>,
}

#[derive(Args)]
struct CompareSchemesArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    results: PathBuf,
    /// Comparison JSON to write
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KoosArgs {
    /// Truth grades CSV with header case_id,grade
    #[arg(long)]
    truth: PathBuf,
    /// Prediction CSV per team as NAME=PATH; repeatable
    #[arg(long = "pred", value_name = "NAME=PATH")]
    preds: Vec<String>,
    /// Average over a fixed class count instead of the classes present
    #[arg(long)]
    fixed_class_count: Option<usize>,
    /// Scores + ranking JSON to write
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthProfile {
    /// Severity-scaled erosion
    Erode,
    /// Severity-scaled dilation
    Dilate,
    /// Erosion plus translation and boundary jitter
    Mixed,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to write the challenge into
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 20)]
    cases: usize,
    #[arg(long, default_value_t = 5)]
    teams: usize,
    #[arg(long, value_enum, default_value_t = SynthProfile::Erode)]
    profile: SynthProfile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    results: PathBuf,
    /// Ranking JSON (defaults to the official ranking of the results)
    #[arg(long)]
    ranking: Option<PathBuf>,
    /// Per-sample ranks CSV from `stability --ranks-csv`; enables the blob plot
    #[arg(long)]
    ranks_csv: Option<PathBuf>,
    /// Scheme-comparison JSON (defaults to computing it from the results)
    #[arg(long)]
    comparison: Option<PathBuf>,
    /// Directory to write the report bundle into
    #[arg(long)]
    out_dir: PathBuf,
}

/// Parse process arguments and run; returns the exit code.
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default())
        .format_timestamp(None)
        .try_init()
        .ok();
    match Cli::try_parse() {
        Ok(cli) => dispatch(cli.command),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

/// Same as [`run`], but over explicit arguments (first one is the program
/// name), for driving the CLI in-process.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> i32 {
    let outcome = match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Stability(args) => cmd_stability(args),
        Command::CompareSchemes(args) => cmd_compare_schemes(args),
        Command::Koos(args) => cmd_koos(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn root_dir(manifest_path: &Path, root: Option<PathBuf>) -> PathBuf {
    root.unwrap_or_else(|| {
        manifest_path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    })
}

fn load_table(manifest_path: &Path, results: &Path) -> Result<(ChallengeManifest, ResultsTable)> {
    let manifest = ChallengeManifest::load(manifest_path)?;
    let table = ResultsTable::load_csv(results, &manifest)?;
    Ok((manifest, table))
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let manifest = ChallengeManifest::load(&args.manifest)?;
    let root = root_dir(&args.manifest, args.root);
    let report = validate_submission(&root, &manifest)?;
    print!("{report}");
    if let Some(out) = &args.out {
        report.save_json(out)?;
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<i32> {
    let manifest = ChallengeManifest::load(&args.manifest)?;
    let root = root_dir(&args.manifest, args.root);
    let table = evaluate_challenge(&root, &manifest)?;
    table.save_csv(&args.out)?;
    println!("wrote {} rows to {}", table.rows().len(), args.out.display());
    Ok(0)
}

fn cmd_rank(args: RankArgs) -> Result<i32> {
    let (_, table) = load_table(&args.manifest, &args.results)?;
    let outcome = table.rank_teams(args.scheme);
    println!("scheme: {}", outcome.scheme);
    for (team, score, rank) in outcome.sorted_leaderboard() {
        println!("{rank:>4}  {team}  {score:.4}");
    }
    if let Some(out) = &args.out {
        outcome.save_json(out)?;
    }
    if let Some(csv) = &args.csv {
        outcome.save_csv(csv)?;
    }
    Ok(0)
}

fn parse_metric_list(s: &str) -> Result<Vec<Metric>> {
    s.split(',').map(|p| Metric::parse(p.trim())).collect()
}

fn cmd_stability(args: StabilityArgs) -> Result<i32> {
    let (_, table) = load_table(&args.manifest, &args.results)?;
    let table = match &args.metrics {
        Some(list) => table.with_metrics(&parse_metric_list(list)?)?,
        None => table,
    };
    let summary = bootstrap_stability(&table, args.scheme, args.samples, args.seed)?;
    println!(
        "scheme {}, {} samples, seed {}: tau median {:.4}, IQR [{:.4}, {:.4}], mean distinct-case fraction {:.4}",
        summary.scheme,
        summary.n_samples,
        summary.seed,
        summary.tau_median,
        summary.tau_iqr.0,
        summary.tau_iqr.1,
        summary.distinct_fraction_mean,
    );
    if let Some(out) = &args.out {
        summary.save_json(out)?;
    }
    if let Some(path) = &args.ranks_csv {
        summary.save_ranks_csv(path)?;
    }
    Ok(0)
}

fn cmd_compare_schemes(args: CompareSchemesArgs) -> Result<i32> {
    let (_, table) = load_table(&args.manifest, &args.results)?;
    let comparison = compare_schemes(&table);
    for (si, scheme) in comparison.schemes.iter().enumerate() {
        let mut order: Vec<usize> = (0..comparison.teams.len()).collect();
        order.sort_by_key(|&ti| (comparison.final_ranks[si][ti], &comparison.teams[ti]));
        let line: Vec<String> = order
            .iter()
            .map(|&ti| format!("{} ({})", comparison.teams[ti], comparison.final_ranks[si][ti]))
            .collect();
        println!("{scheme}: {}", line.join(", "));
    }
    if let Some(out) = &args.out {
        comparison.save_json(out)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct KoosOutcome {
    scores: BTreeMap<String, f64>,
    ranking: RankingOutcome,
}

fn cmd_koos(args: KoosArgs) -> Result<i32> {
    if args.preds.is_empty() {
        return Err(Error::InvalidInput(
            "no predictions given; pass --pred NAME=PATH at least once".into(),
        ));
    }
    let mut entries: Vec<(String, PathBuf)> = Vec::new();
    for spec in &args.preds {
        let Some((name, path)) = spec.split_once('=') else {
            return Err(Error::InvalidInput(format!(
                "malformed --pred {spec:?}, expected NAME=PATH"
            )));
        };
        if name.is_empty() || entries.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidInput(format!(
                "empty or duplicate prediction name in {spec:?}"
            )));
        }
        entries.push((name.to_string(), PathBuf::from(path)));
    }
    entries.sort();
    let mut scores = Vec::new();
    for (team, path) in &entries {
        let set =
            OrdinalPredictionSet::from_files(&args.truth, path, ordinal::default_grade_domain())?;
        let score = match args.fixed_class_count {
            Some(c) => ordinal::ma_mae_fixed(&set, c)?,
            None => ordinal::ma_mae(&set)?,
        };
        scores.push((team.clone(), score));
    }
    let ranking = rank_koos(&scores)?;
    for (team, score, rank) in ranking.sorted_leaderboard() {
        println!("{rank:>4}  {team}  {score:.4}");
    }
    if let Some(out) = &args.out {
        write_json(
            out,
            &KoosOutcome {
                scores: scores.into_iter().collect(),
                ranking,
            },
        )?;
    }
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> Result<i32> {
    let ops = match args.profile {
        SynthProfile::Erode => vec![PerturbationOp::Erode { voxels: 1.0 }],
        SynthProfile::Dilate => vec![PerturbationOp::Dilate { voxels: 1.0 }],
        SynthProfile::Mixed => vec![
            PerturbationOp::Erode { voxels: 0.5 },
            PerturbationOp::Translate { voxels: 0.5 },
            PerturbationOp::Jitter { probability: 0.1 },
        ],
    };
    let spec = SynthSpec::new(args.cases, args.seed).with_severity_ladder(ops, args.teams);
    let manifest = generate_challenge(&spec, &args.out_dir)?;
    println!(
        "wrote {} cases x {} teams under {}",
        manifest.cases.len(),
        manifest.teams.len(),
        args.out_dir.display()
    );
    Ok(0)
}

fn cmd_report(args: ReportArgs) -> Result<i32> {
    let (_, table) = load_table(&args.manifest, &args.results)?;
    let ranking = match &args.ranking {
        Some(path) => RankingOutcome::load_json(path)?,
        None => table.rank_teams(Scheme::OFFICIAL),
    };
    let blob = match &args.ranks_csv {
        Some(path) => Some(read_per_sample_ranks(path)?),
        None => None,
    };
    let comparison = match &args.comparison {
        Some(path) => SchemeComparison::load_json(path)?,
        None => compare_schemes(&table),
    };
    let written = write_report(
        &args.out_dir,
        &table,
        &ranking,
        blob.as_ref().map(|(t, r)| (t.as_slice(), r.as_slice())),
        Some(&comparison),
    )?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(0)
}
