//! Ranking-stability analysis.
//!
//! How much does a leaderboard owe to the particular test cases drawn?
//! Bootstrap resampling answers empirically: draw the case set with
//! replacement, re-rank, and compare against the full-set ranking with
//! Kendall's τ-b. Repeated over many seeded samples this yields a τ
//! distribution whose spread measures ranking stability, plus the data
//! behind blob plots (per-sample ranks) and scheme-comparison line plots.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::Metric;
use crate::ranking::{csv_writer, write_json, RankingOutcome, ResultsTable, Scheme};
use crate::rng::substream;
use crate::stats;

/// Kendall's τ-b between two paired value vectors (typically ranks).
///
/// τ-b = (P − Q) / √((n₀ − T_x)(n₀ − T_y)) with P/Q the concordant and
/// discordant pair counts and T the within-vector tie corrections. It
/// reduces to τ-a when no ties exist. A fully tied vector makes the
/// denominator zero; that degenerate comparison is defined as 0.0.
pub fn kendall_tau_paired(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::MismatchedTeams);
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewTeams(n));
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut ties_x = 0i64;
    let mut ties_y = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                ties_x += 1;
                ties_y += 1;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = ((n0 - ties_x) as f64 * (n0 - ties_y) as f64).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((concordant - discordant) as f64 / denom)
}

/// Kendall's τ-b between two leaderboards over the same team set; team
/// order inside each outcome is irrelevant.
pub fn kendall_tau(a: &RankingOutcome, b: &RankingOutcome) -> Result<f64> {
    let mut sorted_a = a.teams.clone();
    let mut sorted_b = b.teams.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return Err(Error::MismatchedTeams);
    }
    let x: Vec<f64> = a.final_ranks.iter().map(|&r| r as f64).collect();
    let y: Vec<f64> = a
        .teams
        .iter()
        .map(|t| b.rank_of(t).expect("team sets verified equal") as f64)
        .collect();
    kendall_tau_paired(&x, &y)
}

/// Bootstrap stability result: the τ distribution against the full-set
/// ranking, its summary statistics, and the per-sample ranks behind blob
/// plots (exported separately as CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub scheme: String,
    pub n_samples: usize,
    pub seed: u64,
    pub teams: Vec<String>,
    /// Full-set final ranks, aligned with `teams`.
    pub full_ranks: Vec<usize>,
    pub taus: Vec<f64>,
    pub tau_median: f64,
    pub tau_iqr: (f64, f64),
    /// Mean fraction of distinct cases per sample; ≈ 1 − 1/e for large N.
    pub distinct_fraction_mean: f64,
    /// Final ranks per sample (outer) and team (inner, aligned with
    /// `teams`). Serialized to CSV, not JSON.
    #[serde(skip)]
    pub per_sample_ranks: Vec<Vec<usize>>,
}

impl BootstrapSummary {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    /// Long-form per-sample ranks: `sample,team,final_rank`.
    pub fn save_ranks_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        w.write_record(["sample", "team", "final_rank"])
            .map_err(|e| Error::csv(path, e))?;
        for (i, ranks) in self.per_sample_ranks.iter().enumerate() {
            for (team, rank) in self.teams.iter().zip(ranks.iter()) {
                w.write_record([&i.to_string(), team, &rank.to_string()])
                    .map_err(|e| Error::csv(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Draw `n_samples` bootstrap samples of the case set (N cases with
/// replacement, multiplicity honored), re-rank each, and compare with the
/// full-set ranking. Sample k uses substream k of `seed`, so results are
/// identical whether samples run serially or in parallel.
pub fn bootstrap_stability(
    table: &ResultsTable,
    scheme: Scheme,
    n_samples: usize,
    seed: u64,
) -> Result<BootstrapSummary> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let full = table.rank_teams(scheme);
    let n_cases = table.cases().len();

    let samples: Vec<(f64, f64, Vec<usize>)> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let indices: Vec<usize> =
                (0..n_cases).map(|_| rng.random_range(0..n_cases)).collect();
            let mut distinct = indices.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let fraction = distinct.len() as f64 / n_cases as f64;
            let outcome = table.rank_teams_on_cases(scheme, &indices);
            let tau = kendall_tau(&outcome, &full).expect("same teams by construction");
            (tau, fraction, outcome.final_ranks)
        })
        .collect();

    let taus: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let distinct_fraction_mean = stats::mean(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
    let per_sample_ranks: Vec<Vec<usize>> = samples.into_iter().map(|s| s.2).collect();
    let (q1, med, q3) = stats::quartiles(&taus);

    Ok(BootstrapSummary {
        scheme: scheme.as_str().to_string(),
        n_samples,
        seed,
        teams: full.teams.clone(),
        full_ranks: full.final_ranks.clone(),
        taus,
        tau_median: med,
        tau_iqr: (q1, q3),
        distinct_fraction_mean,
        per_sample_ranks,
    })
}

/// One metric subset's stability run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetStability {
    pub metrics: Vec<Metric>,
    pub summary: BootstrapSummary,
}

/// Re-run [`bootstrap_stability`] with per-cell ranks restricted to each
/// metric subset in turn, all under the same seed so the full subset
/// reproduces the unrestricted run exactly.
pub fn metric_subset_stability(
    table: &ResultsTable,
    scheme: Scheme,
    subsets: &[Vec<Metric>],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<SubsetStability>> {
    let mut out = Vec::with_capacity(subsets.len());
    for subset in subsets {
        let restricted = table.with_metrics(subset)?;
        out.push(SubsetStability {
            metrics: subset.clone(),
            summary: bootstrap_stability(&restricted, scheme, n_samples, seed)?,
        });
    }
    Ok(out)
}

/// Final ranks under all four aggregation schemes: the data behind the
/// scheme-comparison line plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeComparison {
    pub teams: Vec<String>,
    pub schemes: Vec<String>,
    /// Indexed [scheme][team], aligned with `schemes` × `teams`.
    pub final_ranks: Vec<Vec<usize>>,
    /// Indexed [scheme][team].
    pub rank_scores: Vec<Vec<f64>>,
}

impl SchemeComparison {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load_json(path: &Path) -> Result<SchemeComparison> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn outcome_of(&self, scheme: Scheme) -> Option<(&[usize], &[f64])> {
        let i = self.schemes.iter().position(|s| s == scheme.as_str())?;
        Some((&self.final_ranks[i], &self.rank_scores[i]))
    }
}

pub fn compare_schemes(table: &ResultsTable) -> SchemeComparison {
    let mut final_ranks = Vec::with_capacity(Scheme::ALL.len());
    let mut rank_scores = Vec::with_capacity(Scheme::ALL.len());
    for scheme in Scheme::ALL {
        let outcome = table.rank_teams(scheme);
        final_ranks.push(outcome.final_ranks);
        rank_scores.push(outcome.rank_scores);
    }
    SchemeComparison {
        teams: table.teams().to_vec(),
        schemes: Scheme::ALL.iter().map(|s| s.as_str().to_string()).collect(),
        final_ranks,
        rank_scores,
    }
}

/// Read back the long-form per-sample ranks CSV written by
/// [`BootstrapSummary::save_ranks_csv`]: teams in column order, then one
/// rank row per sample aligned with them.
pub fn read_per_sample_ranks(path: &Path) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.len() != 3
        || &headers[0] != "sample"
        || &headers[1] != "team"
        || &headers[2] != "final_rank"
    {
        return Err(Error::record(
            path,
            format!("expected header sample,team,final_rank, found {headers:?}"),
        ));
    }
    let mut teams: Vec<String> = Vec::new();
    let mut ranks: Vec<Vec<usize>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let sample: usize = record[0]
            .parse()
            .map_err(|_| Error::record(path, format!("bad sample index {:?}", &record[0])))?;
        let rank: usize = record[2]
            .parse()
            .map_err(|_| Error::record(path, format!("bad rank {:?}", &record[2])))?;
        if sample == ranks.len() {
            ranks.push(Vec::new());
        } else if sample + 1 != ranks.len() {
            return Err(Error::record(
                path,
                format!("sample indices out of order at {sample}"),
            ));
        }
        let column = ranks[sample].len();
        if sample == 0 {
            teams.push(record[1].to_string());
        } else if teams.get(column).map(String::as_str) != Some(&record[1]) {
            return Err(Error::record(
                path,
                format!("inconsistent team order in sample {sample}"),
            ));
        }
        ranks[sample].push(rank);
    }
    if ranks.is_empty() {
        return Err(Error::record(path, "no rank rows"));
    }
    if ranks.iter().any(|r| r.len() != teams.len()) {
        return Err(Error::record(path, "ragged sample blocks"));
    }
    Ok((teams, ranks))
}
