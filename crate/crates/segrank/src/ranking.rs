//! Leaderboards from per-case metric values.
//!
//! The official scheme ranks teams within every (case, structure, metric)
//! cell, averages those ranks into a per-case cumulative rank, then averages
//! across cases into a rank score. Three alternatives swap the aggregation
//! step (median instead of mean) or its order (aggregate metric values
//! first, rank the aggregates). Ties always take the best rank of the tied
//! block: a team's rank is one plus the number of strictly better teams.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{ChallengeManifest, Direction, Metric};
use crate::metrics::MetricValue;
use crate::stats;

/// One long-form results record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub case: String,
    pub team: String,
    pub structure: String,
    pub metric: Metric,
    pub value: f64,
    pub penalized: bool,
    pub degenerate: bool,
}

impl ResultsRow {
    pub fn from_metric_value(case: &str, team: &str, v: &MetricValue) -> ResultsRow {
        ResultsRow {
            case: case.to_string(),
            team: team.to_string(),
            structure: v.structure.clone(),
            metric: v.metric,
            value: v.value,
            penalized: v.penalized,
            degenerate: v.degenerate,
        }
    }
}

/// Aggregation scheme for turning a results table into a leaderboard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "rank-then-aggregate-mean")]
    RankThenAggregateMean,
    #[serde(rename = "rank-then-aggregate-median")]
    RankThenAggregateMedian,
    #[serde(rename = "aggregate-then-rank-mean")]
    AggregateThenRankMean,
    #[serde(rename = "aggregate-then-rank-median")]
    AggregateThenRankMedian,
}

impl Scheme {
    /// All schemes, official one first.
    pub const ALL: [Scheme; 4] = [
        Scheme::RankThenAggregateMean,
        Scheme::RankThenAggregateMedian,
        Scheme::AggregateThenRankMean,
        Scheme::AggregateThenRankMedian,
    ];

    /// The challenge's scheme: rank per cell, then mean over cells and cases.
    pub const OFFICIAL: Scheme = Scheme::RankThenAggregateMean;

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::RankThenAggregateMean => "rank-then-aggregate-mean",
            Scheme::RankThenAggregateMedian => "rank-then-aggregate-median",
            Scheme::AggregateThenRankMean => "aggregate-then-rank-mean",
            Scheme::AggregateThenRankMedian => "aggregate-then-rank-median",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        Scheme::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }

    fn rank_first(self) -> bool {
        matches!(
            self,
            Scheme::RankThenAggregateMean | Scheme::RankThenAggregateMedian
        )
    }

    fn aggregate(self, values: &[f64]) -> f64 {
        match self {
            Scheme::RankThenAggregateMean | Scheme::AggregateThenRankMean => stats::mean(values),
            Scheme::RankThenAggregateMedian | Scheme::AggregateThenRankMedian => {
                stats::median(values)
            }
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Minimum-rank ("best of the tied block") ranks: each entry's rank is one
/// plus the number of strictly better entries.
pub(crate) fn min_ranks(values: &[f64], direction: Direction) -> Vec<usize> {
    let better = |a: f64, b: f64| match direction {
        Direction::HigherBetter => a > b,
        Direction::LowerBetter => a < b,
    };
    values
        .iter()
        .map(|&v| 1 + values.iter().filter(|&&w| better(w, v)).count())
        .collect()
}

/// A computed leaderboard. Vectors are aligned with `teams`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingOutcome {
    pub scheme: String,
    pub teams: Vec<String>,
    pub rank_scores: Vec<f64>,
    pub final_ranks: Vec<usize>,
    /// Case ids the scores were computed over (a multiset under bootstrap
    /// resampling). Present for rank-then-aggregate schemes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cases: Option<Vec<String>>,
    /// Cumulative rank per team (outer) and case (inner), aligned with
    /// `cases`. Present for rank-then-aggregate schemes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_case_cumulative: Option<Vec<Vec<f64>>>,
}

impl RankingOutcome {
    pub fn rank_of(&self, team: &str) -> Option<usize> {
        self.teams
            .iter()
            .position(|t| t == team)
            .map(|i| self.final_ranks[i])
    }

    /// (team, rank_score, final_rank) sorted by final rank, then team id.
    pub fn sorted_leaderboard(&self) -> Vec<(String, f64, usize)> {
        let mut rows: Vec<_> = self
            .teams
            .iter()
            .cloned()
            .zip(self.rank_scores.iter().copied())
            .zip(self.final_ranks.iter().copied())
            .map(|((t, s), r)| (t, s, r))
            .collect();
        rows.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
        rows
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load_json(path: &Path) -> Result<RankingOutcome> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        w.write_record(["team", "rank_score", "final_rank"])
            .map_err(|e| Error::csv(path, e))?;
        for (team, score, rank) in self.sorted_leaderboard() {
            w.write_record([team.as_str(), &score.to_string(), &rank.to_string()])
                .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Complete long-form results over cases × teams × structures × metrics.
///
/// Ranked (structure, metric) cells — the ones that feed the leaderboard —
/// must be present for every case and team; auxiliary rows ride along for
/// reporting. Construction validates completeness once, so every ranking
/// call afterwards is infallible in that respect.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    cases: Vec<String>,
    teams: Vec<String>,
    ranked_structures: Vec<String>,
    metrics: Vec<Metric>,
    /// Ranked (structure, metric) cells in declaration order.
    cells: Vec<(String, Metric)>,
    /// Ranked cell values, indexed [case][cell][team].
    values: Vec<f64>,
    /// Per-case cumulative rank, indexed [case][team].
    cumulative: Vec<f64>,
    /// Every ingested row, canonically ordered.
    rows: Vec<ResultsRow>,
}

impl ResultsTable {
    /// Build from rows using a manifest's cases, teams, ranked structures
    /// and metric declarations.
    pub fn from_rows(rows: Vec<ResultsRow>, manifest: &ChallengeManifest) -> Result<ResultsTable> {
        let declared: BTreeSet<&str> =
            manifest.structures.iter().map(|s| s.name.as_str()).collect();
        for row in &rows {
            if !declared.contains(row.structure.as_str()) {
                return Err(Error::UnknownStructure(row.structure.clone()));
            }
        }
        ResultsTable::from_rows_with(
            manifest.cases.clone(),
            manifest.teams.clone(),
            manifest
                .structures
                .iter()
                .filter(|s| s.ranked)
                .map(|s| s.name.clone())
                .collect(),
            manifest.metrics.iter().map(|m| m.name).collect(),
            rows,
        )
    }

    /// Build from explicit declarations; `ranked_structures` × `metrics`
    /// defines the cells that must be complete.
    pub fn from_rows_with(
        cases: Vec<String>,
        teams: Vec<String>,
        ranked_structures: Vec<String>,
        metrics: Vec<Metric>,
        mut rows: Vec<ResultsRow>,
    ) -> Result<ResultsTable> {
        if cases.is_empty() || teams.is_empty() {
            return Err(Error::InvalidInput(
                "results table needs at least one case and one team".into(),
            ));
        }
        if ranked_structures.is_empty() || metrics.is_empty() {
            return Err(Error::InvalidInput(
                "results table needs at least one ranked structure and one metric".into(),
            ));
        }
        let case_idx: BTreeMap<&str, usize> = index_of(&cases);
        let team_idx: BTreeMap<&str, usize> = index_of(&teams);

        let mut cells = Vec::new();
        for s in &ranked_structures {
            for &m in &metrics {
                cells.push((s.clone(), m));
            }
        }
        let cell_idx: BTreeMap<(&str, Metric), usize> = cells
            .iter()
            .enumerate()
            .map(|(i, (s, m))| ((s.as_str(), *m), i))
            .collect();

        let (nc, nt, ncell) = (cases.len(), teams.len(), cells.len());
        let mut values = vec![f64::NAN; nc * ncell * nt];
        let mut seen: BTreeSet<(usize, usize, String, Metric)> = BTreeSet::new();
        let mut structure_order: BTreeMap<String, usize> = ranked_structures
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        for row in &rows {
            let Some(&ci) = case_idx.get(row.case.as_str()) else {
                return Err(Error::InvalidInput(format!(
                    "row references undeclared case {:?}",
                    row.case
                )));
            };
            let Some(&ti) = team_idx.get(row.team.as_str()) else {
                return Err(Error::InvalidInput(format!(
                    "row references undeclared team {:?}",
                    row.team
                )));
            };
            if !row.value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite value for case {:?}, team {:?}, structure {:?}, metric {}",
                    row.case, row.team, row.structure, row.metric
                )));
            }
            if !seen.insert((ci, ti, row.structure.clone(), row.metric)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate row for case {:?}, team {:?}, structure {:?}, metric {}",
                    row.case, row.team, row.structure, row.metric
                )));
            }
            let next = structure_order.len();
            structure_order.entry(row.structure.clone()).or_insert(next);
            if let Some(&cell) = cell_idx.get(&(row.structure.as_str(), row.metric)) {
                values[(ci * ncell + cell) * nt + ti] = row.value;
            }
        }
        for (flat, v) in values.iter().enumerate() {
            if v.is_nan() {
                let ti = flat % nt;
                let cell = (flat / nt) % ncell;
                let ci = flat / (nt * ncell);
                return Err(Error::IncompleteTable {
                    case: cases[ci].clone(),
                    team: teams[ti].clone(),
                    structure: cells[cell].0.clone(),
                    metric: cells[cell].1.to_string(),
                });
            }
        }

        rows.sort_by(|a, b| {
            (case_idx[a.case.as_str()], team_idx[a.team.as_str()])
                .cmp(&(case_idx[b.case.as_str()], team_idx[b.team.as_str()]))
                .then_with(|| structure_order[&a.structure].cmp(&structure_order[&b.structure]))
                .then_with(|| a.metric.cmp(&b.metric))
        });

        let mut table = ResultsTable {
            cases,
            teams,
            ranked_structures,
            metrics,
            cells,
            values,
            cumulative: Vec::new(),
            rows,
        };
        table.cumulative = table.compute_cumulative();
        Ok(table)
    }

    fn compute_cumulative(&self) -> Vec<f64> {
        let (nt, ncell) = (self.teams.len(), self.cells.len());
        let mut out = vec![0.0; self.cases.len() * nt];
        for ci in 0..self.cases.len() {
            for (cell, (_, metric)) in self.cells.iter().enumerate() {
                let base = (ci * ncell + cell) * nt;
                let ranks = min_ranks(&self.values[base..base + nt], metric.direction());
                for (ti, r) in ranks.iter().enumerate() {
                    out[ci * nt + ti] += *r as f64;
                }
            }
            for ti in 0..nt {
                out[ci * nt + ti] /= ncell as f64;
            }
        }
        out
    }

    pub fn cases(&self) -> &[String] {
        &self.cases
    }

    pub fn teams(&self) -> &[String] {
        &self.teams
    }

    pub fn ranked_structures(&self) -> &[String] {
        &self.ranked_structures
    }

    pub fn metrics(&self) -> &[Metric] {
        &self.metrics
    }

    pub fn rows(&self) -> &[ResultsRow] {
        &self.rows
    }

    /// Ranked-cell value for one (case, team, structure, metric).
    pub fn value(&self, case: &str, team: &str, structure: &str, metric: Metric) -> Option<f64> {
        let ci = self.cases.iter().position(|c| c == case)?;
        let ti = self.teams.iter().position(|t| t == team)?;
        let cell = self
            .cells
            .iter()
            .position(|(s, m)| s == structure && *m == metric)?;
        Some(self.values[(ci * self.cells.len() + cell) * self.teams.len() + ti])
    }

    /// Per-team ranks (aligned with `teams`) inside one cell, minimum-rank
    /// tie handling, direction taken from the metric.
    pub fn per_cell_ranks(&self, case: &str, structure: &str, metric: Metric) -> Result<Vec<usize>> {
        let ci = self
            .cases
            .iter()
            .position(|c| c == case)
            .ok_or_else(|| Error::InvalidInput(format!("unknown case {case:?}")))?;
        let cell = self
            .cells
            .iter()
            .position(|(s, m)| s == structure && *m == metric)
            .ok_or_else(|| Error::UnknownStructure(structure.to_string()))?;
        let nt = self.teams.len();
        let base = (ci * self.cells.len() + cell) * nt;
        Ok(min_ranks(&self.values[base..base + nt], metric.direction()))
    }

    /// Mean of a team's per-cell ranks over all ranked cells of one case.
    pub fn cumulative_rank(&self, team: &str, case: &str) -> Result<f64> {
        let ci = self
            .cases
            .iter()
            .position(|c| c == case)
            .ok_or_else(|| Error::InvalidInput(format!("unknown case {case:?}")))?;
        let ti = self
            .teams
            .iter()
            .position(|t| t == team)
            .ok_or_else(|| Error::InvalidInput(format!("unknown team {team:?}")))?;
        Ok(self.cumulative[ci * self.teams.len() + ti])
    }

    /// Leaderboard over all cases.
    pub fn rank_teams(&self, scheme: Scheme) -> RankingOutcome {
        let all: Vec<usize> = (0..self.cases.len()).collect();
        self.rank_teams_on_cases(scheme, &all)
    }

    /// Leaderboard over a case multiset given by indices into `cases()`;
    /// repeated indices count with multiplicity. This is the bootstrap
    /// entry point.
    pub fn rank_teams_on_cases(&self, scheme: Scheme, case_indices: &[usize]) -> RankingOutcome {
        assert!(!case_indices.is_empty(), "case multiset must be nonempty");
        let nt = self.teams.len();
        let ncell = self.cells.len();
        let mut rank_scores = Vec::with_capacity(nt);
        let mut per_case_cumulative = None;

        if scheme.rank_first() {
            let mut per_team: Vec<Vec<f64>> = Vec::with_capacity(nt);
            for ti in 0..nt {
                let cums: Vec<f64> = case_indices
                    .iter()
                    .map(|&ci| self.cumulative[ci * nt + ti])
                    .collect();
                rank_scores.push(scheme.aggregate(&cums));
                per_team.push(cums);
            }
            per_case_cumulative = Some(per_team);
        } else {
            let mut cell_rank_sums = vec![0.0; nt];
            let mut aggregates = vec![0.0; nt];
            let mut buffer = Vec::with_capacity(case_indices.len());
            for (cell, (_, metric)) in self.cells.iter().enumerate() {
                for (ti, agg) in aggregates.iter_mut().enumerate() {
                    buffer.clear();
                    buffer.extend(
                        case_indices
                            .iter()
                            .map(|&ci| self.values[(ci * ncell + cell) * nt + ti]),
                    );
                    *agg = scheme.aggregate(&buffer);
                }
                let ranks = min_ranks(&aggregates, metric.direction());
                for (ti, r) in ranks.iter().enumerate() {
                    cell_rank_sums[ti] += *r as f64;
                }
            }
            rank_scores = cell_rank_sums
                .into_iter()
                .map(|s| s / ncell as f64)
                .collect();
        }

        let final_ranks = min_ranks(&rank_scores, Direction::LowerBetter);
        RankingOutcome {
            scheme: scheme.as_str().to_string(),
            teams: self.teams.clone(),
            rank_scores,
            final_ranks,
            cases: scheme
                .rank_first()
                .then(|| case_indices.iter().map(|&ci| self.cases[ci].clone()).collect()),
            per_case_cumulative,
        }
    }

    /// Copy of this table ranking only the given metric subset; auxiliary
    /// rows are retained untouched.
    pub fn with_metrics(&self, metrics: &[Metric]) -> Result<ResultsTable> {
        if metrics.is_empty() {
            return Err(Error::EmptyMetricSubset);
        }
        let kept: Vec<Metric> = self
            .metrics
            .iter()
            .copied()
            .filter(|m| metrics.contains(m))
            .collect();
        if kept.is_empty() {
            return Err(Error::EmptyMetricSubset);
        }
        ResultsTable::from_rows_with(
            self.cases.clone(),
            self.teams.clone(),
            self.ranked_structures.clone(),
            kept,
            self.rows.clone(),
        )
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv_writer(path)?;
        w.write_record([
            "case_id",
            "team",
            "structure",
            "metric",
            "value",
            "penalized",
            "degenerate",
        ])
        .map_err(|e| Error::csv(path, e))?;
        for row in &self.rows {
            w.write_record([
                row.case.as_str(),
                row.team.as_str(),
                row.structure.as_str(),
                row.metric.as_str(),
                &row.value.to_string(),
                &row.penalized.to_string(),
                &row.degenerate.to_string(),
            ])
            .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Read a long-form results CSV written by [`ResultsTable::save_csv`],
    /// validating it against the manifest.
    pub fn load_csv(path: &Path, manifest: &ChallengeManifest) -> Result<ResultsTable> {
        let rows = read_rows_csv(path)?;
        ResultsTable::from_rows(rows, manifest)
    }
}

fn index_of(ids: &[String]) -> BTreeMap<&str, usize> {
    ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
}

pub fn read_rows_csv(path: &Path) -> Result<Vec<ResultsRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let expected = [
        "case_id",
        "team",
        "structure",
        "metric",
        "value",
        "penalized",
        "degenerate",
    ];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::record(
            path,
            format!("expected header {:?}, found {headers:?}", expected.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let parse_bool = |s: &str| match s {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(Error::record(path, format!("{other:?} is not a boolean"))),
        };
        rows.push(ResultsRow {
            case: record[0].to_string(),
            team: record[1].to_string(),
            structure: record[2].to_string(),
            metric: Metric::parse(&record[3])
                .map_err(|_| Error::record(path, format!("unknown metric {:?}", &record[3])))?,
            value: record[4]
                .parse()
                .map_err(|_| Error::record(path, format!("bad value {:?}", &record[4])))?,
            penalized: parse_bool(&record[5])?,
            degenerate: parse_bool(&record[6])?,
        });
    }
    Ok(rows)
}

/// Rank teams directly by a per-team score, lower better (the ordinal
/// task's ranking rule).
pub fn rank_koos(scores: &[(String, f64)]) -> Result<RankingOutcome> {
    if scores.is_empty() {
        return Err(Error::InvalidInput("no team scores to rank".into()));
    }
    let teams: Vec<String> = scores.iter().map(|(t, _)| t.clone()).collect();
    let values: Vec<f64> = scores.iter().map(|(_, v)| *v).collect();
    let final_ranks = min_ranks(&values, Direction::LowerBetter);
    Ok(RankingOutcome {
        scheme: "direct".to_string(),
        teams,
        rank_scores: values,
        final_ranks,
        cases: None,
        per_case_cumulative: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    /// Table over one ranked structure; `data[metric][case][team]`.
    fn table_1s(metrics: &[Metric], data: &[Vec<Vec<f64>>]) -> ResultsTable {
        let n_cases = data[0].len();
        let n_teams = data[0][0].len();
        let cases = ids("case", n_cases);
        let teams = ids("team", n_teams);
        let mut rows = Vec::new();
        for (mi, &metric) in metrics.iter().enumerate() {
            for (ci, case) in cases.iter().enumerate() {
                for (ti, team) in teams.iter().enumerate() {
                    rows.push(ResultsRow {
                        case: case.clone(),
                        team: team.clone(),
                        structure: "tumour".into(),
                        metric,
                        value: data[mi][ci][ti],
                        penalized: false,
                        degenerate: false,
                    });
                }
            }
        }
        ResultsTable::from_rows_with(cases, teams, vec!["tumour".into()], metrics.to_vec(), rows)
            .unwrap()
    }

    #[test]
    fn per_cell_ranks_min_rank_tie_example() {
        let t = table_1s(&[Metric::Dsc], &[vec![vec![0.9, 0.9, 0.8]]]);
        assert_eq!(
            t.per_cell_ranks("case0", "tumour", Metric::Dsc).unwrap(),
            vec![1, 1, 3]
        );
    }

    #[test]
    fn per_cell_ranks_respect_direction() {
        let t = table_1s(&[Metric::Assd], &[vec![vec![0.3, 0.5]]]);
        assert_eq!(
            t.per_cell_ranks("case0", "tumour", Metric::Assd).unwrap(),
            vec![1, 2]
        );
    }

    #[test]
    fn single_team_is_rank_one_everywhere() {
        let t = table_1s(&[Metric::Dsc], &[vec![vec![0.7]]]);
        assert_eq!(t.per_cell_ranks("case0", "tumour", Metric::Dsc).unwrap(), vec![1]);
        for scheme in Scheme::ALL {
            assert_eq!(t.rank_teams(scheme).final_ranks, vec![1]);
        }
    }

    #[test]
    fn cumulative_rank_averages_cells() {
        // two structures x two metrics; one team ranked (1,2,1,2)
        let cases = vec!["c0".to_string()];
        let teams = ids("team", 2);
        let mut rows = Vec::new();
        // tumour DSC: A better; tumour ASSD: B better
        // cochlea DSC: A better; cochlea ASSD: B better
        let cellvals = [
            ("tumour", Metric::Dsc, [0.9, 0.8]),
            ("tumour", Metric::Assd, [0.5, 0.3]),
            ("cochlea", Metric::Dsc, [0.9, 0.7]),
            ("cochlea", Metric::Assd, [0.6, 0.2]),
        ];
        for (s, m, vals) in cellvals {
            for (ti, team) in teams.iter().enumerate() {
                rows.push(ResultsRow {
                    case: "c0".into(),
                    team: team.clone(),
                    structure: s.into(),
                    metric: m,
                    value: vals[ti],
                    penalized: false,
                    degenerate: false,
                });
            }
        }
        let t = ResultsTable::from_rows_with(
            cases,
            teams,
            vec!["tumour".into(), "cochlea".into()],
            vec![Metric::Dsc, Metric::Assd],
            rows,
        )
        .unwrap();
        assert_relative_eq!(t.cumulative_rank("team0", "c0").unwrap(), 1.5);
        assert_relative_eq!(t.cumulative_rank("team1", "c0").unwrap(), 1.5);
    }

    #[test]
    fn dominant_team_wins_under_every_scheme() {
        // team0 strictly better everywhere
        let dsc = vec![
            vec![0.95, 0.80, 0.60],
            vec![0.90, 0.85, 0.70],
            vec![0.99, 0.90, 0.80],
        ];
        let assd = vec![
            vec![0.1, 0.5, 2.0],
            vec![0.2, 0.6, 1.0],
            vec![0.1, 0.3, 0.9],
        ];
        let t = table_1s(&[Metric::Dsc, Metric::Assd], &[dsc, assd]);
        for scheme in Scheme::ALL {
            let outcome = t.rank_teams(scheme);
            assert_eq!(outcome.final_ranks, vec![1, 2, 3], "{scheme}");
        }
    }

    #[test]
    fn official_scores_live_in_team_count_range() {
        let dsc = vec![vec![0.9, 0.8], vec![0.7, 0.8]];
        let t = table_1s(&[Metric::Dsc], &[dsc]);
        let outcome = t.rank_teams(Scheme::OFFICIAL);
        for &s in &outcome.rank_scores {
            assert!((1.0..=2.0).contains(&s));
        }
    }

    #[test]
    fn outlier_flips_mean_aggregate_then_rank() {
        // team0 wins 2 of 3 cases but has one catastrophic ASSD value
        let assd = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![350.0, 2.0]];
        let t = table_1s(&[Metric::Assd], &[assd]);

        let official = t.rank_teams(Scheme::RankThenAggregateMean);
        assert_eq!(official.final_ranks, vec![1, 2]);
        assert_relative_eq!(official.rank_scores[0], 4.0 / 3.0);
        assert_relative_eq!(official.rank_scores[1], 5.0 / 3.0);

        let aggregated = t.rank_teams(Scheme::AggregateThenRankMean);
        assert_eq!(aggregated.final_ranks, vec![2, 1]);

        // medians shrug the outlier off in both orders
        assert_eq!(
            t.rank_teams(Scheme::RankThenAggregateMedian).final_ranks,
            vec![1, 2]
        );
        assert_eq!(
            t.rank_teams(Scheme::AggregateThenRankMedian).final_ranks,
            vec![1, 2]
        );
    }

    #[test]
    fn case_order_does_not_matter() {
        let dsc = vec![vec![0.9, 0.7], vec![0.6, 0.8], vec![0.75, 0.74]];
        let t = table_1s(&[Metric::Dsc], std::slice::from_ref(&dsc));
        let reversed: Vec<Vec<f64>> = dsc.into_iter().rev().collect();
        let r = table_1s(&[Metric::Dsc], &[reversed]);
        for scheme in Scheme::ALL {
            assert_eq!(
                t.rank_teams(scheme).final_ranks,
                r.rank_teams(scheme).final_ranks
            );
        }
    }

    #[test]
    fn team_enumeration_order_does_not_matter() {
        let dsc = vec![vec![0.9, 0.7, 0.8], vec![0.6, 0.8, 0.7]];
        let t = table_1s(&[Metric::Dsc], std::slice::from_ref(&dsc));
        let swapped: Vec<Vec<f64>> = dsc
            .iter()
            .map(|case| vec![case[2], case[0], case[1]])
            .collect();
        let s = table_1s(&[Metric::Dsc], &[swapped]);
        for scheme in Scheme::ALL {
            let a = t.rank_teams(scheme);
            let b = s.rank_teams(scheme);
            // team2 in `t` is team0 in `s`, etc.
            assert_eq!(a.rank_of("team2"), b.rank_of("team0"), "{scheme}");
            assert_eq!(a.rank_of("team0"), b.rank_of("team1"), "{scheme}");
            assert_eq!(a.rank_of("team1"), b.rank_of("team2"), "{scheme}");
        }
    }

    #[test]
    fn bootstrap_multiset_counts_multiplicity() {
        // case1 repeated twice outweighs case0
        let assd = vec![vec![1.0, 2.0], vec![3.0, 2.0]];
        let t = table_1s(&[Metric::Assd], &[assd]);
        let outcome = t.rank_teams_on_cases(Scheme::RankThenAggregateMean, &[0, 1, 1]);
        // cumulative ranks: case0 -> (1, 2), case1 -> (2, 1)
        assert_relative_eq!(outcome.rank_scores[0], 5.0 / 3.0);
        assert_relative_eq!(outcome.rank_scores[1], 4.0 / 3.0);
        assert_eq!(outcome.final_ranks, vec![2, 1]);
    }

    #[test]
    fn incomplete_table_is_rejected_with_coordinates() {
        let cases = ids("case", 2);
        let teams = ids("team", 2);
        let mut rows = Vec::new();
        for case in &cases {
            for team in &teams {
                rows.push(ResultsRow {
                    case: case.clone(),
                    team: team.clone(),
                    structure: "tumour".into(),
                    metric: Metric::Dsc,
                    value: 0.5,
                    penalized: false,
                    degenerate: false,
                });
            }
        }
        rows.pop();
        let err = ResultsTable::from_rows_with(
            cases,
            teams,
            vec!["tumour".into()],
            vec![Metric::Dsc],
            rows,
        )
        .unwrap_err();
        match err {
            Error::IncompleteTable { case, team, .. } => {
                assert_eq!(case, "case1");
                assert_eq!(team, "team1");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        let rows = vec![
            ResultsRow {
                case: "c".into(),
                team: "t".into(),
                structure: "tumour".into(),
                metric: Metric::Dsc,
                value: 0.5,
                penalized: false,
                degenerate: false,
            };
            2
        ];
        assert!(ResultsTable::from_rows_with(
            vec!["c".into()],
            vec!["t".into()],
            vec!["tumour".into()],
            vec![Metric::Dsc],
            rows,
        )
        .is_err());
    }

    #[test]
    fn metric_subsets_rank_independently() {
        // team0 great at DSC, team1 great at ASSD
        let dsc = vec![vec![0.9, 0.5], vec![0.9, 0.5]];
        let assd = vec![vec![3.0, 1.0], vec![3.0, 1.0]];
        let t = table_1s(&[Metric::Dsc, Metric::Assd], &[dsc, assd]);
        let dsc_only = t.with_metrics(&[Metric::Dsc]).unwrap();
        let assd_only = t.with_metrics(&[Metric::Assd]).unwrap();
        assert_eq!(dsc_only.rank_teams(Scheme::OFFICIAL).final_ranks, vec![1, 2]);
        assert_eq!(assd_only.rank_teams(Scheme::OFFICIAL).final_ranks, vec![2, 1]);
        let full = t.with_metrics(&[Metric::Dsc, Metric::Assd]).unwrap();
        assert_eq!(
            full.rank_teams(Scheme::OFFICIAL),
            t.rank_teams(Scheme::OFFICIAL)
        );
        assert!(matches!(t.with_metrics(&[]), Err(Error::EmptyMetricSubset)));
    }

    #[test]
    fn csv_roundtrip_preserves_table_and_ranking() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = ChallengeManifest::two_region();
        manifest.cases = ids("case", 3);
        manifest.teams = ids("team", 2);
        let mut rows = Vec::new();
        let mut v = 0.30;
        for case in &manifest.cases {
            for team in &manifest.teams {
                for (s, m) in [
                    ("tumour", Metric::Dsc),
                    ("tumour", Metric::Assd),
                    ("cochlea", Metric::Dsc),
                    ("cochlea", Metric::Assd),
                ] {
                    v += 0.017;
                    rows.push(ResultsRow {
                        case: case.clone(),
                        team: team.clone(),
                        structure: s.into(),
                        metric: m,
                        value: v,
                        penalized: false,
                        degenerate: false,
                    });
                }
            }
        }
        let t = ResultsTable::from_rows(rows, &manifest).unwrap();
        let path = dir.path().join("results.csv");
        t.save_csv(&path).unwrap();
        let r = ResultsTable::load_csv(&path, &manifest).unwrap();
        assert_eq!(r, t);
        assert_eq!(
            r.rank_teams(Scheme::OFFICIAL),
            t.rank_teams(Scheme::OFFICIAL)
        );
    }

    #[test]
    fn koos_ranking_is_ascending_min_rank() {
        let outcome = rank_koos(&[
            ("a".into(), 0.26),
            ("b".into(), 0.37),
            ("c".into(), 0.84),
        ])
        .unwrap();
        assert_eq!(outcome.final_ranks, vec![1, 2, 3]);
        let tied = rank_koos(&[("a".into(), 0.5), ("b".into(), 0.5)]).unwrap();
        assert_eq!(tied.final_ranks, vec![1, 1]);
        let single = rank_koos(&[("solo".into(), 0.9)]).unwrap();
        assert_eq!(single.final_ranks, vec![1]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn tie_free_ranks_sum_to_triangular_number(
            values in proptest::collection::btree_set(0u32..1_000_000, 2..12)
        ) {
            let vals: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let ranks = min_ranks(&vals, Direction::HigherBetter);
            let t = vals.len();
            prop_assert_eq!(ranks.iter().sum::<usize>(), t * (t + 1) / 2);
        }

        #[test]
        fn min_rank_property_holds_with_ties(
            values in proptest::collection::vec(0u8..6, 2..10)
        ) {
            let vals: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            for direction in [Direction::HigherBetter, Direction::LowerBetter] {
                let ranks = min_ranks(&vals, direction);
                for (i, &r) in ranks.iter().enumerate() {
                    let better = vals.iter().filter(|&&w| match direction {
                        Direction::HigherBetter => w > vals[i],
                        Direction::LowerBetter => w < vals[i],
                    }).count();
                    prop_assert_eq!(r, better + 1);
                }
            }
        }

        #[test]
        fn monotone_transforms_leave_ranks_unchanged(
            dsc in proptest::collection::vec(
                proptest::collection::vec(0.0f64..1.0, 3), 1..5
            )
        ) {
            let t = table_1s(&[Metric::Dsc], std::slice::from_ref(&dsc));
            let transformed: Vec<Vec<f64>> = dsc
                .iter()
                .map(|case| case.iter().map(|&v| v * v * v + 2.0 * v).collect())
                .collect();
            let tt = table_1s(&[Metric::Dsc], &[transformed]);
            for scheme in [Scheme::RankThenAggregateMean, Scheme::RankThenAggregateMedian] {
                prop_assert_eq!(t.rank_teams(scheme).final_ranks, tt.rank_teams(scheme).final_ranks);
            }
        }

        #[test]
        fn strict_dominance_gives_strictly_better_official_score(
            base in proptest::collection::vec(
                proptest::collection::vec(0.05f64..0.90, 3), 1..6
            ),
            edge in 0.01f64..0.09,
        ) {
            // team0's DSC = team1's + edge everywhere; teams 1, 2 arbitrary
            let dsc: Vec<Vec<f64>> = base
                .iter()
                .map(|case| vec![case[1] + edge, case[1], case[2]])
                .collect();
            let t = table_1s(&[Metric::Dsc], &[dsc]);
            let outcome = t.rank_teams(Scheme::OFFICIAL);
            prop_assert!(outcome.rank_scores[0] < outcome.rank_scores[1]);
        }
    }
}
