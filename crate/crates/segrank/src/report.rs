//! Leaderboard tables and plot exports.
//!
//! Tables summarize each team's per-case metric distribution as
//! `median [q1 - q3]` cells, DSC in percent to one decimal and ASSD in mm
//! to two. Plots are hand-rolled SVG (box plots per structure and metric,
//! rank-frequency blobs from bootstrap samples, scheme-comparison lines),
//! so every output file is byte-deterministic.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::Metric;
use crate::ranking::{csv_writer, RankingOutcome, ResultsTable};
use crate::stability::SchemeComparison;
use crate::stats;
use crate::svg::{LinearScale, SvgDoc, PALETTE};

/// Per-team distribution summary of one (structure, metric) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub structure: String,
    pub metric: Metric,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl CellSummary {
    /// `median [q1 - q3]` in display units.
    pub fn formatted(&self) -> String {
        format_cell(self.metric, self.median, self.q1, self.q3)
    }
}

/// `median [q1 - q3]` from raw metric values: DSC scaled to percent with
/// one decimal, ASSD kept in mm with two decimals.
pub fn format_cell(metric: Metric, median: f64, q1: f64, q3: f64) -> String {
    match metric {
        Metric::Dsc => format!(
            "{:.1} [{:.1} - {:.1}]",
            100.0 * median,
            100.0 * q1,
            100.0 * q3
        ),
        Metric::Assd => format!("{median:.2} [{q1:.2} - {q3:.2}]"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub team: String,
    pub global_rank: usize,
    pub rank_score: f64,
    /// One summary per (structure, metric) pair, auxiliary pairs included,
    /// in results-row order.
    pub cells: Vec<CellSummary>,
}

/// (structure, metric) pairs in first-appearance order of the table rows,
/// which follows manifest declaration order.
fn row_pairs(table: &ResultsTable) -> Vec<(String, Metric)> {
    let mut pairs: Vec<(String, Metric)> = Vec::new();
    for row in table.rows() {
        let key = (row.structure.clone(), row.metric);
        if !pairs.contains(&key) {
            pairs.push(key);
        }
    }
    pairs
}

fn cell_values(table: &ResultsTable, team: &str, structure: &str, metric: Metric) -> Vec<f64> {
    table
        .rows()
        .iter()
        .filter(|r| r.team == team && r.structure == structure && r.metric == metric)
        .map(|r| r.value)
        .collect()
}

/// Leaderboard rows sorted by global rank, one distribution cell per
/// (structure, metric) pair of the table.
pub fn leaderboard(table: &ResultsTable, ranking: &RankingOutcome) -> Result<Vec<LeaderboardRow>> {
    let mut a = table.teams().to_vec();
    let mut b = ranking.teams.clone();
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::MismatchedTeams);
    }
    let pairs = row_pairs(table);
    let mut out = Vec::new();
    for (team, rank_score, global_rank) in ranking.sorted_leaderboard() {
        let mut cells = Vec::new();
        for (structure, metric) in &pairs {
            let values = cell_values(table, &team, structure, *metric);
            if values.is_empty() {
                continue;
            }
            let (q1, median, q3) = stats::quartiles(&values);
            cells.push(CellSummary {
                structure: structure.clone(),
                metric: *metric,
                median,
                q1,
                q3,
            });
        }
        out.push(LeaderboardRow {
            team,
            global_rank,
            rank_score,
            cells,
        });
    }
    Ok(out)
}

fn column_label(structure: &str, metric: Metric) -> String {
    match metric {
        Metric::Dsc => format!("{structure} DSC %"),
        Metric::Assd => format!("{structure} ASSD mm"),
    }
}

/// Fixed-width text table of the leaderboard.
pub fn render_leaderboard_text(rows: &[LeaderboardRow]) -> String {
    let mut headers = vec!["rank".to_string(), "team".to_string(), "rank score".to_string()];
    if let Some(first) = rows.first() {
        for cell in &first.cells {
            headers.push(column_label(&cell.structure, cell.metric));
        }
    }
    let mut grid: Vec<Vec<String>> = vec![headers];
    for row in rows {
        let mut cols = vec![
            row.global_rank.to_string(),
            row.team.clone(),
            format!("{:.2}", row.rank_score),
        ];
        cols.extend(row.cells.iter().map(|c| c.formatted()));
        grid.push(cols);
    }
    let n_cols = grid.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..n_cols)
        .map(|i| grid.iter().filter_map(|r| r.get(i)).map(|s| s.len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            write!(line, "{cell:<width$}  ", width = widths[i]).unwrap();
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// CSV leaderboard with the same formatted distribution cells.
pub fn save_leaderboard_csv(rows: &[LeaderboardRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut headers = vec!["rank".to_string(), "team".to_string(), "rank_score".to_string()];
    if let Some(first) = rows.first() {
        for cell in &first.cells {
            headers.push(format!(
                "{}_{}",
                cell.structure,
                cell.metric.as_str().to_lowercase()
            ));
        }
    }
    w.write_record(&headers).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        let mut cols = vec![
            row.global_rank.to_string(),
            row.team.clone(),
            row.rank_score.to_string(),
        ];
        cols.extend(row.cells.iter().map(|c| c.formatted()));
        w.write_record(&cols).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 400.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 56.0;

fn draw_y_axis(doc: &mut SvgDoc, scale: &LinearScale, title: &str) {
    doc.line(MARGIN_L, MARGIN_T, MARGIN_L, PLOT_H - MARGIN_B, "#333", 1.0);
    for tick in scale.ticks(5) {
        let y = scale.map(tick);
        doc.line(MARGIN_L - 4.0, y, MARGIN_L, y, "#333", 1.0);
        doc.text(MARGIN_L - 8.0, y + 3.5, 10.0, "end", &format!("{tick:.2}"));
    }
    doc.text(14.0, MARGIN_T - 8.0, 11.0, "start", title);
}

fn team_centers(n: usize) -> Vec<f64> {
    let span = PLOT_W - MARGIN_L - MARGIN_R;
    (0..n)
        .map(|i| MARGIN_L + span * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Box plot of one (structure, metric) pair: one Tukey box per team in the
/// given order, whiskers at the most extreme values within 1.5 IQR,
/// outliers as dots.
pub fn box_plot_svg(
    table: &ResultsTable,
    structure: &str,
    metric: Metric,
    team_order: &[String],
) -> Result<String> {
    let mut per_team: Vec<(String, Vec<f64>)> = Vec::new();
    for team in team_order {
        let mut values = cell_values(table, team, structure, metric);
        if values.is_empty() {
            return Err(Error::InvalidInput(format!(
                "no values for team {team:?}, structure {structure:?}, metric {metric}"
            )));
        }
        values.sort_by(f64::total_cmp);
        per_team.push((team.clone(), values));
    }
    let lo = per_team.iter().map(|(_, v)| v[0]).fold(f64::INFINITY, f64::min);
    let hi = per_team
        .iter()
        .map(|(_, v)| v[v.len() - 1])
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-12);
    let scale = LinearScale::new(lo - pad, hi + pad, PLOT_H - MARGIN_B, MARGIN_T, false);

    let mut doc = SvgDoc::new(PLOT_W, PLOT_H);
    draw_y_axis(&mut doc, &scale, &column_label(structure, metric));
    doc.line(
        MARGIN_L,
        PLOT_H - MARGIN_B,
        PLOT_W - MARGIN_R,
        PLOT_H - MARGIN_B,
        "#333",
        1.0,
    );
    let centers = team_centers(per_team.len());
    let half = (14.0f64).min((PLOT_W - MARGIN_L - MARGIN_R) / per_team.len() as f64 * 0.3);
    for (i, ((team, values), &cx)) in per_team.iter().zip(centers.iter()).enumerate() {
        let (q1, med, q3) = stats::quartiles(values);
        let iqr = q3 - q1;
        let lo_fence = q1 - 1.5 * iqr;
        let hi_fence = q3 + 1.5 * iqr;
        let whisker_lo = values.iter().copied().find(|&v| v >= lo_fence).unwrap();
        let whisker_hi = values.iter().rev().copied().find(|&v| v <= hi_fence).unwrap();
        let color = PALETTE[i % PALETTE.len()];

        doc.line(cx, scale.map(whisker_lo), cx, scale.map(q1), "#333", 1.0);
        doc.line(cx, scale.map(q3), cx, scale.map(whisker_hi), "#333", 1.0);
        doc.line(cx - half * 0.6, scale.map(whisker_lo), cx + half * 0.6, scale.map(whisker_lo), "#333", 1.0);
        doc.line(cx - half * 0.6, scale.map(whisker_hi), cx + half * 0.6, scale.map(whisker_hi), "#333", 1.0);
        doc.rect(
            cx - half,
            scale.map(q3),
            2.0 * half,
            (scale.map(q1) - scale.map(q3)).max(0.5),
            color,
            "#333",
        );
        doc.line(cx - half, scale.map(med), cx + half, scale.map(med), "#000", 1.5);
        for &v in values.iter().filter(|&&v| v < lo_fence || v > hi_fence) {
            doc.circle(cx, scale.map(v), 2.0, "#333", 0.8);
        }
        doc.text(cx, PLOT_H - MARGIN_B + 16.0, 10.0, "middle", team);
    }
    Ok(doc.finish())
}

/// Rank-frequency blob plot: how often each team landed on each final rank
/// across bootstrap samples. Blob area is proportional to frequency.
pub fn rank_blob_svg(teams: &[String], per_sample_ranks: &[Vec<usize>]) -> Result<String> {
    if teams.is_empty() || per_sample_ranks.is_empty() {
        return Err(Error::InvalidInput(
            "blob plot needs at least one team and one sample".into(),
        ));
    }
    let n = teams.len();
    let mut counts = vec![vec![0usize; n + 1]; n];
    for sample in per_sample_ranks {
        if sample.len() != n {
            return Err(Error::MismatchedTeams);
        }
        for (ti, &rank) in sample.iter().enumerate() {
            if rank < 1 || rank > n {
                return Err(Error::InvalidInput(format!(
                    "rank {rank} outside 1..={n}"
                )));
            }
            counts[ti][rank] += 1;
        }
    }
    let max_count = counts
        .iter()
        .flat_map(|c| c.iter())
        .copied()
        .max()
        .unwrap_or(1)
        .max(1);

    let scale = LinearScale::new(1.0, n as f64, MARGIN_T + 10.0, PLOT_H - MARGIN_B - 10.0, false);
    let mut doc = SvgDoc::new(PLOT_W, PLOT_H);
    doc.line(MARGIN_L, MARGIN_T, MARGIN_L, PLOT_H - MARGIN_B, "#333", 1.0);
    for rank in 1..=n {
        let y = scale.map(rank as f64);
        doc.line(MARGIN_L - 4.0, y, MARGIN_L, y, "#333", 1.0);
        doc.text(MARGIN_L - 8.0, y + 3.5, 10.0, "end", &rank.to_string());
    }
    doc.text(14.0, MARGIN_T - 8.0, 11.0, "start", "final rank per bootstrap sample");
    doc.line(
        MARGIN_L,
        PLOT_H - MARGIN_B,
        PLOT_W - MARGIN_R,
        PLOT_H - MARGIN_B,
        "#333",
        1.0,
    );
    let centers = team_centers(n);
    let max_r = ((PLOT_W - MARGIN_L - MARGIN_R) / n as f64 * 0.4).min(18.0);
    for (ti, &cx) in centers.iter().enumerate() {
        let color = PALETTE[ti % PALETTE.len()];
        for (rank, &c) in counts[ti].iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            let r = max_r * (c as f64 / max_count as f64).sqrt();
            doc.circle(cx, scale.map(rank as f64), r.max(1.5), color, 0.75);
        }
        doc.text(cx, PLOT_H - MARGIN_B + 16.0, 10.0, "middle", &teams[ti]);
    }
    Ok(doc.finish())
}

/// Line plot of final ranks across aggregation schemes, one line per team.
pub fn scheme_line_svg(comparison: &SchemeComparison) -> Result<String> {
    let n_teams = comparison.teams.len();
    let n_schemes = comparison.schemes.len();
    if n_teams == 0 || n_schemes == 0 {
        return Err(Error::InvalidInput(
            "scheme comparison plot needs teams and schemes".into(),
        ));
    }
    let legend_w = 130.0;
    let width = PLOT_W + legend_w;
    let scale = LinearScale::new(
        1.0,
        n_teams as f64,
        MARGIN_T + 10.0,
        PLOT_H - MARGIN_B - 10.0,
        false,
    );
    let span = PLOT_W - MARGIN_L - MARGIN_R;
    let xs: Vec<f64> = (0..n_schemes)
        .map(|i| MARGIN_L + span * (i as f64 + 0.5) / n_schemes as f64)
        .collect();

    let mut doc = SvgDoc::new(width, PLOT_H);
    doc.line(MARGIN_L, MARGIN_T, MARGIN_L, PLOT_H - MARGIN_B, "#333", 1.0);
    for rank in 1..=n_teams {
        let y = scale.map(rank as f64);
        doc.line(MARGIN_L - 4.0, y, MARGIN_L, y, "#333", 1.0);
        doc.text(MARGIN_L - 8.0, y + 3.5, 10.0, "end", &rank.to_string());
    }
    doc.text(14.0, MARGIN_T - 8.0, 11.0, "start", "final rank per scheme");
    for (si, scheme) in comparison.schemes.iter().enumerate() {
        doc.text(xs[si], PLOT_H - MARGIN_B + 16.0, 9.0, "middle", scheme);
    }
    for (ti, team) in comparison.teams.iter().enumerate() {
        let color = PALETTE[ti % PALETTE.len()];
        let points: Vec<(f64, f64)> = (0..n_schemes)
            .map(|si| (xs[si], scale.map(comparison.final_ranks[si][ti] as f64)))
            .collect();
        doc.polyline(&points, color, 1.5);
        for &(x, y) in &points {
            doc.circle(x, y, 3.0, color, 1.0);
        }
        let ly = MARGIN_T + 14.0 * ti as f64;
        doc.line(PLOT_W + 4.0, ly, PLOT_W + 24.0, ly, color, 2.0);
        doc.text(PLOT_W + 28.0, ly + 3.5, 10.0, "start", team);
    }
    Ok(doc.finish())
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Write the full report bundle into `out_dir`: leaderboard as text and
/// CSV, one box plot per (structure, metric) pair, and, when the inputs
/// are given, the bootstrap blob plot (teams plus per-sample ranks) and
/// the scheme-comparison line plot. Returns the written paths in write
/// order.
pub fn write_report(
    out_dir: &Path,
    table: &ResultsTable,
    ranking: &RankingOutcome,
    blob_ranks: Option<(&[String], &[Vec<usize>])>,
    comparison: Option<&SchemeComparison>,
) -> Result<Vec<PathBuf>> {
    let rows = leaderboard(table, ranking)?;
    let order: Vec<String> = rows.iter().map(|r| r.team.clone()).collect();
    let mut written = Vec::new();

    let txt = out_dir.join("leaderboard.txt");
    write_text(&txt, &render_leaderboard_text(&rows))?;
    written.push(txt);
    let csv = out_dir.join("leaderboard.csv");
    save_leaderboard_csv(&rows, &csv)?;
    written.push(csv);

    for (structure, metric) in row_pairs(table) {
        let svg = box_plot_svg(table, &structure, metric, &order)?;
        let path = out_dir.join(format!(
            "box_{structure}_{}.svg",
            metric.as_str().to_lowercase()
        ));
        write_text(&path, &svg)?;
        written.push(path);
    }
    if let Some((teams, ranks)) = blob_ranks {
        let svg = rank_blob_svg(teams, ranks)?;
        let path = out_dir.join("rank_blobs.svg");
        write_text(&path, &svg)?;
        written.push(path);
    }
    if let Some(cmp) = comparison {
        let svg = scheme_line_svg(cmp)?;
        let path = out_dir.join("scheme_lines.svg");
        write_text(&path, &svg)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ChallengeManifest;
    use crate::ranking::{ResultsRow, Scheme};
    use crate::stability::{bootstrap_stability, compare_schemes};

    fn demo_table() -> (ResultsTable, ChallengeManifest) {
        let manifest = {
            let mut m = ChallengeManifest::two_region();
            m.cases = (0..4).map(|i| format!("c{i}")).collect();
            m.teams = vec!["alpha".into(), "beta".into()];
            m
        };
        let mut rows = Vec::new();
        for (ci, case) in manifest.cases.iter().enumerate() {
            for (ti, team) in manifest.teams.iter().enumerate() {
                for structure in ["tumour", "cochlea"] {
                    let quality = 0.9 - 0.1 * ti as f64 - 0.01 * ci as f64;
                    rows.push(ResultsRow {
                        case: case.clone(),
                        team: team.clone(),
                        structure: structure.into(),
                        metric: Metric::Dsc,
                        value: quality,
                        penalized: false,
                        degenerate: false,
                    });
                    rows.push(ResultsRow {
                        case: case.clone(),
                        team: team.clone(),
                        structure: structure.into(),
                        metric: Metric::Assd,
                        value: 1.0 - quality,
                        penalized: false,
                        degenerate: false,
                    });
                }
            }
        }
        let table = ResultsTable::from_rows(rows, &manifest).unwrap();
        (table, manifest)
    }

    #[test]
    fn formats_cells_in_display_units() {
        assert_eq!(
            format_cell(Metric::Dsc, 0.861, 0.827, 0.897),
            "86.1 [82.7 - 89.7]"
        );
        assert_eq!(format_cell(Metric::Assd, 0.25, 0.1, 1.0), "0.25 [0.10 - 1.00]");
    }

    #[test]
    fn leaderboard_rows_sorted_by_rank_with_all_pairs() {
        let (table, _) = demo_table();
        let ranking = table.rank_teams(Scheme::OFFICIAL);
        let rows = leaderboard(&table, &ranking).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].team, "alpha");
        assert_eq!(rows[0].global_rank, 1);
        assert_eq!(rows[1].global_rank, 2);
        assert_eq!(rows[0].cells.len(), 4);
    }

    #[test]
    fn single_team_gets_rank_one() {
        let manifest = {
            let mut m = ChallengeManifest::two_region();
            m.cases = vec!["c0".into()];
            m.teams = vec!["solo".into()];
            m
        };
        let mut rows = Vec::new();
        for structure in ["tumour", "cochlea"] {
            for (metric, value) in [(Metric::Dsc, 0.9), (Metric::Assd, 0.2)] {
                rows.push(ResultsRow {
                    case: "c0".into(),
                    team: "solo".into(),
                    structure: structure.into(),
                    metric,
                    value,
                    penalized: false,
                    degenerate: false,
                });
            }
        }
        let table = ResultsTable::from_rows(rows, &manifest).unwrap();
        let ranking = table.rank_teams(Scheme::OFFICIAL);
        let board = leaderboard(&table, &ranking).unwrap();
        assert_eq!(board.len(), 1);
        assert_eq!(board[0].global_rank, 1);
    }

    #[test]
    fn text_table_lines_share_headers_and_teams() {
        let (table, _) = demo_table();
        let ranking = table.rank_teams(Scheme::OFFICIAL);
        let rows = leaderboard(&table, &ranking).unwrap();
        let text = render_leaderboard_text(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("rank  team"));
        assert!(lines[0].contains("tumour DSC %"));
        assert!(lines[1].contains("alpha"));
        assert!(lines[2].contains("beta"));
    }

    #[test]
    fn mismatched_ranking_teams_are_rejected() {
        let (table, _) = demo_table();
        let ranking = RankingOutcome {
            scheme: Scheme::OFFICIAL.as_str().into(),
            teams: vec!["other".into()],
            rank_scores: vec![1.0],
            final_ranks: vec![1],
            cases: None,
            per_case_cumulative: None,
        };
        assert!(matches!(
            leaderboard(&table, &ranking),
            Err(Error::MismatchedTeams)
        ));
    }

    #[test]
    fn report_bundle_is_deterministic() {
        let (table, _) = demo_table();
        let ranking = table.rank_teams(Scheme::OFFICIAL);
        let summary = bootstrap_stability(&table, Scheme::OFFICIAL, 50, 9).unwrap();
        let cmp = compare_schemes(&table);
        let read_all = |dir: &Path| -> Vec<(String, Vec<u8>)> {
            let paths = write_report(
                dir,
                &table,
                &ranking,
                Some((&summary.teams, &summary.per_sample_ranks)),
                Some(&cmp),
            )
            .unwrap();
            paths
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(p).unwrap(),
                    )
                })
                .collect()
        };
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = read_all(dir_a.path());
        let b = read_all(dir_b.path());
        assert_eq!(a, b);
        let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            [
                "leaderboard.txt",
                "leaderboard.csv",
                "box_tumour_dsc.svg",
                "box_tumour_assd.svg",
                "box_cochlea_dsc.svg",
                "box_cochlea_assd.svg",
                "rank_blobs.svg",
                "scheme_lines.svg",
            ]
        );
    }

    #[test]
    fn blob_plot_rejects_bad_rank_matrices() {
        assert!(rank_blob_svg(&[], &[]).is_err());
        let teams = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            rank_blob_svg(&teams, &[vec![1]]),
            Err(Error::MismatchedTeams)
        ));
        assert!(rank_blob_svg(&teams, &[vec![1, 3]]).is_err());
        assert!(rank_blob_svg(&teams, &[vec![1, 2], vec![2, 1]]).is_ok());
    }

    #[test]
    fn quartile_convention_is_linear_interpolation() {
        let (q1, med, q3) = stats::quartiles(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!((q1, med, q3), (1.75, 2.5, 3.25));
    }
}
