//! Rank the same results table under all four aggregation schemes and
//! watch a single outlier flip the mean-aggregate-then-rank leaderboard.

use segrank::manifest::Metric;
use segrank::ranking::{ResultsRow, ResultsTable, Scheme};

fn table_with_outlier(outlier: f64) -> ResultsTable {
    // team "ares" beats "brio" on four of five cases; its fifth ASSD value
    // is the parameter
    let values = [(1.0, 2.0), (1.0, 2.0), (1.0, 2.0), (1.0, 2.0), (outlier, 2.0)];
    let mut rows = Vec::new();
    for (case, (a, b)) in values.iter().enumerate() {
        for (team, value) in [("ares", *a), ("brio", *b)] {
            rows.push(ResultsRow {
                case: format!("c{case}"),
                team: team.into(),
                structure: "tumour".into(),
                metric: Metric::Assd,
                value,
                penalized: false,
                degenerate: false,
            });
        }
    }
    ResultsTable::from_rows_with(
        (0..values.len()).map(|i| format!("c{i}")).collect(),
        vec!["ares".into(), "brio".into()],
        vec!["tumour".into()],
        vec![Metric::Assd],
        rows,
    )
    .unwrap()
}

fn main() -> segrank::Result<()> {
    for (label, outlier) in [("no outlier", 1.0), ("one 350 mm outlier", 350.0)] {
        println!("{label}:");
        let table = table_with_outlier(outlier);
        for scheme in Scheme::ALL {
            let outcome = table.rank_teams(scheme);
            let board: Vec<String> = outcome
                .sorted_leaderboard()
                .into_iter()
                .map(|(team, score, rank)| format!("{rank}. {team} (score {score:.2})"))
                .collect();
            println!("  {scheme:<28} {}", board.join(", "));
        }
    }

    // per-cell ranks use minimum-rank ties: rank = 1 + strictly better
    let mut rows = Vec::new();
    for (team, value) in [("ares", 0.9), ("brio", 0.9), ("ceto", 0.8)] {
        rows.push(ResultsRow {
            case: "c0".into(),
            team: team.into(),
            structure: "tumour".into(),
            metric: Metric::Dsc,
            value,
            penalized: false,
            degenerate: false,
        });
    }
    let tied = ResultsTable::from_rows_with(
        vec!["c0".into()],
        vec!["ares".into(), "brio".into(), "ceto".into()],
        vec!["tumour".into()],
        vec![Metric::Dsc],
        rows,
    )?;
    println!(
        "tie handling: DSC (0.9, 0.9, 0.8) -> ranks {:?}",
        tied.per_cell_ranks("c0", "tumour", Metric::Dsc)?
    );
    Ok(())
}
