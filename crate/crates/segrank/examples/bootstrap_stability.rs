//! Measure how stable a ranking is under case-set resampling: bootstrap
//! the cases, re-rank each sample, and summarize the Kendall tau
//! correlation against the full-set ranking.

use rand::Rng;
use segrank::manifest::Metric;
use segrank::ranking::{ResultsRow, ResultsTable, Scheme};
use segrank::rng::substream;
use segrank::stability::{bootstrap_stability, compare_schemes, metric_subset_stability};

/// 60 cases, 5 teams of genuinely different quality with per-case noise,
/// two ranked structures.
fn noisy_table() -> ResultsTable {
    let mut rng = substream(42, 0);
    let cases: Vec<String> = (0..60).map(|i| format!("case_{i:02}")).collect();
    let teams: Vec<String> = (0..5).map(|i| format!("team_{i}")).collect();
    let mut rows = Vec::new();
    for case in &cases {
        for (ti, team) in teams.iter().enumerate() {
            for structure in ["tumour", "cochlea"] {
                let skill = 0.92 - 0.04 * ti as f64;
                let dsc = (skill + rng.random_range(-0.05..0.05)).clamp(0.0, 1.0);
                let assd = (1.0 - skill) * 4.0 + rng.random_range(0.0..0.4);
                for (metric, value) in [(Metric::Dsc, dsc), (Metric::Assd, assd)] {
                    rows.push(ResultsRow {
                        case: case.clone(),
                        team: team.clone(),
                        structure: structure.into(),
                        metric,
                        value,
                        penalized: false,
                        degenerate: false,
                    });
                }
            }
        }
    }
    ResultsTable::from_rows_with(
        cases,
        teams,
        vec!["tumour".into(), "cochlea".into()],
        vec![Metric::Dsc, Metric::Assd],
        rows,
    )
    .unwrap()
}

fn main() -> segrank::Result<()> {
    let table = noisy_table();
    let summary = bootstrap_stability(&table, Scheme::OFFICIAL, 1000, 7)?;
    println!(
        "{} samples, seed {}: tau median {:.3}, IQR [{:.3}, {:.3}]",
        summary.n_samples, summary.seed, summary.tau_median, summary.tau_iqr.0, summary.tau_iqr.1
    );
    println!(
        "mean distinct-case fraction {:.3} (expect about 0.632 for sampling with replacement)",
        summary.distinct_fraction_mean
    );

    // how often each team kept its full-set rank
    for (ti, team) in summary.teams.iter().enumerate() {
        let full = summary.full_ranks[ti];
        let kept = summary
            .per_sample_ranks
            .iter()
            .filter(|ranks| ranks[ti] == full)
            .count();
        println!(
            "  {team}: full-set rank {full}, held in {:.1}% of samples",
            100.0 * kept as f64 / summary.n_samples as f64
        );
    }

    // stability per metric subset: single metrics vs the pair
    let subsets = vec![
        vec![Metric::Dsc],
        vec![Metric::Assd],
        vec![Metric::Dsc, Metric::Assd],
    ];
    for entry in metric_subset_stability(&table, Scheme::OFFICIAL, &subsets, 500, 7)? {
        let names: Vec<&str> = entry.metrics.iter().map(|m| m.as_str()).collect();
        println!(
            "metrics {:<12} tau median {:.3}",
            names.join("+"),
            entry.summary.tau_median
        );
    }

    // and the four aggregation schemes over the same table
    let comparison = compare_schemes(&table);
    for (si, scheme) in comparison.schemes.iter().enumerate() {
        println!("{scheme}: final ranks {:?}", comparison.final_ranks[si]);
    }
    Ok(())
}
