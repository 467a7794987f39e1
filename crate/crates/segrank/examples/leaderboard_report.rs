//! Produce the full report bundle for a challenge: a `median [q1 - q3]`
//! leaderboard as text and CSV, box plots per structure and metric, the
//! bootstrap rank-blob plot, and the scheme-comparison line plot.

use segrank::evaluate::evaluate_challenge;
use segrank::ranking::Scheme;
use segrank::report::{leaderboard, render_leaderboard_text, write_report};
use segrank::stability::{bootstrap_stability, compare_schemes};
use segrank::synth::{generate_challenge, PerturbationOp, SynthSpec};

fn main() -> segrank::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir").keep();
    let spec = SynthSpec::new(10, 77).with_severity_ladder(
        vec![
            PerturbationOp::Erode { voxels: 0.5 },
            PerturbationOp::Jitter { probability: 0.15 },
        ],
        4,
    );
    let manifest = generate_challenge(&spec, &dir)?;
    let table = evaluate_challenge(&dir, &manifest)?;
    let ranking = table.rank_teams(Scheme::OFFICIAL);
    let summary = bootstrap_stability(&table, Scheme::OFFICIAL, 200, 3)?;
    let comparison = compare_schemes(&table);

    println!("{}", render_leaderboard_text(&leaderboard(&table, &ranking)?));

    let out_dir = dir.join("report");
    let written = write_report(
        &out_dir,
        &table,
        &ranking,
        Some((&summary.teams, &summary.per_sample_ranks)),
        Some(&comparison),
    )?;
    println!("report bundle:");
    for path in written {
        println!("  {}", path.display());
    }
    Ok(())
}
