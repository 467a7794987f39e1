//! Score ordinal grade predictions with the macro-averaged mean absolute
//! error, compare against a fixed class count, and rank teams by score.

use segrank::ordinal::{
    confusion_matrix, default_grade_domain, ma_mae, ma_mae_fixed, OrdinalItem,
    OrdinalPredictionSet,
};
use segrank::ranking::rank_koos;

fn set(truths: &[i64], preds: &[i64]) -> segrank::Result<OrdinalPredictionSet> {
    let items = truths
        .iter()
        .zip(preds.iter())
        .enumerate()
        .map(|(i, (&t, &p))| OrdinalItem {
            case_id: format!("case_{i:02}"),
            true_grade: t,
            predicted_grade: p,
        })
        .collect();
    OrdinalPredictionSet::new(items, default_grade_domain())
}

fn main() -> segrank::Result<()> {
    // per-class weighting: the single grade-4 miss costs as much as the
    // whole grade-2 class
    let preds = set(&[1, 2, 2, 4], &[1, 3, 2, 3])?;
    println!("MA-MAE (classes present)  = {}", ma_mae(&preds)?);
    println!("MA-MAE (fixed 4 classes)  = {}", ma_mae_fixed(&preds, 4)?);

    println!("confusion matrix (rows = true grade):");
    for (row, grade) in confusion_matrix(&preds, false).iter().zip(1..) {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>3}")).collect();
        println!("  grade {grade}: {}", cells.join(" "));
    }

    // teams are ranked by ascending score, ties share the best rank
    let outcome = rank_koos(&[
        ("aachen".into(), 0.26),
        ("boston".into(), 0.37),
        ("carmel".into(), 0.84),
    ])?;
    println!("ranking by MA-MAE:");
    for (team, score, rank) in outcome.sorted_leaderboard() {
        println!("  {rank}. {team} ({score})");
    }
    Ok(())
}
