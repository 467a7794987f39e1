//! Define a challenge in a manifest: label scheme, derived structures
//! (unions and interfaces), metrics, and file layout templates.

use segrank::manifest::{extract_structure_mask, ChallengeManifest};
use segrank::metrics::evaluate_case;
use segrank::volume::{Grid, LabelVolume};

fn main() -> segrank::Result<()> {
    let mut manifest = ChallengeManifest::three_region();
    manifest.cases = vec!["case_000".into()];
    manifest.teams = vec!["demo".into()];
    println!("scheme {:?} uses labels {:?}", manifest.scheme_id, manifest.scheme_labels());
    for s in &manifest.structures {
        println!("  structure {:?} (ranked: {})", s.name, s.ranked);
    }

    // manifests are plain JSON on disk
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("manifest.json");
    manifest.save(&path)?;
    let loaded = ChallengeManifest::load(&path)?;
    assert_eq!(loaded, manifest);
    println!(
        "ground truth for case_000 lives at {:?}",
        manifest.gt_path(dir.path(), "case_000")
    );

    // label 1 = intra, 2 = extra, 3 = cochlea; unions are derived
    let grid = Grid::new([20, 20, 20], [1.0, 1.0, 1.0]);
    let mut gt = LabelVolume::zeros(grid);
    for z in 5..15 {
        for y in 5..15 {
            for x in 3..17 {
                gt.set(x, y, z, if x < 10 { 1 } else { 2 });
            }
        }
    }
    gt.set(2, 2, 2, 3);
    manifest.adopt(&mut gt)?;
    for name in ["intra", "extra", "tumour", "cochlea"] {
        let mask = extract_structure_mask(&gt, &manifest, name)?;
        println!("{name:>8}: {} voxels", mask.count());
    }

    // a perfect prediction scores DSC 1 / ASSD 0 on every declared pair
    let mut pred = gt.clone();
    manifest.adopt(&mut pred)?;
    for value in evaluate_case(&pred, &gt, &manifest)? {
        println!(
            "{:>10} {}: {}{}",
            value.structure,
            value.metric,
            value.value,
            if value.degenerate { " (degenerate)" } else { "" }
        );
    }
    Ok(())
}
