//! Submission validation and whole-challenge evaluation.
//!
//! Validation never aborts on a bad file: every problem becomes a
//! [`ValidationIssue`] so a submission report can list them all at once.
//! Evaluation is the strict counterpart: any unreadable or mismatched file
//! is a hard error, and the result is a complete [`ResultsTable`].

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::manifest::ChallengeManifest;
use crate::metrics::evaluate_case;
use crate::nifti::read_volume;
use crate::ranking::{write_json, ResultsRow, ResultsTable};
use crate::volume::LabelVolume;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "kebab-case")]
pub enum ValidationIssue {
    MissingFile { path: String },
    ExtraFile { path: String },
    UnreadableFile { path: String, reason: String },
    InvalidLabels { path: String, reason: String },
    GridMismatch { path: String, reason: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::MissingFile { path } => write!(f, "missing file: {path}"),
            ValidationIssue::ExtraFile { path } => write!(f, "extra file: {path}"),
            ValidationIssue::UnreadableFile { path, reason } => {
                write!(f, "unreadable file {path}: {reason}")
            }
            ValidationIssue::InvalidLabels { path, reason } => {
                write!(f, "invalid labels in {path}: {reason}")
            }
            ValidationIssue::GridMismatch { path, reason } => {
                write!(f, "grid mismatch in {path}: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            writeln!(f, "submission is valid")
        } else {
            for issue in &self.issues {
                writeln!(f, "{issue}")?;
            }
            writeln!(f, "{} issue(s) found", self.issues.len())
        }
    }
}

fn rel(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .display()
        .to_string()
}

/// Read and adopt one volume, reporting problems as issues instead of
/// errors. Returns the volume only if it loads cleanly.
fn check_volume(
    path: &Path,
    root: &Path,
    manifest: &ChallengeManifest,
    issues: &mut Vec<ValidationIssue>,
) -> Option<LabelVolume> {
    if !path.is_file() {
        issues.push(ValidationIssue::MissingFile {
            path: rel(path, root),
        });
        return None;
    }
    let mut volume = match read_volume(path) {
        Ok(v) => v,
        Err(e) => {
            issues.push(ValidationIssue::UnreadableFile {
                path: rel(path, root),
                reason: e.to_string(),
            });
            return None;
        }
    };
    if let Err(e) = manifest.adopt(&mut volume) {
        issues.push(ValidationIssue::InvalidLabels {
            path: rel(path, root),
            reason: e.to_string(),
        });
        return None;
    }
    Some(volume)
}

/// Directories strictly below `root` that the manifest's path templates
/// populate; only these are scanned for extra files.
fn expected_dirs(expected: &BTreeSet<PathBuf>, root: &Path) -> BTreeSet<PathBuf> {
    let mut dirs = BTreeSet::new();
    for path in expected {
        let mut cur = path.parent();
        while let Some(dir) = cur {
            if dir == root {
                break;
            }
            dirs.insert(dir.to_path_buf());
            cur = dir.parent();
        }
    }
    dirs
}

/// Check a submission tree against its manifest: every ground-truth and
/// prediction file must exist, parse, carry only scheme labels, and share
/// the ground truth's grid; populated directories must hold nothing else.
/// Issues are reported in manifest order (per case: ground truth, then
/// teams), with extra files listed last in path order.
pub fn validate_submission(root: &Path, manifest: &ChallengeManifest) -> Result<ValidationReport> {
    manifest.validate()?;
    let mut issues = Vec::new();
    for case in &manifest.cases {
        let gt_path = manifest.gt_path(root, case);
        let gt_grid = check_volume(&gt_path, root, manifest, &mut issues).map(|v| v.grid);
        for team in &manifest.teams {
            let pred_path = manifest.pred_path(root, team, case);
            let Some(pred) = check_volume(&pred_path, root, manifest, &mut issues) else {
                continue;
            };
            if let Some(gt_grid) = gt_grid {
                if !pred.grid.compatible(&gt_grid) {
                    issues.push(ValidationIssue::GridMismatch {
                        path: rel(&pred_path, root),
                        reason: format!(
                            "expected dims {:?} spacing {:?}, found dims {:?} spacing {:?}",
                            gt_grid.dims, gt_grid.spacing, pred.grid.dims, pred.grid.spacing
                        ),
                    });
                }
            }
        }
    }

    let mut expected: BTreeSet<PathBuf> = BTreeSet::new();
    for case in &manifest.cases {
        expected.insert(manifest.gt_path(root, case));
        for team in &manifest.teams {
            expected.insert(manifest.pred_path(root, team, case));
        }
    }
    let dirs = expected_dirs(&expected, root);
    for dir in &dirs {
        let Ok(entries) = std::fs::read_dir(dir) else {
            continue;
        };
        let mut found: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path()).collect();
        found.sort();
        for path in found {
            if !expected.contains(&path) && !dirs.contains(&path) {
                issues.push(ValidationIssue::ExtraFile {
                    path: rel(&path, root),
                });
            }
        }
    }
    Ok(ValidationReport { issues })
}

fn load_adopted(path: &Path, manifest: &ChallengeManifest) -> Result<LabelVolume> {
    let mut volume = read_volume(path)?;
    manifest.adopt(&mut volume)?;
    Ok(volume)
}

/// Evaluate every (case, team) volume pair declared by the manifest into a
/// complete results table. Cases run in parallel; row order is
/// deterministic (case, team, declaration order). Unlike validation, any
/// broken file is a hard error.
pub fn evaluate_challenge(root: &Path, manifest: &ChallengeManifest) -> Result<ResultsTable> {
    manifest.validate()?;
    let per_case: Vec<Vec<ResultsRow>> = manifest
        .cases
        .par_iter()
        .map(|case| -> Result<Vec<ResultsRow>> {
            let gt = load_adopted(&manifest.gt_path(root, case), manifest)?;
            let mut rows = Vec::new();
            for team in &manifest.teams {
                let pred = load_adopted(&manifest.pred_path(root, team, case), manifest)?;
                crate::volume::check_grid_compatible(&pred, &gt)?;
                for value in evaluate_case(&pred, &gt, manifest)? {
                    rows.push(ResultsRow::from_metric_value(case, team, &value));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    ResultsTable::from_rows(per_case.into_iter().flatten().collect(), manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::manifest::Metric;
    use crate::nifti::write_volume;
    use crate::synth::{generate_challenge, PerturbationOp, SynthSpec};
    use crate::volume::Grid;

    fn small_challenge(dir: &Path) -> ChallengeManifest {
        let spec = SynthSpec::new(2, 21)
            .with_severity_ladder(vec![PerturbationOp::Erode { voxels: 1.0 }], 2);
        generate_challenge(&spec, dir).unwrap()
    }

    #[test]
    fn clean_submission_validates_with_no_issues() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        let report = validate_submission(dir.path(), &manifest).unwrap();
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn missing_prediction_is_reported_with_its_path() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        let victim = manifest.pred_path(dir.path(), "team_1", "case_000");
        std::fs::remove_file(&victim).unwrap();
        let report = validate_submission(dir.path(), &manifest).unwrap();
        assert_eq!(
            report.issues,
            vec![ValidationIssue::MissingFile {
                path: "predictions/team_1/case_000.nii.gz".into()
            }]
        );
    }

    #[test]
    fn wrong_grid_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        let bad = LabelVolume::zeros(Grid::new([10, 10, 10], [1.0, 1.0, 1.0]));
        let victim = manifest.pred_path(dir.path(), "team_0", "case_001");
        write_volume(&victim, &bad).unwrap();
        let report = validate_submission(dir.path(), &manifest).unwrap();
        assert_eq!(report.issues.len(), 1);
        assert!(matches!(
            &report.issues[0],
            ValidationIssue::GridMismatch { path, .. }
                if path == "predictions/team_0/case_001.nii.gz"
        ));
    }

    #[test]
    fn garbage_bytes_are_reported_unreadable() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        let victim = manifest.gt_path(dir.path(), "case_000");
        std::fs::write(&victim, b"not a volume").unwrap();
        let report = validate_submission(dir.path(), &manifest).unwrap();
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::UnreadableFile { path, .. }
                if path == "gt/case_000.nii.gz")));
    }

    #[test]
    fn stray_files_are_reported_extra() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        std::fs::write(dir.path().join("gt/notes.txt"), b"scratch").unwrap();
        std::fs::write(dir.path().join("predictions/team_0/.DS_Store"), b"").unwrap();
        let report = validate_submission(dir.path(), &manifest).unwrap();
        assert_eq!(
            report.issues,
            vec![
                ValidationIssue::ExtraFile {
                    path: "gt/notes.txt".into()
                },
                ValidationIssue::ExtraFile {
                    path: "predictions/team_0/.DS_Store".into()
                },
            ]
        );
    }

    #[test]
    fn evaluation_yields_full_table_with_perfect_leader() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        let table = evaluate_challenge(dir.path(), &manifest).unwrap();
        // 4 structure×metric pairs on direct/union structures, plus the
        // interface structure under ASSD only
        let per_pair = 2 * 4 + 1;
        assert_eq!(
            table.rows().len(),
            manifest.cases.len() * manifest.teams.len() * per_pair
        );
        for row in table.rows().iter().filter(|r| r.team == "team_0") {
            match row.metric {
                Metric::Dsc => assert_eq!(row.value, 1.0, "{row:?}"),
                Metric::Assd => assert_eq!(row.value, 0.0, "{row:?}"),
            }
        }
    }

    #[test]
    fn evaluation_fails_hard_on_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        std::fs::remove_file(manifest.pred_path(dir.path(), "team_1", "case_000")).unwrap();
        assert!(matches!(
            evaluate_challenge(dir.path(), &manifest),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn evaluation_row_order_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = small_challenge(dir.path());
        let a = evaluate_challenge(dir.path(), &manifest).unwrap();
        let b = evaluate_challenge(dir.path(), &manifest).unwrap();
        assert_eq!(a.rows(), b.rows());
        let first = &a.rows()[0];
        assert_eq!((first.case.as_str(), first.team.as_str()), ("case_000", "team_0"));
    }
}
