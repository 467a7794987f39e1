//! Challenge manifest: the declarative description of an evaluation run.
//!
//! A manifest names the cases and teams, the label scheme (direct structures
//! plus derived union and interface structures), the metric set with its
//! directions, the empty-prediction penalty, and the path templates that
//! locate ground-truth and prediction files. It is the single source of
//! truth every other module consumes; nothing about a particular challenge
//! edition is hard-coded.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{BinaryMask, LabelVolume};

/// Default empty-prediction penalty: a distance no two voxels in a human
/// head scan can exceed, applied when a predicted structure is absent.
pub const DEFAULT_PENALTY_MM: f64 = 350.0;

/// Metric identity. The direction is intrinsic: DSC is higher-better,
/// ASSD is lower-better; manifests declaring anything else are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "DSC")]
    Dsc,
    #[serde(rename = "ASSD")]
    Assd,
}

impl Metric {
    pub fn direction(self) -> Direction {
        match self {
            Metric::Dsc => Direction::HigherBetter,
            Metric::Assd => Direction::LowerBetter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Dsc => "DSC",
            Metric::Assd => "ASSD",
        }
    }

    pub fn parse(s: &str) -> Result<Metric> {
        match s {
            "DSC" => Ok(Metric::Dsc),
            "ASSD" => Ok(Metric::Assd),
            other => Err(Error::InvalidInput(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "higher-better")]
    HigherBetter,
    #[serde(rename = "lower-better")]
    LowerBetter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDef {
    pub name: Metric,
    pub direction: Direction,
}

/// How a structure's mask is obtained from a label volume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StructureKind {
    /// Voxels whose label is one of these ids.
    Direct { labels: Vec<u16> },
    /// Voxelwise OR of previously declared direct structures.
    Union { operands: Vec<String> },
    /// The one-sided contact surface between two direct structures;
    /// has no voxel mask of its own and carries ASSD only.
    Interface { operands: [String; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDef {
    pub name: String,
    #[serde(flatten)]
    pub kind: StructureKind,
    /// Ranked structures feed the leaderboard; the rest are reported as
    /// auxiliary insight only.
    pub ranked: bool,
}

/// Declarative description of one challenge evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeManifest {
    pub scheme_id: String,
    pub cases: Vec<String>,
    pub teams: Vec<String>,
    pub structures: Vec<StructureDef>,
    pub metrics: Vec<MetricDef>,
    #[serde(default = "default_penalty")]
    pub penalty_mm: f64,
    /// Path template for ground-truth files, relative to the manifest's
    /// directory; `{case}` expands to the case id.
    pub gt_template: String,
    /// Path template for prediction files; `{team}` and `{case}` expand.
    pub pred_template: String,
    /// Known quality ordering among teams, as (better, worse) pairs.
    /// Populated by the synthetic generator; empty for real challenges.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dominance: Vec<(String, String)>,
}

fn default_penalty() -> f64 {
    DEFAULT_PENALTY_MM
}

impl ChallengeManifest {
    /// Two-structure scheme: one tumour label and one cochlea label, both
    /// ranked. Cases and teams start empty for the caller to fill.
    pub fn two_region() -> ChallengeManifest {
        ChallengeManifest {
            scheme_id: "two-region".to_string(),
            cases: Vec::new(),
            teams: Vec::new(),
            structures: vec![
                StructureDef {
                    name: "tumour".to_string(),
                    kind: StructureKind::Direct { labels: vec![1] },
                    ranked: true,
                },
                StructureDef {
                    name: "cochlea".to_string(),
                    kind: StructureKind::Direct { labels: vec![2] },
                    ranked: true,
                },
            ],
            metrics: vec![
                MetricDef {
                    name: Metric::Dsc,
                    direction: Direction::HigherBetter,
                },
                MetricDef {
                    name: Metric::Assd,
                    direction: Direction::LowerBetter,
                },
            ],
            penalty_mm: DEFAULT_PENALTY_MM,
            gt_template: "gt/{case}.nii.gz".to_string(),
            pred_template: "predictions/{team}/{case}.nii.gz".to_string(),
            dominance: Vec::new(),
        }
    }

    /// Three-structure scheme: the tumour is split into intra- and
    /// extra-meatal parts which are ranked together with the cochlea; the
    /// whole-tumour union and the intra/extra interface are auxiliary.
    pub fn three_region() -> ChallengeManifest {
        let direct = |name: &str, label: u16| StructureDef {
            name: name.to_string(),
            kind: StructureKind::Direct {
                labels: vec![label],
            },
            ranked: true,
        };
        ChallengeManifest {
            scheme_id: "three-region".to_string(),
            cases: Vec::new(),
            teams: Vec::new(),
            structures: vec![
                direct("intra", 1),
                direct("extra", 2),
                direct("cochlea", 3),
                StructureDef {
                    name: "tumour".to_string(),
                    kind: StructureKind::Union {
                        operands: vec!["intra".to_string(), "extra".to_string()],
                    },
                    ranked: false,
                },
                StructureDef {
                    name: "interface".to_string(),
                    kind: StructureKind::Interface {
                        operands: ["intra".to_string(), "extra".to_string()],
                    },
                    ranked: false,
                },
            ],
            metrics: vec![
                MetricDef {
                    name: Metric::Dsc,
                    direction: Direction::HigherBetter,
                },
                MetricDef {
                    name: Metric::Assd,
                    direction: Direction::LowerBetter,
                },
            ],
            penalty_mm: DEFAULT_PENALTY_MM,
            gt_template: "gt/{case}.nii.gz".to_string(),
            pred_template: "predictions/{team}/{case}.nii.gz".to_string(),
            dominance: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<ChallengeManifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: ChallengeManifest =
            serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Check every structural invariant. Called on load and save; call it
    /// directly after building a manifest in code.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidManifest(msg));

        if self.scheme_id.is_empty() {
            return fail("scheme_id must be nonempty".into());
        }
        if self.cases.is_empty() {
            return fail("no cases declared".into());
        }
        if self.teams.is_empty() {
            return fail("no teams declared".into());
        }
        check_unique("case", &self.cases)?;
        check_unique("team", &self.teams)?;
        if self.structures.is_empty() {
            return fail("no structures declared".into());
        }
        check_unique(
            "structure",
            &self
                .structures
                .iter()
                .map(|s| s.name.clone())
                .collect::<Vec<_>>(),
        )?;

        let mut directs: BTreeSet<&str> = BTreeSet::new();
        for s in &self.structures {
            match &s.kind {
                StructureKind::Direct { labels } => {
                    if labels.is_empty() {
                        return fail(format!("structure {:?} has no labels", s.name));
                    }
                    if labels.contains(&0) {
                        return fail(format!(
                            "structure {:?} claims label 0, which is background",
                            s.name
                        ));
                    }
                    directs.insert(&s.name);
                }
                StructureKind::Union { operands } => {
                    if operands.len() < 2 {
                        return fail(format!("union {:?} needs at least two operands", s.name));
                    }
                    for op in operands {
                        if !directs.contains(op.as_str()) {
                            return fail(format!(
                                "union {:?} references {op:?}, which is not a previously declared direct structure",
                                s.name
                            ));
                        }
                    }
                }
                StructureKind::Interface { operands } => {
                    for op in operands {
                        if !directs.contains(op.as_str()) {
                            return fail(format!(
                                "interface {:?} references {op:?}, which is not a previously declared direct structure",
                                s.name
                            ));
                        }
                    }
                    if operands[0] == operands[1] {
                        return fail(format!(
                            "interface {:?} needs two distinct operands",
                            s.name
                        ));
                    }
                    if s.ranked {
                        return fail(format!(
                            "interface {:?} cannot be ranked: it carries ASSD only",
                            s.name
                        ));
                    }
                }
            }
        }
        if !self.structures.iter().any(|s| s.ranked) {
            return fail("no ranked structures declared".into());
        }

        if self.metrics.is_empty() {
            return fail("no metrics declared".into());
        }
        check_unique(
            "metric",
            &self
                .metrics
                .iter()
                .map(|m| m.name.as_str().to_string())
                .collect::<Vec<_>>(),
        )?;
        for m in &self.metrics {
            if m.direction != m.name.direction() {
                return fail(format!(
                    "metric {} declared with the wrong direction",
                    m.name
                ));
            }
        }

        if !(self.penalty_mm.is_finite() && self.penalty_mm > 0.0) {
            return fail(format!("penalty_mm = {} must be positive", self.penalty_mm));
        }
        if !self.gt_template.contains("{case}") {
            return fail("gt_template must contain {case}".into());
        }
        if !self.pred_template.contains("{case}") || !self.pred_template.contains("{team}") {
            return fail("pred_template must contain {case} and {team}".into());
        }

        for (better, worse) in &self.dominance {
            if better == worse {
                return fail(format!("dominance pair {better:?} over itself"));
            }
            for t in [better, worse] {
                if !self.teams.contains(t) {
                    return fail(format!("dominance references unknown team {t:?}"));
                }
            }
        }
        Ok(())
    }

    pub fn structure(&self, name: &str) -> Result<&StructureDef> {
        self.structures
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownStructure(name.to_string()))
    }

    /// All label ids declared by direct structures.
    pub fn scheme_labels(&self) -> BTreeSet<u16> {
        let mut set = BTreeSet::new();
        for s in &self.structures {
            if let StructureKind::Direct { labels } = &s.kind {
                set.extend(labels.iter().copied());
            }
        }
        set
    }

    /// Label ids selected by a structure. Direct structures select their own
    /// labels, unions the labels of every operand. Interfaces have no voxel
    /// mask and are rejected.
    pub fn resolve_labels(&self, name: &str) -> Result<Vec<u16>> {
        match &self.structure(name)?.kind {
            StructureKind::Direct { labels } => Ok(labels.clone()),
            StructureKind::Union { operands } => {
                let mut out = Vec::new();
                for op in operands {
                    out.extend(self.resolve_labels(op)?);
                }
                out.sort_unstable();
                out.dedup();
                Ok(out)
            }
            StructureKind::Interface { .. } => Err(Error::InvalidInput(format!(
                "structure {name:?} is an interface and has no voxel mask"
            ))),
        }
    }

    /// Validate a freshly read volume against this manifest's label scheme
    /// and stamp its `scheme_id`. Oblique volumes are accepted with a
    /// warning; metrics use axis-aligned spacing coordinates.
    pub fn adopt(&self, volume: &mut LabelVolume) -> Result<()> {
        let known = self.scheme_labels();
        for &l in &volume.labels {
            if l != 0 && !known.contains(&l) {
                return Err(Error::UnknownLabel {
                    label: l,
                    scheme: self.scheme_id.clone(),
                });
            }
        }
        if volume.is_oblique() {
            log::warn!(
                "volume has an oblique affine; distances use axis-aligned spacing coordinates"
            );
        }
        volume.scheme_id = self.scheme_id.clone();
        Ok(())
    }

    pub fn gt_path(&self, root: &Path, case: &str) -> PathBuf {
        root.join(self.gt_template.replace("{case}", case))
    }

    pub fn pred_path(&self, root: &Path, team: &str, case: &str) -> PathBuf {
        root.join(
            self.pred_template
                .replace("{team}", team)
                .replace("{case}", case),
        )
    }
}

fn check_unique(what: &str, ids: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if id.is_empty() {
            return Err(Error::InvalidManifest(format!("empty {what} id")));
        }
        if !seen.insert(id) {
            return Err(Error::InvalidManifest(format!("duplicate {what} id {id:?}")));
        }
    }
    Ok(())
}

/// Binary mask for a declared structure of `kind` direct or union.
///
/// The volume must have been adopted by the same manifest (matching
/// `scheme_id`); interface structures have no voxel mask and are rejected.
pub fn extract_structure_mask(
    volume: &LabelVolume,
    manifest: &ChallengeManifest,
    structure: &str,
) -> Result<BinaryMask> {
    if volume.scheme_id != manifest.scheme_id {
        return Err(Error::SchemeMismatch {
            volume: volume.scheme_id.clone(),
            manifest: manifest.scheme_id.clone(),
        });
    }
    let labels = manifest.resolve_labels(structure)?;
    Ok(volume.mask_for_labels(&labels))
}
