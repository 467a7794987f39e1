//! Segmentation metrics: overlap (DSC) and symmetric surface distance
//! (ASSD), including the empty-prediction penalty and the split-boundary
//! variant evaluated on the contact surface between two structures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{extract_structure_mask, ChallengeManifest, Metric, StructureKind};
use crate::nn::{directed_distance_sum, NearestNeighbors};
use crate::volume::{check_grids, BinaryMask, LabelVolume};

/// One scored (structure, metric) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: Metric,
    pub structure: String,
    pub value: f64,
    /// The empty-prediction rule fired: metric is ASSD and value equals the
    /// manifest's penalty distance.
    pub penalized: bool,
    /// Both masks were empty (DSC defined as 1.0 by convention); never set
    /// for real challenge data, where ground truth is nonempty.
    pub degenerate: bool,
}

impl MetricValue {
    fn new(metric: Metric, value: f64) -> MetricValue {
        MetricValue {
            metric,
            structure: String::new(),
            value,
            penalized: false,
            degenerate: false,
        }
    }

    pub fn named(mut self, structure: &str) -> MetricValue {
        self.structure = structure.to_string();
        self
    }
}

/// Physical coordinates (mm) of boundary voxel centers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPointSet {
    pub points: Vec<[f64; 3]>,
}

impl BoundaryPointSet {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Dice similarity coefficient: 2·|pred ∧ gt| / (|pred| + |gt|).
///
/// Both masks empty is scored 1.0 (perfect agreement on absence) and
/// flagged `degenerate` so downstream consumers can exclude it.
pub fn dice(pred: &BinaryMask, gt: &BinaryMask) -> Result<MetricValue> {
    check_grids(&pred.grid, &gt.grid)?;
    let p = pred.count();
    let g = gt.count();
    if p + g == 0 {
        let mut v = MetricValue::new(Metric::Dsc, 1.0);
        v.degenerate = true;
        return Ok(v);
    }
    let overlap = pred.overlap_count(gt);
    Ok(MetricValue::new(
        Metric::Dsc,
        2.0 * overlap as f64 / (p + g) as f64,
    ))
}

pub(crate) const NEIGHBORS: [[i64; 3]; 6] = [
    [-1, 0, 0],
    [1, 0, 0],
    [0, -1, 0],
    [0, 1, 0],
    [0, 0, -1],
    [0, 0, 1],
];

/// Centers of foreground voxels with at least one six-connected neighbor
/// that is background or outside the volume, in physical coordinates.
pub fn boundary_points(mask: &BinaryMask) -> BoundaryPointSet {
    let d = mask.grid.dims;
    let s = mask.grid.spacing;
    let mut points = Vec::new();
    for (idx, &on) in mask.bits.iter().enumerate() {
        if !on {
            continue;
        }
        let [x, y, z] = mask.grid.coords(idx);
        let exposed = NEIGHBORS.iter().any(|off| {
            let nx = x as i64 + off[0];
            let ny = y as i64 + off[1];
            let nz = z as i64 + off[2];
            if nx < 0 || ny < 0 || nz < 0 {
                return true;
            }
            let (nx, ny, nz) = (nx as usize, ny as usize, nz as usize);
            if nx >= d[0] || ny >= d[1] || nz >= d[2] {
                return true;
            }
            !mask.get(nx, ny, nz)
        });
        if exposed {
            points.push([x as f64 * s[0], y as f64 * s[1], z as f64 * s[2]]);
        }
    }
    BoundaryPointSet { points }
}

/// Mean of all point-to-nearest-point distances between two nonempty sets,
/// taken in both directions.
fn symmetric_mean_distance(a: &BoundaryPointSet, b: &BoundaryPointSet) -> f64 {
    let index_a = NearestNeighbors::new(a.points.clone());
    let index_b = NearestNeighbors::new(b.points.clone());
    let sum = directed_distance_sum(&a.points, &index_b)
        + directed_distance_sum(&b.points, &index_a);
    sum / (a.count() + b.count()) as f64
}

/// Average symmetric surface distance in mm.
///
/// An empty prediction scores `penalty_mm` with `penalized` set; an empty
/// ground truth is undefined and a hard error.
pub fn assd(pred: &BinaryMask, gt: &BinaryMask, penalty_mm: f64) -> Result<MetricValue> {
    check_grids(&pred.grid, &gt.grid)?;
    if gt.is_foreground_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    if pred.is_foreground_empty() {
        let mut v = MetricValue::new(Metric::Assd, penalty_mm);
        v.penalized = true;
        return Ok(v);
    }
    let bp = boundary_points(pred);
    let bg = boundary_points(gt);
    Ok(MetricValue::new(
        Metric::Assd,
        symmetric_mean_distance(&bp, &bg),
    ))
}

/// Centers of `intra` voxels six-adjacent to an `extra` voxel: the one-sided
/// contact surface between the two structures.
pub fn interface_points(intra: &BinaryMask, extra: &BinaryMask) -> Result<BoundaryPointSet> {
    check_grids(&intra.grid, &extra.grid)?;
    let overlap = intra.overlap_count(extra);
    if overlap > 0 {
        return Err(Error::OverlappingMasks(overlap));
    }
    let d = intra.grid.dims;
    let s = intra.grid.spacing;
    let mut points = Vec::new();
    for (idx, &on) in intra.bits.iter().enumerate() {
        if !on {
            continue;
        }
        let [x, y, z] = intra.grid.coords(idx);
        let touches = NEIGHBORS.iter().any(|off| {
            let nx = x as i64 + off[0];
            let ny = y as i64 + off[1];
            let nz = z as i64 + off[2];
            if nx < 0 || ny < 0 || nz < 0 {
                return false;
            }
            let (nx, ny, nz) = (nx as usize, ny as usize, nz as usize);
            nx < d[0] && ny < d[1] && nz < d[2] && extra.get(nx, ny, nz)
        });
        if touches {
            points.push([x as f64 * s[0], y as f64 * s[1], z as f64 * s[2]]);
        }
    }
    Ok(BoundaryPointSet { points })
}

/// ASSD between the predicted and ground-truth contact surfaces of two
/// structures. An empty predicted interface scores `penalty_mm` with
/// `penalized` set; an empty ground-truth interface is a hard error.
pub fn split_boundary_assd(
    pred_intra: &BinaryMask,
    pred_extra: &BinaryMask,
    gt_intra: &BinaryMask,
    gt_extra: &BinaryMask,
    penalty_mm: f64,
) -> Result<MetricValue> {
    check_grids(&pred_intra.grid, &gt_intra.grid)?;
    let gt_interface = interface_points(gt_intra, gt_extra)?;
    if gt_interface.is_empty() {
        return Err(Error::EmptyGroundTruthInterface);
    }
    let pred_interface = interface_points(pred_intra, pred_extra)?;
    if pred_interface.is_empty() {
        let mut v = MetricValue::new(Metric::Assd, penalty_mm);
        v.penalized = true;
        return Ok(v);
    }
    Ok(MetricValue::new(
        Metric::Assd,
        symmetric_mean_distance(&pred_interface, &gt_interface),
    ))
}

/// Score one prediction against its ground truth over every declared
/// (structure, metric) pair, in manifest declaration order. Direct and
/// union structures receive every declared metric; interface structures
/// receive ASSD only.
pub fn evaluate_case(
    pred: &LabelVolume,
    gt: &LabelVolume,
    manifest: &ChallengeManifest,
) -> Result<Vec<MetricValue>> {
    crate::volume::check_grid_compatible(pred, gt)?;
    let mut out = Vec::new();
    for s in &manifest.structures {
        match &s.kind {
            StructureKind::Direct { .. } | StructureKind::Union { .. } => {
                let pm = extract_structure_mask(pred, manifest, &s.name)?;
                let gm = extract_structure_mask(gt, manifest, &s.name)?;
                for m in &manifest.metrics {
                    let value = match m.name {
                        Metric::Dsc => dice(&pm, &gm)?,
                        Metric::Assd => assd(&pm, &gm, manifest.penalty_mm)?,
                    };
                    out.push(value.named(&s.name));
                }
            }
            StructureKind::Interface { operands } => {
                if !manifest.metrics.iter().any(|m| m.name == Metric::Assd) {
                    continue;
                }
                let pi = extract_structure_mask(pred, manifest, &operands[0])?;
                let pe = extract_structure_mask(pred, manifest, &operands[1])?;
                let gi = extract_structure_mask(gt, manifest, &operands[0])?;
                let ge = extract_structure_mask(gt, manifest, &operands[1])?;
                let value =
                    split_boundary_assd(&pi, &pe, &gi, &ge, manifest.penalty_mm)?;
                out.push(value.named(&s.name));
            }
        }
    }
    Ok(out)
}
