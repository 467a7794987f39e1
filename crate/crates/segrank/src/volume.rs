//! 3D label volumes and binary masks on a physical voxel grid.
//!
//! A [`LabelVolume`] is the unit of ingestion: a dense grid of small integer
//! labels plus the physical voxel spacing in millimetres. Binary masks are
//! derived from it per structure and carry the same grid so that downstream
//! metrics can convert voxel indices into physical coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when comparing voxel spacings of two grids.
pub const SPACING_REL_TOL: f64 = 1e-4;

/// Voxel grid geometry: dimensions and physical spacing (mm per voxel edge).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3]) -> Grid {
        assert!(dims.iter().all(|&d| d > 0), "grid dims must be positive");
        assert!(
            spacing.iter().all(|&s| s > 0.0),
            "grid spacing must be positive"
        );
        Grid { dims, spacing }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index of voxel (x, y, z), x fastest (column-major as stored on disk).
    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    /// Inverse of [`Grid::index`].
    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [x, rest % self.dims[1], rest / self.dims[1]]
    }

    /// True when `other` has identical dims and spacing within
    /// [`SPACING_REL_TOL`] relative tolerance per component.
    pub fn compatible(&self, other: &Grid) -> bool {
        if self.dims != other.dims {
            return false;
        }
        self.spacing
            .iter()
            .zip(other.spacing.iter())
            .all(|(&a, &b)| (a - b).abs() <= SPACING_REL_TOL * a.abs().max(b.abs()))
    }
}

/// Succeeds iff both volumes live on the same grid (dims equal, spacing equal
/// within [`SPACING_REL_TOL`] relative tolerance). No resampling is ever
/// attempted; a mismatch means the prediction was not produced on the
/// ground-truth grid and must be fixed upstream.
pub fn check_grid_compatible(a: &LabelVolume, b: &LabelVolume) -> Result<()> {
    check_grids(&a.grid, &b.grid)
}

pub(crate) fn check_grids(a: &Grid, b: &Grid) -> Result<()> {
    if a.compatible(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            dims_a: a.dims,
            spacing_a: a.spacing,
            dims_b: b.dims,
            spacing_b: b.spacing,
        })
    }
}

/// Dense 3D grid of integer labels with physical spacing.
///
/// `scheme_id` names the label scheme the volume conforms to; it is empty for
/// freshly read files and stamped by
/// [`ChallengeManifest::adopt`](crate::manifest::ChallengeManifest::adopt)
/// once the labels have been validated against a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVolume {
    pub grid: Grid,
    pub labels: Vec<u16>,
    pub scheme_id: String,
    /// Row-major voxel-to-world rows (x/y/z) from the file header, if any.
    /// Metrics use spacing only; the affine is kept for provenance.
    pub affine: Option<[[f32; 4]; 3]>,
}

impl LabelVolume {
    /// New volume filled with background (label 0).
    pub fn zeros(grid: Grid) -> LabelVolume {
        LabelVolume {
            labels: vec![0; grid.len()],
            grid,
            scheme_id: String::new(),
            affine: None,
        }
    }

    pub fn from_labels(grid: Grid, labels: Vec<u16>) -> LabelVolume {
        assert_eq!(grid.len(), labels.len(), "dims product must match voxel count");
        LabelVolume {
            grid,
            labels,
            scheme_id: String::new(),
            affine: None,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> u16 {
        self.labels[self.grid.index(x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, label: u16) {
        let idx = self.grid.index(x, y, z);
        self.labels[idx] = label;
    }

    /// Binary mask of voxels whose label is in `labels`.
    pub fn mask_for_labels(&self, labels: &[u16]) -> BinaryMask {
        let bits = self.labels.iter().map(|l| labels.contains(l)).collect();
        BinaryMask {
            grid: self.grid,
            bits,
        }
    }

    /// Multiset of label values and their voxel counts, sorted by label.
    pub fn histogram(&self) -> Vec<(u16, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    /// True when the stored affine has off-axis terms, i.e. the voxel axes
    /// are not aligned with the world axes. Such volumes are accepted but
    /// surface distances are computed in axis-aligned spacing coordinates.
    pub fn is_oblique(&self) -> bool {
        let Some(rows) = &self.affine else {
            return false;
        };
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().take(3).enumerate() {
                if i != j && v.abs() > 1e-4 {
                    return true;
                }
            }
        }
        false
    }
}

/// Dense boolean mask on the same grid as its source volume.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    pub grid: Grid,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(grid: Grid) -> BinaryMask {
        BinaryMask {
            bits: vec![false; grid.len()],
            grid,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> bool {
        self.bits[self.grid.index(x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, value: bool) {
        let idx = self.grid.index(x, y, z);
        self.bits[idx] = value;
    }

    /// Number of foreground voxels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_foreground_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Voxelwise OR with another mask on the same grid.
    pub fn union(&self, other: &BinaryMask) -> Result<BinaryMask> {
        check_grids(&self.grid, &other.grid)?;
        let bits = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .map(|(&a, &b)| a || b)
            .collect();
        Ok(BinaryMask {
            grid: self.grid,
            bits,
        })
    }

    /// Number of voxels set in both masks.
    pub fn overlap_count(&self, other: &BinaryMask) -> usize {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .filter(|(&a, &b)| a && b)
            .count()
    }

    /// Mask mirrored along `axis` (0 = x, 1 = y, 2 = z).
    pub fn flipped(&self, axis: usize) -> BinaryMask {
        let d = self.grid.dims;
        let mut out = BinaryMask::empty(self.grid);
        for z in 0..d[2] {
            for y in 0..d[1] {
                for x in 0..d[0] {
                    let mut c = [x, y, z];
                    c[axis] = d[axis] - 1 - c[axis];
                    if self.get(x, y, z) {
                        out.set(c[0], c[1], c[2], true);
                    }
                }
            }
        }
        out
    }

    /// Quarter turn about `axis`; the two remaining dims and spacings swap.
    pub fn rotated_quarter(&self, axis: usize) -> BinaryMask {
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let d = self.grid.dims;
        let mut dims = d;
        dims[a] = d[b];
        dims[b] = d[a];
        let mut spacing = self.grid.spacing;
        spacing[a] = self.grid.spacing[b];
        spacing[b] = self.grid.spacing[a];
        let mut out = BinaryMask::empty(Grid::new(dims, spacing));
        for z in 0..d[2] {
            for y in 0..d[1] {
                for x in 0..d[0] {
                    if !self.get(x, y, z) {
                        continue;
                    }
                    let c = [x, y, z];
                    let mut t = c;
                    // (a, b) -> (b', a') with one axis reversed gives a proper rotation
                    t[a] = c[b];
                    t[b] = d[a] - 1 - c[a];
                    out.set(t[0], t[1], t[2], true);
                }
            }
        }
        out
    }

    /// Translate by an integer voxel offset; voxels shifted outside are lost,
    /// vacated voxels become background. The grid is unchanged.
    pub fn translated(&self, offset: [i64; 3]) -> BinaryMask {
        let d = self.grid.dims;
        let mut out = BinaryMask::empty(self.grid);
        for z in 0..d[2] {
            for y in 0..d[1] {
                for x in 0..d[0] {
                    if !self.get(x, y, z) {
                        continue;
                    }
                    let tx = x as i64 + offset[0];
                    let ty = y as i64 + offset[1];
                    let tz = z as i64 + offset[2];
                    if tx >= 0
                        && ty >= 0
                        && tz >= 0
                        && (tx as usize) < d[0]
                        && (ty as usize) < d[1]
                        && (tz as usize) < d[2]
                    {
                        out.set(tx as usize, ty as usize, tz as usize, true);
                    }
                }
            }
        }
        out
    }
}
