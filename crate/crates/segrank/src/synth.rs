//! Synthetic challenges with a known team-quality ordering.
//!
//! Ground truths are ellipsoid phantoms split by a plane into intra and
//! extra parts plus two spherical cochlea blobs, so interfaces are nonempty
//! by construction. Team predictions are the ground truth run through a
//! perturbation profile whose magnitudes scale with a severity scalar;
//! teams whose profiles are pure erosion or pure dilation ladders have a
//! provable dominance order (strictly more steps is strictly worse on every
//! case), recorded in the generated manifest so ranking claims can be
//! checked against it.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::ChallengeManifest;
use crate::nifti::write_volume;
use crate::rng::{derive_seed, substream};
use crate::volume::{BinaryMask, Grid, LabelVolume};

/// One mask-level corruption; magnitudes are per unit severity, so a
/// profile at severity 0 applies every op with magnitude 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum PerturbationOp {
    /// Grow by `round(severity · voxels)` six-connected steps.
    Dilate { voxels: f64 },
    /// Shrink by `round(severity · voxels)` six-connected steps.
    Erode { voxels: f64 },
    /// Shift by `round(severity · voxels)` voxels along a random axis.
    Translate { voxels: f64 },
    /// Replace the mask with an empty one with probability
    /// `min(1, severity · probability)`.
    Drop { probability: f64 },
    /// Flip each boundary-adjacent voxel with probability
    /// `min(1, severity · probability)`.
    Jitter { probability: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationProfile {
    pub ops: Vec<PerturbationOp>,
    pub severity: f64,
}

impl PerturbationProfile {
    pub fn new(ops: Vec<PerturbationOp>, severity: f64) -> PerturbationProfile {
        PerturbationProfile { ops, severity }
    }
}

/// Ellipsoid-plus-blobs phantom parameters, all in voxel units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    /// Per-axis semi-axis range of the tumour ellipsoid.
    pub radii_min: [f64; 3],
    pub radii_max: [f64; 3],
    /// The intra/extra split plane sits at `center_x + f · radius_x` with
    /// f drawn from this range; keep |f| well below 1 so both parts and
    /// their interface are nonempty.
    pub split_fraction_range: (f64, f64),
    /// Radius range of the two cochlea spheres.
    pub cochlea_radius_range: (f64, f64),
    /// Clearance between the tumour surface and each cochlea sphere along
    /// the y axis; keep it above twice the largest dilation so perturbed
    /// structures cannot collide.
    pub cochlea_gap: f64,
    /// Uniform jitter applied to the phantom's center placement.
    pub center_jitter: f64,
}

impl Default for PhantomSpec {
    fn default() -> PhantomSpec {
        PhantomSpec {
            radii_min: [12.0, 8.5, 8.5],
            radii_max: [13.5, 10.0, 10.0],
            split_fraction_range: (-0.15, 0.15),
            cochlea_radius_range: (5.0, 5.5),
            cochlea_gap: 10.0,
            center_jitter: 1.0,
        }
    }
}

/// Full description of a synthetic challenge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_cases: usize,
    pub grid: Grid,
    pub phantom: PhantomSpec,
    pub teams: Vec<(String, PerturbationProfile)>,
    pub seed: u64,
}

const FIT_MARGIN: f64 = 2.0;

impl SynthSpec {
    /// Spec with the default grid and phantom; teams still to be set.
    pub fn new(n_cases: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            n_cases,
            grid: Grid::new([44, 76, 36], [1.0, 0.8, 1.2]),
            phantom: PhantomSpec::default(),
            teams: Vec::new(),
            seed,
        }
    }

    /// Teams `team_0 … team_{n-1}` sharing `ops`, with severities
    /// 0, 1, …, n−1: a strict known quality ladder (team_0 is perfect).
    pub fn with_severity_ladder(mut self, ops: Vec<PerturbationOp>, n_teams: usize) -> SynthSpec {
        self.teams = (0..n_teams)
            .map(|i| {
                (
                    format!("team_{i}"),
                    PerturbationProfile::new(ops.clone(), i as f64),
                )
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cases == 0 {
            return Err(Error::InvalidInput("n_cases must be at least 1".into()));
        }
        if self.teams.is_empty() {
            return Err(Error::InvalidInput("no teams declared".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for (name, profile) in &self.teams {
            if name.is_empty() || !names.insert(name) {
                return Err(Error::InvalidInput(format!("empty or duplicate team id {name:?}")));
            }
            if !(profile.severity.is_finite() && profile.severity >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "team {name:?} has severity {}, must be finite and >= 0",
                    profile.severity
                )));
            }
        }
        let p = &self.phantom;
        for i in 0..3 {
            if !(p.radii_min[i] >= 2.0 && p.radii_max[i] >= p.radii_min[i]) {
                return Err(Error::PhantomDoesNotFit(format!(
                    "radii range [{}, {}] on axis {i} is invalid",
                    p.radii_min[i], p.radii_max[i]
                )));
            }
        }
        let (flo, fhi) = p.split_fraction_range;
        if !(flo <= fhi && flo > -0.6 && fhi < 0.6) {
            return Err(Error::PhantomDoesNotFit(format!(
                "split fraction range ({flo}, {fhi}) must lie within (-0.6, 0.6)"
            )));
        }
        let (clo, chi) = p.cochlea_radius_range;
        if !(clo >= 1.0 && chi >= clo) {
            return Err(Error::PhantomDoesNotFit(format!(
                "cochlea radius range ({clo}, {chi}) is invalid"
            )));
        }
        // required half-extents: tumour along x/z, tumour + gap + both
        // cochlea diameters along y
        let need = [
            p.radii_max[0] + p.center_jitter,
            p.radii_max[1] + p.cochlea_gap + 2.0 * chi + p.center_jitter,
            p.radii_max[2] + p.center_jitter,
        ];
        for (i, need) in need.iter().enumerate() {
            let half = (self.grid.dims[i] / 2) as f64;
            if need + FIT_MARGIN > half {
                return Err(Error::PhantomDoesNotFit(format!(
                    "axis {i} needs half-extent {need:.1} + margin {FIT_MARGIN} but the grid allows {half}"
                )));
            }
        }
        Ok(())
    }
}

/// Ground-truth structure masks of one phantom, pre-composition.
struct Phantom {
    intra: BinaryMask,
    extra: BinaryMask,
    cochlea: BinaryMask,
}

impl Phantom {
    fn compose(intra: &BinaryMask, extra: &BinaryMask, cochlea: &BinaryMask) -> LabelVolume {
        let mut v = LabelVolume::zeros(intra.grid);
        for (i, l) in v.labels.iter_mut().enumerate() {
            // later structures overwrite earlier ones, keeping labels disjoint
            if intra.bits[i] {
                *l = 1;
            }
            if extra.bits[i] {
                *l = 2;
            }
            if cochlea.bits[i] {
                *l = 3;
            }
        }
        v
    }
}

fn generate_phantom(grid: Grid, spec: &PhantomSpec, rng: &mut ChaCha8Rng) -> Phantom {
    let d = grid.dims;
    let mut center = [0.0f64; 3];
    for i in 0..3 {
        let jitter = if spec.center_jitter > 0.0 {
            rng.random_range(-spec.center_jitter..=spec.center_jitter)
        } else {
            0.0
        };
        center[i] = (d[i] / 2) as f64 + jitter;
    }
    let mut radii = [0.0f64; 3];
    for (i, r) in radii.iter_mut().enumerate() {
        *r = rng.random_range(spec.radii_min[i]..=spec.radii_max[i]);
    }
    let (flo, fhi) = spec.split_fraction_range;
    let split_x = center[0] + rng.random_range(flo..=fhi) * radii[0];
    let cochlea_radius = {
        let (lo, hi) = spec.cochlea_radius_range;
        rng.random_range(lo..=hi)
    };
    let cochlea_centers = [
        [
            center[0],
            center[1] - (radii[1] + spec.cochlea_gap + cochlea_radius),
            center[2],
        ],
        [
            center[0],
            center[1] + (radii[1] + spec.cochlea_gap + cochlea_radius),
            center[2],
        ],
    ];

    let mut intra = BinaryMask::empty(grid);
    let mut extra = BinaryMask::empty(grid);
    let mut cochlea = BinaryMask::empty(grid);
    let inside_ball = |p: [f64; 3], c: [f64; 3], r: [f64; 3]| {
        let dx = (p[0] - c[0]) / r[0];
        let dy = (p[1] - c[1]) / r[1];
        let dz = (p[2] - c[2]) / r[2];
        dx * dx + dy * dy + dz * dz <= 1.0
    };
    for z in 0..d[2] {
        for y in 0..d[1] {
            for x in 0..d[0] {
                let p = [x as f64, y as f64, z as f64];
                if inside_ball(p, center, radii) {
                    if p[0] < split_x {
                        intra.set(x, y, z, true);
                    } else {
                        extra.set(x, y, z, true);
                    }
                } else {
                    let r = [cochlea_radius; 3];
                    if inside_ball(p, cochlea_centers[0], r)
                        || inside_ball(p, cochlea_centers[1], r)
                    {
                        cochlea.set(x, y, z, true);
                    }
                }
            }
        }
    }
    debug_assert!(!intra.is_foreground_empty());
    debug_assert!(!extra.is_foreground_empty());
    debug_assert!(!cochlea.is_foreground_empty());
    Phantom {
        intra,
        extra,
        cochlea,
    }
}

/// One six-connected dilation step.
fn dilate_step(mask: &BinaryMask) -> BinaryMask {
    let d = mask.grid.dims;
    let mut out = mask.clone();
    for (idx, &on) in mask.bits.iter().enumerate() {
        if !on {
            continue;
        }
        let [x, y, z] = mask.grid.coords(idx);
        for off in crate::metrics::NEIGHBORS {
            let nx = x as i64 + off[0];
            let ny = y as i64 + off[1];
            let nz = z as i64 + off[2];
            if nx >= 0
                && ny >= 0
                && nz >= 0
                && (nx as usize) < d[0]
                && (ny as usize) < d[1]
                && (nz as usize) < d[2]
            {
                out.set(nx as usize, ny as usize, nz as usize, true);
            }
        }
    }
    out
}

/// One six-connected erosion step; the volume border counts as background.
fn erode_step(mask: &BinaryMask) -> BinaryMask {
    let d = mask.grid.dims;
    let mut out = BinaryMask::empty(mask.grid);
    for (idx, &on) in mask.bits.iter().enumerate() {
        if !on {
            continue;
        }
        let [x, y, z] = mask.grid.coords(idx);
        let keep = crate::metrics::NEIGHBORS.iter().all(|off| {
            let nx = x as i64 + off[0];
            let ny = y as i64 + off[1];
            let nz = z as i64 + off[2];
            nx >= 0
                && ny >= 0
                && nz >= 0
                && (nx as usize) < d[0]
                && (ny as usize) < d[1]
                && (nz as usize) < d[2]
                && mask.get(nx as usize, ny as usize, nz as usize)
        });
        if keep {
            out.set(x, y, z, true);
        }
    }
    out
}

/// Morphological dilation by `steps` six-connected steps.
pub fn dilate(mask: &BinaryMask, steps: usize) -> BinaryMask {
    let mut m = mask.clone();
    for _ in 0..steps {
        m = dilate_step(&m);
    }
    m
}

/// Morphological erosion by `steps` six-connected steps.
pub fn erode(mask: &BinaryMask, steps: usize) -> BinaryMask {
    let mut m = mask.clone();
    for _ in 0..steps {
        m = erode_step(&m);
    }
    m
}

fn jitter_boundary(mask: &BinaryMask, probability: f64, rng: &mut ChaCha8Rng) -> BinaryMask {
    let d = mask.grid.dims;
    let mut out = mask.clone();
    for idx in 0..mask.bits.len() {
        let [x, y, z] = mask.grid.coords(idx);
        let on = mask.bits[idx];
        let has_opposite_neighbor = crate::metrics::NEIGHBORS.iter().any(|off| {
            let nx = x as i64 + off[0];
            let ny = y as i64 + off[1];
            let nz = z as i64 + off[2];
            if nx < 0 || ny < 0 || nz < 0 {
                return false;
            }
            let (nx, ny, nz) = (nx as usize, ny as usize, nz as usize);
            nx < d[0] && ny < d[1] && nz < d[2] && mask.get(nx, ny, nz) != on
        });
        if has_opposite_neighbor && rng.random_bool(probability) {
            out.bits[idx] = !on;
        }
    }
    out
}

/// Apply a profile's ops in order, magnitudes scaled by its severity,
/// drawing randomness from a substream of `case_seed`. Severity 0 returns
/// the mask unchanged.
pub fn perturb_mask(
    mask: &BinaryMask,
    profile: &PerturbationProfile,
    case_seed: u64,
) -> BinaryMask {
    let mut rng = substream(case_seed, 0);
    let severity = profile.severity;
    let mut m = mask.clone();
    for op in &profile.ops {
        match *op {
            PerturbationOp::Dilate { voxels } => {
                m = dilate(&m, (severity * voxels).round() as usize);
            }
            PerturbationOp::Erode { voxels } => {
                m = erode(&m, (severity * voxels).round() as usize);
            }
            PerturbationOp::Translate { voxels } => {
                let magnitude = (severity * voxels).round() as i64;
                let axis = rng.random_range(0..3usize);
                let sign: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
                if magnitude > 0 {
                    let mut offset = [0i64; 3];
                    offset[axis] = sign * magnitude;
                    m = m.translated(offset);
                }
            }
            PerturbationOp::Drop { probability } => {
                let p = (severity * probability).clamp(0.0, 1.0);
                if p > 0.0 && rng.random_bool(p) {
                    m = BinaryMask::empty(m.grid);
                }
            }
            PerturbationOp::Jitter { probability } => {
                let p = (severity * probability).clamp(0.0, 1.0);
                if p > 0.0 {
                    m = jitter_boundary(&m, p, &mut rng);
                }
            }
        }
    }
    m
}

/// Rounded step counts of a profile whose ops are all erosions or all
/// dilations; `None` for any other profile. Only these are deterministic
/// and monotone in severity, so only they support dominance claims.
fn monotone_steps(profile: &PerturbationProfile) -> Option<Vec<usize>> {
    let all_erode = profile
        .ops
        .iter()
        .all(|op| matches!(op, PerturbationOp::Erode { .. }));
    let all_dilate = profile
        .ops
        .iter()
        .all(|op| matches!(op, PerturbationOp::Dilate { .. }));
    if profile.ops.is_empty() || !(all_erode || all_dilate) {
        return None;
    }
    Some(
        profile
            .ops
            .iter()
            .map(|op| match *op {
                PerturbationOp::Erode { voxels } | PerturbationOp::Dilate { voxels } => {
                    (profile.severity * voxels).round() as usize
                }
                _ => unreachable!(),
            })
            .collect(),
    )
}

/// Write a complete synthetic challenge under `out_dir`: ground-truth and
/// per-team prediction volumes plus `manifest.json`. The manifest records
/// a dominance pair for every two teams whose order is guaranteed by
/// construction: identical ops, all erosions or all dilations, and
/// strictly fewer rounded steps for the dominating team. Stochastic ops
/// (jitter, translate, drop) never yield dominance claims, since a noisier
/// team is not worse in every single case. Same spec and seed produce
/// byte-identical output.
pub fn generate_challenge(spec: &SynthSpec, out_dir: &Path) -> Result<ChallengeManifest> {
    spec.validate()?;
    let mut manifest = ChallengeManifest::three_region();
    manifest.cases = (0..spec.n_cases).map(|i| format!("case_{i:03}")).collect();
    manifest.teams = spec.teams.iter().map(|(name, _)| name.clone()).collect();
    for (i, (name_i, prof_i)) in spec.teams.iter().enumerate() {
        for (name_j, prof_j) in spec.teams.iter().skip(i + 1) {
            if prof_i.ops != prof_j.ops {
                continue;
            }
            let (Some(steps_i), Some(steps_j)) =
                (monotone_steps(prof_i), monotone_steps(prof_j))
            else {
                continue;
            };
            let le = |a: &[usize], b: &[usize]| {
                a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
            };
            if le(&steps_i, &steps_j) {
                manifest.dominance.push((name_i.clone(), name_j.clone()));
            } else if le(&steps_j, &steps_i) {
                manifest.dominance.push((name_j.clone(), name_i.clone()));
            }
        }
    }
    manifest.validate()?;

    manifest
        .cases
        .par_iter()
        .enumerate()
        .try_for_each(|(case_idx, case)| -> Result<()> {
            let mut rng = substream(derive_seed(spec.seed, &[1, case_idx as u64]), 0);
            let phantom = generate_phantom(spec.grid, &spec.phantom, &mut rng);
            let gt = Phantom::compose(&phantom.intra, &phantom.extra, &phantom.cochlea);
            write_volume(&manifest.gt_path(out_dir, case), &gt)?;

            for (team_idx, (team, profile)) in spec.teams.iter().enumerate() {
                let seed_for = |structure: u64| {
                    derive_seed(spec.seed, &[2, case_idx as u64, team_idx as u64, structure])
                };
                let intra = perturb_mask(&phantom.intra, profile, seed_for(0));
                let extra = perturb_mask(&phantom.extra, profile, seed_for(1));
                let cochlea = perturb_mask(&phantom.cochlea, profile, seed_for(2));
                let pred = Phantom::compose(&intra, &extra, &cochlea);
                write_volume(&manifest.pred_path(out_dir, team, case), &pred)?;
            }
            Ok(())
        })?;

    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::extract_structure_mask;
    use crate::nifti::read_volume;

    fn tiny_grid() -> Grid {
        Grid::new([9, 9, 9], [1.0, 1.0, 1.0])
    }

    fn single_voxel() -> BinaryMask {
        let mut m = BinaryMask::empty(tiny_grid());
        m.set(4, 4, 4, true);
        m
    }

    #[test]
    fn severity_zero_is_the_identity() {
        let m = single_voxel();
        let profile = PerturbationProfile::new(
            vec![
                PerturbationOp::Dilate { voxels: 1.0 },
                PerturbationOp::Erode { voxels: 1.0 },
                PerturbationOp::Translate { voxels: 2.0 },
                PerturbationOp::Drop { probability: 0.5 },
                PerturbationOp::Jitter { probability: 0.5 },
            ],
            0.0,
        );
        assert_eq!(perturb_mask(&m, &profile, 123), m);
    }

    #[test]
    fn dilating_a_single_voxel_once_gives_seven() {
        let m = single_voxel();
        let grown = dilate(&m, 1);
        assert_eq!(grown.count(), 7);
        let profile =
            PerturbationProfile::new(vec![PerturbationOp::Dilate { voxels: 1.0 }], 1.0);
        assert_eq!(perturb_mask(&m, &profile, 5), grown);
    }

    #[test]
    fn eroding_a_single_voxel_empties_it() {
        let m = single_voxel();
        assert!(erode(&m, 1).is_foreground_empty());
    }

    #[test]
    fn erosion_inverts_dilation_away_from_borders() {
        let mut m = BinaryMask::empty(Grid::new([15, 15, 15], [1.0, 1.0, 1.0]));
        for z in 6..9 {
            for y in 6..9 {
                for x in 6..9 {
                    m.set(x, y, z, true);
                }
            }
        }
        assert_eq!(erode(&dilate(&m, 2), 2), m);
    }

    #[test]
    fn translate_moves_by_scaled_magnitude() {
        let m = single_voxel();
        let profile =
            PerturbationProfile::new(vec![PerturbationOp::Translate { voxels: 1.0 }], 2.0);
        let moved = perturb_mask(&m, &profile, 9);
        assert_eq!(moved.count(), 1);
        let src = tiny_grid().coords(m.bits.iter().position(|&b| b).unwrap());
        let dst = tiny_grid().coords(moved.bits.iter().position(|&b| b).unwrap());
        let diff: i64 = (0..3)
            .map(|i| (src[i] as i64 - dst[i] as i64).abs())
            .sum();
        assert_eq!(diff, 2);
    }

    #[test]
    fn drop_at_full_probability_empties_the_mask() {
        let m = single_voxel();
        let profile =
            PerturbationProfile::new(vec![PerturbationOp::Drop { probability: 1.0 }], 1.0);
        assert!(perturb_mask(&m, &profile, 1).is_foreground_empty());
    }

    #[test]
    fn jitter_only_touches_boundary_adjacent_voxels() {
        let g = Grid::new([13, 13, 13], [1.0, 1.0, 1.0]);
        let mut m = BinaryMask::empty(g);
        for z in 3..10 {
            for y in 3..10 {
                for x in 3..10 {
                    m.set(x, y, z, true);
                }
            }
        }
        let profile =
            PerturbationProfile::new(vec![PerturbationOp::Jitter { probability: 0.5 }], 1.0);
        let jittered = perturb_mask(&m, &profile, 4);
        // deep interior voxel and far-away background voxel are untouched
        assert!(jittered.get(6, 6, 6));
        assert!(!jittered.get(0, 0, 0));
        assert_ne!(jittered, m);
    }

    #[test]
    fn perturbation_is_deterministic_per_seed() {
        let m = single_voxel();
        let profile = PerturbationProfile::new(
            vec![
                PerturbationOp::Dilate { voxels: 1.0 },
                PerturbationOp::Jitter { probability: 0.3 },
            ],
            2.0,
        );
        assert_eq!(perturb_mask(&m, &profile, 7), perturb_mask(&m, &profile, 7));
        assert_ne!(perturb_mask(&m, &profile, 7), perturb_mask(&m, &profile, 8));
    }

    #[test]
    fn spec_validation_catches_oversized_phantoms() {
        let mut spec = SynthSpec::new(1, 0)
            .with_severity_ladder(vec![PerturbationOp::Erode { voxels: 1.0 }], 2);
        spec.grid = Grid::new([24, 24, 24], [1.0, 1.0, 1.0]);
        assert!(matches!(
            spec.validate(),
            Err(Error::PhantomDoesNotFit(_))
        ));
    }

    #[test]
    fn generated_challenge_has_expected_files_and_perfect_team() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SynthSpec::new(2, 11)
            .with_severity_ladder(vec![PerturbationOp::Erode { voxels: 1.0 }], 3);
        let manifest = generate_challenge(&spec, dir.path()).unwrap();
        assert_eq!(manifest.cases.len(), 2);
        assert_eq!(manifest.teams.len(), 3);
        assert_eq!(
            manifest.dominance,
            vec![
                ("team_0".to_string(), "team_1".to_string()),
                ("team_0".to_string(), "team_2".to_string()),
                ("team_1".to_string(), "team_2".to_string()),
            ]
        );
        for case in &manifest.cases {
            let gt_path = manifest.gt_path(dir.path(), case);
            assert!(gt_path.exists(), "{gt_path:?}");
            let mut gt = read_volume(&gt_path).unwrap();
            manifest.adopt(&mut gt).unwrap();
            for structure in ["intra", "extra", "cochlea"] {
                assert!(
                    !extract_structure_mask(&gt, &manifest, structure)
                        .unwrap()
                        .is_foreground_empty(),
                    "{structure} empty in {case}"
                );
            }
            // severity-0 team reproduces the ground truth file for file
            let perfect = read_volume(&manifest.pred_path(dir.path(), "team_0", case)).unwrap();
            assert_eq!(perfect.labels, gt.labels);
        }
    }

    #[test]
    fn dominance_is_only_claimed_for_strict_morphology_ladders() {
        // Stochastic ops can partially undo each other (jitter after erosion
        // restores boundary voxels), so severity order proves nothing there.
        let noisy = SynthSpec::new(1, 5).with_severity_ladder(
            vec![
                PerturbationOp::Erode { voxels: 0.5 },
                PerturbationOp::Jitter { probability: 0.1 },
            ],
            3,
        );
        let dir = tempfile::tempdir().unwrap();
        let manifest = generate_challenge(&noisy, dir.path()).unwrap();
        assert!(manifest.dominance.is_empty());

        // Severities 1 and 2 both round 0.5 voxels to one erosion step, so
        // those two teams produce identical predictions: no strict pair.
        let coarse = SynthSpec::new(1, 5)
            .with_severity_ladder(vec![PerturbationOp::Erode { voxels: 0.5 }], 3);
        let dir = tempfile::tempdir().unwrap();
        let manifest = generate_challenge(&coarse, dir.path()).unwrap();
        assert_eq!(
            manifest.dominance,
            vec![
                ("team_0".to_string(), "team_1".to_string()),
                ("team_0".to_string(), "team_2".to_string()),
            ]
        );
    }

    #[test]
    fn same_spec_and_seed_give_byte_identical_output() {
        let spec = SynthSpec::new(2, 3)
            .with_severity_ladder(vec![PerturbationOp::Dilate { voxels: 1.0 }], 2);
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let ma = generate_challenge(&spec, dir_a.path()).unwrap();
        generate_challenge(&spec, dir_b.path()).unwrap();
        let mut checked = 0;
        for case in &ma.cases {
            let rel_gt = ma.gt_path(Path::new(""), case);
            let a = std::fs::read(dir_a.path().join(&rel_gt)).unwrap();
            let b = std::fs::read(dir_b.path().join(&rel_gt)).unwrap();
            assert_eq!(a, b);
            checked += 1;
            for team in &ma.teams {
                let rel = ma.pred_path(Path::new(""), team, case);
                let a = std::fs::read(dir_a.path().join(&rel)).unwrap();
                let b = std::fs::read(dir_b.path().join(&rel)).unwrap();
                assert_eq!(a, b);
                checked += 1;
            }
        }
        assert_eq!(checked, 2 + 2 * 2);
        let manifest_a = std::fs::read(dir_a.path().join("manifest.json")).unwrap();
        let manifest_b = std::fs::read(dir_b.path().join("manifest.json")).unwrap();
        assert_eq!(manifest_a, manifest_b);
    }
}
