//! Exact nearest-neighbor queries over 3D point sets.
//!
//! A kd-tree with conservative pruning: every comparison is made on the
//! same f64 squared distances a brute-force scan would compute, so the
//! returned minimum is identical to the brute-force minimum, not an
//! approximation. Used for point-to-set distances in surface metrics.

const LEAF_SIZE: usize = 24;

#[inline]
fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Immutable spatial index over a nonempty point set.
pub(crate) struct NearestNeighbors {
    pts: Vec<[f64; 3]>,
}

impl NearestNeighbors {
    pub fn new(mut pts: Vec<[f64; 3]>) -> NearestNeighbors {
        assert!(!pts.is_empty(), "point set must be nonempty");
        fn build(s: &mut [[f64; 3]], depth: usize) {
            if s.len() <= LEAF_SIZE {
                return;
            }
            let axis = depth % 3;
            let mid = s.len() / 2;
            s.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
            let (left, rest) = s.split_at_mut(mid);
            build(left, depth + 1);
            build(&mut rest[1..], depth + 1);
        }
        build(&mut pts, 0);
        NearestNeighbors { pts }
    }

    /// Euclidean distance from `q` to the closest indexed point.
    pub fn distance_to(&self, q: [f64; 3]) -> f64 {
        let mut best = f64::INFINITY;
        Self::search(&self.pts, 0, q, &mut best);
        best.sqrt()
    }

    fn search(s: &[[f64; 3]], depth: usize, q: [f64; 3], best: &mut f64) {
        if s.len() <= LEAF_SIZE {
            for p in s {
                let d = dist2(*p, q);
                if d < *best {
                    *best = d;
                }
            }
            return;
        }
        let axis = depth % 3;
        let mid = s.len() / 2;
        let pivot = s[mid];
        let d = dist2(pivot, q);
        if d < *best {
            *best = d;
        }
        let delta = q[axis] - pivot[axis];
        let (near, far) = if delta < 0.0 {
            (&s[..mid], &s[mid + 1..])
        } else {
            (&s[mid + 1..], &s[..mid])
        };
        Self::search(near, depth + 1, q, best);
        // every far-side point is at least |delta| away along the split axis
        if delta * delta < *best {
            Self::search(far, depth + 1, q, best);
        }
    }
}

/// Sum over `from` of the distance to the nearest point of `index`,
/// accumulated in the order of `from`.
pub(crate) fn directed_distance_sum(from: &[[f64; 3]], index: &NearestNeighbors) -> f64 {
    let mut sum = 0.0;
    for &p in from {
        sum += index.distance_to(p);
    }
    sum
}
