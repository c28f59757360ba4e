//! Lloyd's k-means with k-means++ seeding. Deterministic for a fixed seed:
//! the RNG is a seeded ChaCha stream and every tie breaks toward the lower
//! index.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Filled by [`super::label_clusters`]; empty until then.
    pub labels: BTreeMap<usize, Vec<String>>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid by Euclidean distance, ties to the lowest id.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    (best, best_d)
}

fn seed_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..n)].clone());

    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, &centroids[0]))
        .collect();

    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let chosen = if total <= 0.0 {
            // All remaining points coincide with a centroid.
            rng.gen_range(0..n)
        } else {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut picked = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target {
                    picked = i;
                    break;
                }
            }
            picked
        };
        centroids.push(points[chosen].clone());
        for (i, p) in points.iter().enumerate() {
            let d = sq_dist(p, centroids.last().expect("just pushed"));
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<ClusterModel, AnalyticsError> {
    let n = points.len();
    if n < k || k == 0 {
        return Err(AnalyticsError::TooFewPoints { needed: k.max(1), got: n });
    }
    let dim = points[0].len();
    debug_assert!(points.iter().all(|p| p.len() == dim));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(points, k, &mut rng);
    let mut assignments = vec![0usize; n];
    let mut previous_inertia = f64::INFINITY;
    let mut iterations = 0;

    loop {
        iterations += 1;

        let mut inertia = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centroids);
            assignments[i] = c;
            inertia += d;
        }

        // The assignment step never increases inertia (float slack only).
        // Cluster repair below may, so the check runs against the pre-repair
        // value.
        assert!(
            inertia <= previous_inertia * (1.0 + 1e-9) + 1e-12,
            "inertia increased: {previous_inertia} -> {inertia}"
        );

        // Repair empty clusters by stealing the globally farthest point.
        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        let mut stolen: Vec<usize> = Vec::new();
        for cluster in 0..k {
            if sizes[cluster] > 0 {
                continue;
            }
            let mut far_idx = usize::MAX;
            let mut far_d = -1.0;
            for (i, p) in points.iter().enumerate() {
                if stolen.contains(&i) || sizes[assignments[i]] <= 1 {
                    continue;
                }
                let d = sq_dist(p, &centroids[assignments[i]]);
                if d > far_d {
                    far_d = d;
                    far_idx = i;
                }
            }
            if far_idx != usize::MAX {
                sizes[assignments[far_idx]] -= 1;
                assignments[far_idx] = cluster;
                sizes[cluster] = 1;
                stolen.push(far_idx);
            }
        }
        if !stolen.is_empty() {
            inertia = points
                .iter()
                .zip(&assignments)
                .map(|(p, &a)| sq_dist(p, &centroids[a]))
                .sum();
        }
        previous_inertia = inertia;

        let mut next = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (acc, x) in next[a].iter_mut().zip(p) {
                *acc += x;
            }
        }
        for (c, count) in next.iter_mut().zip(&counts) {
            debug_assert!(*count > 0);
            for x in c.iter_mut() {
                *x /= *count as f64;
            }
        }

        let shift: f64 = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .sum();
        centroids = next;

        if shift < tol || iterations >= max_iter {
            break;
        }
    }

    // Final assignment against the converged centroids.
    let mut inertia = 0.0;
    for (i, p) in points.iter().enumerate() {
        let (c, d) = nearest(p, &centroids);
        assignments[i] = c;
        inertia += d;
    }

    Ok(ClusterModel {
        k,
        assignments,
        centroids,
        inertia,
        labels: BTreeMap::new(),
        iterations,
    })
}
