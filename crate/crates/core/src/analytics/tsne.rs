//! t-SNE projection to two dimensions: per-row Gaussian bandwidths found by
//! entropy bisection, symmetrized joint affinities, Student-t low-dimensional
//! kernel, and momentum gradient descent with early exaggeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::AnalyticsError;

pub const DEFAULT_PERPLEXITY: f64 = 30.0;
pub const DEFAULT_ITERS: usize = 1000;

const LEARNING_RATE: f64 = 200.0;
const EXAGGERATION: f64 = 12.0;
const EXAGGERATION_ITERS: usize = 250;
const MOMENTUM_EARLY: f64 = 0.5;
const MOMENTUM_LATE: f64 = 0.8;
const ENTROPY_TOL: f64 = 1e-5;
const BISECTION_STEPS: usize = 50;
const CHECKPOINT_ITER: usize = 300;
const INIT_SIGMA: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub coords: Vec<[f64; 2]>,
    pub perplexity: f64,
    pub kl_divergence_final: f64,
    /// KL right after the exaggeration phase has faded (iteration 300);
    /// the final value should not exceed it.
    pub kl_divergence_checkpoint: f64,
    pub seed: u64,
}

fn pairwise_sq_dists(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut d2 = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2[i][j] = d;
            d2[j][i] = d;
        }
    }
    d2
}

/// Row conditionals p(j|i) with the Gaussian bandwidth chosen so the row
/// entropy hits ln(perplexity). Returns the conditional row and the achieved
/// entropy error.
fn calibrate_row(dists: &[f64], row: usize, target_entropy: f64) -> (Vec<f64>, f64) {
    let n = dists.len();
    // Shift by the smallest off-diagonal distance for numerical range;
    // entropy is invariant to the shift after normalization.
    let shift = dists
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != row)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);

    let mut beta = 1.0f64;
    let mut beta_lo = 0.0f64;
    let mut beta_hi = f64::INFINITY;
    let mut p = vec![0.0f64; n];
    let mut entropy = 0.0;

    for _ in 0..BISECTION_STEPS {
        let mut sum = 0.0;
        let mut weighted = 0.0;
        for j in 0..n {
            if j == row {
                p[j] = 0.0;
                continue;
            }
            let adjusted = dists[j] - shift;
            let val = (-beta * adjusted).exp();
            p[j] = val;
            sum += val;
            weighted += adjusted * val;
        }
        entropy = sum.ln() + beta * weighted / sum;
        let diff = entropy - target_entropy;
        if diff.abs() < ENTROPY_TOL {
            break;
        }
        if diff > 0.0 {
            beta_lo = beta;
            beta = if beta_hi.is_finite() {
                (beta + beta_hi) / 2.0
            } else {
                beta * 2.0
            };
        } else {
            beta_hi = beta;
            beta = (beta + beta_lo) / 2.0;
        }
    }

    let sum: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= sum;
    }
    (p, (entropy - target_entropy).abs())
}

/// Symmetrized joint affinities p_ij = (p(j|i) + p(i|j)) / 2n. The matrix
/// sums to 1 and is exactly symmetric. Public for diagnostics and tests.
pub fn joint_affinities(points: &[Vec<f64>], perplexity: f64) -> Vec<Vec<f64>> {
    let n = points.len();
    let d2 = pairwise_sq_dists(points);
    let target = perplexity.ln();
    let conditionals: Vec<Vec<f64>> = (0..n)
        .map(|i| calibrate_row(&d2[i], i, target).0)
        .collect();
    let mut joint = vec![vec![0.0f64; n]; n];
    let scale = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            joint[i][j] = (conditionals[i][j] + conditionals[j][i]) / scale;
        }
    }
    joint
}

/// Worst per-row entropy calibration error, for diagnostics and tests.
pub fn entropy_calibration_error(points: &[Vec<f64>], perplexity: f64) -> f64 {
    let d2 = pairwise_sq_dists(points);
    let target = perplexity.ln();
    (0..points.len())
        .map(|i| calibrate_row(&d2[i], i, target).1)
        .fold(0.0, f64::max)
}

fn kl_divergence(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    let mut kl = 0.0;
    for (prow, qrow) in p.iter().zip(q) {
        for (&pij, &qij) in prow.iter().zip(qrow) {
            if pij > 0.0 {
                kl += pij * (pij / qij.max(1e-12)).ln();
            }
        }
    }
    kl
}

/// Normalized Student-t affinities plus the unnormalized kernel values.
fn student_t_affinities(coords: &[[f64; 2]]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = coords.len();
    let mut kernel = vec![vec![0.0f64; n]; n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let k = 1.0 / (1.0 + dx * dx + dy * dy);
            kernel[i][j] = k;
            kernel[j][i] = k;
            sum += 2.0 * k;
        }
    }
    let mut q = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                q[i][j] = (kernel[i][j] / sum).max(1e-12);
            }
        }
    }
    (q, kernel)
}

pub fn tsne(
    points: &[Vec<f64>],
    perplexity: f64,
    seed: u64,
    iters: usize,
) -> Result<Projection2D, AnalyticsError> {
    let n = points.len();
    if n < 4 {
        return Err(AnalyticsError::TooFewPoints { needed: 4, got: n });
    }
    let limit = (n - 1) as f64;
    if perplexity >= limit {
        return Err(AnalyticsError::PerplexityTooLarge { perplexity, limit });
    }

    let p = joint_affinities(points, perplexity);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, INIT_SIGMA).expect("valid sigma");
    let mut coords: Vec<[f64; 2]> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    let mut velocity = vec![[0.0f64; 2]; n];
    let mut checkpoint_kl = f64::INFINITY;

    for iter in 0..iters {
        let exaggeration = if iter < EXAGGERATION_ITERS { EXAGGERATION } else { 1.0 };
        let momentum = if iter < EXAGGERATION_ITERS { MOMENTUM_EARLY } else { MOMENTUM_LATE };

        let (q, kernel) = student_t_affinities(&coords);

        let mut gradient = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let factor = 4.0 * (exaggeration * p[i][j] - q[i][j]) * kernel[i][j];
                gradient[i][0] += factor * (coords[i][0] - coords[j][0]);
                gradient[i][1] += factor * (coords[i][1] - coords[j][1]);
            }
        }

        let mut mean = [0.0f64; 2];
        for i in 0..n {
            for d in 0..2 {
                velocity[i][d] = momentum * velocity[i][d] - LEARNING_RATE * gradient[i][d];
                coords[i][d] += velocity[i][d];
                mean[d] += coords[i][d];
            }
        }
        // Keep the embedding centered.
        for d in 0..2 {
            mean[d] /= n as f64;
        }
        for c in coords.iter_mut() {
            c[0] -= mean[0];
            c[1] -= mean[1];
        }

        if iter + 1 == CHECKPOINT_ITER {
            let (q, _) = student_t_affinities(&coords);
            checkpoint_kl = kl_divergence(&p, &q);
        }
    }

    let (q, _) = student_t_affinities(&coords);
    let final_kl = kl_divergence(&p, &q);
    if checkpoint_kl.is_infinite() {
        // Runs shorter than the checkpoint report the final value twice.
        checkpoint_kl = final_kl;
    }

    Ok(Projection2D {
        coords,
        perplexity,
        kl_divergence_final: final_kl,
        kl_divergence_checkpoint: checkpoint_kl,
        seed,
    })
}
