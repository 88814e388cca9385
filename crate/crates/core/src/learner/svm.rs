//! Soft-margin SVM with the polynomial kernel `K(x, y) = (x . y + 1)^d`,
//! trained by dual coordinate descent on the hinge loss.
//!
//! Degree 1 and low-dimensional degree 2 problems are solved in the primal
//! weight space over an explicit feature map. Wide degree-2 problems keep the
//! dual coefficients and evaluate the kernel directly.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::SparseVec;
use super::LearnError;

/// Largest input dimension for which a degree-2 map is expanded explicitly.
pub const EXPLICIT_QUADRATIC_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop when the projected-gradient spread falls below this.
    pub tolerance: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.01,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

/// `[x, 1]`: the degree-1 map, whose constant column acts as a bias.
pub fn linear_map(x: &SparseVec, dim: usize) -> SparseVec {
    let mut out = x.clone();
    out.idx.push(dim as u32);
    out.val.push(1.0);
    out
}

/// Dimension of [`quadratic_map`] for an input of `dim` columns.
pub fn quadratic_dim(dim: usize) -> usize {
    1 + dim + dim * (dim + 1) / 2
}

fn monomial_index(i: usize, j: usize, dim: usize) -> usize {
    // Row-major upper triangle including the diagonal, after 1 + dim slots.
    let row_start = i * dim - i * i.saturating_sub(1) / 2;
    1 + dim + row_start + (j - i)
}

/// Explicit map with `phi(x) . phi(y) = (x . y + 1)^2`: a constant, `sqrt(2) x_i`,
/// `x_i^2` and `sqrt(2) x_i x_j` for `i < j`.
pub fn quadratic_map(x: &SparseVec, dim: usize) -> SparseVec {
    let s2 = std::f64::consts::SQRT_2;
    let mut entries = Vec::with_capacity(1 + x.nnz() + x.nnz() * (x.nnz() + 1) / 2);
    entries.push((0u32, 1.0));
    for (i, v) in x.iter() {
        entries.push((1 + i, s2 * v));
    }
    for a in 0..x.nnz() {
        let (i, vi) = (x.idx[a] as usize, x.val[a]);
        for b in a..x.nnz() {
            let (j, vj) = (x.idx[b] as usize, x.val[b]);
            let scale = if a == b { 1.0 } else { s2 };
            entries.push((monomial_index(i, j, dim) as u32, scale * vi * vj));
        }
    }
    SparseVec::from_entries(entries)
}

pub fn poly_kernel(x: &SparseVec, y: &SparseVec, degree: u8) -> f64 {
    (x.dot(y) + 1.0).powi(degree as i32)
}

/// Labels as +1 / -1.
fn check_labels(ys: &[f64]) -> Result<(), LearnError> {
    if ys.len() < 2 {
        return Err(LearnError::TooFewInstances(ys.len()));
    }
    let pos = ys.iter().any(|&y| y > 0.0);
    let neg = ys.iter().any(|&y| y < 0.0);
    if !(pos && neg) {
        return Err(LearnError::SingleClass);
    }
    Ok(())
}

/// Primal weights for already-mapped vectors of dimension `dim`.
pub fn train_primal(
    xs: &[SparseVec],
    ys: &[f64],
    dim: usize,
    c: f64,
    opts: &SolverOptions,
) -> Result<Vec<f64>, LearnError> {
    check_labels(ys)?;
    let n = xs.len();
    let qd: Vec<f64> = xs.iter().map(SparseVec::squared_norm).collect();
    let mut w = vec![0.0; dim];
    let mut alpha = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    for _ in 0..opts.max_epochs {
        order.shuffle(&mut rng);
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;
        for &i in &order {
            if qd[i] <= 0.0 {
                continue;
            }
            let g = ys[i] * xs[i].dot_dense(&w) - 1.0;
            let pg = projected_gradient(alpha[i], g, c);
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * ys[i];
                for (j, v) in xs[i].iter() {
                    w[j as usize] += step * v;
                }
            }
        }
        if pg_max - pg_min < opts.tolerance {
            break;
        }
    }
    Ok(w)
}

/// Dual coefficients `alpha_i y_i` for the degree-`degree` polynomial kernel.
pub fn train_dual(
    xs: &[SparseVec],
    ys: &[f64],
    degree: u8,
    c: f64,
    opts: &SolverOptions,
) -> Result<Vec<f64>, LearnError> {
    check_labels(ys)?;
    let n = xs.len();
    let gram: Vec<Vec<f64>> =
        crate::par::map_range(n, |i| (0..n).map(|j| poly_kernel(&xs[i], &xs[j], degree)).collect());
    let mut alpha = vec![0.0; n];
    // grad[i] = y_i sum_j alpha_j y_j K_ij - 1
    let mut grad = vec![-1.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    for _ in 0..opts.max_epochs {
        order.shuffle(&mut rng);
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;
        for &i in &order {
            let qii = gram[i][i];
            let g = grad[i];
            let pg = projected_gradient(alpha[i], g, c);
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qii).clamp(0.0, c);
                let delta = (alpha[i] - old) * ys[i];
                for j in 0..n {
                    grad[j] += delta * ys[j] * gram[i][j];
                }
            }
        }
        if pg_max - pg_min < opts.tolerance {
            break;
        }
    }
    Ok(alpha.iter().zip(ys).map(|(a, y)| a * y).collect())
}

fn projected_gradient(alpha: f64, g: f64, c: f64) -> f64 {
    if alpha <= 0.0 {
        g.min(0.0)
    } else if alpha >= c {
        g.max(0.0)
    } else {
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> SparseVec {
        let mut entries = Vec::new();
        for i in 0..dim as u32 {
            if rng.gen_bool(0.6) {
                entries.push((i, rng.gen_range(-1.0..1.0)));
            }
        }
        SparseVec::from_entries(entries)
    }

    #[test]
    fn monomial_layout_is_dense_and_unique() {
        for dim in 1..12 {
            let mut seen = vec![false; quadratic_dim(dim)];
            for i in 0..dim {
                for j in i..dim {
                    let k = monomial_index(i, j, dim);
                    assert!(!seen[k], "collision at dim {dim} ({i},{j})");
                    seen[k] = true;
                }
            }
            assert!(seen[..1 + dim].iter().all(|s| !s));
            assert!(seen[1 + dim..].iter().all(|&s| s));
        }
    }

    #[test]
    fn explicit_quadratic_map_matches_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let dim = rng.gen_range(1..20);
            let x = random_vec(&mut rng, dim);
            let y = random_vec(&mut rng, dim);
            let explicit = quadratic_map(&x, dim).dot(&quadratic_map(&y, dim));
            let direct = poly_kernel(&x, &y, 2);
            assert!(
                (explicit - direct).abs() <= 1e-9 * direct.abs().max(1.0),
                "{explicit} vs {direct}"
            );
        }
    }

    #[test]
    fn separable_data_is_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for _ in 0..200 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            if (a + b).abs() < 0.1 {
                continue;
            }
            xs.push(SparseVec::from_entries(vec![(0, a), (1, b)]));
            ys.push(if a + b > 0.0 { 1.0 } else { -1.0 });
        }
        let mapped: Vec<_> = xs.iter().map(|x| linear_map(x, 2)).collect();
        let w = train_primal(&mapped, &ys, 3, 100.0, &SolverOptions::default()).unwrap();
        let errors = mapped
            .iter()
            .zip(&ys)
            .filter(|(x, y)| x.dot_dense(&w) * **y <= 0.0)
            .count();
        assert_eq!(errors, 0);

        let coef = train_dual(&xs, &ys, 1, 100.0, &SolverOptions::default()).unwrap();
        let errors = xs
            .iter()
            .zip(&ys)
            .filter(|(x, y)| {
                let f: f64 = xs.iter().zip(&coef).map(|(s, a)| a * poly_kernel(s, x, 1)).sum();
                f * **y <= 0.0
            })
            .count();
        assert_eq!(errors, 0);
    }

    #[test]
    fn primal_and_dual_agree_on_quadratic_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<SparseVec> = (0..80).map(|_| random_vec(&mut rng, 3)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| if x.squared_norm() > 0.5 { 1.0 } else { -1.0 })
            .collect();
        let opts = SolverOptions {
            tolerance: 1e-6,
            max_epochs: 20_000,
            seed: 1,
        };
        let mapped: Vec<_> = xs.iter().map(|x| quadratic_map(x, 3)).collect();
        let w = train_primal(&mapped, &ys, quadratic_dim(3), 1.0, &opts).unwrap();
        let coef = train_dual(&xs, &ys, 2, 1.0, &opts).unwrap();
        for x in &xs {
            let fp = quadratic_map(x, 3).dot_dense(&w);
            let fd: f64 = xs.iter().zip(&coef).map(|(s, a)| a * poly_kernel(s, x, 2)).sum();
            assert!((fp - fd).abs() < 1e-3, "{fp} vs {fd}");
        }
    }

    #[test]
    fn label_checks() {
        let x = vec![SparseVec::default(); 3];
        assert!(matches!(
            train_primal(&x, &[1.0, 1.0, 1.0], 1, 1.0, &SolverOptions::default()),
            Err(LearnError::SingleClass)
        ));
        assert!(matches!(
            train_primal(&x[..1], &[1.0], 1, 1.0, &SolverOptions::default()),
            Err(LearnError::TooFewInstances(1))
        ));
    }
}
