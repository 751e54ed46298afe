use rand::seq::index;
use rand::Rng;

use crate::linalg::SquareMatrix;
use crate::scalar::Scalar;

/// `n_samples` binary masks over `m` words. The first keeps every word;
/// each later mask removes `k ~ U{1..m}` words chosen without replacement.
pub fn sample_masks<R: Rng + ?Sized>(m: usize, n_samples: usize, rng: &mut R) -> Vec<Vec<bool>> {
    assert!(m >= 1, "need at least one word");
    let mut masks = Vec::with_capacity(n_samples);
    if n_samples == 0 {
        return masks;
    }
    masks.push(vec![true; m]);
    for _ in 1..n_samples {
        let removed = rng.gen_range(1..=m);
        let mut mask = vec![true; m];
        for pos in index::sample(rng, m, removed) {
            mask[pos] = false;
        }
        masks.push(mask);
    }
    masks
}

/// `exp(-D²/σ²)` with `D` the cosine distance between `mask` and the
/// all-ones vector. An all-zero mask has distance 1.
pub fn kernel_weight<T: Scalar>(mask: &[bool], width: T) -> T {
    let kept = mask.iter().filter(|&&b| b).count();
    let distance = if kept == 0 {
        T::one()
    } else {
        T::one() - (T::from_usize_lossy(kept) / T::from_usize_lossy(mask.len())).sqrt()
    };
    (-(distance * distance) / (width * width)).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateFit<T> {
    pub intercept: T,
    pub coefficients: Vec<T>,
}

/// Weighted ridge regression of `responses` on the mask design matrix.
///
/// Minimizes `Σ πᵢ (yᵢ - b - xᵢ·β)² + λ‖β‖²` with the intercept `b`
/// unpenalized, by centering on the weighted means and solving the
/// normal equations.
#[allow(clippy::needless_range_loop)]
pub fn fit_surrogate<T: Scalar>(
    masks: &[Vec<bool>],
    kernel_weights: &[T],
    responses: &[T],
    lambda: T,
) -> SurrogateFit<T> {
    assert_eq!(masks.len(), kernel_weights.len());
    assert_eq!(masks.len(), responses.len());
    assert!(lambda > T::zero(), "ridge penalty must be positive");
    let m = masks.first().map_or(0, Vec::len);
    let one = |b: bool| if b { T::one() } else { T::zero() };

    let total: T = kernel_weights.iter().copied().sum();
    let mut x_mean = vec![T::zero(); m];
    let mut y_mean = T::zero();
    for ((mask, &pi), &y) in masks.iter().zip(kernel_weights).zip(responses) {
        for (acc, &bit) in x_mean.iter_mut().zip(mask) {
            *acc = *acc + pi * one(bit);
        }
        y_mean = y_mean + pi * y;
    }
    for v in &mut x_mean {
        *v = *v / total;
    }
    y_mean = y_mean / total;

    let mut gram = SquareMatrix::zeros(m);
    let mut rhs = vec![T::zero(); m];
    let mut centered = vec![T::zero(); m];
    for ((mask, &pi), &y) in masks.iter().zip(kernel_weights).zip(responses) {
        for j in 0..m {
            centered[j] = one(mask[j]) - x_mean[j];
        }
        let dy = y - y_mean;
        for j in 0..m {
            let wj = pi * centered[j];
            rhs[j] = rhs[j] + wj * dy;
            for k in 0..=j {
                gram.add(j, k, wj * centered[k]);
            }
        }
    }
    for j in 0..m {
        gram.add(j, j, lambda);
        for k in 0..j {
            let v = gram.get(j, k);
            gram.add(k, j, v);
        }
    }
    let coefficients = gram
        .solve_spd(&rhs)
        .expect("ridge normal equations are positive definite");
    let intercept = y_mean
        - x_mean
            .iter()
            .zip(&coefficients)
            .map(|(&x, &b)| x * b)
            .sum::<T>();
    SurrogateFit {
        intercept,
        coefficients,
    }
}
