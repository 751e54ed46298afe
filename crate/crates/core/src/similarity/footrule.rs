//! Maximum penalized footrule distance.
//!
//! Three routes to the same quantity: the closed form derived from the
//! reversal pattern, the exact rule used for normalization, and an
//! exhaustive search that serves as the oracle for both.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest list size accepted by [`footrule_max_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 8;

/// Per-position displacements of a fully reversed list of length `n`:
/// `n-1, n-3, …, n-3, n-1`.
pub fn reversal_pattern(n: usize) -> Vec<usize> {
    (0..n).map(|k| k.abs_diff(n - 1 - k)).collect()
}

/// Closed-form maximum from the reversal-pattern argument.
///
/// For `penalty >= n-1` the maximum is `penalty·n`. Otherwise, with `i` the
/// largest 1-based index into `n-1, n-3, …` whose value is still
/// `>= penalty`, the result is `⌊n²/2⌋ + penalty·(n-2i) - 2⌊(n-2i)²/2⌋`.
///
/// The second case subtracts the middle block twice and so undercounts
/// whenever that block has a non-zero sum; [`footrule_max_exact`] is the
/// value to normalize with.
pub fn footrule_max_penalized<T: Scalar>(n: usize, penalty: T) -> T {
    assert!(n >= 1, "list size must be positive");
    let nt = T::from_usize_lossy(n);
    if penalty >= T::from_usize_lossy(n - 1) {
        return penalty * nt;
    }
    let half = n / 2;
    let i = (1..=half)
        .rev()
        .find(|&t| T::from_usize_lossy(n + 1 - 2 * t) >= penalty)
        .unwrap_or(1);
    let middle = n - 2 * i;
    T::from_usize_lossy(n * n / 2) + penalty * T::from_usize_lossy(middle)
        - T::lit(2.0) * T::from_usize_lossy(middle * middle / 2)
}

/// Exact maximum: `Σ_k max(d_k, penalty)` over the reversal pattern `d`.
///
/// Keeping `k` elements displaces them by at most the `k` largest pattern
/// values in total, and that sum is attained by reversing the outermost
/// elements, so each position independently takes the better of its
/// pattern value and the penalty.
pub fn footrule_max_exact<T: Scalar>(n: usize, penalty: T) -> T {
    reversal_pattern(n)
        .into_iter()
        .map(|d| T::from_usize_lossy(d).max(penalty))
        .sum()
}

/// Exhaustive maximum over every way to drop a subset of the `n` original
/// elements (each costing `penalty`) and place the rest injectively into
/// `n` ranks.
pub fn footrule_max_bruteforce<T: Scalar>(n: usize, penalty: T) -> Result<T> {
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::SizeLimit(n));
    }
    fn search<T: Scalar>(elem: usize, n: usize, used: &mut [bool], penalty: T) -> T {
        if elem == n {
            return T::zero();
        }
        let mut best = penalty + search(elem + 1, n, used, penalty);
        for pos in 0..n {
            if !used[pos] {
                used[pos] = true;
                let d =
                    T::from_usize_lossy(elem.abs_diff(pos)) + search(elem + 1, n, used, penalty);
                used[pos] = false;
                best = best.max(d);
            }
        }
        best
    }
    let mut used = vec![false; n];
    Ok(search(0, n, &mut used, penalty))
}
