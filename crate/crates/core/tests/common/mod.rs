//! Test-only oracles, independent of the library's construction.

/// Minimum of `Σ f·len` over all integer length vectors satisfying Kraft's
/// inequality. Any optimal code has lengths in `1..n`, so that box suffices.
pub fn brute_force_min_weighted_length(counts: &[u64]) -> u64 {
    let n = counts.len();
    if n == 1 {
        return counts[0];
    }
    let max_len = (n - 1) as u32;
    let mut lengths = vec![1u32; n];
    let mut best = u64::MAX;
    loop {
        let kraft: f64 = lengths.iter().map(|&l| (-(l as f64)).exp2()).sum();
        if kraft <= 1.0 {
            let cost: u64 = counts
                .iter()
                .zip(&lengths)
                .map(|(&c, &l)| c * l as u64)
                .sum();
            best = best.min(cost);
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            lengths[i] += 1;
            if lengths[i] <= max_len {
                break;
            }
            lengths[i] = 1;
            i += 1;
        }
    }
}
