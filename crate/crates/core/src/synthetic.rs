//! Offline stand-ins for meter-style streams: a heavy mode value plus a
//! geometric tail of rarer readings.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::seeded;

/// The 20-reading smart-meter example:
/// `180×8, 124×3, 167×3, 204×3, 332×2, 650×1`, interleaved.
pub fn table1_stream() -> Vec<f64> {
    vec![
        180.0, 124.0, 180.0, 167.0, 204.0, 180.0, 332.0, 180.0, 124.0, 167.0, 180.0, 204.0, 650.0,
        180.0, 124.0, 167.0, 180.0, 204.0, 332.0, 180.0,
    ]
}

pub const HEAVY_MODE_VALUE: f64 = 180.0;
const HEAVY_MODE_MASS: f64 = 0.4;
const HEAVY_TAIL_RATIO: f64 = 0.75;
const HEAVY_STEP: f64 = 12.0;

/// `n` readings: the mode value with probability 0.4, otherwise
/// `mode + 12·k` with `k ≥ 1` geometric (ratio 0.75).
pub fn heavy_mode_stream(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            if rng.random::<f64>() < HEAVY_MODE_MASS {
                return HEAVY_MODE_VALUE;
            }
            let mut k = 1u32;
            while rng.random::<f64>() < HEAVY_TAIL_RATIO {
                k += 1;
            }
            HEAVY_MODE_VALUE + HEAVY_STEP * k as f64
        })
        .collect()
}

/// `n` readings with exactly `distinct` unique values (`1000, 1001, ...`).
/// Every value appears once; the surplus favours low values. Shuffled.
///
/// Panics unless `1 <= distinct <= n`.
pub fn stream_with_distinct(n: usize, distinct: usize, seed: u64) -> Vec<f64> {
    assert!(
        distinct >= 1 && distinct <= n,
        "need 1 <= distinct ({distinct}) <= n ({n})"
    );
    let mut rng = seeded(seed);
    let mut out: Vec<f64> = (0..distinct).map(|i| 1000.0 + i as f64).collect();
    for _ in distinct..n {
        let r: f64 = rng.random();
        let i = ((distinct as f64) * r * r * r) as usize;
        out.push(1000.0 + i.min(distinct - 1) as f64);
    }
    out.shuffle(&mut rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::FrequencyTable;

    #[test]
    fn table1_counts() {
        let f = FrequencyTable::from_stream(&table1_stream()).unwrap();
        assert_eq!(
            f.entries(),
            &[
                (124.0, 3),
                (167.0, 3),
                (180.0, 8),
                (204.0, 3),
                (332.0, 2),
                (650.0, 1)
            ]
        );
    }

    #[test]
    fn exact_distinct_counts() {
        for u in [1, 800, 1400, 2000, 2500] {
            let s = stream_with_distinct(2500, u, 3);
            assert_eq!(s.len(), 2500);
            assert_eq!(FrequencyTable::from_stream(&s).unwrap().len(), u);
        }
    }

    #[test]
    fn heavy_mode_is_most_frequent() {
        let s = heavy_mode_stream(5000, 1);
        let f = FrequencyTable::from_stream(&s).unwrap();
        let top = f.entries().iter().max_by_key(|e| e.1).unwrap();
        assert_eq!(top.0, HEAVY_MODE_VALUE);
        assert!(f.len() > 5);
    }
}
