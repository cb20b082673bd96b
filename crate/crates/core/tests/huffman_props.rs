mod common;

use proptest::prelude::*;

use common::brute_force_min_weighted_length;

use huffdp::huffman::{is_prefix_free, kraft_sum};
use huffdp::leveling::assign_levels_from_lengths;
use huffdp::{assign_levels, build_tree, weighted_code_length, FrequencyTable};

#[test]
fn oracle_sanity() {
    assert_eq!(brute_force_min_weighted_length(&[1, 1, 2]), 6);
    assert_eq!(brute_force_min_weighted_length(&[8, 3, 3, 3, 2, 1]), 47);
    assert_eq!(brute_force_min_weighted_length(&[17]), 17);
}

fn small_table() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=8, 1..=5)
}

fn table_from(counts: &[u64]) -> FrequencyTable {
    FrequencyTable::from_counts(counts.iter().enumerate().map(|(i, &c)| (i as f64, c))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matches_exhaustive_optimum(counts in small_table()) {
        let freq = table_from(&counts);
        let book = build_tree(&freq).unwrap();
        let got = weighted_code_length(&freq, &book).unwrap();
        prop_assert_eq!(got, brute_force_min_weighted_length(&counts) as f64);
    }

    #[test]
    fn prefix_free_with_kraft_equality(counts in prop::collection::vec(1u64..=1000, 2..60)) {
        let book = build_tree(&table_from(&counts)).unwrap();
        prop_assert!(is_prefix_free(&book));
        prop_assert_eq!(kraft_sum(&book), 1.0);
        prop_assert_eq!(book.min_length(), book.lengths().map(|l| l.1).min().unwrap());
        prop_assert!((book.max_length() as usize) < counts.len());
        prop_assert_eq!(book.tree_size(), 2 * counts.len() - 1);
    }

    #[test]
    fn deterministic(counts in prop::collection::vec(1u64..=20, 1..40)) {
        let freq = table_from(&counts);
        prop_assert_eq!(build_tree(&freq).unwrap(), build_tree(&freq).unwrap());
        // insertion order of the counts must not matter
        let reversed = FrequencyTable::from_counts(
            counts.iter().enumerate().rev().map(|(i, &c)| (i as f64, c)),
        ).unwrap();
        prop_assert_eq!(build_tree(&freq).unwrap(), build_tree(&reversed).unwrap());
    }

    #[test]
    fn levels_monotone_in_code_length(counts in prop::collection::vec(1u64..=50, 1..40)) {
        let book = build_tree(&table_from(&counts)).unwrap();
        let levels = assign_levels(&book, 5).unwrap();
        prop_assert!(levels.entries().iter().any(|e| e.level == 1));
        for a in levels.entries() {
            prop_assert!(a.level >= 1 && a.level <= 5);
            prop_assert_eq!(a.level, a.effective_depth.min(5));
            for b in levels.entries() {
                if a.raw_depth <= b.raw_depth {
                    prop_assert!(a.level <= b.level);
                }
            }
        }
    }

    #[test]
    fn effective_depth_is_shift_invariant(
        lengths in prop::collection::vec(1u32..=12, 1..20),
        shift in 0u32..10,
    ) {
        let base: Vec<(f64, u32)> = lengths.iter().enumerate().map(|(i, &l)| (i as f64, l)).collect();
        let shifted: Vec<(f64, u32)> = base.iter().map(|&(v, l)| (v, l + shift)).collect();
        let a = assign_levels_from_lengths(base, 5).unwrap();
        let b = assign_levels_from_lengths(shifted, 5).unwrap();
        let eff = |x: &huffdp::LevelAssignment| -> Vec<u32> {
            x.entries().iter().map(|e| e.effective_depth).collect()
        };
        prop_assert_eq!(eff(&a), eff(&b));
    }
}

#[test]
fn frequent_values_get_shorter_codes() {
    let freq = FrequencyTable::from_counts([(1.0, 100), (2.0, 1), (3.0, 1), (4.0, 1)]).unwrap();
    let book = build_tree(&freq).unwrap();
    assert_eq!(book.length(1.0), Some(1));
    assert!(book.length(4.0).unwrap() > 1);
}
