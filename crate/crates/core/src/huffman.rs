//! Minimum-redundancy prefix codes over observed values.
//!
//! The tree is only ever used to read off per-value code lengths (node
//! depths); nothing here encodes or decodes a bit stream.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maps `-0.0` to `0.0` so both hash and compare as the same symbol.
#[inline]
pub(crate) fn canonical(v: f64) -> f64 {
    v + 0.0
}

/// Distinct values with their occurrence counts, ascending by value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    entries: Vec<(f64, u64)>,
    total: u64,
}

impl FrequencyTable {
    /// Counts occurrences in a stream of readings.
    pub fn from_stream(stream: &[f64]) -> Result<Self> {
        if stream.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = stream.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let mut sorted: Vec<f64> = stream.iter().map(|&v| canonical(v)).collect();
        sorted.sort_unstable_by(f64::total_cmp);

        let mut entries: Vec<(f64, u64)> = Vec::new();
        for v in sorted {
            match entries.last_mut() {
                Some((last, count)) if last.to_bits() == v.to_bits() => *count += 1,
                _ => entries.push((v, 1)),
            }
        }
        Ok(FrequencyTable {
            total: stream.len() as u64,
            entries,
        })
    }

    /// Builds a table from explicit `(value, count)` pairs in any order.
    ///
    /// Duplicate values are merged.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, u64)>,
    {
        let mut entries: Vec<(f64, u64)> = Vec::new();
        for (v, c) in counts {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite value {v}")));
            }
            if c == 0 {
                return Err(Error::InvalidParameter(format!("zero count for value {v}")));
            }
            entries.push((canonical(v), c));
        }
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        entries.dedup_by(|next, kept| {
            if next.0.to_bits() == kept.0.to_bits() {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        let total = entries.iter().map(|e| e.1).sum();
        Ok(FrequencyTable { entries, total })
    }

    pub fn entries(&self) -> &[(f64, u64)] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct values.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, value: f64) -> Option<u64> {
        self.index_of(value).map(|i| self.entries[i].1)
    }

    pub(crate) fn index_of(&self, value: f64) -> Option<usize> {
        let value = canonical(value);
        self.entries
            .binary_search_by(|e| e.0.total_cmp(&value))
            .ok()
    }
}

/// A single value's prefix code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    /// Bit string made of `'0'` and `'1'`.
    pub bits: String,
    pub length: u32,
}

/// Per-value prefix codes, stored in the frequency table's value order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuffmanCodebook {
    values: Vec<f64>,
    codes: Vec<Code>,
    min_length: u32,
    tree_size: usize,
}

impl HuffmanCodebook {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Shortest code length over all values.
    pub fn min_length(&self) -> u32 {
        self.min_length
    }

    pub fn max_length(&self) -> u32 {
        self.codes.iter().map(|c| c.length).max().unwrap_or(0)
    }

    /// Number of nodes in the tree that produced this codebook.
    pub fn tree_size(&self) -> usize {
        self.tree_size
    }

    pub fn code(&self, value: f64) -> Option<&Code> {
        let value = canonical(value);
        self.values
            .binary_search_by(|v| v.total_cmp(&value))
            .ok()
            .map(|i| &self.codes[i])
    }

    pub fn length(&self, value: f64) -> Option<u32> {
        self.code(value).map(|c| c.length)
    }

    /// `(value, code)` pairs ascending by value.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &Code)> + '_ {
        self.values.iter().copied().zip(self.codes.iter())
    }

    /// `(value, code length)` pairs ascending by value.
    pub fn lengths(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.iter().map(|(v, c)| (v, c.length))
    }
}

#[derive(Debug)]
enum Node {
    Leaf(usize),
    Internal { left: usize, right: usize },
}

/// Heap key: lowest weight first, then the node created earliest.
#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Slot(Reverse<(u64, usize)>);

/// Builds an optimal prefix code for `freq`.
///
/// Leaves are created in ascending value order. Repeatedly the two lightest
/// nodes are extracted (equal weights resolve to the node created first); the
/// first becomes the left child (bit `0`), the second the right child (bit
/// `1`). A lone symbol receives the code `"0"`.
pub fn build_tree(freq: &FrequencyTable) -> Result<HuffmanCodebook> {
    let n = freq.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let values: Vec<f64> = freq.values().collect();
    if n == 1 {
        return Ok(HuffmanCodebook {
            values,
            codes: vec![Code {
                bits: "0".to_owned(),
                length: 1,
            }],
            min_length: 1,
            tree_size: 1,
        });
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(2 * n - 1);
    let mut heap = BinaryHeap::with_capacity(n);
    for (i, &(_, count)) in freq.entries().iter().enumerate() {
        nodes.push(Node::Leaf(i));
        heap.push(Slot(Reverse((count, i))));
    }
    while heap.len() > 1 {
        let Slot(Reverse((w0, left))) = heap.pop().expect("heap has two nodes");
        let Slot(Reverse((w1, right))) = heap.pop().expect("heap has two nodes");
        let id = nodes.len();
        nodes.push(Node::Internal { left, right });
        heap.push(Slot(Reverse((w0 + w1, id))));
    }
    let Slot(Reverse((_, root))) = heap.pop().expect("root");

    let mut codes = vec![
        Code {
            bits: String::new(),
            length: 0
        };
        n
    ];
    let mut stack = vec![(root, String::new())];
    while let Some((id, prefix)) = stack.pop() {
        match nodes[id] {
            Node::Leaf(sym) => {
                codes[sym] = Code {
                    length: prefix.len() as u32,
                    bits: prefix,
                }
            }
            Node::Internal { left, right } => {
                let mut r = prefix.clone();
                r.push('1');
                let mut l = prefix;
                l.push('0');
                stack.push((right, r));
                stack.push((left, l));
            }
        }
    }
    let min_length = codes.iter().map(|c| c.length).min().expect("non-empty");
    Ok(HuffmanCodebook {
        values,
        codes,
        min_length,
        tree_size: nodes.len(),
    })
}

/// Frequency-weighted total code length, `Σ count(v) · len(v)`.
pub fn weighted_code_length(freq: &FrequencyTable, book: &HuffmanCodebook) -> Result<f64> {
    freq.entries().iter().try_fold(0.0, |acc, &(v, count)| {
        let len = book.length(v).ok_or(Error::CodebookMismatch(v))?;
        Ok(acc + count as f64 * len as f64)
    })
}

/// `Σ 2^-len` over the codebook.
pub fn kraft_sum(book: &HuffmanCodebook) -> f64 {
    book.codes.iter().map(|c| (-(c.length as f64)).exp2()).sum()
}

/// True when no code is a prefix of another.
pub fn is_prefix_free(book: &HuffmanCodebook) -> bool {
    let mut bits: Vec<&str> = book.codes.iter().map(|c| c.bits.as_str()).collect();
    // after sorting, any prefix relation shows up between neighbours
    bits.sort_unstable();
    bits.windows(2).all(|w| !w[1].starts_with(w[0]))
}
