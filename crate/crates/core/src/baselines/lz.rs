//! Increasing-window match-length estimator.
//!
//! With 1-based positions, `Λ_i` is one plus the length of the longest prefix
//! of `x_i x_{i+1} …` that appears as a contiguous block inside `x_1^{i-1}`,
//! capped at `n - i + 1`. The estimate is
//!
//! ```text
//! Ĥ = [ (1 / (n - n₀ + 1)) Σ_{i=n₀}^{n} Λ_i / log i ]^{-1},   n₀ = max(2, ⌈n/10⌉)
//! ```
//!
//! Match lengths come from a suffix array with LCP and position range-minimum
//! tables. Since a match at `i` shifted by one is a match at `i + 1`, lengths
//! drop by at most one per step, so the scan does amortized O(n) range tests.

use crate::error::{Error, Result};
use crate::sequence::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchSearch {
    #[default]
    Indexed,
    /// Quadratic scan, for cross-checking.
    Naive,
}

/// First (1-based) position included in the average.
pub fn lz_start_index(n: usize) -> usize {
    2usize.max(n.div_ceil(10))
}

/// `Λ_i` for every 1-based `i` in `1..=n` (index `i - 1` of the result).
pub fn match_lengths(x: &[Symbol], search: MatchSearch) -> Vec<usize> {
    let longest = match search {
        MatchSearch::Indexed => longest_past_matches(x),
        MatchSearch::Naive => longest_past_matches_naive(x),
    };
    let n = x.len();
    longest
        .into_iter()
        .enumerate()
        .map(|(p, l)| (l + 1).min(n - p))
        .collect()
}

pub fn lz_estimate(x: &[Symbol]) -> Result<f64> {
    lz_estimate_with(x, MatchSearch::Indexed)
}

pub fn lz_estimate_with(x: &[Symbol], search: MatchSearch) -> Result<f64> {
    let n = x.len();
    let start = lz_start_index(n);
    if n < 4 * start {
        return Err(Error::InsufficientData {
            needed: 4 * start,
            got: n,
        });
    }
    let lambda = match_lengths(x, search);
    let sum: f64 = (start..=n)
        .map(|i| lambda[i - 1] as f64 / (i as f64).ln())
        .sum();
    Ok((n - start + 1) as f64 / sum)
}

/// For each 0-based `p`, the longest `L` with `x[p..p+L]` equal to
/// `x[q..q+L]` for some `q + L <= p`.
fn longest_past_matches_naive(x: &[Symbol]) -> Vec<usize> {
    let n = x.len();
    (0..n)
        .map(|p| {
            (0..p)
                .map(|q| {
                    let cap = (p - q).min(n - p);
                    (0..cap).take_while(|&k| x[q + k] == x[p + k]).count()
                })
                .max()
                .unwrap_or(0)
        })
        .collect()
}

fn suffix_array(x: &[Symbol]) -> Vec<usize> {
    let n = x.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<i64> = x.iter().map(|&s| s as i64).collect();
    let mut tmp = vec![0i64; n];
    let mut k = 1;
    loop {
        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] } else { -1 });
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0]] = 0;
        for w in 1..n {
            tmp[sa[w]] = tmp[sa[w - 1]] + i64::from(key(sa[w - 1]) < key(sa[w]));
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] as usize == n - 1 || k >= n {
            break;
        }
        k *= 2;
    }
    sa
}

/// Kasai: `lcp[r]` is the common prefix of suffixes ranked `r - 1` and `r`.
fn lcp_array(x: &[Symbol], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = x.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && x[i + h] == x[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

struct SparseMin {
    levels: Vec<Vec<usize>>,
}

impl SparseMin {
    fn new(values: Vec<usize>) -> SparseMin {
        let mut levels = vec![values];
        let mut width = 1;
        while 2 * width <= levels[0].len() {
            let prev = levels.last().expect("level");
            let next = (0..prev.len() - width).map(|i| prev[i].min(prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over the inclusive range `[lo, hi]`.
    fn min(&self, lo: usize, hi: usize) -> usize {
        let len = hi - lo + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let table = &self.levels[level];
        table[lo].min(table[hi + 1 - (1 << level)])
    }
}

fn longest_past_matches(x: &[Symbol]) -> Vec<usize> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let sa = suffix_array(x);
    let mut rank = vec![0; n];
    for (r, &i) in sa.iter().enumerate() {
        rank[i] = r;
    }
    let lcp = SparseMin::new(lcp_array(x, &sa, &rank));
    let positions = SparseMin::new(sa.clone());

    // Is there an earlier occurrence of x[p..p+len] ending by p?
    let occurs = |p: usize, len: usize| -> bool {
        let r = rank[p];
        // Widest rank interval around r whose suffixes share `len` symbols.
        let (mut lo, mut hi) = (r, r);
        let (mut a, mut b) = (0usize, r);
        while a < b {
            let mid = (a + b) / 2;
            if lcp.min(mid + 1, r) >= len {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        if a < r {
            lo = a;
        }
        let (mut a, mut b) = (r, n - 1);
        while a < b {
            let mid = (a + b).div_ceil(2);
            if lcp.min(r + 1, mid) >= len {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        if a > r {
            hi = a;
        }
        positions.min(lo, hi) + len <= p
    };

    let mut out = vec![0; n];
    let mut len = 0usize;
    for p in 0..n {
        len = len.saturating_sub(1);
        while len < n - p && occurs(p, len + 1) {
            len += 1;
        }
        out[p] = len;
    }
    out
}
