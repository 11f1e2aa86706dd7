use std::collections::HashMap;

use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::sequence::Symbol;

/// Empirical distribution of overlapping `k`-blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDistribution {
    pub k: usize,
    /// Blocks in lexicographic order with their empirical probabilities.
    pub blocks: Vec<(Vec<Symbol>, f64)>,
}

pub fn block_distribution(x: &[Symbol], k: usize) -> Result<BlockDistribution> {
    if k == 0 || k > x.len() {
        return Err(Error::BlockLength { k, n: x.len() });
    }
    let mut counts: HashMap<&[Symbol], u64> = HashMap::new();
    for w in x.windows(k) {
        *counts.entry(w).or_default() += 1;
    }
    let total = (x.len() - k + 1) as f64;
    let mut blocks: Vec<(Vec<Symbol>, f64)> = counts
        .into_iter()
        .map(|(b, c)| (b.to_vec(), c as f64 / total))
        .collect();
    blocks.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(BlockDistribution { k, blocks })
}

/// `(1/k) H(p̂_k)` over overlapping blocks.
pub fn plugin_estimate(x: &[Symbol], k: usize) -> Result<f64> {
    let dist = block_distribution(x, k)?;
    let probs: Vec<f64> = dist.blocks.iter().map(|(_, p)| *p).collect();
    Ok(shannon_entropy(&probs) / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_sequence_has_zero_entropy() {
        for k in 1..5 {
            assert_eq!(plugin_estimate(&[2; 20], k).unwrap(), 0.0);
        }
    }

    #[test]
    fn alternating_sequence_single_symbols() {
        let h = plugin_estimate(&[0, 1, 0, 1, 0, 1], 1).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn block_length_bounds() {
        assert!(matches!(plugin_estimate(&[0, 1], 3), Err(Error::BlockLength { k: 3, n: 2 })));
        assert!(plugin_estimate(&[0, 1], 0).is_err());
    }

    #[test]
    fn distribution_sums_to_one() {
        let x: Vec<Symbol> = (0..500).map(|i| (i * 31 % 7 % 3) as Symbol).collect();
        let d = block_distribution(&x, 4).unwrap();
        let total: f64 = d.blocks.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.blocks.len() <= x.len() - 3);
    }

    proptest! {
        #[test]
        fn unique_blocks_give_log_count(x in prop::collection::vec(0u32..4, 2..40), k in 1usize..8) {
            prop_assume!(k <= x.len());
            let d = block_distribution(&x, k).unwrap();
            let h = plugin_estimate(&x, k).unwrap();
            if d.blocks.len() == x.len() - k + 1 {
                prop_assert!((h - ((x.len() - k + 1) as f64).ln() / k as f64).abs() < 1e-12);
            }
            prop_assert!(h >= 0.0 && h <= 4f64.ln() + 1e-12);
        }
    }
}
