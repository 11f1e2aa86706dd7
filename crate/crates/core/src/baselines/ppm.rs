//! PPM with interpolated smoothing:
//!
//! ```text
//! Q_k(j | s_k) = (a_{s_k}(j) + e_k Q_{k-1}(j | s_{k-1})) / (M_{s_k} + e_k)
//! ```
//!
//! where `e_k` is the number of distinct symbols seen after `s_k` (at least
//! one) and `Q_{-1} = 1/m`. Counts are updated after each prediction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sequence::{Sequence, Symbol};

struct Trie {
    m: usize,
    counts: Vec<u64>,
    totals: Vec<u64>,
    distinct: Vec<u32>,
    children: HashMap<(u32, Symbol), u32>,
}

impl Trie {
    fn new(m: usize) -> Trie {
        Trie {
            m,
            counts: vec![0; m],
            totals: vec![0],
            distinct: vec![0],
            children: HashMap::new(),
        }
    }

    fn child(&self, node: u32, sym: Symbol) -> Option<u32> {
        self.children.get(&(node, sym)).copied()
    }

    fn child_or_insert(&mut self, node: u32, sym: Symbol) -> u32 {
        let next = self.totals.len() as u32;
        let id = *self.children.entry((node, sym)).or_insert(next);
        if id == next {
            self.counts.extend(std::iter::repeat_n(0, self.m));
            self.totals.push(0);
            self.distinct.push(0);
        }
        id
    }

    fn observe(&mut self, node: u32, sym: Symbol) {
        let c = &mut self.counts[node as usize * self.m + sym as usize];
        if *c == 0 {
            self.distinct[node as usize] += 1;
        }
        *c += 1;
        self.totals[node as usize] += 1;
    }
}

/// Total log-loss `-Σ log Q(x_i | past)` in nats using contexts up to
/// `max_order` symbols.
pub fn ppm_log_loss(x: &[Symbol], m: u32, max_order: usize) -> f64 {
    let mut trie = Trie::new(m as usize);
    let mut path = Vec::with_capacity(max_order + 1);
    let mut loss = 0.0;
    for (i, &sym) in x.iter().enumerate() {
        let order = max_order.min(i);
        path.clear();
        path.push(Some(0u32));
        for k in 1..=order {
            let parent = path[k - 1];
            path.push(parent.and_then(|p| trie.child(p, x[i - k])));
        }
        let mut q = 1.0 / m as f64;
        for node in path.iter().flatten() {
            let n = *node as usize;
            let total = trie.totals[n];
            if total == 0 {
                continue;
            }
            let escape = trie.distinct[n].max(1) as f64;
            let a = trie.counts[n * trie.m + sym as usize] as f64;
            q = (a + escape * q) / (total as f64 + escape);
        }
        loss -= q.ln();
        let mut node = 0u32;
        trie.observe(node, sym);
        for k in 1..=order {
            node = trie.child_or_insert(node, x[i - k]);
            trie.observe(node, sym);
        }
    }
    loss
}

/// `-(1/n) log Q(x_1^n)` in nats per symbol.
pub fn ppm_estimate(x: &Sequence, max_order: usize) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(ppm_log_loss(x.symbols(), x.alphabet().size(), max_order) / x.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::Alphabet;
    use proptest::prelude::*;

    #[test]
    fn first_symbol_costs_log_m() {
        assert!((ppm_log_loss(&[2], 3, 5) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn second_symbol_blends_order_zero() {
        // After one 0: Q(0) = (1 + 1·1/2) / (1 + 1) = 3/4.
        let loss = ppm_log_loss(&[0, 0], 2, 3);
        assert!((loss - (2f64.ln() - 0.75f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn short_switching_input_can_exceed_log_m() {
        // log 3 for the first symbol, then Q(1) = (0 + 1/3) / 2.
        let loss = ppm_log_loss(&[0, 1], 3, 2);
        assert!((loss - (3f64.ln() + 6f64.ln())).abs() < 1e-12);
        assert!(loss / 2.0 > 3f64.ln());
    }

    #[test]
    fn repeating_pattern_becomes_free() {
        let x: Vec<Symbol> = (0..60_000).map(|i| (i % 3) as Symbol).collect();
        let s = Sequence::new(Alphabet::new(3).unwrap(), x).unwrap();
        let h = ppm_estimate(&s, 10).unwrap();
        assert!(h < 0.01, "{h}");
    }

    proptest! {
        #[test]
        fn estimate_is_non_negative(x in prop::collection::vec(0u32..3, 1..300), order in 0usize..6) {
            let s = Sequence::new(Alphabet::new(3).unwrap(), x).unwrap();
            prop_assert!(ppm_estimate(&s, order).unwrap() >= 0.0);
        }
    }
}
