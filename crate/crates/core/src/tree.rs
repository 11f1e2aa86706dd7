//! Proper m-ary context-tree models and their leaf parameters.
//!
//! A context is written most-recent-symbol first: the leaf `[1, 0]` is
//! selected when the previous symbol was 1 and the one before it was 0.
//! Trees are always laid out in depth-first order with children visited in
//! symbol order, so leaves are listed in lexicographic context order and two
//! equal trees compare equal structurally.

use std::collections::HashSet;
use std::fmt;

use crate::ctw::PriorConfig;
use crate::error::{Error, Result};
use crate::sequence::Symbol;

const NO_CHILD: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ModelNode {
    first_child: u32,
    leaf: u32,
}

/// A proper m-ary tree: every internal node has exactly `m` children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeModel {
    m: u32,
    nodes: Vec<ModelNode>,
    leaves: Vec<Vec<Symbol>>,
    depth: usize,
}

impl TreeModel {
    /// Grow a tree depth-first. `expand(context)` decides whether the node at
    /// `context` gets its `m` children.
    pub fn grow<F>(m: u32, mut expand: F) -> TreeModel
    where
        F: FnMut(&[Symbol]) -> bool,
    {
        let mut tree = TreeModel {
            m,
            nodes: vec![ModelNode {
                first_child: NO_CHILD,
                leaf: 0,
            }],
            leaves: Vec::new(),
            depth: 0,
        };
        let mut path = Vec::new();
        tree.grow_at(0, &mut path, &mut expand);
        tree
    }

    fn grow_at<F>(&mut self, node: usize, path: &mut Vec<Symbol>, expand: &mut F)
    where
        F: FnMut(&[Symbol]) -> bool,
    {
        if expand(path) {
            let first = self.nodes.len();
            self.nodes[node].first_child = first as u32;
            self.nodes.extend((0..self.m).map(|_| ModelNode {
                first_child: NO_CHILD,
                leaf: 0,
            }));
            for c in 0..self.m {
                path.push(c);
                self.grow_at(first + c as usize, path, expand);
                path.pop();
            }
        } else {
            self.nodes[node].leaf = self.leaves.len() as u32;
            self.depth = self.depth.max(path.len());
            self.leaves.push(path.clone());
        }
    }

    /// The single-leaf tree `{λ}` (an i.i.d. model).
    pub fn root_only(m: u32) -> TreeModel {
        TreeModel::grow(m, |_| false)
    }

    /// The complete tree with every leaf at depth `depth`.
    pub fn full(m: u32, depth: usize) -> TreeModel {
        TreeModel::grow(m, |ctx| ctx.len() < depth)
    }

    /// Build from an explicit leaf set, checking that it forms a proper tree.
    pub fn from_leaves(m: u32, leaves: &[Vec<Symbol>]) -> Result<TreeModel> {
        if m < 2 {
            return Err(Error::InvalidAlphabet(m as u64));
        }
        let set: HashSet<&[Symbol]> = leaves.iter().map(|l| l.as_slice()).collect();
        if set.len() != leaves.len() {
            return Err(Error::InvalidTree("duplicate leaf context".into()));
        }
        if let Some(bad) = leaves.iter().flatten().find(|&&s| s >= m) {
            return Err(Error::InvalidTree(format!("symbol {bad} outside alphabet")));
        }
        let max_len = leaves.iter().map(Vec::len).max().unwrap_or(0);
        let mut ok = true;
        let tree = TreeModel::grow(m, |ctx| {
            if set.contains(ctx) {
                return false;
            }
            if ctx.len() >= max_len {
                ok = false;
                return false;
            }
            true
        });
        if !ok || tree.leaves.len() != leaves.len() {
            return Err(Error::InvalidTree(
                "leaf contexts do not form a complete prefix-free suffix set".into(),
            ));
        }
        Ok(tree)
    }

    pub fn alphabet_size(&self) -> u32 {
        self.m
    }

    /// Maximum leaf depth.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaf contexts in canonical (lexicographic) order.
    pub fn leaves(&self) -> &[Vec<Symbol>] {
        &self.leaves
    }

    /// Leaf reached by following `recent(0)`, `recent(1)`, … where `recent(k)`
    /// is the symbol `k + 1` steps in the past.
    pub fn leaf_for_recent<F>(&self, mut recent: F) -> usize
    where
        F: FnMut(usize) -> Symbol,
    {
        let mut node = 0usize;
        let mut k = 0usize;
        loop {
            let n = self.nodes[node];
            if n.first_child == NO_CHILD {
                return n.leaf as usize;
            }
            node = n.first_child as usize + recent(k) as usize;
            k += 1;
        }
    }

    /// Leaf selected by a chronological history (`past.last()` is the most
    /// recent symbol). `None` if the history is too short to reach a leaf.
    pub fn leaf_for_past(&self, past: &[Symbol]) -> Option<usize> {
        let mut node = 0usize;
        let mut k = 0usize;
        loop {
            let n = self.nodes[node];
            if n.first_child == NO_CHILD {
                return Some(n.leaf as usize);
            }
            let sym = *past.get(past.len().checked_sub(k + 1)?)?;
            node = n.first_child as usize + sym as usize;
            k += 1;
        }
    }

    /// Natural log of the prior probability of this tree within 𝒯(D):
    /// `(|T|-1) log α + (|T| - L_D(T)) log β`, where `|T|` counts leaves and
    /// `L_D(T)` counts leaves at depth `D`.
    pub fn log_prior(&self, cfg: &PriorConfig) -> f64 {
        let leaves = self.leaves.len() as f64;
        let at_max = self.leaves.iter().filter(|l| l.len() == cfg.depth()).count() as f64;
        let mut lp = 0.0;
        if leaves > 1.0 {
            lp += (leaves - 1.0) * cfg.log_alpha();
        }
        if leaves > at_max {
            lp += (leaves - at_max) * cfg.log_beta();
        }
        lp
    }

    /// Every proper m-ary tree of depth at most `max_depth`.
    pub fn enumerate(m: u32, max_depth: usize) -> Vec<TreeModel> {
        enumerate_leaf_sets(m, max_depth)
            .into_iter()
            .map(|leaves| TreeModel::from_leaves(m, &leaves).expect("enumerated tree is proper"))
            .collect()
    }

    /// Stable textual key, e.g. `0;1,0;1,1`.
    pub fn key(&self) -> String {
        self.leaves
            .iter()
            .map(|l| format_context(l))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for TreeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

fn enumerate_leaf_sets(m: u32, depth: usize) -> Vec<Vec<Vec<Symbol>>> {
    let mut out = vec![vec![Vec::new()]];
    if depth == 0 {
        return out;
    }
    let sub = enumerate_leaf_sets(m, depth - 1);
    let mut combos: Vec<Vec<Vec<Symbol>>> = vec![Vec::new()];
    for c in 0..m {
        let mut next = Vec::with_capacity(combos.len() * sub.len());
        for partial in &combos {
            for child in &sub {
                let mut leaves = partial.clone();
                leaves.extend(child.iter().map(|l| {
                    let mut ctx = Vec::with_capacity(l.len() + 1);
                    ctx.push(c);
                    ctx.extend_from_slice(l);
                    ctx
                }));
                next.push(leaves);
            }
        }
        combos = next;
    }
    out.extend(combos);
    out
}

/// `-` for the root, otherwise comma-separated symbols, most recent first.
pub fn format_context(ctx: &[Symbol]) -> String {
    if ctx.is_empty() {
        "-".to_string()
    } else {
        ctx.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn parse_context(text: &str) -> Option<Vec<Symbol>> {
    let text = text.trim();
    if text == "-" {
        return Some(Vec::new());
    }
    text.split(',').map(|t| t.trim().parse().ok()).collect()
}

/// Leaf parameters: one probability vector per leaf, in leaf order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    m: usize,
    theta: Vec<f64>,
}

impl ParamSet {
    /// Rows must be non-negative and sum to one (within 1e-9).
    pub fn new(m: u32, rows: Vec<Vec<f64>>) -> Result<ParamSet> {
        let m = m as usize;
        let mut theta = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidParams(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return Err(Error::InvalidParams(format!("row {i} has a negative or non-finite entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParams(format!("row {i} sums to {sum}")));
            }
            theta.extend_from_slice(row);
        }
        Ok(ParamSet { m, theta })
    }

    pub(crate) fn from_flat(m: usize, theta: Vec<f64>) -> ParamSet {
        debug_assert_eq!(theta.len() % m, 0);
        ParamSet { m, theta }
    }

    pub fn leaf_count(&self) -> usize {
        self.theta.len() / self.m
    }

    pub fn row(&self, leaf: usize) -> &[f64] {
        &self.theta[leaf * self.m..(leaf + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.theta.chunks_exact(self.m)
    }

    pub fn flat(&self) -> &[f64] {
        &self.theta
    }

    /// True when every transition probability is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.theta.iter().all(|&p| p > 0.0)
    }
}
