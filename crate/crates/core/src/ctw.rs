//! Context-tree weighting over the maximal count tree.
//!
//! [`ContextTree::build_tmax`] counts, for every context of length up to `D`,
//! how often each symbol follows it. Each node carries the log of its
//! Krichevsky–Trofimov marginal likelihood
//!
//! ```text
//! P_e,s = Π_j [(1/2)(3/2)…(a_s(j) - 1/2)] / [(m/2)(m/2 + 1)…(m/2 + M_s - 1)]
//! ```
//!
//! and, after [`ContextTree::compute_weighted`], the log of the weighted
//! probability
//!
//! ```text
//! P_w,s = P_e,s                                  at depth D
//! P_w,s = β P_e,s + (1 - β) Π_j P_w,sj            otherwise
//! ```
//!
//! `P_w` at the root is the prior predictive likelihood of the data, averaged
//! over all trees of depth at most `D` and their Dirichlet(1/2) parameters.
//!
//! Children never observed in the data are not stored. They behave as
//! zero-count nodes with `log P_e = log P_w = 0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sequence::{Sequence, Symbol};
use crate::tree::format_context;

pub const DEFAULT_DEPTH: usize = 10;

/// Alphabets up to this size use inline child tables.
const INLINE_CHILDREN: usize = 8;
const NO_NODE: u32 = u32::MAX;

/// Hyperparameters of the tree prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    m: u32,
    depth: usize,
    beta: f64,
    log_beta: f64,
    log_one_minus_beta: f64,
    log_alpha: f64,
}

impl PriorConfig {
    pub fn new(m: u32, depth: usize, beta: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidAlphabet(m as u64));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidConfig(format!("beta must lie in (0, 1), got {beta}")));
        }
        if depth > u16::MAX as usize {
            return Err(Error::InvalidConfig(format!("depth {depth} is too large")));
        }
        let log_one_minus_beta = (-beta).ln_1p();
        Ok(PriorConfig {
            m,
            depth,
            beta,
            log_beta: beta.ln(),
            log_one_minus_beta,
            log_alpha: log_one_minus_beta / (m - 1) as f64,
        })
    }

    /// Prior with the default `β = 1 - 2^(-m+1)`.
    pub fn with_default_beta(m: u32, depth: usize) -> Result<Self> {
        Self::new(m, depth, default_beta(m))
    }

    pub fn alphabet_size(&self) -> u32 {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `α = (1 - β)^(1/(m-1))`.
    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn log_alpha(&self) -> f64 {
        self.log_alpha
    }

    pub fn log_beta(&self) -> f64 {
        self.log_beta
    }

    pub fn log_one_minus_beta(&self) -> f64 {
        self.log_one_minus_beta
    }
}

pub fn default_beta(m: u32) -> f64 {
    1.0 - 2f64.powi(1 - m as i32)
}

/// `log(e^a + e^b)` without overflow or underflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Natural log of the KT estimated probability of a count vector.
pub fn log_pe(counts: &[u64]) -> f64 {
    let half_m = counts.len() as f64 / 2.0;
    let mut numerator = 0.0;
    for &a in counts {
        for k in 0..a {
            numerator += (k as f64 + 0.5).ln();
        }
    }
    let total: u64 = counts.iter().sum();
    let mut denominator = 0.0;
    for k in 0..total {
        denominator += (half_m + k as f64).ln();
    }
    numerator - denominator
}

/// Log of the sequential KT probability of symbol `j` given the counts seen so
/// far: `log((a(j) + 1/2) / (M + m/2))`.
pub fn kt_log_increment(counts: &[u64], j: Symbol) -> f64 {
    let total: u64 = counts.iter().sum();
    ((counts[j as usize] as f64 + 0.5) / (total as f64 + counts.len() as f64 / 2.0)).ln()
}

pub type NodeId = u32;

#[derive(Debug, Clone)]
enum Children {
    Inline([u32; INLINE_CHILDREN]),
    Map(BTreeMap<Symbol, u32>),
}

impl Children {
    fn new(m: u32) -> Self {
        if m as usize <= INLINE_CHILDREN {
            Children::Inline([NO_NODE; INLINE_CHILDREN])
        } else {
            Children::Map(BTreeMap::new())
        }
    }

    fn get(&self, sym: Symbol) -> Option<u32> {
        match self {
            Children::Inline(slots) => {
                let id = slots[sym as usize];
                (id != NO_NODE).then_some(id)
            }
            Children::Map(map) => map.get(&sym).copied(),
        }
    }

    fn set(&mut self, sym: Symbol, id: u32) {
        match self {
            Children::Inline(slots) => slots[sym as usize] = id,
            Children::Map(map) => {
                map.insert(sym, id);
            }
        }
    }

    fn iter(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        let inline = match self {
            Children::Inline(slots) => Some(
                slots
                    .iter()
                    .enumerate()
                    .filter(|(_, &id)| id != NO_NODE)
                    .map(|(s, &id)| (s as Symbol, id)),
            ),
            Children::Map(_) => None,
        };
        let map = match self {
            Children::Map(map) => Some(map.iter().map(|(&s, &id)| (s, id))),
            Children::Inline(_) => None,
        };
        inline.into_iter().flatten().chain(map.into_iter().flatten())
    }
}

#[derive(Debug, Clone)]
struct CountNode {
    depth: u16,
    total: u64,
    log_pe: f64,
    log_pw: f64,
    children: Children,
}

/// Maximal count tree with log-domain KT and weighted probabilities.
#[derive(Debug, Clone)]
pub struct ContextTree {
    cfg: PriorConfig,
    n: u64,
    nodes: Vec<CountNode>,
    counts: Vec<u64>,
    weighted: bool,
}

impl ContextTree {
    /// A root-only tree with no data; every node behaves as zero-count.
    pub fn empty(cfg: PriorConfig) -> ContextTree {
        let mut tree = ContextTree {
            cfg,
            n: 0,
            nodes: Vec::new(),
            counts: Vec::new(),
            weighted: false,
        };
        tree.push_node(0);
        tree
    }

    /// Count every depth-`D` context of the sequence (step one of CTW) and
    /// accumulate the KT log-probabilities sequentially.
    pub fn build_tmax(seq: &Sequence, cfg: PriorConfig) -> Result<ContextTree> {
        if seq.alphabet().size() != cfg.m {
            return Err(Error::InvalidConfig(format!(
                "sequence alphabet {} does not match prior alphabet {}",
                seq.alphabet(),
                cfg.m
            )));
        }
        let split = seq.split_context(cfg.depth)?;
        Self::build_from_parts(split.context, split.data, cfg)
    }

    /// As [`build_tmax`](Self::build_tmax) with an explicit context
    /// (chronological, exactly `D` symbols) and data.
    pub fn build_from_parts(context: &[Symbol], data: &[Symbol], cfg: PriorConfig) -> Result<ContextTree> {
        if data.is_empty() {
            return Err(Error::EmptyInput);
        }
        let depth = cfg.depth;
        if context.len() != depth {
            return Err(Error::ContextLength {
                expected: depth,
                got: context.len(),
            });
        }
        let m = cfg.m;
        if let Some(index) = context.iter().chain(data).position(|&s| s >= m) {
            let sym = context.iter().chain(data).nth(index).copied().unwrap_or_default();
            return Err(Error::AlphabetViolation {
                index,
                symbol: sym as i64,
                m,
            });
        }
        let mut tree = ContextTree::empty(cfg);
        let mut history = Vec::with_capacity(depth + data.len());
        history.extend_from_slice(context);
        history.extend_from_slice(data);
        for (i, &x) in data.iter().enumerate() {
            let t = depth + i;
            let mut node = 0u32;
            tree.observe(node, x);
            for k in 0..depth {
                let sym = history[t - 1 - k];
                node = tree.child_or_insert(node, sym, k + 1);
                tree.observe(node, x);
            }
        }
        tree.n = data.len() as u64;
        Ok(tree)
    }

    fn push_node(&mut self, depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(CountNode {
            depth: depth as u16,
            total: 0,
            log_pe: 0.0,
            log_pw: 0.0,
            children: Children::new(self.cfg.m),
        });
        self.counts.extend(std::iter::repeat_n(0, self.cfg.m as usize));
        id
    }

    fn child_or_insert(&mut self, node: u32, sym: Symbol, depth: usize) -> u32 {
        if let Some(id) = self.nodes[node as usize].children.get(sym) {
            return id;
        }
        let id = self.push_node(depth);
        self.nodes[node as usize].children.set(sym, id);
        id
    }

    fn observe(&mut self, node: u32, x: Symbol) {
        let m = self.cfg.m as usize;
        let base = node as usize * m;
        let counts = &mut self.counts[base..base + m];
        let n = &mut self.nodes[node as usize];
        n.log_pe += ((counts[x as usize] as f64 + 0.5) / (n.total as f64 + m as f64 / 2.0)).ln();
        counts[x as usize] += 1;
        n.total += 1;
    }

    /// Fill the weighted log-probabilities bottom-up (step three of CTW).
    pub fn compute_weighted(&mut self) {
        let depth = self.cfg.depth;
        let log_beta = self.cfg.log_beta;
        let log_rest = self.cfg.log_one_minus_beta;
        // Children are always allocated after their parent.
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let log_pw = if node.depth as usize >= depth {
                node.log_pe
            } else {
                let children: f64 = node
                    .children
                    .iter()
                    .map(|(_, c)| self.nodes[c as usize].log_pw)
                    .sum();
                log_add_exp(log_beta + node.log_pe, log_rest + children)
            };
            self.nodes[id].log_pw = log_pw;
        }
        self.weighted = true;
    }

    /// Build and weight in one step.
    pub fn new(seq: &Sequence, cfg: PriorConfig) -> Result<ContextTree> {
        let mut tree = Self::build_tmax(seq, cfg)?;
        tree.compute_weighted();
        Ok(tree)
    }

    pub fn config(&self) -> &PriorConfig {
        &self.cfg
    }

    /// Number of modeled symbols (excluding the initial context).
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn child(&self, node: NodeId, sym: Symbol) -> Option<NodeId> {
        self.nodes[node as usize].children.get(sym)
    }

    pub fn counts(&self, node: NodeId) -> &[u64] {
        let m = self.cfg.m as usize;
        &self.counts[node as usize * m..(node as usize + 1) * m]
    }

    pub fn total(&self, node: NodeId) -> u64 {
        self.nodes[node as usize].total
    }

    pub fn depth_of(&self, node: NodeId) -> usize {
        self.nodes[node as usize].depth as usize
    }

    pub fn log_pe_of(&self, node: NodeId) -> f64 {
        self.nodes[node as usize].log_pe
    }

    pub fn log_pw_of(&self, node: NodeId) -> f64 {
        self.nodes[node as usize].log_pw
    }

    /// Node for a context (most recent symbol first), if it was observed.
    pub fn find(&self, context: &[Symbol]) -> Option<NodeId> {
        context.iter().try_fold(self.root(), |node, &s| self.child(node, s))
    }

    /// `log P_w` at the root: the log prior predictive likelihood.
    pub fn log_prior_predictive(&self) -> f64 {
        assert!(self.weighted, "compute_weighted must run first");
        self.nodes[0].log_pw
    }

    /// Line-oriented dump: `context counts log_pe log_pw`, depth-first.
    pub fn dump(&self) -> String {
        let mut out = String::from("# context\tcounts\tlog_pe\tlog_pw\n");
        let mut stack = vec![(0u32, Vec::<Symbol>::new())];
        while let Some((id, path)) = stack.pop() {
            let counts = self
                .counts(id)
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let node = &self.nodes[id as usize];
            let _ = writeln!(
                out,
                "{}\t{}\t{:.17e}\t{:.17e}",
                format_context(&path),
                counts,
                node.log_pe,
                node.log_pw
            );
            let kids: Vec<_> = node.children.iter().collect();
            for (sym, child) in kids.into_iter().rev() {
                let mut p = path.clone();
                p.push(sym);
                stack.push((child, p));
            }
        }
        out
    }
}

/// Log prior predictive likelihood `log P(x)` of the sequence.
pub fn prior_predictive(seq: &Sequence, cfg: PriorConfig) -> Result<f64> {
    Ok(ContextTree::new(seq, cfg)?.log_prior_predictive())
}

/// Naive CTW entropy estimate `-(1/n) log P_w,λ` in nats per symbol.
pub fn ctw_entropy_estimate(seq: &Sequence, cfg: PriorConfig) -> Result<f64> {
    let tree = ContextTree::new(seq, cfg)?;
    Ok(-tree.log_prior_predictive() / tree.n() as f64)
}
