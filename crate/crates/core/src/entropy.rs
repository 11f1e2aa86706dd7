//! Entropy rate of a variable-memory chain `(T, θ)`.
//!
//! A chain of depth `d` is a first-order chain on blocks of `d` symbols: the
//! block `(x_{t-d+1}, …, x_t)` moves to `(x_{t-d+2}, …, x_t, j)` with
//! probability `θ_s(j)`, where `s` is the leaf of `T` suffixing the block.
//! With stationary distribution `π` over blocks,
//!
//! ```text
//! H = -Σ_b π(b) Σ_j θ_leaf(b)(j) log θ_leaf(b)(j)
//! ```
//!
//! The block chain is lumped exactly onto the leaves of the smallest
//! refinement of `T` that is closed under appending a new symbol: for every
//! state `s` and symbol `j`, the context `j s` determines the next state. A
//! deep but sparse tree then has a handful of states instead of `m^d`.
//!
//! Small state spaces are solved directly, larger ones by power iteration.
//! When the state space is too large, or the chain has zero transitions, the
//! rate is estimated from a long simulated path as `-(1/M) log P(Y_1^M)`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::posterior::PosteriorSampleSet;
use crate::rng::{self, Domain, StreamRng};
use crate::sequence::Symbol;
use crate::tree::{ParamSet, TreeModel};

/// Default Monte Carlo path length.
pub const DEFAULT_MC_LENGTH: usize = 1_000_000;

/// A fully specified variable-memory chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    tree: TreeModel,
    params: ParamSet,
}

impl ChainSpec {
    pub fn new(tree: TreeModel, params: ParamSet) -> Result<ChainSpec> {
        if params.leaf_count() != tree.leaf_count() {
            return Err(Error::InvalidParams(format!(
                "{} parameter rows for {} leaves",
                params.leaf_count(),
                tree.leaf_count()
            )));
        }
        if params.row(0).len() != tree.alphabet_size() as usize {
            return Err(Error::InvalidParams("row length differs from alphabet size".into()));
        }
        Ok(ChainSpec { tree, params })
    }

    pub fn tree(&self) -> &TreeModel {
        &self.tree
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn alphabet_size(&self) -> u32 {
        self.tree.alphabet_size()
    }

    pub fn depth(&self) -> usize {
        self.tree.depth()
    }

    /// All transition probabilities strictly positive.
    pub fn is_positive(&self) -> bool {
        self.params.is_positive()
    }

    /// Number of block states `m^d`, saturating.
    pub fn block_count(&self) -> u128 {
        (self.alphabet_size() as u128)
            .checked_pow(self.depth() as u32)
            .unwrap_or(u128::MAX)
    }

    /// The closed state space, or a budget error once it exceeds `limit`.
    pub fn state_space(&self, limit: usize) -> Result<StateSpace> {
        StateSpace::for_tree(&self.tree, limit)
    }
}

/// States of the lumped chain and their transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    m: usize,
    /// State contexts, most recent symbol first, in lexicographic order.
    contexts: Vec<Vec<Symbol>>,
    /// Leaf of the original tree governing each state.
    leaf: Vec<u32>,
    /// `next[s * m + j]`: state after emitting `j` from state `s`.
    next: Vec<u32>,
}

impl StateSpace {
    /// The closed state space of a tree, or a budget error once it exceeds
    /// `limit` states.
    pub fn for_tree(tree: &TreeModel, limit: usize) -> Result<StateSpace> {
        let m = tree.alphabet_size();
        let over = |states: usize| Error::StateBudget {
            states: states as u128,
            limit: limit as u128,
        };
        if tree.leaf_count() > limit {
            return Err(over(tree.leaf_count()));
        }
        let mut closed = Trie::new(m as usize);
        for leaf in tree.leaves() {
            closed.insert_leaf(leaf);
        }
        // A state `s` must split while `j s` is an internal node for some `j`.
        // Splitting `s` adds its children and can only newly affect `s[1..]`.
        let mut pending: Vec<usize> = closed.leaf_ids();
        let mut path = Vec::new();
        let mut states = tree.leaf_count();
        while let Some(id) = pending.pop() {
            if !closed.is_leaf(id) {
                continue;
            }
            closed.path(id, &mut path);
            let must_split = (0..m).any(|j| closed.is_internal_at(j, &path));
            if !must_split {
                continue;
            }
            closed.split(id);
            states += m as usize - 1;
            if states > limit {
                return Err(over(states));
            }
            pending.extend(closed.children(id));
            if let Some(t) = closed.find(&path[1..]) {
                pending.push(t);
            }
        }
        let (contexts, ids) = closed.leaves_in_order();
        let leaf = contexts
            .iter()
            .map(|s| tree.leaf_for_recent(|k| s[k]) as u32)
            .collect();
        let mut index = vec![u32::MAX; closed.len()];
        for (i, &id) in ids.iter().enumerate() {
            index[id] = i as u32;
        }
        let mut next = Vec::with_capacity(contexts.len() * m as usize);
        for s in &contexts {
            for j in 0..m {
                next.push(index[closed.descend(j, s)]);
            }
        }
        Ok(StateSpace {
            m: m as usize,
            contexts,
            leaf,
            next,
        })
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn contexts(&self) -> &[Vec<Symbol>] {
        &self.contexts
    }

    /// Leaf of the original tree governing state `s`.
    pub fn leaf(&self, s: usize) -> usize {
        self.leaf[s] as usize
    }

    /// State reached from `s` by emitting `j`.
    pub fn next(&self, s: usize, j: Symbol) -> usize {
        self.next[s * self.m + j as usize] as usize
    }
}

/// Proper m-ary tree under construction; children of a node are contiguous.
struct Trie {
    m: usize,
    first_child: Vec<u32>,
    parent: Vec<u32>,
    symbol: Vec<Symbol>,
}

const LEAF: u32 = u32::MAX;

impl Trie {
    fn new(m: usize) -> Trie {
        Trie {
            m,
            first_child: vec![LEAF],
            parent: vec![LEAF],
            symbol: vec![0],
        }
    }

    fn len(&self) -> usize {
        self.first_child.len()
    }

    fn is_leaf(&self, id: usize) -> bool {
        self.first_child[id] == LEAF
    }

    fn split(&mut self, id: usize) {
        let first = self.len();
        self.first_child[id] = first as u32;
        for c in 0..self.m {
            self.first_child.push(LEAF);
            self.parent.push(id as u32);
            self.symbol.push(c as Symbol);
        }
    }

    fn children(&self, id: usize) -> std::ops::Range<usize> {
        let first = self.first_child[id] as usize;
        first..first + self.m
    }

    fn insert_leaf(&mut self, context: &[Symbol]) {
        let mut node = 0;
        for &c in context {
            if self.is_leaf(node) {
                self.split(node);
            }
            node = self.first_child[node] as usize + c as usize;
        }
    }

    fn leaf_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&id| self.is_leaf(id)).collect()
    }

    /// Context of a node, most recent symbol first.
    fn path(&self, mut id: usize, out: &mut Vec<Symbol>) {
        out.clear();
        while id != 0 {
            out.push(self.symbol[id]);
            id = self.parent[id] as usize;
        }
        out.reverse();
    }

    /// Node at exactly `context`, if it exists.
    fn find(&self, context: &[Symbol]) -> Option<usize> {
        let mut node = 0;
        for &c in context {
            if self.is_leaf(node) {
                return None;
            }
            node = self.first_child[node] as usize + c as usize;
        }
        Some(node)
    }

    /// Whether the node at `j s` exists and is internal.
    fn is_internal_at(&self, j: Symbol, s: &[Symbol]) -> bool {
        if self.is_leaf(0) {
            return false;
        }
        let node = self.first_child[0] as usize + j as usize;
        match self.find_from(node, s) {
            Some(n) => !self.is_leaf(n),
            None => false,
        }
    }

    fn find_from(&self, mut node: usize, context: &[Symbol]) -> Option<usize> {
        for &c in context {
            if self.is_leaf(node) {
                return None;
            }
            node = self.first_child[node] as usize + c as usize;
        }
        Some(node)
    }

    /// Leaf reached by reading `j` and then `s`.
    fn descend(&self, j: Symbol, s: &[Symbol]) -> usize {
        let mut node = 0;
        for c in std::iter::once(j).chain(s.iter().copied()) {
            if self.is_leaf(node) {
                return node;
            }
            node = self.first_child[node] as usize + c as usize;
        }
        debug_assert!(self.is_leaf(node), "closed state space");
        node
    }

    /// Leaf contexts in lexicographic order with their node ids.
    fn leaves_in_order(&self) -> (Vec<Vec<Symbol>>, Vec<usize>) {
        let mut contexts = Vec::new();
        let mut ids = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((id, ctx)) = stack.pop() {
            if self.is_leaf(id) {
                contexts.push(ctx);
                ids.push(id);
                continue;
            }
            for c in self.children(id).rev() {
                let mut child = ctx.clone();
                child.push(self.symbol[c]);
                stack.push((c, child));
            }
        }
        (contexts, ids)
    }
}

/// Which route produced an entropy value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyMethod {
    Exact,
    MonteCarlo,
}

impl EntropyMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntropyMethod::Exact => "exact",
            EntropyMethod::MonteCarlo => "mc",
        }
    }

    pub fn parse(s: &str) -> Option<EntropyMethod> {
        match s {
            "exact" => Some(EntropyMethod::Exact),
            "mc" => Some(EntropyMethod::MonteCarlo),
            _ => None,
        }
    }
}

/// Thresholds deciding how each entropy rate is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPolicy {
    /// Largest block space solved by dense elimination.
    pub dense_max_states: usize,
    /// Largest block space handled by power iteration; beyond it, Monte Carlo.
    pub power_max_states: usize,
    pub power_tolerance: f64,
    pub power_max_iterations: usize,
    /// Path length for the Monte Carlo route.
    pub mc_length: usize,
}

impl Default for EntropyPolicy {
    fn default() -> Self {
        EntropyPolicy {
            dense_max_states: 256,
            power_max_states: 1_000_000,
            power_tolerance: 1e-10,
            power_max_iterations: 100_000,
            mc_length: DEFAULT_MC_LENGTH,
        }
    }
}

/// Stationary distribution of the lumped chain.
#[derive(Debug, Clone)]
pub struct Stationary {
    pub states: StateSpace,
    /// Probability of each state, aligned with `states.contexts()`.
    pub pi: Vec<f64>,
    /// `‖πP − π‖₁` of the returned vector.
    pub residual: f64,
}

pub fn stationary_distribution(spec: &ChainSpec) -> Result<Stationary> {
    stationary_distribution_with(spec, &EntropyPolicy::default())
}

pub fn stationary_distribution_with(spec: &ChainSpec, policy: &EntropyPolicy) -> Result<Stationary> {
    if !spec.is_positive() {
        return Err(Error::DegenerateChain);
    }
    let states = spec.state_space(policy.power_max_states)?;
    let (pi, residual) = solve_stationary(&spec.params, &states, policy)?;
    Ok(Stationary { states, pi, residual })
}

/// Stationary vector and residual on a prepared state space.
fn solve_stationary(params: &ParamSet, states: &StateSpace, policy: &EntropyPolicy) -> Result<(Vec<f64>, f64)> {
    let n = states.len();
    if n == 1 {
        return Ok((vec![1.0], 0.0));
    }
    if n > policy.dense_max_states {
        let uniform = vec![1.0 / n as f64; n];
        return power_iterate(params, states, uniform, policy.power_tolerance, policy.power_max_iterations);
    }
    let pi = dense_solve(params, states);
    let residual = step_residual(params, states, &pi);
    if residual <= policy.power_tolerance {
        return Ok((pi, residual));
    }
    power_iterate(params, states, pi, policy.power_tolerance, policy.power_max_iterations)
}

/// `πP` for the lumped chain.
fn step(params: &ParamSet, states: &StateSpace, pi: &[f64], next: &mut [f64]) {
    next.iter_mut().for_each(|v| *v = 0.0);
    for (s, &p) in pi.iter().enumerate() {
        let row = params.row(states.leaf(s));
        for (j, &q) in row.iter().enumerate() {
            next[states.next(s, j as Symbol)] += p * q;
        }
    }
}

fn step_residual(params: &ParamSet, states: &StateSpace, pi: &[f64]) -> f64 {
    let mut next = vec![0.0; pi.len()];
    step(params, states, pi, &mut next);
    next.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

/// Solve `π(P - I) = 0`, `Σπ = 1` by Gaussian elimination with partial
/// pivoting.
fn dense_solve(params: &ParamSet, states: &StateSpace) -> Vec<f64> {
    let n = states.len();
    // Row i of `a` is equation i: Σ_s π(s) P(s, i) - π(i) = 0, last row Σπ = 1.
    let mut a = vec![0.0; n * n];
    for s in 0..n {
        let row = params.row(states.leaf(s));
        for (j, &q) in row.iter().enumerate() {
            a[states.next(s, j as Symbol) * n + s] += q;
        }
    }
    for i in 0..n {
        a[i * n + i] -= 1.0;
    }
    for b in 0..n {
        a[(n - 1) * n + b] = 1.0;
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .expect("non-empty column");
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for k in r + 1..n {
            acc -= a[r * n + k] * x[k];
        }
        x[r] = acc / a[r * n + r];
    }
    for v in &mut x {
        *v = v.max(0.0);
    }
    let sum: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= sum);
    x
}

fn power_iterate(
    params: &ParamSet,
    states: &StateSpace,
    mut pi: Vec<f64>,
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut next = vec![0.0; pi.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        step(params, states, &pi, &mut next);
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if residual <= tolerance {
            let sum: f64 = pi.iter().sum();
            pi.iter_mut().for_each(|v| *v /= sum);
            let residual = step_residual(params, states, &pi);
            return Ok((pi, residual));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        residual,
    })
}

/// Shannon entropy of a probability vector in nats, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&q| q > 0.0).map(|&q| q * q.ln()).sum::<f64>()
}

fn clamp_entropy(h: f64, m: u32) -> f64 {
    h.clamp(0.0, (m as f64).ln())
}

pub fn entropy_rate_exact(spec: &ChainSpec) -> Result<f64> {
    entropy_rate_exact_with(spec, &EntropyPolicy::default())
}

pub fn entropy_rate_exact_with(spec: &ChainSpec, policy: &EntropyPolicy) -> Result<f64> {
    if !spec.is_positive() {
        return Err(Error::DegenerateChain);
    }
    let states = spec.state_space(policy.power_max_states)?;
    exact_on(&spec.params, &states, policy)
}

fn exact_on(params: &ParamSet, states: &StateSpace, policy: &EntropyPolicy) -> Result<f64> {
    let (pi, _) = solve_stationary(params, states, policy)?;
    let leaf_entropy: Vec<f64> = params.rows().map(shannon_entropy).collect();
    let h = pi
        .iter()
        .enumerate()
        .map(|(state, p)| p * leaf_entropy[states.leaf(state)])
        .sum();
    Ok(clamp_entropy(h, states.m as u32))
}

/// A Monte Carlo entropy estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Index of the category selected by a uniform `u ∈ [0, 1)`.
pub(crate) fn pick(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &q) in row.iter().enumerate() {
        if q > 0.0 {
            last_positive = j;
            acc += q;
            if u < acc {
                return j;
            }
        }
    }
    last_positive
}

/// Ring buffer holding the last `depth` symbols of a path.
pub(crate) struct History {
    buf: Vec<u32>,
    pos: usize,
}

impl History {
    pub(crate) fn new(context: &[u32], depth: usize) -> History {
        let mut buf = vec![0; depth.max(1)];
        let take = context.len().min(depth);
        let start = context.len() - take;
        for (i, &s) in context[start..].iter().enumerate() {
            buf[i] = s;
        }
        History {
            buf,
            pos: take % depth.max(1),
        }
    }

    /// Symbol `k + 1` steps back.
    pub(crate) fn recent(&self, k: usize) -> u32 {
        let len = self.buf.len();
        self.buf[(self.pos + len - 1 - k % len) % len]
    }

    pub(crate) fn push(&mut self, s: u32) {
        self.buf[self.pos] = s;
        self.pos = (self.pos + 1) % self.buf.len();
    }

    /// Chronological contents (oldest first).
    pub(crate) fn to_vec(&self) -> Vec<u32> {
        let len = self.buf.len();
        (0..len).map(|i| self.recent(len - 1 - i)).collect()
    }
}

/// Burn-in steps used before a Monte Carlo path.
pub fn burn_in_length(depth: usize) -> usize {
    1_000 + 10 * depth
}

/// Estimate the entropy rate from a simulated path of `length` steps after a
/// burn-in. The standard error uses 50 batch means.
pub fn entropy_rate_mc(spec: &ChainSpec, length: usize, rng: &mut StreamRng) -> Result<McEstimate> {
    entropy_rate_mc_with_rng(spec, length, rng)
}

pub fn entropy_rate_mc_with_rng<R: Rng + ?Sized>(spec: &ChainSpec, length: usize, rng: &mut R) -> Result<McEstimate> {
    if length == 0 {
        return Err(Error::InvalidConfig("Monte Carlo length must be at least 1".into()));
    }
    let depth = spec.depth();
    let tree = spec.tree();
    let mut history = History::new(&[], depth);
    for _ in 0..burn_in_length(depth) {
        let row = spec.params.row(tree.leaf_for_recent(|k| history.recent(k)));
        history.push(pick(row, rng.random()) as u32);
    }
    const BATCHES: usize = 50;
    let batch_len = (length / BATCHES).max(1);
    let mut batch_means = Vec::with_capacity(BATCHES);
    let mut batch_sum = 0.0;
    let mut batch_n = 0usize;
    let mut total = 0.0;
    let mut total_sq = 0.0;
    for _ in 0..length {
        let row = spec.params.row(tree.leaf_for_recent(|k| history.recent(k)));
        let j = pick(row, rng.random());
        let q = row[j];
        if q <= 0.0 {
            return Err(Error::Internal("simulated a zero-probability transition".into()));
        }
        let loss = -q.ln();
        total += loss;
        total_sq += loss * loss;
        batch_sum += loss;
        batch_n += 1;
        if batch_n == batch_len && batch_means.len() < BATCHES {
            batch_means.push(batch_sum / batch_n as f64);
            batch_sum = 0.0;
            batch_n = 0;
        }
        history.push(j as u32);
    }
    let mean = total / length as f64;
    let std_error = if batch_means.len() >= 2 && length >= 10 * BATCHES {
        let bm = batch_means.iter().sum::<f64>() / batch_means.len() as f64;
        let var = batch_means.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (batch_means.len() - 1) as f64;
        (var / batch_means.len() as f64).sqrt()
    } else if length > 1 {
        let var = (total_sq / length as f64 - mean * mean).max(0.0) * length as f64 / (length - 1) as f64;
        (var / length as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(McEstimate {
        value: clamp_entropy(mean, spec.alphabet_size()),
        std_error,
    })
}

/// Entropy of one chain under a policy: exact when the block space is within
/// budget and the chain is positive, Monte Carlo otherwise.
pub fn entropy_rate(spec: &ChainSpec, policy: &EntropyPolicy, rng: &mut StreamRng) -> Result<(f64, EntropyMethod)> {
    let states = spec.state_space(policy.power_max_states);
    entropy_rate_on(&spec.tree, &spec.params, states.as_ref(), policy, rng)
}

fn entropy_rate_on(
    tree: &TreeModel,
    params: &ParamSet,
    states: std::result::Result<&StateSpace, &Error>,
    policy: &EntropyPolicy,
    rng: &mut StreamRng,
) -> Result<(f64, EntropyMethod)> {
    let exact = match states {
        _ if !params.is_positive() => Err(Error::DegenerateChain),
        Ok(states) => exact_on(params, states, policy),
        Err(e) => Err(e.clone()),
    };
    match exact {
        Ok(h) => Ok((h, EntropyMethod::Exact)),
        Err(Error::DegenerateChain | Error::StateBudget { .. } | Error::NoConvergence { .. }) => {
            let spec = ChainSpec::new(tree.clone(), params.clone())?;
            let est = entropy_rate_mc(&spec, policy.mc_length, rng)?;
            Ok((est.value, EntropyMethod::MonteCarlo))
        }
        Err(e) => Err(e),
    }
}

/// Outcome counts of [`fill_entropy`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FillReport {
    pub exact: usize,
    pub monte_carlo: usize,
    pub failed: usize,
    pub first_error: Option<String>,
}

/// Compute `H` for every sample. Failures are counted, not propagated.
///
/// Posterior samples repeat tree shapes heavily, so each distinct tree's
/// state space is built once and shared.
pub fn fill_entropy(samples: &mut PosteriorSampleSet, policy: &EntropyPolicy, seed: u64) -> FillReport {
    let mut shape_of = Vec::with_capacity(samples.samples.len());
    let mut shapes: Vec<&TreeModel> = Vec::new();
    let mut lookup: HashMap<&TreeModel, usize> = HashMap::new();
    for sample in &samples.samples {
        let id = *lookup.entry(&sample.tree).or_insert_with(|| {
            shapes.push(&sample.tree);
            shapes.len() - 1
        });
        shape_of.push(id);
    }
    let spaces: Vec<Result<StateSpace>> = shapes
        .par_iter()
        .map(|tree| StateSpace::for_tree(tree, policy.power_max_states))
        .collect();
    let errors: Vec<Option<String>> = samples
        .samples
        .par_iter_mut()
        .zip(shape_of.par_iter())
        .map(|(sample, &shape)| {
            if sample.params.leaf_count() != sample.tree.leaf_count() {
                return Some(format!("{} parameter rows for {} leaves", sample.params.leaf_count(), sample.tree.leaf_count()));
            }
            let mut rng = rng::stream(seed, Domain::EntropyMonteCarlo, sample.index);
            match entropy_rate_on(&sample.tree, &sample.params, spaces[shape].as_ref(), policy, &mut rng) {
                Ok((h, method)) => {
                    sample.entropy = Some(h);
                    sample.method = Some(method);
                    None
                }
                Err(e) => {
                    sample.entropy = None;
                    sample.method = None;
                    Some(e.to_string())
                }
            }
        })
        .collect();
    let mut report = FillReport::default();
    for (sample, err) in samples.samples.iter().zip(errors) {
        match (sample.method, err) {
            (_, Some(e)) => {
                report.failed += 1;
                report.first_error.get_or_insert(e);
            }
            (Some(EntropyMethod::Exact), None) => report.exact += 1,
            (Some(EntropyMethod::MonteCarlo), None) => report.monte_carlo += 1,
            (None, None) => report.failed += 1,
        }
    }
    report
}
