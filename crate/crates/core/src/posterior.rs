//! Exact i.i.d. sampling from the joint posterior over tree models and leaf
//! parameters.
//!
//! Trees are drawn top-down: a node at depth below `D` becomes a leaf with
//! probability `P_b,s = β P_e,s / P_w,s` and otherwise gets all `m` children.
//! Unobserved nodes have `P_e = P_w = 1`, so below the count tree the stop
//! probability is simply `β`. Given a tree, each leaf's parameter vector is
//! drawn from `Dir(1/2 + a_s(0), …, 1/2 + a_s(m-1))`.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::ctw::{ContextTree, NodeId};
use crate::entropy::EntropyMethod;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};
use crate::sequence::Symbol;
use crate::tree::{parse_context, ParamSet, TreeModel};

/// Default number of posterior draws.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Default ceiling on the estimated size of a sample set (8 GiB).
pub const DEFAULT_MEMORY_BUDGET: u128 = 8 << 30;

/// Probability that the sampler stops at a node. `None` is an unobserved
/// (virtual) node, for which the answer is `β`.
pub fn branch_prob(tree: &ContextTree, node: Option<NodeId>) -> f64 {
    let cfg = tree.config();
    match node {
        None => cfg.beta(),
        Some(id) => (cfg.log_beta() + tree.log_pe_of(id) - tree.log_pw_of(id)).exp().min(1.0),
    }
}

/// Draw one tree from the model posterior.
pub fn sample_tree<R: Rng + ?Sized>(tree: &ContextTree, rng: &mut R) -> TreeModel {
    assert!(tree.is_weighted(), "compute_weighted must run first");
    let depth = tree.config().depth();
    let m = tree.config().alphabet_size();
    // Track the count-tree node that matches each context visited in
    // depth-first order; `grow` visits parents before children.
    let mut stack: Vec<Option<NodeId>> = Vec::with_capacity(depth + 1);
    TreeModel::grow(m, |ctx| {
        stack.truncate(ctx.len());
        let node = match ctx.last() {
            None => Some(tree.root()),
            Some(&sym) => stack
                .last()
                .copied()
                .flatten()
                .and_then(|parent| tree.child(parent, sym)),
        };
        stack.push(node);
        if ctx.len() >= depth {
            return false;
        }
        let stop = branch_prob(tree, node);
        rng.random::<f64>() >= stop
    })
}

/// One draw from `Dir(alpha)`, via normalized Gamma(alpha_j, 1) variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R, out: &mut Vec<f64>) {
    let start = out.len();
    let mut sum = 0.0;
    for &a in alpha {
        let g = Gamma::new(a, 1.0).expect("positive Dirichlet parameter").sample(rng);
        out.push(g);
        sum += g;
    }
    if sum > 0.0 {
        for x in &mut out[start..] {
            *x /= sum;
        }
    } else {
        // Every gamma variate underflowed; only possible for tiny shapes.
        let k = rng.random_range(0..alpha.len());
        for (i, x) in out[start..].iter_mut().enumerate() {
            *x = if i == k { 1.0 } else { 0.0 };
        }
    }
}

/// Draw leaf parameters from their full conditional given the tree.
pub fn sample_params<R: Rng + ?Sized>(model: &TreeModel, tree: &ContextTree, rng: &mut R) -> ParamSet {
    let m = tree.config().alphabet_size() as usize;
    let mut theta = Vec::with_capacity(model.leaf_count() * m);
    let mut alpha = vec![0.5; m];
    for leaf in model.leaves() {
        match tree.find(leaf) {
            Some(node) => {
                for (a, &c) in alpha.iter_mut().zip(tree.counts(node)) {
                    *a = c as f64 + 0.5;
                }
            }
            None => alpha.iter_mut().for_each(|a| *a = 0.5),
        }
        sample_dirichlet(&alpha, rng, &mut theta);
    }
    ParamSet::from_flat(m, theta)
}

/// A posterior draw, with its entropy rate once computed.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSample {
    pub index: u64,
    pub tree: TreeModel,
    pub params: ParamSet,
    pub entropy: Option<f64>,
    pub method: Option<EntropyMethod>,
}

impl JointSample {
    /// Line record: `index<TAB>leaves<TAB>theta<TAB>H<TAB>method`.
    /// Leaves are `;`-joined contexts, theta is space-separated row-major.
    pub fn to_record(&self) -> String {
        let theta = self
            .params
            .flat()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let h = self.entropy.map_or("NA".to_string(), |h| h.to_string());
        let method = self.method.as_ref().map_or("NA", EntropyMethod::as_str);
        format!("{}\t{}\t{}\t{}\t{}", self.index, self.tree.key(), theta, h, method)
    }

    pub fn from_record(m: u32, line: &str) -> Result<JointSample> {
        let err = |message: &str| Error::Parse {
            line: 0,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(err("expected 5 tab-separated fields"));
        }
        let index = fields[0].parse().map_err(|_| err("bad sample index"))?;
        let leaves = fields[1]
            .split(';')
            .map(parse_context)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| err("bad leaf context"))?;
        let tree = TreeModel::from_leaves(m, &leaves)?;
        let flat = fields[2]
            .split_whitespace()
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| err("bad parameter value"))?;
        if flat.len() != tree.leaf_count() * m as usize {
            return Err(err("parameter count does not match tree"));
        }
        let rows = flat.chunks(m as usize).map(<[f64]>::to_vec).collect();
        let params = ParamSet::new(m, rows)?;
        let entropy = match fields[3] {
            "NA" => None,
            v => Some(v.parse().map_err(|_| err("bad entropy value"))?),
        };
        let method = match fields[4] {
            "NA" => None,
            v => Some(EntropyMethod::parse(v).ok_or_else(|| err("bad method"))?),
        };
        Ok(JointSample {
            index,
            tree,
            params,
            entropy,
            method,
        })
    }
}

/// `N` i.i.d. draws from the joint posterior, in index order.
#[derive(Debug, Clone)]
pub struct PosteriorSampleSet {
    pub alphabet_size: u32,
    pub seed: u64,
    pub samples: Vec<JointSample>,
}

impl PosteriorSampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Entropy values of the samples that have one.
    pub fn entropies(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.entropy).collect()
    }

    pub fn to_records(&self) -> String {
        let mut out = String::from("# index\tleaves\ttheta\tH\tmethod\n");
        for s in &self.samples {
            let _ = writeln!(out, "{}", s.to_record());
        }
        out
    }
}

/// Expected number of leaves of a posterior tree draw.
pub fn expected_leaf_count(tree: &ContextTree) -> f64 {
    let cfg = tree.config();
    let depth = cfg.depth();
    let m = cfg.alphabet_size() as f64;
    let beta = cfg.beta();
    // Below the count tree: E_d = 1 at depth D, else β + (1-β) m E_{d+1}.
    let mut virtual_leaves = vec![1.0; depth + 1];
    for d in (0..depth).rev() {
        virtual_leaves[d] = beta + (1.0 - beta) * m * virtual_leaves[d + 1];
    }
    fn visit(tree: &ContextTree, node: NodeId, virt: &[f64]) -> f64 {
        let d = tree.depth_of(node);
        if d + 1 >= virt.len() {
            return 1.0;
        }
        let pb = branch_prob(tree, Some(node));
        let m = tree.config().alphabet_size();
        let children: f64 = (0..m as Symbol)
            .map(|s| match tree.child(node, s) {
                Some(c) => visit(tree, c, virt),
                None => virt[d + 1],
            })
            .sum();
        pb + (1.0 - pb) * children
    }
    visit(tree, tree.root(), &virtual_leaves)
}

/// Draw `n` joint samples. Sample `i` uses its own random stream, so the
/// result does not depend on the number of worker threads.
pub fn sample_joint(tree: &ContextTree, n: usize, seed: u64) -> Result<PosteriorSampleSet> {
    sample_joint_with_budget(tree, n, seed, DEFAULT_MEMORY_BUDGET)
}

pub fn sample_joint_with_budget(
    tree: &ContextTree,
    n: usize,
    seed: u64,
    budget_bytes: u128,
) -> Result<PosteriorSampleSet> {
    if n == 0 {
        return Err(Error::InvalidConfig("number of samples must be at least 1".into()));
    }
    assert!(tree.is_weighted(), "compute_weighted must run first");
    let m = tree.config().alphabet_size() as f64;
    let depth = tree.config().depth() as f64;
    let per_leaf = 8.0 * m + 4.0 * depth + 64.0;
    let estimated = n as f64 * (expected_leaf_count(tree) * per_leaf + 128.0);
    if estimated > budget_bytes as f64 {
        return Err(Error::MemoryBudget {
            estimated_bytes: estimated as u128,
            budget: budget_bytes,
        });
    }
    let samples = (0..n as u64)
        .into_par_iter()
        .map(|index| draw_one(tree, seed, index))
        .collect();
    Ok(PosteriorSampleSet {
        alphabet_size: tree.config().alphabet_size(),
        seed,
        samples,
    })
}

/// Sample `index` of the stream identified by `seed`.
pub fn draw_one(tree: &ContextTree, seed: u64, index: u64) -> JointSample {
    let mut rng = rng::stream(seed, Domain::PosteriorSample, index);
    let model = sample_tree(tree, &mut rng);
    let params = sample_params(&model, tree, &mut rng);
    JointSample {
        index,
        tree: model,
        params,
        entropy: None,
        method: None,
    }
}
