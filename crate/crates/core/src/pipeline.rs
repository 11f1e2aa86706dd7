//! End-to-end posterior entropy estimation.

use crate::ctw::{ContextTree, PriorConfig};
use crate::entropy::{fill_entropy, EntropyPolicy, FillReport};
use crate::error::{Error, Result};
use crate::posterior::{sample_joint, PosteriorSampleSet};
use crate::sequence::Sequence;
use crate::summary::{summarize, EntropySummary};

#[derive(Debug, Clone)]
pub struct BctOptions {
    pub samples: usize,
    pub seed: u64,
    pub policy: EntropyPolicy,
    pub level: f64,
    pub bins: usize,
}

#[derive(Debug, Clone)]
pub struct BctPosterior {
    pub samples: PosteriorSampleSet,
    pub fill: FillReport,
    pub summary: EntropySummary,
    /// Symbols modeled after setting aside the initial context.
    pub modeled: u64,
    /// Whether the context was taken from the front of the data.
    pub context_consumed: bool,
}

/// Sample the entropy-rate posterior given a sequence.
pub fn bct_posterior(seq: &Sequence, cfg: PriorConfig, opts: &BctOptions) -> Result<BctPosterior> {
    let split = seq.split_context(cfg.depth())?;
    let mut tree = ContextTree::build_from_parts(split.context, split.data, cfg)?;
    tree.compute_weighted();
    run(&tree, opts, split.consumed)
}

/// Sample the entropy-rate prior: the same sampler with no data.
pub fn bct_prior(cfg: PriorConfig, opts: &BctOptions) -> Result<BctPosterior> {
    let mut tree = ContextTree::empty(cfg);
    tree.compute_weighted();
    run(&tree, opts, false)
}

fn run(tree: &ContextTree, opts: &BctOptions, context_consumed: bool) -> Result<BctPosterior> {
    let mut samples = sample_joint(tree, opts.samples, opts.seed)?;
    let fill = fill_entropy(&mut samples, &opts.policy, opts.seed);
    let values = samples.entropies();
    if values.is_empty() {
        return Err(Error::Internal(format!(
            "every entropy evaluation failed: {}",
            fill.first_error.clone().unwrap_or_default()
        )));
    }
    let summary = summarize(&values, opts.level, opts.bins)?;
    Ok(BctPosterior {
        samples,
        fill,
        summary,
        modeled: tree.n(),
        context_consumed,
    })
}
