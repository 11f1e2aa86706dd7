//! Simulator statistics and the posterior sampler against enumeration.

use bct_core::ctw::{ContextTree, PriorConfig};
use bct_core::entropy::{entropy_rate_exact, ChainSpec};
use bct_core::posterior::sample_joint;
use bct_core::simulator::{fixture_chain, generate, random_chain, InitialContext, SimulationRequest};
use bct_core::tree::{ParamSet, TreeModel};
use bct_core::{Alphabet, Sequence, Symbol};

fn frequency_of_zero(symbols: &[Symbol]) -> f64 {
    symbols.iter().filter(|&&s| s == 0).count() as f64 / symbols.len() as f64
}

#[test]
fn iid_frequency_within_binomial_band() {
    let spec = ChainSpec::new(TreeModel::root_only(2), ParamSet::new(2, vec![vec![0.3, 0.7]]).unwrap()).unwrap();
    let out = generate(&SimulationRequest::new(spec, 100_000, 8)).unwrap();
    assert!((frequency_of_zero(&out.symbols) - 0.3).abs() <= 0.005);
}

#[test]
fn two_state_chain_hits_stationary_frequency() {
    let spec = fixture_chain("binary-d1").unwrap().spec;
    let out = generate(&SimulationRequest::new(spec, 100_000, 9)).unwrap();
    assert!((frequency_of_zero(&out.symbols) - 2.0 / 3.0).abs() <= 0.01);
    assert_eq!(out.context.len(), 1);
}

#[test]
fn degenerate_chain_is_constant() {
    let spec = ChainSpec::new(TreeModel::full(2, 1), ParamSet::new(2, vec![vec![1.0, 0.0]; 2]).unwrap()).unwrap();
    let req = SimulationRequest {
        spec,
        length: 500,
        context: InitialContext::Given(vec![1]),
        seed: 0,
    };
    assert!(generate(&req).unwrap().symbols.iter().all(|&s| s == 0));
}

#[test]
fn short_given_context_is_rejected() {
    let spec = fixture_chain("ternary-d2").unwrap().spec;
    let req = SimulationRequest {
        spec,
        length: 10,
        context: InitialContext::Given(vec![0]),
        seed: 0,
    };
    assert!(generate(&req).is_err());
}

#[test]
fn random_chain_limits() {
    let iid = random_chain(3, 0, 1.0, 4).unwrap();
    assert_eq!(iid.tree().leaf_count(), 1);
    let flat = random_chain(4, 3, 1e4, 4).unwrap();
    assert!(flat.params().is_positive());
    assert!((entropy_rate_exact(&flat).unwrap() - 4f64.ln()).abs() < 0.01);
    assert_eq!(random_chain(2, 4, 0.5, 11).unwrap(), random_chain(2, 4, 0.5, 11).unwrap());
}

/// Ternary trees of depth at most 2 with their posterior probabilities
/// computed by brute force from the library's own prior and a direct scan of
/// the data for each leaf.
#[test]
fn ternary_sampler_matches_enumerated_posterior() {
    let (m, depth) = (3u32, 2usize);
    let spec = fixture_chain("ternary-d2").unwrap().spec;
    let out = generate(&SimulationRequest::new(spec, 60 + depth, 12)).unwrap();
    let (ctx, data) = out.symbols.split_at(depth);
    let cfg = PriorConfig::with_default_beta(m, depth).unwrap();

    let trees = TreeModel::enumerate(m, depth);
    assert_eq!(trees.len(), 9);
    let log_joint: Vec<f64> = trees
        .iter()
        .map(|t| {
            let mut counts = vec![vec![0u64; m as usize]; t.leaf_count()];
            let mut log_p = t.log_prior(&cfg);
            let full: Vec<Symbol> = ctx.iter().chain(data).copied().collect();
            for i in depth..full.len() {
                let c = &mut counts[t.leaf_for_past(&full[..i]).unwrap()];
                let total: u64 = c.iter().sum();
                let x = full[i] as usize;
                log_p += ((c[x] as f64 + 0.5) / (total as f64 + 1.5)).ln();
                c[x] += 1;
            }
            log_p
        })
        .collect();
    let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm: f64 = log_joint.iter().map(|v| (v - max).exp()).sum();
    let target: Vec<f64> = log_joint.iter().map(|v| (v - max).exp() / norm).collect();

    let seq = Sequence::new(Alphabet::new(m).unwrap(), data.to_vec())
        .unwrap()
        .with_context(ctx.to_vec())
        .unwrap();
    let tree = ContextTree::new(&seq, cfg).unwrap();
    let n = 50_000;
    let set = sample_joint(&tree, n, 3).unwrap();
    let mut counts = vec![0usize; trees.len()];
    for s in &set.samples {
        counts[trees.iter().position(|t| *t == s.tree).unwrap()] += 1;
    }
    for (p, &c) in target.iter().zip(&counts) {
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((c as f64 / n as f64 - p).abs() <= 5.0 * se + 1e-4, "{p} vs {c}");
    }
}
