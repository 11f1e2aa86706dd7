//! Sequence generation from known chains, fixture chains with pinned entropy
//! rates, random chains, and the chain file format.
//!
//! Chain files are line-oriented:
//!
//! ```text
//! format_version = 1
//! alphabet = 2
//! leaf 0 = 0.9 0.1
//! leaf 1 = 0.2 0.8
//! entropy = 0.38354...
//! ```
//!
//! Leaf contexts are written most recent symbol first, comma-separated, with
//! `-` for the root. The `entropy` line is optional and holds the pinned rate.

use std::fmt::Write as _;

use rand::Rng;

use crate::entropy::{burn_in_length, entropy_rate_exact, pick, ChainSpec, History};
use crate::error::{Error, Result};
use crate::posterior::sample_dirichlet;
use crate::rng::{self, Domain};
use crate::sequence::{Alphabet, Sequence, Symbol};
use crate::tree::{format_context, parse_context, ParamSet, TreeModel};

/// How the symbols preceding the generated data are obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialContext {
    /// Chronological context; must cover the tree depth.
    Given(Vec<Symbol>),
    /// Run the chain for this many steps from an all-zero context and discard
    /// them.
    BurnIn(usize),
}

#[derive(Debug, Clone)]
pub struct SimulationRequest {
    pub spec: ChainSpec,
    pub length: usize,
    pub context: InitialContext,
    pub seed: u64,
}

impl SimulationRequest {
    /// Request with the default burn-in.
    pub fn new(spec: ChainSpec, length: usize, seed: u64) -> SimulationRequest {
        let steps = burn_in_length(spec.depth());
        SimulationRequest {
            spec,
            length,
            context: InitialContext::BurnIn(steps),
            seed,
        }
    }
}

/// Generated data and the realized context (the last `d` symbols before it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub alphabet: Alphabet,
    pub context: Vec<Symbol>,
    pub symbols: Vec<Symbol>,
}

impl Generated {
    /// The symbols as a sequence without an attached context.
    pub fn sequence(&self) -> Sequence {
        Sequence::new(self.alphabet, self.symbols.clone()).expect("generated symbols are valid")
    }
}

pub fn generate(req: &SimulationRequest) -> Result<Generated> {
    if req.length == 0 {
        return Err(Error::InvalidConfig("sequence length must be at least 1".into()));
    }
    let spec = &req.spec;
    let depth = spec.depth();
    let tree = spec.tree();
    let mut rng = rng::stream(req.seed, Domain::Simulation, 0);
    let mut history = match &req.context {
        InitialContext::Given(ctx) => {
            if ctx.len() < depth {
                return Err(Error::ContextLength {
                    expected: depth,
                    got: ctx.len(),
                });
            }
            if let Some(index) = ctx.iter().position(|&s| s >= spec.alphabet_size()) {
                return Err(Error::AlphabetViolation {
                    index,
                    symbol: ctx[index] as i64,
                    m: spec.alphabet_size(),
                });
            }
            History::new(ctx, depth)
        }
        InitialContext::BurnIn(steps) => {
            if *steps < 10 * depth {
                return Err(Error::InvalidConfig(format!(
                    "burn-in of {steps} steps is shorter than 10 x depth {depth}"
                )));
            }
            let mut h = History::new(&[], depth);
            for _ in 0..*steps {
                let row = spec.params().row(tree.leaf_for_recent(|k| h.recent(k)));
                h.push(pick(row, rng.random()) as Symbol);
            }
            h
        }
    };
    let context = if depth == 0 { Vec::new() } else { history.to_vec() };
    let mut symbols = Vec::with_capacity(req.length);
    for _ in 0..req.length {
        let row = spec.params().row(tree.leaf_for_recent(|k| history.recent(k)));
        let s = pick(row, rng.random()) as Symbol;
        symbols.push(s);
        history.push(s);
    }
    Ok(Generated {
        alphabet: Alphabet::new(spec.alphabet_size())?,
        context,
        symbols,
    })
}

/// A chain together with its pinned entropy rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainFile {
    pub spec: ChainSpec,
    pub entropy: Option<f64>,
}

impl ChainFile {
    pub fn to_text(&self) -> String {
        let mut out = String::from("format_version = 1\n");
        let _ = writeln!(out, "alphabet = {}", self.spec.alphabet_size());
        for (ctx, row) in self.spec.tree().leaves().iter().zip(self.spec.params().rows()) {
            let values = row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "leaf {} = {}", format_context(ctx), values);
        }
        if let Some(h) = self.entropy {
            let _ = writeln!(out, "entropy = {h}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<ChainFile> {
        let mut m: Option<u32> = None;
        let mut leaves = Vec::new();
        let mut rows = Vec::new();
        let mut entropy = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let perr = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(ctx) = key.strip_prefix("leaf ") {
                let ctx = parse_context(ctx).ok_or_else(|| perr(format!("bad leaf context {ctx:?}")))?;
                let row = value
                    .split_whitespace()
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| perr("bad probability value".into()))?;
                leaves.push(ctx);
                rows.push(row);
                continue;
            }
            match key {
                "format_version" if value == "1" => {}
                "format_version" => return Err(perr(format!("unsupported format version {value}"))),
                "alphabet" => {
                    m = Some(value.parse().map_err(|_| perr(format!("bad alphabet size {value:?}")))?)
                }
                "entropy" => {
                    entropy = Some(value.parse().map_err(|_| perr(format!("bad entropy {value:?}")))?)
                }
                other => return Err(perr(format!("unknown key {other:?}"))),
            }
        }
        let m = m.ok_or_else(|| Error::Parse {
            line: 0,
            message: "missing `alphabet` line".into(),
        })?;
        // Rows follow the file's leaf order; the tree lists leaves canonically.
        let tree = TreeModel::from_leaves(m, &leaves)?;
        let mut ordered = vec![Vec::new(); rows.len()];
        for (ctx, row) in leaves.iter().zip(rows) {
            let idx = tree
                .leaves()
                .iter()
                .position(|l| l == ctx)
                .expect("leaf present in tree");
            ordered[idx] = row;
        }
        let spec = ChainSpec::new(tree, ParamSet::new(m, ordered)?)?;
        Ok(ChainFile { spec, entropy })
    }
}

struct FixtureDef {
    name: &'static str,
    m: u32,
    leaves: &'static [(&'static [Symbol], &'static [f64])],
    pinned: &'static str,
}

const FIXTURES: &[FixtureDef] = &[
    FixtureDef {
        name: "iid-fair-coin",
        m: 2,
        leaves: &[(&[], &[0.5, 0.5])],
        pinned: include_str!("../fixtures/iid-fair-coin.chain"),
    },
    FixtureDef {
        name: "binary-d1",
        m: 2,
        leaves: &[(&[0], &[0.9, 0.1]), (&[1], &[0.2, 0.8])],
        pinned: include_str!("../fixtures/binary-d1.chain"),
    },
    FixtureDef {
        name: "ternary-d2",
        m: 3,
        leaves: &[
            (&[0], &[0.6, 0.3, 0.1]),
            (&[1, 0], &[0.2, 0.5, 0.3]),
            (&[1, 1], &[0.1, 0.2, 0.7]),
            (&[1, 2], &[0.45, 0.1, 0.45]),
            (&[2, 0], &[0.3, 0.3, 0.4]),
            (&[2, 1], &[0.7, 0.15, 0.15]),
            (&[2, 2], &[0.25, 0.6, 0.15]),
        ],
        pinned: include_str!("../fixtures/ternary-d2.chain"),
    },
    FixtureDef {
        name: "binary-d3-pruned",
        m: 2,
        leaves: &[
            (&[0, 0, 0], &[0.8, 0.2]),
            (&[0, 0, 1], &[0.3, 0.7]),
            (&[0, 1, 0], &[0.55, 0.45]),
            (&[0, 1, 1], &[0.1, 0.9]),
            (&[1, 0, 0], &[0.65, 0.35]),
            (&[1, 0, 1], &[0.25, 0.75]),
            (&[1, 1], &[0.9, 0.1]),
        ],
        pinned: include_str!("../fixtures/binary-d3-pruned.chain"),
    },
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

fn fixture_def(name: &str) -> Result<&'static FixtureDef> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

/// The fixture chain as defined in code, with its entropy freshly computed.
/// This is what the maintenance command writes to the pinned files.
pub fn fixture_definition(name: &str) -> Result<ChainFile> {
    let def = fixture_def(name)?;
    let leaves: Vec<Vec<Symbol>> = def.leaves.iter().map(|(c, _)| c.to_vec()).collect();
    let tree = TreeModel::from_leaves(def.m, &leaves)?;
    let rows = tree
        .leaves()
        .iter()
        .map(|l| {
            def.leaves
                .iter()
                .find(|(c, _)| *c == l.as_slice())
                .map(|(_, r)| r.to_vec())
                .expect("leaf defined")
        })
        .collect();
    let spec = ChainSpec::new(tree, ParamSet::new(def.m, rows)?)?;
    let entropy = entropy_rate_exact(&spec)?;
    Ok(ChainFile {
        spec,
        entropy: Some(entropy),
    })
}

/// A documented fixture chain with its pinned entropy rate.
pub fn fixture_chain(name: &str) -> Result<ChainFile> {
    let def = fixture_def(name)?;
    let file = ChainFile::parse(def.pinned)?;
    if file.entropy.is_none() {
        return Err(Error::Internal(format!("fixture {name} has no pinned entropy")));
    }
    Ok(file)
}

/// Random chain: each node below `max_depth` splits with probability 1/2 and
/// leaf parameters come from a symmetric Dirichlet with the given
/// concentration. Every parameter is strictly positive.
pub fn random_chain(m: u32, max_depth: usize, concentration: f64, seed: u64) -> Result<ChainSpec> {
    if m < 2 {
        return Err(Error::InvalidAlphabet(m as u64));
    }
    if !(concentration > 0.0 && concentration.is_finite()) {
        return Err(Error::InvalidConfig(format!("concentration must be positive, got {concentration}")));
    }
    let mut rng = rng::stream(seed, Domain::RandomChain, 0);
    let tree = TreeModel::grow(m, |ctx| ctx.len() < max_depth && rng.random::<f64>() < 0.5);
    let alpha = vec![concentration; m as usize];
    let mut theta = Vec::with_capacity(tree.leaf_count() * m as usize);
    let mut row = Vec::with_capacity(m as usize);
    for _ in 0..tree.leaf_count() {
        row.clear();
        sample_dirichlet(&alpha, &mut rng, &mut row);
        if row.iter().any(|&p| p <= 0.0) {
            for p in row.iter_mut() {
                *p = p.max(f64::MIN_POSITIVE);
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
        }
        theta.push(row.clone());
    }
    ChainSpec::new(tree, ParamSet::new(m, theta)?)
}
