use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bct_core::baselines::{lz_estimate, plugin_estimate, ppm_estimate};
use bct_core::ctw::{ctw_entropy_estimate, ContextTree, PriorConfig};
use bct_core::entropy::{entropy_rate_exact, EntropyPolicy};
use bct_core::pipeline::{bct_posterior, bct_prior, BctOptions, BctPosterior};
use bct_core::rng::derive_seed;
use bct_core::sequence::{parse_sequence, parse_values, quantize_ternary, SeparatorPolicy};
use bct_core::simulator::{fixture_chain, fixture_definition, fixture_names, generate, ChainFile, SimulationRequest};
use bct_core::Sequence;
use clap::{Args, ValueEnum};
use rayon::prelude::*;

use crate::config::{CommonArgs, Estimator, RunConfig};
use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum InputFormat {
    /// Symbol text (contiguous digits or separated integers).
    #[default]
    Symbols,
    /// One real value per line, quantized to down/same/up (m = 3).
    Values,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Layout {
    #[default]
    Auto,
    Contiguous,
    Delimited,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Sequence file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Symbols)]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value_t = Layout::Auto)]
    pub layout: Layout,
    /// Initial context (chronological symbol text of exactly D symbols). When
    /// absent, the first D symbols of the input are used as context.
    #[arg(long)]
    pub context: Option<String>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Alphabet implied by the input format, if any.
fn implied_alphabet(input: &InputArgs) -> Option<u32> {
    (input.format == InputFormat::Values).then_some(3)
}

fn load_sequence(input: &InputArgs, cfg: &RunConfig) -> Result<Sequence, CliError> {
    let text = read_text(&input.input)?;
    let layout = match input.layout {
        Layout::Auto => SeparatorPolicy::Auto,
        Layout::Contiguous => SeparatorPolicy::Contiguous,
        Layout::Delimited => SeparatorPolicy::Delimited,
    };
    let seq = match input.format {
        InputFormat::Symbols => parse_sequence(&text, cfg.alphabet, layout)?,
        InputFormat::Values => {
            if cfg.alphabet != 3 {
                return Err(CliError::Usage("value input is quantized to an alphabet of 3".into()));
            }
            quantize_ternary(&parse_values(&text)?)?
        }
    };
    match &input.context {
        Some(ctx) => {
            let ctx = parse_sequence(ctx, cfg.alphabet, layout)?;
            Ok(seq.with_context(ctx.symbols().to_vec())?)
        }
        None => Ok(seq),
    }
}

fn prior_config(cfg: &RunConfig) -> Result<PriorConfig, CliError> {
    Ok(PriorConfig::new(cfg.alphabet, cfg.depth, cfg.beta)?)
}

fn bct_options(cfg: &RunConfig) -> BctOptions {
    BctOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        policy: EntropyPolicy {
            mc_length: cfg.mc_length,
            ..EntropyPolicy::default()
        },
        level: cfg.level,
        bins: cfg.bins,
    }
}

/// One line of an estimator comparison.
#[derive(Debug, Clone)]
pub struct EstimateRow {
    pub name: String,
    pub value: f64,
    pub std_dev: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub note: String,
}

enum Job {
    Bct,
    Ctw,
    Ppm,
    Lz,
    Plugin(usize),
}

/// Run the selected estimators on a sequence. Baselines see every symbol;
/// BCT and CTW condition on the initial context.
pub fn run_estimators(seq: &Sequence, cfg: &RunConfig) -> Result<(Vec<EstimateRow>, Option<BctPosterior>), CliError> {
    let mut jobs = Vec::new();
    for e in &cfg.estimators {
        match e {
            Estimator::Bct => jobs.push(Job::Bct),
            Estimator::Ctw => jobs.push(Job::Ctw),
            Estimator::Ppm => jobs.push(Job::Ppm),
            Estimator::Lz => jobs.push(Job::Lz),
            Estimator::Plugin => jobs.extend(cfg.plugin_k.iter().map(|&k| Job::Plugin(k))),
        }
    }
    let prior = prior_config(cfg)?;
    let results: Vec<Result<(EstimateRow, Option<BctPosterior>), CliError>> = jobs
        .par_iter()
        .map(|job| {
            let row = |name: String, value: f64, note: &str| EstimateRow {
                name,
                value,
                std_dev: None,
                lower: None,
                upper: None,
                note: note.to_string(),
            };
            Ok(match job {
                Job::Bct => {
                    let post = bct_posterior(seq, prior, &bct_options(cfg))?;
                    let s = &post.summary;
                    let r = EstimateRow {
                        name: "bct".into(),
                        value: s.mean,
                        std_dev: Some(s.std_dev),
                        lower: Some(s.lower),
                        upper: Some(s.upper),
                        note: "posterior mean".into(),
                    };
                    (r, Some(post))
                }
                Job::Ctw => (row("ctw".into(), ctw_entropy_estimate(seq, prior)?, "-log P_w / n"), None),
                Job::Ppm => (
                    row(
                        "ppm".into(),
                        ppm_estimate(seq, cfg.depth)?,
                        "interpolated escape blend (reconstruction)",
                    ),
                    None,
                ),
                Job::Lz => (
                    row(
                        "lz".into(),
                        lz_estimate(seq.symbols())?,
                        "increasing window mean(L_i/log i)^-1, n0=max(2,ceil(n/10)) (reconstruction)",
                    ),
                    None,
                ),
                Job::Plugin(k) => (
                    row(format!("plugin_k{k}"), plugin_estimate(seq.symbols(), *k)?, "overlapping blocks"),
                    None,
                ),
            })
        })
        .collect();
    let mut rows = Vec::new();
    let mut bct = None;
    for r in results {
        let (row, post) = r?;
        rows.push(row);
        if post.is_some() {
            bct = post;
        }
    }
    Ok((rows, bct))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn data_section(out: &mut String, seq: &Sequence, cfg: &RunConfig) {
    let consumed = seq.initial_context().is_none();
    let modeled = if consumed { seq.len().saturating_sub(cfg.depth) } else { seq.len() };
    let _ = writeln!(out, "[data]");
    let _ = writeln!(out, "symbols = {}", seq.len());
    let _ = writeln!(
        out,
        "initial_context = {}",
        if consumed { "first D symbols of input" } else { "given" }
    );
    let _ = writeln!(out, "modeled_symbols = {modeled}");
    let _ = writeln!(out, "units = nats");
}

fn header(command: &str, source: &str, cfg: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(out, "command = {command}");
    let _ = writeln!(out, "[config]");
    let _ = writeln!(out, "source = {source}");
    out.push_str(&cfg.echo());
    out
}

fn fill_section(out: &mut String, post: &BctPosterior) {
    let _ = writeln!(out, "[bct]");
    let _ = writeln!(out, "entropy_exact = {}", post.fill.exact);
    let _ = writeln!(out, "entropy_mc = {}", post.fill.monte_carlo);
    let _ = writeln!(out, "entropy_failed = {}", post.fill.failed);
    if let Some(e) = &post.fill.first_error {
        let _ = writeln!(out, "first_error = {e}");
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve(implied_alphabet(&args.input))?;
    let seq = load_sequence(&args.input, &cfg)?;
    let (rows, bct) = run_estimators(&seq, &cfg)?;
    let mut out = header("estimate", &args.input.input.display().to_string(), &cfg);
    data_section(&mut out, &seq, &cfg);
    let _ = writeln!(out, "[estimates]");
    let _ = writeln!(out, "estimator,value,std_dev,credible_lower,credible_upper,note");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.name,
            r.value,
            opt(r.std_dev),
            opt(r.lower),
            opt(r.upper),
            r.note
        );
    }
    if let Some(post) = &bct {
        fill_section(&mut out, post);
    }
    match &args.out {
        Some(path) => write_file(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output prefix: writes PREFIX.summary.txt and PREFIX.hist.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write every sample to PREFIX.samples.tsv.
    #[arg(long)]
    pub dump_samples: bool,
}

fn write_posterior(prefix: &Path, mut doc: String, post: &BctPosterior, dump: bool) -> Result<(), CliError> {
    fill_section(&mut doc, post);
    let _ = writeln!(doc, "[summary]");
    doc.push_str(&post.summary.to_document());
    write_file(&with_suffix(prefix, ".summary.txt"), &doc)?;
    write_file(&with_suffix(prefix, ".hist.csv"), &post.summary.histogram_csv())?;
    if dump {
        write_file(&with_suffix(prefix, ".samples.tsv"), &post.samples.to_records())?;
    }
    Ok(())
}

pub fn cmd_posterior(args: &PosteriorArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve(implied_alphabet(&args.input))?;
    let seq = load_sequence(&args.input, &cfg)?;
    let post = bct_posterior(&seq, prior_config(&cfg)?, &bct_options(&cfg))?;
    let mut doc = header("posterior", &args.input.input.display().to_string(), &cfg);
    data_section(&mut doc, &seq, &cfg);
    write_posterior(&args.out, doc, &post, args.dump_samples)
}

#[derive(Debug, Args)]
pub struct PriorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output prefix: writes PREFIX.summary.txt and PREFIX.hist.csv.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub dump_samples: bool,
}

pub fn cmd_prior(args: &PriorArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve(None)?;
    let post = bct_prior(prior_config(&cfg)?, &bct_options(&cfg))?;
    let doc = header("prior", "none", &cfg);
    write_posterior(&args.out, doc, &post, args.dump_samples)
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Chain specification file.
    #[arg(long, conflicts_with = "fixture")]
    pub spec: Option<PathBuf>,
    /// Built-in fixture chain name.
    #[arg(long)]
    pub fixture: Option<String>,
}

impl ChainArgs {
    /// The chain, its source label and its true entropy rate.
    fn load(&self) -> Result<(ChainFile, String, f64), CliError> {
        match (&self.spec, &self.fixture) {
            (Some(path), None) => {
                let file = ChainFile::parse(&read_text(path)?)?;
                let truth = match file.entropy {
                    Some(h) => h,
                    None => entropy_rate_exact(&file.spec)?,
                };
                Ok((file, format!("spec:{}", path.display()), truth))
            }
            (None, Some(name)) => {
                let file = fixture_chain(name)?;
                let truth = file.entropy.expect("fixtures are pinned");
                Ok((file, format!("fixture:{name}"), truth))
            }
            _ => Err(CliError::Usage("exactly one of --spec or --fixture is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Number of symbols to generate.
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sequence file; the sidecar goes to OUT.meta.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let (file, source, truth) = args.chain.load()?;
    let req = SimulationRequest::new(file.spec.clone(), args.length, args.seed);
    let g = generate(&req)?;
    write_file(&args.out, &g.sequence().to_text())?;
    let mut meta = String::new();
    let _ = writeln!(meta, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(meta, "source = {source}");
    let _ = writeln!(meta, "seed = {}", args.seed);
    let _ = writeln!(meta, "length = {}", args.length);
    let ctx: Vec<String> = g.context.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(meta, "realized_context = {}", ctx.join(","));
    let _ = writeln!(meta, "true_entropy = {truth}");
    let _ = writeln!(meta, "[chain]");
    meta.push_str(&file.to_text());
    write_file(&with_suffix(&args.out, ".meta"), &meta)
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated sequence lengths.
    #[arg(long, default_value = "1000,10000")]
    pub grid: String,
    /// Replicates (independent data seeds) per length.
    #[arg(long, default_value_t = 10)]
    pub replicates: u64,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let (file, _source, truth) = args.chain.load()?;
    let cfg = args.common.resolve(Some(file.spec.alphabet_size()))?;
    if cfg.alphabet != file.spec.alphabet_size() {
        return Err(CliError::Usage("--alphabet does not match the chain".into()));
    }
    let grid: Vec<usize> = args
        .grid
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad grid value {t:?}"))))
        .collect::<Result<_, _>>()?;
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    let mut out = String::from("n,replicate,estimator,value,abs_error\n");
    for &n in &grid {
        let mut per_estimator: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
        for r in 0..args.replicates {
            let data_seed = derive_seed(cfg.seed, n as u64 * 1_000_003 + r);
            let g = generate(&SimulationRequest::new(file.spec.clone(), n, data_seed))?;
            let run_cfg = RunConfig {
                seed: derive_seed(data_seed, 1),
                ..cfg.clone()
            };
            let (rows, _) = run_estimators(&g.sequence(), &run_cfg)?;
            for row in rows {
                let err = (row.value - truth).abs();
                let _ = writeln!(out, "{n},{r},{},{},{}", row.name, row.value, err);
                match per_estimator.iter_mut().find(|(name, _, _)| *name == row.name) {
                    Some((_, v, e)) => {
                        v.push(row.value);
                        e.push(err);
                    }
                    None => per_estimator.push((row.name.clone(), vec![row.value], vec![err])),
                }
            }
        }
        for (name, mut values, mut errors) in per_estimator {
            let _ = writeln!(out, "{n},median,{name},{},{}", median(&mut values), median(&mut errors));
        }
    }
    write_file(&args.out, &out)
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Regenerate the pinned fixture files into this directory.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

pub fn cmd_fixtures(args: &FixturesArgs) -> Result<(), CliError> {
    for name in fixture_names() {
        let file = fixture_definition(name)?;
        match &args.write {
            Some(dir) => write_file(&dir.join(format!("{name}.chain")), &file.to_text())?,
            None => println!("{name}\tm={}\tdepth={}\tentropy={}", file.spec.alphabet_size(), file.spec.depth(), file.entropy.unwrap_or(f64::NAN)),
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct DumpTreeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn cmd_dump_tree(args: &DumpTreeArgs) -> Result<(), CliError> {
    let cfg = args.common.resolve(implied_alphabet(&args.input))?;
    let seq = load_sequence(&args.input, &cfg)?;
    let tree = ContextTree::new(&seq, prior_config(&cfg)?)?;
    print!("{}", tree.dump());
    Ok(())
}
