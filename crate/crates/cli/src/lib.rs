//! Argument parsing and command dispatch for the `eetreat` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use eetreat::io::{
    self, format_number, peek_header, read_bounds, read_draws, read_incomes, read_prospect,
    read_states, write_agreement, write_assignments, write_regret_profile, write_rows,
    write_summaries, SummaryRecord, BOUNDS_HEADER,
};
use eetreat::{
    assign_all, bayes_binary, bayes_rule, bounds_regret_profile, finite_sample_sim, maximin_binary,
    maximin_rule, minimax_regret_binary, minimax_regret_rule, plugin_rule, rank_prospects,
    regret_profile, summarize_posterior, tau_pair, BinaryOutcomeSpec, BinaryProblem, EeBounds,
    Evaluator, Prior, Representation, RuleResult, SimConfig, StateSet, WelfareSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Egalitarian equivalent of each row of an income CSV.
    Ee,
    /// Rank prospect CSVs by expected score under a prior.
    Rank,
    /// Bayes, maximin and minimax-regret rules for a states CSV (or a
    /// bounds CSV, handled as `bounds`).
    Assign,
    /// Status quo versus innovation with binary outcomes.
    Binary,
    /// Minimax-regret assignment for each row of a bounds CSV.
    Bounds,
    /// Posterior summaries from a draws CSV.
    MetaSummarize,
    /// Finite-sample agreement of the plug-in rule from a JSON config.
    MetaSimulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepresentationArg {
    Ee,
    TransformedMean,
    RawMean,
}

impl From<RepresentationArg> for Representation {
    fn from(r: RepresentationArg) -> Self {
        match r {
            RepresentationArg::Ee => Representation::EgalitarianEquivalent,
            RepresentationArg::TransformedMean => Representation::TransformedMean,
            RepresentationArg::RawMean => Representation::RawMean,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eetreat",
    version,
    about = "Treatment choice with inequality-averse welfare"
)]
struct Args {
    command: Command,

    /// Inequality aversion γ ≥ 0.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,

    /// Input file; repeat for `rank`.
    #[arg(long)]
    input: Vec<PathBuf>,

    /// Output CSV (standard output when omitted).
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Number of δ points for regret curves.
    #[arg(long)]
    grid: Option<usize>,

    /// Comma-separated prior weights over states (uniform when omitted).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    prior: Option<Vec<f64>>,

    #[arg(long, allow_negative_numbers = true)]
    p_low: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    p_high: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    p_a: Option<f64>,

    /// Comma-separated candidate success shares of the innovation.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,1",
        allow_negative_numbers = true
    )]
    p_b: Vec<f64>,

    #[arg(long, value_enum, default_value = "ee")]
    representation: RepresentationArg,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub gamma: f64,
    /// Whether `--gamma` was given explicitly.
    pub gamma_set: bool,
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub prior: Option<Vec<f64>>,
    pub p_low: Option<f64>,
    pub p_high: Option<f64>,
    pub p_a: Option<f64>,
    pub p_b: Vec<f64>,
    pub representation: Representation,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Core(#[from] eetreat::Error),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    /// 2 for usage and validation errors, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Core(e) if e.is_solver() => 3,
            _ => 2,
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    let mut cmd = <Args as clap::CommandFactory>::command();
    CliError::Usage(cmd.error(clap::error::ErrorKind::ValueValidation, msg))
}

/// Parses arguments (without the program name) into a [`RunConfig`].
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(
        std::iter::once(OsString::from("eetreat")).chain(argv.into_iter().map(Into::into)),
    )?;
    let gamma = args.gamma.unwrap_or(0.0);
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(usage(format!(
            "--gamma must be a nonnegative number, got {gamma}"
        )));
    }
    if args.command != Command::Binary && args.input.is_empty() {
        let name = args
            .command
            .to_possible_value()
            .expect("no skipped variants");
        return Err(usage(format!("{} requires --input", name.get_name())));
    }
    if args.input.iter().any(|p| p.as_os_str().is_empty()) {
        return Err(usage("--input must not be empty"));
    }
    if args.command == Command::Rank && args.input.len() < 2 {
        return Err(usage("rank needs at least two --input prospects"));
    }
    if args.command != Command::Rank && args.input.len() > 1 {
        return Err(usage("only rank accepts more than one --input"));
    }
    if args.command == Command::Binary
        && (args.p_low.is_none() || args.p_high.is_none() || args.p_a.is_none())
    {
        return Err(usage("binary requires --p-low, --p-high and --p-a"));
    }
    if let Some(g) = args.grid {
        if g < 2 {
            return Err(usage("--grid must be at least 2"));
        }
        if args.output.is_none() {
            return Err(usage(
                "--grid writes files next to --output, which is required",
            ));
        }
    }
    Ok(RunConfig {
        command: args.command,
        gamma,
        gamma_set: args.gamma.is_some(),
        inputs: args.input,
        output: args.output,
        seed: args.seed,
        grid: args.grid,
        prior: args.prior,
        p_low: args.p_low,
        p_high: args.p_high,
        p_a: args.p_a,
        p_b: args.p_b,
        representation: args.representation.into(),
    })
}

/// `<output stem>_<tag>.csv` in the output's directory.
fn sibling(output: &Path, tag: &str) -> PathBuf {
    let stem = io::stem(output);
    output.with_file_name(format!("{stem}_{tag}.csv"))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |path: &Path, source| {
        CliError::Core(eetreat::Error::Io {
            path: path.to_owned(),
            source,
        })
    };
    match path {
        Some(p) => File::create(p)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|e| io_err(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn prior_for(config: &RunConfig, states: usize) -> Result<Prior, CliError> {
    Ok(match &config.prior {
        Some(w) => Prior::new(w.clone())?,
        None => Prior::uniform(states)?,
    })
}

fn rule_fields(r: &RuleResult) -> Vec<String> {
    vec![
        r.criterion.to_string(),
        format_number(r.delta),
        format_number(r.value),
        r.synthetic.to_string(),
    ]
}

const RULE_HEADER: [&str; 5] = ["evaluator", "criterion", "delta", "value", "synthetic"];

fn run_ee(config: &RunConfig, spec: &WelfareSpec, out: &mut Vec<u8>) -> Result<(), CliError> {
    let rows = read_incomes(&config.inputs[0])?
        .iter()
        .enumerate()
        .map(|(i, y)| {
            Ok(vec![
                (i + 1).to_string(),
                y.len().to_string(),
                format_number(y.mean()),
                format_number(spec.ee(y)?),
            ])
        })
        .collect::<Result<Vec<_>, eetreat::Error>>()?;
    write_rows(out, &["row", "n", "mean", "ee"], rows)?;
    Ok(())
}

fn run_rank(config: &RunConfig, spec: &WelfareSpec, out: &mut Vec<u8>) -> Result<(), CliError> {
    let prospects = config
        .inputs
        .iter()
        .map(|p| read_prospect(p))
        .collect::<Result<Vec<_>, _>>()?;
    let prior = prior_for(config, prospects[0].states())?;
    let ranked = rank_prospects(&prospects, spec, config.representation, &prior)?;
    let rows = ranked
        .iter()
        .enumerate()
        .map(|(i, r)| vec![(i + 1).to_string(), r.name.clone(), format_number(r.score)])
        .collect();
    write_rows(out, &["rank", "prospect", "score"], rows)?;
    Ok(())
}

fn run_bounds(config: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let mut rows = read_bounds(&config.inputs[0])?;
    if config.gamma_set {
        rows.retain(|b| b.gamma == config.gamma);
        if rows.is_empty() {
            return Err(usage(format!(
                "{}: no bounds rows with gamma = {}",
                config.inputs[0].display(),
                config.gamma
            )));
        }
    }
    write_assignments(&mut *out, &assign_all(&rows)?)?;
    if let (Some(grid), Some(output)) = (config.grid, &config.output) {
        for b in &rows {
            write_curve(output, b, grid)?;
        }
    }
    Ok(())
}

fn write_curve(output: &Path, b: &EeBounds, grid: usize) -> Result<(), CliError> {
    let tag = format!("{}_gamma{}_regret", b.scheme, b.gamma);
    let mut buf = Vec::new();
    write_regret_profile(&mut buf, &bounds_regret_profile(b, grid)?)?;
    emit(Some(&sibling(output, &tag)), &buf)
}

fn run_assign(config: &RunConfig, spec: &WelfareSpec, out: &mut Vec<u8>) -> Result<(), CliError> {
    let header = peek_header(&config.inputs[0])?;
    if header.iter().map(String::as_str).eq(BOUNDS_HEADER) {
        return run_bounds(config, out);
    }
    let ss = StateSet::new(read_states(&config.inputs[0])?)?;
    let prior = prior_for(config, ss.len())?;
    let rows = vec![
        rule_fields(&bayes_rule(spec, &ss, &prior)?),
        rule_fields(&maximin_rule(spec, &ss)?),
        rule_fields(&minimax_regret_rule(spec, &ss)?),
    ];
    write_rows(out, &RULE_HEADER[1..], rows)?;
    if let (Some(grid), Some(output)) = (config.grid, &config.output) {
        let mut buf = Vec::new();
        write_regret_profile(&mut buf, &regret_profile(spec, &ss, grid)?)?;
        emit(Some(&sibling(output, "regret")), &buf)?;
    }
    Ok(())
}

fn run_binary(config: &RunConfig, spec: &WelfareSpec, out: &mut Vec<u8>) -> Result<(), CliError> {
    let (Some(p_low), Some(p_high), Some(p_a)) = (config.p_low, config.p_high, config.p_a) else {
        return Err(usage("binary requires --p-low, --p-high and --p-a"));
    };
    let outcome = BinaryOutcomeSpec::new(p_low, p_high, *spec)?;
    let problem = BinaryProblem::new(outcome, p_a, config.p_b.clone())?;
    let prior = prior_for(config, problem.p_b_states.len())?;
    let mut rows = Vec::new();
    for ev in [Evaluator::Neutral, Evaluator::Averse] {
        for r in [
            bayes_binary(&problem, &prior, ev)?,
            maximin_binary(&problem, ev)?,
            minimax_regret_binary(&problem, ev)?,
        ] {
            let mut row = vec![ev.label().to_owned()];
            row.extend(rule_fields(&r));
            rows.push(row);
        }
    }
    write_rows(out, &RULE_HEADER, rows)?;
    Ok(())
}

fn run_meta_summarize(
    config: &RunConfig,
    spec: &WelfareSpec,
    out: &mut Vec<u8>,
) -> Result<(), CliError> {
    let records = read_draws(&config.inputs[0])?
        .iter()
        .map(|d| {
            let s = summarize_posterior(spec, d)?;
            let centre = d.posterior_mean();
            let at_mean = tau_pair(spec, &centre);
            Ok(SummaryRecord {
                bayes_delta: s.bayes_delta(),
                plugin_delta: plugin_rule(spec, &centre)?.delta,
                site: s.site,
                mean_tau: s.mean_tau,
                prob_tau_pos: s.prob_tau_pos,
                mean_tau_ee: s.mean_tau_ee,
                prob_tau_ee_pos: s.prob_tau_ee_pos,
                tau_at_mean: at_mean.tau,
                tau_ee_at_mean: at_mean.tau_ee,
            })
        })
        .collect::<Result<Vec<_>, eetreat::Error>>()?;
    write_summaries(out, &records)?;
    Ok(())
}

fn run_meta_simulate(config: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let path = &config.inputs[0];
    let file = File::open(path).map_err(|source| eetreat::Error::Io {
        path: path.clone(),
        source,
    })?;
    let sim: SimConfig = serde_json::from_reader(file).map_err(|source| CliError::Json {
        path: path.clone(),
        source,
    })?;
    let gamma = if config.gamma_set {
        config.gamma
    } else {
        sim.gamma.unwrap_or(config.gamma)
    };
    let spec = WelfareSpec::new(gamma)?;
    let seed = config.seed.unwrap_or(sim.seed);
    let rows = finite_sample_sim(&spec, &sim.truth, &sim.sample_sizes, sim.replications, seed)?;
    write_agreement(out, &rows)?;
    Ok(())
}

/// Executes one command, writing its CSV to the configured output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let spec = WelfareSpec::new(config.gamma)?;
    let mut out = Vec::new();
    match config.command {
        Command::Ee => run_ee(config, &spec, &mut out)?,
        Command::Rank => run_rank(config, &spec, &mut out)?,
        Command::Assign => run_assign(config, &spec, &mut out)?,
        Command::Binary => run_binary(config, &spec, &mut out)?,
        Command::Bounds => run_bounds(config, &mut out)?,
        Command::MetaSummarize => run_meta_summarize(config, &spec, &mut out)?,
        Command::MetaSimulate => run_meta_simulate(config, &mut out)?,
    }
    emit(config.output.as_deref(), &out)
}
