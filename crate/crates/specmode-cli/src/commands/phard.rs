//! `specmode phard` subcommands.

use specmode::{
    p_hard_exact_with_budget, p_hard_iid_exact, p_hard_lower_bound_fidelity,
    p_hard_lower_bound_mixed, p_hard_monte_carlo, HardnessQuery, Method, MixtureWeights, TailBound,
    DEFAULT_ENUMERATION_BUDGET, MONTE_CARLO_RNG,
};

use crate::config::{load_json, merged, require, PhardConfig};
use crate::report::{chosen_format, write_output, PhardReport};
use crate::{map_hardness_error, CliError, CommonOpts, OutputFormat, PhardVerb};

pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0;

pub fn run(verb: PhardVerb) -> Result<(), CliError> {
    match verb {
        PhardVerb::Exact(opts) => exact(&opts),
        PhardVerb::Iid(opts) => iid(&opts),
        PhardVerb::Mc(opts) => monte_carlo(&opts),
        PhardVerb::BoundPurity(opts) => bound_purity(&opts),
        PhardVerb::BoundFidelity(opts) => bound_fidelity(&opts),
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::ExactEnumeration => "ExactEnumeration",
        Method::ClosedFormIID => "ClosedFormIID",
        Method::MonteCarlo => "MonteCarlo",
    }
}

fn base_report(command: &str, n: usize, n_hard: usize) -> PhardReport {
    PhardReport {
        command: command.to_string(),
        method: String::new(),
        p_hard: None,
        lower_bound: None,
        std_error: None,
        seed: None,
        samples: None,
        rng: None,
        n,
        n_hard,
        epsilon: None,
        exceeds_epsilon: None,
        empty_event: None,
        disclaimer: crate::HARDNESS_DISCLAIMER.to_string(),
    }
}

fn build_query(opts: &CommonOpts, config: &PhardConfig) -> Result<HardnessQuery, CliError> {
    let photons = require(
        config.resolve_photons()?,
        "photons (or wavepackets + basis)",
    )?;
    let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
    let epsilon = require(merged(opts.epsilon, config.epsilon), "epsilon")?;
    HardnessQuery::new(photons, n_hard, epsilon).map_err(map_hardness_error)
}

fn exact(opts: &CommonOpts) -> Result<(), CliError> {
    let config: PhardConfig = load_json(opts.config.as_deref())?;
    let query = build_query(opts, &config)?;
    let budget = merged(opts.budget, config.budget).unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    let result = p_hard_exact_with_budget(&query, budget).map_err(map_hardness_error)?;
    let mut report = base_report("phard exact", query.n(), query.n_hard());
    report.method = method_name(result.method).to_string();
    report.p_hard = Some(result.p_hard);
    report.epsilon = Some(query.epsilon());
    report.exceeds_epsilon = Some(result.p_hard > query.epsilon());
    emit(opts, &report)
}

fn iid(opts: &CommonOpts) -> Result<(), CliError> {
    let config: PhardConfig = load_json(opts.config.as_deref())?;
    let weights = require(config.weights.clone(), "weights")?;
    let weights = MixtureWeights::new(weights).map_err(|e| CliError::config(e.to_string()))?;
    let n = require(merged(opts.n, config.n), "n")?;
    let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
    let epsilon = merged(opts.epsilon, config.epsilon);
    let result = p_hard_iid_exact(n, n_hard, &weights).map_err(map_hardness_error)?;
    let mut report = base_report("phard iid", n, n_hard);
    report.method = method_name(result.method).to_string();
    report.p_hard = Some(result.p_hard);
    report.epsilon = epsilon;
    report.exceeds_epsilon = epsilon.map(|e| result.p_hard > e);
    emit(opts, &report)
}

fn monte_carlo(opts: &CommonOpts) -> Result<(), CliError> {
    let config: PhardConfig = load_json(opts.config.as_deref())?;
    let query = build_query(opts, &config)?;
    let samples = merged(opts.samples, config.samples).unwrap_or(DEFAULT_MC_SAMPLES);
    let seed = opts.merged_seed(config.seed).unwrap_or(DEFAULT_SEED);
    let result = p_hard_monte_carlo(&query, samples, seed).map_err(map_hardness_error)?;
    let mut report = base_report("phard mc", query.n(), query.n_hard());
    report.method = method_name(result.method).to_string();
    report.p_hard = Some(result.p_hard);
    report.std_error = result.std_error;
    report.seed = Some(seed);
    report.samples = Some(samples);
    report.rng = Some(MONTE_CARLO_RNG.to_string());
    report.epsilon = Some(query.epsilon());
    report.exceeds_epsilon = Some(result.p_hard > query.epsilon());
    emit(opts, &report)
}

fn bound_purity(opts: &CommonOpts) -> Result<(), CliError> {
    let config: PhardConfig = load_json(opts.config.as_deref())?;
    let purity = require(merged(opts.purity, config.purity), "purity")?;
    let n = require(merged(opts.n, config.n), "n")?;
    let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
    let bound = p_hard_lower_bound_mixed(purity, n, n_hard).map_err(map_hardness_error)?;
    let epsilon = merged(opts.epsilon, config.epsilon);
    emit_bound(
        opts,
        "phard bound-purity",
        "LowerBoundPurity",
        n,
        n_hard,
        bound,
        epsilon,
    )
}

fn bound_fidelity(opts: &CommonOpts) -> Result<(), CliError> {
    let config: PhardConfig = load_json(opts.config.as_deref())?;
    let f_min = require(merged(opts.fmin, config.f_min), "fmin")?;
    let n = require(merged(opts.n, config.n), "n")?;
    let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
    let bound = p_hard_lower_bound_fidelity(f_min, n, n_hard).map_err(map_hardness_error)?;
    let epsilon = merged(opts.epsilon, config.epsilon);
    emit_bound(
        opts,
        "phard bound-fidelity",
        "LowerBoundFidelity",
        n,
        n_hard,
        bound,
        epsilon,
    )
}

fn emit_bound(
    opts: &CommonOpts,
    command: &str,
    method: &str,
    n: usize,
    n_hard: usize,
    bound: TailBound,
    epsilon: Option<f64>,
) -> Result<(), CliError> {
    let mut report = base_report(command, n, n_hard);
    report.method = method.to_string();
    report.lower_bound = Some(bound.value);
    report.empty_event = Some(bound.empty_event);
    report.epsilon = epsilon;
    report.exceeds_epsilon = epsilon.map(|e| bound.value > e);
    emit(opts, &report)
}

fn emit(opts: &CommonOpts, report: &PhardReport) -> Result<(), CliError> {
    let format = chosen_format(opts, OutputFormat::Json);
    write_output(opts, &report.render(format)?)
}
