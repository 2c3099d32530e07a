//! `specmode simulate` subcommands.

use num_complex::Complex64;
use specmode::sim::CostEstimate;
use specmode::{
    output_distribution, spatial_distribution_mixed, spatial_distribution_mixed_enlarged,
    spatial_distribution_pure, OutputConfiguration, PhotonSource, SpectralAmplitudes,
    UnitaryMatrix,
};

use crate::config::{load_json, merged, require, resolve_unitary, SimulateConfig, UnitarySpec};
use crate::report::{chosen_format, write_output, DistributionReport, HomReport};
use crate::{map_sim_error, CliError, CommonOpts, OutputFormat, SimulateVerb};

pub fn run(verb: SimulateVerb) -> Result<(), CliError> {
    match verb {
        SimulateVerb::Ideal(opts) => ideal(&opts),
        SimulateVerb::Pure(opts) => pure(&opts),
        SimulateVerb::Mixed(opts) => mixed(&opts),
        SimulateVerb::Hom(opts) => hom(&opts),
    }
}

/// Mode count: explicit m, else the m = n² heuristic for hard instances.
fn default_modes(opts: &CommonOpts, config: &SimulateConfig, n: usize) -> usize {
    merged(opts.m, config.m).unwrap_or(n * n)
}

/// Networks read from a file or inline matrix fix the mode count
/// themselves; generated ones adopt the requested size.
fn network_for(
    config: &SimulateConfig,
    opts: &CommonOpts,
    m: usize,
) -> Result<UnitaryMatrix, CliError> {
    let u = resolve_unitary(config.unitary.as_ref(), m, opts.seed)?;
    if u.dim() != m {
        return Err(CliError::config(format!(
            "network has {} modes but the run needs {m}",
            u.dim()
        )));
    }
    Ok(u)
}

fn ideal(opts: &CommonOpts) -> Result<(), CliError> {
    let config: SimulateConfig = load_json(opts.config.as_deref())?;
    let (input, m) = match (&config.input, merged(opts.n, None)) {
        (Some(counts), _) => {
            let input = OutputConfiguration::new(counts.clone()).map_err(map_sim_error)?;
            let m = input.modes();
            if let Some(requested) = merged(opts.m, config.m) {
                if requested != m {
                    return Err(CliError::config(format!(
                        "input has {m} modes but m = {requested} was requested"
                    )));
                }
            }
            (input, m)
        }
        (None, Some(n)) => {
            let m = default_modes(opts, &config, n);
            (
                OutputConfiguration::first_modes(n, m).map_err(map_sim_error)?,
                m,
            )
        }
        (None, None) => {
            return Err(CliError::config("provide an input configuration or --n"));
        }
    };
    let u = network_for(&config, opts, m)?;
    let n = input.total_photons();
    report_cost(CostEstimate::ideal(m, n));
    let dist = output_distribution(&u, &input).map_err(map_sim_error)?;
    let report = DistributionReport::from_distribution("simulate ideal", n, &dist);
    emit(opts, &report)
}

fn pure(opts: &CommonOpts) -> Result<(), CliError> {
    let config: SimulateConfig = load_json(opts.config.as_deref())?;
    let photons = require(
        config.resolve_photons()?,
        "photons (or wavepackets + basis)",
    )?;
    if photons.is_empty() {
        return Err(CliError::config("photon list must not be empty"));
    }
    let n = photons.len();
    let b = photons
        .iter()
        .map(PhotonSource::basis_size)
        .max()
        .unwrap_or(1);
    let m = default_modes(opts, &config, n);
    let u = network_for(&config, opts, m)?;
    report_cost(CostEstimate::enlarged(m, n, b));
    let dist = spatial_distribution_pure(&u, &photons).map_err(map_sim_error)?;
    let report = DistributionReport::from_distribution("simulate pure", n, &dist);
    emit(opts, &report)
}

fn mixed(opts: &CommonOpts) -> Result<(), CliError> {
    let config: SimulateConfig = load_json(opts.config.as_deref())?;
    let photons = require(config.photons.clone(), "photons")?;
    if photons.is_empty() {
        return Err(CliError::config("photon list must not be empty"));
    }
    let n = photons.len();
    let b = photons
        .iter()
        .map(PhotonSource::basis_size)
        .max()
        .unwrap_or(1);
    let m = default_modes(opts, &config, n);
    let u = network_for(&config, opts, m)?;
    report_cost(CostEstimate::enlarged(m, n, b));
    let dist = spatial_distribution_mixed(&u, &photons).map_err(map_sim_error)?;
    let mut report = DistributionReport::from_distribution("simulate mixed", n, &dist);

    let check_oracle = opts.oracle || config.oracle.unwrap_or(false);
    if check_oracle {
        let enlarged = spatial_distribution_mixed_enlarged(&u, &photons).map_err(map_sim_error)?;
        let deviation = dist.max_abs_deviation(&enlarged);
        report.oracle_max_abs_deviation = Some(deviation);
        eprintln!("specmode: oracle max abs deviation {deviation:.3e}");
    }
    emit(opts, &report)
}

/// Two photons with the requested fidelity meet at a 50:50 beamsplitter;
/// the coincidence probability is compared against (1 - F) / 2.
fn hom(opts: &CommonOpts) -> Result<(), CliError> {
    let config: SimulateConfig = load_json(opts.config.as_deref())?;
    let fidelity = require(merged(opts.fmin, config.fidelity), "fmin")?;
    if !(0.0..=1.0).contains(&fidelity) || !fidelity.is_finite() {
        return Err(CliError::config(format!(
            "fidelity {fidelity} outside [0, 1]"
        )));
    }
    if let Some(UnitarySpec::Haar { .. }) = config.unitary {
        return Err(CliError::config("hom always uses the 50:50 beamsplitter"));
    }
    let u = UnitaryMatrix::beamsplitter_50_50();
    let photons = vec![
        PhotonSource::Pure(
            SpectralAmplitudes::new(vec![
                Complex64::new(fidelity.sqrt(), 0.0),
                Complex64::new((1.0 - fidelity).sqrt(), 0.0),
            ])
            .expect("normalized"),
        ),
        PhotonSource::Pure(
            SpectralAmplitudes::new(vec![Complex64::new(1.0, 0.0), Complex64::ZERO])
                .expect("normalized"),
        ),
    ];
    let dist = spatial_distribution_pure(&u, &photons).map_err(map_sim_error)?;
    let coincidence = dist
        .probability_of(&[1, 1])
        .expect("two-mode distribution contains (1,1)");
    let report = HomReport {
        command: "simulate hom".to_string(),
        fidelity,
        coincidence_probability: coincidence,
        reference_value: (1.0 - fidelity) / 2.0,
    };
    let format = chosen_format(opts, OutputFormat::Json);
    write_output(opts, &report.render(format)?)
}

fn report_cost(estimate: Result<CostEstimate, specmode::SimError>) {
    if let Ok(estimate) = estimate {
        eprintln!("specmode: cost estimate: {estimate}");
    }
}

fn emit(opts: &CommonOpts, report: &DistributionReport) -> Result<(), CliError> {
    let format = chosen_format(opts, OutputFormat::Csv);
    write_output(opts, &report.render(format)?)
}
