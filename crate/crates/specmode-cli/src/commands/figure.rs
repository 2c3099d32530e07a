//! `specmode figure` subcommands: CSV grids of the analytic bounds.

use specmode::hardness::binomial_tail;
use specmode::inequality_region;

use crate::config::{load_json, merged, require, FigureConfig, GridSpec};
use crate::report::{format_float, write_output, Csv};
use crate::{map_hardness_error, CliError, CommonOpts, FigureVerb};

const DEFAULT_SUCCESS_GRID: GridSpec = GridSpec {
    start: 0.0,
    stop: 1.0,
    steps: 21,
};
const DEFAULT_REGION_GRID: GridSpec = GridSpec {
    start: 0.0,
    stop: 1.0,
    steps: 201,
};
const DEFAULT_N_MIN: usize = 1;
const DEFAULT_N_MAX: usize = 20;

pub fn run(verb: FigureVerb) -> Result<(), CliError> {
    match verb {
        FigureVerb::Purity(opts) => success_grid(&opts, "P"),
        FigureVerb::Fidelity(opts) => success_grid(&opts, "F_min"),
        FigureVerb::Region(opts) => region(&opts),
    }
}

/// Lower bound over (photon number, success parameter): the same binomial
/// tail surfaces both the purity and fidelity figures.
fn success_grid(opts: &CommonOpts, axis: &str) -> Result<(), CliError> {
    let config: FigureConfig = load_json(opts.config.as_deref())?;
    let grid = config.grid.unwrap_or(DEFAULT_SUCCESS_GRID);
    let values = grid.values()?;
    for &v in &values {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::config(format!(
                "{axis} grid value {v} outside [0, 1]"
            )));
        }
    }
    let n_min = config.n_min.unwrap_or(DEFAULT_N_MIN);
    let n_max = merged(opts.n, config.n_max).unwrap_or(DEFAULT_N_MAX);
    let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
    if n_min == 0 || n_min > n_max {
        return Err(CliError::config(format!(
            "invalid photon range [{n_min}, {n_max}]"
        )));
    }
    if n_hard == 0 {
        return Err(CliError::config("n_hard must be at least 1"));
    }
    let mut csv = Csv::new(&["n", axis, "bound"]);
    for n in n_min..=n_max {
        for &p in &values {
            let bound = if n_hard > n {
                0.0
            } else {
                binomial_tail(p, n, n_hard)
            };
            csv.row(&[n.to_string(), format_float(p), format_float(bound)]);
        }
    }
    write_output(opts, &csv.finish())
}

/// Combined-bound region tables; sweeps n_hard at fixed n or n at fixed
/// n_hard, depending on which range the config provides.
fn region(opts: &CommonOpts) -> Result<(), CliError> {
    let config: FigureConfig = load_json(opts.config.as_deref())?;
    let epsilon = require(merged(opts.epsilon, config.epsilon), "epsilon")?;
    let grid = config.grid.unwrap_or(DEFAULT_REGION_GRID);
    let f_values = grid.values()?;

    let sweep: Vec<(usize, usize)> = match (
        config.n_hard_min.zip(config.n_hard_max),
        config.n_min.zip(config.n_max),
    ) {
        (Some((lo, hi)), None) => {
            let n = require(merged(opts.n, config.n), "n")?;
            if lo == 0 || lo > hi {
                return Err(CliError::config(format!(
                    "invalid n_hard range [{lo}, {hi}]"
                )));
            }
            (lo..=hi).map(|n_hard| (n, n_hard)).collect()
        }
        (None, Some((lo, hi))) => {
            let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
            if lo == 0 || lo > hi {
                return Err(CliError::config(format!("invalid n range [{lo}, {hi}]")));
            }
            (lo..=hi).map(|n| (n, n_hard)).collect()
        }
        (None, None) => {
            let n = require(merged(opts.n, config.n), "n")?;
            let n_hard = require(merged(opts.n_hard, config.n_hard), "n_hard")?;
            vec![(n, n_hard)]
        }
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "provide a range for n_hard or for n, not both",
            ));
        }
    };

    let mut csv = Csv::new(&["F_min", "n", "n_hard", "bound", "in_region"]);
    for (n, n_hard) in sweep {
        let rows = inequality_region(&f_values, n, n_hard, epsilon).map_err(map_hardness_error)?;
        for row in rows {
            csv.row(&[
                format_float(row.f_min),
                n.to_string(),
                n_hard.to_string(),
                format_float(row.lower_bound),
                row.in_region.to_string(),
            ]);
        }
    }
    write_output(opts, &csv.finish())
}
