//! Command-line front end for `pointloss-core`.
//!
//! Each subcommand writes its result to the given writer in one of three
//! formats: aligned text, CSV, or `key=value` records. Errors map to exit
//! codes by class (see [`CliError::exit_code`]).

pub mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pointloss_core::budget::{
    budget_report, budget_report_ignoring_pointing, format_db, format_value, max_range,
    range_table, BudgetReport, Precision,
};
use pointloss_core::gain_opt::{
    gain_grid_db, optimal_gain, sweep_effective_gain, GainApproach, GainOptProblem, SweepRow,
};
use pointloss_core::outage::{
    deterministic_margin, outage_closed_form, outage_monte_carlo_partitioned, outage_numeric,
    solve_margin, solve_margin_numeric, LinkEndPointing,
};
use pointloss_core::pointing::{AngularErrorModel, PointingLossModel};
use pointloss_core::signaling::RequiredFluxRegistry;
use pointloss_core::units::{db_to_linear, db_to_nats, linear_to_db, m_to_au, MICRORADIAN};
use pointloss_core::ErrorKind;
use scenario::{LoadedScenario, LossModelName, PrecisionName};
use serde::Deserialize;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Registry file used when neither `--registry` nor the scenario names one.
pub const REGISTRY_ENV: &str = "POINTLOSS_REGISTRY";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pointloss_core::Error),
    #[error("scenario file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Domain => EXIT_DOMAIN,
                ErrorKind::Numeric => EXIT_NUMERIC,
            },
            CliError::Toml(_) | CliError::Io { .. } | CliError::Csv(_) | CliError::Usage(_) => {
                EXIT_INPUT
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io {
            path: PathBuf::from("<output>"),
            source: e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Kv,
}

#[derive(Debug, Parser)]
#[command(
    name = "pointloss",
    version,
    about = "Pointing losses and link budgets for deep-space optical links"
)]
pub struct Cli {
    /// Output format. Defaults to the scenario's [output] setting, then text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Fixed decimals as in a printed budget table (rounded) or round-trip floats (full).
    #[arg(long, global = true, value_enum)]
    pub precision: Option<PrecisionName>,
    /// Required-flux registry file. Overrides the scenario's [registry] path.
    #[arg(long, global = true, env = REGISTRY_ENV)]
    pub registry: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pointing loss of one antenna at a fixed off-boresight angle.
    Pointing(PointingArgs),
    /// Outage probability for a given pointing margin.
    Outage(OutageArgs),
    /// Pointing margin that meets an outage target.
    Margin(MarginArgs),
    /// Antenna gain maximizing the effective system gain.
    Optimize(OptimizeArgs),
    /// Link budget report for a scenario file.
    Budget(BudgetArgs),
    /// Maximum achievable range, or a full range table.
    Range(RangeArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = LossModelName::Gaussian)]
    pub model: LossModelName,
    /// Exponent factor of the `exp` model (default 0.188).
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl ModelArgs {
    fn model(&self) -> Result<PointingLossModel, CliError> {
        self.model.model(self.alpha)
    }
}

#[derive(Debug, Args)]
pub struct PointingArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub gain_db: f64,
    #[arg(long)]
    pub theta_urad: f64,
}

/// Per-end gain and pointing accuracy; the shared flag sets both ends.
#[derive(Debug, Args)]
pub struct EndsArgs {
    /// Gain of both ends (dB). Omit to use the optimal symmetric gain.
    #[arg(long, allow_hyphen_values = true)]
    pub gain_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tx_gain_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rx_gain_db: Option<f64>,
    /// Rayleigh sigma of both ends (urad).
    #[arg(long)]
    pub sigma_urad: Option<f64>,
    #[arg(long)]
    pub tx_sigma_urad: Option<f64>,
    #[arg(long)]
    pub rx_sigma_urad: Option<f64>,
    /// Rician bias of both ends (urad); switches the error law to Rician.
    #[arg(long)]
    pub bias_urad: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form (Rayleigh errors; circular aperture via its exponential fit).
    Closed,
    /// Numerical integration over the error distributions.
    Numeric,
    /// Monte Carlo with a seeded, partitioned generator.
    Mc,
}

#[derive(Debug, Args)]
pub struct OutageArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub ends: EndsArgs,
    #[arg(long)]
    pub margin_db: f64,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub partitions: u32,
}

#[derive(Debug, Args)]
pub struct MarginArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub ends: EndsArgs,
    #[arg(long)]
    pub pout: f64,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApproachArg {
    Deterministic,
    Outage,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = ApproachArg::Deterministic)]
    pub approach: ApproachArg,
    #[arg(long)]
    pub theta_max_urad: Option<f64>,
    #[arg(long)]
    pub sigma_urad: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub pout: f64,
    #[arg(long, default_value_t = 60.0)]
    pub bracket_lo_db: f64,
    #[arg(long, default_value_t = 160.0)]
    pub bracket_hi_db: f64,
    /// Write the effective-gain sweep as CSV to this path (`-` for stdout).
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub grid_step_db: f64,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    pub scenario: PathBuf,
    /// Design without pointing loss and also report the margin actually
    /// achieved under the scenario's pointing approach.
    #[arg(long)]
    pub ignore_pointing: bool,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    pub scenario: PathBuf,
    /// Regenerate a range table over pointing accuracies and PPM orders.
    #[arg(long, value_enum)]
    pub table: Option<ApproachArg>,
    /// Table rows: theta_max or sigma values in urad.
    #[arg(long, value_delimiter = ',')]
    pub accuracies_urad: Option<Vec<f64>>,
    /// Table columns: PPM orders.
    #[arg(long, value_delimiter = ',', default_values_t = [256, 128, 64, 32, 16, 8, 4])]
    pub orders: Vec<u32>,
    /// Outage target for `--table outage` (default: scenario's, else 0.05).
    #[arg(long)]
    pub pout: Option<f64>,
}

/// Default rows for `--table`.
pub const DETERMINISTIC_ROWS_URAD: [f64; 6] = [1.0, 0.5, 0.35, 0.2, 0.15, 0.1];
pub const OUTAGE_ROWS_URAD: [f64; 7] = [1.0, 0.5, 0.35, 0.2, 0.15, 0.1, 0.05];

struct Style {
    format: Format,
    precision: Precision,
}

impl Style {
    fn num(&self, v: f64, rounded_decimals: usize) -> String {
        match self.precision {
            Precision::Rounded => format!("{:.*}", rounded_decimals, v + 0.0),
            Precision::Full => format!("{v}"),
        }
    }

    /// Writes `(key, value)` records in the selected format.
    fn records(&self, out: &mut dyn Write, rows: &[(&str, String)]) -> Result<(), CliError> {
        match self.format {
            Format::Kv => {
                for (k, v) in rows {
                    writeln!(out, "{k}={v}")?;
                }
            }
            Format::Text => {
                let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
                for (k, v) in rows {
                    writeln!(out, "{k:<w$}  {v}")?;
                }
            }
            Format::Csv => {
                let mut wtr = csv::Writer::from_writer(out);
                wtr.write_record(rows.iter().map(|r| r.0))?;
                wtr.write_record(rows.iter().map(|r| r.1.as_str()))?;
                wtr.flush()?;
            }
        }
        Ok(())
    }
}

fn style(cli: &Cli, scenario: Option<&LoadedScenario>) -> Style {
    let out = scenario.map(|s| &s.file.output);
    Style {
        format: cli
            .format
            .or(out.and_then(|o| o.format))
            .unwrap_or_default(),
        precision: cli
            .precision
            .or(out.and_then(|o| o.precision))
            .map(Precision::from)
            .unwrap_or_default(),
    }
}

fn registry(
    cli: &Cli,
    scenario: Option<&LoadedScenario>,
) -> Result<RequiredFluxRegistry, CliError> {
    let path = cli
        .registry
        .clone()
        .or_else(|| scenario.and_then(LoadedScenario::registry_path));
    match path {
        Some(p) => load_registry(&p),
        None => Ok(RequiredFluxRegistry::builtin()),
    }
}

fn load_registry(path: &Path) -> Result<RequiredFluxRegistry, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(RequiredFluxRegistry::parse(&text)?)
}

/// Runs a parsed command line, writing the result to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Pointing(a) => cmd_pointing(cli, a, out),
        Command::Outage(a) => cmd_outage(cli, a, out),
        Command::Margin(a) => cmd_margin(cli, a, out),
        Command::Optimize(a) => cmd_optimize(cli, a, out),
        Command::Budget(a) => cmd_budget(cli, a, out),
        Command::Range(a) => cmd_range(cli, a, out),
    }
}

fn cmd_pointing(cli: &Cli, a: &PointingArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let st = style(cli, None);
    let end = LinkEndPointing::new(
        db_to_linear(a.gain_db),
        a.model.model()?,
        AngularErrorModel::worst_case(a.theta_urad * MICRORADIAN)?,
    )?;
    let m = deterministic_margin(&end)?;
    st.records(
        out,
        &[
            ("pointing_loss_db", st.num(-m.attenuation_db, 2)),
            ("beyond_first_null", m.beyond_first_null.to_string()),
        ],
    )
}

/// Both ends from the shared and per-end flags. `None` gains come back as
/// `None` so the caller can substitute an optimum.
fn ends(
    a: &EndsArgs,
    model: PointingLossModel,
) -> Result<
    (
        Option<f64>,
        Option<f64>,
        AngularErrorModel,
        AngularErrorModel,
    ),
    CliError,
> {
    let pick =
        |shared: Option<f64>, own: Option<f64>, name: &str| -> Result<Option<f64>, CliError> {
            match (shared, own) {
                (Some(_), Some(_)) => Err(CliError::Usage(format!(
                    "give either the shared flag or --{name}, not both"
                ))),
                (s, o) => Ok(s.or(o)),
            }
        };
    let tx_gain = pick(a.gain_db, a.tx_gain_db, "tx-gain-db")?;
    let rx_gain = pick(a.gain_db, a.rx_gain_db, "rx-gain-db")?;
    let sigma = |own: Option<f64>, name: &str| -> Result<AngularErrorModel, CliError> {
        let s = pick(a.sigma_urad, own, name)?
            .ok_or_else(|| CliError::Usage(format!("missing --sigma-urad or --{name}")))?
            * MICRORADIAN;
        Ok(match a.bias_urad {
            Some(b) => AngularErrorModel::rician(s, b * MICRORADIAN)?,
            None => AngularErrorModel::rayleigh(s)?,
        })
    };
    let tx_err = sigma(a.tx_sigma_urad, "tx-sigma-urad")?;
    let rx_err = sigma(a.rx_sigma_urad, "rx-sigma-urad")?;
    model.validate()?;
    Ok((tx_gain, rx_gain, tx_err, rx_err))
}

/// Resolves gains, substituting the symmetric optimum for the outage target
/// when no gain flag is given.
fn resolve_ends(
    a: &EndsArgs,
    model: PointingLossModel,
    p_out: Option<f64>,
) -> Result<(LinkEndPointing, LinkEndPointing, bool), CliError> {
    let (tx_gain, rx_gain, tx_err, rx_err) = ends(a, model)?;
    let (tx_gain, rx_gain, optimized) = match (tx_gain, rx_gain) {
        (Some(t), Some(r)) => (db_to_linear(t), db_to_linear(r), false),
        (None, None) => {
            let p_out = p_out
                .ok_or_else(|| CliError::Usage("give --gain-db (or both per-end gains)".into()))?;
            if tx_err != rx_err {
                return Err(CliError::Usage(
                    "optimal gain needs the same sigma on both ends; give --gain-db".into(),
                ));
            }
            let opt = optimal_gain(&GainOptProblem::outage(model, tx_err, p_out)?)?;
            (opt.gain, opt.gain, true)
        }
        _ => {
            return Err(CliError::Usage(
                "give both --tx-gain-db and --rx-gain-db".into(),
            ))
        }
    };
    Ok((
        LinkEndPointing::new(tx_gain, model, tx_err)?,
        LinkEndPointing::new(rx_gain, model, rx_err)?,
        optimized,
    ))
}

fn cmd_outage(cli: &Cli, a: &OutageArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let st = style(cli, None);
    let (tx, rx, _) = resolve_ends(&a.ends, a.model.model()?, None)?;
    let mut rows = Vec::new();
    match a.method {
        Method::Closed => rows.push((
            "p_out",
            st.num(outage_closed_form(&tx, &rx, db_to_nats(a.margin_db))?, 6),
        )),
        Method::Numeric => rows.push(("p_out", st.num(outage_numeric(&tx, &rx, a.margin_db)?, 6))),
        Method::Mc => {
            let est = outage_monte_carlo_partitioned(
                &tx,
                &rx,
                a.margin_db,
                a.trials,
                a.seed,
                a.partitions,
            )?;
            rows.push(("p_out", st.num(est.estimate, 6)));
            rows.push(("std_error", st.num(est.std_error, 6)));
            rows.push(("trials", est.trials.to_string()));
            rows.push(("exceedances", est.exceedances.to_string()));
            rows.push(("seed", a.seed.to_string()));
            rows.push(("partitions", a.partitions.to_string()));
        }
    }
    st.records(out, &rows)
}

fn cmd_margin(cli: &Cli, a: &MarginArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let st = style(cli, None);
    let (tx, rx, optimized) = resolve_ends(&a.ends, a.model.model()?, Some(a.pout))?;
    let spec = match a.method {
        Method::Closed => solve_margin(&tx, &rx, a.pout)?,
        Method::Numeric => solve_margin_numeric(&tx, &rx, a.pout)?,
        Method::Mc => {
            return Err(CliError::Usage(
                "margin supports --method closed or numeric".into(),
            ))
        }
    };
    let mut rows = vec![
        ("margin_db", st.num(spec.margin_db, 3)),
        ("p_out", format!("{}", a.pout)),
    ];
    if optimized {
        rows.push(("gain_db", st.num(linear_to_db(tx.gain), 2)));
    }
    st.records(out, &rows)
}

fn optimize_problem(a: &OptimizeArgs) -> Result<GainOptProblem, CliError> {
    let model = a.model.model()?;
    let p = match (a.approach, a.theta_max_urad, a.sigma_urad) {
        (ApproachArg::Deterministic, Some(t), None) => {
            GainOptProblem::deterministic(model, t * MICRORADIAN)?
        }
        (ApproachArg::Outage, None, Some(s)) => {
            GainOptProblem::outage(model, AngularErrorModel::rayleigh(s * MICRORADIAN)?, a.pout)?
        }
        (ApproachArg::Deterministic, ..) => {
            return Err(CliError::Usage(
                "deterministic approach needs --theta-max-urad only".into(),
            ))
        }
        (ApproachArg::Outage, ..) => {
            return Err(CliError::Usage(
                "outage approach needs --sigma-urad only".into(),
            ))
        }
    };
    Ok(p.with_bracket(a.bracket_lo_db, a.bracket_hi_db)?)
}

/// Sweep rows as CSV with header `gain_db,attenuation_db,geff_db`. Floats
/// use their shortest round-trip form, so [`read_sweep_csv`] recovers them
/// exactly.
pub fn write_sweep_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_sweep_csv(input: impl std::io::Read) -> Result<Vec<SweepRow>, CliError> {
    let mut rdr = csv::Reader::from_reader(input);
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

fn cmd_optimize(cli: &Cli, a: &OptimizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let st = style(cli, None);
    let problem = optimize_problem(a)?;
    if let Some(path) = &a.sweep {
        let (lo, hi) = problem.bracket_db;
        let grid = gain_grid_db(lo, hi, a.grid_step_db)?;
        let rows = sweep_effective_gain(&problem, &grid)?;
        if path.as_os_str() == "-" {
            return write_sweep_csv(&rows, out);
        }
        let mut file = std::fs::File::create(path).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?;
        write_sweep_csv(&rows, &mut file)?;
    }
    let opt = optimal_gain(&problem)?;
    st.records(
        out,
        &[
            ("gain_db", st.num(opt.gain_db, 2)),
            ("attenuation_db", st.num(opt.attenuation_db, 3)),
            ("effective_gain_db", st.num(opt.effective_gain_db, 2)),
            ("closed_form", opt.closed_form.to_string()),
        ],
    )
}

fn write_report(st: &Style, report: &BudgetReport, out: &mut dyn Write) -> Result<(), CliError> {
    match st.format {
        Format::Text => write!(out, "{}", report.to_text(st.precision))?,
        Format::Kv => write!(out, "{}", report.to_kv(st.precision))?,
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            wtr.write_record(["section", "key", "label", "db", "value", "units"])?;
            for i in &report.items {
                let db = i.db.map(|d| format_db(d, st.precision)).unwrap_or_default();
                let value = i
                    .value
                    .as_ref()
                    .map(|v| format_value(v, st.precision))
                    .unwrap_or_default();
                wtr.write_record([
                    i.section,
                    i.key,
                    i.label.as_str(),
                    db.as_str(),
                    value.as_str(),
                    i.units,
                ])?;
            }
            wtr.flush()?;
        }
    }
    Ok(())
}

fn cmd_budget(cli: &Cli, a: &BudgetArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = LoadedScenario::load(&a.scenario)?;
    let st = style(cli, Some(&loaded));
    let reg = registry(cli, Some(&loaded))?;
    let scenario = loaded.file.to_scenario()?;
    let report = if a.ignore_pointing {
        budget_report_ignoring_pointing(&scenario, &reg)?
    } else {
        budget_report(&scenario, &reg)?
    };
    write_report(&st, &report, out)
}

fn cmd_range(cli: &Cli, a: &RangeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = LoadedScenario::load(&a.scenario)?;
    let st = style(cli, Some(&loaded));
    let reg = registry(cli, Some(&loaded))?;
    let Some(table) = a.table else {
        let scenario = loaded.file.to_scenario()?;
        let r = max_range(&scenario, &reg, scenario.required_margin_db)?;
        return st.records(
            out,
            &[
                ("max_range_au", st.num(m_to_au(r), 3)),
                ("required_margin_db", st.num(scenario.required_margin_db, 2)),
            ],
        );
    };
    // The table redesigns gains per row, so the scenario may omit them.
    let mut file = loaded.file.clone();
    let (approach, default_rows): (GainApproach, &[f64]) = match table {
        ApproachArg::Deterministic => (GainApproach::Deterministic, &DETERMINISTIC_ROWS_URAD),
        ApproachArg::Outage => {
            let p_out = a.pout.or(file.pointing.p_out).unwrap_or(0.05);
            (GainApproach::Outage { p_out }, &OUTAGE_ROWS_URAD)
        }
    };
    file.tx.gain_db = Some(0.0);
    file.rx.gain_db = Some(0.0);
    file.pointing.approach = scenario::ApproachName::Neglected;
    file.pointing.p_out = None;
    let template = file.to_scenario()?;
    let rows_urad = a
        .accuracies_urad
        .clone()
        .unwrap_or_else(|| default_rows.to_vec());
    let rows: Vec<f64> = rows_urad.iter().map(|u| u * MICRORADIAN).collect();
    let t = range_table(
        &template,
        approach,
        template.tx.loss_model,
        &rows,
        &a.orders,
        &reg,
    )?;
    let header: Vec<String> = std::iter::once("accuracy_urad".to_string())
        .chain(t.ppm_orders.iter().map(|m| format!("M{m}")))
        .collect();
    let mut lines: Vec<Vec<String>> = Vec::new();
    for (u, row) in rows_urad.iter().zip(&t.ranges) {
        let mut l = vec![format!("{u}")];
        l.extend(row.iter().map(|r| st.num(m_to_au(*r), 3)));
        lines.push(l);
    }
    let mut rate = vec!["data_rate_kbps".to_string()];
    rate.extend(t.data_rates_bps.iter().map(|b| st.num(b / 1e3, 2)));
    let mut peak = vec!["peak_power_w".to_string()];
    peak.extend(t.peak_powers_w.iter().map(|p| format!("{p}")));
    lines.push(rate);
    lines.push(peak);
    match st.format {
        Format::Csv | Format::Text => {
            let mut wtr = csv::Writer::from_writer(out);
            wtr.write_record(&header)?;
            for l in &lines {
                wtr.write_record(l)?;
            }
            wtr.flush()?;
        }
        Format::Kv => {
            for l in &lines {
                for (h, v) in header.iter().zip(l).skip(1) {
                    writeln!(out, "{}.{h}={v}", l[0])?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String, CliError> {
        let cli =
            Cli::try_parse_from(std::iter::once("pointloss").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        run(&cli, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn pointing_examples() {
        let o = run_args(&[
            "--format",
            "kv",
            "pointing",
            "--gain-db",
            "129",
            "--theta-urad",
            "0.35",
        ])
        .unwrap();
        assert!(o.contains("pointing_loss_db=-4.23\n"), "{o}");
        let o = run_args(&[
            "--format",
            "kv",
            "pointing",
            "--gain-db",
            "129",
            "--theta-urad",
            "0",
        ])
        .unwrap();
        assert!(o.contains("pointing_loss_db=0.00\n"), "{o}");
        // sqrt(G) theta = 2 with G = 1e12.
        let o = run_args(&[
            "--format",
            "kv",
            "pointing",
            "--model",
            "circular",
            "--gain-db",
            "120",
            "--theta-urad",
            "2",
        ])
        .unwrap();
        assert!(o.contains("pointing_loss_db=-4.78\n"), "{o}");
    }

    #[test]
    fn margin_at_optimal_gain() {
        let o = run_args(&[
            "--format",
            "kv",
            "margin",
            "--sigma-urad",
            "1",
            "--pout",
            "0.05",
        ])
        .unwrap();
        assert!(o.contains("margin_db=8.686\n"), "{o}");
        assert!(o.contains("gain_db=113.24\n"), "{o}");
    }

    #[test]
    fn zero_margin_outage_is_certain() {
        let o = run_args(&[
            "--format",
            "kv",
            "outage",
            "--gain-db",
            "110",
            "--sigma-urad",
            "1",
            "--margin-db",
            "0",
        ])
        .unwrap();
        assert_eq!(o, "p_out=1.000000\n");
    }

    #[test]
    fn optimize_examples() {
        let o = run_args(&["--format", "kv", "optimize", "--theta-max-urad", "0.35"]).unwrap();
        assert!(o.contains("gain_db=129.12\n"), "{o}");
        let o = run_args(&[
            "--format",
            "kv",
            "optimize",
            "--approach",
            "outage",
            "--sigma-urad",
            "1",
        ])
        .unwrap();
        assert!(o.contains("gain_db=113.24\n"), "{o}");
    }

    #[test]
    fn sweep_round_trip() {
        let o = run_args(&[
            "optimize",
            "--sweep",
            "-",
            "--theta-max-urad",
            "0.35",
            "--grid-step-db",
            "0.25",
        ])
        .unwrap();
        let rows = read_sweep_csv(o.as_bytes()).unwrap();
        assert_eq!(rows.len(), 401);
        assert!(o.starts_with("gain_db,attenuation_db,geff_db\n"));
        let mut again = Vec::new();
        write_sweep_csv(&rows, &mut again).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), o);
    }

    #[test]
    fn usage_errors_map_to_input_code() {
        let e = run_args(&["outage", "--gain-db", "110", "--margin-db", "1"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_INPUT);
        let e = run_args(&["optimize", "--theta-max-urad=-1"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_DOMAIN);
    }
}
