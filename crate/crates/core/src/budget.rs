//! Optical link budget.
//!
//! The received signal flux is
//! `n_s = P G_t eta_t (lambda / 4 pi r)^2 G_r eta_r L_p L_other lambda / (h c)`.
//! Everything here works term by term in dB so the report columns add up
//! exactly; the pointing loss enters as a fixed budgeted attenuation from
//! [`crate::outage::total_pointing_attenuation`].

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::gain_opt::{optimal_gain, GainApproach, GainOptProblem, GainOptimum};
use crate::outage::{
    total_pointing_attenuation, LinkEndPointing, PointingApproach, PointingMargin,
};
use crate::pointing::{AngularErrorModel, PointingLossModel};
use crate::signaling::{noise_per_slot, required_flux, RequiredFluxRegistry, ScppmConfig};
use crate::units::{
    linear_to_db, m_to_au, MICRORADIAN, NANOMETRE, NANOSECOND, PLANCK, SPEED_OF_LIGHT,
};

/// One terminal: antenna gain and efficiency plus its pointing behaviour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaSpec {
    /// Far-field gain, linear.
    pub gain: f64,
    /// Optical efficiency in (0, 1].
    pub efficiency: f64,
    pub loss_model: PointingLossModel,
    pub error_model: AngularErrorModel,
}

impl AntennaSpec {
    pub fn pointing(&self) -> LinkEndPointing {
        LinkEndPointing {
            gain: self.gain,
            loss_model: self.loss_model,
            error_model: self.error_model,
        }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        ensure_positive(name, self.gain)?;
        fraction(name, self.efficiency)?;
        self.loss_model.validate()?;
        self.error_model.validate()
    }
}

fn fraction(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must lie in (0, 1], got {v}")))
    }
}

/// Everything needed to close a link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkScenario {
    /// Wavelength in m.
    pub wavelength: f64,
    /// Link distance in m.
    pub range: f64,
    /// Average transmit power in W.
    pub average_power: f64,
    pub tx: AntennaSpec,
    pub rx: AntennaSpec,
    /// Detection and implementation losses, linear in (0, 1].
    pub other_losses: f64,
    pub approach: PointingApproach,
    pub signaling: ScppmConfig,
    /// Background flux in photons/ns.
    pub noise_flux: f64,
    /// Link margin the design must keep, dB.
    pub required_margin_db: f64,
    /// Target frame error rate, reported only.
    pub fer_target: Option<f64>,
}

impl LinkScenario {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("wavelength", self.wavelength)?;
        ensure_positive("range", self.range)?;
        ensure_positive("average_power", self.average_power)?;
        self.tx.validate("tx")?;
        self.rx.validate("rx")?;
        fraction("other_losses", self.other_losses)?;
        self.signaling.validate()?;
        ensure_nonnegative("noise_flux", self.noise_flux)?;
        if !self.required_margin_db.is_finite() {
            return Err(Error::invalid("required_margin_db", "must be finite"));
        }
        Ok(())
    }

    pub fn with_range(mut self, range: f64) -> Self {
        self.range = range;
        self
    }

    pub fn with_approach(mut self, approach: PointingApproach) -> Self {
        self.approach = approach;
        self
    }

    pub fn with_gains(mut self, tx_gain: f64, rx_gain: f64) -> Self {
        self.tx.gain = tx_gain;
        self.rx.gain = rx_gain;
        self
    }
}

/// Atmospheric attenuation. Both terminals sit above the atmosphere, so the
/// line is carried in the report at 0 dB.
pub const ATMOSPHERIC_LOSS_DB: f64 = 0.0;

/// Free-space loss `20 log10(lambda / (4 pi r))` in dB.
pub fn space_loss_db(wavelength: f64, range: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("range", range)?;
    Ok(20.0 * (wavelength / (4.0 * PI * range)).log10())
}

/// Photons per ns delivered by 1 W at `wavelength`, in dB: `lambda / (h c)`
/// scaled to ns.
pub fn photon_term_db(wavelength: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength)?;
    Ok(linear_to_db(
        wavelength / (PLANCK * SPEED_OF_LIGHT) * NANOSECOND,
    ))
}

/// Full-precision budget, one field per term. All attenuations are stored
/// as signed dB contributions (losses negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub average_power_dbw: f64,
    pub peak_power_w: f64,
    pub tx_gain_db: f64,
    pub tx_efficiency_db: f64,
    pub space_loss_db: f64,
    pub rx_gain_db: f64,
    pub rx_efficiency_db: f64,
    pub other_losses_db: f64,
    pub atmospheric_loss_db: f64,
    pub pointing: PointingMargin,
    pub pointing_loss_db: f64,
    pub photon_term_db: f64,
    pub received_power_dbw: f64,
    /// dB photons/ns.
    pub received_flux_db: f64,
    pub required_flux_db: Option<f64>,
    pub required_power_dbw: Option<f64>,
    pub link_margin_db: Option<f64>,
    pub noise_flux_db: f64,
    pub noise_per_slot: f64,
    pub data_rate_bps: f64,
}

impl LinkBudget {
    /// The dB terms whose sum is the received flux.
    pub fn flux_terms(&self) -> [f64; 10] {
        [
            self.average_power_dbw,
            self.tx_gain_db,
            self.tx_efficiency_db,
            self.space_loss_db,
            self.rx_gain_db,
            self.rx_efficiency_db,
            self.other_losses_db,
            self.atmospheric_loss_db,
            self.pointing_loss_db,
            self.photon_term_db,
        ]
    }
}

fn evaluate(
    scenario: &LinkScenario,
    registry: Option<&RequiredFluxRegistry>,
) -> Result<LinkBudget> {
    scenario.validate()?;
    let pointing = total_pointing_attenuation(
        &scenario.tx.pointing(),
        &scenario.rx.pointing(),
        scenario.approach,
    )?;
    let average_power_dbw = linear_to_db(scenario.average_power);
    let tx_gain_db = linear_to_db(scenario.tx.gain);
    let tx_efficiency_db = linear_to_db(scenario.tx.efficiency);
    let space = space_loss_db(scenario.wavelength, scenario.range)?;
    let rx_gain_db = linear_to_db(scenario.rx.gain);
    let rx_efficiency_db = linear_to_db(scenario.rx.efficiency);
    let other_losses_db = linear_to_db(scenario.other_losses);
    let pointing_loss_db = -pointing.attenuation_db;
    let photon = photon_term_db(scenario.wavelength)?;
    let received_power_dbw = average_power_dbw
        + tx_gain_db
        + tx_efficiency_db
        + space
        + rx_gain_db
        + rx_efficiency_db
        + other_losses_db
        + ATMOSPHERIC_LOSS_DB
        + pointing_loss_db;
    let received_flux_db = received_power_dbw + photon;
    let required_flux_db = match registry {
        Some(r) => Some(required_flux(r, &scenario.signaling, scenario.noise_flux)?),
        None => None,
    };
    Ok(LinkBudget {
        average_power_dbw,
        peak_power_w: scenario.signaling.peak_power(scenario.average_power)?,
        tx_gain_db,
        tx_efficiency_db,
        space_loss_db: space,
        rx_gain_db,
        rx_efficiency_db,
        other_losses_db,
        atmospheric_loss_db: ATMOSPHERIC_LOSS_DB,
        pointing,
        pointing_loss_db,
        photon_term_db: photon,
        received_power_dbw,
        received_flux_db,
        required_flux_db,
        required_power_dbw: required_flux_db.map(|f| f - photon),
        link_margin_db: required_flux_db.map(|f| received_flux_db - f),
        noise_flux_db: linear_to_db(scenario.noise_flux),
        noise_per_slot: noise_per_slot(scenario.noise_flux, scenario.signaling.slot_time)?,
        data_rate_bps: scenario.signaling.data_rate()?,
    })
}

/// Budget with the required flux and margin resolved against `registry`.
pub fn link_budget(scenario: &LinkScenario, registry: &RequiredFluxRegistry) -> Result<LinkBudget> {
    evaluate(scenario, Some(registry))
}

/// Average received power in W.
pub fn received_power(scenario: &LinkScenario) -> Result<f64> {
    Ok(crate::units::db_to_linear(
        evaluate(scenario, None)?.received_power_dbw,
    ))
}

/// Average received signal flux in photons/ns.
pub fn received_flux(scenario: &LinkScenario) -> Result<f64> {
    Ok(crate::units::db_to_linear(received_flux_db(scenario)?))
}

/// Average received signal flux in dB photons/ns.
pub fn received_flux_db(scenario: &LinkScenario) -> Result<f64> {
    Ok(evaluate(scenario, None)?.received_flux_db)
}

/// `n_s[dB] - n_s_min[dB]`.
pub fn link_margin(scenario: &LinkScenario, registry: &RequiredFluxRegistry) -> Result<f64> {
    Ok(link_budget(scenario, registry)?
        .link_margin_db
        .expect("registry given"))
}

/// Largest distance (m) at which the scenario still keeps
/// `required_margin_db`. The scenario's own range is ignored.
pub fn max_range(
    scenario: &LinkScenario,
    registry: &RequiredFluxRegistry,
    required_margin_db: f64,
) -> Result<f64> {
    if !required_margin_db.is_finite() {
        return Err(Error::invalid("required_margin_db", "must be finite"));
    }
    // Evaluate at 1 m; the flux falls 20 dB per decade of distance from there.
    let at_one_metre = link_budget(&scenario.with_range(1.0), registry)?;
    let surplus_db = at_one_metre.link_margin_db.expect("registry given") - required_margin_db;
    Ok(10f64.powf(surplus_db / 20.0))
}

/// A symmetric design: both ends get the gain that maximizes the effective
/// gain for `accuracy` (worst-case angle or Rayleigh sigma, rad).
pub fn optimal_design(
    template: &LinkScenario,
    approach: GainApproach,
    loss_model: PointingLossModel,
    accuracy: f64,
) -> Result<(LinkScenario, GainOptimum)> {
    let problem = match approach {
        GainApproach::Deterministic => GainOptProblem::deterministic(loss_model, accuracy)?,
        GainApproach::Outage { p_out } => {
            GainOptProblem::outage(loss_model, AngularErrorModel::rayleigh(accuracy)?, p_out)?
        }
    };
    let opt = optimal_gain(&problem)?;
    let mut s = *template;
    for end in [&mut s.tx, &mut s.rx] {
        end.gain = opt.gain;
        end.loss_model = loss_model;
        end.error_model = problem.accuracy;
    }
    s.approach = approach.into();
    Ok((s, opt))
}

/// Maximum ranges over a grid of pointing accuracies (rows) and PPM orders
/// (columns), with optimal gains in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeTable {
    pub approach: GainApproach,
    /// Row parameters in rad.
    pub accuracies: Vec<f64>,
    pub ppm_orders: Vec<u32>,
    pub designs: Vec<GainOptimum>,
    /// `ranges[row][col]` in m.
    pub ranges: Vec<Vec<f64>>,
    pub data_rates_bps: Vec<f64>,
    pub peak_powers_w: Vec<f64>,
}

pub fn range_table(
    template: &LinkScenario,
    approach: GainApproach,
    loss_model: PointingLossModel,
    accuracies: &[f64],
    ppm_orders: &[u32],
    registry: &RequiredFluxRegistry,
) -> Result<RangeTable> {
    let mut designs = Vec::with_capacity(accuracies.len());
    let mut ranges = Vec::with_capacity(accuracies.len());
    let mut columns = Vec::with_capacity(ppm_orders.len());
    for &m in ppm_orders {
        let mut signaling = template.signaling;
        signaling.ppm_order = m;
        signaling.validate()?;
        columns.push(signaling);
    }
    for &acc in accuracies {
        let (design, opt) = optimal_design(template, approach, loss_model, acc)?;
        let row = columns
            .iter()
            .map(|&signaling| {
                let s = LinkScenario {
                    signaling,
                    ..design
                };
                max_range(&s, registry, template.required_margin_db)
            })
            .collect::<Result<Vec<_>>>()?;
        designs.push(opt);
        ranges.push(row);
    }
    Ok(RangeTable {
        approach,
        accuracies: accuracies.to_vec(),
        ppm_orders: ppm_orders.to_vec(),
        designs,
        ranges,
        data_rates_bps: columns
            .iter()
            .map(|c| c.data_rate())
            .collect::<Result<_>>()?,
        peak_powers_w: columns
            .iter()
            .map(|c| c.peak_power(template.average_power))
            .collect::<Result<_>>()?,
    })
}

/// Presentation of numbers in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Two decimals in dB, two-decimal scientific notation for small linear
    /// values, as in a printed budget table.
    #[default]
    Rounded,
    /// Shortest representation that round-trips the f64.
    Full,
}

/// How the linear column of a line is printed at [`Precision::Rounded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Integer,
    Fixed2,
    Scientific2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64, Style),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineItem {
    pub section: &'static str,
    /// Stable machine-readable name.
    pub key: &'static str,
    pub label: String,
    pub db: Option<f64>,
    pub value: Option<Value>,
    pub units: &'static str,
}

fn item(
    section: &'static str,
    key: &'static str,
    label: &str,
    db: Option<f64>,
    value: Option<Value>,
    units: &'static str,
) -> LineItem {
    LineItem {
        section,
        key,
        label: label.to_string(),
        db,
        value,
        units,
    }
}

/// Budget laid out as ordered line items.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub budget: LinkBudget,
    pub items: Vec<LineItem>,
}

pub fn format_db(v: f64, precision: Precision) -> String {
    match precision {
        Precision::Rounded => format!("{:.2}", v + 0.0),
        Precision::Full => format!("{v}"),
    }
}

/// `1.21e-02` style.
fn scientific2(v: f64) -> String {
    let s = format!("{v:.2e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ("-", d),
                None => ("+", exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

pub fn format_value(v: &Value, precision: Precision) -> String {
    match (v, precision) {
        (Value::Text(t), _) => t.clone(),
        (Value::Number(x, _), Precision::Full) => format!("{x}"),
        (Value::Number(x, Style::Integer), Precision::Rounded) if x.fract() == 0.0 => {
            format!("{x:.0}")
        }
        (Value::Number(x, Style::Integer | Style::Fixed2), Precision::Rounded) => format!("{x:.2}"),
        (Value::Number(x, Style::Scientific2), Precision::Rounded) => scientific2(*x),
    }
}

impl BudgetReport {
    pub fn item(&self, key: &str) -> Option<&LineItem> {
        self.items.iter().find(|i| i.key == key)
    }

    /// Aligned plain text grouped by section.
    pub fn to_text(&self, precision: Precision) -> String {
        let rows: Vec<(&LineItem, String, String)> = self
            .items
            .iter()
            .map(|i| {
                (
                    i,
                    i.db.map(|d| format_db(d, precision)).unwrap_or_default(),
                    i.value
                        .as_ref()
                        .map(|v| format_value(v, precision))
                        .unwrap_or_default(),
                )
            })
            .collect();
        let label_w = rows
            .iter()
            .map(|r| r.0.label.chars().count())
            .max()
            .unwrap_or(0)
            .max(15);
        let db_w = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(2);
        let val_w = rows.iter().map(|r| r.2.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<label_w$}  {:>db_w$}  {:>val_w$}  Units",
            "Link Parameter", "dB", "Value"
        );
        let mut section = "";
        for (i, db, val) in &rows {
            if i.section != section {
                section = i.section;
                let _ = writeln!(out, "[{section}]");
            }
            let line = format!(
                "{:<label_w$}  {db:>db_w$}  {val:>val_w$}  {}",
                i.label, i.units
            );
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }

    /// `key.db=value` and `key.value=value` records, one per line.
    pub fn to_kv(&self, precision: Precision) -> String {
        let mut out = String::new();
        for i in &self.items {
            if let Some(d) = i.db {
                let _ = writeln!(out, "{}.db={}", i.key, format_db(d, precision));
            }
            if let Some(v) = &i.value {
                let _ = writeln!(out, "{}.value={}", i.key, format_value(v, precision));
            }
        }
        out
    }
}

fn pattern_name(model: PointingLossModel) -> &'static str {
    match model {
        PointingLossModel::GaussianBeam => "Gaussian Beam",
        PointingLossModel::CircularAperture => "Circular Aperture",
        PointingLossModel::ExpApprox { .. } => "Exponential Approx.",
    }
}

fn accuracy_items(scenario: &LinkScenario) -> Vec<LineItem> {
    const S: &str = "Signaling and Fixed Parameter";
    let mut items = Vec::new();
    let ends = [("tx", &scenario.tx), ("rx", &scenario.rx)];
    let same = scenario.tx.error_model == scenario.rx.error_model
        && scenario.tx.loss_model == scenario.rx.loss_model;
    for (side, end) in ends.iter().take(if same { 1 } else { 2 }) {
        let suffix = if same {
            String::new()
        } else {
            format!(" ({side})")
        };
        let (name, key) = match end.error_model {
            AngularErrorModel::WorstCase { .. } => (
                "theta_max",
                if same {
                    "theta_max"
                } else if *side == "tx" {
                    "theta_max_tx"
                } else {
                    "theta_max_rx"
                },
            ),
            AngularErrorModel::Rayleigh { .. } | AngularErrorModel::Rician { .. } => (
                "sigma",
                if same {
                    "sigma"
                } else if *side == "tx" {
                    "sigma_tx"
                } else {
                    "sigma_rx"
                },
            ),
        };
        let label = format!("{name}, {}{suffix}", pattern_name(end.loss_model));
        let v = Value::Number(end.error_model.scale() / MICRORADIAN, Style::Fixed2);
        items.push(item(S, key, &label, None, Some(v), "urad"));
    }
    if let PointingApproach::Outage { p_out } = scenario.approach {
        items.push(item(
            S,
            "p_out",
            "Outage Probability",
            None,
            Some(Value::Number(p_out * 100.0, Style::Fixed2)),
            "%",
        ));
    }
    items
}

fn build_report(scenario: &LinkScenario, b: LinkBudget) -> BudgetReport {
    const SIG: &str = "Signaling and Fixed Parameter";
    const LASER: &str = "Laser Transmitter";
    const TX: &str = "Deep Space Orbiter";
    const RANGE: &str = "Range";
    const RX: &str = "Near Earth Orbiter";
    const OTHER: &str = "Other";
    const PERF: &str = "Link Performance";
    let sig = &scenario.signaling;
    let num = |x: f64, s: Style| Some(Value::Number(x, s));
    let mut items = vec![
        item(
            SIG,
            "ppm_order",
            "PPM Order",
            None,
            num(sig.ppm_order as f64, Style::Integer),
            "",
        ),
        item(
            SIG,
            "code_rate",
            "Convolutional Code Rate",
            None,
            Some(Value::Text(sig.code_rate.to_string())),
            "",
        ),
        item(
            SIG,
            "slot_time",
            "Slot Time",
            None,
            num(sig.slot_time_ns(), Style::Integer),
            "ns",
        ),
        item(
            SIG,
            "guard_time",
            "Guard Time",
            None,
            num(sig.guard_fraction * 100.0, Style::Integer),
            "%",
        ),
        item(
            SIG,
            "noise_flux",
            "Mean Noise Flux",
            Some(b.noise_flux_db),
            num(scenario.noise_flux, Style::Scientific2),
            "phe/ns",
        ),
        item(
            SIG,
            "noise_per_slot",
            "Mean Noise Flux per slot",
            None,
            num(b.noise_per_slot, Style::Fixed2),
            "phe/slot",
        ),
    ];
    if scenario.approach != PointingApproach::Neglected {
        items.extend(accuracy_items(scenario));
    }
    items.extend([
        item(
            LASER,
            "average_power",
            "Average Laser Power",
            Some(b.average_power_dbw),
            num(scenario.average_power, Style::Fixed2),
            "W",
        ),
        item(
            LASER,
            "peak_power",
            "Peak Laser Power",
            Some(linear_to_db(b.peak_power_w)),
            num(b.peak_power_w, Style::Integer),
            "W",
        ),
        item(
            LASER,
            "wavelength",
            "Wavelength",
            None,
            num(scenario.wavelength / NANOMETRE, Style::Integer),
            "nm",
        ),
        item(
            TX,
            "tx_gain",
            "Far-Field Antenna Gain",
            Some(b.tx_gain_db),
            None,
            "",
        ),
        item(
            TX,
            "tx_efficiency",
            "Transmitter Efficiency",
            Some(b.tx_efficiency_db),
            None,
            "",
        ),
        item(
            RANGE,
            "space_loss",
            "Space Loss",
            Some(b.space_loss_db),
            num(m_to_au(scenario.range), Style::Fixed2),
            "AU",
        ),
        item(RX, "rx_gain", "Receiver Gain", Some(b.rx_gain_db), None, ""),
        item(
            RX,
            "rx_efficiency",
            "Receiver Efficiency",
            Some(b.rx_efficiency_db),
            None,
            "",
        ),
        item(
            OTHER,
            "other_losses",
            "Detection/Implementation Losses",
            Some(b.other_losses_db),
            None,
            "",
        ),
        item(
            OTHER,
            "atmospheric_loss",
            "Atmospheric Loss",
            Some(b.atmospheric_loss_db),
            None,
            "",
        ),
        item(
            OTHER,
            "pointing_loss",
            "Pointing Loss",
            Some(b.pointing_loss_db),
            None,
            "",
        ),
        item(
            OTHER,
            "photon_energy",
            "Photons per Joule (per ns)",
            Some(b.photon_term_db),
            None,
            "phe/ns/W",
        ),
        item(
            PERF,
            "received_power",
            "Average Received Power",
            Some(b.received_power_dbw),
            None,
            "W",
        ),
        item(
            PERF,
            "received_flux",
            "Average Received Photon Flux",
            Some(b.received_flux_db),
            num(
                crate::units::db_to_linear(b.received_flux_db),
                Style::Scientific2,
            ),
            "phe/ns",
        ),
    ]);
    if let (Some(req), Some(req_p), Some(lm)) =
        (b.required_flux_db, b.required_power_dbw, b.link_margin_db)
    {
        items.extend([
            item(
                PERF,
                "required_power",
                "Minimum Average Received Power",
                Some(req_p),
                None,
                "W",
            ),
            item(
                PERF,
                "required_flux",
                "Minimum Average Received Photon Flux",
                Some(req),
                num(crate::units::db_to_linear(req), Style::Scientific2),
                "phe/ns",
            ),
            item(PERF, "link_margin", "Link Margin", Some(lm), None, ""),
        ]);
    }
    if let Some(fer) = scenario.fer_target {
        items.push(item(
            PERF,
            "fer_target",
            "FER target",
            None,
            num(fer, Style::Scientific2),
            "",
        ));
    }
    items.push(item(
        PERF,
        "data_rate",
        "Information Data Rate",
        None,
        num(b.data_rate_bps / 1e6, Style::Fixed2),
        "Mbps",
    ));
    if b.pointing.beyond_first_null {
        items.push(item(
            OTHER,
            "beyond_first_null",
            "Pointing beyond first null",
            None,
            Some(Value::Text("yes".into())),
            "",
        ));
    }
    BudgetReport { budget: b, items }
}

/// Budget report for the scenario as specified.
pub fn budget_report(
    scenario: &LinkScenario,
    registry: &RequiredFluxRegistry,
) -> Result<BudgetReport> {
    let b = link_budget(scenario, registry)?;
    Ok(build_report(scenario, b))
}

/// Report for a design that ignores pointing, with an extra line giving the
/// margin the same design actually achieves once the scenario's pointing
/// approach is applied.
pub fn budget_report_ignoring_pointing(
    scenario: &LinkScenario,
    registry: &RequiredFluxRegistry,
) -> Result<BudgetReport> {
    let naive = scenario.with_approach(PointingApproach::Neglected);
    let mut report = budget_report(&naive, registry)?;
    if scenario.approach != PointingApproach::Neglected {
        let actual = link_margin(scenario, registry)?;
        report.items.push(item(
            "Link Performance",
            "actual_link_margin",
            "Link Margin with Pointing Loss",
            Some(actual),
            None,
            "",
        ));
    }
    Ok(report)
}
