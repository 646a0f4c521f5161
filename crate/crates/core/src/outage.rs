//! Pointing margins: deterministic worst-case attenuation, and the margin
//! that holds the two-sided pointing outage probability at a target.
//!
//! With Rayleigh errors and an exponential-family pattern, `alpha G theta^2`
//! is exponential with mean `2 alpha G sigma^2`, so the outage of a two-ended
//! link is the survival function of a sum of two independent exponentials.
//! Everything else goes through [`outage_numeric`] or Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure_nonnegative, ensure_probability, Error, Result};
use crate::pointing::{AngularErrorModel, PointingLossModel};
use crate::quad::{integrate, QuadOptions};
use crate::units::{db_to_nats, nats_to_db};

/// Relative gap between the two exponential means below which the
/// closed form switches to its equal-means (gamma) limit.
pub const DEGENERATE_TOLERANCE: f64 = 1e-6;

/// Pointing description of one end of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEndPointing {
    /// Boresight gain, linear. Zero means the end contributes no pointing loss.
    pub gain: f64,
    pub loss_model: PointingLossModel,
    pub error_model: AngularErrorModel,
}

impl LinkEndPointing {
    pub fn new(
        gain: f64,
        loss_model: PointingLossModel,
        error_model: AngularErrorModel,
    ) -> Result<Self> {
        let end = Self {
            gain,
            loss_model,
            error_model,
        };
        end.validate()?;
        Ok(end)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_nonnegative("gain", self.gain)?;
        self.loss_model.validate()?;
        self.error_model.validate()
    }

    pub fn with_gain(&self, gain: f64) -> Self {
        Self { gain, ..*self }
    }

    pub fn attenuation_nats(&self, theta: f64) -> f64 {
        self.loss_model.attenuation_nats(self.gain, theta)
    }

    /// `alpha G sigma^2`: half the mean of the exponential attenuation.
    fn exponential_half_mean(&self) -> Result<f64> {
        match self.error_model {
            AngularErrorModel::Rayleigh { sigma } => {
                Ok(self.loss_model.exponent_scale() * self.gain * sigma * sigma)
            }
            AngularErrorModel::Rician { .. } => Err(Error::NoClosedForm("a Rician angular error")),
            AngularErrorModel::WorstCase { .. } => Err(Error::UseDeterministicPath),
        }
    }
}

/// A pointing margin with its outage target and natural-log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSpec {
    pub p_out_target: f64,
    /// `A_p*` in dB.
    pub margin_db: f64,
    /// `K = ln(10)/10 * A_p*`.
    pub k_nats: f64,
}

impl OutageSpec {
    pub fn new(p_out_target: f64, margin_db: f64) -> Result<Self> {
        ensure_probability("p_out_target", p_out_target)?;
        ensure_nonnegative("margin_db", margin_db)?;
        Ok(Self {
            p_out_target,
            margin_db,
            k_nats: db_to_nats(margin_db),
        })
    }
}

/// Attenuation to budget for pointing, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingMargin {
    pub attenuation_db: f64,
    /// Set when a circular-aperture end is evaluated at or past its first
    /// null, where the margin no longer describes the main lobe.
    pub beyond_first_null: bool,
}

impl PointingMargin {
    pub const NONE: PointingMargin = PointingMargin {
        attenuation_db: 0.0,
        beyond_first_null: false,
    };

    fn combine(self, other: PointingMargin) -> PointingMargin {
        PointingMargin {
            attenuation_db: self.attenuation_db + other.attenuation_db,
            beyond_first_null: self.beyond_first_null || other.beyond_first_null,
        }
    }
}

/// How pointing attenuation enters a budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointingApproach {
    /// Loss at the worst-case angle of each end, summed in dB.
    Deterministic,
    /// Margin exceeded with probability `p_out`.
    Outage { p_out: f64 },
    /// No pointing loss at all.
    Neglected,
}

/// Worst-case pointing attenuation of one end.
pub fn deterministic_margin(end: &LinkEndPointing) -> Result<PointingMargin> {
    end.validate()?;
    match end.error_model {
        AngularErrorModel::WorstCase { theta_max } => Ok(PointingMargin {
            attenuation_db: nats_to_db(end.attenuation_nats(theta_max)),
            beyond_first_null: end.loss_model.beyond_first_null(end.gain, theta_max),
        }),
        _ => Err(Error::UseOutagePath),
    }
}

/// Worst-case pointing attenuation of both ends; dB margins add.
pub fn deterministic_margin_pair(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
) -> Result<PointingMargin> {
    Ok(deterministic_margin(tx)?.combine(deterministic_margin(rx)?))
}

/// Survival function of `Y_t + Y_r` for independent exponentials with means
/// `2a` and `2b`, evaluated at `k`.
fn sum_of_exponentials_survival(a: f64, b: f64, k: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    if a == 0.0 || b == 0.0 {
        let m = a.max(b);
        return (-k / (2.0 * m)).exp();
    }
    let p = if (a - b).abs() / a.max(b) < DEGENERATE_TOLERANCE {
        let x = k / (a + b);
        (1.0 + x) * (-x).exp()
    } else {
        // (a e^{-k/2a} - b e^{-k/2b}) / (a - b), factored so the difference of
        // exponentials goes through expm1 and stays accurate as a -> b.
        let (a, b) = if a >= b { (a, b) } else { (b, a) };
        let d = a - b;
        let t = k * d / (2.0 * a * b);
        (-k / (2.0 * a)).exp() * (1.0 - b * (-t).exp_m1() / d)
    };
    p.clamp(0.0, 1.0)
}

/// Closed-form outage probability for a margin of `k_nats`.
///
/// Both ends need Rayleigh errors. Gaussian-beam and exponential patterns
/// are exact; the circular aperture is evaluated through its exponential
/// approximation. A zero gain drops that end out of the sum.
pub fn outage_closed_form(tx: &LinkEndPointing, rx: &LinkEndPointing, k_nats: f64) -> Result<f64> {
    tx.validate()?;
    rx.validate()?;
    ensure_nonnegative("k_nats", k_nats)?;
    let a = tx.exponential_half_mean()?;
    let b = rx.exponential_half_mean()?;
    Ok(sum_of_exponentials_survival(a, b, k_nats))
}

/// Bisection for the `K` at which a strictly decreasing outage curve meets
/// `p_out`. The upper bracket starts at `k_hint` and doubles.
fn solve_k<F>(mut outage: F, p_out: f64, k_hint: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = 0.0;
    let mut hi = if k_hint.is_finite() && k_hint > 0.0 {
        k_hint
    } else {
        1.0
    };
    let mut doublings = 0;
    while outage(hi)? > p_out {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1000 || !hi.is_finite() {
            return Err(Error::NonConvergence {
                what: "margin bracket doubling",
                achieved: hi,
                wanted: p_out,
            });
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if outage(mid)? > p_out {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Margin `A_p*` (dB) whose closed-form outage probability equals `p_out`.
pub fn solve_margin(tx: &LinkEndPointing, rx: &LinkEndPointing, p_out: f64) -> Result<OutageSpec> {
    ensure_probability("p_out", p_out)?;
    tx.validate()?;
    rx.validate()?;
    let a = tx.exponential_half_mean()?;
    let b = rx.exponential_half_mean()?;
    if a == 0.0 && b == 0.0 {
        return OutageSpec::new(p_out, 0.0);
    }
    let k = solve_k(
        |k| Ok(sum_of_exponentials_survival(a, b, k)),
        p_out,
        2.0 * (a + b),
    )?;
    let achieved = sum_of_exponentials_survival(a, b, k);
    if (achieved - p_out).abs() > 1e-10 {
        return Err(Error::NonConvergence {
            what: "closed-form margin solve",
            achieved: (achieved - p_out).abs(),
            wanted: 1e-10,
        });
    }
    OutageSpec::new(p_out, nats_to_db(k))
}

/// Margin whose numerically integrated outage equals `p_out`, for error or
/// loss models without a closed form.
pub fn solve_margin_numeric(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
    p_out: f64,
) -> Result<OutageSpec> {
    ensure_probability("p_out", p_out)?;
    if tx.gain == 0.0 && rx.gain == 0.0 {
        return OutageSpec::new(p_out, 0.0);
    }
    let hint = 2.0
        * [tx, rx]
            .iter()
            .map(|e| {
                e.loss_model.exponent_scale() * e.gain * e.error_model.support_upper().powi(2)
                    / 1600.0
            })
            .sum::<f64>();
    let k = solve_k(|k| outage_numeric(tx, rx, nats_to_db(k)), p_out, hint)?;
    OutageSpec::new(p_out, nats_to_db(k))
}

/// Total pointing attenuation to budget for a pair of ends.
pub fn total_pointing_attenuation(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
    approach: PointingApproach,
) -> Result<PointingMargin> {
    match approach {
        PointingApproach::Deterministic => deterministic_margin_pair(tx, rx),
        PointingApproach::Neglected => Ok(PointingMargin::NONE),
        PointingApproach::Outage { p_out } => {
            let rayleigh =
                |e: &LinkEndPointing| matches!(e.error_model, AngularErrorModel::Rayleigh { .. });
            let spec = if rayleigh(tx) && rayleigh(rx) {
                solve_margin(tx, rx, p_out)?
            } else {
                solve_margin_numeric(tx, rx, p_out)?
            };
            Ok(PointingMargin {
                attenuation_db: spec.margin_db,
                beyond_first_null: false,
            })
        }
    }
}

/// Monte Carlo outage estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub exceedances: u64,
}

impl MonteCarloEstimate {
    fn from_counts(exceedances: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = exceedances as f64 / n;
        Self {
            estimate: p,
            std_error: (p * (1.0 - p) / n).sqrt(),
            trials,
            exceedances,
        }
    }
}

fn count_exceedances<R: Rng + ?Sized>(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
    k_nats: f64,
    n_trials: u64,
    rng: &mut R,
) -> u64 {
    let mut hits = 0;
    for _ in 0..n_trials {
        let theta_t = tx.error_model.sample(rng);
        let theta_r = rx.error_model.sample(rng);
        let total = tx.attenuation_nats(theta_t) + rx.attenuation_nats(theta_r);
        // NaN cannot occur: attenuation is >= 0 or +inf at a null.
        if total > k_nats {
            hits += 1;
        }
    }
    hits
}

fn check_mc_inputs(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
    margin_db: f64,
    n_trials: u64,
) -> Result<()> {
    tx.validate()?;
    rx.validate()?;
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "must be >= 1"));
    }
    if !margin_db.is_finite() {
        return Err(Error::invalid("margin_db", "must be finite"));
    }
    Ok(())
}

/// Fraction of `n_trials` random pointing draws whose total attenuation
/// strictly exceeds `margin_db`. Accepts every error/loss combination,
/// including Rician errors and the exact circular aperture; pattern nulls
/// count as outages.
pub fn outage_monte_carlo<R: Rng + ?Sized>(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
    margin_db: f64,
    n_trials: u64,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    check_mc_inputs(tx, rx, margin_db, n_trials)?;
    let hits = count_exceedances(tx, rx, db_to_nats(margin_db), n_trials, rng);
    Ok(MonteCarloEstimate::from_counts(hits, n_trials))
}

/// Parallel Monte Carlo. Partition `i` draws from ChaCha8 seeded with `seed`
/// on stream `i`, and trials are split evenly with the remainder going to the
/// lowest partitions, so results depend only on `(seed, partitions)`.
pub fn outage_monte_carlo_partitioned(
    tx: &LinkEndPointing,
    rx: &LinkEndPointing,
    margin_db: f64,
    n_trials: u64,
    seed: u64,
    partitions: u32,
) -> Result<MonteCarloEstimate> {
    check_mc_inputs(tx, rx, margin_db, n_trials)?;
    if partitions == 0 {
        return Err(Error::invalid("partitions", "must be >= 1"));
    }
    let k = db_to_nats(margin_db);
    let p = u64::from(partitions);
    let hits: u64 = (0..p)
        .into_par_iter()
        .map(|i| {
            let share = n_trials / p + u64::from(i < n_trials % p);
            let mut rng = partition_rng(seed, i);
            count_exceedances(tx, rx, k, share, &mut rng)
        })
        .sum();
    Ok(MonteCarloEstimate::from_counts(hits, n_trials))
}

/// The random stream used by partition `index` of a seeded run.
pub fn partition_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Outage probability by deterministic quadrature, for any pair of
/// stochastic error models and any loss models.
///
/// Conditioning on the transmit angle,
/// `P_out = S_t(theta_t*(K)) + int_0^{theta_t*(K)} f_t(theta) S_r(theta_r*(K - A_t(theta))) dtheta`,
/// where `theta*(a)` is the main-lobe angle at which an end's attenuation
/// reaches `a` and `S` is an end's angle survival function. Circular
/// apertures are treated on their main lobe: sidelobe angles are counted as
/// outages, which is exact whenever each end's share of the margin stays
/// below the first sidelobe level (about 17.6 dB).
pub fn outage_numeric(tx: &LinkEndPointing, rx: &LinkEndPointing, margin_db: f64) -> Result<f64> {
    tx.validate()?;
    rx.validate()?;
    for e in [tx, rx] {
        if !e.error_model.is_stochastic() {
            return Err(Error::UseDeterministicPath);
        }
    }
    if margin_db.is_nan() {
        return Err(Error::invalid("margin_db", "must not be NaN"));
    }
    let k = db_to_nats(margin_db);
    // Integrate over an end with nonzero gain.
    let (outer, inner) = if tx.gain > 0.0 { (tx, rx) } else { (rx, tx) };
    if outer.gain == 0.0 {
        return Ok(0.0);
    }
    if k <= 0.0 {
        return Ok(1.0);
    }
    let cut = outer.loss_model.main_lobe_angle(outer.gain, k);
    let tail = outer.error_model.survival(cut)?;
    if inner.gain == 0.0 {
        return Ok(tail);
    }
    let upper = cut.min(outer.error_model.support_upper());
    let mut failure = None;
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let body = integrate(
        |theta| {
            let remaining = k - outer.attenuation_nats(theta);
            let theta_inner = inner.loss_model.main_lobe_angle(inner.gain, remaining);
            match inner.error_model.survival(theta_inner) {
                Ok(s) => outer.error_model.pdf(theta).unwrap_or(0.0) * s,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        upper,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((tail + body.value).clamp(0.0, 1.0))
}
