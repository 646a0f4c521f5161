//! Effective system gain `G_eff = (G_t L_t)(G_r L_r)` and the antenna gain
//! that maximizes it.
//!
//! Raising the gain narrows the beam, so pointing attenuation grows with it;
//! past some gain the product falls. For the exponential pattern family the
//! optimum sits where the total pointing attenuation is `20 / ln 10` dB,
//! whichever approach sets the margin.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_probability, Error, Result};
use crate::outage::{
    total_pointing_attenuation, LinkEndPointing, PointingApproach, PointingMargin,
};
use crate::pointing::{AngularErrorModel, PointingLossModel};
use crate::units::{db_to_linear, linear_to_db};

/// Default gain search bracket in dB.
pub const DEFAULT_BRACKET_DB: (f64, f64) = (60.0, 160.0);

const GOLDEN_TOL_DB: f64 = 1e-7;
const EDGE_TOL_DB: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainApproach {
    Deterministic,
    Outage { p_out: f64 },
}

impl From<GainApproach> for PointingApproach {
    fn from(a: GainApproach) -> Self {
        match a {
            GainApproach::Deterministic => PointingApproach::Deterministic,
            GainApproach::Outage { p_out } => PointingApproach::Outage { p_out },
        }
    }
}

/// Symmetric gain optimization: both ends share gain, pattern and accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainOptProblem {
    pub approach: GainApproach,
    pub loss_model: PointingLossModel,
    /// Worst-case angle for [`GainApproach::Deterministic`], a distribution
    /// for [`GainApproach::Outage`].
    pub accuracy: AngularErrorModel,
    pub bracket_db: (f64, f64),
}

impl GainOptProblem {
    pub fn deterministic(loss_model: PointingLossModel, theta_max: f64) -> Result<Self> {
        let p = Self {
            approach: GainApproach::Deterministic,
            loss_model,
            accuracy: AngularErrorModel::worst_case(theta_max)?,
            bracket_db: DEFAULT_BRACKET_DB,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn outage(
        loss_model: PointingLossModel,
        accuracy: AngularErrorModel,
        p_out: f64,
    ) -> Result<Self> {
        let p = Self {
            approach: GainApproach::Outage { p_out },
            loss_model,
            accuracy,
            bracket_db: DEFAULT_BRACKET_DB,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_bracket(mut self, lo_db: f64, hi_db: f64) -> Result<Self> {
        self.bracket_db = (lo_db, hi_db);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.loss_model.validate()?;
        self.accuracy.validate()?;
        match self.approach {
            GainApproach::Deterministic => {
                if self.accuracy.is_stochastic() {
                    return Err(Error::UseOutagePath);
                }
                if self.accuracy.scale() <= 0.0 {
                    return Err(Error::invalid(
                        "theta_max",
                        "must be > 0 to bound the optimal gain",
                    ));
                }
            }
            GainApproach::Outage { p_out } => {
                ensure_probability("p_out", p_out)?;
                if !self.accuracy.is_stochastic() {
                    return Err(Error::UseDeterministicPath);
                }
            }
        }
        let (lo, hi) = self.bracket_db;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(
                "bracket_db",
                format!("need finite lo < hi, got [{lo}, {hi}]"),
            ));
        }
        Ok(())
    }

    /// The shared end description at linear gain `gain`.
    pub fn end(&self, gain: f64) -> LinkEndPointing {
        LinkEndPointing {
            gain,
            loss_model: self.loss_model,
            error_model: self.accuracy,
        }
    }

    /// Total pointing attenuation of both ends at `gain_db`.
    pub fn total_attenuation(&self, gain_db: f64) -> Result<PointingMargin> {
        let end = self.end(db_to_linear(gain_db));
        total_pointing_attenuation(&end, &end, self.approach.into())
    }

    pub fn effective_gain_at(&self, gain_db: f64) -> Result<f64> {
        Ok(effective_gain_db(
            gain_db,
            self.total_attenuation(gain_db)?.attenuation_db,
        ))
    }
}

/// `2 G[dB] - A_p,tot[dB]` for identical ends.
pub fn effective_gain_db(gain_db: f64, total_pointing_attenuation_db: f64) -> f64 {
    2.0 * gain_db - total_pointing_attenuation_db
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainOptimum {
    pub gain: f64,
    pub gain_db: f64,
    pub attenuation_db: f64,
    pub effective_gain_db: f64,
    /// True when the gain came from `1 / theta_max^2` rather than a search.
    pub closed_form: bool,
}

/// Golden-section maximization of `f` on `[lo, hi]`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        iterations += 1;
        if iterations > 500 {
            return Err(Error::NonConvergence {
                what: "golden-section search",
                achieved: b - a,
                wanted: tol,
            });
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok((x, fx))
}

/// Gain that maximizes the effective system gain.
///
/// The deterministic Gaussian-beam case is closed form (`1 / theta_max^2`);
/// everything else is a golden-section search on gain in dB over the
/// problem's bracket, which fails if the maximizer lands on a bracket edge.
pub fn optimal_gain(problem: &GainOptProblem) -> Result<GainOptimum> {
    problem.validate()?;
    if problem.approach == GainApproach::Deterministic
        && problem.loss_model == PointingLossModel::GaussianBeam
    {
        let theta = problem.accuracy.scale();
        let gain = 1.0 / (theta * theta);
        let gain_db = linear_to_db(gain);
        let attenuation_db = problem.total_attenuation(gain_db)?.attenuation_db;
        return Ok(GainOptimum {
            gain,
            gain_db,
            attenuation_db,
            effective_gain_db: effective_gain_db(gain_db, attenuation_db),
            closed_form: true,
        });
    }
    let (lo, hi) = problem.bracket_db;
    let (gain_db, best) =
        golden_section_max(|g| problem.effective_gain_at(g), lo, hi, GOLDEN_TOL_DB)?;
    let at_lo = problem.effective_gain_at(lo)?;
    let at_hi = problem.effective_gain_at(hi)?;
    if gain_db - lo < EDGE_TOL_DB || best < at_lo {
        return Err(Error::BracketEdge {
            edge_db: lo,
            lo_db: lo,
            hi_db: hi,
        });
    }
    if hi - gain_db < EDGE_TOL_DB || best < at_hi {
        return Err(Error::BracketEdge {
            edge_db: hi,
            lo_db: lo,
            hi_db: hi,
        });
    }
    Ok(GainOptimum {
        gain: db_to_linear(gain_db),
        gain_db,
        attenuation_db: problem.total_attenuation(gain_db)?.attenuation_db,
        effective_gain_db: best,
        closed_form: false,
    })
}

/// One row of an effective-gain sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gain_db: f64,
    pub attenuation_db: f64,
    pub geff_db: f64,
}

/// Evaluates the effective gain on an ascending grid of gains (dB).
pub fn sweep_effective_gain(
    problem: &GainOptProblem,
    gain_grid_db: &[f64],
) -> Result<Vec<SweepRow>> {
    problem.validate()?;
    if gain_grid_db.is_empty() {
        return Err(Error::invalid("gain_grid_db", "must not be empty"));
    }
    if gain_grid_db
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::invalid("gain_grid_db", "must be strictly ascending"));
    }
    gain_grid_db
        .iter()
        .map(|&gain_db| {
            let attenuation_db = problem.total_attenuation(gain_db)?.attenuation_db;
            Ok(SweepRow {
                gain_db,
                attenuation_db,
                geff_db: effective_gain_db(gain_db, attenuation_db),
            })
        })
        .collect()
}

/// Evenly spaced grid from `start` to `stop` inclusive (within half a step).
pub fn gain_grid_db(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(Error::invalid(
            "grid",
            format!("need start <= stop and step > 0, got {start}:{step}:{stop}"),
        ));
    }
    let n = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Result of the two-gain search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricOptimum {
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub attenuation_db: f64,
    pub effective_gain_db: f64,
}

/// Experimental: joint optimization of transmit and receive gains when the
/// two ends have different accuracy. Successive grid refinement over both
/// gains in dB, shrinking the window around the best node until the step is
/// below 1e-4 dB.
pub fn optimal_gain_asymmetric(
    approach: GainApproach,
    loss_model: PointingLossModel,
    tx_accuracy: AngularErrorModel,
    rx_accuracy: AngularErrorModel,
    bracket_db: (f64, f64),
) -> Result<AsymmetricOptimum> {
    for acc in [tx_accuracy, rx_accuracy] {
        GainOptProblem {
            approach,
            loss_model,
            accuracy: acc,
            bracket_db,
        }
        .validate()?;
    }
    let eval = |gt: f64, gr: f64| -> Result<(f64, f64)> {
        let tx = LinkEndPointing::new(db_to_linear(gt), loss_model, tx_accuracy)?;
        let rx = LinkEndPointing::new(db_to_linear(gr), loss_model, rx_accuracy)?;
        let att = total_pointing_attenuation(&tx, &rx, approach.into())?.attenuation_db;
        Ok((gt + gr - att, att))
    };
    const NODES: usize = 21;
    let (lo, hi) = bracket_db;
    let mut window = [(lo, hi), (lo, hi)];
    let mut best = (f64::NEG_INFINITY, 0.0, lo, lo);
    loop {
        let steps = [
            (window[0].1 - window[0].0) / (NODES - 1) as f64,
            (window[1].1 - window[1].0) / (NODES - 1) as f64,
        ];
        for i in 0..NODES {
            let gt = window[0].0 + i as f64 * steps[0];
            for j in 0..NODES {
                let gr = window[1].0 + j as f64 * steps[1];
                let (geff, att) = eval(gt, gr)?;
                if geff > best.0 {
                    best = (geff, att, gt, gr);
                }
            }
        }
        if steps[0].max(steps[1]) < 1e-4 {
            break;
        }
        window = [
            (
                (best.2 - 2.0 * steps[0]).max(lo),
                (best.2 + 2.0 * steps[0]).min(hi),
            ),
            (
                (best.3 - 2.0 * steps[1]).max(lo),
                (best.3 + 2.0 * steps[1]).min(hi),
            ),
        ];
    }
    for (g, edge) in [(best.2, lo), (best.2, hi), (best.3, lo), (best.3, hi)] {
        if (g - edge).abs() < EDGE_TOL_DB {
            return Err(Error::BracketEdge {
                edge_db: edge,
                lo_db: lo,
                hi_db: hi,
            });
        }
    }
    Ok(AsymmetricOptimum {
        tx_gain_db: best.2,
        rx_gain_db: best.3,
        attenuation_db: best.1,
        effective_gain_db: best.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::DB_PER_NAT;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const X_STAR: f64 = 4.743_864_518_390_578;
    const URAD: f64 = 1e-6;

    fn outage_problem(loss: PointingLossModel, sigma: f64) -> GainOptProblem {
        GainOptProblem::outage(loss, AngularErrorModel::rayleigh(sigma).unwrap(), 0.05).unwrap()
    }

    #[test]
    fn effective_gain_arithmetic() {
        assert!((effective_gain_db(129.0, 8.45) - 249.55).abs() < 1e-12);
        assert_eq!(effective_gain_db(42.0, 0.0), 84.0);
        assert!((effective_gain_db(113.24, 8.686) - 217.794).abs() < 1e-9);
    }

    #[test]
    fn deterministic_gaussian_is_closed_form() {
        let p =
            GainOptProblem::deterministic(PointingLossModel::GaussianBeam, 0.35 * URAD).unwrap();
        let opt = optimal_gain(&p).unwrap();
        assert!(opt.closed_form);
        assert_relative_eq!(opt.gain, 1.0 / (0.35e-6f64).powi(2), max_relative = 1e-15);
        assert_relative_eq!(opt.gain, 8.1633e12, max_relative = 1e-4);
        assert!((opt.gain_db - 129.12).abs() < 0.005);
        assert_relative_eq!(opt.attenuation_db, 2.0 * DB_PER_NAT, max_relative = 1e-12);
    }

    #[test]
    fn deterministic_exp_approx_optimum() {
        let alpha = 0.188;
        let theta = 0.5 * URAD;
        let p =
            GainOptProblem::deterministic(PointingLossModel::ExpApprox { alpha }, theta).unwrap();
        let opt = optimal_gain(&p).unwrap();
        assert!(!opt.closed_form);
        assert!((opt.gain_db - linear_to_db(1.0 / (alpha * theta * theta))).abs() < 0.01);
    }

    #[test]
    fn outage_optimum_matches_analytic_gain() {
        for loss in [
            PointingLossModel::GaussianBeam,
            PointingLossModel::exp_approx_circular(),
        ] {
            let alpha = loss.exponent_scale();
            for sigma in [0.05 * URAD, URAD] {
                let opt = optimal_gain(&outage_problem(loss, sigma)).unwrap();
                let want = linear_to_db(1.0 / (alpha * sigma * sigma * X_STAR));
                assert!(
                    (opt.gain_db - want).abs() < 0.01,
                    "{} vs {want}",
                    opt.gain_db
                );
                assert!((opt.attenuation_db - 20.0 / std::f64::consts::LN_10).abs() < 0.01);
            }
        }
        let one = optimal_gain(&outage_problem(PointingLossModel::GaussianBeam, URAD)).unwrap();
        assert!((one.gain_db - 113.24).abs() < 0.005);
    }

    /// Brute grid search, independent of the golden-section path.
    #[test]
    fn outage_optimum_agrees_with_grid_search() {
        let p = outage_problem(PointingLossModel::GaussianBeam, 0.2 * URAD);
        let grid = gain_grid_db(110.0, 140.0, 0.001).unwrap();
        let rows = sweep_effective_gain(&p, &grid).unwrap();
        let best = rows
            .iter()
            .max_by(|a, b| a.geff_db.total_cmp(&b.geff_db))
            .unwrap();
        let opt = optimal_gain(&p).unwrap();
        assert!((best.gain_db - opt.gain_db).abs() < 0.01);
        assert!(opt.effective_gain_db >= best.geff_db - 1e-9);
    }

    #[test]
    fn circular_outage_uses_approximation_and_circular_deterministic_is_numeric() {
        let a = optimal_gain(&outage_problem(PointingLossModel::CircularAperture, URAD)).unwrap();
        let b = optimal_gain(&outage_problem(
            PointingLossModel::exp_approx_circular(),
            URAD,
        ))
        .unwrap();
        assert!((a.gain_db - b.gain_db).abs() < 1e-5);
        // Exact pattern: G L(theta) peaks where J1(u)^2 does, u = 1.8412.
        let theta = 0.35 * URAD;
        let p = GainOptProblem::deterministic(PointingLossModel::CircularAperture, theta).unwrap();
        let opt = optimal_gain(&p).unwrap();
        let want = linear_to_db((1.841_183_781_340_659_3 / theta).powi(2));
        assert!(
            (opt.gain_db - want).abs() < 0.01,
            "{} vs {want}",
            opt.gain_db
        );
    }

    #[test]
    fn bracket_edge_is_an_error() {
        let p = outage_problem(PointingLossModel::GaussianBeam, URAD)
            .with_bracket(60.0, 100.0)
            .unwrap();
        assert!(matches!(optimal_gain(&p), Err(Error::BracketEdge { .. })));
        let p = outage_problem(PointingLossModel::GaussianBeam, URAD)
            .with_bracket(120.0, 160.0)
            .unwrap();
        assert!(matches!(optimal_gain(&p), Err(Error::BracketEdge { .. })));
        assert!(outage_problem(PointingLossModel::GaussianBeam, URAD)
            .with_bracket(5.0, 5.0)
            .is_err());
    }

    #[test]
    fn problem_validation() {
        let ray = AngularErrorModel::rayleigh(URAD).unwrap();
        assert!(GainOptProblem::outage(PointingLossModel::GaussianBeam, ray, 1.5).is_err());
        assert!(GainOptProblem::outage(
            PointingLossModel::GaussianBeam,
            AngularErrorModel::worst_case(URAD).unwrap(),
            0.05
        )
        .is_err());
        assert!(GainOptProblem::deterministic(PointingLossModel::GaussianBeam, 0.0).is_err());
    }

    #[test]
    fn sweep_rows() {
        let theta = 0.35 * URAD;
        let p = GainOptProblem::deterministic(PointingLossModel::GaussianBeam, theta).unwrap();
        let grid = gain_grid_db(120.0, 135.0, 0.5).unwrap();
        assert_eq!(grid.len(), 31);
        let rows = sweep_effective_gain(&p, &grid).unwrap();
        assert_eq!(rows.len(), grid.len());
        for r in &rows {
            let g = db_to_linear(r.gain_db);
            let want = 2.0 * r.gain_db - 2.0 * DB_PER_NAT * g * theta * theta;
            assert!((r.geff_db - want).abs() < 1e-9);
        }
        let single = sweep_effective_gain(&p, &[129.0]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(
            single[0].geff_db,
            effective_gain_db(129.0, single[0].attenuation_db)
        );
        assert!(sweep_effective_gain(&p, &[]).is_err());
        assert!(sweep_effective_gain(&p, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn asymmetric_reduces_to_symmetric() {
        let acc = AngularErrorModel::rayleigh(0.5 * URAD).unwrap();
        let sym =
            optimal_gain(&outage_problem(PointingLossModel::GaussianBeam, 0.5 * URAD)).unwrap();
        let asym = optimal_gain_asymmetric(
            GainApproach::Outage { p_out: 0.05 },
            PointingLossModel::GaussianBeam,
            acc,
            acc,
            (100.0, 150.0),
        )
        .unwrap();
        assert!((asym.tx_gain_db - sym.gain_db).abs() < 0.05);
        assert!((asym.rx_gain_db - sym.gain_db).abs() < 0.05);
        assert!((asym.effective_gain_db - sym.effective_gain_db).abs() < 1e-3);
        // A steadier end can carry more gain.
        let steady = AngularErrorModel::rayleigh(0.25 * URAD).unwrap();
        let uneven = optimal_gain_asymmetric(
            GainApproach::Deterministic,
            PointingLossModel::GaussianBeam,
            AngularErrorModel::worst_case(0.25 * URAD).unwrap(),
            AngularErrorModel::worst_case(0.5 * URAD).unwrap(),
            (100.0, 150.0),
        )
        .unwrap();
        assert!(uneven.tx_gain_db > uneven.rx_gain_db);
        let _ = steady;
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn optimum_attenuation_is_universal(scale in 0.05f64..2.0, alpha in 0.1f64..1.0, deterministic: bool) {
            let loss = PointingLossModel::ExpApprox { alpha };
            let p = if deterministic {
                GainOptProblem::deterministic(loss, scale * URAD).unwrap()
            } else {
                outage_problem(loss, scale * URAD)
            };
            let opt = optimal_gain(&p).unwrap();
            prop_assert!((opt.attenuation_db - 20.0 / std::f64::consts::LN_10).abs() < 0.01);
        }

        #[test]
        fn scaling_law(sigma in 0.05f64..1.0, c in 0.3f64..3.0) {
            let base = optimal_gain(&outage_problem(PointingLossModel::GaussianBeam, sigma * URAD)).unwrap();
            let scaled = optimal_gain(&outage_problem(PointingLossModel::GaussianBeam, c * sigma * URAD)).unwrap();
            prop_assert!((scaled.gain_db - (base.gain_db - 20.0 * c.log10())).abs() < 0.01);
            prop_assert!((scaled.effective_gain_db - (base.effective_gain_db - 40.0 * c.log10())).abs() < 1e-6);
        }

        #[test]
        fn effective_gain_is_concave(sigma in 0.05f64..1.0, deterministic: bool) {
            let p = if deterministic {
                GainOptProblem::deterministic(PointingLossModel::GaussianBeam, sigma * URAD).unwrap()
            } else {
                outage_problem(PointingLossModel::GaussianBeam, sigma * URAD)
            };
            let grid = gain_grid_db(90.0, 150.0, 0.5).unwrap();
            let rows = sweep_effective_gain(&p, &grid).unwrap();
            for w in rows.windows(3) {
                prop_assert!(w[0].geff_db + w[2].geff_db - 2.0 * w[1].geff_db < 0.0);
            }
        }
    }
}
