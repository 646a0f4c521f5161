//! Angular-error distributions and antenna pointing-loss patterns.
//!
//! Angles are radians and gains are linear throughout. A pointing loss is the
//! fraction `L_p` in `(0, 1]` of the boresight gain realized at an off-axis
//! angle; its attenuation is `-ln L_p` (nats) or `-10 log10 L_p` (dB).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::special::{bessel_i0e, bessel_j1, J1_FIRST_ZERO};

/// Exponent scale that makes `exp(-alpha G theta^2)` track the
/// circular-aperture pattern near boresight.
pub const CIRCULAR_APERTURE_ALPHA: f64 = 0.188;

/// Statistical law of the miss-pointing angle, or a deterministic
/// worst-case angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularErrorModel {
    /// Zero-mean i.i.d. Gaussian azimuth/elevation errors with per-axis
    /// standard deviation `sigma`.
    Rayleigh { sigma: f64 },
    /// Gaussian axis errors with a bias of magnitude `bias` from boresight.
    Rician { sigma: f64, bias: f64 },
    /// A single maximum angle, no distribution.
    WorstCase { theta_max: f64 },
}

impl AngularErrorModel {
    pub fn rayleigh(sigma: f64) -> Result<Self> {
        let m = AngularErrorModel::Rayleigh { sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn rician(sigma: f64, bias: f64) -> Result<Self> {
        let m = AngularErrorModel::Rician { sigma, bias };
        m.validate()?;
        Ok(m)
    }

    pub fn worst_case(theta_max: f64) -> Result<Self> {
        let m = AngularErrorModel::WorstCase { theta_max };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AngularErrorModel::Rayleigh { sigma } => {
                ensure_positive("sigma", sigma)?;
            }
            AngularErrorModel::Rician { sigma, bias } => {
                ensure_positive("sigma", sigma)?;
                ensure_nonnegative("bias", bias)?;
            }
            AngularErrorModel::WorstCase { theta_max } => {
                // Zero is allowed: a perfectly pointed end.
                ensure_nonnegative("theta_max", theta_max)?;
            }
        }
        Ok(())
    }

    pub fn is_stochastic(&self) -> bool {
        !matches!(self, AngularErrorModel::WorstCase { .. })
    }

    /// The scale parameter: `sigma` for the stochastic laws, `theta_max` otherwise.
    pub fn scale(&self) -> f64 {
        match *self {
            AngularErrorModel::Rayleigh { sigma } | AngularErrorModel::Rician { sigma, .. } => {
                sigma
            }
            AngularErrorModel::WorstCase { theta_max } => theta_max,
        }
    }

    /// Returns the same law with its angular scale (and bias) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            AngularErrorModel::Rayleigh { sigma } => AngularErrorModel::Rayleigh {
                sigma: sigma * factor,
            },
            AngularErrorModel::Rician { sigma, bias } => AngularErrorModel::Rician {
                sigma: sigma * factor,
                bias: bias * factor,
            },
            AngularErrorModel::WorstCase { theta_max } => AngularErrorModel::WorstCase {
                theta_max: theta_max * factor,
            },
        }
    }

    /// Probability density of the miss-pointing angle.
    pub fn pdf(&self, theta: f64) -> Result<f64> {
        if theta.is_nan() || theta < 0.0 {
            return Err(Error::invalid(
                "theta",
                format!("must be >= 0, got {theta}"),
            ));
        }
        self.validate()?;
        match *self {
            AngularErrorModel::Rayleigh { sigma } => Ok(rayleigh_pdf(sigma, theta)),
            AngularErrorModel::Rician { sigma, bias } => Ok(rician_pdf(sigma, bias, theta)),
            AngularErrorModel::WorstCase { .. } => Err(Error::NoDensity),
        }
    }

    /// Probability that the angle exceeds `theta`. Closed form for Rayleigh,
    /// quadrature of the density for Rician.
    pub fn survival(&self, theta: f64) -> Result<f64> {
        if theta <= 0.0 {
            return Ok(1.0);
        }
        match *self {
            AngularErrorModel::Rayleigh { sigma } => {
                Ok((-theta * theta / (2.0 * sigma * sigma)).exp())
            }
            AngularErrorModel::Rician { sigma, bias } => {
                let hi = self.support_upper();
                if theta >= hi {
                    return Ok(0.0);
                }
                let opts = crate::quad::QuadOptions {
                    abs_tol: 1e-14,
                    rel_tol: 1e-12,
                    max_intervals: 500,
                };
                if theta < bias {
                    let inner =
                        crate::quad::integrate(|t| rician_pdf(sigma, bias, t), 0.0, theta, opts)?;
                    Ok((1.0 - inner.value).clamp(0.0, 1.0))
                } else {
                    let tail =
                        crate::quad::integrate(|t| rician_pdf(sigma, bias, t), theta, hi, opts)?;
                    Ok(tail.value.clamp(0.0, 1.0))
                }
            }
            AngularErrorModel::WorstCase { theta_max } => {
                Ok(if theta < theta_max { 1.0 } else { 0.0 })
            }
        }
    }

    /// An angle beyond which the density is negligible (below `exp(-800)`
    /// relative to its peak).
    pub fn support_upper(&self) -> f64 {
        match *self {
            AngularErrorModel::Rayleigh { sigma } => 40.0 * sigma,
            AngularErrorModel::Rician { sigma, bias } => bias + 40.0 * sigma,
            AngularErrorModel::WorstCase { theta_max } => theta_max,
        }
    }

    /// Draws one angle. Worst-case models return `theta_max` every time.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AngularErrorModel::Rayleigh { sigma } => {
                // (0, 1] keeps the logarithm finite.
                let u = 1.0 - rng.random::<f64>();
                rayleigh_from_uniform(sigma, u)
            }
            AngularErrorModel::Rician { sigma, bias } => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                (bias + sigma * z1).hypot(sigma * z2)
            }
            AngularErrorModel::WorstCase { theta_max } => theta_max,
        }
    }
}

fn rayleigh_pdf(sigma: f64, theta: f64) -> f64 {
    let s2 = sigma * sigma;
    theta / s2 * (-theta * theta / (2.0 * s2)).exp()
}

fn rician_pdf(sigma: f64, bias: f64, theta: f64) -> f64 {
    let s2 = sigma * sigma;
    let d = theta - bias;
    // exp(-(t^2 + b^2)/2s^2) I0(t b / s^2) = exp(-(t - b)^2/2s^2) I0e(t b / s^2)
    theta / s2 * (-d * d / (2.0 * s2)).exp() * bessel_i0e(theta * bias / s2)
}

/// Inverse-CDF transform of a uniform `u` in `(0, 1]` to a Rayleigh angle.
pub fn rayleigh_from_uniform(sigma: f64, u: f64) -> f64 {
    sigma * (-2.0 * u.ln()).sqrt()
}

/// Density of the miss-pointing angle; see [`AngularErrorModel::pdf`].
pub fn error_pdf(model: &AngularErrorModel, theta: f64) -> Result<f64> {
    model.pdf(theta)
}

/// One draw of the miss-pointing angle; see [`AngularErrorModel::sample`].
pub fn error_sample<R: Rng + ?Sized>(model: &AngularErrorModel, rng: &mut R) -> f64 {
    model.sample(rng)
}

/// Antenna pattern mapping an off-axis angle to a gain fraction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PointingLossModel {
    /// `exp(-G theta^2)`.
    #[default]
    GaussianBeam,
    /// `(2 J1(sqrt(G) theta) / (sqrt(G) theta))^2`.
    CircularAperture,
    /// `exp(-alpha G theta^2)`.
    ExpApprox { alpha: f64 },
}

impl PointingLossModel {
    /// Exponential approximation with the circular-aperture fit `alpha = 0.188`.
    pub const fn exp_approx_circular() -> Self {
        PointingLossModel::ExpApprox {
            alpha: CIRCULAR_APERTURE_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let PointingLossModel::ExpApprox { alpha } = *self {
            ensure_positive("alpha", alpha)?;
        }
        Ok(())
    }

    /// The exponent scale `alpha` for which `exp(-alpha G theta^2)` equals
    /// (or, for the circular aperture, approximates) this pattern.
    pub fn exponent_scale(&self) -> f64 {
        match *self {
            PointingLossModel::GaussianBeam => 1.0,
            PointingLossModel::CircularAperture => CIRCULAR_APERTURE_ALPHA,
            PointingLossModel::ExpApprox { alpha } => alpha,
        }
    }

    /// Gain fraction realized at `theta` off boresight.
    pub fn loss_fraction(&self, gain: f64, theta: f64) -> f64 {
        match *self {
            PointingLossModel::GaussianBeam => (-gain * theta * theta).exp(),
            PointingLossModel::ExpApprox { alpha } => (-alpha * gain * theta * theta).exp(),
            PointingLossModel::CircularAperture => {
                let u = gain.sqrt() * theta;
                if u.abs() < 1e-8 {
                    // 2 J1(u)/u = 1 - u^2/8 + O(u^4)
                    let r = 1.0 - u * u / 8.0;
                    r * r
                } else {
                    let r = 2.0 * bessel_j1(u) / u;
                    r * r
                }
            }
        }
    }

    /// Attenuation `-ln L_p` in nats. Infinite at circular-aperture nulls.
    pub fn attenuation_nats(&self, gain: f64, theta: f64) -> f64 {
        match *self {
            PointingLossModel::GaussianBeam => gain * theta * theta,
            PointingLossModel::ExpApprox { alpha } => alpha * gain * theta * theta,
            PointingLossModel::CircularAperture => -self.loss_fraction(gain, theta).ln(),
        }
    }

    /// True when `theta` lies at or past the first null of the pattern, where
    /// a pointing margin stops being meaningful. Only the circular aperture
    /// has nulls.
    pub fn beyond_first_null(&self, gain: f64, theta: f64) -> bool {
        matches!(self, PointingLossModel::CircularAperture) && gain.sqrt() * theta >= J1_FIRST_ZERO
    }

    /// Smallest main-lobe angle whose attenuation reaches `nats`. For the
    /// exponential family this is `sqrt(nats / (alpha G))`; for the circular
    /// aperture it is found by bisection on `[0, first null)`.
    pub fn main_lobe_angle(&self, gain: f64, nats: f64) -> f64 {
        if nats <= 0.0 {
            return 0.0;
        }
        if gain <= 0.0 {
            return f64::INFINITY;
        }
        match *self {
            PointingLossModel::GaussianBeam | PointingLossModel::ExpApprox { .. } => {
                (nats / (self.exponent_scale() * gain)).sqrt()
            }
            PointingLossModel::CircularAperture => {
                let root_g = gain.sqrt();
                let (mut lo, mut hi) = (0.0, J1_FIRST_ZERO);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.attenuation_nats(1.0, mid) < nats {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi) / root_g
            }
        }
    }
}

/// Gain fraction realized at `theta`; see [`PointingLossModel::loss_fraction`].
pub fn loss_fraction(model: &PointingLossModel, gain: f64, theta: f64) -> f64 {
    model.loss_fraction(gain, theta)
}
