//! Physical constants and unit conversions.

use std::f64::consts::LN_10;

/// Astronomical unit in metres (149 597 871 km).
pub const AU: f64 = 149_597_871_000.0;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const MICRORADIAN: f64 = 1e-6;
pub const NANOSECOND: f64 = 1e-9;
pub const NANOMETRE: f64 = 1e-9;

/// dB per neper of power: `10 / ln 10`.
pub const DB_PER_NAT: f64 = 10.0 / LN_10;

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Attenuation in dB to the natural-log exponent `K = ln(10)/10 * dB`.
#[inline]
pub fn db_to_nats(db: f64) -> f64 {
    db * (LN_10 / 10.0)
}

#[inline]
pub fn nats_to_db(nats: f64) -> f64 {
    nats * DB_PER_NAT
}

#[inline]
pub fn au_to_m(au: f64) -> f64 {
    au * AU
}

#[inline]
pub fn m_to_au(m: f64) -> f64 {
    m / AU
}
