//! SCPPM signaling arithmetic.
//!
//! Data rate and peak power of a pulse-position-modulated link with guard
//! slots, Poisson slot statistics, and the table of minimum received flux
//! per configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use statrs::function::gamma::ln_gamma;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::units::NANOSECOND;

/// SCPPM codeword length in bits.
pub const CODEWORD_BITS: u32 = 15_120;
/// CRC and termination bits per codeword.
pub const OVERHEAD_BITS: u32 = 34;
/// Guard fraction recommended for laser recharge: `M/4` idle slots.
pub const DEFAULT_GUARD_FRACTION: f64 = 0.25;

const MIN_PPM_ORDER: u32 = 4;
const MAX_PPM_ORDER: u32 = 256;

/// Convolutional code rate as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeRate {
    num: u32,
    den: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl CodeRate {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::invalid(
                "code_rate",
                format!("need 0 < R < 1, got {num}/{den}"),
            ));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Information bits per codeword before CRC and termination, `15120 R`.
    /// Fails unless the product is an integer.
    pub fn information_bits(&self) -> Result<u32> {
        let scaled = CODEWORD_BITS as u64 * self.num as u64;
        if !scaled.is_multiple_of(self.den as u64) {
            return Err(Error::invalid(
                "code_rate",
                format!("{CODEWORD_BITS} * {self} is not an integer"),
            ));
        }
        Ok((scaled / self.den as u64) as u32)
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CodeRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("code_rate", format!("expected `num/den`, got `{s}`"));
        let (n, d) = s.split_once('/').ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let d = d.trim().parse().map_err(|_| bad())?;
        CodeRate::new(n, d)
    }
}

/// PPM order, code rate, slot time and guard fraction of an SCPPM link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScppmConfig {
    pub ppm_order: u32,
    pub code_rate: CodeRate,
    /// Slot duration in seconds.
    pub slot_time: f64,
    pub guard_fraction: f64,
}

impl ScppmConfig {
    pub fn new(
        ppm_order: u32,
        code_rate: CodeRate,
        slot_time: f64,
        guard_fraction: f64,
    ) -> Result<Self> {
        let c = Self {
            ppm_order,
            code_rate,
            slot_time,
            guard_fraction,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.ppm_order;
        if !m.is_power_of_two() || !(MIN_PPM_ORDER..=MAX_PPM_ORDER).contains(&m) {
            return Err(Error::invalid(
                "ppm_order",
                format!("must be a power of two in {MIN_PPM_ORDER}..={MAX_PPM_ORDER}, got {m}"),
            ));
        }
        ensure_positive("slot_time", self.slot_time)?;
        ensure_nonnegative("guard_fraction", self.guard_fraction)?;
        let guard = m as f64 * self.guard_fraction;
        if (guard - guard.round()).abs() > 1e-9 {
            return Err(Error::invalid(
                "guard_fraction",
                format!("M * guard_fraction must be a whole number of slots, got {guard}"),
            ));
        }
        self.code_rate.information_bits()?;
        Ok(())
    }

    /// Bits carried by one PPM symbol, `log2 M`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.ppm_order.trailing_zeros()
    }

    /// Idle slots appended to each symbol.
    pub fn guard_slots(&self) -> u32 {
        (self.ppm_order as f64 * self.guard_fraction).round() as u32
    }

    /// Slot time in ns.
    pub fn slot_time_ns(&self) -> f64 {
        self.slot_time / NANOSECOND
    }

    /// Information data rate in bit/s.
    pub fn data_rate(&self) -> Result<f64> {
        self.validate()?;
        let payload = (self.code_rate.information_bits()? - OVERHEAD_BITS) as f64;
        let symbols = CODEWORD_BITS as f64 / self.bits_per_symbol() as f64;
        let symbol_time = self.ppm_order as f64 * self.slot_time * (1.0 + self.guard_fraction);
        Ok(payload / (symbols * symbol_time))
    }

    /// Peak laser power for the average power `p_avg` (W).
    pub fn peak_power(&self, p_avg: f64) -> Result<f64> {
        self.validate()?;
        ensure_positive("p_avg", p_avg)?;
        Ok(p_avg * peak_to_average(self.ppm_order, self.guard_fraction))
    }
}

/// Peak-to-average power ratio with one pulsed slot per `M (1 + guard)`.
pub fn peak_to_average(ppm_order: u32, guard_fraction: f64) -> f64 {
    ppm_order as f64 * (1.0 + guard_fraction)
}

pub fn data_rate(config: &ScppmConfig) -> Result<f64> {
    config.data_rate()
}

pub fn peak_power(p_avg: f64, config: &ScppmConfig) -> Result<f64> {
    config.peak_power(p_avg)
}

/// Mean signal and background photon counts per slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelFlux {
    pub signal: f64,
    pub background: f64,
}

impl ChannelFlux {
    pub fn new(signal: f64, background: f64) -> Result<Self> {
        ensure_nonnegative("n_s", signal)?;
        ensure_nonnegative("n_b", background)?;
        Ok(Self { signal, background })
    }
}

/// Probability of counting `k` photons in a slot: Poisson with mean
/// `n_s + n_b` in the pulsed slot and `n_b` otherwise. Evaluated in log space.
pub fn slot_pmf(k: u64, flux: ChannelFlux, pulsed: bool) -> f64 {
    let mean = if pulsed {
        flux.signal + flux.background
    } else {
        flux.background
    };
    poisson_pmf(k, mean)
}

fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (k * mean.ln() - mean - ln_gamma(k + 1.0)).exp()
}

/// Background photons per slot from a flux in photons/ns and a slot time in s.
pub fn noise_per_slot(noise_flux_per_ns: f64, slot_time: f64) -> Result<f64> {
    ensure_nonnegative("noise_flux", noise_flux_per_ns)?;
    ensure_nonnegative("slot_time", slot_time)?;
    Ok(noise_flux_per_ns * slot_time / NANOSECOND)
}

/// Registry key. Slot time in ns and background flux in photons/ns, as they
/// appear in the registry file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequiredFluxKey {
    pub ppm_order: u32,
    pub code_rate: CodeRate,
    pub slot_time_ns: f64,
    pub noise_flux: f64,
}

impl RequiredFluxKey {
    pub fn for_config(config: &ScppmConfig, noise_flux: f64) -> Self {
        Self {
            ppm_order: config.ppm_order,
            code_rate: config.code_rate,
            slot_time_ns: config.slot_time_ns(),
            noise_flux,
        }
    }

    fn matches(&self, other: &RequiredFluxKey) -> bool {
        self.ppm_order == other.ppm_order
            && self.code_rate == other.code_rate
            && close(self.slot_time_ns, other.slot_time_ns)
            && close(self.noise_flux, other.noise_flux)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REGISTRY_REL_TOL * a.abs().max(b.abs())
}

/// Relative tolerance used to match slot time and background flux.
pub const REGISTRY_REL_TOL: f64 = 1e-9;

/// One registry row.
#[derive(Debug, Clone, PartialEq)]
pub struct RequiredFluxEntry {
    pub key: RequiredFluxKey,
    /// Minimum flux in dB photons/ns.
    pub n_s_min_db: f64,
}

/// Minimum received flux per configuration, loaded from a plain-text table.
///
/// Each non-comment line holds five whitespace-separated fields:
/// `ppm_order code_rate slot_time_ns noise_flux_phe_per_ns n_s_min_db`.
/// `#` starts a comment; blank lines are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RequiredFluxRegistry {
    entries: Vec<RequiredFluxEntry>,
}

const BUILTIN_REGISTRY: &str = include_str!("../data/required_flux.txt");

impl RequiredFluxRegistry {
    /// The registry shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_REGISTRY).expect("bundled registry parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<RequiredFluxEntry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::RegistryParse {
                line: line_no,
                reason,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(err(format!("expected 5 fields, found {}", fields.len())));
            }
            let ppm_order: u32 = fields[0]
                .parse()
                .map_err(|_| err(format!("bad ppm_order `{}`", fields[0])))?;
            let code_rate: CodeRate = fields[1].parse().map_err(|e: Error| err(e.to_string()))?;
            let num = |idx: usize, name: &str| -> Result<f64> {
                fields[idx]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("bad {name} `{}`", fields[idx])))
            };
            let slot_time_ns = num(2, "slot_time_ns")?;
            let noise_flux = num(3, "noise_flux")?;
            let n_s_min_db = num(4, "n_s_min_db")?;
            if slot_time_ns <= 0.0 || noise_flux < 0.0 {
                return Err(err("slot time must be > 0 and noise flux >= 0".into()));
            }
            let key = RequiredFluxKey {
                ppm_order,
                code_rate,
                slot_time_ns,
                noise_flux,
            };
            if entries.iter().any(|e| e.key.matches(&key)) {
                return Err(err("duplicate key".into()));
            }
            entries.push(RequiredFluxEntry { key, n_s_min_db });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[RequiredFluxEntry] {
        &self.entries
    }

    pub fn insert(&mut self, key: RequiredFluxKey, n_s_min_db: f64) {
        match self.entries.iter_mut().find(|e| e.key.matches(&key)) {
            Some(e) => e.n_s_min_db = n_s_min_db,
            None => self.entries.push(RequiredFluxEntry { key, n_s_min_db }),
        }
    }

    /// Minimum flux in dB photons/ns for `key`.
    pub fn lookup(&self, key: &RequiredFluxKey) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| e.key.matches(key))
            .map(|e| e.n_s_min_db)
            .ok_or_else(|| Error::MissingRequiredFlux {
                ppm_order: key.ppm_order,
                code_rate: key.code_rate.to_string(),
                slot_time_ns: key.slot_time_ns,
                noise_flux: key.noise_flux,
            })
    }

    /// Pairs of entries that differ only in PPM order where the larger order
    /// does not need strictly less flux.
    pub fn monotonicity_violations(&self) -> Vec<(RequiredFluxKey, RequiredFluxKey)> {
        let mut out = Vec::new();
        for a in &self.entries {
            for b in &self.entries {
                let same_rest = a.key.code_rate == b.key.code_rate
                    && close(a.key.slot_time_ns, b.key.slot_time_ns)
                    && close(a.key.noise_flux, b.key.noise_flux);
                if same_rest && a.key.ppm_order < b.key.ppm_order && b.n_s_min_db >= a.n_s_min_db {
                    out.push((a.key, b.key));
                }
            }
        }
        out
    }
}

/// Minimum flux (dB photons/ns) for a configuration.
pub fn required_flux(
    registry: &RequiredFluxRegistry,
    config: &ScppmConfig,
    noise_flux: f64,
) -> Result<f64> {
    registry.lookup(&RequiredFluxKey::for_config(config, noise_flux))
}
