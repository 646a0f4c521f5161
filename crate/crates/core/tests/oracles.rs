//! Checks against values computed independently of the library code paths.

use approx::assert_relative_eq;
use pointloss_core::budget::{link_budget, max_range, photon_term_db, space_loss_db};
use pointloss_core::outage::{outage_closed_form, solve_margin, LinkEndPointing};
use pointloss_core::signaling::{RequiredFluxRegistry, DEFAULT_GUARD_FRACTION};
use pointloss_core::units::{au_to_m, db_to_linear, m_to_au};
use pointloss_core::{
    bessel_j1, AngularErrorModel, AntennaSpec, CodeRate, ErrorKind, LinkScenario, PointingApproach,
    PointingLossModel, ScppmConfig,
};
use proptest::prelude::*;

const URAD: f64 = 1e-6;

#[test]
fn bessel_j1_reference_values() {
    // Reference values from scipy.special.j1.
    let table = [
        (0.5, 0.2422684576748739),
        (1.0, 0.4400505857449335),
        (2.5, 0.4970941024642741),
        (5.0, -0.3275791375914652),
        (7.9, 0.21917939992175126),
        (10.0, 0.04347274616886144),
        (20.0, 0.0668331241758502),
        (50.0, -0.09751182812517509),
    ];
    for (x, want) in table {
        assert!(
            (bessel_j1(x) - want).abs() < 1e-12,
            "J1({x}) = {}",
            bessel_j1(x)
        );
    }
    assert!(bessel_j1(3.831_705_970_207_512_5).abs() < 1e-14);
}

fn rayleigh_end(gain: f64, sigma: f64) -> LinkEndPointing {
    LinkEndPointing::new(
        gain,
        PointingLossModel::GaussianBeam,
        AngularErrorModel::rayleigh(sigma).unwrap(),
    )
    .unwrap()
}

/// Brute-force P(X + Y > k), X ~ Exp(mean a), Y ~ Exp(mean b), by a
/// midpoint rule over X.
fn brute_force_outage(a: f64, b: f64, k: f64) -> f64 {
    let n = 200_000;
    let h = k / n as f64;
    let tail_x = (-k / a).exp();
    let inner: f64 = (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            (-x / a).exp() / a * (-(k - x) / b).exp()
        })
        .sum();
    tail_x + inner * h
}

#[test]
fn closed_form_outage_matches_brute_force_convolution() {
    for (gt, gr, st, sr, k) in [
        (1e13, 1e12, 0.3, 0.5, 1.5),
        (3e12, 3e12, 0.4, 0.4, 2.0),
        (5e12, 2e12, 0.2, 0.9, 4.0),
        (8e12, 8.000001e12, 0.35, 0.35, 0.7),
    ] {
        let (st, sr) = (st * URAD, sr * URAD);
        let closed = outage_closed_form(&rayleigh_end(gt, st), &rayleigh_end(gr, sr), k).unwrap();
        // Attenuation G theta^2 of a Rayleigh angle is exponential with mean 2 G sigma^2.
        let oracle = brute_force_outage(2.0 * gt * st * st, 2.0 * gr * sr * sr, k);
        assert_relative_eq!(closed, oracle, max_relative = 1e-8);
    }
}

#[test]
fn single_sided_outage_is_exponential() {
    let sigma = 0.4 * URAD;
    let g = 2e12;
    let k = 1.3;
    let p = outage_closed_form(&rayleigh_end(0.0, sigma), &rayleigh_end(g, sigma), k).unwrap();
    assert_relative_eq!(
        p,
        (-k / (2.0 * g * sigma * sigma)).exp(),
        max_relative = 1e-14
    );
}

fn mars() -> LinkScenario {
    let end = AntennaSpec {
        gain: db_to_linear(129.0),
        efficiency: db_to_linear(-5.0),
        loss_model: PointingLossModel::GaussianBeam,
        error_model: AngularErrorModel::worst_case(0.35 * URAD).unwrap(),
    };
    LinkScenario {
        wavelength: 1064e-9,
        range: au_to_m(2.68),
        average_power: 5.0,
        tx: end,
        rx: end,
        other_losses: db_to_linear(-4.0),
        approach: PointingApproach::Deterministic,
        signaling: ScppmConfig::new(
            64,
            CodeRate::new(1, 3).unwrap(),
            256e-9,
            DEFAULT_GUARD_FRACTION,
        )
        .unwrap(),
        noise_flux: 1.21e-2,
        required_margin_db: 3.0,
        fer_target: None,
    }
}

#[test]
fn mars_budget_by_hand() {
    // Every term written out directly in linear units.
    let lambda: f64 = 1064e-9;
    let r = 2.68 * 1.495_978_71e11;
    let h = 6.626_070_15e-34;
    let c = 299_792_458.0;
    let space = (lambda / (4.0 * std::f64::consts::PI * r)).powi(2);
    let g = 10f64.powf(12.9);
    let eff = 10f64.powf(-0.5);
    let pointing = (-g * (0.35e-6f64).powi(2)).exp().powi(2);
    let power = 5.0 * g * eff * space * g * eff * 10f64.powf(-0.4) * pointing;
    let flux = power * lambda / (h * c) * 1e-9;
    let required = 10f64.powf(-3.576);

    let budget = link_budget(&mars(), &RequiredFluxRegistry::builtin()).unwrap();
    assert_relative_eq!(
        budget.received_power_dbw,
        10.0 * power.log10(),
        epsilon = 1e-9
    );
    assert_relative_eq!(budget.received_flux_db, 10.0 * flux.log10(), epsilon = 1e-9);
    assert_relative_eq!(
        budget.link_margin_db.unwrap(),
        10.0 * (flux / required).log10(),
        epsilon = 1e-9
    );
    assert_relative_eq!(
        space_loss_db(lambda, r).unwrap(),
        10.0 * space.log10(),
        epsilon = 1e-9
    );
    assert_relative_eq!(photon_term_db(lambda).unwrap(), 97.2886, epsilon = 1e-4);
}

#[test]
fn max_range_leaves_exactly_the_required_margin() {
    let registry = RequiredFluxRegistry::builtin();
    let s = mars();
    let r = max_range(&s, &registry, 3.0).unwrap();
    let at_r = link_budget(&s.with_range(r), &registry).unwrap();
    assert_relative_eq!(at_r.link_margin_db.unwrap(), 3.0, epsilon = 1e-9);
    assert!(m_to_au(r) < 2.68);
}

#[test]
fn missing_registry_entry_names_the_key() {
    let mut s = mars();
    s.noise_flux = 0.5;
    let err = link_budget(&s, &RequiredFluxRegistry::builtin()).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Domain);
    let msg = err.to_string();
    assert!(msg.contains("M = 64") && msg.contains("T_s = 256"), "{msg}");
}

#[test]
fn registry_file_errors_carry_line_numbers() {
    let err = RequiredFluxRegistry::parse(
        "# header\n64 1/3 256 1.21e-2 -35.76\n64 1/3 oops 1.21e-2 -1\n",
    )
    .unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Input);
    assert!(err.to_string().contains("line 3"), "{err}");
}

proptest! {
    #[test]
    fn margin_solve_inverts_brute_force(
        gt in 1e11f64..1e13, gr in 1e11f64..1e13,
        st in 0.1f64..1.0, sr in 0.1f64..1.0,
        p in 0.01f64..0.5,
    ) {
        let (st, sr) = (st * URAD, sr * URAD);
        let spec = solve_margin(&rayleigh_end(gt, st), &rayleigh_end(gr, sr), p).unwrap();
        let oracle = brute_force_outage(2.0 * gt * st * st, 2.0 * gr * sr * sr, spec.k_nats);
        prop_assert!((oracle - p).abs() / p < 1e-6, "{} vs {}", oracle, p);
    }
}
