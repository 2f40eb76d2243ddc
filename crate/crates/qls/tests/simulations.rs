use std::path::Path;

use qls::commands::{clock, rabi, ramsey, spectrum};
use qls::config::{Config, LoadedConfig};

fn scenario(name: &str) -> Config {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    LoadedConfig::load(&p).unwrap().config
}

#[test]
fn every_mode_has_a_spectrum_peak_within_one_step() {
    let cfg = scenario("spectrum.toml");
    let s = spectrum::compute(&cfg).unwrap();
    let step = cfg.spectrum.step_hz;
    for (label, m) in &s.modes {
        // red sidebands of ground-state-cooled modes are suppressed
        let signs: &[f64] = if m.nbar >= 1.0 { &[-1.0, 1.0] } else { &[1.0] };
        for &sign in signs {
            let f = sign * m.frequency;
            let near = s.peaks_hz.iter().any(|p| (p - f).abs() <= step * 1.0001);
            assert!(near, "no peak near {label} at {f} Hz");
        }
    }
    // red and blue sidebands of the cold axial modes are asymmetric
    let at = |f: f64| {
        s.curve
            .iter()
            .min_by(|a, b| (a.0 - f).abs().total_cmp(&(b.0 - f).abs()))
            .unwrap()
            .1
    };
    let (_, ax) = s.modes.iter().find(|(l, _)| l.to_string() == "z,i").unwrap();
    assert!(at(ax.frequency) > 5.0 * at(-ax.frequency));
}

#[test]
fn wait_scan_decays_at_twice_the_lifetime() {
    let cfg = scenario("ramsey_wait.toml");
    let w = ramsey::wait_scan(&cfg, 0, Some(200)).unwrap();
    let tau = w.model_fit.params[1];
    let want = 2.0 * cfg.constants.al_3p1_lifetime_s;
    assert!((tau / want - 1.0).abs() < 0.02, "τ = {tau}");
    // the noisy estimate agrees with the model inside three standard errors
    let m = w.measured_fit.unwrap();
    assert!(
        (m.params[1] - tau).abs() < 3.0 * m.scaled_sigma(1),
        "{} ± {}",
        m.params[1],
        m.scaled_sigma(1)
    );
}

#[test]
fn clock_line_is_probe_time_limited() {
    let cfg = scenario("clock.toml");
    let c = clock::compute(&cfg, 0, None).unwrap();
    // sinc² of a 1 ms π pulse: FWHM ≈ 0.7987 / t
    assert!((c.fwhm_model_hz - 798.7).abs() < 2.0, "{}", c.fwhm_model_hz);
    let m = c.fwhm_measured_hz.unwrap();
    assert!((700.0..=1100.0).contains(&m), "{m}");
}

#[test]
fn sideband_flop_peaks_near_fifteen_microseconds() {
    let mut cfg = scenario("rabi.toml");
    cfg.rabi.t_max_s = 30e-6;
    cfg.rabi.points = 61;
    let r = rabi::compute(&cfg, 0, Some(20)).unwrap();
    let peak = r.points.iter().max_by(|a, b| a.model.total_cmp(&b.model)).unwrap();
    assert!(peak.model >= 0.90, "{}", peak.model);
    assert!((peak.duration - 15e-6).abs() <= 1e-6, "{}", peak.duration);
}

#[test]
fn carrier_flop_fit_recovers_dephasing() {
    let mut cfg = scenario("rabi.toml");
    cfg.rabi.transition = qls::config::RabiTransition::Carrier;
    cfg.rabi.decay_rate_per_s = Some(0.0);
    cfg.rabi.dephasing_rate_per_s = 2e4;
    cfg.rabi.t_max_s = 200e-6;
    cfg.rabi.points = 201;
    cfg.protocol.sideband_pi_fidelity = 1.0;
    let r = rabi::compute(&cfg, 3, Some(2000)).unwrap();
    let t: Vec<f64> = r.points.iter().map(|p| p.duration).collect();
    let y: Vec<f64> = r.points.iter().map(|p| p.model).collect();
    let fit = rabi::fit_flop(&t, &y, &vec![1e-3; t.len()], cfg.rabi.carrier_pi_time_s).unwrap();
    // on resonance with no decay the Bloch vector oscillation damps at γ/2
    let lambda = fit.params[2];
    assert!((lambda / 1e4 - 1.0).abs() < 0.05, "λ = {lambda}");
    let noisy = r.fit.unwrap();
    assert!(
        (noisy.params[2] / 1e4 - 1.0).abs() < 0.15,
        "noisy λ = {}",
        noisy.params[2]
    );
}
