use std::f64::consts::{FRAC_PI_2, PI, TAU};

use qls::commands::fit;
use qls_core::constants::CODATA;
use qls_core::dynamics::{ramsey_excitation, NoiseModel, QuantumState, RamseySequence};
use qls_core::metrology::synthetic::{sample_phase_set, zeeman_campaign, ZeemanCampaignParams};
use qls_core::metrology::{estimate_detuning_contrast, fit_zeeman_line, Frequency, ZeemanFitOptions};
use qls_core::rng::stream_rng;

const T_PULSE: f64 = 50e-6;
const T_WAIT: f64 = 100e-6;

/// Excitation at the four analysis phases from the master equation with
/// finite pulses.
fn forward(delta_hz: f64) -> [f64; 4] {
    let seq = RamseySequence::half_pi(T_PULSE, T_WAIT);
    let g = QuantumState::ground(0);
    [0.0, FRAC_PI_2, -FRAC_PI_2, PI]
        .map(|phi| ramsey_excitation(&seq, TAU * delta_hz, phi, T_WAIT, &g, &NoiseModel::ideal()).unwrap())
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

#[test]
fn ramsey_estimator_is_unbiased_on_simulated_fringes() {
    let mut rng = stream_rng(21, 0);
    for delta in [-300.0, -80.0, 0.0, 40.0, 250.0] {
        let probs = forward(delta);
        let runs = 4000;
        let mut est = Vec::with_capacity(runs);
        let mut reported = Vec::with_capacity(runs);
        for _ in 0..runs {
            let set = sample_phase_set(probs, 100, T_PULSE, T_WAIT, &mut rng).unwrap();
            let e = estimate_detuning_contrast(&set).unwrap();
            est.push(e.detuning);
            reported.push(e.detuning_sigma);
        }
        let (m, sd) = mean_sd(&est);
        let se = sd / (runs as f64).sqrt();
        // finite-pulse phase correction is first order in δ/Ω
        let model = 2e-3 * delta.abs();
        assert!((m - delta).abs() < 4.0 * se + model, "δ={delta}: mean {m} ± {se}");
        let (rep, _) = mean_sd(&reported);
        assert!((rep / sd - 1.0).abs() < 0.1, "δ={delta}: reported {rep}, scatter {sd}");
    }
}

fn opts(p: &ZeemanCampaignParams) -> ZeemanFitOptions {
    use qls_core::constants::CITED;
    ZeemanFitOptions {
        g_s: CITED.g_ca_s12.value,
        g_d: CITED.g_ca_d52.value,
        frequency_ratio: p.frequency_ratio,
    }
}

struct Stats {
    f0: Vec<f64>,
    reported: Vec<f64>,
    chi2: Vec<f64>,
    dependence: Vec<f64>,
}

fn campaigns(p: &ZeemanCampaignParams, runs: usize, seed: u64) -> Stats {
    let mut s = Stats {
        f0: vec![],
        reported: vec![],
        chi2: vec![],
        dependence: vec![],
    };
    for i in 0..runs {
        let mut rng = stream_rng(seed, i as u64);
        let sets = zeeman_campaign(p, &CODATA, &mut rng).unwrap();
        let f = fit_zeeman_line(&sets, Frequency::from_hz(0), &opts(p), &CODATA).unwrap();
        s.dependence.push(fit::dependence_from_fit(&f).unwrap().delta);
        s.f0.push(f.f0_offset);
        s.reported.push(f.f0_sigma);
        s.chi2.push(f.chi2);
    }
    s
}

#[test]
fn eighteen_set_campaign_gives_36_hz() {
    let p = ZeemanCampaignParams::default();
    let runs = 600;
    let s = campaigns(&p, runs, 4);
    let (m, sd) = mean_sd(&s.f0);
    assert!(m.abs() < 4.0 * sd / (runs as f64).sqrt(), "bias {m}");
    // sd of a sample sd is ≈ σ/√(2n)
    assert!(
        (sd - 36.0).abs() < 4.0 * 36.0 / (2.0 * runs as f64).sqrt(),
        "scatter {sd}"
    );
    let (rep, _) = mean_sd(&s.reported);
    assert!((rep / 36.0 - 1.0).abs() < 0.02, "reported {rep}");
}

#[test]
fn uncertainty_scales_as_inverse_root_n() {
    let base = ZeemanCampaignParams::default();
    let mut sig = vec![];
    for n in [18usize, 72] {
        let p = ZeemanCampaignParams {
            n_sets: n,
            ..base.clone()
        };
        let s = campaigns(&p, 300, 9);
        sig.push(mean_sd(&s.f0).1);
    }
    let ratio = sig[0] / sig[1];
    assert!((ratio - 2.0).abs() < 0.25, "σ18/σ72 = {ratio}");
}

#[test]
fn residuals_match_their_error_bars() {
    let p = ZeemanCampaignParams::default();
    let runs = 600;
    let s = campaigns(&p, runs, 5);
    // χ² of a two-parameter line through 18 points has 16 degrees of freedom
    let (m, _) = mean_sd(&s.chi2);
    let se = (2.0 * 16.0 / runs as f64).sqrt();
    assert!((m - 16.0).abs() < 4.0 * se, "mean χ² {m}");
    // long and short Ramsey times agree without an injected shift
    let (d, sd) = mean_sd(&s.dependence);
    assert!(d.abs() < 4.0 * sd / (runs as f64).sqrt(), "δ {d}");
}

#[test]
fn injected_ramsey_shift_is_recovered() {
    let p = ZeemanCampaignParams {
        long_ramsey_shift: 40.0,
        ..ZeemanCampaignParams::default()
    };
    let runs = 600;
    let s = campaigns(&p, runs, 6);
    let (d, sd) = mean_sd(&s.dependence);
    assert!((d - 40.0).abs() < 4.0 * sd / (runs as f64).sqrt(), "δ {d}");
}
