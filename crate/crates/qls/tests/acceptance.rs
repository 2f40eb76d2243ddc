//! The numerical acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the report is always printed.

mod support;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qls::commands::{clock, compare, fit, ramsey};
use qls::config::{Config, LoadedConfig};
use qls_core::atomic::{g_factor_from_splitting, quadratic_zeeman_shift, QuadraticZeemanParams};
use qls_core::constants::{mass, CITED, CODATA, NU_CA_HZ};
use qls_core::dynamics::{evolve, ramsey_excitation, NoiseModel, Pulse, QuantumState, RamseySequence};
use qls_core::metrology::synthetic::{sample_phase_set, zeeman_campaign, ZeemanCampaignParams};
use qls_core::metrology::{
    error_budget_apply, estimate_detuning_contrast, fit_zeeman_line, hypothesis_test, ErrorBudget, Frequency,
    ZeemanFitOptions,
};
use qls_core::protocol::{run_batch, ProbeSpec, ProtocolConfig};
use qls_core::rng::stream_rng;
use qls_core::trap::{solve_crystal, IonPair, ModeLabel, TrapConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn scenario(name: &str) -> Config {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    LoadedConfig::load(&p).expect("scenario loads").config
}

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within_rel(x: f64, want: f64, tol: f64) -> bool {
    (x / want - 1.0).abs() <= tol
}

fn modes() -> Check {
    let trap = TrapConfig::default();
    let c = solve_crystal(&trap, IonPair::ca_al(), &CODATA).map_err(|e| e.to_string())?;
    let lo = c.mode(ModeLabel::AXIAL_IN).frequency;
    let hi = c.mode(ModeLabel::AXIAL_OUT).frequency;
    let nu1 = trap.axial_freq_reference_ion;
    let trace = 2.0 * nu1 * nu1 * (1.0 + mass::CA40 / mass::AL27);
    let id = ((lo * lo + hi * hi) / trace - 1.0).abs();
    ensure(
        within_rel(lo, 888e3, 0.01) && within_rel(hi, 1.596e6, 0.01) && id < 1e-9,
        format!(
            "axial {:.1} kHz / {:.1} kHz, trace identity residual {id:.1e}",
            lo / 1e3,
            hi / 1e3
        ),
    )
}

fn quadratic_zeeman() -> Check {
    let p = QuadraticZeemanParams::al_3p1();
    let s = quadratic_zeeman_shift(&p, 4.0, &CODATA);
    let k = p.curvature(&CODATA) * 1e3;
    ensure(
        within_rel(s, -2.109, 0.005) && within_rel(k, -263.74, 0.005),
        format!("shift {s:.4} Hz at 4 G, curvature {k:.2} mHz/G²"),
    )
}

fn g_factor() -> Check {
    let g = g_factor_from_splitting(2.100_056e6, CITED.g_al_1s0.value, &CODATA).map_err(|e| e.to_string())?;
    ensure((g - 0.428132).abs() <= 2e-6, format!("g = {g:.7}"))
}

fn hypothesis() -> Check {
    let a = hypothesis_test(0.0, 18, 36.0).map_err(|e| e.to_string())?;
    // σ_r chosen so that σ = 17 Hz exactly
    let b = hypothesis_test(40.0, 18, 17.0 * 4.5f64.sqrt()).map_err(|e| e.to_string())?;
    ensure(
        (a.sigma - 17.0).abs() <= 0.1 && (0.015..=0.025).contains(&b.p_value) && (b.sigma - 17.0).abs() < 1e-12,
        format!("σ = {:.3} Hz, p(40 Hz | 17 Hz) = {:.4}", a.sigma, b.p_value),
    )
}

fn budget() -> Check {
    let f0 = Frequency::from_hz(1_122_842_857_334_711);
    let ratio = f0.ratio_to(Frequency::from_hz(NU_CA_HZ));
    let r = error_budget_apply(&ErrorBudget::published(ratio), f0).map_err(|e| e.to_string())?;
    ensure(
        (r.correction - 24.5).abs() <= 0.1
            && r.corrected.rounded_hz() == 1_122_842_857_334_736
            && (r.total_uncertainty - 93.0).abs() <= 1.0,
        format!(
            "correction {:+.2} Hz, f = {} Hz, u = {:.2} Hz",
            r.correction,
            r.corrected.rounded_hz(),
            r.total_uncertainty
        ),
    )
}

fn ramsey_decay() -> Check {
    let cfg = scenario("ramsey_wait.toml");
    let w = ramsey::wait_scan(&cfg, 0, None).map_err(|e| e.to_string())?;
    let gamma = 1.0 / cfg.constants.al_3p1_lifetime_s;
    let tau = w.model_fit.params[1];
    ensure(
        (gamma * 299e-6 - 1.0).abs() < 1e-12 && within_rel(tau, 2.0 / gamma, 0.02),
        format!("τ = {:.1} µs against 2/Γ = {:.1} µs", tau * 1e6, 2e6 / gamma),
    )
}

fn clock_width() -> Check {
    let cfg = scenario("clock.toml");
    let c = clock::compute(&cfg, 0, None).map_err(|e| e.to_string())?;
    let m = c.fwhm_measured_hz.ok_or("line fit failed")?;
    ensure(
        (700.0..=1100.0).contains(&m) && cfg.clock.probe_time_s == 1e-3,
        format!("FWHM {m:.0} Hz measured, {:.0} Hz model", c.fwhm_model_hz),
    )
}

fn fidelity_chain() -> Check {
    let c = ProtocolConfig {
        sideband_pi_fidelity: 0.95,
        ..ProtocolConfig::ideal()
    };
    let b = run_batch(&c, &ProbeSpec::Excitation(1.0), 10_000, 0).map_err(|e| e.to_string())?;
    let s = (0.95f64 * 0.05 / 1e4).sqrt();
    let mut worst = 0.0f64;
    for (i, p) in [0.0, 0.1, 0.37, 0.5, 0.8, 1.0].into_iter().enumerate() {
        let r = run_batch(
            &ProtocolConfig::ideal(),
            &ProbeSpec::Excitation(p),
            10_000,
            100 + i as u64,
        )
        .map_err(|e| e.to_string())?;
        let sig = (p * (1.0 - p) / 1e4).sqrt();
        let z = if sig > 0.0 {
            (r.p_hat - p).abs() / sig
        } else if r.p_hat == p {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
    }
    ensure(
        (b.p_hat - 0.95).abs() <= 3.0 * s && worst <= 3.0,
        format!(
            "detected {:.4} (σ {:.4}); ideal limit worst |z| = {worst:.2}",
            b.p_hat, s
        ),
    )
}

fn dynamics_oracle() -> Check {
    let mut rng = stream_rng(2024, 9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho0 = support::from_nalgebra(5, &support::random_density(12, &mut rng));
        let pulses: Vec<Pulse> = (0..3).map(|_| support::random_pulse(&mut rng)).collect();
        let noise = support::random_noise(&mut rng);
        let fast = support::to_nalgebra(&evolve(&rho0, &pulses, &noise).map_err(|e| e.to_string())?);
        worst = worst.max(support::trace_distance(
            &fast,
            &support::propagate(&rho0, &pulses, &noise),
        ));
    }
    ensure(
        worst <= 1e-7,
        format!("worst trace distance {worst:.2e} over 100 sequences on 2×6"),
    )
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

fn estimators() -> Check {
    let (tp, tw) = (50e-6, 100e-6);
    let seq = RamseySequence::half_pi(tp, tw);
    let mut rng = stream_rng(10, 0);
    let mut worst_z = 0.0f64;
    for delta in [-200.0, 0.0, 120.0] {
        let mut probs = [0.0; 4];
        for (p, phi) in probs.iter_mut().zip([0.0, FRAC_PI_2, -FRAC_PI_2, PI]) {
            *p = ramsey_excitation(
                &seq,
                TAU * delta,
                phi,
                tw,
                &QuantumState::ground(0),
                &NoiseModel::ideal(),
            )
            .map_err(|e| e.to_string())?;
        }
        let est: Vec<f64> = (0..3000)
            .map(|_| {
                let set = sample_phase_set(probs, 100, tp, tw, &mut rng).expect("valid probabilities");
                estimate_detuning_contrast(&set).map(|e| e.detuning).unwrap_or(f64::NAN)
            })
            .collect();
        if est.iter().any(|x| x.is_nan()) {
            return Err(format!("estimator failed at δ = {delta} Hz"));
        }
        let (m, sd) = mean_sd(&est);
        // finite-pulse phase correction is first order in δ/Ω
        let z = ((m - delta).abs() - 2e-3 * delta.abs()).max(0.0) / (sd / (est.len() as f64).sqrt());
        worst_z = worst_z.max(z);
    }

    let p = ZeemanCampaignParams::default();
    let opts = ZeemanFitOptions {
        g_s: CITED.g_ca_s12.value,
        g_d: CITED.g_ca_d52.value,
        frequency_ratio: p.frequency_ratio,
    };
    let runs = 500;
    let mut f0 = Vec::with_capacity(runs);
    let mut chi2 = Vec::with_capacity(runs);
    let mut dep = Vec::with_capacity(runs);
    for i in 0..runs {
        let mut rng = stream_rng(11, i as u64);
        let sets = zeeman_campaign(&p, &CODATA, &mut rng).map_err(|e| e.to_string())?;
        let f = fit_zeeman_line(&sets, Frequency::from_hz(0), &opts, &CODATA).map_err(|e| e.to_string())?;
        dep.push(fit::dependence_from_fit(&f).map_err(|e| e.to_string())?.delta);
        f0.push(f.f0_offset);
        chi2.push(f.chi2);
    }
    let (bias, sd) = mean_sd(&f0);
    let (chi_mean, _) = mean_sd(&chi2);
    let (dm, dsd) = mean_sd(&dep);
    let n = runs as f64;
    let ok = worst_z <= 4.0
        && bias.abs() <= 4.0 * sd / n.sqrt()
        && (sd - 36.0).abs() <= 4.0 * 36.0 / (2.0 * n).sqrt()
        && (chi_mean - 16.0).abs() <= 4.0 * (32.0 / n).sqrt()
        && dm.abs() <= 4.0 * dsd / n.sqrt();
    ensure(
        ok,
        format!(
            "Ramsey bias worst |z| = {worst_z:.2}; σ(f0) = {sd:.1} Hz, bias {bias:+.1} Hz, mean χ² = {chi_mean:.2}/16"
        ),
    )
}

fn lab_comparison() -> Check {
    let cfg = scenario("compare.toml");
    let (_, _, c) = compare::compute(&cfg, 0).map_err(|e| e.to_string())?;
    let hours = cfg.comparison.duration_s / 3600.0;
    ensure(
        (c.center - 1.3).abs() <= 0.2 && (2.0..=3.0).contains(&c.width) && (hours - 5.0).abs() < 1e-9,
        format!(
            "{hours:.0} h: offset {:.2}({:.0}) Hz, width {:.2} Hz",
            c.center,
            100.0 * c.center_sigma,
            c.width
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("mode frequencies", modes, Duration::from_secs(1)),
        ("quadratic Zeeman", quadratic_zeeman, Duration::from_secs(1)),
        ("g-factor algebra", g_factor, Duration::from_secs(1)),
        ("hypothesis test", hypothesis, Duration::from_secs(1)),
        ("error budget", budget, Duration::from_secs(1)),
        ("Ramsey decay", ramsey_decay, Duration::from_secs(30)),
        ("clock-line width", clock_width, Duration::from_secs(30)),
        ("QLS fidelity chain", fidelity_chain, Duration::from_secs(60)),
        ("dynamics oracle equivalence", dynamics_oracle, Duration::from_secs(60)),
        ("estimator round-trips", estimators, Duration::from_secs(120)),
        ("lab-comparison synthesis", lab_comparison, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let r = check();
        let dt = t.elapsed();
        let (tag, msg) = match (&r, dt <= budget) {
            (Ok(m), true) => ("PASS", m.clone()),
            (Ok(m), false) => ("FAIL", format!("{m}; too slow")),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {:>2} {name}: {msg} [{:.2} s]", i + 1, dt.as_secs_f64());
    }
    println!("{} of 11 criteria pass", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
