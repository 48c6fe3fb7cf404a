//! Acceptance suite: every release criterion as one test with a printed
//! pass/fail line. Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test -p repeater-cli --test acceptance -- --nocapture
//! ```

use std::time::Instant;

use fock_core::{
    apply_beamsplitter, apply_pbs, basic_link_generation, dark_state_check, eme_state,
    entanglement_swap, local_pme_generation, measure_clicks, pme_state, polarization_qubit,
    teleport, ClickPattern, DarkStateSystem, DetectorModel, FockState, MixedState, ModeId,
    ModeRegistry, PbsBasis, Polarization, Sign, C64,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repeater_analytics::{
    cavity_snr, fidelity_imperfection, success_probs, total_time, CavityParams, ProtocolParams,
};
use repeater_sim::{
    closed_form_basic_link_mean, convergence_report, simulate_basic_link, simulate_with_probs,
    SimConfig, StageProbs, CONVERGENCE_BAND,
};

const FIDELITY_TOL: f64 = 1e-10;
const PROB_TOL: f64 = 1e-9;

fn criterion(name: &str, checks: Result<String, String>) {
    match checks {
        Ok(detail) => println!("[PASS] {name}: {detail}"),
        Err(detail) => {
            println!("[FAIL] {name}: {detail}");
            panic!("{name}: {detail}");
        }
    }
}

fn phase_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| i as f64 * std::f64::consts::TAU / points as f64)
        .collect()
}

#[test]
fn criterion_1_benchmark_total_time() {
    let params = ProtocolParams::benchmark();
    let start = Instant::now();
    let t_total = total_time(&params).unwrap();
    let elapsed = start.elapsed();

    let rel = (t_total - 2251.0).abs() / 2251.0;
    let result = if rel < 5e-3 && elapsed.as_micros() < 1000 {
        Ok(format!(
            "T_tot = {t_total:.1} s ({:.3}% from 2251 s) in {} us",
            rel * 100.0,
            elapsed.as_micros()
        ))
    } else {
        Err(format!("T_tot = {t_total} s, deviation {rel:.2e}, runtime {elapsed:?}"))
    };
    criterion("1 benchmark total time", result);
}

#[test]
fn criterion_2_fidelity_bound_exact() {
    let value = fidelity_imperfection(4, 5e-6);
    let result = if value == 3.2e-4 {
        Ok(format!("fidelity imperfection = {value:e} exactly"))
    } else {
        Err(format!("fidelity imperfection = {value:e}, expected 3.2e-4 exactly"))
    };
    criterion("2 fidelity bound", result);
}

#[test]
fn criterion_3_cavity_snr() {
    let cav = CavityParams::from_free_space_factor(1e-2, 1000.0);
    let snr = cavity_snr(&cav).unwrap();
    let result = if (snr.r_sn - 10.0).abs() < 1e-9 && (5.0..20.0).contains(&snr.r_sn) {
        Ok(format!("R_sn = {} from free-space factor {}", snr.r_sn, snr.free_space))
    } else {
        Err(format!("R_sn = {}, expected ~10", snr.r_sn))
    };
    criterion("3 cavity signal-to-noise", result);
}

#[test]
fn criterion_4_projection_suite() {
    let start = Instant::now();
    let mut deficit = 0.0f64;

    // local PME generation: preparation-phase grid and detector-phase grid
    let local_target = pme_state(Sign::Plus, ["L1", "L2", "R1", "R2"]);
    for phi in phase_grid(8) {
        let eme1 = eme_state(0.0, phi, "L1", "R1").unwrap();
        let eme2 = eme_state(0.0, phi, "L2", "R2").unwrap();
        let out = local_pme_generation(&eme1, &eme2, 1.0, 1.0, 0.0, 0.0).unwrap();
        deficit = deficit.max(1.0 - out.conditional_fidelity(&local_target).unwrap());
    }
    for chi in phase_grid(8) {
        let eme1 = eme_state(0.0, 0.9, "L1", "R1").unwrap();
        let eme2 = eme_state(0.0, 0.9, "L2", "R2").unwrap();
        let out = local_pme_generation(&eme1, &eme2, 1.0, 1.0, chi, chi).unwrap();
        deficit = deficit.max(1.0 - out.conditional_fidelity(&local_target).unwrap());
    }

    // elementary link: both channel phases on 8-point grids
    let link_target = pme_state(Sign::Plus, ["A.L1", "A.L2", "B.R1", "B.R2"]);
    let pme_a = pme_state(Sign::Plus, ["A.L1", "A.L2", "A.R1", "A.R2"]);
    let pme_b = pme_state(Sign::Plus, ["B.L1", "B.L2", "B.R1", "B.R2"]);
    for phase_a in phase_grid(8) {
        let out =
            basic_link_generation(&pme_a, &pme_b, 1.0, 1.0, 1.0, phase_a, 2.1).unwrap();
        deficit = deficit.max(1.0 - out.conditional_fidelity(&link_target).unwrap());
    }
    for phase_b in phase_grid(8) {
        let out =
            basic_link_generation(&pme_a, &pme_b, 1.0, 1.0, 1.0, 0.6, phase_b).unwrap();
        deficit = deficit.max(1.0 - out.conditional_fidelity(&link_target).unwrap());
    }

    // swap: all input sign combinations
    let swap_target = pme_state(Sign::Plus, ["A1", "A2", "C1", "C2"]);
    for sa in [Sign::Plus, Sign::Minus] {
        for sb in [Sign::Plus, Sign::Minus] {
            let ab = pme_state(sa, ["A1", "A2", "BL1", "BL2"]);
            let bc = pme_state(sb, ["BR1", "BR2", "C1", "C2"]);
            let out = entanglement_swap(&ab, &bc, 1.0, 1.0).unwrap();
            deficit = deficit.max(1.0 - out.conditional_fidelity(&swap_target).unwrap());
        }
    }

    // teleportation: qubit-phase grid
    let pme = pme_state(Sign::Plus, ["L1", "L2", "R1", "R2"]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for theta in phase_grid(8) {
        let alpha = C64::new(s, 0.0);
        let beta = C64::from_polar(s, theta);
        let out = teleport(alpha, beta, &pme, 1.0, 1.0).unwrap();
        let target = polarization_qubit(alpha, beta, "R1", "R2").unwrap();
        deficit = deficit.max(1.0 - out.conditional_fidelity(&target).unwrap());
    }

    let elapsed = start.elapsed();
    let result = if deficit < FIDELITY_TOL {
        Ok(format!(
            "worst conditional-fidelity deficit {deficit:.2e} over all grids ({:.2} s)",
            elapsed.as_secs_f64()
        ))
    } else {
        Err(format!("worst conditional-fidelity deficit {deficit:.2e} >= {FIDELITY_TOL:e}"))
    };
    criterion("4 quantum projection suite", result);
}

#[test]
fn criterion_5_probability_cross_check() {
    let mut combos = 0u32;
    let mut worst = 0.0f64;

    // one parameter set per grid point, rates taken from the analytics crate
    let analytic = |eta_e1: f64, eta_e2: f64, eta_d: f64, eta_t: f64| {
        let mut p = ProtocolParams::benchmark();
        p.eta_p = 1.0;
        p.eta_s = 1.0;
        p.eta_e1 = eta_e1;
        p.eta_e2 = eta_e2;
        p.eta_d = eta_d;
        p.n = 0;
        // choose the span so the fiber transmission comes out at eta_t
        p.l_n = -2.0 * p.l_att * eta_t.ln();
        success_probs(&p).unwrap()
    };

    // local generation: eta_e1 x eta_d
    for eta_e1 in [0.01, 0.3, 0.9] {
        for eta_d in [0.4, 0.7, 1.0] {
            let p_r = analytic(eta_e1, 0.9, eta_d, 0.5).p_r;
            let eme1 = eme_state(0.0, 0.3, "L1", "R1").unwrap();
            let eme2 = eme_state(0.0, 0.3, "L2", "R2").unwrap();
            let out = local_pme_generation(&eme1, &eme2, eta_e1, eta_d, 0.0, 0.0).unwrap();
            worst = worst.max((out.success_prob - p_r).abs());
            combos += 1;
        }
    }

    // elementary link: eta_e2 x eta_d x eta_t
    for eta_e2 in [0.3, 0.6, 0.9] {
        for eta_d in [0.4, 0.7, 1.0] {
            for eta_t in [0.028, 0.3, 0.8] {
                let probs = analytic(0.01, eta_e2, eta_d, eta_t);
                let pme_a = pme_state(Sign::Plus, ["A.L1", "A.L2", "A.R1", "A.R2"]);
                let pme_b = pme_state(Sign::Plus, ["B.L1", "B.L2", "B.R1", "B.R2"]);
                let out = basic_link_generation(
                    &pme_a,
                    &pme_b,
                    eta_e2,
                    probs.eta_t,
                    eta_d,
                    0.0,
                    0.0,
                )
                .unwrap();
                worst = worst.max((out.success_prob - probs.p_b).abs());
                combos += 1;
            }
        }
    }

    // swap: eta_e2 x eta_d
    for eta_e2 in [0.3, 0.6, 0.9] {
        for eta_d in [0.4, 0.7, 1.0] {
            let p_i = analytic(0.01, eta_e2, eta_d, 0.5).p_i;
            let ab = pme_state(Sign::Plus, ["A1", "A2", "BL1", "BL2"]);
            let bc = pme_state(Sign::Plus, ["BR1", "BR2", "C1", "C2"]);
            let out = entanglement_swap(&ab, &bc, eta_e2, eta_d).unwrap();
            worst = worst.max((out.success_prob - p_i).abs());
            combos += 1;
        }
    }

    let result = if combos >= 27 && worst < PROB_TOL {
        Ok(format!("max |enumerated - analytic| = {worst:.2e} over {combos} combinations"))
    } else {
        Err(format!("max deviation {worst:.2e} over {combos} combinations"))
    };
    criterion("5 probability cross-check", result);
}

#[test]
fn criterion_6_dark_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = 10f64.powf(4.0 + 4.0 * rng.random::<f64>());
        let omega = 10f64.powf(4.0 + 4.0 * rng.random::<f64>());
        let check = dark_state_check(&DarkStateSystem::new(g, omega).unwrap()).unwrap();
        worst = worst.max(check.residual_norm);
    }
    let result = if worst < 1e-12 {
        Ok(format!("max relative residual {worst:.2e} over 100 coupling pairs"))
    } else {
        Err(format!("max relative residual {worst:.2e} >= 1e-12"))
    };
    criterion("6 dark state", result);
}

#[test]
fn criterion_7_monte_carlo_consistency() {
    let start = Instant::now();
    let mut parts: Vec<String> = Vec::new();
    let mut failures: Vec<String> = Vec::new();

    // (a) level-0 mean against the exact closed form, benchmark parameters
    {
        let cfg = SimConfig::new(ProtocolParams::benchmark().level_slice(0), 20_000, 2024);
        let out = simulate_basic_link(&cfg).unwrap();
        let exact = closed_form_basic_link_mean(&cfg).unwrap();
        let dev = (out.mean_total_time - exact).abs();
        let bound = 3.0 * out.std_error;
        if dev < bound {
            parts.push(format!("(a) level-0 |mc-exact| {dev:.2e} < 3 sigma {bound:.2e}"));
        } else {
            failures.push(format!("(a) level-0 deviation {dev:.2e} >= 3 sigma {bound:.2e}"));
        }
    }

    // (b) mean of the larger of two geometric counts at p = 1/2
    {
        let mut params = ProtocolParams::benchmark();
        params.n = 0;
        let cfg = SimConfig::new(params, 40_000, 7);
        let probs = StageProbs { p_r: 0.5, p_b: 1.0, p_i: 1.0 };
        let out = simulate_with_probs(&cfg, probs).unwrap();
        let herald = params.l0() / params.c;
        let measured = (out.mean_total_time - herald) * params.r;
        let sigma = out.std_error * params.r;
        let expect = 8.0 / 3.0;
        if (measured - expect).abs() < 3.0 * sigma {
            parts.push(format!("(b) E[max] {measured:.4} vs 8/3 within 3 sigma"));
        } else {
            failures.push(format!(
                "(b) E[max] {measured:.4} vs {expect:.4} outside 3 sigma {sigma:.2e}"
            ));
        }
    }

    // (c) levels 1 and 2 against the formula, 1e5 trials, moderate losses
    {
        let mut params = ProtocolParams::benchmark();
        params.eta_e1 = 0.1;
        params.l_n = 44.0 * 4.0;
        params.n = 2;
        let cfg = SimConfig::new(params, 100_000, 31);
        let report = convergence_report(&cfg).unwrap();
        let bad: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.level >= 1 && !r.within_band)
            .map(|r| format!("level {} ratio {:.3}", r.level, r.ratio))
            .collect();
        let ratios: Vec<String> =
            report.rows.iter().map(|r| format!("L{}={:.3}", r.level, r.ratio)).collect();
        if bad.is_empty() {
            parts.push(format!(
                "(c) ratios {} inside [{}, {}]",
                ratios.join(" "),
                CONVERGENCE_BAND.0,
                CONVERGENCE_BAND.1
            ));
        } else {
            failures.push(format!("(c) outside band: {}", bad.join(", ")));
        }
    }

    let bounded_elapsed = start.elapsed();

    // (d) full-scale benchmark smoke: ratio reported, no hard bound
    {
        let cfg = SimConfig::new(ProtocolParams::benchmark(), 100, 99);
        let mut level_cfg = cfg.clone();
        level_cfg.params = cfg.params; // full n = 4
        let out = repeater_sim::simulate(&level_cfg).unwrap();
        let analytic = total_time(&cfg.params).unwrap();
        parts.push(format!(
            "(d) n=4 smoke: mc/analytic = {:.3} over 100 trials (reported, unbounded)",
            out.mean_total_time / analytic
        ));
    }

    if bounded_elapsed.as_secs() >= 60 {
        failures.push(format!("(a)-(c) runtime {bounded_elapsed:?} exceeds 1 minute"));
    } else {
        parts.push(format!("(a)-(c) runtime {:.1} s", bounded_elapsed.as_secs_f64()));
    }

    let result = if failures.is_empty() {
        Ok(parts.join("; "))
    } else {
        Err(failures.join("; "))
    };
    criterion("7 Monte Carlo consistency", result);
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("det.json");
    std::fs::write(
        &config_path,
        r#"{
  "protocol": {
    "eta_p": 1.0, "eta_s": 0.9, "eta_e1": 0.1, "eta_e2": 0.9, "eta_d": 0.9,
    "r": 5e7, "l_n": 88.0, "l_att": 22.0, "n": 1, "c": 2e5
  },
  "sim": { "trials": 3000, "seed": 42 },
  "output": "json"
}"#,
    )
    .unwrap();

    let mut outputs = Vec::new();
    for (name, threads) in [("one.json", "1"), ("many.json", "6"), ("again.json", "1")] {
        let out_path = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_pme-repeater"))
            .args([
                "--config",
                &config_path.to_string_lossy(),
                "simulate",
                "--seed",
                "42",
                "--threads",
                threads,
                "--output-path",
                &out_path.to_string_lossy(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out_path).unwrap());
    }

    let identical = outputs[0] == outputs[1] && outputs[0] == outputs[2];
    let result = if identical && !outputs[0].is_empty() {
        Ok(format!(
            "byte-identical output across repeat runs and 1-vs-6 workers ({} bytes)",
            outputs[0].len()
        ))
    } else {
        Err("outputs differ across runs or worker counts".into())
    };
    criterion("8 determinism", result);
}

#[test]
fn criterion_9_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    const CASES: usize = 128;

    // beam splitter and polarizing beam splitter unitarity
    let mut worst_norm = 0.0f64;
    for _ in 0..CASES {
        let st = random_two_mode(&mut rng);
        let phi = rng.random::<f64>() * std::f64::consts::TAU;
        let out = apply_beamsplitter(&st, "a", "b", phi).unwrap();
        worst_norm = worst_norm.max((out.norm_sqr() - 1.0).abs());

        let pol = random_polarized(&mut rng);
        let basis = if rng.random::<bool>() { PbsBasis::Hv } else { PbsBasis::Diagonal };
        let out = apply_pbs(&pol, ("p.H", "p.V"), ("q.H", "q.V"), basis).unwrap();
        worst_norm = worst_norm.max((out.norm_sqr() - 1.0).abs());
    }
    if worst_norm >= 1e-12 {
        failures.push(format!("unitarity drift {worst_norm:.2e}"));
    }

    // probability conservation under measurement
    let mut worst_prob = 0.0f64;
    for _ in 0..CASES {
        let st = random_two_mode(&mut rng);
        let det_a = DetectorModel::new(rng.random(), 0.1 * rng.random::<f64>()).unwrap();
        let det_b = DetectorModel::new(rng.random(), 0.1 * rng.random::<f64>()).unwrap();
        let meas =
            measure_clicks(&MixedState::pure(st), &[("a", det_a), ("b", det_b)]).unwrap();
        worst_prob = worst_prob.max((meas.total_probability() - 1.0).abs());
    }
    if worst_prob >= 1e-10 {
        failures.push(format!("probability drift {worst_prob:.2e}"));
    }

    // two photons never split at a balanced splitter
    let mut worst_hom = 0.0f64;
    for _ in 0..CASES {
        let phi = rng.random::<f64>() * std::f64::consts::TAU;
        let reg = two_mode_registry();
        let mut st = FockState::zero(reg, 2);
        st.add_term(&[("a", 1), ("b", 1)], C64::new(1.0, 0.0)).unwrap();
        let out = apply_beamsplitter(&st, "a", "b", phi).unwrap();
        worst_hom = worst_hom.max(out.amplitude(&[("a", 1), ("b", 1)]).unwrap().norm());
    }
    if worst_hom != 0.0 {
        failures.push(format!("coincidence amplitude {worst_hom:.2e}"));
    }

    // threshold-detector click law
    let mut worst_povm = 0.0f64;
    for _ in 0..CASES {
        let n = rng.random_range(0..=2u8);
        let eta: f64 = rng.random();
        let pd: f64 = 0.3 * rng.random::<f64>();
        let det = DetectorModel::new(eta, pd).unwrap();
        let reg = ModeRegistry::from_modes([ModeId::photon("m", Polarization::H)]).unwrap();
        let mut st = FockState::zero(reg, 2);
        st.add_term(&[("m", n)], C64::new(1.0, 0.0)).unwrap();
        let meas = measure_clicks(&MixedState::pure(st), &[("m", det)]).unwrap();
        let formula = 1.0 - (1.0 - pd) * (1.0 - eta).powi(n as i32);
        worst_povm = worst_povm.max((meas.probability_of(ClickPattern(1)) - formula).abs());
    }
    if worst_povm >= 1e-12 {
        failures.push(format!("POVM deviation {worst_povm:.2e}"));
    }

    let result = if failures.is_empty() {
        Ok(format!(
            "{CASES} cases each: unitarity {worst_norm:.1e}, conservation {worst_prob:.1e}, \
             HOM {worst_hom:.1e}, POVM {worst_povm:.1e}"
        ))
    } else {
        Err(failures.join("; "))
    };
    criterion("9 property suites", result);
}

fn two_mode_registry() -> ModeRegistry {
    ModeRegistry::from_modes([
        ModeId::photon("a", Polarization::H),
        ModeId::photon("b", Polarization::H),
    ])
    .unwrap()
}

fn random_two_mode(rng: &mut ChaCha8Rng) -> FockState {
    let mut st = FockState::zero(two_mode_registry(), 2);
    for na in 0..=1u8 {
        for nb in 0..=1u8 {
            let amp = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            st.add_term(&[("a", na), ("b", nb)], amp).unwrap();
        }
    }
    st.normalize();
    st
}

fn random_polarized(rng: &mut ChaCha8Rng) -> FockState {
    let reg = ModeRegistry::from_modes([
        ModeId::photon("p.H", Polarization::H),
        ModeId::photon("p.V", Polarization::V),
        ModeId::photon("q.H", Polarization::H),
        ModeId::photon("q.V", Polarization::V),
    ])
    .unwrap();
    let mut st = FockState::zero(reg, 2);
    let labels = ["p.H", "p.V", "q.H", "q.V"];
    for label in labels {
        let amp = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        st.add_term(&[(label, 1)], amp).unwrap();
    }
    st.normalize();
    st
}

// pins the benchmark parameter set's stage probabilities themselves
#[test]
fn criterion_5_supplement_benchmark_stage_probabilities() {
    let params = ProtocolParams::benchmark();
    let probs = success_probs(&params).unwrap();
    let result = if (probs.p_r - 3.2805e-5).abs() < 1e-12
        && (probs.p_i - 0.32805).abs() < 1e-12
    {
        Ok(format!("p_r = {:.5e}, p_b = {:.5e}, p_i = {:.5}", probs.p_r, probs.p_b, probs.p_i))
    } else {
        Err(format!("benchmark stage probabilities off: {probs:?}"))
    };
    criterion("5s benchmark stage probabilities", result);
}
