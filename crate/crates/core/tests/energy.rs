use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use snlw_core::energy::*;
use snlw_core::noise::ConvolutionSampler;
use snlw_core::wave::FieldPath;
use snlw_core::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn smooth_data(g: &Arc<FourierGrid>, amp: f64) -> State {
    let mut s = State::zeros(g);
    s.u.set_mode(&[1, 0, 0], c(amp, 0.0)).unwrap();
    s.u.set_mode(&[0, 1, -1], c(0.0, 0.5 * amp)).unwrap();
    s.ut.set_mode(&[1, 1, 0], c(0.3 * amp, 0.1 * amp)).unwrap();
    s
}

fn state_from(g: &Arc<FourierGrid>, values: &[(f64, f64)]) -> State {
    let mut s = State::zeros(g);
    let half = g.center();
    for (idx, &(a, b)) in values.iter().enumerate().take(2 * half) {
        let f = if idx < half { &mut s.u } else { &mut s.ut };
        f.set_mode(&g.freq(idx % half)[..g.dim()], c(a, b)).unwrap();
    }
    s
}

/// Record with a prescribed `E(u)` series on `[0, 1]`.
fn synthetic(traj: u64, times: &[f64], f: impl Fn(f64) -> f64) -> Record {
    let mut r = Record::new(traj, 0);
    r.times = times.to_vec();
    r.energy_u = times.iter().map(|&t| f(t)).collect();
    r.energy_v = r.energy_u.clone();
    r
}

fn unit_times(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

#[test]
fn zero_state_has_zero_energy() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let t = Transform::new(&g);
    assert_eq!(energy(&t, &State::zeros(&g), 5.0).unwrap(), 0.0);
}

#[test]
fn unit_velocity_mode_is_kinetic_half() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let t = Transform::new(&g);
    let mut s = State::zeros(&g);
    s.ut.set_mode(&[0, 0, 0], c(1.0, 0.0)).unwrap();
    assert!((energy(&t, &s, 5.0).unwrap() - 0.5).abs() < 1e-15);
    let parts = energy_parts(&t, &s, 5.0).unwrap();
    assert_eq!((parts.gradient, parts.potential), (0.0, 0.0));
}

#[test]
fn constant_field_matches_quadrature() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let t = Transform::new(&g);
    for value in [0.2, 0.7, -1.3] {
        let mut s = State::zeros(&g);
        s.u.set_mode(&[0, 0, 0], c(value * (2.0 * PI).powf(1.5), 0.0)).unwrap();
        // midpoint rule on a coarse box of the constant integrand
        let cells = 8usize;
        let vol = (2.0 * PI / cells as f64).powi(3);
        let direct: f64 = (0..cells.pow(3)).map(|_| vol * value.powi(6) / 6.0).sum();
        let e = energy(&t, &s, 5.0).unwrap();
        assert!((e - direct).abs() < 1e-12 * direct, "{e} vs {direct}");
    }
}

#[test]
fn parts_add_up() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let t = Transform::new(&g);
    let s = smooth_data(&g, 0.8);
    let p = energy_parts(&t, &s, 5.0).unwrap();
    assert!(p.kinetic > 0.0 && p.gradient > 0.0 && p.potential > 0.0);
    assert!((p.total() - energy(&t, &s, 5.0).unwrap()).abs() < 1e-14);
    assert!((p.kinetic - 0.5 * s.ut.l2_norm().powi(2)).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_invariance(
        values in prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 40),
        shift in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let g = FourierGrid::new(3, 2, 3.0).unwrap();
        let t = Transform::new(&g);
        let s = state_from(&g, &values);
        let e = energy(&t, &s, 5.0).unwrap();
        let moved = energy(&t, &s.translated(&shift), 5.0).unwrap();
        prop_assert!((e - moved).abs() <= 1e-12 * e.max(1.0));
    }

    #[test]
    fn energy_dominates_kinetic(
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 40),
        p in prop::sample::select(vec![3.0f64, 5.0, 7.0 / 3.0]),
    ) {
        let g = FourierGrid::new(3, 2, 3.0).unwrap();
        let t = Transform::new(&g);
        let s = state_from(&g, &values);
        prop_assert!(energy(&t, &s, p).unwrap() >= 0.5 * s.ut.sobolev_norm(0.0).powi(2));
    }
}

#[test]
fn ledger_statistics_and_csv() {
    let times = unit_times(20);
    let mut records: Vec<Record> = (0..4u64)
        .rev()
        .map(|k| synthetic(k, &times, move |t| 1.0 + (2.0 + 0.1 * k as f64) * t))
        .collect();
    // a run that died halfway counts only while alive
    let mut dead = synthetic(9, &times[..11], |t| 5.0 + t);
    dead.blow_up = Some(0.5);
    records.push(dead);
    let ledger = EnergyLedger::from_records(&records).unwrap();
    assert_eq!(ledger.trajectories, vec![0, 1, 2, 3, 9]);
    assert_eq!(ledger.counts[0], 5);
    assert_eq!(ledger.counts[20], 4);
    let fit = ledger.fit.unwrap();
    assert_eq!(fit.n_traj, 4);
    assert!((fit.slope - 2.15).abs() < 1e-12);
    let slopes = [2.0, 2.1, 2.2, 2.3];
    let var = slopes.iter().map(|s| (s - 2.15f64).powi(2)).sum::<f64>() / 3.0;
    assert!((fit.stderr - (var / 4.0).sqrt()).abs() < 1e-12);
    assert!((fit.window_start - 0.1).abs() < 1e-12);
    let (lo, hi) = fit.interval(2.0);
    assert!(lo < 2.15 && hi > 2.15);

    let mut buf = Vec::new();
    ledger.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,mean_E,stderr_E,n_traj");
    assert_eq!(lines.len(), 22);
    assert!(lines[21].ends_with(",4"));
}

#[test]
fn ledger_rejects_misaligned_times() {
    let a = synthetic(0, &unit_times(10), |t| t);
    let b = synthetic(1, &unit_times(12), |t| t);
    assert!(matches!(EnergyLedger::from_records(&[a, b]), Err(EnergyError::Mismatch(_))));
    assert!(EnergyLedger::<f64>::from_records(&[]).is_err());
}

#[test]
fn ito_check_edge_cases() {
    let times = unit_times(10);
    let one = EnergyLedger::from_records(&[synthetic(0, &times, |t| t)]).unwrap();
    assert!(matches!(ito_drift_check_against(&one, 1.0), Err(EnergyError::TooFewTrajectories { got: 1 })));

    let flat = [synthetic(0, &times, |_| 2.0), synthetic(1, &times, |_| 2.0)];
    let ledger = EnergyLedger::from_records(&flat).unwrap();
    assert_eq!(ito_drift_check_against(&ledger, 0.0), Err(EnergyError::Degenerate));

    let exact = [synthetic(0, &times, |t| 3.0 * t), synthetic(1, &times, |t| 1.0 + 3.0 * t)];
    let ledger = EnergyLedger::from_records(&exact).unwrap();
    let v = ito_drift_check_against(&ledger, 3.0).unwrap();
    assert!(v.pass && v.z == 0.0);
    let v = ito_drift_check_against(&ledger, 2.0).unwrap();
    assert!(!v.pass && v.z == f64::INFINITY);

    let json = serde_json::to_value(v).unwrap();
    for key in ["slope", "target", "z", "pass"] {
        assert!(json.get(key).is_some());
    }
}

#[test]
fn deterministic_drift_vanishes() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let phi = Multiplier::zero(&g);
    let solver = Solver::new(&g, SolverConfig::new(1e-3, 1.0, 5.0), &phi).unwrap();
    let data = smooth_data(&g, 0.5);
    let records: Vec<Record> = (0..2).map(|k| solver.simulate(&data, 3, k).unwrap()).collect();
    let ledger = EnergyLedger::from_records(&records).unwrap();
    let v = ito_drift_check(&ledger, &phi).unwrap();
    assert_eq!(v.target, 0.0);
    assert!(v.slope.abs() < 1e-6 && v.pass, "{v:?}");
}

/// Drift of the deterministic energy error shrinks by four when `h` halves.
#[test]
fn deterministic_drift_is_second_order() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let data = smooth_data(&g, 0.8);
    let drift = |h: f64| {
        let r = Solver::deterministic(&g, SolverConfig::new(h, 1.0, 5.0)).unwrap().simulate(&data, 0, 0).unwrap();
        r.energy_u.iter().map(|e| (e - r.energy_u[0]).abs()).fold(0.0, f64::max)
    };
    let ratio = drift(4e-3) / drift(2e-3);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

/// Single forced zero mode, no kick: `E(u) = ½ (∂ₜΨ̂₀)²` with `∂ₜΨ̂₀` a
/// standard Brownian motion, so the mean grows like `t/2 = ½‖φ‖²_HS t`.
#[test]
fn single_mode_drift_is_half_hs_norm_squared() {
    let g = FourierGrid::new(3, 1, 3.0).unwrap();
    let phi = Multiplier::single_mode(&g, &[0, 0, 0], 1.0).unwrap();
    assert_eq!(phi.hs_norm(0.0), 1.0);
    let mut cfg = SolverConfig::new(0.01, 1.0, 5.0);
    cfg.nonlinear = false;
    let solver = Solver::new(&g, cfg, &phi).unwrap();
    let zero = State::zeros(&g);
    let (replications, n) = (20u64, 200u64);
    let mut inside = 0;
    let mut full_rejected = 0;
    for rep in 0..replications {
        let records: Vec<Record> = (0..n).map(|k| solver.simulate(&zero, 1000 + rep, k).unwrap()).collect();
        let ledger = EnergyLedger::from_records(&records).unwrap();
        let half = ito_drift_check_against(&ledger, 0.5).unwrap();
        inside += half.pass as usize;
        full_rejected += !ito_drift_check(&ledger, &phi).unwrap().pass as usize;
    }
    assert!(inside >= 19, "{inside}/20 replications within 3 standard errors");
    assert_eq!(full_rejected, replications as usize);
}

#[test]
fn gronwall_without_noise_is_flat() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let solver = Solver::deterministic(&g, SolverConfig::new(2e-3, 1.0, 5.0)).unwrap();
    let r = solver.simulate(&smooth_data(&g, 0.5), 0, 0).unwrap();
    let fit = gronwall_envelope(&r, &r.sup_psi);
    assert!(!fit.violated);
    assert_eq!(fit.c2, 0.0);
    let emax = r.energy_v.iter().copied().fold(0.0, f64::max);
    assert_eq!(fit.c1, emax);
}

#[test]
fn gronwall_envelope_holds_under_noise() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let phi = Multiplier::power_decay(&g, 1.0, None);
    let mut cfg = SolverConfig::new(5e-3, 1.0, 5.0);
    cfg.save_every = 4;
    let solver = Solver::new(&g, cfg, &phi).unwrap();
    let data = smooth_data(&g, 0.5);
    for k in 0..20 {
        let r = solver.simulate(&data, 8, k).unwrap();
        let fit = gronwall_envelope(&r, &r.sup_psi);
        assert!(!fit.violated, "trajectory {k}: {fit:?}");
        for (t, e) in r.times.iter().zip(&r.energy_v) {
            assert!(*e <= fit.envelope(*t) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn gronwall_flags_super_exponential_growth() {
    let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
    let mut r = synthetic(0, &times, |t| (20.0 * t * t).exp());
    let ones = vec![1.0; times.len()];
    let fit = gronwall_envelope(&r, &ones);
    assert!(fit.violated && fit.c2 > GRONWALL_C2_CAP);
    // the same series passes with a generous cap
    assert!(!gronwall_envelope_with_cap(&r, &ones, 1e3).violated);
    r.blow_up = Some(4.0);
    assert!(gronwall_envelope_with_cap(&r, &ones, 1e3).violated);
}

fn forcing(g: &Arc<FourierGrid>, h: f64, steps: usize) -> FieldPath<f64> {
    let fields = (0..=steps)
        .map(|k| {
            let t = k as f64 * h;
            let mut f = Field::zeros(g);
            f.set_mode(&[1, 0, 0], c(1.0, 0.0)).unwrap();
            f.set_mode(&[0, 0, 1], c(0.0, 0.5 + t)).unwrap();
            f
        })
        .collect();
    FieldPath::new(0.0, h, fields)
}

#[test]
fn perturbation_distance_is_linear() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let phi = Multiplier::power_decay(&g, 1.0, None);
    let (h, steps) = (5e-3, 100);
    let solver = Solver::deterministic(&g, SolverConfig::new(h, 0.5, 5.0)).unwrap();
    let psi = ConvolutionSampler::new(&phi, h).path(steps, &mut NoiseStream::new(4, 0));
    let f0 = forcing(&g, h, steps);
    let fit = perturbation_scaling(&solver, &smooth_data(&g, 0.5), Some(&psi), &f0, &[0.0, 1e-3, 1e-2, 1e-1]).unwrap();
    assert_eq!(fit.distances[0], 0.0);
    let slope = fit.slope.unwrap();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    assert!(fit.distances.windows(2).all(|w| w[0] < w[1]));
}

/// Doubling an order-one background increases its X-norm and the
/// distance at fixed `ε`.
#[test]
fn perturbation_grows_with_background() {
    let g = FourierGrid::new(3, 4, 3.0).unwrap();
    let (h, steps) = (1e-3, 1000);
    let solver = Solver::deterministic(&g, SolverConfig::new(h, 1.0, 5.0)).unwrap();
    let f0 = forcing(&g, h, steps);
    let background = |amp: f64| {
        let mut s = smooth_data(&g, amp);
        s.u.set_mode(&[0, 0, 0], c(amp, 0.0)).unwrap();
        s
    };
    let x = |amp: f64| {
        let path = solver.run_path(&background(amp), None, None, steps).unwrap();
        let positions = FieldPath::new(0.0, h, path.into_iter().map(|s| s.u).collect());
        x_norm(solver.transform(), &positions, 0.0, 1.0).unwrap().value
    };
    let dist = |amp: f64| perturbation_scaling(&solver, &background(amp), None, &f0, &[1e-2]).unwrap().distances[0];
    assert!(x(20.0) > x(10.0));
    let (small, large) = (dist(10.0), dist(20.0));
    assert!(large > 1.2 * small, "{small} vs {large}");
}

#[test]
fn perturbation_errors() {
    let g = FourierGrid::new(3, 2, 3.0).unwrap();
    let solver = Solver::deterministic(&g, SolverConfig::new(0.01, 0.1, 5.0)).unwrap();
    let zero = FieldPath::new(0.0, 0.01, vec![Field::zeros(&g); 5]);
    assert!(matches!(
        perturbation_scaling(&solver, &State::zeros(&g), None, &zero, &[0.1]),
        Err(EnergyError::Invalid(_))
    ));
    let mut cfg = SolverConfig::new(0.01, 0.1, 5.0);
    cfg.blowup_threshold = 1e-3;
    let guarded = Solver::deterministic(&g, cfg).unwrap();
    let f0 = FieldPath::new(0.0, 0.01, (0..5).map(|_| {
        let mut f = Field::zeros(&g);
        f.set_mode(&[0, 0, 0], c(1.0, 0.0)).unwrap();
        f
    }).collect());
    assert!(matches!(
        perturbation_scaling(&guarded, &smooth_data(&g, 1.0), None, &f0, &[0.1]),
        Err(EnergyError::BlownUp { .. })
    ));
}
