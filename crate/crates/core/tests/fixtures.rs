//! Hand-derived fixtures on the 2x2 identity coordination game, where
//! `U(x) = (1 - x_1)(1 - x_2) + x_1 x_2`.

mod common;

use common::{coordination, grid_max, x2};
use fictplay::io::{event_log_json, trajectory_csv};
use fictplay::{
    detect_lock_time, enumerate_equilibria, fit_decay, rate_certificate, simulate_fp,
    verify_bound, FpOptions, Metric, Tolerances, TrajectoryStatus,
};

#[test]
fn expected_potential_matches_closed_form() {
    let pg = coordination();
    let closed = |a: f64, b: f64| (1.0 - a) * (1.0 - b) + a * b;
    for (a, b) in [(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (0.3, 0.9)] {
        let v = pg.expected_potential(&x2(a, b), 1e-12).unwrap();
        assert!((v - closed(a, b)).abs() < 1e-15);
    }
}

#[test]
fn straight_run_to_origin() {
    let pg = coordination();
    let traj = simulate_fp(&pg, &x2(0.2, 0.3), &FpOptions::default()).unwrap();
    assert_eq!(traj.status, TrajectoryStatus::Converged);
    assert_eq!(traj.segments.len(), 1);
    assert!(traj.events.is_empty());
    assert_eq!(traj.limit, Some(x2(0.0, 0.0)));

    let lock = detect_lock_time(&traj).unwrap();
    assert_eq!(lock.tau, 0.0);

    let cert = rate_certificate(&traj, &pg, Metric::Euclidean).unwrap();
    assert!((cert.c - 0.13f64.sqrt()).abs() < 1e-9);
    // At (0,0) a deviation loses 1.
    assert!((cert.lock_margin - 1.0).abs() < 1e-15);

    let eq = enumerate_equilibria(&pg, &Tolerances::default()).unwrap();
    let check = verify_bound(&traj, &cert, &eq, 1e-9).unwrap();
    assert!(check.ok && check.worst_slack <= 1e-10);

    let fit = fit_decay(&traj, 0.0, Metric::Euclidean).unwrap();
    assert!((fit.lambda - 1.0).abs() < 1e-6);
    assert!(fit.r_squared >= 1.0 - 1e-9);
}

#[test]
fn one_switch_then_lock_on_far_corner() {
    let pg = coordination();
    let traj = simulate_fp(&pg, &x2(0.4, 0.7), &FpOptions::default()).unwrap();
    assert_eq!(traj.status, TrajectoryStatus::Converged);
    assert_eq!(traj.segments.len(), 2);
    assert_eq!(traj.events.len(), 1);
    let tau = 1.2f64.ln();
    assert!((traj.events[0].time - tau).abs() < 1e-12);
    assert_eq!(traj.events[0].player, 1);
    assert_eq!(traj.segments[0].target_actions, vec![1, 0]);
    assert_eq!(traj.segments[1].target_actions, vec![1, 1]);

    let lock = detect_lock_time(&traj).unwrap();
    assert!((lock.tau - tau).abs() < 1e-12);
    assert_eq!(lock.x_star, x2(1.0, 1.0));

    // Oracle: the first segment is x_1 = 1 - 0.6 e^{-t}, x_2 = 0.7 e^{-t};
    // maximise its distance to (1, 1) on a fine grid.
    let d = |t: f64| {
        let e = (-t).exp();
        ((0.6 * e).powi(2) + (1.0 - 0.7 * e).powi(2)).sqrt()
    };
    let sup = grid_max(d, 0.0, tau, 1_000_000);
    let expected_c = 1.2 * sup;
    assert!((expected_c - 1.2 * 0.45f64.sqrt()).abs() < 1e-9);

    let cert = rate_certificate(&traj, &pg, Metric::Euclidean).unwrap();
    assert!((cert.c - expected_c).abs() < 1e-9, "c = {}", cert.c);
    let eq = enumerate_equilibria(&pg, &Tolerances::default()).unwrap();
    let check = verify_bound(&traj, &cert, &eq, 1e-9).unwrap();
    assert!(check.ok && check.worst_slack <= 1e-10);

    let fit = fit_decay(&traj, tau, Metric::Euclidean).unwrap();
    assert!((fit.lambda - 1.0).abs() < 1e-6);
    // A window across the switch is still reported.
    assert!(fit_decay(&traj, 0.0, Metric::Euclidean).is_some());
}

#[test]
fn simultaneous_switch_captured_by_mixed_equilibrium() {
    let pg = coordination();
    let traj = simulate_fp(&pg, &x2(0.4, 0.6), &FpOptions::default()).unwrap();
    assert_eq!(traj.status, TrajectoryStatus::MixedEquilibriumReached);
    let t = 1.2f64.ln();
    assert!((traj.end_time - t).abs() < 1e-12);
    let limit = traj.limit.clone().unwrap().flat();
    assert!((limit[0] - 0.5).abs() < 1e-12 && (limit[1] - 0.5).abs() < 1e-12);
    assert_eq!(traj.events.len(), 2);
    assert!(traj.events.iter().all(|e| (e.time - t).abs() < 1e-12));
    assert!(detect_lock_time(&traj).is_err());
    assert!(rate_certificate(&traj, &pg, Metric::Euclidean).is_err());
}

#[test]
fn start_at_strict_vertex() {
    let pg = coordination();
    let traj = simulate_fp(&pg, &x2(0.0, 0.0), &FpOptions::default()).unwrap();
    let cert = rate_certificate(&traj, &pg, Metric::Euclidean).unwrap();
    assert_eq!((cert.tau, cert.c), (0.0, 0.0));
    let eq = enumerate_equilibria(&pg, &Tolerances::default()).unwrap();
    let check = verify_bound(&traj, &cert, &eq, 1e-9).unwrap();
    assert!(check.ok);
    assert!(fit_decay(&traj, 0.0, Metric::Euclidean).is_none());
}

#[test]
fn csv_and_event_log() {
    let pg = coordination();
    let traj = simulate_fp(&pg, &x2(0.4, 0.7), &FpOptions::default()).unwrap();
    let eq = enumerate_equilibria(&pg, &Tolerances::default()).unwrap();
    let csv = trajectory_csv(&pg, &traj, &eq, Metric::Euclidean, 200).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,segment_id,x1_2,x2_2,U,d_ne");
    assert_eq!(lines.len(), 1 + 2 * 202);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[..4], &[0.0, 0.0, 0.4, 0.7]);
    assert!((first[4] - (0.6 * 0.3 + 0.4 * 0.7)).abs() < 1e-15);

    let log: serde_json::Value = serde_json::from_str(&event_log_json(&traj)).unwrap();
    assert_eq!(log["status"], "Converged");
    assert_eq!(log["events"][0]["player"], 2);
    assert_eq!(log["events"][0]["leaving"][0], 1);
    assert_eq!(log["events"][0]["entering"][0], 2);
}
