//! Detection-chain behavior on solved networks: calibration soundness,
//! chance-line anchoring with a null target, and Pd limits.

use coexist_ia::channel::{NoiseSpec, TargetKind, TargetModel};
use coexist_ia::detect::{
    calibrate_threshold, estimate_pd, exceedance_rate, roc, DetectionInstance, DetectorConfig,
    Method, MethodConfig,
};
use coexist_ia::scenario::{Scenario, UserSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn radar_pair_scenario(n_sc: usize, radar_dofs: usize) -> Scenario {
    Scenario::new(
        n_sc,
        vec![UserSpec::comm(n_sc, 1, true), UserSpec::radar(n_sc, radar_dofs)],
        NoiseSpec::new(1.0),
    )
    .unwrap()
}

fn det_cfg(pfa: f64, k: usize, h0: usize, h1: usize) -> DetectorConfig {
    DetectorConfig { pfa_target: pfa, pulses_k: k, h0_calibration_trials: h0, h1_trials: h1 }
}

#[test]
fn measured_pfa_sits_in_binomial_interval() {
    let scenario = radar_pair_scenario(8, 3);
    let model = TargetModel::new(TargetKind::SwerlingI, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let det = det_cfg(1e-2, 1, 100_000, 1);
    let instance = DetectionInstance::new(
        &scenario,
        Method::Proposed,
        &MethodConfig::default(),
        &det,
        10.0,
        &model,
        500,
        &mut rng,
    )
    .unwrap();
    let h0 = instance.draw_statistics(false, det.h0_calibration_trials, &mut rng);
    let cal = calibrate_threshold(&h0, det.pfa_target).unwrap();
    let fresh = instance.draw_statistics(false, 100_000, &mut rng);
    let measured = exceedance_rate(&fresh, cal.threshold);
    // 99% binomial interval around 1e-2 with n = 1e5
    let sd = (1e-2 * 0.99f64 / 1e5).sqrt();
    assert!(
        (measured - 1e-2).abs() <= 2.576 * sd,
        "measured {measured} outside CI half-width {:.2e}",
        2.576 * sd
    );
}

#[test]
fn null_target_rides_the_chance_line() {
    let scenario = radar_pair_scenario(8, 3);
    let model = TargetModel::new(TargetKind::SwerlingI, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let det = det_cfg(5e-2, 1, 20_000, 20_000);
    let mut instance = DetectionInstance::new(
        &scenario,
        Method::Proposed,
        &MethodConfig::default(),
        &det,
        20.0,
        &model,
        500,
        &mut rng,
    )
    .unwrap();
    instance.target_gain = 0.0; // H1 distribution collapses onto H0
    let h0 = instance.draw_statistics(false, det.h0_calibration_trials, &mut rng);
    for pfa in [0.2, 5e-2, 1e-2] {
        let cal = calibrate_threshold(&h0, pfa).unwrap();
        let h1 = instance.draw_statistics(true, det.h1_trials, &mut rng);
        let pd = exceedance_rate(&h1, cal.threshold);
        let sd = (pfa * (1.0 - pfa) / det.h1_trials as f64).sqrt();
        assert!((pd - pfa).abs() <= 3.0 * sd, "pfa {pfa}: pd {pd}");
    }
}

#[test]
fn pd_limits_with_snr() {
    let scenario = radar_pair_scenario(8, 3);
    let cfg = MethodConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(33);

    // vanishing SNR: H1 is indistinguishable from H0
    let weak = TargetModel::new(TargetKind::SwerlingI, 1.0);
    let det = det_cfg(1e-1, 1, 5_000, 5_000);
    let pd = estimate_pd(&scenario, Method::Proposed, &cfg, &det, -80.0, &weak, 500, &mut rng)
        .unwrap();
    let sd = (0.1f64 * 0.9 / 5_000.0).sqrt();
    assert!((pd.pd - 0.1).abs() < 4.0 * sd, "pd at -80 dB: {}", pd.pd);

    // strong nonfluctuating target: certain detection
    let strong = TargetModel::new(TargetKind::Nonfluctuating, 1.0);
    let det = det_cfg(1e-2, 1, 10_000, 2_000);
    let pd = estimate_pd(&scenario, Method::Proposed, &cfg, &det, 40.0, &strong, 500, &mut rng)
        .unwrap();
    assert!(pd.pd > 0.999, "pd at 40 dB: {}", pd.pd);
}

#[test]
fn roc_is_monotone_and_anchored() {
    let scenario = radar_pair_scenario(8, 3);
    let model = TargetModel::new(TargetKind::SwerlingI, 1.0);
    let det = det_cfg(1e-2, 1, 20_000, 5_000);
    let grid = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 0.3, 1.0];
    let curve = roc(
        &scenario,
        Method::Proposed,
        &MethodConfig::default(),
        &det,
        20.0,
        &model,
        500,
        &grid,
        99,
    )
    .unwrap();
    assert_eq!(curve.points.len(), grid.len());
    for w in curve.points.windows(2) {
        assert!(w[0].pfa < w[1].pfa);
        assert!(w[0].pd <= w[1].pd, "shared samples make the curve exactly monotone");
    }
    let last = curve.points.last().unwrap();
    assert_eq!(last.pfa, 1.0);
    assert_eq!(last.pd, 1.0);
    assert_eq!(curve.meta.seed, 99);
}

#[test]
fn multi_pulse_integration_helps() {
    let scenario = radar_pair_scenario(8, 3);
    let model = TargetModel::new(TargetKind::SwerlingI, 1.0);
    let cfg = MethodConfig::default();
    let mut pds = Vec::new();
    for k in [1usize, 50] {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let det = det_cfg(1e-2, k, 10_000, 4_000);
        let pd =
            estimate_pd(&scenario, Method::Proposed, &cfg, &det, 0.0, &model, 500, &mut rng)
                .unwrap();
        pds.push(pd.pd);
    }
    let sd = (0.5f64 / 4_000.0).sqrt();
    assert!(pds[1] >= pds[0] - 2.0 * sd, "k=50 pd {} vs k=1 pd {}", pds[1], pds[0]);
}
