//! Neyman–Pearson radar detection on decoded observations.
//!
//! The detector forms the whitened square-law statistic
//! `T = Σ_k ‖W^{-1/2} Q_R^H y_k‖²` over `k` pulses (noncoherent
//! integration), where `W = Q_R^H D_R Q_R` is the decoded-space
//! interference-plus-noise covariance of the solved design. Thresholds are
//! calibrated empirically per (method, SNR, target model) from H0 runs of
//! the same solved network, so no distributional assumptions enter.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baseline::{identity_baseline, sssvsp_solution, SssvspConfig};
use crate::channel::{DiagonalChannel, LinkSet, TargetKind, TargetModel};
use crate::linalg::{cholesky, solve_lower_vec, CMat};
use crate::rng::complex_normal;
use crate::scenario::Scenario;
use crate::solver::{
    interference_covariance, solve_max_sinr, Solution, SolverConfig, SolverError,
};

/// Transmit/receive design under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Alternating max-SINR precoder/decoder co-design.
    Proposed,
    /// Small-singular-value space projection at the radar only.
    Sssvsp,
    /// No processing: identity precoders and decoders.
    Identity,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Sssvsp => "sssvsp",
            Method::Identity => "identity",
        }
    }
}

/// Per-method design knobs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MethodConfig {
    pub solver: SolverConfig,
    pub sssvsp: SssvspConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectError {
    /// The whitener is not Hermitian positive definite.
    NonPositiveWhitener { detail: String },
    /// Quantile calibration needs at least `needed` samples at this false
    /// alarm rate.
    InsufficientSamples { needed: usize, got: usize },
    EmptySample,
    InvalidConfig(String),
    Solver(SolverError),
}

impl fmt::Display for DetectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectError::NonPositiveWhitener { detail } => {
                write!(f, "whitener not positive definite: {detail}")
            }
            DetectError::InsufficientSamples { needed, got } => {
                write!(f, "need >= {needed} calibration samples, got {got}")
            }
            DetectError::EmptySample => write!(f, "empty sample list"),
            DetectError::InvalidConfig(msg) => write!(f, "invalid detector config: {msg}"),
            DetectError::Solver(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DetectError {}

impl From<SolverError> for DetectError {
    fn from(e: SolverError) -> Self {
        DetectError::Solver(e)
    }
}

/// Detector operating point and Monte-Carlo sizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Target false alarm probability.
    pub pfa_target: f64,
    /// Pulses integrated per statistic (1 = single pulse).
    pub pulses_k: usize,
    /// H0 statistics drawn for threshold calibration.
    pub h0_calibration_trials: usize,
    /// H1 statistics drawn for the Pd estimate.
    pub h1_trials: usize,
}

impl DetectorConfig {
    /// Checks ranges and the quantile-stability rule
    /// `pfa_target · h0_calibration_trials >= 50`.
    pub fn validate(&self) -> Result<(), DetectError> {
        if !(self.pfa_target > 0.0 && self.pfa_target < 1.0) {
            return Err(DetectError::InvalidConfig(format!(
                "pfa_target {} outside (0, 1)",
                self.pfa_target
            )));
        }
        if self.pulses_k < 1 {
            return Err(DetectError::InvalidConfig("pulses_k must be >= 1".into()));
        }
        if self.pfa_target * (self.h0_calibration_trials as f64) < 50.0 {
            return Err(DetectError::InvalidConfig(format!(
                "pfa_target * h0_calibration_trials = {} < 50; quantile unstable",
                self.pfa_target * self.h0_calibration_trials as f64
            )));
        }
        if self.h1_trials < 1 {
            return Err(DetectError::InvalidConfig("h1_trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// Whitened square-law statistic over decoded pulses:
/// `T = Σ_k y_k^H W^{-1} y_k`. Deterministic given its inputs; rejects a
/// non-PD whitener.
pub fn test_statistic(
    decoded_pulses: &[Vec<Complex64>],
    whitener: &CMat,
) -> Result<f64, DetectError> {
    let l = cholesky(whitener)
        .map_err(|e| DetectError::NonPositiveWhitener { detail: format!("{e}") })?;
    let mut acc = 0.0;
    for y in decoded_pulses {
        let z = solve_lower_vec(&l, y);
        acc += z.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    Ok(acc)
}

/// Empirical threshold for a target false alarm probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub threshold: f64,
    /// The quantile landed at the deepest tail position this sample size can
    /// resolve (one order statistic below the maximum); any smaller false
    /// alarm target would exhaust the sample.
    pub saturated: bool,
}

/// Empirical `(1 − pfa)` quantile of the H0 statistics: the threshold leaves
/// `floor(pfa·n)` of `n` samples above it.
///
/// `pfa >= 1` short-circuits to an always-alarm threshold of `-inf`;
/// `pfa · n < 1` is refused as insufficient data.
pub fn calibrate_threshold(h0_statistics: &[f64], pfa: f64) -> Result<Calibration, DetectError> {
    if h0_statistics.is_empty() {
        return Err(DetectError::EmptySample);
    }
    if !(pfa > 0.0) {
        return Err(DetectError::InvalidConfig(format!("pfa {pfa} must be positive")));
    }
    if pfa >= 1.0 {
        return Ok(Calibration { threshold: f64::NEG_INFINITY, saturated: false });
    }
    let n = h0_statistics.len();
    let above = (pfa * n as f64).floor() as usize;
    if above < 1 {
        return Err(DetectError::InsufficientSamples {
            needed: (1.0 / pfa).ceil() as usize,
            got: n,
        });
    }
    let mut sorted = h0_statistics.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Calibration { threshold: sorted[n - 1 - above], saturated: above == 1 })
}

/// Fraction of statistics exceeding the threshold.
pub fn exceedance_rate(statistics: &[f64], threshold: f64) -> f64 {
    statistics.iter().filter(|&&t| t > threshold).count() as f64 / statistics.len() as f64
}

/// A solved network frozen for Monte-Carlo detection runs.
///
/// Construction scales transmit powers to the SNR, draws one block-fading
/// realization (the radar self link is the design-time target response),
/// solves the requested method and factors the decoded-space whitener. Each
/// statistic then replays `pulses_k` pulses of fresh communication payloads
/// and noise, plus the fluctuating target echo under H1.
pub struct DetectionInstance {
    scenario: Scenario,
    pub links: LinkSet,
    pub solution: Solution,
    pub radar: usize,
    pulses_k: usize,
    interval_len: usize,
    model: TargetModel,
    design_response: DiagonalChannel,
    whitener_chol: CMat,
    decoder: CMat,
    /// Per communication interferer: effective map `√ρ·H_Rj (Ω∘I) P_j C_j`
    /// and its payload distribution.
    comm_maps: Vec<(CMat, f64)>,
    /// Radar probing vector `√ρ·(Ω∘I) P_R C_R 1`, before the target
    /// response.
    radar_probe: Vec<Complex64>,
    /// Echo amplitude multiplier for H1; tests use 0 for the chance-line
    /// anchor.
    pub target_gain: f64,
}

impl DetectionInstance {
    pub fn new<R: Rng + ?Sized>(
        scenario: &Scenario,
        method: Method,
        cfg: &MethodConfig,
        det: &DetectorConfig,
        snr_db: f64,
        model: &TargetModel,
        interval_len: usize,
        rng: &mut R,
    ) -> Result<Self, DetectError> {
        det.validate()?;
        let radar = scenario
            .radar_index()
            .ok_or_else(|| DetectError::InvalidConfig("detection needs a radar user".into()))?;
        let scaled = scenario.with_snr_db(snr_db).map_err(SolverError::Signal)?;
        let links = scaled.draw_links(model, rng);
        let solution = match method {
            Method::Proposed => solve_max_sinr(&scaled, &links, &cfg.solver, rng)?,
            Method::Sssvsp => {
                let mut sol = sssvsp_solution(&scaled, &links, &cfg.sssvsp)?;
                sol.evaluate(&scaled, &links, cfg.solver.eps_rank)?;
                sol
            }
            Method::Identity => {
                let dofs: Vec<usize> = scaled.users.iter().map(|u| u.dofs).collect();
                let mut sol = identity_baseline(scaled.n_sc, &dofs).map_err(|e| {
                    SolverError::Numeric { context: "identity baseline", detail: format!("{e}") }
                })?;
                sol.evaluate(&scaled, &links, cfg.solver.eps_rank)?;
                sol
            }
        };

        let cov = interference_covariance(
            radar,
            &scaled.users,
            &solution.precoders,
            &links,
            scaled.noise.sigma_w2,
        )?;
        let decoder = solution.decoders[radar].clone();
        let whitener = decoder.adjoint().mul(&cov).mul(&decoder);
        let whitener_chol = cholesky(&whitener)
            .map_err(|e| DetectError::NonPositiveWhitener { detail: format!("{e}") })?;

        let mut comm_maps = Vec::new();
        for j in 0..scaled.n_users() {
            if j == radar || !links.reaches(radar, j) {
                continue;
            }
            let u = &scaled.users[j];
            let c = coding_for_columns(u, solution.precoders[j].cols())
                .map_err(SolverError::Signal)?;
            let masked = mask_rows(&solution.precoders[j], &u.selection);
            let h = links.channel(radar, j).map_err(|_| SolverError::Topology { rx: radar, tx: j })?;
            let map = h.apply_left(&masked.mul(c.mat())).scale(u.power.power_scale.sqrt());
            comm_maps.push((map, u.power.sigma_s2));
        }
        let ru = &scaled.users[radar];
        // Degraded baseline designs may carry fewer radar streams than the
        // nominal allocation; the probing chain follows the actual width.
        let c_r = coding_for_columns(ru, solution.precoders[radar].cols())
            .map_err(SolverError::Signal)?;
        let ones = vec![Complex64::new(1.0, 0.0); c_r.mat().cols()];
        let coded = c_r.mat().mul_vec(&ones);
        let masked = mask_rows(&solution.precoders[radar], &ru.selection);
        let probe_mat = masked.scale(ru.power.power_scale.sqrt());
        let radar_probe = probe_mat.mul_vec(&coded);
        let design_response = links
            .channel(radar, radar)
            .map_err(|_| SolverError::Topology { rx: radar, tx: radar })?
            .clone();

        Ok(DetectionInstance {
            scenario: scaled,
            links,
            solution,
            radar,
            pulses_k: det.pulses_k,
            interval_len,
            model: *model,
            design_response,
            whitener_chol,
            decoder,
            comm_maps,
            radar_probe,
            target_gain: 1.0,
        })
    }

    fn response_for_pulse<R: Rng + ?Sized>(
        &self,
        pulse: usize,
        held: &mut Option<DiagonalChannel>,
        rng: &mut R,
    ) -> DiagonalChannel {
        match self.model.kind {
            TargetKind::Nonfluctuating => self.design_response.clone(),
            TargetKind::SwerlingI | TargetKind::SwerlingIII => {
                if pulse % self.interval_len == 0 || held.is_none() {
                    *held = Some(self.model.draw(rng, self.scenario.n_sc));
                }
                held.clone().expect("held response")
            }
            TargetKind::SwerlingII | TargetKind::SwerlingIV => {
                self.model.draw(rng, self.scenario.n_sc)
            }
        }
    }

    /// One statistic: `pulses_k` pulses of interference plus noise, with the
    /// fluctuating target echo added under H1.
    pub fn draw_statistic<R: Rng + ?Sized>(&self, h1: bool, rng: &mut R) -> f64 {
        let n = self.scenario.n_sc;
        let sigma_w2 = self.scenario.noise.sigma_w2;
        let mut acc = 0.0;
        let mut held: Option<DiagonalChannel> = None;
        for pulse in 0..self.pulses_k {
            let mut y: Vec<Complex64> = (0..n).map(|_| complex_normal(rng, sigma_w2)).collect();
            for (map, sigma_s2) in &self.comm_maps {
                let s: Vec<Complex64> =
                    (0..map.cols()).map(|_| complex_normal(rng, *sigma_s2)).collect();
                for (yi, v) in y.iter_mut().zip(map.mul_vec(&s)) {
                    *yi += v;
                }
            }
            if h1 {
                let response = self.response_for_pulse(pulse, &mut held, rng);
                for i in 0..n {
                    y[i] += self.target_gain * response.diag()[i] * self.radar_probe[i];
                }
            }
            let decoded = self.decoder.adjoint().mul_vec(&y);
            let z = solve_lower_vec(&self.whitener_chol, &decoded);
            acc += z.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        acc
    }

    pub fn draw_statistics<R: Rng + ?Sized>(&self, h1: bool, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.draw_statistic(h1, rng)).collect()
    }
}

fn mask_rows(m: &CMat, active: &[bool]) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| {
        if active[i] { m.get(i, j) } else { Complex64::new(0.0, 0.0) }
    })
}

/// Coding matrix sized to the streams a design actually produced.
fn coding_for_columns(
    user: &crate::scenario::UserSpec,
    cols: usize,
) -> Result<crate::signal::CodingMatrix, crate::signal::SignalError> {
    use crate::signal::{CodingKind, CodingMatrix};
    match user.coding {
        CodingKind::Identity => Ok(CodingMatrix::identity(cols)),
        CodingKind::OrthogonalDft => {
            CodingMatrix::orthogonal_dft(cols, user.power.n_p.max(cols))
        }
    }
}

/// Pd estimate with its calibrated operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdEstimate {
    pub pd: f64,
    pub threshold: f64,
    pub saturated: bool,
}

/// Monte-Carlo Pd at the empirically calibrated threshold, all transmitters
/// active.
pub fn estimate_pd<R: Rng + ?Sized>(
    scenario: &Scenario,
    method: Method,
    cfg: &MethodConfig,
    det: &DetectorConfig,
    snr_db: f64,
    model: &TargetModel,
    interval_len: usize,
    rng: &mut R,
) -> Result<PdEstimate, DetectError> {
    let instance =
        DetectionInstance::new(scenario, method, cfg, det, snr_db, model, interval_len, rng)?;
    let h0 = instance.draw_statistics(false, det.h0_calibration_trials, rng);
    let cal = calibrate_threshold(&h0, det.pfa_target)?;
    let h1 = instance.draw_statistics(true, det.h1_trials, rng);
    Ok(PdEstimate {
        pd: exceedance_rate(&h1, cal.threshold),
        threshold: cal.threshold,
        saturated: cal.saturated,
    })
}

/// One operating point of a receiver operating characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub pfa: f64,
    pub pd: f64,
    pub threshold: f64,
    pub saturated: bool,
}

/// Experiment labels carried with every curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocMeta {
    pub snr_db: f64,
    pub model: TargetModel,
    pub method: Method,
    pub seed: u64,
    pub pulses_k: usize,
}

/// ROC curve over a false-alarm grid with shared calibration samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub meta: RocMeta,
}

/// Sweeps a sorted false-alarm grid. All grid points share one H0
/// calibration sample and one H1 sample, so the resulting curve is exactly
/// monotone. The curve is seeded explicitly and records the seed.
#[allow(clippy::too_many_arguments)]
pub fn roc(
    scenario: &Scenario,
    method: Method,
    cfg: &MethodConfig,
    det: &DetectorConfig,
    snr_db: f64,
    model: &TargetModel,
    interval_len: usize,
    pfa_grid: &[f64],
    seed: u64,
) -> Result<RocCurve, DetectError> {
    if pfa_grid.is_empty() {
        return Err(DetectError::InvalidConfig("empty pfa grid".into()));
    }
    for w in pfa_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(DetectError::InvalidConfig(format!(
                "pfa grid must be strictly increasing, saw {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instance =
        DetectionInstance::new(scenario, method, cfg, det, snr_db, model, interval_len, &mut rng)?;
    let h0 = instance.draw_statistics(false, det.h0_calibration_trials, &mut rng);
    let h1 = instance.draw_statistics(true, det.h1_trials, &mut rng);
    let mut points = Vec::with_capacity(pfa_grid.len());
    for &pfa in pfa_grid {
        let cal = calibrate_threshold(&h0, pfa)?;
        points.push(RocPoint {
            pfa,
            pd: exceedance_rate(&h1, cal.threshold),
            threshold: cal.threshold,
            saturated: cal.saturated,
        });
    }
    Ok(RocCurve {
        points,
        meta: RocMeta { snr_db, model: *model, method, seed, pulses_k: det.pulses_k },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_trivial_values() {
        let w = CMat::identity(2);
        let y = vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]];
        assert!((test_statistic(&y, &w).unwrap() - 1.0).abs() < 1e-15);

        // k identical pulses add up
        let pulses: Vec<_> = (0..5).map(|_| y[0].clone()).collect();
        assert!((test_statistic(&pulses, &w).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn statistic_rejects_indefinite_whitener() {
        let mut w = CMat::identity(2);
        w[(0, 0)] = Complex64::new(-1.0, 0.0);
        assert!(matches!(
            test_statistic(&[], &w),
            Err(DetectError::NonPositiveWhitener { .. })
        ));
    }

    #[test]
    fn statistic_invariant_under_whitened_rotation() {
        use crate::rng::complex_normal;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = CMat::from_fn(3, 3, |_, _| complex_normal(&mut rng, 1.0));
        let w = g.mul(&g.adjoint()).add(&CMat::identity(3).scale(0.3));
        let l = cholesky(&w).unwrap();
        let mut u = CMat::from_fn(3, 3, |_, _| complex_normal(&mut rng, 1.0));
        u.orthonormalize_columns();
        let y: Vec<Complex64> = (0..3).map(|_| complex_normal(&mut rng, 1.0)).collect();
        // rotate the whitened coordinates: y' = L U L^{-1} y
        let z = solve_lower_vec(&l, &y);
        let uz = u.mul_vec(&z);
        let y_rot = l.mul_vec(&uz);
        let t0 = test_statistic(&[y], &w).unwrap();
        let t1 = test_statistic(&[y_rot], &w).unwrap();
        assert!((t0 - t1).abs() <= 1e-12 * t0.max(1.0));
    }

    #[test]
    fn calibration_median_and_saturation() {
        let sample = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let cal = calibrate_threshold(&sample, 0.5).unwrap();
        assert_eq!(cal.threshold, 3.0); // median of an odd symmetric sample
        assert!(!cal.saturated);

        // smallest admissible pfa: threshold one order statistic below the
        // maximum, flagged as saturated
        let cal = calibrate_threshold(&sample, 0.2).unwrap();
        assert_eq!(cal.threshold, 4.0);
        assert!(cal.saturated);

        assert!(matches!(
            calibrate_threshold(&sample, 0.1),
            Err(DetectError::InsufficientSamples { .. })
        ));

        // pfa = 1 alarms always
        let cal = calibrate_threshold(&sample, 1.0).unwrap();
        assert_eq!(cal.threshold, f64::NEG_INFINITY);
    }

    #[test]
    fn calibration_fresh_sample_rate() {
        use rand::Rng as _;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let h0: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let cal = calibrate_threshold(&h0, 1e-2).unwrap();
        let fresh: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let rate = exceedance_rate(&fresh, cal.threshold);
        assert!((0.008..=0.012).contains(&rate), "measured pfa {rate}");
    }

    #[test]
    fn detector_config_validation() {
        let ok = DetectorConfig {
            pfa_target: 1e-2,
            pulses_k: 1,
            h0_calibration_trials: 10_000,
            h1_trials: 100,
        };
        assert!(ok.validate().is_ok());
        let unstable = DetectorConfig { h0_calibration_trials: 1_000, ..ok };
        assert!(unstable.validate().is_err());
        let bad_pfa = DetectorConfig { pfa_target: 0.0, ..ok };
        assert!(bad_pfa.validate().is_err());
    }
}
