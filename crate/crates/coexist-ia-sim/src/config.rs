//! JSON scenario configuration.
//!
//! One document drives every subcommand; unknown keys are rejected so typos
//! surface as configuration errors. Every run echoes the fully resolved
//! configuration (defaults included) into its output metadata.

use serde::{Deserialize, Serialize};

use coexist_ia::channel::{NoiseSpec, TargetKind, TargetModel};
use coexist_ia::detect::{DetectorConfig, Method, MethodConfig};
use coexist_ia::scenario::{Scenario, UserSpec};
use coexist_ia::signal::CodingKind;
use coexist_ia::solver::{EigenMode, SolverConfig};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindChoice {
    Comm,
    Radar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserConfig {
    pub kind: KindChoice,
    pub dofs: usize,
    /// Communication users only: whether the radar beam reaches this
    /// receiver.
    #[serde(default = "default_true")]
    pub radar_interfered: bool,
    /// Active-subcarrier mask; omitted means all on.
    #[serde(default)]
    pub selection: Option<Vec<bool>>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodingChoice {
    Identity,
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetChoice {
    Nonfluctuating,
    Swerling1,
    Swerling2,
    Swerling3,
    Swerling4,
}

impl TargetChoice {
    pub fn kind(self) -> TargetKind {
        match self {
            TargetChoice::Nonfluctuating => TargetKind::Nonfluctuating,
            TargetChoice::Swerling1 => TargetKind::SwerlingI,
            TargetChoice::Swerling2 => TargetKind::SwerlingII,
            TargetChoice::Swerling3 => TargetKind::SwerlingIII,
            TargetChoice::Swerling4 => TargetKind::SwerlingIV,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Proposed,
    Sssvsp,
    Identity,
}

impl MethodChoice {
    pub fn method(self) -> Method {
        match self {
            MethodChoice::Proposed => Method::Proposed,
            MethodChoice::Sssvsp => Method::Sssvsp,
            MethodChoice::Identity => Method::Identity,
        }
    }

    pub fn tag(self) -> u64 {
        match self {
            MethodChoice::Proposed => 0,
            MethodChoice::Sssvsp => 1,
            MethodChoice::Identity => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenModeChoice {
    Literal,
    Maxsinr,
}

impl EigenModeChoice {
    pub fn mode(self) -> EigenMode {
        match self {
            EigenModeChoice::Literal => EigenMode::LiteralSmallest,
            EigenModeChoice::Maxsinr => EigenMode::MaxSinrLargest,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iters: usize,
    pub eps_obj: f64,
    pub eps_rank: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSection { max_iters: d.max_iters, eps_obj: d.eps_obj, eps_rank: d.eps_rank }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    /// False-alarm grid for `roc`.
    pub pfa_grid: Vec<f64>,
    /// False-alarm targets for `pd-delta`.
    pub pfa_targets: Vec<f64>,
    /// Pulse counts for `pd-delta` (single pulse and integrated burst).
    pub pulses_k: Vec<usize>,
    /// Pulses per statistic for `roc`.
    pub roc_pulses_k: usize,
    pub h0_calibration_trials: usize,
    pub h1_trials: usize,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection {
            pfa_grid: vec![1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 0.3, 1.0],
            pfa_targets: vec![1e-2, 1e-4, 1e-6],
            pulses_k: vec![1, 500],
            roc_pulses_k: 1,
            h0_calibration_trials: 100_000,
            h1_trials: 20_000,
        }
    }
}

/// Complete experiment configuration. The default value reproduces the
/// four-user reference network (three single-stream communication users,
/// one of them colocated with the radar and out of its beam, radar with
/// three streams on eight subcarriers, unit noise and payload power,
/// orthogonal-identity coding).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub n_sc: usize,
    pub users: Vec<UserConfig>,
    pub snr_grid_db: Vec<f64>,
    pub sigma_s2: f64,
    pub sigma_w2: f64,
    pub coding: CodingChoice,
    /// Uncoded data length for orthogonal coding; defaults to each user's
    /// stream count.
    pub n_p: Option<usize>,
    /// Time slots per block in the power model.
    pub m_slots: usize,
    pub target_model: TargetChoice,
    pub target_mean_power: f64,
    /// Coherence interval in pulses (scan-to-scan fluctuation cadence).
    pub pulses_per_interval: usize,
    pub trials: usize,
    pub master_seed: Option<u64>,
    pub methods: Vec<MethodChoice>,
    pub eigen_mode: EigenModeChoice,
    pub solver: SolverSection,
    pub detector: DetectorSection,
    /// Singular-value threshold of the SSSVSP projector.
    pub sssvsp_threshold: f64,
    /// Network sizes for `user-sweep` (total users including the radar).
    pub user_counts: Vec<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n_sc: 8,
            users: vec![
                UserConfig {
                    kind: KindChoice::Comm,
                    dofs: 1,
                    radar_interfered: false,
                    selection: None,
                },
                UserConfig {
                    kind: KindChoice::Comm,
                    dofs: 1,
                    radar_interfered: true,
                    selection: None,
                },
                UserConfig {
                    kind: KindChoice::Comm,
                    dofs: 1,
                    radar_interfered: true,
                    selection: None,
                },
                UserConfig {
                    kind: KindChoice::Radar,
                    dofs: 3,
                    radar_interfered: true,
                    selection: None,
                },
            ],
            snr_grid_db: vec![0.0, 10.0, 20.0, 30.0, 40.0],
            sigma_s2: 1.0,
            sigma_w2: 1.0,
            coding: CodingChoice::Identity,
            n_p: None,
            m_slots: 1,
            target_model: TargetChoice::Swerling2,
            target_mean_power: 1.0,
            pulses_per_interval: 500,
            trials: 100,
            master_seed: None,
            methods: vec![MethodChoice::Proposed, MethodChoice::Sssvsp, MethodChoice::Identity],
            eigen_mode: EigenModeChoice::Maxsinr,
            solver: SolverSection::default(),
            detector: DetectorSection::default(),
            sssvsp_threshold: 0.5,
            user_counts: vec![2, 3, 4, 5, 6],
        }
    }
}

impl Config {
    /// Defaults for the detection experiments: one radar-interfered
    /// communication user coexisting with the radar, and a weak two-way
    /// target echo (mean power 1e-2 of a direct link) so detection
    /// probabilities stay off the ceiling across the SNR grid.
    pub fn default_roc() -> Self {
        Config {
            users: vec![
                UserConfig {
                    kind: KindChoice::Comm,
                    dofs: 1,
                    radar_interfered: true,
                    selection: None,
                },
                UserConfig {
                    kind: KindChoice::Radar,
                    dofs: 3,
                    radar_interfered: true,
                    selection: None,
                },
            ],
            snr_grid_db: vec![0.0, 10.0, 20.0, 30.0],
            target_model: TargetChoice::Swerling1,
            target_mean_power: 1e-2,
            methods: vec![MethodChoice::Proposed, MethodChoice::Sssvsp],
            ..Config::default()
        }
    }

    /// Defaults for the pulse-integration detection deltas: sixteen
    /// subcarriers, scan-to-scan fluctuating target.
    pub fn default_pd_delta() -> Self {
        Config {
            n_sc: 16,
            snr_grid_db: vec![-10.0, 0.0, 10.0, 20.0],
            detector: DetectorSection {
                h0_calibration_trials: 20_000,
                h1_trials: 10_000,
                ..DetectorSection::default()
            },
            ..Config::default_roc()
        }
    }

    /// Defaults for the user-count sweep: single-stream users at two SNR
    /// levels.
    pub fn default_user_sweep() -> Self {
        Config { snr_grid_db: vec![10.0, 20.0], ..Config::default() }
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            RunError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("cannot parse config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.users.is_empty() {
            return Err(RunError::Config("no users configured".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(RunError::Config("empty snr grid".into()));
        }
        if self.trials == 0 {
            return Err(RunError::Config("trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(RunError::Config("no methods selected".into()));
        }
        if !(self.sigma_w2 > 0.0) {
            return Err(RunError::Config("sigma_w2 must be positive".into()));
        }
        if !(self.sigma_s2 > 0.0) {
            return Err(RunError::Config("sigma_s2 must be positive".into()));
        }
        if !(self.target_mean_power > 0.0) {
            return Err(RunError::Config("target_mean_power must be positive".into()));
        }
        self.to_scenario().map(|_| ())
    }

    fn user_spec(&self, u: &UserConfig) -> Result<UserSpec, RunError> {
        let mut spec = match u.kind {
            KindChoice::Comm => UserSpec::comm(self.n_sc, u.dofs, u.radar_interfered),
            KindChoice::Radar => UserSpec::radar(self.n_sc, u.dofs),
        };
        spec.power.sigma_s2 = self.sigma_s2;
        spec.power.m_slots = self.m_slots;
        match self.coding {
            CodingChoice::Identity => {
                spec.coding = CodingKind::Identity;
                spec.power.n_p = u.dofs;
            }
            CodingChoice::Orthogonal => {
                spec.coding = CodingKind::OrthogonalDft;
                let n_p = self.n_p.unwrap_or(u.dofs);
                if n_p < u.dofs {
                    return Err(RunError::Config(format!(
                        "n_p = {n_p} smaller than a user's {} streams",
                        u.dofs
                    )));
                }
                spec.power.n_p = n_p;
            }
        }
        if let Some(sel) = &u.selection {
            if sel.len() != self.n_sc {
                return Err(RunError::Config(format!(
                    "selection mask length {} != n_sc {}",
                    sel.len(),
                    self.n_sc
                )));
            }
            spec.selection = sel.clone();
        }
        Ok(spec)
    }

    /// Materializes the configured network.
    pub fn to_scenario(&self) -> Result<Scenario, RunError> {
        let users = self
            .users
            .iter()
            .map(|u| self.user_spec(u))
            .collect::<Result<Vec<_>, _>>()?;
        Scenario::new(self.n_sc, users, NoiseSpec::new(self.sigma_w2))
            .map_err(|e| RunError::Config(e.to_string()))
    }

    /// The user-sweep network for a given total user count: one radar plus
    /// `count - 1` single-stream communication users, the first colocated
    /// with the radar and out of its beam.
    pub fn sweep_scenario(&self, count: usize) -> Result<Scenario, RunError> {
        if count < 2 {
            return Err(RunError::Config("user sweep needs at least 2 users".into()));
        }
        let mut users = Vec::with_capacity(count);
        for i in 0..count - 1 {
            users.push(UserConfig {
                kind: KindChoice::Comm,
                dofs: 1,
                radar_interfered: i > 0,
                selection: None,
            });
        }
        users.push(UserConfig {
            kind: KindChoice::Radar,
            dofs: 1,
            radar_interfered: true,
            selection: None,
        });
        let specs =
            users.iter().map(|u| self.user_spec(u)).collect::<Result<Vec<_>, _>>()?;
        Scenario::new(self.n_sc, specs, NoiseSpec::new(self.sigma_w2))
            .map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn target(&self) -> TargetModel {
        TargetModel::new(self.target_model.kind(), self.target_mean_power)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.solver.max_iters,
            eps_obj: self.solver.eps_obj,
            eps_rank: self.solver.eps_rank,
            eigen_mode: self.eigen_mode.mode(),
        }
    }

    pub fn method_config(&self, radar_dofs: usize) -> MethodConfig {
        MethodConfig {
            solver: self.solver_config(),
            sssvsp: coexist_ia::baseline::SssvspConfig {
                sv_threshold: self.sssvsp_threshold,
                radar_dofs,
            },
        }
    }

    pub fn detector_config(&self, pfa: f64, pulses_k: usize) -> DetectorConfig {
        DetectorConfig {
            pfa_target: pfa,
            pulses_k,
            h0_calibration_trials: self.detector.h0_calibration_trials,
            h1_trials: self.detector.h1_trials,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_round_trips() {
        let cfg = Config::default();
        cfg.validate().unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: Config = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&cfg).unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<Config>(r#"{"n_subcarriers": 8}"#);
        assert!(err.is_err());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg: Config = serde_json::from_str(r#"{"n_sc": 4, "trials": 7}"#).unwrap();
        assert_eq!(cfg.n_sc, 4);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.users.len(), 4);
    }

    #[test]
    fn scenario_mapping_respects_topology() {
        let s = Config::default().to_scenario().unwrap();
        assert_eq!(s.n_users(), 4);
        let radar = s.radar_index().unwrap();
        assert!(!s.reaches(0, radar));
        assert!(s.reaches(1, radar));
    }
}
