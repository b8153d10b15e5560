//! Coexistence scenarios: who transmits, with how many streams, who hears
//! whom, and how much power each transmitter emits.
//!
//! A scenario holds `K` communication users plus one (optional) radar user
//! sharing `N_sc` subcarriers. Communication transmitters reach every
//! receiver; the radar, with its directional beam, reaches only the
//! communication receivers marked as radar-interfered, plus its own receiver
//! through the target reflection.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::channel::{draw_block_fading, LinkSet, NoiseSpec, TargetModel};
use crate::signal::{CodingKind, CodingMatrix, SignalError};

/// Transmitter/receiver role of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Radar,
    Comm,
}

/// Interference-set membership of a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Communication user interfered by the radar (set `A_r`).
    CommRadarInterfered,
    /// Communication user out of the radar beam (set `A_c`).
    CommClear,
    /// The radar user (set `B`).
    Radar,
}

/// Power-model parameters of one transmitter. The emitted-power matrix is
/// scaled by `power_scale` on top of the waveform factors, which is how SNR
/// sweeps set the operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    /// Time slots per block (`M`).
    pub m_slots: usize,
    /// Uncoded data length (`N_p`).
    pub n_p: usize,
    /// Per-entry payload variance `σ_S²` (communication only).
    pub sigma_s2: f64,
    /// Linear power scale applied to the emitted-power matrix.
    pub power_scale: f64,
}

/// One user of the shared band.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSpec {
    pub kind: NodeKind,
    /// Desired interference-free streams `d`.
    pub dofs: usize,
    pub membership: Membership,
    pub power: PowerParams,
    pub coding: CodingKind,
    /// Diagonal of the selection matrix `Ω` (active subcarriers).
    pub selection: Vec<bool>,
}

impl UserSpec {
    /// A communication user with all subcarriers active and unit powers.
    pub fn comm(n_sc: usize, dofs: usize, radar_interfered: bool) -> Self {
        UserSpec {
            kind: NodeKind::Comm,
            dofs,
            membership: if radar_interfered {
                Membership::CommRadarInterfered
            } else {
                Membership::CommClear
            },
            power: PowerParams { m_slots: 1, n_p: dofs, sigma_s2: 1.0, power_scale: 1.0 },
            coding: CodingKind::Identity,
            selection: vec![true; n_sc],
        }
    }

    /// A radar user with all subcarriers active and unit powers.
    pub fn radar(n_sc: usize, dofs: usize) -> Self {
        UserSpec {
            kind: NodeKind::Radar,
            dofs,
            membership: Membership::Radar,
            power: PowerParams { m_slots: 1, n_p: dofs, sigma_s2: 1.0, power_scale: 1.0 },
            coding: CodingKind::Identity,
            selection: vec![true; n_sc],
        }
    }

    /// Materializes this user's coding matrix.
    pub fn coding_matrix(&self) -> Result<CodingMatrix, SignalError> {
        CodingMatrix::from_kind(self.coding, self.dofs, self.power.n_p)
    }

    /// Waveform power factor: `M·Tr(C 1 C^H)` for radar,
    /// `σ_S²·Tr(C C^H)` for communication, times `power_scale`.
    pub fn power_factor(&self) -> Result<f64, SignalError> {
        let c = self.coding_matrix()?;
        let base = match self.kind {
            NodeKind::Radar => self.power.m_slots as f64 * c.power_trace_radar(),
            NodeKind::Comm => self.power.sigma_s2 * c.power_trace_comm(),
        };
        Ok(self.power.power_scale * base)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Invalid(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Invalid(msg) => write!(f, "invalid scenario: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioError {}

/// A complete coexistence network.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_sc: usize,
    pub users: Vec<UserSpec>,
    pub noise: NoiseSpec,
}

impl Scenario {
    pub fn new(n_sc: usize, users: Vec<UserSpec>, noise: NoiseSpec) -> Result<Self, ScenarioError> {
        let s = Scenario { n_sc, users, noise };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.users.is_empty() {
            return Err(ScenarioError::Invalid("no users".into()));
        }
        let radars = self.users.iter().filter(|u| u.kind == NodeKind::Radar).count();
        if radars > 1 {
            return Err(ScenarioError::Invalid(format!("{radars} radar users; at most one")));
        }
        for (i, u) in self.users.iter().enumerate() {
            if u.dofs < 1 {
                return Err(ScenarioError::Invalid(format!("user {i} wants zero streams")));
            }
            if u.dofs > self.n_sc {
                return Err(ScenarioError::Invalid(format!(
                    "user {i} wants {} streams over {} subcarriers",
                    u.dofs, self.n_sc
                )));
            }
            let membership_ok = matches!(
                (u.kind, u.membership),
                (NodeKind::Radar, Membership::Radar)
                    | (NodeKind::Comm, Membership::CommRadarInterfered)
                    | (NodeKind::Comm, Membership::CommClear)
            );
            if !membership_ok {
                return Err(ScenarioError::Invalid(format!(
                    "user {i}: membership {:?} inconsistent with kind {:?}",
                    u.membership, u.kind
                )));
            }
            if u.selection.len() != self.n_sc {
                return Err(ScenarioError::Invalid(format!(
                    "user {i}: selection mask length {} != n_sc {}",
                    u.selection.len(),
                    self.n_sc
                )));
            }
            if u.coding == CodingKind::Identity && u.power.n_p != u.dofs {
                return Err(ScenarioError::Invalid(format!(
                    "user {i}: identity coding needs n_p == dofs"
                )));
            }
            if u.power.n_p < u.dofs {
                return Err(ScenarioError::Invalid(format!("user {i}: n_p < dofs")));
            }
        }
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn radar_index(&self) -> Option<usize> {
        self.users.iter().position(|u| u.kind == NodeKind::Radar)
    }

    pub fn comm_indices(&self) -> Vec<usize> {
        (0..self.users.len()).filter(|&i| self.users[i].kind == NodeKind::Comm).collect()
    }

    /// Whether transmitter `tx` reaches receiver `rx` on the forward
    /// network. Self links always exist; communication transmitters reach
    /// everyone; the radar reaches only the radar-interfered subset.
    pub fn reaches(&self, rx: usize, tx: usize) -> bool {
        if rx == tx {
            return true;
        }
        match self.users[tx].kind {
            NodeKind::Comm => true,
            NodeKind::Radar => self.users[rx].membership == Membership::CommRadarInterfered,
        }
    }

    /// Draws one block-fading realization of all connected links. Cross and
    /// communication self links are i.i.d. `CN(0,1)` diagonals; the radar
    /// self link is one draw of the target response model. Draw order is
    /// fixed (receiver-major), so a seeded source reproduces the set.
    pub fn draw_links<R: Rng + ?Sized>(&self, target: &TargetModel, rng: &mut R) -> LinkSet {
        let n = self.n_users();
        let mut links = LinkSet::new(self.n_sc, n);
        for rx in 0..n {
            for tx in 0..n {
                if !self.reaches(rx, tx) {
                    continue;
                }
                let h = if rx == tx && self.users[rx].kind == NodeKind::Radar {
                    target.draw(rng, self.n_sc)
                } else {
                    draw_block_fading(rng, self.n_sc)
                };
                links.insert(rx, tx, h);
            }
        }
        links
    }

    /// Scales every user's transmit power so that
    /// `Tr(A A^H) / (N_sc σ_W²)` equals the requested linear SNR, taking the
    /// unmasked unit-column precoder trace `Tr(A A^H) = factor·d`.
    pub fn with_snr_db(&self, snr_db: f64) -> Result<Scenario, SignalError> {
        #[allow(unused_imports)]
use num_traits::Float;
        let snr = 10.0f64.powf(snr_db / 10.0);
        let mut out = self.clone();
        for u in out.users.iter_mut() {
            let mut probe = u.clone();
            probe.power.power_scale = 1.0;
            let base = probe.power_factor()? * u.dofs as f64;
            u.power.power_scale = snr * self.n_sc as f64 * self.noise.sigma_w2 / base;
        }
        Ok(out)
    }
}
