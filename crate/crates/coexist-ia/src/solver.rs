//! Interference-alignment feasibility and the alternating max-SINR
//! precoder/decoder co-design.
//!
//! Each user `i` holds a precoder `P_i` and a decoder `Q_i` (both
//! `N_sc × d_i`, unit-norm columns). Ideal alignment means
//! `Q_i^H H_ij P_j = 0` for every cross pair while
//! `rank(Q_i^H H_ii P_i) = d_i`. The solver maximizes the per-user SINR
//!
//! ```text
//! SINR_i = Tr(Q_i^H H_ii A_i A_i^H H_ii^H Q_i) / Tr(Q_i^H D_i Q_i)
//! ```
//!
//! by alternating decoder updates on the forward network with decoder
//! updates on the reciprocal network (which produce the precoders),
//! exploiting TDD reciprocity `H̄_ij = H_ji^H`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channel::LinkSet;
use crate::linalg::{generalized_hermitian_eigen, svd_right, CMat, LinalgError};
use crate::rng::complex_normal;
use crate::scenario::{Scenario, ScenarioError, UserSpec};
use crate::signal::SignalError;

/// Hard cap on the user count for the exhaustive subset condition; the
/// enumeration is exponential and desk-scale networks stay far below it.
pub const MAX_USERS_FOR_SUBSET_CHECK: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    /// The requested stream allocation violates an alignment feasibility
    /// condition; `condition` names the violated rule.
    Infeasible { condition: &'static str, detail: String },
    /// Too many users for the exhaustive subset feasibility check.
    TooManyUsers { count: usize },
    /// Link set and scenario topology disagree for this (receiver,
    /// transmitter) pair.
    Topology { rx: usize, tx: usize },
    /// A numeric factorization failed; carries context and a condition
    /// estimate where available.
    Numeric { context: &'static str, detail: String },
    Scenario(ScenarioError),
    Signal(SignalError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Infeasible { condition, detail } => {
                write!(f, "infeasible ({condition}): {detail}")
            }
            SolverError::TooManyUsers { count } => write!(
                f,
                "{count} users exceed the subset-check cap of {MAX_USERS_FOR_SUBSET_CHECK}"
            ),
            SolverError::Topology { rx, tx } => {
                write!(f, "link topology inconsistent for receiver {rx}, transmitter {tx}")
            }
            SolverError::Numeric { context, detail } => write!(f, "numeric failure in {context}: {detail}"),
            SolverError::Scenario(e) => write!(f, "{e}"),
            SolverError::Signal(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}

impl From<ScenarioError> for SolverError {
    fn from(e: ScenarioError) -> Self {
        SolverError::Scenario(e)
    }
}

impl From<SignalError> for SolverError {
    fn from(e: SignalError) -> Self {
        SolverError::Signal(e)
    }
}

fn numeric(context: &'static str) -> impl FnOnce(LinalgError) -> SolverError {
    move |e| SolverError::Numeric { context, detail: format!("{e}") }
}

/// Verdict of the feasibility oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible,
    Infeasible { condition: &'static str, detail: String },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Checks whether the requested stream allocation admits interference
/// alignment over `n_sc` subcarriers.
///
/// Rule precedence, so the specialized bounds govern their own regimes:
///
/// 1. all users single-stream and at least four users — the single-stream
///    necessary condition `K <= 2·N_sc − 2` (`K` = users minus one);
/// 2. all users with equal streams `d` — the equal-allocation bound
///    `d <= 2·N_sc / (K+1)`;
/// 3. otherwise — the radar-centric conditions: `d_R + d_i <= N_sc` for
///    every user, and the dimension count
///    `2·d_R(N_sc − d_R) − Σ_{i∈S} d_R·d_i >= 0` over every user subset `S`
///    (exhaustive; refused above [`MAX_USERS_FOR_SUBSET_CHECK`] users).
///
/// Returns the first violated condition by name.
pub fn check_feasibility(n_sc: usize, users: &[UserSpec]) -> Result<Feasibility, SolverError> {
    if users.is_empty() {
        return Err(SolverError::Scenario(ScenarioError::Invalid("no users".into())));
    }
    let dofs: Vec<usize> = users.iter().map(|u| u.dofs).collect();
    let total = users.len();
    let all_equal = dofs.windows(2).all(|w| w[0] == w[1]);

    if all_equal {
        let d = dofs[0];
        if d == 1 && total >= 4 {
            // single-stream regime: K <= 2 N_sc - 2
            let k = total - 1;
            if k <= 2 * n_sc - 2 {
                return Ok(Feasibility::Feasible);
            }
            return Ok(Feasibility::Infeasible {
                condition: "single-stream-user-bound",
                detail: format!("K = {k} users besides one exceed 2*N_sc - 2 = {}", 2 * n_sc - 2),
            });
        }
        // equal-allocation bound: d (K+1) <= 2 N_sc
        if d * total <= 2 * n_sc {
            return Ok(Feasibility::Feasible);
        }
        return Ok(Feasibility::Infeasible {
            condition: "equal-dof-bound",
            detail: format!("d = {d} over {total} users exceeds 2*N_sc/(K+1) = {}/{total}", 2 * n_sc),
        });
    }

    // Radar-centric conditions for mixed allocations. Without a radar user
    // the largest allocation plays the anchor role.
    let anchor = users
        .iter()
        .position(|u| u.kind == crate::scenario::NodeKind::Radar)
        .unwrap_or_else(|| {
            let mut best = 0;
            for (i, &d) in dofs.iter().enumerate() {
                if d > dofs[best] {
                    best = i;
                }
            }
            best
        });
    let d_r = dofs[anchor];
    for (i, &d_i) in dofs.iter().enumerate() {
        if d_r + d_i > n_sc {
            return Ok(Feasibility::Infeasible {
                condition: "pairwise-dof-budget",
                detail: format!(
                    "anchor streams {d_r} plus user {i} streams {d_i} exceed N_sc = {n_sc}"
                ),
            });
        }
    }
    if total > MAX_USERS_FOR_SUBSET_CHECK {
        return Err(SolverError::TooManyUsers { count: total });
    }
    let budget = 2 * d_r * (n_sc - d_r);
    for subset in 0u32..(1u32 << total) {
        let mut demand = 0usize;
        for (i, &d_i) in dofs.iter().enumerate() {
            if subset & (1 << i) != 0 {
                demand += d_r * d_i;
            }
        }
        if demand > budget {
            return Ok(Feasibility::Infeasible {
                condition: "subset-dimension-count",
                detail: format!(
                    "subset mask {subset:#b} demands {demand} dimensions against budget {budget}"
                ),
            });
        }
    }
    Ok(Feasibility::Feasible)
}

/// Eigenvector selection rule for the decoder update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMode {
    /// Take the `d` smallest eigenvalues (the literal reading of the
    /// update rule).
    LiteralSmallest,
    /// Take the `d` largest eigenvalues — the selection that actually
    /// increases the SINR objective. Default.
    MaxSinrLargest,
}

/// Solver knobs. Defaults: 500 sweeps, relative objective tolerance `1e-5`,
/// rank tolerance `1e-6`, dominant-eigenvector selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub eps_obj: f64,
    pub eps_rank: f64,
    pub eigen_mode: EigenMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 500,
            eps_obj: 1e-5,
            eps_rank: 1e-6,
            eigen_mode: EigenMode::MaxSinrLargest,
        }
    }
}

/// Per-user precoders and decoders with solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub precoders: Vec<CMat>,
    pub decoders: Vec<CMat>,
    /// Full alternating sweeps executed.
    pub iterations: usize,
    /// Final sum-SINR objective.
    pub objective: f64,
    /// Sum-SINR of the random initialization, for improvement diagnostics.
    pub initial_objective: f64,
    pub converged: bool,
    /// Signal-space rank condition per user at termination.
    pub rank_ok: Vec<bool>,
    /// Total cross-link leakage at termination.
    pub leakage: f64,
    pub per_user_sinr: Vec<f64>,
}

impl Solution {
    /// Wraps raw precoders/decoders with empty diagnostics; callers fill the
    /// metrics through [`Solution::evaluate`].
    pub fn from_parts(precoders: Vec<CMat>, decoders: Vec<CMat>) -> Self {
        let n = precoders.len();
        Solution {
            precoders,
            decoders,
            iterations: 0,
            objective: 0.0,
            initial_objective: 0.0,
            converged: true,
            rank_ok: alloc::vec![true; n],
            leakage: 0.0,
            per_user_sinr: alloc::vec![0.0; n],
        }
    }

    /// Recomputes objective, per-user SINR, leakage and rank flags against
    /// the given network.
    pub fn evaluate(
        &mut self,
        scenario: &Scenario,
        links: &LinkSet,
        eps_rank: f64,
    ) -> Result<(), SolverError> {
        let (sum, per_user) = objective(scenario, links, &self.precoders, &self.decoders)?;
        self.objective = sum;
        self.per_user_sinr = per_user;
        self.leakage = leakage_parts(&self.precoders, &self.decoders, links);
        self.rank_ok = rank_flags(&self.precoders, &self.decoders, links, eps_rank)?;
        Ok(())
    }
}

fn mask_rows(m: &CMat, active: &[bool]) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| {
        if active[i] { m.get(i, j) } else { Complex64::new(0.0, 0.0) }
    })
}

/// Emitted-power matrix `A A^H` of one transmitter:
///
/// ```text
/// radar:  M · (Ω∘I) P Tr(C 1 C^H) P^H (Ω∘I)^H
/// comm:   σ_S² · (Ω∘I) P Tr(C C^H) P^H (Ω∘I)^H
/// ```
///
/// scaled by the user's `power_scale`. Hermitian PSD by construction.
pub fn transmit_power_matrix(
    user: &UserSpec,
    omega_diag: &[bool],
    p: &CMat,
) -> Result<CMat, SolverError> {
    let factor = user.power_factor()?;
    let masked = mask_rows(p, omega_diag);
    Ok(masked.mul(&masked.adjoint()).scale(factor))
}

/// Interference-plus-noise covariance at receiver `rx`:
/// `D = Σ_{j∈Z} H_[rx,j] A_j A_j^H H_[rx,j]^H + σ_W² I` where `Z` holds the
/// transmitters other than `rx` that reach it (on the forward network this
/// is exactly the membership rule: `K−1` peers plus the radar for
/// radar-interfered users, `K−1` peers otherwise, all `K` communication
/// transmitters for the radar).
pub fn interference_covariance(
    rx: usize,
    users: &[UserSpec],
    precoders: &[CMat],
    links: &LinkSet,
    sigma_w2: f64,
) -> Result<CMat, SolverError> {
    let n = links.n_sc();
    let mut cov = CMat::identity(n).scale(sigma_w2);
    for tx in 0..users.len() {
        if tx == rx || !links.reaches(rx, tx) {
            continue;
        }
        let a = transmit_power_matrix(&users[tx], &users[tx].selection, &precoders[tx])?;
        let h = links.channel(rx, tx).map_err(|_| SolverError::Topology { rx, tx })?;
        cov = cov.add(&h.conjugate_hermitian(&a));
    }
    Ok(cov)
}

/// Decoder update: eigen-decomposes `D^{-1} H_ii P_i P_i^H H_ii^H` and keeps
/// `d_i` eigenvectors per the selection mode, each normalized to unit norm.
pub fn update_decoder(
    rx: usize,
    users: &[UserSpec],
    precoders: &[CMat],
    links: &LinkSet,
    sigma_w2: f64,
    mode: EigenMode,
) -> Result<CMat, SolverError> {
    let cov = interference_covariance(rx, users, precoders, links, sigma_w2)?;
    let h_ii = links.channel(rx, rx).map_err(|_| SolverError::Topology { rx, tx: rx })?;
    let hp = h_ii.apply_left(&precoders[rx]);
    let signal = hp.mul(&hp.adjoint());
    let eig = generalized_hermitian_eigen(&signal, &cov).map_err(numeric("decoder update"))?;
    let n = links.n_sc();
    let d = users[rx].dofs;
    let mut q = CMat::zeros(n, d);
    for j in 0..d {
        // Eigenvalues ascend; dominant selection walks from the top.
        let src = match mode {
            EigenMode::LiteralSmallest => j,
            EigenMode::MaxSinrLargest => n - 1 - j,
        };
        for i in 0..n {
            q.set(i, j, eig.vectors.get(i, src));
        }
    }
    q.normalize_columns();
    Ok(q)
}

/// Reciprocity swap: precoders and decoders exchange roles and the link set
/// is Hermitian-transposed (`H̄_[ij] = H_[ji]^H`). An involution.
pub fn swap_reciprocal(solution: &Solution, links: &LinkSet) -> (Solution, LinkSet) {
    let mut swapped = solution.clone();
    core::mem::swap(&mut swapped.precoders, &mut swapped.decoders);
    (swapped, links.reciprocal())
}

fn leakage_parts(precoders: &[CMat], decoders: &[CMat], links: &LinkSet) -> f64 {
    let n_users = precoders.len();
    let mut total = 0.0;
    for rx in 0..n_users {
        for tx in 0..n_users {
            if rx == tx || !links.reaches(rx, tx) {
                continue;
            }
            let h = match links.channel(rx, tx) {
                Ok(h) => h,
                Err(_) => continue,
            };
            total += decoders[rx].adjoint().mul(&h.apply_left(&precoders[tx])).frob_norm_sq();
        }
    }
    total
}

/// Total cross-link residual `Σ_{i≠j} ‖Q_i^H H_[ij] P_j‖_F²`; zero exactly
/// when ideal alignment holds on every cross pair.
pub fn leakage(solution: &Solution, links: &LinkSet) -> f64 {
    leakage_parts(&solution.precoders, &solution.decoders, links)
}

/// Decoded desired-signal reference `Σ_i ‖Q_i^H H_[ii] P_i‖_F²`, the
/// denominator of [`normalized_leakage`].
pub fn desired_signal_power(solution: &Solution, links: &LinkSet) -> f64 {
    let mut total = 0.0;
    for i in 0..solution.precoders.len() {
        if let Ok(h) = links.channel(i, i) {
            total +=
                solution.decoders[i].adjoint().mul(&h.apply_left(&solution.precoders[i])).frob_norm_sq();
        }
    }
    total
}

/// Leakage relative to the decoded desired-signal power.
pub fn normalized_leakage(solution: &Solution, links: &LinkSet) -> f64 {
    leakage(solution, links) / desired_signal_power(solution, links).max(1e-300)
}

fn objective(
    scenario: &Scenario,
    links: &LinkSet,
    precoders: &[CMat],
    decoders: &[CMat],
) -> Result<(f64, Vec<f64>), SolverError> {
    let sigma = scenario.noise.sigma_w2;
    let mut per_user = Vec::with_capacity(scenario.n_users());
    for i in 0..scenario.n_users() {
        let u = &scenario.users[i];
        let a = transmit_power_matrix(u, &u.selection, &precoders[i])?;
        let h = links.channel(i, i).map_err(|_| SolverError::Topology { rx: i, tx: i })?;
        let q = &decoders[i];
        let num = q.adjoint().mul(&h.conjugate_hermitian(&a)).mul(q).trace().re;
        let cov = interference_covariance(i, &scenario.users, precoders, links, sigma)?;
        let den = q.adjoint().mul(&cov).mul(q).trace().re;
        per_user.push(num / den);
    }
    Ok((per_user.iter().sum(), per_user))
}

/// Sum of the per-user SINR values, plus the per-user vector.
pub fn sum_sinr(
    scenario: &Scenario,
    links: &LinkSet,
    solution: &Solution,
) -> Result<(f64, Vec<f64>), SolverError> {
    objective(scenario, links, &solution.precoders, &solution.decoders)
}

fn rank_flags(
    precoders: &[CMat],
    decoders: &[CMat],
    links: &LinkSet,
    eps_rank: f64,
) -> Result<Vec<bool>, SolverError> {
    let mut flags = Vec::with_capacity(precoders.len());
    for i in 0..precoders.len() {
        let h = links.channel(i, i).map_err(|_| SolverError::Topology { rx: i, tx: i })?;
        let m = decoders[i].adjoint().mul(&h.apply_left(&precoders[i]));
        let want = m.rows().min(m.cols());
        flags.push(svd_right(&m).rank(eps_rank) == want);
    }
    Ok(flags)
}

fn validate_topology(scenario: &Scenario, links: &LinkSet) -> Result<(), SolverError> {
    if links.n_sc() != scenario.n_sc || links.n_users() != scenario.n_users() {
        return Err(SolverError::Topology { rx: 0, tx: 0 });
    }
    for rx in 0..scenario.n_users() {
        for tx in 0..scenario.n_users() {
            if scenario.reaches(rx, tx) != links.reaches(rx, tx) {
                return Err(SolverError::Topology { rx, tx });
            }
        }
    }
    Ok(())
}

fn random_orthonormal<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let mut m = CMat::from_fn(rows, cols, |_, _| complex_normal(rng, 1.0));
    m.orthonormalize_columns();
    m
}

/// Runs the alternating max-SINR design.
///
/// Refuses infeasible stream allocations. Each sweep updates every decoder
/// on the forward network, then every precoder as a decoder of the
/// reciprocal network; the sweep ends with the rank condition and a relative
/// objective-change test against `eps_obj`. Exhausting `max_iters` returns
/// the best-effort solution with `converged = false` rather than an error.
/// `max_iters = 0` returns the random orthonormal initialization untouched.
pub fn solve_max_sinr<R: Rng + ?Sized>(
    scenario: &Scenario,
    links: &LinkSet,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<Solution, SolverError> {
    scenario.validate()?;
    validate_topology(scenario, links)?;
    if let Feasibility::Infeasible { condition, detail } =
        check_feasibility(scenario.n_sc, &scenario.users)?
    {
        return Err(SolverError::Infeasible { condition, detail });
    }

    let n = scenario.n_sc;
    let users = &scenario.users;
    let sigma = scenario.noise.sigma_w2;
    let mut precoders: Vec<CMat> =
        users.iter().map(|u| random_orthonormal(rng, n, u.dofs)).collect();
    let mut decoders: Vec<CMat> =
        users.iter().map(|u| random_orthonormal(rng, n, u.dofs)).collect();
    let rlinks = links.reciprocal();

    let (mut obj_prev, _) = objective(scenario, links, &precoders, &decoders)?;
    let initial_objective = obj_prev;
    let mut iterations = 0;
    let mut converged = cfg.max_iters == 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        for i in 0..users.len() {
            decoders[i] = update_decoder(i, users, &precoders, links, sigma, cfg.eigen_mode)?;
        }
        // Reverse direction: the decoders act as reciprocal precoders and
        // the reciprocal decoder update yields the forward precoders.
        for i in 0..users.len() {
            precoders[i] = update_decoder(i, users, &decoders, &rlinks, sigma, cfg.eigen_mode)?;
        }
        let (obj, _) = objective(scenario, links, &precoders, &decoders)?;
        let rel = (obj - obj_prev).abs() / obj_prev.abs().max(1e-300);
        obj_prev = obj;
        if rel <= cfg.eps_obj {
            let ranks = rank_flags(&precoders, &decoders, links, cfg.eps_rank)?;
            if ranks.iter().all(|&ok| ok) {
                converged = true;
                break;
            }
        }
    }

    let mut solution = Solution::from_parts(precoders, decoders);
    solution.iterations = iterations;
    solution.initial_objective = initial_objective;
    solution.converged = converged;
    solution.evaluate(scenario, links, cfg.eps_rank)?;
    solution.converged = converged && solution.rank_ok.iter().all(|&ok| ok);
    Ok(solution)
}
