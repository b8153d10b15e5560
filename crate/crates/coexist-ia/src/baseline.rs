//! Reference transmit strategies: small-singular-value space projection for
//! the radar and the unprocessed identity design.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::channel::{DiagonalChannel, LinkSet};
use crate::linalg::{svd_right, CMat};
use crate::scenario::Scenario;
use crate::solver::{Solution, SolverError};

/// Projection threshold and stream count for the SSSVSP radar precoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SssvspConfig {
    /// Singular values below this threshold qualify as near-null directions.
    pub sv_threshold: f64,
    /// Radar streams requested.
    pub radar_dofs: usize,
}

impl Default for SssvspConfig {
    fn default() -> Self {
        SssvspConfig { sv_threshold: 0.5, radar_dofs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineError {
    Invalid(String),
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::Invalid(msg) => write!(f, "baseline error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BaselineError {}

/// SSSVSP radar precoder with its selection diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SssvspPrecoder {
    /// Orthonormal column basis of the projection subspace.
    pub precoder: CMat,
    /// No singular value fell below the threshold; the single smallest
    /// direction was returned instead.
    pub degraded: bool,
    /// Singular values of the kept directions, ascending.
    pub selected_singular_values: Vec<f64>,
}

/// Projects the radar transmission into the joint near-null space of its
/// links toward the communication receivers.
///
/// The radar-to-communication channels are stacked vertically and
/// decomposed; right singular directions are ranked by ascending singular
/// value. Directions with `σ < sv_threshold` qualify; the basis is truncated
/// or padded with the next-smallest directions to `radar_dofs` columns. When
/// nothing qualifies the single smallest direction is returned with the
/// `degraded` flag raised.
pub fn sssvsp_precoder(
    radar_to_comm: &[DiagonalChannel],
    cfg: &SssvspConfig,
) -> Result<SssvspPrecoder, BaselineError> {
    if radar_to_comm.is_empty() {
        return Err(BaselineError::Invalid("no radar-to-communication links".into()));
    }
    let n = radar_to_comm[0].n();
    if cfg.radar_dofs < 1 || cfg.radar_dofs > n {
        return Err(BaselineError::Invalid(format!(
            "radar_dofs {} out of range 1..={n}",
            cfg.radar_dofs
        )));
    }
    if cfg.sv_threshold < 0.0 {
        return Err(BaselineError::Invalid("negative singular-value threshold".into()));
    }
    let mats: Vec<CMat> = radar_to_comm.iter().map(|h| h.as_matrix()).collect();
    let refs: Vec<&CMat> = mats.iter().collect();
    let stacked = CMat::vstack(&refs);
    let svd = svd_right(&stacked);

    // Ascending singular order.
    let mut ascending: Vec<usize> = (0..n).collect();
    ascending.reverse();
    let qualifying = svd.singular_values.iter().filter(|&&s| s < cfg.sv_threshold).count();
    let (keep, degraded) =
        if qualifying == 0 { (1, true) } else { (cfg.radar_dofs.min(n), false) };
    let cols: Vec<usize> = ascending.iter().copied().take(keep).collect();
    let precoder = CMat::from_fn(n, cols.len(), |i, j| svd.right_vectors.get(i, cols[j]));
    let selected = cols.iter().map(|&c| svd.singular_values[c]).collect();
    Ok(SssvspPrecoder { precoder, degraded, selected_singular_values: selected })
}

/// The "no processing" reference: precoder and decoder are the leading
/// columns of the identity for every user.
pub fn identity_baseline(n_sc: usize, dofs: &[usize]) -> Result<Solution, BaselineError> {
    let mut precoders = Vec::with_capacity(dofs.len());
    for (i, &d) in dofs.iter().enumerate() {
        if d > n_sc {
            return Err(BaselineError::Invalid(format!(
                "user {i} wants {d} streams over {n_sc} subcarriers"
            )));
        }
        precoders.push(CMat::identity(n_sc).take_cols(d));
    }
    let decoders = precoders.clone();
    Ok(Solution::from_parts(precoders, decoders))
}

/// Assembles the full SSSVSP network design: the radar transmits through
/// [`sssvsp_precoder`], communication users keep identity precoders (the
/// baseline co-designs nothing on their side), and every receiver uses the
/// matched decoder `orth(H_ii (Ω∘I) P_i)`.
pub fn sssvsp_solution(
    scenario: &Scenario,
    links: &LinkSet,
    cfg: &SssvspConfig,
) -> Result<Solution, SolverError> {
    let n = scenario.n_sc;
    let radar = scenario
        .radar_index()
        .ok_or(SolverError::Scenario(crate::scenario::ScenarioError::Invalid(
            "SSSVSP needs a radar user".into(),
        )))?;
    let mut radar_links = Vec::new();
    for i in scenario.comm_indices() {
        if links.reaches(i, radar) {
            radar_links.push(links.channel(i, radar).map_err(|_| SolverError::Topology {
                rx: i,
                tx: radar,
            })?
            .clone());
        }
    }
    // A beam that reaches no communication receiver has nothing to protect;
    // project against its own target path to keep shapes uniform.
    if radar_links.is_empty() {
        radar_links.push(
            links
                .channel(radar, radar)
                .map_err(|_| SolverError::Topology { rx: radar, tx: radar })?
                .clone(),
        );
    }
    let projector = sssvsp_precoder(
        &radar_links,
        &SssvspConfig { radar_dofs: scenario.users[radar].dofs, ..*cfg },
    )
    .map_err(|e| SolverError::Numeric { context: "sssvsp", detail: format!("{e}") })?;

    let mut precoders = Vec::with_capacity(scenario.n_users());
    for (i, u) in scenario.users.iter().enumerate() {
        if i == radar {
            precoders.push(projector.precoder.clone());
        } else {
            precoders.push(CMat::identity(n).take_cols(u.dofs));
        }
    }
    let mut decoders = Vec::with_capacity(scenario.n_users());
    for (i, u) in scenario.users.iter().enumerate() {
        let h = links.channel(i, i).map_err(|_| SolverError::Topology { rx: i, tx: i })?;
        let masked = CMat::from_fn(n, precoders[i].cols(), |r, c| {
            if u.selection[r] { precoders[i].get(r, c) } else { Complex64::new(0.0, 0.0) }
        });
        let mut q = h.apply_left(&masked);
        q.orthonormalize_columns();
        decoders.push(q);
    }
    Ok(Solution::from_parts(precoders, decoders))
}
