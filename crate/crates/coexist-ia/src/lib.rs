//! Spectrum sharing between a multicarrier radar and K multicarrier
//! communication users on a shared set of subcarriers.
//!
//! The crate provides, in dependency order:
//!
//! * [`linalg`] — dense complex matrices with the small set of factorizations
//!   the solvers need (Cholesky, Hermitian eigendecomposition, one-sided
//!   Jacobi SVD).
//! * [`signal`] — the generalized multicarrier transmit block
//!   `Y_T = (Ω ∘ B) P C S` with time-domain synthesis and demodulation.
//! * [`channel`] — diagonal block-fading channels, circulant time-domain
//!   channels and their DFT diagonalization, Swerling target models and the
//!   frequency-domain receive path.
//! * [`scenario`] — user sets, interference topology and power bookkeeping
//!   for a K+1-user radar/communication network.
//! * [`solver`] — IA feasibility checks and the alternating max-SINR
//!   precoder/decoder co-design.
//! * [`baseline`] — small-singular-value space projection (SSSVSP) and the
//!   unprocessed identity reference.
//! * [`detect`] — Neyman–Pearson detection with empirical threshold
//!   calibration, Pd estimation and ROC curves.
//!
//! Everything is `no_std`-compatible (with `alloc`); the companion crate
//! `coexist-ia-sim` carries configuration files, CSV/JSON output and the CLI.
//!
//! All randomness flows through caller-provided [`rand::Rng`] sources, so any
//! fixed seed reproduces a run bit-for-bit.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod baseline;
pub mod channel;
pub mod detect;
pub mod linalg;
pub mod rng;
pub mod scenario;
pub mod signal;
pub mod solver;

pub use num_complex::Complex64;
