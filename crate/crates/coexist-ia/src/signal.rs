//! Generalized multicarrier transmit model.
//!
//! A transmit block over `N_sc` subcarriers and `M` time slots (resource
//! blocks for communication, subpulses for radar) is
//!
//! ```text
//! Y_T = (Ω ∘ B) P C S
//! ```
//!
//! with `Ω` a binary subcarrier selection matrix, `B` the Vandermonde
//! modulation matrix, `P` a frequency precoder, `C` a coding matrix and `S`
//! the payload data (all-ones for radar). The module also provides the
//! scalar time-domain synthesis of a coefficient matrix at sampling rate
//! `N_sc·Δf` — pulsed for radar (subpulse spacing `T_p = a·T_c`), continuous
//! for communication — together with the demodulation that recovers the
//! coefficients from the complex envelope.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::linalg::CMat;
use crate::rng::complex_normal;

/// Radar or communication branch of the waveform model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveformKind {
    Radar,
    Comm,
}

/// Errors from block assembly and time-domain synthesis.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalError {
    /// A grid or matrix invariant is violated.
    Invalid(String),
    /// Conformability failure; names the offending factor.
    DimensionMismatch { factor: &'static str, detail: String },
    /// Radar synthesis needs the pulse multiplicity `a` to sit on the sample
    /// grid, i.e. to be a positive integer.
    NonIntegerRadarMultiplicity { a: f64 },
}

impl fmt::Display for SignalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalError::Invalid(msg) => write!(f, "invalid signal parameter: {msg}"),
            SignalError::DimensionMismatch { factor, detail } => {
                write!(f, "dimension mismatch at {factor}: {detail}")
            }
            SignalError::NonIntegerRadarMultiplicity { a } => write!(
                f,
                "radar pulse multiplicity a = {a} is not a positive integer; \
                 the subpulse grid at rate N_sc*delta_f only supports integer a"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SignalError {}

/// Subcarrier count, spacing and timing of the multicarrier frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierGrid {
    /// Number of subcarriers `N_sc`.
    pub n_sc: usize,
    /// Subcarrier spacing `Δf` in Hz.
    pub delta_f: f64,
    /// Symbol duration `T_c` in seconds.
    pub t_c: f64,
    /// Time slots per block (`M` subpulses / resource blocks).
    pub m_slots: usize,
    /// Radar pulse multiplicity: subpulse duration `T_p = a·T_c`.
    pub a: f64,
    /// Carrier frequency for time-domain synthesis only.
    pub f_c: f64,
    /// OFDM mode: `T_c · Δf = 1` and the modulation matrix is unitary.
    pub ofdm: bool,
}

impl CarrierGrid {
    /// An OFDM grid with `T_c = 1/Δf`.
    pub fn ofdm(n_sc: usize, delta_f: f64, m_slots: usize) -> Self {
        CarrierGrid { n_sc, delta_f, t_c: 1.0 / delta_f, m_slots, a: 1.0, f_c: 0.0, ofdm: true }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.n_sc < 1 {
            return Err(SignalError::Invalid("n_sc must be >= 1".into()));
        }
        if !(self.delta_f > 0.0) {
            return Err(SignalError::Invalid("delta_f must be positive".into()));
        }
        if !(self.t_c > 0.0) {
            return Err(SignalError::Invalid("t_c must be positive".into()));
        }
        if self.m_slots < 1 {
            return Err(SignalError::Invalid("m_slots must be >= 1".into()));
        }
        if !(self.a > 0.0) {
            return Err(SignalError::Invalid("pulse multiplicity a must be positive".into()));
        }
        if self.ofdm && (self.t_c * self.delta_f - 1.0).abs() > 1e-12 {
            return Err(SignalError::Invalid(format!(
                "ofdm grid requires t_c * delta_f = 1, got {}",
                self.t_c * self.delta_f
            )));
        }
        Ok(())
    }

    /// Sampling interval `T_c / N_sc` (rate `N_sc·Δf` in OFDM mode).
    pub fn sample_period(&self) -> f64 {
        self.t_c / self.n_sc as f64
    }
}

/// Binary subcarrier activation mask `Ω` (entries 0 or 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl SelectionMatrix {
    /// All subcarriers active.
    pub fn all_on(n: usize) -> Self {
        SelectionMatrix { n, entries: vec![true; n * n] }
    }

    /// Row-constant mask: row `r` is all ones when `active[r]` holds. This is
    /// the pattern for which `(Ω ∘ B) = (Ω ∘ I) B` exactly.
    pub fn from_row_mask(active: &[bool]) -> Self {
        let n = active.len();
        let mut entries = vec![false; n * n];
        for r in 0..n {
            if active[r] {
                for c in 0..n {
                    entries[r * n + c] = true;
                }
            }
        }
        SelectionMatrix { n, entries }
    }

    /// Arbitrary 0/1 pattern.
    pub fn from_entries(n: usize, entries: Vec<bool>) -> Result<Self, SignalError> {
        if entries.len() != n * n {
            return Err(SignalError::Invalid(format!(
                "selection matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(SelectionMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    /// Diagonal of `Ω`, i.e. the mask applied by `(Ω ∘ I)`.
    pub fn diag(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    /// Hadamard product `Ω ∘ X`.
    pub fn hadamard(&self, x: &CMat) -> CMat {
        assert_eq!((x.rows(), x.cols()), (self.n, self.n), "selection mask shape");
        CMat::from_fn(self.n, self.n, |i, j| {
            if self.entry(i, j) { x.get(i, j) } else { Complex64::new(0.0, 0.0) }
        })
    }

    /// Applies `(Ω ∘ I)` from the left: zeroes the rows of `x` whose
    /// diagonal mask entry is off.
    pub fn apply_diag(&self, x: &CMat) -> CMat {
        assert_eq!(x.rows(), self.n, "selection diag shape");
        let d = self.diag();
        CMat::from_fn(x.rows(), x.cols(), |i, j| {
            if d[i] { x.get(i, j) } else { Complex64::new(0.0, 0.0) }
        })
    }
}

/// Vandermonde modulation matrix `B` with `B[k][n] = β^{k·n}`,
/// `β = exp(j·2π·Δf·T_c/N_sc)`. In OFDM mode the matrix is scaled by
/// `1/sqrt(N_sc)` so that `B^H B = I` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationMatrix {
    mat: CMat,
    ofdm: bool,
}

impl ModulationMatrix {
    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn is_ofdm(&self) -> bool {
        self.ofdm
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    /// The demodulation matrix `B̈ = B^H` (valid in OFDM mode, where `B` is
    /// unitary and symmetric).
    pub fn demodulator(&self) -> CMat {
        self.mat.adjoint()
    }
}

/// Builds `B` for a carrier grid. In OFDM mode (`Δf·T_c = 1`) the phase
/// exponent `k·n` is reduced modulo `N_sc` before evaluation, which keeps
/// `B^H B = I` to machine precision for every `N_sc`.
pub fn build_modulation_matrix(grid: &CarrierGrid) -> Result<ModulationMatrix, SignalError> {
    grid.validate()?;
    let n = grid.n_sc;
    let mat = if grid.ofdm {
        let scale = 1.0 / (n as f64).sqrt();
        CMat::from_fn(n, n, |k, m| {
            let e = (k * m) % n;
            let ang = 2.0 * core::f64::consts::PI * e as f64 / n as f64;
            Complex64::new(ang.cos() * scale, ang.sin() * scale)
        })
    } else {
        let base = 2.0 * core::f64::consts::PI * grid.delta_f * grid.t_c / n as f64;
        CMat::from_fn(n, n, |k, m| {
            let ang = base * (k * m) as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
    };
    Ok(ModulationMatrix { mat, ofdm: grid.ofdm })
}

/// Frequency precoder with unit-norm columns (`N_sc × N`, `N <= N_sc`).
/// Transmit power enters through the power model, never through the
/// precoder scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    mat: CMat,
}

impl Precoder {
    /// Validates unit-norm columns (tolerance `1e-9`) and `N <= N_sc`.
    pub fn new(mat: CMat) -> Result<Self, SignalError> {
        if mat.cols() > mat.rows() {
            return Err(SignalError::Invalid(format!(
                "precoder has more columns than rows ({})",
                mat.shape_str()
            )));
        }
        for j in 0..mat.cols() {
            let n = mat.col_norm(j);
            if (n - 1.0).abs() > 1e-9 {
                return Err(SignalError::Invalid(format!(
                    "precoder column {j} has norm {n}, expected 1"
                )));
            }
        }
        Ok(Precoder { mat })
    }

    /// Normalizes every column to unit norm and wraps.
    pub fn normalized(mut mat: CMat) -> Result<Self, SignalError> {
        for j in 0..mat.cols() {
            if mat.col_norm(j) < 1e-300 {
                return Err(SignalError::Invalid(format!("precoder column {j} is zero")));
            }
        }
        mat.normalize_columns();
        Precoder::new(mat)
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }
}

/// How the coding matrix `C` (`N × N_p`) is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodingKind {
    /// `C = I`, `N = N_p`.
    Identity,
    /// First `N` rows of the unitary DFT of size `N_p`, so `C C^H = I`.
    OrthogonalDft,
}

/// Coding matrix: pulse compression for radar, channel coding for
/// communication. `N_p/N <= 1` is not enforced; the identity case has
/// `N = N_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingMatrix {
    mat: CMat,
}

impl CodingMatrix {
    pub fn identity(n: usize) -> Self {
        CodingMatrix { mat: CMat::identity(n) }
    }

    /// Orthogonal coding from DFT rows; requires `n <= n_p`. Row 0 is the
    /// constant row, so an all-ones radar data vector keeps full power.
    pub fn orthogonal_dft(n: usize, n_p: usize) -> Result<Self, SignalError> {
        if n > n_p {
            return Err(SignalError::Invalid(format!(
                "orthogonal coding needs n <= n_p, got {n} > {n_p}"
            )));
        }
        let scale = 1.0 / (n_p as f64).sqrt();
        let mat = CMat::from_fn(n, n_p, |r, c| {
            let ang = -2.0 * core::f64::consts::PI * ((r * c) % n_p) as f64 / n_p as f64;
            Complex64::new(ang.cos() * scale, ang.sin() * scale)
        });
        Ok(CodingMatrix { mat })
    }

    pub fn from_kind(kind: CodingKind, n: usize, n_p: usize) -> Result<Self, SignalError> {
        match kind {
            CodingKind::Identity => {
                if n != n_p {
                    return Err(SignalError::Invalid(format!(
                        "identity coding needs n == n_p, got {n} != {n_p}"
                    )));
                }
                Ok(CodingMatrix::identity(n))
            }
            CodingKind::OrthogonalDft => CodingMatrix::orthogonal_dft(n, n_p),
        }
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// `Tr(C C^H)` — the communication power factor.
    pub fn power_trace_comm(&self) -> f64 {
        self.mat.frob_norm_sq()
    }

    /// `Tr(C 1 C^H)` with `1` the all-ones matrix — the radar power factor.
    /// Equals `‖C·1_vec‖²`.
    pub fn power_trace_radar(&self) -> f64 {
        let ones = vec![Complex64::new(1.0, 0.0); self.mat.cols()];
        self.mat.mul_vec(&ones).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Payload data `S` (`N_p × M`): all-ones for radar, i.i.d. complex Gaussian
/// with per-entry variance `σ_S²` for communication.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    mat: CMat,
    kind: WaveformKind,
}

impl DataMatrix {
    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn kind(&self) -> WaveformKind {
        self.kind
    }
}

/// Draws a data matrix for the given waveform branch.
pub fn make_data<R: Rng + ?Sized>(
    kind: WaveformKind,
    n_p: usize,
    m: usize,
    sigma_s: f64,
    rng: &mut R,
) -> DataMatrix {
    assert!(n_p >= 1 && m >= 1, "data matrix needs n_p, m >= 1");
    let mat = match kind {
        WaveformKind::Radar => CMat::from_fn(n_p, m, |_, _| Complex64::new(1.0, 0.0)),
        WaveformKind::Comm => {
            assert!(sigma_s > 0.0, "comm data needs sigma_s > 0");
            let var = sigma_s * sigma_s;
            CMat::from_fn(n_p, m, |_, _| complex_normal(rng, var))
        }
    };
    DataMatrix { mat, kind }
}

/// The assembled transmit block `Y_T = (Ω ∘ B) P C S` (`N_sc × M`).
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitBlock {
    mat: CMat,
}

impl TransmitBlock {
    pub fn mat(&self) -> &CMat {
        &self.mat
    }
}

/// Forms the transmit block as the exact matrix product, with no hidden
/// scaling. Dimension failures name the offending factor.
pub fn assemble_transmit_block(
    omega: &SelectionMatrix,
    b: &ModulationMatrix,
    p: &Precoder,
    c: &CodingMatrix,
    s: &DataMatrix,
) -> Result<TransmitBlock, SignalError> {
    let n_sc = b.n();
    if omega.n() != n_sc {
        return Err(SignalError::DimensionMismatch {
            factor: "selection matrix",
            detail: format!("expected {n_sc}x{n_sc}, got {0}x{0}", omega.n()),
        });
    }
    if p.mat().rows() != n_sc {
        return Err(SignalError::DimensionMismatch {
            factor: "precoder",
            detail: format!("expected {} rows, got {}", n_sc, p.mat().rows()),
        });
    }
    if c.mat().rows() != p.mat().cols() {
        return Err(SignalError::DimensionMismatch {
            factor: "coding matrix",
            detail: format!("expected {} rows, got {}", p.mat().cols(), c.mat().rows()),
        });
    }
    if s.mat().rows() != c.mat().cols() {
        return Err(SignalError::DimensionMismatch {
            factor: "data matrix",
            detail: format!("expected {} rows, got {}", c.mat().cols(), s.mat().rows()),
        });
    }
    let masked = omega.hadamard(b.mat());
    let mat = masked.mul(p.mat()).mul(c.mat()).mul(s.mat());
    Ok(TransmitBlock { mat })
}

/// Scalar time-domain synthesis of a per-subcarrier coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDomainSignal {
    /// Real passband samples `2·Re{env·e^{j2πf_c t}}` at rate `N_sc·Δf`.
    pub samples: Vec<f64>,
    /// Complex baseband envelope at the same rate. The real samples alone
    /// cannot carry the quadrature component at `f_c = 0`, so demodulation
    /// operates on the envelope.
    pub envelope: Vec<Complex64>,
    /// Samples between slot starts: `N_sc` (comm) or `a·N_sc` (radar).
    pub slot_stride: usize,
}

/// Synthesizes the time-domain sequence of a coefficient matrix
/// (`N_sc × M`, one column of per-subcarrier weights per slot).
///
/// Communication slots are contiguous at spacing `T_c`; radar subpulses sit
/// at spacing `T_p = a·T_c` with the remainder of each subpulse silent,
/// which requires integer `a`. Each occupied window carries the modulated
/// symbol `B·w` sampled at `N_sc·Δf`.
pub fn synthesize_time_domain(
    grid: &CarrierGrid,
    weights: &CMat,
    kind: WaveformKind,
) -> Result<TimeDomainSignal, SignalError> {
    grid.validate()?;
    if weights.rows() != grid.n_sc || weights.cols() != grid.m_slots {
        return Err(SignalError::DimensionMismatch {
            factor: "weights",
            detail: format!(
                "expected {}x{}, got {}",
                grid.n_sc,
                grid.m_slots,
                weights.shape_str()
            ),
        });
    }
    let stride = slot_stride(grid, kind)?;
    let b = build_modulation_matrix(grid)?;
    let total = stride * grid.m_slots;
    let mut envelope = vec![Complex64::new(0.0, 0.0); total];
    for m in 0..grid.m_slots {
        let w = weights.col(m);
        let symbol = b.mat().mul_vec(&w);
        let start = m * stride;
        envelope[start..start + grid.n_sc].copy_from_slice(&symbol);
    }
    let dt = grid.sample_period();
    let samples = envelope
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let ang = 2.0 * core::f64::consts::PI * grid.f_c * (k as f64) * dt;
            2.0 * (z * Complex64::new(ang.cos(), ang.sin())).re
        })
        .collect();
    Ok(TimeDomainSignal { samples, envelope, slot_stride: stride })
}

/// Recovers the per-subcarrier coefficient matrix from a complex envelope by
/// applying `B^H` to each occupied slot window (OFDM mode only).
pub fn demodulate_envelope(
    grid: &CarrierGrid,
    envelope: &[Complex64],
    kind: WaveformKind,
) -> Result<CMat, SignalError> {
    grid.validate()?;
    if !grid.ofdm {
        return Err(SignalError::Invalid(
            "demodulation by B^H requires an OFDM (unitary-B) grid".into(),
        ));
    }
    let stride = slot_stride(grid, kind)?;
    let expected = stride * grid.m_slots;
    if envelope.len() != expected {
        return Err(SignalError::DimensionMismatch {
            factor: "envelope",
            detail: format!("expected {} samples, got {}", expected, envelope.len()),
        });
    }
    let demod = build_modulation_matrix(grid)?.demodulator();
    let mut out = CMat::zeros(grid.n_sc, grid.m_slots);
    for m in 0..grid.m_slots {
        let start = m * stride;
        let w = demod.mul_vec(&envelope[start..start + grid.n_sc]);
        out.set_col(m, &w);
    }
    Ok(out)
}

fn slot_stride(grid: &CarrierGrid, kind: WaveformKind) -> Result<usize, SignalError> {
    match kind {
        WaveformKind::Comm => Ok(grid.n_sc),
        WaveformKind::Radar => {
            let rounded = grid.a.round();
            if (grid.a - rounded).abs() > 1e-9 || rounded < 1.0 {
                return Err(SignalError::NonIntegerRadarMultiplicity { a: grid.a });
            }
            Ok(rounded as usize * grid.n_sc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulation_matrix_trivial_sizes() {
        let g1 = CarrierGrid::ofdm(1, 1.0, 1);
        let b1 = build_modulation_matrix(&g1).unwrap();
        assert!((b1.mat().get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // N_sc = 2 OFDM: beta = -1, [[1,1],[1,-1]] before the 1/sqrt(2) scaling.
        let g2 = CarrierGrid::ofdm(2, 1.0, 1);
        let b2 = build_modulation_matrix(&g2).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let expect = [[1.0, 1.0], [1.0, -1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((b2.mat().get(i, j) - Complex64::new(expect[i][j] * s, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ofdm_unitarity_through_64() {
        for n in 1..=64usize {
            let g = CarrierGrid::ofdm(n, 15_000.0, 1);
            let b = build_modulation_matrix(&g).unwrap();
            let defect = b.mat().adjoint().mul(b.mat()).sub(&CMat::identity(n)).frob_norm();
            assert!(defect <= 1e-12, "n={n}: {defect:e}");
        }
    }

    #[test]
    fn ofdm_matrix_is_symmetric() {
        let g = CarrierGrid::ofdm(8, 1.0, 1);
        let b = build_modulation_matrix(&g).unwrap();
        assert!(b.mat().sub(&b.mat().transpose()).frob_norm() < 1e-15);
    }

    #[test]
    fn grid_validation() {
        let mut g = CarrierGrid::ofdm(8, 1000.0, 2);
        g.t_c *= 1.5; // breaks t_c * delta_f = 1
        assert!(matches!(g.validate(), Err(SignalError::Invalid(_))));
        let g0 = CarrierGrid { n_sc: 0, ..CarrierGrid::ofdm(1, 1.0, 1) };
        assert!(g0.validate().is_err());
    }

    #[test]
    fn assemble_identity_chain_returns_data() {
        // Omega all-ones, B = P = C = I via a non-OFDM grid with delta_f*t_c
        // chosen so beta = 1 would be wrong; instead build the chain by hand.
        let n = 3;
        let omega = SelectionMatrix::all_on(n);
        let b = ModulationMatrix { mat: CMat::identity(n), ofdm: false };
        let p = Precoder::new(CMat::identity(n)).unwrap();
        let c = CodingMatrix::identity(n);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = make_data(WaveformKind::Comm, n, 4, 1.0, &mut rng);
        let y = assemble_transmit_block(&omega, &b, &p, &c, &s).unwrap();
        assert_eq!(y.mat(), s.mat());
    }

    #[test]
    fn assemble_zero_selection_annihilates() {
        let n = 4;
        let omega = SelectionMatrix::from_entries(n, vec![false; n * n]).unwrap();
        let g = CarrierGrid::ofdm(n, 1.0, 2);
        let b = build_modulation_matrix(&g).unwrap();
        let p = Precoder::new(CMat::identity(n)).unwrap();
        let c = CodingMatrix::identity(n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = make_data(WaveformKind::Comm, n, 2, 1.0, &mut rng);
        let y = assemble_transmit_block(&omega, &b, &p, &c, &s).unwrap();
        assert_eq!(y.mat().frob_norm(), 0.0);
    }

    #[test]
    fn assemble_matches_elementwise_triple_sum() {
        let n = 4;
        let g = CarrierGrid::ofdm(n, 1.0, 3);
        let b = build_modulation_matrix(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut pmat = CMat::from_fn(n, 2, |_, _| complex_normal(&mut rng, 1.0));
        pmat.normalize_columns();
        let p = Precoder::new(pmat).unwrap();
        let c = CodingMatrix::orthogonal_dft(2, 3).unwrap();
        let s = make_data(WaveformKind::Comm, 3, 3, 1.0, &mut rng);
        let mask: Vec<bool> = (0..n * n).map(|_| rng.gen::<f64>() < 0.7).collect();
        let omega = SelectionMatrix::from_entries(n, mask).unwrap();
        let y = assemble_transmit_block(&omega, &b, &p, &c, &s).unwrap();

        // Independent scalar summation over all indices.
        for i in 0..n {
            for m in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let ob = if omega.entry(i, k) { b.mat().get(i, k) } else { Complex64::new(0.0, 0.0) };
                    for u in 0..2 {
                        for v in 0..3 {
                            acc += ob * p.mat().get(k, u) * c.mat().get(u, v) * s.mat().get(v, m);
                        }
                    }
                }
                assert!((y.mat().get(i, m) - acc).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn assemble_names_offending_factor() {
        let n = 4;
        let g = CarrierGrid::ofdm(n, 1.0, 1);
        let b = build_modulation_matrix(&g).unwrap();
        let omega = SelectionMatrix::all_on(n);
        let p = Precoder::new(CMat::identity(3).take_cols(2)).unwrap(); // 3x2: wrong row count
        let c = CodingMatrix::identity(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = make_data(WaveformKind::Comm, 2, 1, 1.0, &mut rng);
        match assemble_transmit_block(&omega, &b, &p, &c, &s) {
            Err(SignalError::DimensionMismatch { factor: "precoder", .. }) => {}
            other => panic!("expected precoder mismatch, got {other:?}"),
        }
    }

    #[test]
    fn radar_data_is_all_ones_with_exact_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = make_data(WaveformKind::Radar, 2, 3, 1.0, &mut rng);
        for v in s.mat().data() {
            assert_eq!(*v, Complex64::new(1.0, 0.0));
        }
        let gram = s.mat().mul(&s.mat().adjoint());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(gram.get(i, j), Complex64::new(3.0, 0.0)); // M * ones
            }
        }
    }

    #[test]
    fn comm_data_variance_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = make_data(WaveformKind::Comm, 250, 400, 1.0, &mut rng); // 1e5 entries
        let var: f64 =
            s.mat().data().iter().map(|z| z.norm_sqr()).sum::<f64>() / s.mat().data().len() as f64;
        assert!((var - 1.0).abs() < 0.03);

        let mut r1 = ChaCha8Rng::seed_from_u64(8);
        let mut r2 = ChaCha8Rng::seed_from_u64(8);
        let a = make_data(WaveformKind::Comm, 5, 5, 2.0, &mut r1);
        let b = make_data(WaveformKind::Comm, 5, 5, 2.0, &mut r2);
        assert_eq!(a.mat(), b.mat());
    }

    #[test]
    fn row_mask_commutes_with_modulation() {
        // (Ω ∘ B) P == (Ω ∘ I) (B P) exactly for row-constant Ω.
        let n = 5;
        let g = CarrierGrid::ofdm(n, 1.0, 1);
        let b = build_modulation_matrix(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = CMat::from_fn(n, 3, |_, _| complex_normal(&mut rng, 1.0));
        let active: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < 0.5).collect();
        let omega = SelectionMatrix::from_row_mask(&active);
        let lhs = omega.hadamard(b.mat()).mul(&p);
        let rhs = omega.apply_diag(&b.mat().mul(&p));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn synthesis_single_carrier_unit_weight_gives_two() {
        let g = CarrierGrid::ofdm(1, 1.0, 1);
        let w = CMat::identity(1);
        let sig = synthesize_time_domain(&g, &w, WaveformKind::Comm).unwrap();
        assert_eq!(sig.samples.len(), 1);
        assert!((sig.samples[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn radar_support_spans_pulse_grid_with_gaps() {
        let n = 4;
        let mut g = CarrierGrid::ofdm(n, 1.0, 2);
        g.a = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let w = CMat::from_fn(n, 2, |_, _| complex_normal(&mut rng, 1.0));
        let sig = synthesize_time_domain(&g, &w, WaveformKind::Radar).unwrap();
        // M * a * N_sc samples total; occupied support is the first N_sc of
        // each a*N_sc-long subpulse.
        assert_eq!(sig.samples.len(), 2 * 2 * n);
        assert_eq!(sig.slot_stride, 2 * n);
        for (k, z) in sig.envelope.iter().enumerate() {
            let in_window = k % (2 * n) < n;
            if !in_window {
                assert_eq!(*z, Complex64::new(0.0, 0.0), "sample {k} outside subpulse");
            }
        }
        let occupied: f64 = sig.envelope.iter().take(n).map(|z| z.norm_sqr()).sum();
        assert!(occupied > 0.0);
    }

    #[test]
    fn radar_synthesis_rejects_fractional_multiplicity() {
        let mut g = CarrierGrid::ofdm(2, 1.0, 1);
        g.a = 1.5;
        let w = CMat::zeros(2, 1);
        match synthesize_time_domain(&g, &w, WaveformKind::Radar) {
            Err(SignalError::NonIntegerRadarMultiplicity { a }) => assert_eq!(a, 1.5),
            other => panic!("expected multiplicity error, got {other:?}"),
        }
    }

    #[test]
    fn comm_round_trip_recovers_coefficients() {
        let n = 2;
        let g = CarrierGrid::ofdm(n, 1.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = CMat::from_fn(n, 3, |_, _| complex_normal(&mut rng, 1.0));
        let sig = synthesize_time_domain(&g, &w, WaveformKind::Comm).unwrap();
        let back = demodulate_envelope(&g, &sig.envelope, WaveformKind::Comm).unwrap();
        assert!(back.sub(&w).frob_norm() < 1e-12 * w.frob_norm());
    }
}
