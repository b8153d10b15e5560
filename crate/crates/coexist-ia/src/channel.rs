//! Channel models and the frequency-domain receive path.
//!
//! Under the block-fading OFDM assumption every link is a diagonal matrix
//! `H = diag(h_1, …, h_{N_sc})`; the time-domain convolution channel is the
//! circulant `G = B^H H B` (cyclic-prefix model), diagonalized back by the
//! unitary modulation matrix. The receive path superimposes every
//! reaching transmitter: `Y_R = Σ_j H_[rx,j] X_j + W` over the transmitters that
//! reach the receiver, where `X_j` is the frequency-domain transmit chain
//! `(Ω_j ∘ I) P_j C_j S_j`.

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
use crate::rng::{complex_normal, exponential, uniform_phase};
use crate::signal::ModulationMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// The modulation matrix handed to the diagonalizer is not unitary.
    NonUnitaryModulation { defect: f64 },
    /// Shapes do not conform.
    ShapeMismatch(String),
    /// A required link matrix is missing from the link set.
    MissingLink { rx: usize, tx: usize },
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::NonUnitaryModulation { defect } => {
                write!(f, "modulation matrix is not unitary (defect {defect:.3e})")
            }
            ChannelError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            ChannelError::MissingLink { rx, tx } => {
                write!(f, "no channel matrix for receiver {rx} from transmitter {tx}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChannelError {}

/// Per-subcarrier frequency-flat channel, stored and applied strictly as a
/// diagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalChannel {
    diag: Vec<Complex64>,
}

impl DiagonalChannel {
    pub fn new(diag: Vec<Complex64>) -> Self {
        DiagonalChannel { diag }
    }

    pub fn identity(n: usize) -> Self {
        DiagonalChannel { diag: vec![Complex64::new(1.0, 0.0); n] }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    /// Hermitian transpose — the conjugate diagonal.
    pub fn adjoint(&self) -> DiagonalChannel {
        DiagonalChannel { diag: self.diag.iter().map(|z| z.conj()).collect() }
    }

    /// `H · X`: scales row `i` of `x` by `h_i`.
    pub fn apply_left(&self, x: &CMat) -> CMat {
        assert_eq!(x.rows(), self.n(), "diagonal channel shape");
        CMat::from_fn(x.rows(), x.cols(), |i, j| self.diag[i] * x.get(i, j))
    }

    /// `H · x` for a vector.
    pub fn apply_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n());
        self.diag.iter().zip(x).map(|(h, v)| h * v).collect()
    }

    /// `H X H^H` for Hermitian `X`: entry `(i,j)` scaled by `h_i conj(h_j)`.
    pub fn conjugate_hermitian(&self, x: &CMat) -> CMat {
        assert_eq!((x.rows(), x.cols()), (self.n(), self.n()));
        CMat::from_fn(self.n(), self.n(), |i, j| self.diag[i] * x.get(i, j) * self.diag[j].conj())
    }

    pub fn as_matrix(&self) -> CMat {
        let n = self.n();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        m
    }

    pub fn mean_power(&self) -> f64 {
        self.diag.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.n() as f64
    }
}

/// Circulant time-domain channel; each row is the right rotation of the row
/// above it.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantChannel {
    first_row: Vec<Complex64>,
}

/// Wraps a first row into a circulant channel.
pub fn make_circulant(first_row: Vec<Complex64>) -> CirculantChannel {
    assert!(!first_row.is_empty(), "circulant needs at least one tap");
    CirculantChannel { first_row }
}

impl CirculantChannel {
    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    /// Materializes the full matrix: `G[r][c] = h[(c - r) mod N]`.
    pub fn to_matrix(&self) -> CMat {
        let n = self.n();
        CMat::from_fn(n, n, |r, c| self.first_row[(c + n - r) % n])
    }
}

/// Recovers the diagonal frequency response `H` of a circulant `G` through
/// the unitary OFDM modulation matrix: `H = B G B^H`, so that
/// `B^H H B = G`. Rejects non-unitary `B` and inputs whose transform is not
/// diagonal to `1e-10`.
pub fn diagonalize_circulant(
    g: &CirculantChannel,
    b: &ModulationMatrix,
) -> Result<DiagonalChannel, ChannelError> {
    let n = g.n();
    if b.n() != n {
        return Err(ChannelError::ShapeMismatch(format!(
            "circulant of size {n} against modulation of size {}",
            b.n()
        )));
    }
    let unitary_defect = b.mat().adjoint().mul(b.mat()).sub(&CMat::identity(n)).frob_norm();
    if unitary_defect > 1e-10 {
        return Err(ChannelError::NonUnitaryModulation { defect: unitary_defect });
    }
    let transformed = b.mat().mul(&g.to_matrix()).mul(&b.mat().adjoint());
    let mut off = 0.0f64;
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag.push(transformed.get(i, j));
            } else {
                off += transformed.get(i, j).norm_sqr();
            }
        }
    }
    let off = off.sqrt();
    if off > 1e-10 * transformed.frob_norm().max(1.0) {
        return Err(ChannelError::ShapeMismatch(format!(
            "transform of circulant is not diagonal (off-diagonal norm {off:.3e})"
        )));
    }
    Ok(DiagonalChannel::new(diag))
}

/// One block-fading draw: i.i.d. `CN(0,1)` diagonal entries. The draw stays
/// constant for a coherence interval of `L` blocks; interval bookkeeping is
/// the caller's.
pub fn draw_block_fading<R: Rng + ?Sized>(rng: &mut R, n_sc: usize) -> DiagonalChannel {
    DiagonalChannel::new((0..n_sc).map(|_| complex_normal(rng, 1.0)).collect())
}

/// Swerling amplitude-fluctuation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// Fixed response; never redrawn.
    Nonfluctuating,
    /// Exponential power, redrawn once per coherent interval.
    SwerlingI,
    /// Exponential power, redrawn every pulse.
    SwerlingII,
    /// Chi-squared 4-DoF power, redrawn once per coherent interval.
    SwerlingIII,
    /// Chi-squared 4-DoF power, redrawn every pulse.
    SwerlingIV,
}

/// Target response model: fluctuation family plus mean subcarrier power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetModel {
    pub kind: TargetKind,
    pub mean_power: f64,
}

impl TargetModel {
    pub fn new(kind: TargetKind, mean_power: f64) -> Self {
        assert!(mean_power > 0.0, "target mean power must be positive");
        TargetModel { kind, mean_power }
    }

    /// One draw of the diagonal target response. Entries are independent
    /// across subcarriers with mean power `mean_power` each: complex Gaussian
    /// for Swerling I/II (exponential power), chi-squared 4-DoF power with
    /// uniform phase for III/IV, fixed amplitude with uniform phase for the
    /// nonfluctuating case.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n_sc: usize) -> DiagonalChannel {
        let mp = self.mean_power;
        let diag = (0..n_sc)
            .map(|_| match self.kind {
                TargetKind::SwerlingI | TargetKind::SwerlingII => complex_normal(rng, mp),
                TargetKind::SwerlingIII | TargetKind::SwerlingIV => {
                    // chi^2 with 4 DoF scaled to mean mp: Gamma(2, mp/2)
                    let power = exponential(rng, mp / 2.0) + exponential(rng, mp / 2.0);
                    uniform_phase(rng) * power.sqrt()
                }
                TargetKind::Nonfluctuating => uniform_phase(rng) * mp.sqrt(),
            })
            .collect();
        DiagonalChannel::new(diag)
    }

    fn redraws_per_pulse(&self) -> bool {
        matches!(self.kind, TargetKind::SwerlingII | TargetKind::SwerlingIV)
    }

    fn redraws_per_interval(&self) -> bool {
        matches!(self.kind, TargetKind::SwerlingI | TargetKind::SwerlingIII)
    }
}

/// Streaming target response with the Swerling redraw cadence: I/III redraw
/// once per coherent interval of `interval_len` pulses, II/IV every pulse,
/// nonfluctuating never. Pulses must be consumed in nondecreasing order.
#[derive(Debug, Clone)]
pub struct TargetSequence<R: Rng> {
    model: TargetModel,
    n_sc: usize,
    interval_len: usize,
    rng: R,
    epoch: Option<usize>,
    current: Option<DiagonalChannel>,
}

impl<R: Rng> TargetSequence<R> {
    pub fn new(model: TargetModel, n_sc: usize, interval_len: usize, rng: R) -> Self {
        assert!(interval_len >= 1, "coherent interval must hold at least one pulse");
        TargetSequence { model, n_sc, interval_len, rng, epoch: None, current: None }
    }

    /// Target response in effect for the given pulse index.
    pub fn response_at(&mut self, pulse: usize) -> DiagonalChannel {
        let epoch = if self.model.redraws_per_pulse() {
            pulse
        } else if self.model.redraws_per_interval() {
            pulse / self.interval_len
        } else {
            0
        };
        if let Some(prev) = self.epoch {
            assert!(epoch >= prev, "target sequence consumed out of order");
        }
        if self.epoch != Some(epoch) || self.current.is_none() {
            self.current = Some(self.model.draw(&mut self.rng, self.n_sc));
            self.epoch = Some(epoch);
        }
        self.current.clone().expect("drawn above")
    }
}

/// Receiver noise: variance per complex sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_w2: f64,
}

impl NoiseSpec {
    pub fn new(sigma_w2: f64) -> Self {
        assert!(sigma_w2 > 0.0, "noise variance must be positive");
        NoiseSpec { sigma_w2 }
    }
}

/// Complete map of channels for one network draw: a diagonal matrix for
/// every (receiver, transmitter) pair that is connected, including the
/// self-links (the radar self-link is the target response).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSet {
    n_sc: usize,
    n_users: usize,
    links: Vec<Option<DiagonalChannel>>, // rx-major
}

impl LinkSet {
    pub fn new(n_sc: usize, n_users: usize) -> Self {
        LinkSet { n_sc, n_users, links: vec![None; n_users * n_users] }
    }

    pub fn n_sc(&self) -> usize {
        self.n_sc
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn insert(&mut self, rx: usize, tx: usize, h: DiagonalChannel) {
        assert_eq!(h.n(), self.n_sc, "link dimension");
        self.links[rx * self.n_users + tx] = Some(h);
    }

    /// Whether transmitter `tx` reaches receiver `rx`.
    pub fn reaches(&self, rx: usize, tx: usize) -> bool {
        self.links[rx * self.n_users + tx].is_some()
    }

    pub fn channel(&self, rx: usize, tx: usize) -> Result<&DiagonalChannel, ChannelError> {
        self.links[rx * self.n_users + tx].as_ref().ok_or(ChannelError::MissingLink { rx, tx })
    }

    /// The reciprocal network: link direction reversed and every channel
    /// Hermitian-transposed, `H̄_[ij] = H_[ji]^H`. Applying it twice returns
    /// the original set.
    pub fn reciprocal(&self) -> LinkSet {
        let mut out = LinkSet::new(self.n_sc, self.n_users);
        for rx in 0..self.n_users {
            for tx in 0..self.n_users {
                if let Some(h) = &self.links[tx * self.n_users + rx] {
                    out.insert(rx, tx, h.adjoint());
                }
            }
        }
        out
    }
}

/// Superimposes every reaching transmit block at one receiver and adds
/// `CN(0, σ_W²)` noise:
///
/// ```text
/// Y_R = Σ_{j reaching rx} H_[rx,j] · X_j + W
/// ```
///
/// `blocks` holds the frequency-domain transmit chains
/// `X_j = (Ω_j ∘ I) P_j C_j S_j` indexed by transmitter; entries are `None`
/// for silent transmitters. Transmitters that reach `rx` must supply a
/// block of matching shape.
pub fn receive<R: Rng + ?Sized>(
    blocks: &[Option<&CMat>],
    links: &LinkSet,
    rx: usize,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<CMat, ChannelError> {
    if blocks.len() != links.n_users() {
        return Err(ChannelError::ShapeMismatch(format!(
            "{} blocks for {} users",
            blocks.len(),
            links.n_users()
        )));
    }
    let m = blocks
        .iter()
        .flatten()
        .map(|b| b.cols())
        .next()
        .ok_or_else(|| ChannelError::ShapeMismatch("no active transmitter".into()))?;
    let mut y = CMat::zeros(links.n_sc(), m);
    for (tx, block) in blocks.iter().enumerate() {
        let Some(x) = block else { continue };
        if !links.reaches(rx, tx) {
            continue;
        }
        if x.rows() != links.n_sc() || x.cols() != m {
            return Err(ChannelError::ShapeMismatch(format!(
                "transmit block {tx} is {}, expected {}x{}",
                x.shape_str(),
                links.n_sc(),
                m
            )));
        }
        let h = links.channel(rx, tx)?;
        y = y.add(&h.apply_left(x));
    }
    for i in 0..y.rows() {
        for j in 0..y.cols() {
            let w = complex_normal(rng, noise.sigma_w2);
            let v = y.get(i, j) + w;
            y.set(i, j, v);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{build_modulation_matrix, CarrierGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circulant_layout_matches_rotation_pattern() {
        let g = make_circulant(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let m = g.to_matrix();
        assert_eq!(m.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(m.get(0, 1), Complex64::new(2.0, 0.0));
        assert_eq!(m.get(1, 0), Complex64::new(2.0, 0.0));
        assert_eq!(m.get(1, 1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn single_tap_circulant_is_scalar() {
        let g = make_circulant(vec![Complex64::new(3.0, -1.0)]);
        let m = g.to_matrix();
        assert_eq!(m.get(0, 0), Complex64::new(3.0, -1.0));
    }

    #[test]
    fn circulant_commutes_with_cyclic_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 4;
        let g = make_circulant((0..n).map(|_| complex_normal(&mut rng, 1.0)).collect());
        let m = g.to_matrix();
        // cyclic shift matrix: S e_k = e_{k+1 mod n}
        let s = CMat::from_fn(n, n, |i, j| {
            Complex64::new(if (j + 1) % n == i { 1.0 } else { 0.0 }, 0.0)
        });
        let lhs = m.mul(&s);
        let rhs = s.mul(&m);
        assert!(lhs.sub(&rhs).frob_norm() < 1e-14);
    }

    #[test]
    fn diagonalize_identity_and_scalar() {
        let grid = CarrierGrid::ofdm(4, 1.0, 1);
        let b = build_modulation_matrix(&grid).unwrap();
        let mut first = vec![Complex64::new(0.0, 0.0); 4];
        first[0] = Complex64::new(1.0, 0.0);
        let h = diagonalize_circulant(&make_circulant(first), &b).unwrap();
        for z in h.diag() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }

        let g1 = CarrierGrid::ofdm(1, 1.0, 1);
        let b1 = build_modulation_matrix(&g1).unwrap();
        let h1 =
            diagonalize_circulant(&make_circulant(vec![Complex64::new(2.0, 1.0)]), &b1).unwrap();
        assert!((h1.diag()[0] - Complex64::new(2.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonalization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2usize, 3, 8, 16] {
            let grid = CarrierGrid::ofdm(n, 1.0, 1);
            let b = build_modulation_matrix(&grid).unwrap();
            let g = make_circulant((0..n).map(|_| complex_normal(&mut rng, 1.0)).collect());
            let h = diagonalize_circulant(&g, &b).unwrap();
            let back = b.mat().adjoint().mul(&h.as_matrix()).mul(b.mat());
            assert!(back.sub(&g.to_matrix()).frob_norm() <= 1e-10, "n={n}");
        }
    }

    #[test]
    fn diagonalize_rejects_non_unitary_modulation() {
        let grid = CarrierGrid { ofdm: false, ..CarrierGrid::ofdm(4, 1.0, 1) };
        let grid = CarrierGrid { delta_f: 0.37, t_c: 1.9, ..grid };
        let b = build_modulation_matrix(&grid).unwrap();
        let g = make_circulant(vec![Complex64::new(1.0, 0.0); 4]);
        assert!(matches!(
            diagonalize_circulant(&g, &b),
            Err(ChannelError::NonUnitaryModulation { .. })
        ));
    }

    #[test]
    fn block_fading_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 100_000;
        let mut power = 0.0;
        let mut cross = 0.0;
        for _ in 0..n {
            let h = draw_block_fading(&mut rng, 1);
            let z = h.diag()[0];
            power += z.norm_sqr();
            cross += z.re * z.im;
        }
        assert!((power / n as f64 - 1.0).abs() < 0.03);
        assert!((cross / n as f64).abs() < 0.01);
    }

    #[test]
    fn swerling_cadence() {
        let model = TargetModel::new(TargetKind::SwerlingI, 1.0);
        let mut seq = TargetSequence::new(model, 2, 500, ChaCha8Rng::seed_from_u64(15));
        let a = seq.response_at(0);
        let b = seq.response_at(250);
        let c = seq.response_at(499);
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = seq.response_at(500);
        assert_ne!(a, d);

        let nf = TargetModel::new(TargetKind::Nonfluctuating, 1.0);
        let mut seq = TargetSequence::new(nf, 2, 10, ChaCha8Rng::seed_from_u64(16));
        let a = seq.response_at(0);
        let b = seq.response_at(5000);
        assert_eq!(a, b);
    }

    #[test]
    fn swerling_ii_pulses_uncorrelated() {
        let model = TargetModel::new(TargetKind::SwerlingII, 1.0);
        let mut seq = TargetSequence::new(model, 1, 1, ChaCha8Rng::seed_from_u64(17));
        let n = 10_000;
        let mut corr = Complex64::new(0.0, 0.0);
        let mut prev = seq.response_at(0).diag()[0];
        for k in 1..n {
            let cur = seq.response_at(k).diag()[0];
            corr += prev.conj() * cur;
            prev = cur;
        }
        assert!((corr / n as f64).norm() < 0.05);
    }

    #[test]
    fn swerling_power_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for kind in [TargetKind::SwerlingI, TargetKind::SwerlingIII, TargetKind::Nonfluctuating] {
            let model = TargetModel::new(kind, 2.5);
            let n = 20_000;
            let mean: f64 = (0..n)
                .map(|_| model.draw(&mut rng, 1).diag()[0].norm_sqr())
                .sum::<f64>()
                / n as f64;
            assert!((mean - 2.5).abs() < 0.15, "{kind:?}: {mean}");
        }
    }

    #[test]
    fn receive_identity_channel_passes_block_through() {
        let mut links = LinkSet::new(3, 1);
        links.insert(0, 0, DiagonalChannel::identity(3));
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let x = CMat::from_fn(3, 2, |_, _| complex_normal(&mut rng, 1.0));
        // sigma_w2 must be positive; use a negligible value for the W = 0 case
        let y = receive(&[Some(&x)], &links, 0, &NoiseSpec::new(1e-30), &mut rng).unwrap();
        assert!(y.sub(&x).frob_norm() < 1e-12);
    }

    #[test]
    fn receive_pure_noise_variance() {
        let mut links = LinkSet::new(1, 2);
        links.insert(0, 0, DiagonalChannel::identity(1));
        // tx 1 exists but does not reach rx 0
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let silent = CMat::zeros(1, 1);
        let mut acc = 0.0;
        let n = 100_000;
        let noise = NoiseSpec::new(0.7);
        for _ in 0..n {
            let y = receive(&[Some(&silent), None], &links, 0, &noise, &mut rng).unwrap();
            acc += y.get(0, 0).norm_sqr();
        }
        assert!((acc / n as f64 - 0.7).abs() < 0.02);
    }

    #[test]
    fn receive_missing_link_names_pair() {
        let links = LinkSet::new(2, 1); // no channel inserted
        let x = CMat::zeros(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // reaches() is false without a matrix, so the block is skipped; force
        // the error through the channel accessor instead.
        assert!(matches!(
            links.channel(0, 0),
            Err(ChannelError::MissingLink { rx: 0, tx: 0 })
        ));
        let y = receive(&[Some(&x)], &links, 0, &NoiseSpec::new(1.0), &mut rng).unwrap();
        assert_eq!(y.rows(), 2);
    }

    #[test]
    fn receive_disjoint_masks_separate_rows() {
        let n = 4;
        let mut links = LinkSet::new(n, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        links.insert(0, 0, draw_block_fading(&mut rng, n));
        links.insert(0, 1, draw_block_fading(&mut rng, n));
        // blocks with disjoint row support
        let x0 = CMat::from_fn(n, 1, |i, _| {
            if i < 2 { complex_normal(&mut rng, 1.0) } else { Complex64::new(0.0, 0.0) }
        });
        let x1 = CMat::from_fn(n, 1, |i, _| {
            if i >= 2 { complex_normal(&mut rng, 1.0) } else { Complex64::new(0.0, 0.0) }
        });
        let y = receive(&[Some(&x0), Some(&x1)], &links, 0, &NoiseSpec::new(1e-30), &mut rng)
            .unwrap();
        let h0 = links.channel(0, 0).unwrap();
        let h1 = links.channel(0, 1).unwrap();
        for i in 0..n {
            let expect =
                if i < 2 { h0.diag()[i] * x0.get(i, 0) } else { h1.diag()[i] * x1.get(i, 0) };
            assert!((y.get(i, 0) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_is_involution_and_conjugates_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut links = LinkSet::new(2, 3);
        for rx in 0..3 {
            for tx in 0..3 {
                if rx != 2 || tx != 1 {
                    links.insert(rx, tx, draw_block_fading(&mut rng, 2));
                }
            }
        }
        let rcp = links.reciprocal();
        assert_eq!(rcp.reciprocal(), links);
        assert!(!rcp.reaches(1, 2));
        let fwd = links.channel(0, 1).unwrap();
        let rev = rcp.channel(1, 0).unwrap();
        for (a, b) in fwd.diag().iter().zip(rev.diag()) {
            assert_eq!(a.conj(), *b);
        }
    }
}
