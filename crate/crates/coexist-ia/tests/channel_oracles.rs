//! Channel-model oracles: circulant diagonalization round trips at scale and
//! linearity of the receive path.

use coexist_ia::channel::{
    diagonalize_circulant, make_circulant, DiagonalChannel, LinkSet, NoiseSpec,
};
use coexist_ia::linalg::CMat;
use coexist_ia::rng::complex_normal;
use coexist_ia::signal::{build_modulation_matrix, CarrierGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn circulant_round_trip_up_to_64() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = rng.gen_range(1..=64usize);
        let grid = CarrierGrid::ofdm(n, 15_000.0, 1);
        let b = build_modulation_matrix(&grid).unwrap();
        let g = make_circulant((0..n).map(|_| complex_normal(&mut rng, 1.0)).collect());
        let h = diagonalize_circulant(&g, &b).unwrap();
        let back = b.mat().adjoint().mul(&h.as_matrix()).mul(b.mat());
        let err = back.sub(&g.to_matrix()).frob_norm();
        assert!(err <= 1e-10, "trial {trial}, n={n}: {err:e}");
        // the transform itself must be diagonal
        let t = b.mat().mul(&g.to_matrix()).mul(&b.mat().adjoint());
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(t.get(i, j).norm());
                }
            }
        }
        assert!(off <= 1e-10, "n={n}: off-diagonal {off:e}");
    }
}

#[test]
fn receive_is_linear_in_each_block() {
    // With the noise realization held fixed (subtracted out), the receive
    // map must be exactly linear in every transmit block.
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut links = LinkSet::new(n, 2);
    for tx in 0..2 {
        links.insert(
            0,
            tx,
            DiagonalChannel::new((0..n).map(|_| complex_normal(&mut rng, 1.0)).collect()),
        );
    }
    let noise = NoiseSpec::new(1e-30);
    let a = CMat::from_fn(n, 2, |_, _| complex_normal(&mut rng, 1.0));
    let b = CMat::from_fn(n, 2, |_, _| complex_normal(&mut rng, 1.0));
    let c = CMat::from_fn(n, 2, |_, _| complex_normal(&mut rng, 1.0));
    let alpha = Complex64::new(0.7, -1.3);

    let recv = |x0: &CMat, x1: &CMat, rng: &mut ChaCha8Rng| {
        coexist_ia::channel::receive(&[Some(x0), Some(x1)], &links, 0, &noise, rng).unwrap()
    };
    let combo = a.scale_complex(alpha).add(&b);
    let lhs = recv(&combo, &c, &mut rng);
    let ya = recv(&a, &c, &mut rng);
    let yb = recv(&b, &c, &mut rng);
    let yc = recv(&CMat::zeros(n, 2), &c, &mut rng);
    // alpha*ya + yb - yc reproduces the combined response (the c-path enters
    // once through each term and cancels twice).
    let rhs = ya.scale_complex(alpha).add(&yb).sub(&yc.scale_complex(alpha));
    assert!(lhs.sub(&rhs).frob_norm() < 1e-9);
}
