mod common;

use common::oracles::{dense, ks_two_sample, ks_two_sample_critical_1pct, matmul, matvec, normal_equations_inverse};
use common::{default_link, reference_tap};
use mmfpls::channel::{eve_equalize, precode, transmit_bob, transmit_eve, ArtificialNoise, LinkConfig, LinkSettings};
use mmfpls::linalg::{haar_unitary, svd, AlphaRule, ComplexMatrix};
use mmfpls::rng::{complex_gaussian_vec, Seed};
use mmfpls::security::{run_trial, MdmMessage};
use mmfpls::Complex64;

fn unit(n: usize, k: usize) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
}

#[test]
fn noiseless_eve_output_matches_dense_product() {
    let tap = reference_tap();
    let t = haar_unitary(55, Seed(12)).unwrap();
    let x = complex_gaussian_vec(&mut Seed(1).rng(), 55, 0.3);
    let y = transmit_eve(&t, tap, &x, 0.0, Seed(0)).unwrap();
    let tx = matvec(&dense(&t), &x);
    for i in 0..55 {
        let expected = tx[i] * tap.sigma_sq[i].sqrt();
        assert!((y[i] - expected).norm() < 1e-13, "entry {i}");
    }
}

#[test]
fn equalizer_matches_normal_equations_oracle() {
    let link = default_link(4, LinkSettings::default());
    // H from first principles: √V · T_AE · T†_AB, with T†_AB itself from the oracle.
    let t = dense(link.t_ab());
    let alpha_t = 0.12 * svd(link.t_ab()).unwrap().singular_values[0];
    let t_inv = normal_equations_inverse(&t, alpha_t);
    let mut h = matmul(&dense(link.t_ae()), &t_inv);
    for (row, s) in h.iter_mut().zip(&link.tap().sigma_sq) {
        row.iter_mut().for_each(|z| *z *= s.sqrt());
    }
    let h_matrix = ComplexMatrix::from_row_major(55, 55, h.iter().flatten().copied().collect()).unwrap();
    let alpha_h = 0.12 * svd(&h_matrix).unwrap().singular_values[0];
    let h_inv = normal_equations_inverse(&h, alpha_h);

    let y_e = complex_gaussian_vec(&mut Seed(77).rng(), 55, 1.0);
    let ours = eve_equalize(&link, &y_e).unwrap();
    let oracle = matvec(&h_inv, &y_e);
    let scale = oracle.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (a, b) in ours.iter().zip(&oracle) {
        assert!((a - b).norm() < 1e-8 * scale);
    }
}

#[test]
fn bob_receives_message_up_to_one_positive_scalar() {
    let t = haar_unitary(55, Seed(21)).unwrap();
    let x = unit(55, 17);
    let xp = precode(&t, &x, ArtificialNoise::OFF, AlphaRule::NONE, Seed(0)).unwrap();
    let y = transmit_bob(&t, &xp, 0.0, Seed(0)).unwrap();
    let scale = y[17].re;
    assert!(scale > 0.0);
    let worst = y.iter().zip(&x).map(|(a, b)| (a - b * scale).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "max deviation {worst}");
}

#[test]
fn artificial_noise_passes_cleanly_to_bob() {
    let t = haar_unitary(55, Seed(5)).unwrap();
    let x = unit(55, 3);
    let noise = ArtificialNoise::new(0.5);
    let xp = precode(&t, &x, noise, AlphaRule::NONE, Seed(6)).unwrap();
    let y = transmit_bob(&t, &xp, 0.0, Seed(0)).unwrap();
    let n_tilde = noise.draw(&x, Seed(6));
    for i in 0..55 {
        assert!((y[i] * 55f64.sqrt() - (x[i] + n_tilde[i])).norm() < 1e-10);
    }
}

#[test]
fn symmetric_link_gives_identical_snr_distributions() {
    let t = haar_unitary(55, Seed(30)).unwrap();
    let link = LinkConfig::symmetric(t, LinkSettings::default()).unwrap();
    let message = MdmMessage::single(9, 55).unwrap();
    let mut bob = Vec::new();
    let mut eve = Vec::new();
    for trial in 0..500u64 {
        let (b, e) = run_trial(&link, &message, Seed(trial)).unwrap();
        bob.push(b.snr_db.value());
        eve.push(e.snr_db.value());
    }
    assert!(bob.iter().chain(&eve).all(|v| v.is_finite()));
    let d = ks_two_sample(&bob, &eve);
    assert!(d < ks_two_sample_critical_1pct(500, 500), "KS distance {d}");
}

#[test]
fn eve_is_weakest_on_the_most_attenuated_mode() {
    let link = default_link(2, LinkSettings {
        receiver_noise_std: 0.0,
        ..LinkSettings::default()
    });
    // With T_AE = T_AB, H is diagonal, so Eve's noiseless gain is per channel.
    let h = link.eve_channel();
    let h_inv = link.eve_inverse();
    let gains: Vec<f64> = (0..55)
        .map(|i| (0..55).map(|k| h_inv[(i, k)] * h[(k, i)]).sum::<Complex64>().norm())
        .collect();
    let weakest = (0..55).min_by(|&a, &b| link.tap().sigma_sq[a].total_cmp(&link.tap().sigma_sq[b])).unwrap();
    let min_gain = (0..55).min_by(|&a, &b| gains[a].total_cmp(&gains[b])).unwrap();
    assert_eq!(weakest, min_gain);
}
