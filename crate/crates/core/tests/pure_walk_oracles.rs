use std::f64::consts::{PI, SQRT_2, TAU};

use dqwalk_core::pure_walk::{psi_hat, pure_char, pure_probability_table};
use dqwalk_core::Coin;
use num_complex::Complex64;

const NODES: usize = 4096;

/// Periodic trapezoid rule, spectrally accurate for smooth integrands.
fn average_over_circle(f: impl Fn(f64) -> f64) -> f64 {
    (0..NODES).map(|j| f(TAU * j as f64 / NODES as f64)).sum::<f64>() / NODES as f64
}

fn omega(s: f64) -> f64 {
    (s.sin() / SQRT_2).asin()
}

#[test]
fn convolution_integral_matches_table() {
    let table = pure_probability_table(9);
    for t in [1usize, 2, 3, 6, 9] {
        for k in [0.0, 0.5, 2.2] {
            for m in Coin::ALL {
                for n in Coin::ALL {
                    let re = average_over_circle(|s| (psi_hat(s, t, m, n) * psi_hat(k - s, t, m, n)).re);
                    let im = average_over_circle(|s| (psi_hat(s, t, m, n) * psi_hat(k - s, t, m, n)).im);
                    let got = pure_char(&table, k, t, m, n).unwrap();
                    assert!((got - Complex64::new(re, im)).norm() < 1e-8, "t={t} k={k}");
                }
            }
        }
    }
}

/// Real and imaginary parts of `hat W_11` and `hat W_12` at odd `t` as
/// integrals of the dispersion data.
fn odd_time_integrals(k: f64, t: usize) -> (Complex64, Complex64) {
    let tf = t as f64;
    let ratio = |s: f64| (omega(s) * tf).cos() * (omega(k - s) * tf).cos() / (omega(s).cos() * omega(k - s).cos());
    let re11 = average_over_circle(|s| {
        0.5 * ratio(s) * s.cos() * (k - s).cos() - (omega(s) * tf).sin() * (omega(k - s) * tf).sin()
    });
    let im11 = average_over_circle(|s| {
        let (ws, wk) = (omega(s), omega(k - s));
        (s.cos() / ws.cos() * (ws * tf).cos() * (wk * tf).sin()
            + (k - s).cos() / wk.cos() * (wk * tf).cos() * (ws * tf).sin())
            / SQRT_2
    });
    let re12 = average_over_circle(|s| k.cos() / 2.0 * ratio(s));
    let im12 = -average_over_circle(|s| k.sin() / 2.0 * ratio(s));
    (Complex64::new(re11, im11), Complex64::new(re12, im12))
}

fn even_time_integrals(k: f64, t: usize) -> (Complex64, Complex64) {
    let tf = t as f64;
    let ratio = |s: f64| (omega(s) * tf).sin() * (omega(k - s) * tf).sin() / (omega(s).cos() * omega(k - s).cos());
    let re11 = average_over_circle(|s| {
        -0.5 * ratio(s) * s.cos() * (k - s).cos() + (omega(s) * tf).cos() * (omega(k - s) * tf).cos()
    });
    let im11 = average_over_circle(|s| {
        let (ws, wk) = (omega(s), omega(k - s));
        (s.cos() / ws.cos() * (ws * tf).sin() * (wk * tf).cos()
            + (k - s).cos() / wk.cos() * (wk * tf).sin() * (ws * tf).cos())
            / SQRT_2
    });
    let re12 = -average_over_circle(|s| k.cos() / 2.0 * ratio(s));
    let im12 = average_over_circle(|s| k.sin() / 2.0 * ratio(s));
    (Complex64::new(re11, im11), Complex64::new(re12, im12))
}

#[test]
fn dispersion_integrals_at_three_steps() {
    let table = pure_probability_table(3);
    let (w11, w12) = odd_time_integrals(0.5, 3);
    let g = |m, n| pure_char(&table, 0.5, 3, m, n).unwrap();
    assert!((g(Coin::Right, Coin::Right) - w11).norm() < 1e-8);
    assert!((g(Coin::Right, Coin::Left) - w12).norm() < 1e-8);
    assert!((g(Coin::Left, Coin::Left) - w11.conj()).norm() < 1e-8);
    assert!((g(Coin::Left, Coin::Right) - w12.conj()).norm() < 1e-8);
}

#[test]
fn dispersion_integrals_over_a_range_of_times() {
    let table = pure_probability_table(12);
    for t in 1..=12 {
        for k in [0.3, 1.9, PI - 0.1] {
            let (w11, w12) = if t % 2 == 1 {
                odd_time_integrals(k, t)
            } else {
                even_time_integrals(k, t)
            };
            let g = |m, n| pure_char(&table, k, t, m, n).unwrap();
            assert!((g(Coin::Right, Coin::Right) - w11).norm() < 1e-8, "t={t} k={k}");
            assert!((g(Coin::Right, Coin::Left) - w12).norm() < 1e-8, "t={t} k={k}");
        }
    }
}
