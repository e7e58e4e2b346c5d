use dqwalk_core::decoherent::{moments, position_distribution, renewal_evolve};
use dqwalk_core::pure_walk::pure_probability_table;
use dqwalk_core::stats::chi_square;
use dqwalk_core::trajectory::{sample_ensemble, EnsembleSpec};
use dqwalk_core::{Coin, InitialState, WalkParams};

fn ensemble(p: f64, initial: InitialState, t: usize, n: u64, seed: u64) -> dqwalk_core::trajectory::EnsembleSummary {
    let params = WalkParams::new(p, initial).unwrap();
    sample_ensemble(&EnsembleSpec {
        params,
        t,
        n_samples: n,
        seed,
    })
    .unwrap()
}

#[test]
fn classical_mean_is_centered() {
    let n = 100_000u64;
    let s = ensemble(1.0, InitialState::CoinRight, 100, n, 11);
    assert!(s.mean.abs() <= 3.0 * (100f64).sqrt() / (n as f64).sqrt(), "{}", s.mean);
}

#[test]
fn pure_walk_passes_chi_square() {
    let s = ensemble(0.0, InitialState::CoinRight, 20, 200_000, 5);
    let w = pure_probability_table(20);
    let exact = w.position_probs(Coin::Right, 20).unwrap();
    let (counts, probs): (Vec<u64>, Vec<f64>) = s
        .counts
        .iter()
        .zip(&exact)
        .filter(|(_, p)| **p > 0.0)
        .map(|(c, p)| (*c, *p))
        .unzip();
    let outcome = chi_square(&counts, &probs, 5.0).unwrap();
    assert!(outcome.p_value > 1e-3, "{outcome:?}");
}

#[test]
fn half_measured_walk_matches_exact_law() {
    let params = WalkParams::new(0.5, InitialState::Symmetric).unwrap();
    let exact = position_distribution(&renewal_evolve(&params, 50).unwrap(), &params, 50).unwrap();
    let s = ensemble(0.5, InitialState::Symmetric, 50, 1_000_000, 21);
    let tv = s.empirical().unwrap().tv_distance(&exact);
    assert!(tv <= 0.005, "{tv}");
}

#[test]
fn total_variation_shrinks_with_samples() {
    for (p, init, t) in [
        (0.2, InitialState::Symmetric, 30),
        (0.5, InitialState::CoinRight, 40),
        (0.8, InitialState::CoinLeft, 25),
    ] {
        let params = WalkParams::new(p, init).unwrap();
        let exact = position_distribution(&renewal_evolve(&params, t).unwrap(), &params, t).unwrap();
        let small = ensemble(p, init, t, 10_000, 3).empirical().unwrap().tv_distance(&exact);
        let large = ensemble(p, init, t, 1_000_000, 3).empirical().unwrap().tv_distance(&exact);
        assert!(large < small, "p={p}: {large} vs {small}");
    }
}

#[test]
fn variance_within_three_standard_errors() {
    let params = WalkParams::new(0.5, InitialState::Symmetric).unwrap();
    let exact = position_distribution(&renewal_evolve(&params, 200).unwrap(), &params, 200).unwrap();
    let (_, var) = moments(&exact);
    let fourth: f64 = exact.iter().map(|(x, p)| (x as f64).powi(4) * p).sum();
    let n = 100_000u64;
    let s = ensemble(0.5, InitialState::Symmetric, 200, n, 2024);
    let se = ((fourth - var * var) / n as f64).sqrt();
    assert!((s.variance - var).abs() <= 3.0 * se, "{} vs {var} (se {se})", s.variance);
}
