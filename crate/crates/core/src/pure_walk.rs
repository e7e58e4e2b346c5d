//! The pure (unmeasured) Hadamard walk on the integer line.
//!
//! Coin 1 moves right, coin 2 moves left; one step applies the Hadamard
//! coin and then the conditional shift.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::table::ProbabilityTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coin {
    /// Coin state 1.
    Right,
    /// Coin state 2.
    Left,
}

impl Coin {
    pub const ALL: [Coin; 2] = [Coin::Right, Coin::Left];

    /// Zero-based array index (`Right -> 0`).
    pub fn index(self) -> usize {
        match self {
            Coin::Right => 0,
            Coin::Left => 1,
        }
    }

    /// The conventional 1/2 label.
    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_label(label: u8) -> Option<Self> {
        match label {
            1 => Some(Coin::Right),
            2 => Some(Coin::Left),
            _ => None,
        }
    }

    /// Displacement applied by the shift operator.
    pub fn shift(self) -> i64 {
        match self {
            Coin::Right => 1,
            Coin::Left => -1,
        }
    }
}

/// Starting state of the walk, always localized at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InitialState {
    /// `(|0,1> + i|0,2>) / sqrt 2`.
    #[default]
    Symmetric,
    /// `|0,1>`.
    CoinRight,
    /// `|0,2>`.
    CoinLeft,
}

impl InitialState {
    pub fn amplitudes(self) -> [Complex64; 2] {
        match self {
            InitialState::Symmetric => [
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, FRAC_1_SQRT_2),
            ],
            InitialState::CoinRight => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            InitialState::CoinLeft => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    /// Weights of the initial coins in the position law.
    ///
    /// All one-coin amplitudes of the walk are real, so the relative phase
    /// `i` of the symmetric start never interferes and its law is the plain
    /// average over the two coins.
    pub fn coin_weights(self) -> [f64; 2] {
        match self {
            InitialState::Symmetric => [0.5, 0.5],
            InitialState::CoinRight => [1.0, 0.0],
            InitialState::CoinLeft => [0.0, 1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialState::Symmetric => "symmetric",
            InitialState::CoinRight => "right",
            InitialState::CoinLeft => "left",
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(InitialState::Symmetric),
            "right" | "coinright" | "1" => Ok(InitialState::CoinRight),
            "left" | "coinleft" | "2" => Ok(InitialState::CoinLeft),
            other => Err(format!(
                "unknown initial state '{other}' (expected symmetric, right or left)"
            )),
        }
    }
}

/// Wave function `Psi(x, n)` of the pure walk at time `t`, stored over the
/// light cone `x in [-t, t]` (index `x + t`).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    t: usize,
    origin: InitialState,
    amps: Vec<[Complex64; 2]>,
}

impl AmplitudeTable {
    pub fn new(origin: InitialState) -> Self {
        Self {
            t: 0,
            origin,
            amps: vec![origin.amplitudes()],
        }
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn origin(&self) -> InitialState {
        self.origin
    }

    pub fn amplitude(&self, x: i64, n: Coin) -> Complex64 {
        if x.unsigned_abs() as usize > self.t {
            return Complex64::new(0.0, 0.0);
        }
        self.amps[(x + self.t as i64) as usize][n.index()]
    }

    /// `(x, [Psi(x,1), Psi(x,2)])` in ascending `x`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, [Complex64; 2])> + '_ {
        let t = self.t as i64;
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, a)| (i as i64 - t, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    pub fn position_probs(&self) -> Vec<f64> {
        self.amps
            .iter()
            .map(|[a, b]| a.norm_sqr() + b.norm_sqr())
            .collect()
    }
}

/// One application of `U = S (I ⊗ H)`.
pub fn hadamard_step(state: &AmplitudeTable) -> AmplitudeTable {
    let t = state.t;
    let mut amps = vec![[Complex64::new(0.0, 0.0); 2]; 2 * t + 3];
    for (i, [a, b]) in state.amps.iter().enumerate() {
        // Site index i (x = i - t) lands at x +- 1, i.e. index i + 2 or i
        // in the row of half-width t + 1.
        amps[i + 2][0] += (a + b) * FRAC_1_SQRT_2;
        amps[i][1] += (a - b) * FRAC_1_SQRT_2;
    }
    AmplitudeTable {
        t: t + 1,
        origin: state.origin,
        amps,
    }
}

/// Iterates [`hadamard_step`] `t` times from `origin`.
pub fn evolve_amplitudes(origin: InitialState, t: usize) -> AmplitudeTable {
    let mut state = AmplitudeTable::new(origin);
    for _ in 0..t {
        state = hadamard_step(&state);
    }
    state
}

/// `W_{m,n}(x,t)` for both initial coins and `0 <= t <= t_max`.
///
/// Evolved in real arithmetic with the unnormalized coin `(a+b, a-b)` and a
/// factor 1/2 after every second step, so that the stored amplitudes are
/// exact dyadic rationals for as long as they fit in a mantissa.
pub fn pure_probability_table(t_max: usize) -> ProbabilityTable {
    let mut rows = Vec::with_capacity(t_max + 1);
    let mut amps: [[Vec<f64>; 2]; 2] = [[vec![1.0], vec![0.0]], [vec![0.0], vec![1.0]]];
    rows.push(squared(&amps, 0));
    for t in 0..t_max {
        for coins in amps.iter_mut() {
            let [a, b] = coins;
            let mut right = vec![0.0; 2 * t + 3];
            let mut left = vec![0.0; 2 * t + 3];
            for i in 0..a.len() {
                right[i + 2] = a[i] + b[i];
                left[i] = a[i] - b[i];
            }
            if (t + 1) % 2 == 0 {
                right.iter_mut().chain(left.iter_mut()).for_each(|v| *v *= 0.5);
            }
            *a = right;
            *b = left;
        }
        rows.push(squared(&amps, t + 1));
    }
    ProbabilityTable::from_rows(rows)
}

fn squared(amps: &[[Vec<f64>; 2]; 2], t: usize) -> [[Vec<f64>; 2]; 2] {
    let odd = if t % 2 == 1 { 0.5 } else { 1.0 };
    let sq = |v: &Vec<f64>| v.iter().map(|a| a * a * odd).collect::<Vec<_>>();
    [
        [sq(&amps[0][0]), sq(&amps[0][1])],
        [sq(&amps[1][0]), sq(&amps[1][1])],
    ]
}

/// Dispersion data of the Hadamard walk at wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralForm {
    pub k: f64,
    /// `sin(omega_k) = sin(k) / sqrt 2`, `omega_k in [-pi/2, pi/2]`.
    pub omega_k: f64,
    pub a_k: f64,
    pub c_k: Complex64,
}

impl SpectralForm {
    pub fn new(k: f64) -> Self {
        let k = k.rem_euclid(std::f64::consts::TAU);
        let root = (1.0 + k.cos().powi(2)).sqrt();
        Self {
            k,
            omega_k: (k.sin() / SQRT_2).asin(),
            a_k: 0.5 + k.cos() / (2.0 * root),
            c_k: Complex64::from_polar(1.0 / (2.0 * root), -k),
        }
    }
}

/// `U(k)`, the one-step evolution acting on Fourier amplitudes.
pub fn fourier_step_matrix(k: f64) -> Matrix2<Complex64> {
    let e = Complex64::from_polar(FRAC_1_SQRT_2, k);
    let f = Complex64::from_polar(FRAC_1_SQRT_2, -k);
    Matrix2::new(e, e, f, -f)
}

/// Closed-form `U(k)^t` from the spectral decomposition.
pub fn evolution_matrix_fourier(k: f64, t: usize) -> Matrix2<Complex64> {
    let sf = SpectralForm::new(k);
    let wt = sf.omega_k * t as f64;
    let i = Complex64::i();
    let a2 = Complex64::from(2.0 * sf.a_k);
    let c2 = sf.c_k * 2.0;
    let phase = Complex64::from_polar(1.0, wt);
    if t % 2 == 1 {
        let co = wt.cos();
        Matrix2::new(
            -phase.conj() + a2 * co,
            c2.conj() * co,
            c2 * co,
            phase - a2 * co,
        )
    } else {
        let si = i * wt.sin();
        Matrix2::new(
            phase.conj() + a2 * si,
            c2.conj() * si,
            c2 * si,
            phase - a2 * si,
        )
    }
}

/// `hat Psi_{m,n}(k,t) = sum_x Psi_{m,n}(x,t) e^{ikx}`.
pub fn psi_hat(k: f64, t: usize, m: Coin, n: Coin) -> Complex64 {
    evolution_matrix_fourier(k, t)[(n.index(), m.index())]
}

/// `hat W_{m,n}(k,t) = sum_x W_{m,n}(x,t) e^{ikx}` read from a pure table.
pub fn pure_char(table: &ProbabilityTable, k: f64, t: usize, m: Coin, n: Coin) -> Result<Complex64> {
    table.char_fn(m, n, k, t)
}

/// Rejects anything outside `[0, 1]`, including NaN.
pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(WalkError::InvalidProbability(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_step_from_each_coin() {
        let s = hadamard_step(&AmplitudeTable::new(InitialState::CoinRight));
        assert_abs_diff_eq!((s.amplitude(1, Coin::Right) - FRAC_1_SQRT_2).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((s.amplitude(-1, Coin::Left) - FRAC_1_SQRT_2).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(s.amplitude(1, Coin::Left), c(0.0, 0.0));

        let s = hadamard_step(&AmplitudeTable::new(InitialState::CoinLeft));
        assert_abs_diff_eq!((s.amplitude(1, Coin::Right) - FRAC_1_SQRT_2).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((s.amplitude(-1, Coin::Left) + FRAC_1_SQRT_2).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_steps_from_right() {
        let s = evolve_amplitudes(InitialState::CoinRight, 2);
        let probs = s.position_probs();
        assert_eq!(probs.len(), 5);
        for (got, want) in probs.iter().zip([0.25, 0.0, 0.5, 0.0, 0.25]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn first_row_of_pure_table() {
        let w = pure_probability_table(3);
        assert_eq!(w.get(Coin::Right, Coin::Right, 1, 1), 0.5);
        assert_eq!(w.get(Coin::Right, Coin::Left, -1, 1), 0.5);
        assert_eq!(w.get(Coin::Right, Coin::Right, -1, 1), 0.0);
        assert_eq!(w.get(Coin::Right, Coin::Left, 1, 1), 0.0);
        for m in Coin::ALL {
            for n in Coin::ALL {
                assert_eq!(w.get(m, n, 0, 0), if m == n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn symmetric_second_moment_at_two() {
        let w = pure_probability_table(2);
        let mut second = 0.0;
        for x in -2i64..=2 {
            for n in Coin::ALL {
                let avg = 0.5 * (w.get(Coin::Right, n, x, 2) + w.get(Coin::Left, n, x, 2));
                second += (x * x) as f64 * avg;
            }
        }
        assert_eq!(second, 2.0);
    }

    #[test]
    fn dyadic_table_matches_complex_evolution() {
        let w = pure_probability_table(60);
        for m in Coin::ALL {
            let origin = if m == Coin::Right {
                InitialState::CoinRight
            } else {
                InitialState::CoinLeft
            };
            let mut s = AmplitudeTable::new(origin);
            for t in 0..=60 {
                for n in Coin::ALL {
                    for x in -(t as i64)..=t as i64 {
                        let diff = (w.get(m, n, x, t) - s.amplitude(x, n).norm_sqr()).abs();
                        assert!(diff < 1e-14, "t={t} x={x} diff={diff}");
                    }
                }
                s = hadamard_step(&s);
            }
        }
    }

    #[test]
    fn unitarity_and_parity_to_a_thousand() {
        let w = pure_probability_table(1000);
        for t in 0..=1000 {
            for m in Coin::ALL {
                assert!((w.total(m, t) - 1.0).abs() < 1e-10, "t={t}");
            }
        }
        for (t, _, _, x, v) in w.iter_entries() {
            if (x + t as i64) % 2 != 0 {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn complex_state_norm_is_preserved() {
        let mut s = AmplitudeTable::new(InitialState::Symmetric);
        for _ in 0..300 {
            s = hadamard_step(&s);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        for (x, a) in s.iter() {
            if (x + 300) % 2 != 0 {
                assert_eq!(a, [c(0.0, 0.0); 2]);
            }
        }
    }

    #[test]
    fn fourier_identity_and_first_power() {
        let id = evolution_matrix_fourier(0.4, 0);
        assert_abs_diff_eq!((id - Matrix2::identity()).norm(), 0.0, epsilon = 1e-15);
        for k in [0.0, 0.3, 1.7, 3.0, 5.5] {
            let d = evolution_matrix_fourier(k, 1) - fourier_step_matrix(k);
            assert!(d.iter().all(|v| v.norm() < 1e-14), "k={k}");
        }
    }

    fn power(k: f64, t: usize) -> Matrix2<Complex64> {
        let u = fourier_step_matrix(k);
        (0..t).fold(Matrix2::identity(), |acc, _| u * acc)
    }

    #[test]
    fn closed_form_matches_seventh_power() {
        let d = evolution_matrix_fourier(0.9, 7) - power(0.9, 7);
        assert!(d.iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn closed_form_matches_powers_on_grid() {
        let mut worst = 0.0f64;
        for j in 0..32 {
            let k = std::f64::consts::TAU * j as f64 / 32.0;
            let u = fourier_step_matrix(k);
            let mut m = Matrix2::identity();
            for t in 0..=200 {
                let d = evolution_matrix_fourier(k, t) - m;
                worst = d.iter().map(|v| v.norm()).fold(worst, f64::max);
                m = u * m;
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn spectral_form_invariants() {
        for j in 0..64 {
            let k = 0.1 * j as f64;
            let sf = SpectralForm::new(k);
            let cos_w = (1.0 + k.cos().powi(2)).sqrt() / SQRT_2;
            assert_abs_diff_eq!(sf.omega_k.cos(), cos_w, epsilon = 1e-14);
            assert!(sf.omega_k.cos() > 0.0);
            assert!((2.0 * sf.a_k - 1.0).abs() <= FRAC_1_SQRT_2 + 1e-15);
        }
    }

    #[test]
    fn pure_char_small_cases() {
        let w = pure_probability_table(3);
        let total = pure_char(&w, 0.0, 1, Coin::Right, Coin::Right).unwrap()
            + pure_char(&w, 0.0, 1, Coin::Right, Coin::Left).unwrap();
        assert_abs_diff_eq!((total - 1.0).norm(), 0.0, epsilon = 1e-15);
        let k = 0.77;
        let w11 = pure_char(&w, k, 1, Coin::Right, Coin::Right).unwrap();
        let w12 = pure_char(&w, k, 1, Coin::Right, Coin::Left).unwrap();
        assert!((w11 - Complex64::from_polar(0.5, k)).norm() < 1e-15);
        assert!((w12 - Complex64::from_polar(0.5, -k)).norm() < 1e-15);
        assert!(pure_char(&w, k, 4, Coin::Right, Coin::Left).is_err());
    }

    #[test]
    fn psi_hat_is_transform_of_amplitudes() {
        let k = 1.3;
        for (m, origin) in [(Coin::Right, InitialState::CoinRight), (Coin::Left, InitialState::CoinLeft)] {
            let s = evolve_amplitudes(origin, 9);
            for n in Coin::ALL {
                let direct: Complex64 = s
                    .iter()
                    .map(|(x, a)| a[n.index()] * Complex64::from_polar(1.0, k * x as f64))
                    .sum();
                assert!((direct - psi_hat(k, 9, m, n)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn initial_state_parsing() {
        assert_eq!("Right".parse::<InitialState>(), Ok(InitialState::CoinRight));
        assert_eq!("symmetric".parse::<InitialState>(), Ok(InitialState::Symmetric));
        assert!("up".parse::<InitialState>().is_err());
    }

    proptest! {
        #[test]
        fn chirality_symmetry(k in 0.0f64..std::f64::consts::TAU, t in 0usize..40) {
            let w = pure_probability_table(t);
            let g = |m, n| pure_char(&w, k, t, m, n).unwrap();
            let (r, l) = (Coin::Right, Coin::Left);
            prop_assert!((g(r, r) - g(l, l).conj()).norm() < 1e-10);
            prop_assert!((g(r, l) - g(l, r).conj()).norm() < 1e-10);
        }

        #[test]
        fn pure_char_is_bounded(k in -10.0f64..10.0, t in 0usize..60) {
            let w = pure_probability_table(t);
            for m in Coin::ALL {
                for n in Coin::ALL {
                    prop_assert!(pure_char(&w, k, t, m, n).unwrap().norm() <= 1.0 + 1e-12);
                }
            }
        }
    }
}
