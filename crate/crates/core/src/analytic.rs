//! Closed-form generating functions and moment formulas.
//!
//! `Q_{m,n}(k,z) = sum_t p q^{t-1} hat W_{m,n}(k,t) z^t` splits as
//! `Q_11 = S1 + i S3`, `Q_22 = S1 - i S3`, `Q_12 = S2 + i S4`,
//! `Q_21 = S2 - i S4`, where each `S_i` has a closed form in `cos k`,
//! `sin k`, `qz` and the algebraic function
//!
//! `E = sqrt((q²z² - (1+cos k) qz + 1)(q²z² + (1-cos k) qz + 1))`.
//!
//! `E` is taken on the branch analytic in `|qz| < 1` with `E(z=0) = 1`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;

use crate::decoherent::WalkParams;
use crate::error::{Result, WalkError};
use crate::pure_walk::{check_probability, InitialState};

/// Denominators smaller than this are reported as a pole.
pub const POLE_TOLERANCE: f64 = 1e-13;

/// Closed-form data at one point `(k, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfPoint {
    pub k: f64,
    pub z: Complex64,
    pub sigma: [Complex64; 4],
    pub e: Complex64,
    /// Generating function of the symmetric start.
    pub phat: Complex64,
    /// Generating function of the `|0,1>` start.
    pub phat_tilde: Complex64,
}

fn require_positive(what: &'static str, p: f64) -> Result<f64> {
    check_probability(p)?;
    if p == 0.0 {
        return Err(WalkError::RequiresPositiveP { what, p });
    }
    Ok(1.0 - p)
}

fn check_disk(params: &WalkParams, z: Complex64) -> Result<Complex64> {
    if params.p() == 0.0 {
        return Err(WalkError::RequiresPositiveP {
            what: "closed-form generating functions",
            p: 0.0,
        });
    }
    let w = z * params.q();
    if w.norm() >= 1.0 {
        return Err(WalkError::OutsideDisk(w.norm()));
    }
    Ok(w)
}

/// `E(k, z)` as the product of principal roots of its four linear factors
/// `1 - qz r_i`, with `r_i` on the unit circle; each factor has positive
/// real part inside the disk, so the product is analytic there.
pub fn e_value(k: f64, z: Complex64, params: &WalkParams) -> Result<Complex64> {
    let w = check_disk(params, z)?;
    Ok(e_of_w(k.cos(), w))
}

fn e_of_w(c: f64, w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut e = one;
    for b in [-(1.0 + c), 1.0 - c] {
        // Roots of r² + b r + 1.
        let disc = Complex64::new(b * b - 4.0, 0.0).sqrt();
        for sign in [1.0, -1.0] {
            let r = (-b + sign * disc) * 0.5;
            e *= (one - w * r).sqrt();
        }
    }
    e
}

/// `(S1, S2, S3, S4, E)` at `(k, z)`.
pub fn sigma_eval(k: f64, z: Complex64, params: &WalkParams) -> Result<([Complex64; 4], Complex64)> {
    let w = check_disk(params, z)?;
    let (c, s) = (k.cos(), k.sin());
    let e = e_of_w(c, w);
    let p = params.p();
    let den = w * w - 2.0 * c * w + 1.0;
    let two_e = e * 2.0;
    let pz = z * p;
    let s1 = pz / den * (c - w - (c - 2.0 * w + c * w * w) / two_e);
    let s2 = pz * c / two_e;
    let [t3, t4] = tilde34(pz, w, den, two_e);
    Ok(([s1, s2, t3 * s, t4 * s], e))
}

/// `S3 / sin k` and `S4 / sin k`, regular at `sin k = 0`.
pub fn sigma_tilde34(k: f64, z: Complex64, params: &WalkParams) -> Result<[Complex64; 2]> {
    let w = check_disk(params, z)?;
    let c = k.cos();
    let e = e_of_w(c, w);
    let den = w * w - 2.0 * c * w + 1.0;
    Ok(tilde34(z * params.p(), w, den, e * 2.0))
}

fn tilde34(pz: Complex64, w: Complex64, den: Complex64, two_e: Complex64) -> [Complex64; 2] {
    [
        pz / den * (1.0 - (1.0 - w * w) / two_e),
        -pz / two_e,
    ]
}

/// `det(I - Q) = (1 - S1)² - S2² + S3² - S4²`.
fn det_i_minus_q(sigma: &[Complex64; 4]) -> Complex64 {
    let [s1, s2, s3, s4] = *sigma;
    (1.0 - s1) * (1.0 - s1) - s2 * s2 + s3 * s3 - s4 * s4
}

fn pole_checked(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() < POLE_TOLERANCE {
        return Err(WalkError::PoleProximity(den.norm()));
    }
    Ok(num / den)
}

/// Generating function `sum_t hat P(k,t) z^t` of the symmetric start as a
/// single ratio in `cos k`, `z` and `E`.
pub fn phat_symmetric(k: f64, z: Complex64, params: &WalkParams) -> Result<Complex64> {
    let e = e_value(k, z, params)?;
    let (p, q, c) = (params.p(), params.q(), k.cos());
    let num = q * (q - c * c) * z * z + p * c * z + (1.0 - z * c) * e;
    let den = p * q * c * z * z * z - (p * q + p) * z * z + p * c * z + (z * z - 2.0 * c * z + 1.0) * e;
    pole_checked(num, den)
}

/// The same function assembled from the `S_i` and the inverse of `I - Q`.
pub fn phat_symmetric_via_sigma(k: f64, z: Complex64, params: &WalkParams) -> Result<Complex64> {
    let (sigma, _) = sigma_eval(k, z, params)?;
    let (p, q) = (params.p(), params.q());
    let det = det_i_minus_q(&sigma);
    Ok(-q / p + pole_checked(1.0 - sigma[0] + sigma[1], det * p)?)
}

/// Generating function of the `|0,1>` start.
pub fn phat_right(k: f64, z: Complex64, params: &WalkParams) -> Result<Complex64> {
    let (sigma, _) = sigma_eval(k, z, params)?;
    let [t3, t4] = sigma_tilde34(k, z, params)?;
    let det = det_i_minus_q(&sigma) * params.p();
    let base = phat_symmetric(k, z, params)?;
    Ok(base + Complex64::i() * k.sin() * pole_checked(t3 + t4, det)?)
}

/// Generating function of the `|0,2>` start (mirror image of `|0,1>`).
pub fn phat_left(k: f64, z: Complex64, params: &WalkParams) -> Result<Complex64> {
    let base = phat_symmetric(k, z, params)?;
    Ok(2.0 * base - phat_right(k, z, params)?)
}

/// Generating function for any start.
pub fn phat(k: f64, z: Complex64, params: &WalkParams) -> Result<Complex64> {
    match params.initial() {
        InitialState::Symmetric => phat_symmetric(k, z, params),
        InitialState::CoinRight => phat_right(k, z, params),
        InitialState::CoinLeft => phat_left(k, z, params),
    }
}

pub fn gf_point(k: f64, z: Complex64, params: &WalkParams) -> Result<GfPoint> {
    let (sigma, e) = sigma_eval(k, z, params)?;
    Ok(GfPoint {
        k,
        z,
        sigma,
        e,
        phat: phat_symmetric(k, z, params)?,
        phat_tilde: phat_right(k, z, params)?,
    })
}

/// `d/dk` of the `|0,1>` generating function at `k = 0`.
pub fn first_deriv_gf_right(z: Complex64, p: f64) -> Result<Complex64> {
    let q = require_positive("first_deriv_gf_right", p)?;
    let root = (1.0 + q * q * z * z).sqrt();
    let den = (1.0 - z) * (p * z + (1.0 - z) * root);
    Ok(Complex64::i() * pole_checked(z * (root - 1.0), den)?)
}

/// `-d²/dk²` of the symmetric generating function at `k = 0`; its Taylor
/// coefficients are the variances. Defined for `p = 0` as well.
pub fn second_deriv_gf(z: Complex64, p: f64) -> Result<Complex64> {
    check_probability(p)?;
    let q = 1.0 - p;
    let one_minus = 1.0 - z;
    let root = (1.0 + q * q * z * z).sqrt();
    let sq = one_minus * one_minus;
    let a = pole_checked(z, sq)?;
    let b = pole_checked(2.0 * z * z * (root - 1.0), sq * (p * z + one_minus * root))?;
    Ok(a + b)
}

/// Variance per unit time of the Gaussian limit.
pub fn limit_variance(p: f64) -> Result<f64> {
    let q = require_positive("limit_variance", p)?;
    Ok((p + 2.0 * (1.0 + q * q).sqrt() - 2.0) / p)
}

/// Linear-in-`t` asymptote of the variance of the symmetric start
/// (exponentially small terms dropped). For the one-coin starts this is
/// the asymptote of the second moment; see [`longterm_variance_for`].
pub fn longterm_variance(p: f64, t: f64) -> Result<f64> {
    let v = limit_variance(p)?;
    let q = 1.0 - p;
    let r = (1.0 + q * q).sqrt();
    Ok(v * t - 2.0 * q * q / (p * r) - 2.0 / (p * p) * (1.0 + q * q - r))
}

/// Limiting mean of the `|0,1>` start.
pub fn longterm_mean_right(p: f64) -> Result<f64> {
    let q = require_positive("longterm_mean_right", p)?;
    Ok(((1.0 + q * q).sqrt() - 1.0) / p)
}

/// Limiting mean for any start.
pub fn longterm_mean(p: f64, initial: InitialState) -> Result<f64> {
    let mu = longterm_mean_right(p)?;
    Ok(match initial {
        InitialState::Symmetric => 0.0,
        InitialState::CoinRight => mu,
        InitialState::CoinLeft => -mu,
    })
}

/// Asymptotic variance for any start: the one-coin starts carry a mean
/// offset, so their variance sits `mu²` below [`longterm_variance`].
pub fn longterm_variance_for(p: f64, t: f64, initial: InitialState) -> Result<f64> {
    let mu = longterm_mean(p, initial)?;
    Ok(longterm_variance(p, t)? - mu * mu)
}

/// Exact variance of the unmeasured symmetric walk,
/// `t - sum_{j=1}^{(t-2)/2} (t-2j)(t-2j-1) (-1)^j 4^{-j} C(2j, j)`.
pub fn pure_variance_exact(t: usize) -> Result<f64> {
    if t == 0 {
        return Err(WalkError::InvalidTime("pure variance needs t >= 1".into()));
    }
    let mut sum = 0.0;
    // (-1)^j 4^{-j} C(2j, j), built up by its ratio.
    let mut coeff = 1.0;
    let mut j = 1;
    while 2 * j + 2 <= t {
        coeff *= -((2 * j - 1) as f64) / (2 * j) as f64;
        let a = (t - 2 * j) as f64;
        sum += a * (a - 1.0) * coeff;
        j += 1;
    }
    Ok(t as f64 - sum)
}

/// Time minimizing `t²/6 - longterm_variance(p, t)`.
pub fn pseudoquantum_time(p: f64) -> Result<f64> {
    let q = require_positive("pseudoquantum_time", p)?;
    Ok(6.0 * ((1.0 + q * q).sqrt() - 1.0) / p + 3.0)
}

/// Inverts [`pseudoquantum_time`] (decreasing in `p`) by bisection.
pub fn p_for_pseudoquantum_time(t0: f64) -> Result<f64> {
    if !(t0 > 3.0) {
        return Err(WalkError::RootNotFound(format!(
            "pseudoquantum time {t0} is not above its minimum 3"
        )));
    }
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pseudoquantum_time(mid)? > t0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `exp(-v k² / 2)`.
pub fn gaussian_limit_cf(k: f64, p: f64) -> Result<f64> {
    Ok((-limit_variance(p)? * k * k / 2.0).exp())
}

/// `D(0, z) = (1 - z)(1 - qz)(pz + (1 - z) sqrt(1 + q²z²))`.
pub fn denominator_at_zero(z: Complex64, p: f64) -> Complex64 {
    let q = 1.0 - p;
    (1.0 - z) * (1.0 - q * z) * root_factor(z, p)
}

fn root_factor(z: Complex64, p: f64) -> Complex64 {
    let q = 1.0 - p;
    p * z + (1.0 - z) * (1.0 + q * q * z * z).sqrt()
}

/// Second-order small-`p` expansion of the real root beyond `z = 1`.
pub fn second_root_series(p: f64) -> f64 {
    1.0 + FRAC_1_SQRT_2 * p + 0.5 * (0.5 + 1.0 / SQRT_2) * p * p
}

/// Real root of `pz + (1 - z) sqrt(1 + q²z²)` nearest above `z = 1`.
///
/// Scans outward on a geometric grid until the sign changes, then
/// bisects. At `p = 1` the factor is identically 1 and there is no root.
pub fn second_root_estimate(p: f64) -> Result<Complex64> {
    require_positive("second_root_estimate", p)?;
    let g = |z: f64| root_factor(Complex64::new(z, 0.0), p).re;
    let mut lo = 1.0;
    let mut step = 1e-4 * p;
    let mut hi = lo + step;
    while g(hi) > 0.0 {
        lo = hi;
        step *= 1.1;
        hi = lo + step;
        if hi > 1e12 {
            return Err(WalkError::RootNotFound(format!(
                "no sign change of the root factor for p = {p}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Complex64::new(0.5 * (lo + hi), 0.0))
}

/// Formula-side moments at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub p: f64,
    pub q: f64,
    pub t: usize,
    pub initial: InitialState,
    pub mean_formula: f64,
    pub variance_formula: f64,
    pub limit_variance_v: f64,
    pub t0: f64,
}

impl MomentReport {
    pub fn new(p: f64, t: usize, initial: InitialState) -> Result<Self> {
        Ok(Self {
            p,
            q: 1.0 - p,
            t,
            initial,
            mean_formula: longterm_mean(p, initial)?,
            variance_formula: longterm_variance_for(p, t as f64, initial)?,
            limit_variance_v: limit_variance(p)?,
            t0: pseudoquantum_time(p)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(p: f64) -> WalkParams {
        WalkParams::new(p, InitialState::Symmetric).unwrap()
    }

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_wavenumber_values() {
        let pr = params(0.4);
        let z = cz(0.3, -0.5);
        let (s, e) = sigma_eval(0.0, z, &pr).unwrap();
        assert_eq!(s[2], cz(0.0, 0.0));
        assert_eq!(s[3].norm(), 0.0);
        let w = z * 0.6;
        assert!((e - (1.0 - w) * (1.0 + w * w).sqrt()).norm() < 1e-15);
        assert!((phat_symmetric(0.0, z, &pr).unwrap() - 1.0 / (1.0 - z)).norm() < 1e-14);
        assert!((phat_right(0.0, z, &pr).unwrap() - 1.0 / (1.0 - z)).norm() < 1e-14);
    }

    #[test]
    fn classical_sigma() {
        let pr = params(1.0);
        let (k, z) = (0.8, cz(0.7, 0.9));
        let (s, e) = sigma_eval(k, z, &pr).unwrap();
        assert_eq!(e, cz(1.0, 0.0));
        assert!((s[0] - z * k.cos() / 2.0).norm() < 1e-15);
        assert!((s[1] - z * k.cos() / 2.0).norm() < 1e-15);
        // One step of the classical walk: hat P = cos k, so P(z) = 1/(1 - z cos k).
        let want = 1.0 / (1.0 - z * k.cos());
        assert!((phat_symmetric(k, z, &pr).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn disk_and_p_checks() {
        assert!(matches!(
            sigma_eval(0.3, cz(2.1, 0.0), &params(0.5)),
            Err(WalkError::OutsideDisk(_))
        ));
        assert!(sigma_eval(0.3, cz(0.1, 0.0), &params(0.0)).is_err());
        assert!(limit_variance(0.0).is_err());
        assert!(longterm_mean_right(-0.5).is_err());
        assert!(pure_variance_exact(0).is_err());
    }

    #[test]
    fn small_z_limit() {
        let v = phat_symmetric(1.1, cz(1e-9, 0.0), &params(0.35)).unwrap();
        assert!((v - 1.0).norm() < 1e-8);
    }

    #[test]
    fn moment_formula_endpoints() {
        assert_eq!(limit_variance(1.0).unwrap(), 1.0);
        for t in [0.0, 1.0, 17.0, 300.0] {
            assert_eq!(longterm_variance(1.0, t).unwrap(), t);
        }
        assert_eq!(longterm_mean_right(1.0).unwrap(), 0.0);
        assert_eq!(pseudoquantum_time(1.0).unwrap(), 3.0);
        assert!(longterm_mean_right(1e-3).unwrap() > longterm_mean_right(1e-2).unwrap());
        let want = (0.5 + 2.0 * 1.25f64.sqrt() - 2.0) / 0.5;
        assert!((limit_variance(0.5).unwrap() - want).abs() < 1e-15);
        assert_eq!(gaussian_limit_cf(0.0, 0.3).unwrap(), 1.0);
        assert!((gaussian_limit_cf(1.3, 1.0).unwrap() - (-1.3f64 * 1.3 / 2.0).exp()).abs() < 1e-16);
    }

    #[test]
    fn pseudoquantum_time_at_one_percent() {
        assert!((pseudoquantum_time(0.01).unwrap() - 247.3).abs() < 0.05);
        let p = p_for_pseudoquantum_time(247.3).unwrap();
        assert!((p - 0.01).abs() < 1e-4);
    }

    #[test]
    fn pure_variance_small_t() {
        assert_eq!(pure_variance_exact(1).unwrap(), 1.0);
        assert_eq!(pure_variance_exact(2).unwrap(), 2.0);
        let ratio = pure_variance_exact(1000).unwrap() / 1e6;
        assert!((ratio - (1.0 - FRAC_1_SQRT_2)).abs() < 0.01);
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let pr = WalkParams::new(0.45, InitialState::CoinRight).unwrap();
        for z in [0.2, 0.5, 0.8] {
            let z = cz(z, 0.0);
            let h = 1e-5;
            let fd = (phat_right(h, z, &pr).unwrap() - phat_right(-h, z, &pr).unwrap()) / (2.0 * h);
            let exact = first_deriv_gf_right(z, 0.45).unwrap();
            assert!((fd - exact).norm() < 1e-7, "{fd} {exact}");
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let pr = params(0.5);
        for z in [cz(0.3, 0.0), cz(0.5, 0.2), cz(-0.4, 0.4)] {
            let h = 1e-4;
            let f = |k| phat_symmetric(k, z, &pr).unwrap();
            let fd = -(f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            let exact = second_deriv_gf(z, 0.5).unwrap();
            assert!((fd - exact).norm() < 1e-6, "{fd} {exact}");
        }
        assert!(matches!(second_deriv_gf(cz(1.0, 0.0), 0.5), Err(WalkError::PoleProximity(_))));
    }

    #[test]
    fn pure_limit_of_second_derivative() {
        for z in [cz(0.2, 0.0), cz(0.6, 0.1)] {
            let one = 1.0 - z;
            let v0 = z / (one * one) + 2.0 * z * z / (one * one * one) * (1.0 - 1.0 / (1.0 + z * z).sqrt());
            assert!((second_deriv_gf(z, 0.0).unwrap() - v0).norm() < 1e-14);
            assert!((second_deriv_gf(z, 1e-9).unwrap() - v0).norm() < 1e-7);
        }
    }

    #[test]
    fn second_root() {
        let p = 0.01;
        let root = second_root_estimate(p).unwrap();
        let series = second_root_series(p);
        assert!((root.re - series).abs() < 10.0 * p * p * p, "{root} {series}");
        assert!(denominator_at_zero(root, p).norm() < 1e-12);
        assert!(matches!(second_root_estimate(1.0), Err(WalkError::RootNotFound(_))));
        for j in 1..100 {
            let p = j as f64 / 100.0;
            let r = second_root_estimate(p).unwrap();
            assert!(r.norm() > 1.0, "p={p}");
            assert!(root_factor(r, p).norm() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn moment_report_invariants() {
        for p in [0.01, 0.2, 0.7, 1.0] {
            let r = MomentReport::new(p, 100, InitialState::CoinRight).unwrap();
            assert!(r.limit_variance_v >= 1.0);
            assert!(r.t0 >= 3.0);
        }
    }

    proptest! {
        #[test]
        fn routes_agree(k in -3.2f64..3.2, re in -0.9f64..0.9, im in -0.9f64..0.9, p in 0.05f64..=1.0) {
            let z = cz(re, im);
            prop_assume!(z.norm() < 0.95);
            let pr = params(p);
            let a = phat_symmetric(k, z, &pr).unwrap();
            let b = phat_symmetric_via_sigma(k, z, &pr).unwrap();
            prop_assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{a} {b}");
        }

        #[test]
        fn conjugate_symmetry(k in -3.2f64..3.2, re in -0.9f64..0.9, im in -0.9f64..0.9, p in 0.05f64..=1.0) {
            let z = cz(re, im);
            prop_assume!(z.norm() < 0.95);
            let pr = params(p);
            let a = phat_symmetric(k, z, &pr).unwrap();
            let b = phat_symmetric(-k, z.conj(), &pr).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
        }

        #[test]
        fn strictly_decreasing_limit_variance(a in 0.001f64..0.999, d in 0.0005f64..0.5) {
            let b = (a + d).min(1.0);
            prop_assume!(b > a);
            prop_assert!(limit_variance(a).unwrap() > limit_variance(b).unwrap());
        }
    }
}
