//! Complex Gamma, Riemann zeta and Dirichlet beta functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 671.0 / 128.0;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_09;
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// Even-index Bernoulli numbers B_2, B_4, ..., B_40.
const BERNOULLI_EVEN: [f64; 20] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
];

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// `sin(pi s)` with the integer part of `re s` removed first, so that values near
/// the integers keep their relative accuracy.
fn sin_pi(s: Complex64) -> Complex64 {
    let n = s.re.round();
    let v = (PI * Complex64::new(s.re - n, s.im)).sin();
    if n.rem_euclid(2.0) == 0.0 {
        v
    } else {
        -v
    }
}

fn lanczos_gamma(z: Complex64) -> Complex64 {
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    for (j, c) in LANCZOS_COEF.iter().enumerate() {
        ser += c / (z + (j + 1) as f64);
    }
    let tmp = z + LANCZOS_G;
    let ln = (z + 0.5) * tmp.ln() - tmp + (2.506_628_274_631_000_5 * ser / z).ln();
    ln.exp()
}

/// Euler Gamma function; reflection is used for `re s < 1/2`.
pub fn complex_gamma(s: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole { re: s.re, im: s.im });
    }
    if s.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - s;
        Ok(PI / (sin_pi(s) * lanczos_gamma(one_minus)))
    } else {
        Ok(lanczos_gamma(s))
    }
}

/// Euler-Maclaurin summation of the Dirichlet series, valid for any `s != 1`
/// but used for `re s >= 0` only.
fn zeta_euler_maclaurin(s: Complex64) -> Complex64 {
    let n = (0.6 * s.norm()).ceil().max(5.0) as usize + 10;
    let nf = n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    sum += n_pow * nf / (s - 1.0) + n_pow * 0.5;

    let mut poch = s;
    let mut tail_pow = n_pow / nf;
    let mut factorial = 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = poch * tail_pow * (b / factorial);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        let m = 2.0 * (j + 1) as f64;
        poch *= (s + m - 1.0) * (s + m);
        tail_pow /= nf * nf;
        factorial *= (m + 1.0) * (m + 2.0);
    }
    sum
}

/// Riemann zeta function; the functional equation is applied for `re s < 0`.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { re: 1.0, im: 0.0 });
    }
    if s.re >= 0.0 {
        return Ok(zeta_euler_maclaurin(s));
    }
    let one_minus = Complex64::new(1.0, 0.0) - s;
    let factor = (s * 2f64.ln()).exp() * ((s - 1.0) * PI.ln()).exp() * sin_pi(s * 0.5);
    Ok(factor * complex_gamma(one_minus)? * zeta_euler_maclaurin(one_minus))
}

/// Cohen-Villegas-Zagier acceleration of `sum_k (-1)^k a_k`, with the number
/// of terms chosen from the growth rate of the weight of `a_k = (2k+1)^{-s}`.
pub(crate) fn alternating_sum(s: Complex64, a: impl Fn(usize) -> Complex64) -> Complex64 {
    let rate = (3.0 + 8f64.sqrt()).ln();
    let n = ((40.0 + 0.5 * PI * s.im.abs() + 2.0 * (1.0 + s.norm()).ln()) / rate).ceil();
    let n = n.clamp(20.0, 250.0) as usize;
    let nf = n as f64;
    let mut d = (3.0 + 8f64.sqrt()).powf(nf);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let kf = k as f64;
        c = b - c;
        sum += a(k) * c;
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    sum / d
}

fn beta_series(s: Complex64) -> Complex64 {
    alternating_sum(s, |k| (-s * ((2 * k + 1) as f64).ln()).exp())
}

/// Dirichlet beta function `sum_k (-1)^k (2k+1)^{-s}`; the functional equation
/// is applied for `re s < 1/2`.
pub fn dirichlet_beta(s: Complex64) -> Complex64 {
    if s.re >= 0.5 {
        return beta_series(s);
    }
    let one_minus = Complex64::new(1.0, 0.0) - s;
    // beta(s) = (2/pi)^{1-s} sin(pi (1-s) / 2) Gamma(1-s) beta(1-s); Gamma(1-s) has
    // no poles here because re(1-s) > 1/2.
    let gamma = lanczos_gamma(one_minus);
    (one_minus * (2.0 / PI).ln()).exp() * sin_pi(one_minus * 0.5) * gamma * beta_series(one_minus)
}
