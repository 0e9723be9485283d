//! Modified Bessel functions `I_nu`, `K_nu` of real order.
//!
//! Below the crossover `z <= ASYMPTOTIC_FROM` the values come from the
//! ascending series (for `I`) and from Temme's series (`z <= 2`) or Steed's
//! continued fraction (`z > 2`) for `K` at the reduced order `|mu| <= 1/2`,
//! followed by forward recurrence. Above the crossover the Hankel asymptotic
//! expansions are used. All routes work with the exponentially scaled pair
//! `(e^-z I, e^z K)` internally.

use crate::error::{check_range, LabError, Result};
use crate::numeric::{lit, Real};

/// Argument from which the asymptotic expansions take over.
pub const ASYMPTOTIC_FROM: f64 = 20.0;
/// Above this argument [`bessel_iv_kv`] returns scaled values.
pub const SCALE_ABOVE: f64 = 700.0;
/// Largest supported argument of the public entry point.
pub const Z_MAX: f64 = 1e4;

/// Taylor coefficients of `1/Gamma(z) = sum_k c_k z^k`, k = 1..26.
const RGAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
];

/// Gamma-function combinations for Temme's method at reduced order `mu`:
/// `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut plus = 0.0;
    let mut minus = 0.0;
    // Horner-free accumulation is fine: |mu| <= 1/2 and the series decays fast.
    let mut pw = 1.0;
    for (idx, c) in RGAMMA.iter().enumerate() {
        // coefficient c_{idx+1} multiplies mu^idx in 1/Gamma(1+mu)
        plus += c * pw;
        minus += c * if idx % 2 == 0 { pw } else { -pw };
        pw *= mu;
    }
    let mut pw = 1.0;
    for (idx, c) in RGAMMA.iter().enumerate() {
        if idx % 2 == 1 {
            // k = idx+1 even: gam1 = -sum c_k mu^(k-2)
            gam1 -= c * pw;
            pw *= mu * mu;
        }
    }
    let mut pw = 1.0;
    for (idx, c) in RGAMMA.iter().enumerate() {
        if idx % 2 == 0 {
            gam2 += c * pw;
            pw *= mu * mu;
        }
    }
    (gam1, gam2, plus, minus)
}

/// `Gamma(x)` for `x > 0` via recurrence onto `[1/2, 3/2]` and the reciprocal Taylor series.
pub fn gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut x = x;
    let mut factor = 1.0;
    while x > 1.5 {
        x -= 1.0;
        factor *= x;
    }
    while x < 0.5 {
        factor /= x;
        x += 1.0;
    }
    let (_, _, plus, _) = temme_gammas(x - 1.0);
    factor / plus
}

/// Scaled values at one order: `e^-z I_nu, e^-z I_{nu+1}, e^z K_nu, e^z K_{nu+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ScaledLadder {
    i: f64,
    i_next: f64,
    k: f64,
    k_next: f64,
}

/// `K_mu`, `K_{mu+1}` scaled by `e^z` for `|mu| <= 1/2`.
fn k_reduced_scaled(mu: f64, z: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    if z <= 2.0 {
        let x2 = 0.5 * z;
        let pimu = std::f64::consts::PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..10_000 {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu * mu);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let scale = z.exp();
        (sum * scale, sum1 * 2.0 / z * scale)
    } else {
        // Steed's algorithm for the continued fraction CF2.
        let mut b = 2.0 * (1.0 + z);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..100_000 {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        let h = a1 * h;
        let kmu = (std::f64::consts::PI / (2.0 * z)).sqrt() / s;
        let k1 = kmu * (mu + z + 0.5 - h) / z;
        (kmu, k1)
    }
}

/// Scaled `e^-z I_nu` from the ascending series, `nu >= 0`.
fn i_series_scaled(nu: f64, z: f64, log_rgamma_nu1: f64) -> f64 {
    let x2 = 0.5 * z;
    let q = x2 * x2;
    // Work in logs for the leading factor to avoid overflow of (z/2)^nu e^-z / Gamma(nu+1).
    let lead = (nu * x2.ln() - z + log_rgamma_nu1).exp();
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..10_000 {
        let fk = k as f64;
        term *= q / (fk * (fk + nu));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    lead * sum
}

/// Hankel asymptotic expansions; returns `(e^-z I_nu, e^z K_nu)`.
fn asymptotic_scaled(nu: f64, z: f64) -> (f64, f64) {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum_k = 1.0;
    let mut sum_i = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let fk = k as f64;
        let odd = 2.0 * fk - 1.0;
        term *= (mu4 - odd * odd) / (fk * 8.0 * z);
        if term.abs() >= prev && k > 2 {
            break;
        }
        prev = term.abs();
        sum_k += term;
        sum_i += if k % 2 == 0 { term } else { -term };
        if term.abs() < 1e-17 * sum_k.abs() {
            break;
        }
    }
    let pi = std::f64::consts::PI;
    (sum_i / (2.0 * pi * z).sqrt(), sum_k * (pi / (2.0 * z)).sqrt())
}

/// Series and continued-fraction route, valid for any `z > 0` (used below the crossover).
fn ladder_direct(nu: f64, z: f64) -> ScaledLadder {
    let nl = nu.round();
    let mu = nu - nl;
    let nl = nl as usize;
    let (mut km, mut kn) = k_reduced_scaled(mu, z);
    for j in 0..nl {
        let next = 2.0 * (mu + j as f64 + 1.0) / z * kn + km;
        km = kn;
        kn = next;
    }
    let (_, _, gampl, _) = temme_gammas(mu);
    // log 1/Gamma(nu + 1) = log 1/Gamma(1 + mu) - sum_{j=1..nl} log(mu + j)
    let mut lrg = gampl.ln();
    for j in 1..=nl {
        lrg -= (mu + j as f64).ln();
    }
    let i = i_series_scaled(nu, z, lrg);
    let i_next = i_series_scaled(nu + 1.0, z, lrg - (nu + 1.0).ln());
    ScaledLadder {
        i,
        i_next,
        k: km,
        k_next: kn,
    }
}

fn ladder_asymptotic(nu: f64, z: f64) -> ScaledLadder {
    let (i, k) = asymptotic_scaled(nu, z);
    let (i_next, k_next) = asymptotic_scaled(nu + 1.0, z);
    ScaledLadder { i, i_next, k, k_next }
}

/// Exponentially scaled values and derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBessel<T> {
    /// `e^-z I_nu(z)`
    pub i: T,
    /// `e^-z I_nu'(z)`
    pub i_prime: T,
    /// `e^z K_nu(z)`
    pub k: T,
    /// `e^z K_nu'(z)`
    pub k_prime: T,
}

/// Which evaluation route was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselRoute {
    Series,
    Asymptotic,
}

/// Scaled `I_nu`, `K_nu` and derivatives for any order `nu >= 0` and `z > 0`.
///
/// Large orders stay on the series route until `z > 2 nu^2`, where the asymptotic terms decay.
pub fn bessel_scaled<T: Real>(nu: T, z: T) -> Result<ScaledBessel<T>> {
    let (nf, zf) = (nu.as_f64(), z.as_f64());
    let route = if zf > ASYMPTOTIC_FROM && zf > 2.0 * nf * nf {
        BesselRoute::Asymptotic
    } else {
        BesselRoute::Series
    };
    bessel_scaled_route(nu, z, route)
}

/// Scaled evaluation through an explicit route (exposed for crossover validation).
pub fn bessel_scaled_route<T: Real>(nu: T, z: T, route: BesselRoute) -> Result<ScaledBessel<T>> {
    let (nu, z) = (nu.as_f64(), z.as_f64());
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(LabError::InvalidParameter {
            name: "nu",
            value: nu,
            range: "[0, inf)",
        });
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(LabError::InvalidParameter {
            name: "z",
            value: z,
            range: "(0, inf)",
        });
    }
    let l = match route {
        BesselRoute::Series => ladder_direct(nu, z),
        BesselRoute::Asymptotic => ladder_asymptotic(nu, z),
    };
    let r = nu / z;
    let out = ScaledBessel {
        i: lit(l.i),
        i_prime: lit(l.i_next + r * l.i),
        k: lit(l.k),
        k_prime: lit(-l.k_next + r * l.k),
    };
    debug_assert!({
        let w = l.i * (-l.k_next + r * l.k) - (l.i_next + r * l.i) * l.k;
        (w * z + 1.0).abs() < 1e-8
    });
    Ok(out)
}

/// Values returned by [`bessel_iv_kv`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValues<T> {
    pub i: T,
    pub k: T,
    pub i_prime: T,
    pub k_prime: T,
    /// When true, `i`, `i_prime` carry a factor `e^-z` and `k`, `k_prime` a factor `e^z`.
    pub scaled: bool,
}

/// `I_nu(z)`, `K_nu(z)` and derivatives for `nu in (0, 2]`, `z in (0, 1e4)`.
///
/// Above `z = 700` the exponentially scaled pair is returned instead, flagged by `scaled`.
pub fn bessel_iv_kv<T: Real>(nu: T, z: T) -> Result<BesselValues<T>> {
    let (nf, zf) = (nu.as_f64(), z.as_f64());
    if !(nf > 0.0 && nf <= 2.0) {
        return Err(LabError::InvalidParameter {
            name: "nu",
            value: nf,
            range: "(0, 2]",
        });
    }
    check_range("z", zf, f64::MIN_POSITIVE, Z_MAX, "(0, 1e4)")?;
    if zf >= Z_MAX {
        return Err(LabError::InvalidParameter {
            name: "z",
            value: zf,
            range: "(0, 1e4)",
        });
    }
    let s = bessel_scaled(nu, z)?;
    if zf > SCALE_ABOVE {
        return Ok(BesselValues {
            i: s.i,
            k: s.k,
            i_prime: s.i_prime,
            k_prime: s.k_prime,
            scaled: true,
        });
    }
    let up = z.exp();
    let down = (-z).exp();
    Ok(BesselValues {
        i: s.i * up,
        k: s.k * down,
        i_prime: s.i_prime * up,
        k_prime: s.k_prime * down,
        scaled: false,
    })
}
