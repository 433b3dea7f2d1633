//! The Airy function Ai on the real line and the Gaussian tail
//! `Φ(x) = ∫ₓ^∞ e^{−z²/4} dz`.
//!
//! On `|x| ≤ 10.75` Ai is summed as a Taylor series around the nearest of 43
//! tabulated anchors (spacing 0.5), using the recurrence that the Airy
//! equation `y″ = x·y` imposes on the coefficients. The anchors
//! `(Ai(x₀), Ai′(x₀))` were produced by `tools/airy_anchors.py` at 40
//! digits. Outside that range the standard asymptotic expansions are summed
//! until their terms drop below `1e−17`; at `|x| = 10.75` the omitted
//! remainder is below `1e−19`.

use crate::error::{Error, Result};
use alloc::format;
use core::f64::consts::PI;

/// An Airy value, possibly stored as `Ai(x)·e^{(2/3)x^{3/2}}` for `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub value: f64,
    pub scaled: bool,
}

impl AiryValue {
    /// Plain `Ai(x)` (may underflow to zero when scaled).
    pub fn unscaled(&self, x: f64) -> f64 {
        if self.scaled {
            self.value * libm::exp(-zeta(x))
        } else {
            self.value
        }
    }
}

const ANCHOR_LO: f64 = -10.5;
const ANCHOR_STEP: f64 = 0.5;
const TABLE_EDGE: f64 = 10.75;

static ANCHORS: [(f64, f64); 43] = [
    (-0.3119260350510506, 0.09095748739068167),
    (0.04024123848644319, 0.99626504413279),
    (0.3191032477191282, -0.10809531881187123),
    (-0.022133721547341403, -0.9756639809263316),
    (-0.33029023763020887, -0.03231334828463914),
    (-0.0527050503563862, 0.9355609381983065),
    (0.3217757163806479, 0.3188095066985546),
    (0.18428083525050565, -0.7710081684101265),
    (-0.2380203019971158, -0.6749524925132022),
    (-0.3291451736298231, 0.3459354872813429),
    (0.017781541276574976, 0.8641972177713984),
    (0.35076100902411433, 0.32719281855444315),
    (0.2921527810559595, -0.5233625323157477),
    (-0.07026553294928951, -0.7906285753685813),
    (-0.37553382314043193, -0.34344343345404815),
    (-0.37881429367765806, 0.3145837692165988),
    (-0.11232506769296609, 0.6788527342647943),
    (0.22740742820168558, 0.618259020741691),
    (0.4642565777488694, 0.3091869672024104),
    (0.5355608832923521, -0.01016056711664521),
    (0.4757280916105396, -0.20408167033954738),
    (0.3550280538878172, -0.2588194037928068),
    (0.23169360648083348, -0.2249105326646839),
    (0.13529241631288141, -0.1591474412967932),
    (0.07174949700810541, -0.09738201284230132),
    (0.03492413042327438, -0.05309038443365363),
    (0.01572592338047049, -0.026250881035903232),
    (0.006591139357460719, -0.011912976705951319),
    (0.002584098786989635, -0.005004413967952583),
    (0.0009515638512048018, -0.001958640950204179),
    (0.00033025032351430896, -0.0007178665675575089),
    (0.00010834442813607442, -0.0002474138908684625),
    (3.368531190859981e-05, -8.046339130556515e-05),
    (9.947694360252889e-06, -2.4765200397034955e-05),
    (2.7958823432049136e-06, -7.231931466601793e-06),
    (7.492128863997167e-07, -2.008150894738792e-06),
    (1.9172560675134309e-07, -5.312713959720545e-07),
    (4.6922076160992316e-08, -1.3414392979067865e-07),
    (1.0997009755195506e-08, -3.237725440447602e-08),
    (2.47116843087249e-09, -7.480641389658946e-09),
    (5.330263704617492e-10, -1.6566394593740667e-09),
    (1.1047532552898686e-10, -3.5206336767389237e-10),
    (2.2022745192834015e-11, -7.187696781451567e-11),
];

#[inline]
fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x * libm::sqrt(x)
}

/// Taylor sum of Ai around the nearest anchor; `|x| ≤ 10.75`.
fn ai_taylor(x: f64) -> f64 {
    let k = libm::round((x - ANCHOR_LO) / ANCHOR_STEP).clamp(0.0, 42.0) as usize;
    let x0 = ANCHOR_LO + ANCHOR_STEP * k as f64;
    let (a0, a1) = ANCHORS[k];
    let h = x - x0;
    // coefficients c_k of (x − x₀)^k: c₂ = x₀c₀/2, c_{k+2} = (x₀c_k + c_{k−1})/((k+2)(k+1))
    let mut cm1 = 0.0;
    let mut c0 = a0;
    let mut c1 = a1;
    let mut hp = h;
    let mut sum = a0 + a1 * h;
    let scale = a0.abs() + (a1 * h).abs();
    let mut k = 0usize;
    let mut small = 0;
    loop {
        let kf = k as f64;
        let c2 = (x0 * c0 + cm1) / ((kf + 2.0) * (kf + 1.0));
        hp *= h;
        let term = c2 * hp;
        sum += term;
        if term.abs() <= 1e-17 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        cm1 = c0;
        c0 = c1;
        c1 = c2;
        k += 1;
        if k > 60 {
            break;
        }
    }
    sum
}

/// `Ai(x)·e^{ζ}` for `x ≥ 10.75` by the asymptotic series in `1/ζ`.
fn ai_scaled_asymptotic(x: f64) -> f64 {
    let z = zeta(x);
    let mut u = 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = u * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0)
            / (216.0 * k * (2.0 * k - 1.0));
        let t = -term * next / u / z;
        if t.abs() >= term.abs() {
            break;
        }
        if t.abs() < 1e-17 {
            sum += t;
            break;
        }
        sum += t;
        term = t;
        u = next;
        k += 1.0;
    }
    sum / (2.0 * libm::sqrt(PI) * libm::sqrt(libm::sqrt(x)))
}

/// `Ai(x)` for `x ≤ −10.75` by the oscillatory asymptotic expansion.
fn ai_negative_asymptotic(x: f64) -> f64 {
    let r = -x;
    let z = zeta(r);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut u = 1.0;
    let mut zp = 1.0;
    let mut k = 1usize;
    let mut prev = f64::INFINITY;
    loop {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (216.0 * kf * (2.0 * kf - 1.0));
        zp *= z;
        let t = u / zp;
        if t >= prev || t < 1e-17 {
            break;
        }
        prev = t;
        // k ≡ 0,1,2,3 (mod 4) → +p, +q, −p, −q
        match k % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
        k += 1;
    }
    let phase = z - PI / 4.0;
    (libm::cos(phase) * p + libm::sin(phase) * q) / (libm::sqrt(PI) * libm::sqrt(libm::sqrt(r)))
}

/// Ai(x) without the finiteness check; NaN propagates.
#[inline]
pub(crate) fn ai(x: f64) -> f64 {
    if x.abs() <= TABLE_EDGE {
        ai_taylor(x)
    } else if x > 0.0 {
        let z = zeta(x);
        if z > 745.0 {
            0.0
        } else {
            ai_scaled_asymptotic(x) * libm::exp(-z)
        }
    } else {
        ai_negative_asymptotic(x)
    }
}

/// `Ai(x)·e^{(2/3)x^{3/2}}` for `x ≥ 0`, unchecked.
#[inline]
pub(crate) fn ai_scaled_raw(x: f64) -> f64 {
    if x <= TABLE_EDGE {
        ai_taylor(x) * libm::exp(zeta(x))
    } else {
        ai_scaled_asymptotic(x)
    }
}

/// `Ai(x)·e^{e}` without intermediate overflow or underflow.
#[inline]
pub(crate) fn ai_exp(x: f64, e: f64) -> f64 {
    if x > 0.0 {
        let s = e - zeta(x);
        if s < -745.0 {
            0.0
        } else {
            ai_scaled_raw(x) * libm::exp(s)
        }
    } else {
        ai(x) * libm::exp(e)
    }
}

/// The Airy function Ai(x).
///
/// ```
/// let v = airyproc_core::specfun::airy_ai(0.0).unwrap();
/// assert!((v - 0.355028053887817).abs() < 1e-15);
/// ```
pub fn airy_ai(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("airy_ai needs a finite argument, got {x}")));
    }
    Ok(ai(x))
}

/// `Ai(x)·e^{(2/3)x^{3/2}}` for `x ≥ 0`; finite where `Ai` underflows.
pub fn airy_ai_scaled(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::Domain(format!("airy_ai_scaled needs finite x >= 0, got {x}")));
    }
    Ok(ai_scaled_raw(x))
}

/// Ai in the representation that cannot underflow: scaled for `x > 0`.
pub fn airy_value(x: f64) -> Result<AiryValue> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("airy_value needs a finite argument, got {x}")));
    }
    Ok(if x > 0.0 {
        AiryValue {
            value: ai_scaled_raw(x),
            scaled: true,
        }
    } else {
        AiryValue {
            value: ai(x),
            scaled: false,
        }
    })
}

/// `Φ(x) = ∫ₓ^∞ e^{−z²/4} dz = √π·erfc(x/2)`; `Φ(−∞) = 2√π`.
pub fn gaussian_tail(x: f64) -> f64 {
    libm::sqrt(PI) * libm::erfc(0.5 * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_sit_on_the_table_grid() {
        assert!((ANCHORS[21].0 - 0.355028053887817239).abs() < 1e-16);
        assert!((ANCHORS[21].1 + 0.258819403792806798).abs() < 1e-16);
    }

    #[test]
    fn seams_agree() {
        for &x in &[10.75f64, -10.75] {
            let a = ai_taylor(x);
            let b = if x > 0.0 {
                ai_scaled_asymptotic(x) * libm::exp(-zeta(x))
            } else {
                ai_negative_asymptotic(x)
            };
            let env = if x > 0.0 { a.abs() } else { 0.18 };
            assert!((a - b).abs() < 1e-14 * env, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(airy_ai(f64::NAN).is_err());
        assert!(airy_ai(f64::INFINITY).is_err());
        assert!(airy_ai_scaled(-1e-3).is_err());
    }
}
