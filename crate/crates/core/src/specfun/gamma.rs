use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn lanczos_sum(x: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x - 1.0 + k as f64);
    }
    acc
}

/// Γ(x) for x in [1, 2] by the Lanczos approximation.
fn gamma_core(x: f64) -> f64 {
    let t = x + LANCZOS_G - 0.5;
    let half = t.powf(0.5 * (x - 0.5));
    (2.0 * PI).sqrt() * half * ((-t).exp() * half) * lanczos_sum(x)
}

fn gamma_positive(x: f64) -> f64 {
    if x == x.floor() && x <= 171.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    if x < 1.0 {
        return gamma_positive(x + 1.0) / x;
    }
    if x <= 60.0 {
        let mut y = x;
        let mut p = 1.0;
        while y > 2.0 {
            y -= 1.0;
            p *= y;
        }
        return p * gamma_core(y);
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    gamma_core(x)
}

/// Gamma function on the real line.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        Ok(gamma_positive(x))
    } else {
        Ok(PI / (sin_pi(x) * gamma_positive(1.0 - x)))
    }
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        1.0 / gamma_positive(x)
    } else {
        sin_pi(x) * gamma_positive(1.0 - x) / PI
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x <= 60.0 {
        return Ok(gamma_positive(x).ln());
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0)))));
    Ok((x - 0.5) * x.ln() - x + LN_SQRT_2PI + series)
}

/// Γ(x), or ln Γ(x) when `log_scale` is set (which requires x > 0).
pub fn gamma_fn(x: f64, log_scale: bool) -> Result<f64> {
    if log_scale {
        if is_nonpositive_integer(x) {
            return Err(Error::Pole(x));
        }
        ln_gamma(x)
    } else {
        gamma(x)
    }
}

/// Logarithmic derivative ψ = Γ'/Γ.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("digamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x < 0.5 {
        let cot = (PI * x).cos() / sin_pi(x);
        return Ok(digamma(1.0 - x)? - PI * cot);
    }
    let mut y = x;
    let mut acc = 0.0;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    Ok(acc + y.ln() - 0.5 / y - tail)
}

/// Rising factorial (a)_k = a(a+1)…(a+k−1), with (a)_0 = 1.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    let mut p = 1.0;
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}
