//! Error function and complementary error function.
//!
//! Rational approximations from FreeBSD `s_erf.c`:
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//!
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```
//!
//! The interval split is
//!
//! * `|x| < 0.84375`: `erf(x) = x + x R(x^2)`
//! * `0.84375 <= |x| < 1.25`: expansion around `x = 1`
//! * `1.25 <= |x| < 28`: `erfc(x) = exp(-x^2 - 0.5625 + R(1/x^2)/S(1/x^2)) / x`
//!
//! and `erfc(-x) = 2 - erfc(x)` for negative arguments.

// Coefficients are kept digit-for-digit as published.
#![allow(clippy::excessive_precision)]

const ERX: f64 = 8.45062911510467529297e-01;

// erf on [0, 0.84375]
const EFX: f64 = 1.28379167095512586316e-01;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

// erf on [0.84375, 1.25]
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

// erfc on [1.25, 1/0.35]
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

// erfc on [1/0.35, 28]
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

// 2^-28
const SMALL: f64 = 3.725290298461914e-9;

#[inline]
fn small_ratio(z: f64) -> f64 {
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

#[inline]
fn near_one(s: f64) -> f64 {
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// `erfc(x)` for `1.25 <= x < 28`.
#[inline]
fn tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2
                        + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // Split x into a 20-bit head so that exp(-x^2) keeps full precision.
    let head = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-head * head - 0.5625).exp() * ((head - x) * (head + x) + r / q).exp() / x
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < SMALL {
            ax + EFX * ax
        } else {
            ax + ax * small_ratio(ax * ax)
        }
    } else if ax < 1.25 {
        ERX + near_one(ax - 1.0)
    } else if ax < 6.0 {
        1.0 - tail(ax)
    } else {
        1.0
    };
    value.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        let y = small_ratio(ax * ax);
        let erf_abs = if ax < 0.25 {
            ax + ax * y
        } else {
            // 1 - erfc evaluated as 0.5 + ((ax - 0.5) + ax y) to avoid cancellation.
            0.5 + (ax * y + (ax - 0.5))
        };
        return if negative {
            1.0 + erf_abs
        } else {
            1.0 - erf_abs
        };
    }
    if ax < 1.25 {
        let p = near_one(ax - 1.0);
        return if negative {
            1.0 + ERX + p
        } else {
            1.0 - ERX - p
        };
    }
    if ax < 28.0 {
        if negative && ax > 6.0 {
            return 2.0;
        }
        let t = tail(ax);
        return if negative { 2.0 - t } else { t };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}

/// Cumulative distribution of a normal variable with mean `mean` and
/// variance 1/2 (one homodyne shot-noise unit).
pub fn shot_noise_cdf(v: f64, mean: f64) -> f64 {
    0.5 * erfc(mean - v)
}

/// Probability that a variance-1/2 normal variable centred at `mean`
/// falls in `[lo, hi)`. Either bound may be infinite.
pub fn shot_noise_interval(lo: f64, hi: f64, mean: f64) -> f64 {
    // Use whichever tail keeps the subtraction small.
    if lo - mean >= 0.0 {
        0.5 * (erfc(lo - mean) - erfc(hi - mean))
    } else if hi - mean <= 0.0 {
        0.5 * (erfc(mean - hi) - erfc(mean - lo))
    } else {
        1.0 - 0.5 * erfc(mean - lo) - 0.5 * erfc(hi - mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn special_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert_eq!(erfc(f64::INFINITY), 0.0);
        assert_eq!(erfc(f64::NEG_INFINITY), 2.0);
        assert!(erfc(f64::NAN).is_nan());
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(-0.0).to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table values.
        assert_relative_eq!(erfc(0.5), 0.479_500_122_186_953_5, max_relative = 1e-15);
        assert_relative_eq!(erfc(1.0), 0.157_299_207_050_285_13, max_relative = 1e-15);
        assert_relative_eq!(erfc(2.0), 0.004_677_734_981_047_266, max_relative = 1e-14);
        assert_relative_eq!(erfc(-2.0), 1.995_322_265_018_952_7, max_relative = 1e-15);
        assert_relative_eq!(erf(1.0), 0.842_700_792_949_714_9, max_relative = 1e-15);
    }

    #[test]
    fn reflection_identity() {
        for i in -600..=600 {
            let x = i as f64 * 0.01;
            assert!((erfc(x) + erfc(-x) - 2.0).abs() < 4e-16, "x = {x}");
        }
    }

    #[test]
    fn interval_probabilities() {
        assert_relative_eq!(
            shot_noise_interval(f64::NEG_INFINITY, f64::INFINITY, 3.0),
            1.0
        );
        assert_relative_eq!(shot_noise_interval(0.0, f64::INFINITY, 0.0), 0.5);
        let p = shot_noise_interval(-1.0, 2.0, 0.5);
        let q = shot_noise_cdf(2.0, 0.5) - shot_noise_cdf(-1.0, 0.5);
        assert_relative_eq!(p, q, max_relative = 1e-14);
    }
}
