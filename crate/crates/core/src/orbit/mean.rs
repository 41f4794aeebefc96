//! First-order J2 short-period mapping between mean and osculating elements.
//!
//! Only the short-period part of the Brouwer-Lyddane correction is applied;
//! the long-period `sin 2ω` / `cos 2ω` terms are left out, so the mean set is
//! the orbit-averaged one and stays regular at the critical inclination.

use std::f64::consts::PI;

use super::elements::{mean_to_true, true_to_mean, CIRCULAR_EPS, EQUATORIAL_EPS};
use super::{ElementFlavor, GravityConstants, OrbitalElements};
use crate::angles::{wrap_pi, wrap_two_pi};
use crate::error::{Error, Result};

/// Inclinations closer than this to 63.4349° or 116.5651° are rejected.
pub const CRITICAL_INCLINATION_MARGIN: f64 = 0.5 * PI / 180.0;
const MAX_ECCENTRICITY: f64 = 0.9;

fn check_domain(oe: &OrbitalElements) -> Result<()> {
    oe.validate()?;
    let crit = (1.0f64 / 5.0).sqrt().acos();
    if (oe.i - crit).abs() < CRITICAL_INCLINATION_MARGIN || (oe.i - (PI - crit)).abs() < CRITICAL_INCLINATION_MARGIN {
        return Err(Error::MeanElements(format!(
            "inclination {:.4} deg is within 0.5 deg of critical",
            oe.i.to_degrees()
        )));
    }
    if oe.e > MAX_ECCENTRICITY {
        return Err(Error::MeanElements(format!("eccentricity {} too high", oe.e)));
    }
    Ok(())
}

/// Short-period correction applied to `oe`. `gamma_sign = +1` maps mean to
/// osculating, `-1` is the first-order inverse.
fn short_period(oe: &OrbitalElements, c: &GravityConstants, gamma_sign: f64) -> OrbitalElements {
    let a = oe.a;
    let e = oe.e;
    let eta2 = 1.0 - e * e;
    let eta = eta2.sqrt();
    let g2 = gamma_sign * 0.5 * c.j2 * (c.re / a).powi(2);
    let g2p = g2 / (eta2 * eta2);
    let ci = oe.i.cos();
    let c2 = ci * ci;
    let s2 = 1.0 - c2;
    let w = oe.argp;
    let f = oe.ta;
    let m = true_to_mean(f, e);
    let (sf, cf) = f.sin_cos();
    let a_r = (1.0 + e * cf) / eta2;
    let eq_center = wrap_pi(f - m) + e * sf;

    let a_new = a + a
        * g2
        * ((3.0 * c2 - 1.0) * (a_r.powi(3) - 1.0 / eta.powi(3)) + 3.0 * s2 * a_r.powi(3) * (2.0 * w + 2.0 * f).cos());

    let eta6 = eta2.powi(3);
    let de = 0.5
        * eta2
        * (g2
            * ((3.0 * c2 - 1.0) / eta6
                * (e * eta + e / (1.0 + eta) + 3.0 * cf + 3.0 * e * cf * cf + e * e * cf.powi(3))
                + 3.0 * s2 / eta6
                    * (e + 3.0 * cf + 3.0 * e * cf * cf + e * e * cf.powi(3))
                    * (2.0 * w + 2.0 * f).cos())
            - g2p * s2 * (3.0 * (2.0 * w + f).cos() + (2.0 * w + 3.0 * f).cos()));

    let trig = 3.0 * (2.0 * w + 2.0 * f).cos() + 3.0 * e * (2.0 * w + f).cos() + e * (2.0 * w + 3.0 * f).cos();
    let di = 0.5 * g2p * ci * s2.sqrt() * trig;

    let sin_block = 3.0 * (2.0 * w + 2.0 * f).sin() + 3.0 * e * (2.0 * w + f).sin() + e * (2.0 * w + 3.0 * f).sin();
    let d_lambda = 0.25 * g2p * (-6.0 * (1.0 - 5.0 * c2) * eq_center + (3.0 - 5.0 * c2) * sin_block)
        - 0.5 * g2p * ci * (6.0 * eq_center - sin_block);

    let ar2eta2 = a_r * a_r * eta2;
    let e_dm = -0.25
        * g2p
        * eta.powi(3)
        * (2.0 * (3.0 * c2 - 1.0) * (ar2eta2 + a_r + 1.0) * sf
            + 3.0
                * s2
                * ((-ar2eta2 - a_r + 1.0) * (2.0 * w + f).sin()
                    + (ar2eta2 + a_r + 1.0 / 3.0) * (2.0 * w + 3.0 * f).sin()));

    let d_raan = -0.5 * g2p * ci * (6.0 * eq_center - sin_block);

    let lambda_new = m + w + oe.raan + d_lambda;

    let (sm, cm) = m.sin_cos();
    let d1 = (e + de) * sm + e_dm * cm;
    let d2 = (e + de) * cm - e_dm * sm;
    let m_new = d1.atan2(d2);
    let e_new = d1.hypot(d2);

    let (sh, ch) = (0.5 * oe.i).sin_cos();
    let (so, co) = oe.raan.sin_cos();
    let d3 = (sh + ch * di / 2.0) * so + sh * d_raan * co;
    let d4 = (sh + ch * di / 2.0) * co - sh * d_raan * so;
    let raan_new = d3.atan2(d4);
    let i_new = 2.0 * d3.hypot(d4).min(1.0).asin();
    let argp_new = lambda_new - m_new - raan_new;

    OrbitalElements {
        a: a_new,
        e: e_new,
        i: i_new,
        raan: wrap_two_pi(raan_new),
        argp: wrap_two_pi(argp_new),
        ta: mean_to_true(m_new, e_new),
        flavor: oe.flavor,
    }
}

/// Equinoctial set `(a, h, k, p, q, L)` with mean longitude `L`.
fn to_equinoctial(oe: &OrbitalElements) -> [f64; 6] {
    let lon_peri = oe.argp + oe.raan;
    let t = (0.5 * oe.i).tan();
    [
        oe.a,
        oe.e * lon_peri.sin(),
        oe.e * lon_peri.cos(),
        t * oe.raan.sin(),
        t * oe.raan.cos(),
        lon_peri + oe.mean_anomaly(),
    ]
}

fn from_equinoctial(q: [f64; 6], flavor: ElementFlavor) -> OrbitalElements {
    let [a, h, k, p, qq, l] = q;
    let e = h.hypot(k);
    let tan_half = p.hypot(qq);
    let i = 2.0 * tan_half.atan();
    let raan = if i < EQUATORIAL_EPS { 0.0 } else { p.atan2(qq) };
    let (e, argp, m) = if e < CIRCULAR_EPS {
        (0.0, 0.0, l - raan)
    } else {
        let lon_peri = h.atan2(k);
        (e, lon_peri - raan, l - lon_peri)
    };
    OrbitalElements {
        a,
        e,
        i,
        raan: wrap_two_pi(raan),
        argp: wrap_two_pi(argp),
        ta: mean_to_true(m, e),
        flavor,
    }
}

fn equinoctial_residual(x: &[f64; 6], y: &[f64; 6]) -> [f64; 6] {
    let mut d = [0.0; 6];
    for k in 0..6 {
        d[k] = x[k] - y[k];
    }
    d[5] = wrap_pi(d[5]);
    d
}

/// Mean (orbit-averaged) elements to osculating elements.
pub fn mean_to_osc(oe: &OrbitalElements, constants: &GravityConstants) -> Result<OrbitalElements> {
    check_domain(oe)?;
    if constants.j2 == 0.0 {
        return Ok(OrbitalElements {
            flavor: ElementFlavor::Osculating,
            ..*oe
        });
    }
    let mut out = short_period(oe, constants, 1.0);
    out.flavor = ElementFlavor::Osculating;
    out.validate()?;
    Ok(out)
}

/// Osculating elements to mean elements. Solves `mean_to_osc(m) = oe` by
/// fixed-point iteration in equinoctial variables.
pub fn osc_to_mean(oe: &OrbitalElements, constants: &GravityConstants) -> Result<OrbitalElements> {
    check_domain(oe)?;
    if constants.j2 == 0.0 {
        return Ok(OrbitalElements {
            flavor: ElementFlavor::Mean,
            ..*oe
        });
    }
    let goal = to_equinoctial(oe);
    let mut guess = short_period(oe, constants, -1.0);
    guess.flavor = ElementFlavor::Mean;
    for _ in 0..60 {
        check_domain(&guess)?;
        let osc = short_period(&guess, constants, 1.0);
        let r = equinoctial_residual(&goal, &to_equinoctial(&osc));
        let mut g = to_equinoctial(&guess);
        for k in 0..6 {
            g[k] += r[k];
        }
        guess = from_equinoctial(g, ElementFlavor::Mean);
        let size = (r[0] / oe.a)
            .abs()
            .max(r[1..].iter().fold(0.0f64, |s, x| s.max(x.abs())));
        if size < 1e-14 {
            break;
        }
    }
    check_domain(&guess)?;
    Ok(guess)
}
