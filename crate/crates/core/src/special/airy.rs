//! Airy function of the first kind and its derivative on `|x| <= 20`.
//!
//! Maclaurin series on `[-2, 2]`, Poincaré asymptotics for `|x| >= 8`, and
//! high-order Taylor stepping of `y'' = x y` in between (leftward from `8`
//! on the positive side, leftward from `-2` on the negative side; both
//! directions are stable for `Ai`).

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const AI0: f64 = 0.355_028_053_887_817_239_260;
pub const AIP0: f64 = -0.258_819_403_792_806_798_405;

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    let (mut tf, mut tg) = (1.0, x);
    let (mut pf, mut pg) = (x * x / 2.0, 1.0);
    fp += pf;
    for k in 1..60 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += tf;
        g += tg;
        if k >= 2 {
            pf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp += pf;
        }
        pg *= x3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        gp += pg;
        if tf.abs() + tg.abs() + pf.abs() + pg.abs() < 1e-18 {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// u_k and v_k coefficients of the Airy asymptotic expansions.
fn uv_coefficients(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sum `sum_k sign_k c_k zeta^-k` stopping at the smallest term.
fn asym_sum(coef: &[f64], zeta: f64, stride: usize, offset: usize) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in (offset..coef.len()).step_by(stride).enumerate() {
        let term = coef[k] / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        sum += if j % 2 == 0 { term } else { -term };
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn asym_pos(x: f64) -> (f64, f64) {
    let (u, v) = uv_coefficients(40);
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    let su = asym_sum(&u, zeta, 1, 0);
    let sv = asym_sum(&v, zeta, 1, 0);
    (pre * su / x.powf(0.25), -pre * x.powf(0.25) * sv)
}

fn asym_neg(x: f64) -> (f64, f64) {
    let t = -x;
    let (u, v) = uv_coefficients(40);
    let zeta = 2.0 / 3.0 * t.powf(1.5);
    let phase = zeta - PI / 4.0;
    let (s, c) = phase.sin_cos();
    let ue = asym_sum(&u, zeta, 2, 0);
    let uo = asym_sum(&u, zeta, 2, 1);
    let ve = asym_sum(&v, zeta, 2, 0);
    let vo = asym_sum(&v, zeta, 2, 1);
    let ai = (c * ue + s * uo) / (PI.sqrt() * t.powf(0.25));
    let aip = t.powf(0.25) / PI.sqrt() * (s * ve - c * vo);
    (ai, aip)
}

fn taylor_step(x0: f64, y: f64, dy: f64, h: f64) -> (f64, f64) {
    // scaled coefficients d_k = c_k h^k of the local series around x0
    let mut d = vec![y, dy * h];
    let (mut sy, mut sdy) = (d[0] + d[1], d[1]);
    let (h2, h3) = (h * h, h * h * h);
    for k in 0..80usize {
        let prev = if k >= 1 { d[k - 1] } else { 0.0 };
        let next = (x0 * h2 * d[k] + h3 * prev) / (((k + 1) * (k + 2)) as f64);
        d.push(next);
        sy += next;
        sdy += (k + 2) as f64 * next;
        if k > 4 && next.abs() + d[k + 1].abs() < 1e-19 * (sy.abs() + sdy.abs()) {
            break;
        }
    }
    (sy, sdy / h)
}

fn integrate(mut x: f64, mut y: f64, mut dy: f64, target: f64) -> (f64, f64) {
    while (target - x).abs() > 0.0 {
        let hmax = 0.5 / (1.0 + x.abs().sqrt());
        let h = (target - x).clamp(-hmax, hmax);
        let (ny, ndy) = taylor_step(x, y, dy, h);
        y = ny;
        dy = ndy;
        x = if (target - x - h).abs() < 1e-15 { target } else { x + h };
    }
    (y, dy)
}

/// `(Ai(x), Ai'(x))` for `|x| <= 20`.
pub fn airy_pair(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || x.abs() > 20.0 {
        return Err(Error::Domain(format!("Airy argument {x} outside [-20, 20]")));
    }
    Ok(if x >= 8.0 {
        asym_pos(x)
    } else if x > 2.0 {
        let (y, dy) = asym_pos(8.0);
        integrate(8.0, y, dy, x)
    } else if x >= -2.0 {
        maclaurin(x)
    } else if x >= -8.0 {
        let (y, dy) = maclaurin(-2.0);
        integrate(-2.0, y, dy, x)
    } else {
        asym_neg(x)
    })
}

pub fn airy_ai(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.0)
}

pub fn airy_ai_dx(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.1)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Least negative zero of `Ai`, `r0 = -2.338107...`.
pub fn airy_ai_first_zero() -> f64 {
    bisect(|x| airy_ai(x).unwrap(), -2.6, -2.0)
}

/// Least negative zero of `Ai'`, `r* = -1.018792...`.
pub fn airy_ai_dx_first_zero() -> f64 {
    bisect(|x| airy_ai_dx(x).unwrap(), -1.5, -0.5)
}
