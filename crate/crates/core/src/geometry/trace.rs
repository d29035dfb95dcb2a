//! Predictor–corrector tracing of level lines Re Φ = c and of the
//! orthogonal lines Im Φ = c.

use num_complex::Complex64;

use super::level::LevelFunction;
use crate::error::{Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);
const MAX_STEPS: usize = 100_000;
const MAX_TURN: f64 = 15.0 * std::f64::consts::PI / 180.0;

pub(crate) enum Stop {
    /// End at the first of these points that the curve reaches.
    AtPoints(Vec<C>),
    /// End where the curve meets the real axis again.
    RealAxis,
}

/// Residual floor: Re Φ cannot be resolved below |Φ'| times the spacing
/// of f64 values around z (this dominates on small Γ_r around 1).
fn level_tol(lf: &LevelFunction, z: C, c: f64, rel: f64) -> f64 {
    (rel * (1.0 + c.abs())).max(4.0 * f64::EPSILON * z.norm() * lf.dphi(z).norm())
}

/// Newton projection onto Re Φ = c along the gradient conj(Φ').
fn project_level(lf: &LevelFunction, mut z: C, c: f64) -> Option<(C, usize)> {
    for it in 0..6 {
        let g = lf.dphi(z);
        let res = lf.re_phi(z) - c;
        if res.abs() <= level_tol(lf, z, c, 1e-13) {
            return Some((z, it));
        }
        let n2 = g.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return None;
        }
        z -= g.conj() * (res / n2);
    }
    let res = lf.re_phi(z) - c;
    (res.abs() <= level_tol(lf, z, c, 1e-12)).then_some((z, 6))
}

fn level_tangent(lf: &LevelFunction, z: C) -> C {
    let d = I / lf.dphi(z);
    d / d.norm()
}

fn turn(a: C, b: C) -> f64 {
    (b / a).arg().abs()
}

/// Root of Re Φ(x) = c on the real axis near `guess`, bracketed by [lo, hi].
fn real_root(lf: &LevelFunction, c: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f = |x: f64| lf.re_phi(C::new(x, 0.0)) - c;
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo * fhi > 0.0 {
        return Err(Error::Topology(format!("no sign change of the level function on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        if fm == 0.0 || (hi - lo) < 1e-15 * (1.0 + m.abs()) {
            return Ok(m);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Crossing of Re Φ = c with (1, ∞). Re Φ → −∞ at 1⁺ and → +∞ at ∞.
pub(crate) fn crossing_right_of_one(lf: &LevelFunction, c: f64) -> Result<f64> {
    let mut lo = 1.0 + 1e-12;
    let mut hi = 2.0;
    while lf.re_phi(C::new(hi, 0.0)) < c {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Topology("level curve does not cross (1, inf)".into()));
        }
    }
    real_root(lf, c, lo, hi)
}

/// Traces Re Φ = c from the real point `x0` into the upper half-plane.
pub(crate) fn trace_upper(lf: &LevelFunction, c: f64, x0: f64, stop: &Stop, h_max: f64) -> Result<Vec<C>> {
    let mut pts = vec![C::new(x0, 0.0)];
    let mut z = pts[0];
    let mut dir = level_tangent(lf, z);
    if dir.im < 0.0 {
        dir = -dir;
    }
    let mut h = h_max;
    for _ in 0..MAX_STEPS {
        if let Stop::AtPoints(ends) = stop {
            if let Some(t) = ends.iter().find(|t| (z - **t).norm() <= h_max) {
                if (z - *t).norm() > 0.0 {
                    pts.push(*t);
                }
                return Ok(pts);
            }
        }
        let mut accepted = None;
        while h >= 1e-10 * h_max {
            let zp = z + dir * h;
            if let Some((zn, its)) = project_level(lf, zp, c) {
                let chord = zn - z;
                let mut nd = level_tangent(lf, zn);
                if (nd / dir).re < 0.0 {
                    nd = -nd;
                }
                if its <= 3
                    && chord.norm() <= 1.05 * h_max
                    && chord.norm() > 0.0
                    && turn(dir, nd) <= MAX_TURN
                    && turn(dir, chord) <= MAX_TURN
                {
                    accepted = Some((zn, nd));
                    break;
                }
            }
            h *= 0.5;
        }
        let (zn, nd) = accepted
            .ok_or_else(|| Error::Topology(format!("level tracing stalled at {z} (level {c})")))?;
        if zn.norm() > 1e3 {
            return Err(Error::Topology(format!("level curve {c} escapes to infinity")));
        }
        if matches!(stop, Stop::RealAxis) && zn.im <= 0.0 && pts.len() > 1 {
            let (a, b) = (z.re.min(zn.re) - 2.0 * h_max, z.re.max(zn.re) + 2.0 * h_max);
            let x = real_root(lf, c, a, b).or_else(|_| {
                let guess = z.re + (zn.re - z.re) * z.im / (z.im - zn.im);
                Ok::<f64, Error>(guess)
            })?;
            pts.push(C::new(x, 0.0));
            return Ok(pts);
        }
        pts.push(zn);
        z = zn;
        dir = nd;
        h = (h * 1.5).min(h_max);
    }
    Err(Error::Topology(format!("level curve {c} not closed within {MAX_STEPS} steps")))
}

/// Traces Im Φ = c downhill in Re Φ from `start` until it comes within
/// `h_max` of `target`.
pub(crate) fn trace_orthogonal(
    lf: &LevelFunction,
    start: C,
    im_level: f64,
    target: C,
    h_max: f64,
) -> Result<Vec<C>> {
    let mut st = lf.start_state();
    st = lf.advance(&st, start, None)?;
    let mut pts = vec![lf.bp.zeta2, start];
    let mut z = start;
    let mut h = h_max;
    let descent = |z: C| {
        let g = lf.dphi(z).conj();
        -g / g.norm()
    };
    let mut dir = descent(z);
    for _ in 0..MAX_STEPS {
        if (z - target).norm() <= h_max {
            pts.push(target);
            return Ok(pts);
        }
        let mut accepted = None;
        while h >= 1e-10 * h_max {
            let mut zn = z + dir * h;
            let mut s2 = lf.advance(&st, zn, None)?;
            let mut ok = false;
            for _ in 0..6 {
                let v = lf.value(&s2).im - im_level;
                if v.abs() <= 1e-12 {
                    ok = true;
                    break;
                }
                // grad Im Φ = i·conj(Φ')
                let g = I * lf.dphi(zn).conj();
                zn -= g * (v / g.norm_sqr());
                s2 = lf.advance(&s2, zn, None)?;
            }
            let nd = descent(zn);
            let chord = zn - z;
            if ok && chord.norm() <= 1.05 * h_max && turn(dir, nd) <= MAX_TURN && turn(dir, chord) <= MAX_TURN {
                accepted = Some((zn, nd, s2));
                break;
            }
            h *= 0.5;
        }
        let (zn, nd, s2) =
            accepted.ok_or_else(|| Error::Topology(format!("orthogonal trajectory stalled at {z}")))?;
        if zn.norm() > 1e3 {
            return Err(Error::Topology("orthogonal trajectory escapes to infinity".into()));
        }
        pts.push(zn);
        z = zn;
        st = s2;
        dir = nd;
        h = (h * 1.5).min(h_max);
    }
    Err(Error::Topology(format!("orthogonal trajectory did not reach {target}")))
}
