//! The level function Φ(z) = ∫_{ζ₂}^z R(t)/(t²−1) dt.
//!
//! R here is the branch R_seg with its cut on the straight segment
//! [ζ₁,ζ₂] and R_seg(z)/z → 1 at infinity. The antiderivative has the
//! closed form
//!
//! F(z) = log(z−s+R) − (q₊/2) log[(q₊²+(1−s)(z−1)+q₊R)/(z−1)]
//!                   + (q₋/2) log[(q₋²−(1+s)(z+1)+q₋R)/(z+1)]
//!
//! with s the midpoint of the segment and q± = R_seg(±1), both real.
//! Re Φ only needs ln|·| and is path independent; Im Φ is continued along
//! a fixed route from ζ₂ inside ℂ∖([ζ₁,ζ₂]∪(−∞,1]).

use num_complex::Complex64;

use super::{BranchPoints, Side};
use crate::error::{Error, Result};
use crate::params::{CaseTag, ParamPair};
use crate::quad;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct LevelFunction {
    pub params: ParamPair,
    pub case: CaseTag,
    pub bp: BranchPoints,
    /// Midpoint and half-difference of the branch points.
    pub s: C,
    pub h: C,
    pub q_plus: f64,
    pub q_minus: f64,
    /// Clearance used when routing around ζ₂.
    pub delta: f64,
    /// Abscissa where routes cross the real axis (> 1).
    pub x_route: f64,
    start_logs: [C; 3],
}

/// Log arguments with unwrapped phases, carried along a path.
#[derive(Clone, Copy, Debug)]
pub struct PhiState {
    pub z: C,
    pub r: C,
    args: [f64; 3],
}

impl LevelFunction {
    pub fn new(params: ParamPair, case: CaseTag, bp: BranchPoints) -> Self {
        let s = (bp.zeta1 + bp.zeta2) / 2.0;
        let h = (bp.zeta2 - bp.zeta1) / 2.0;
        let mut lf = LevelFunction {
            params,
            case,
            bp,
            s,
            h,
            q_plus: 0.0,
            q_minus: 0.0,
            delta: 0.1 * (bp.zeta2 - bp.zeta1).norm(),
            x_route: 2.5f64.max(2.0 * bp.zeta2.re.abs() + 1.5),
            start_logs: [C::new(1.0, 0.0); 3],
        };
        lf.q_plus = lf.r_seg(C::new(1.0, 0.0)).re;
        lf.q_minus = lf.r_seg(C::new(-1.0, 0.0)).re;
        lf.start_logs = lf.logs(bp.zeta2, C::new(0.0, 0.0));
        lf
    }

    /// (A+B+2)/2.
    pub fn k(&self) -> f64 {
        self.params.half_total()
    }

    /// Principal R_seg(z) = h·√(u−1)·√(u+1), u = (z−s)/h.
    pub fn r_seg(&self, z: C) -> C {
        let u = (z - self.s) / self.h;
        self.h * (u - 1.0).sqrt() * (u + 1.0).sqrt()
    }

    /// True when z lies on the straight segment [ζ₁,ζ₂].
    pub fn on_segment(&self, z: C) -> bool {
        let u = (z - self.s) / self.h;
        u.im.abs() <= 1e-14 * (1.0 + u.re.abs()) && u.re.abs() <= 1.0
    }

    /// Unit normal pointing to the + side (left of the direction ζ₁→ζ₂).
    pub fn segment_plus_normal(&self) -> C {
        I * self.h / self.h.norm()
    }

    /// Boundary value of R_seg on the segment; the + side is left of ζ₁→ζ₂.
    pub fn r_seg_side(&self, z: C, side: Side) -> C {
        if side == Side::None || !self.on_segment(z) {
            return self.r_seg(z);
        }
        let u = ((z - self.s) / self.h).re;
        let v = self.h * I * (1.0 - u * u).max(0.0).sqrt();
        if side == Side::Plus {
            v
        } else {
            -v
        }
    }

    /// Φ'(z) = R_seg(z)/(z²−1).
    pub fn dphi(&self, z: C) -> C {
        self.r_seg(z) / (z * z - 1.0)
    }

    fn logs(&self, z: C, r: C) -> [C; 3] {
        let (qp, qm, s) = (self.q_plus, self.q_minus, self.s);
        [
            z - s + r,
            (qp * qp + (1.0 - s) * (z - 1.0) + qp * r) / (z - 1.0),
            (qm * qm + (-1.0 - s) * (z + 1.0) + qm * r) / (z + 1.0),
        ]
    }

    fn coeffs(&self) -> [f64; 3] {
        [1.0, -self.q_plus / 2.0, self.q_minus / 2.0]
    }

    /// Re Φ(z), independent of any path. On the segment pass a side.
    pub fn re_phi_side(&self, z: C, side: Side) -> f64 {
        let r = self.r_seg_side(z, side);
        let l = self.logs(z, r);
        let c = self.coeffs();
        (0..3).map(|j| c[j] * (l[j].norm().ln() - self.start_logs[j].norm().ln())).sum()
    }

    pub fn re_phi(&self, z: C) -> f64 {
        self.re_phi_side(z, Side::None)
    }

    pub fn start_state(&self) -> PhiState {
        PhiState { z: self.bp.zeta2, r: C::new(0.0, 0.0), args: self.start_logs.map(|l| l.arg()) }
    }

    /// Φ at a carried state.
    pub fn value(&self, st: &PhiState) -> C {
        let l = self.logs(st.z, st.r);
        let c = self.coeffs();
        (0..3)
            .map(|j| c[j] * C::new(l[j].norm().ln() - self.start_logs[j].norm().ln(), st.args[j] - self.start_logs[j].arg()))
            .sum()
    }

    fn state_at(&self, prev: &PhiState, z: C, r: C) -> Option<PhiState> {
        let lp = self.logs(prev.z, prev.r);
        let ln = self.logs(z, r);
        let mut args = prev.args;
        for j in 0..3 {
            let d = (ln[j] / lp[j]).arg();
            if d.abs() > 0.5 || !d.is_finite() {
                return None;
            }
            args[j] += d;
        }
        Some(PhiState { z, r, args })
    }

    /// Continues the state along the chord to `to`. `r_end` overrides the
    /// value of R at the end point (for boundary values on the segment).
    pub fn advance(&self, st: &PhiState, to: C, r_end: Option<C>) -> Result<PhiState> {
        // Steps scale with the distance to the nearest singular point, so
        // long excursions towards infinity stay cheap.
        let len = (to - st.z).norm();
        let min_step = 0.05 * self.delta.max(1e-3);
        let singular = [C::new(1.0, 0.0), C::new(-1.0, 0.0), self.bp.zeta1, self.bp.zeta2];
        let mut cur = *st;
        let mut t = 0.0;
        while t < 1.0 {
            let here = st.z + (to - st.z) * t;
            let d = singular.iter().map(|p| (here - p).norm()).fold(f64::INFINITY, f64::min);
            let step = (0.25 * d).max(min_step) / len.max(f64::MIN_POSITIVE);
            t = if t + step >= 1.0 { 1.0 } else { t + step };
            let z = if t == 1.0 { to } else { st.z + (to - st.z) * t };
            let r = if t == 1.0 { r_end.unwrap_or_else(|| self.r_seg(z)) } else { self.r_seg(z) };
            cur = self.advance_fine(&cur, z, r, 0)?;
        }
        Ok(cur)
    }

    fn advance_fine(&self, st: &PhiState, z: C, r: C, depth: u32) -> Result<PhiState> {
        if let Some(next) = self.state_at(st, z, r) {
            return Ok(next);
        }
        if depth > 40 {
            return Err(Error::Numerical(format!("phase continuation stalled near {z}")));
        }
        let m = (st.z + z) / 2.0;
        let mid = self.advance_fine(st, m, self.r_seg(m), depth + 1)?;
        self.advance_fine(&mid, z, r, depth + 1)
    }

    /// Route from ζ₂ to z avoiding [ζ₁,ζ₂]∪(−∞,1]. For z on the real
    /// axis left of 1 the side picks the approach (+ is from above).
    pub fn route(&self, z: C, side: Side) -> Result<Vec<C>> {
        let z2 = self.bp.zeta2;
        let d = self.delta;
        let x = self.x_route;
        let on_real_cut = z.im == 0.0 && z.re <= 1.0;
        if on_real_cut && side == Side::None && !self.on_segment(z) {
            return Err(Error::Domain(format!("{z} lies on the cut (-inf,1]; pass a side")));
        }
        let upper = if z.im != 0.0 { z.im > 0.0 } else if z.re > 1.0 { true } else { side == Side::Plus };
        match self.case {
            CaseTag::C3 => {
                let a = z2 + I * d;
                if upper {
                    Ok(vec![z2, a, z])
                } else {
                    Ok(vec![z2, a, C::new(x, d), C::new(x, -d), z])
                }
            }
            _ => {
                // ζ₂ in the lower half-plane; the segment is vertical.
                let hh = self.bp.zeta1.im + d;
                let a = z2 - I * d;
                let upper = if z.re > 1.0 && z.im == 0.0 { false } else { upper };
                if !upper {
                    Ok(vec![z2, a, z])
                } else {
                    Ok(vec![z2, a, C::new(x, -hh), C::new(x, hh), C::new(self.s.re, hh), z])
                }
            }
        }
    }

    /// Φ(z) continued along [`route`](Self::route). Points on the
    /// segment are evaluated as boundary values from the given side.
    pub fn phi(&self, z: C, side: Side) -> Result<C> {
        if (z - self.bp.zeta2).norm() == 0.0 {
            return Ok(C::new(0.0, 0.0));
        }
        if self.on_segment(z) {
            if side == Side::None {
                return Err(Error::Domain(format!("{z} lies on [zeta1,zeta2]; pass a side")));
            }
            let sign = if side == Side::Plus { 1.0 } else { -1.0 };
            let eta = 1e-9 * self.h.norm();
            let zz = z + self.segment_plus_normal() * (sign * eta);
            let side2 = if zz.im == 0.0 { side } else { Side::None };
            let v = self.phi(zz, side2)?;
            return Ok(v - self.dphi(zz) * (zz - z));
        }
        let path = self.route(z, side)?;
        let mut st = self.start_state();
        for p in &path[1..] {
            st = self.advance(&st, *p, None)?;
        }
        Ok(self.value(&st))
    }

    /// Quadrature of R_seg/(t²−1) along the same route, used as an oracle.
    pub fn phi_quad(&self, z: C, side: Side, tol: f64) -> Result<C> {
        let path = self.route(z, side)?;
        let f = |t: C| self.dphi(t);
        let mut acc = quad::chord_sqrt_start(f, path[0], path[1], tol)?;
        acc += quad::adaptive_path(f, &path[1..], tol)?;
        Ok(acc)
    }

    /// Φ(∞)-type constant: lim [Φ(z) − log z] along the positive real axis,
    /// continued along the upper route (C.3) or the lower route (C.2).
    pub fn phi_infinity(&self) -> Result<C> {
        // F(z) − log(2z) → −(q₊/2)log(1−s+q₊) + (q₋/2)log(−1−s+q₋)
        let far = C::new(1e6, 0.0);
        let path = self.route(far, Side::None)?;
        let mut st = self.start_state();
        for p in &path[1..] {
            st = self.advance(&st, *p, None)?;
        }
        // Continue the phases of the limiting expressions from z = far.
        let lim = [2.0 * far, 1.0 - self.s + self.q_plus, -1.0 - self.s + self.q_minus];
        let l = self.logs(far, st.r);
        let c = self.coeffs();
        let mut out = C::new(0.0, 0.0);
        for j in 0..3 {
            let arg = st.args[j] + (lim[j] / l[j]).arg();
            out += c[j] * C::new(lim[j].norm().ln() - self.start_logs[j].norm().ln(), arg - self.start_logs[j].arg());
        }
        Ok(out - far.ln())
    }
}
