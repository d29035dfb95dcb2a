//! Scalar functions of the asymptotic analysis: R, μ, μ̂, G, κ, w, H, φ,
//! f, a, N₁₁, N₁₂ and d_n, with their branch conventions.
//!
//! Everything is expressed through the level function Φ of
//! [`geometry::LevelFunction`] (cut on the straight segment):
//!
//! * H = exp(σ·k·Φ) with k = (A+B+2)/2 and σ = −1 inside Γ (C.3) or inside
//!   the region between [ζ₁,ζ₂] and Γ (C.2), σ = +1 elsewhere;
//! * w = c(z−1)^{A/2}(z+1)^{B/2} on ℂ∖(−∞,1], normalized at ζ₂;
//! * G = H/w.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::airy;
use crate::error::{Error, Result};
use crate::geometry::{self, build_geometry, GeometryBundle, Side};
use crate::params::{CaseTag, ParamPair};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFn {
    R,
    MuDensity,
    MuHat,
    G,
    W,
    H,
    Phi,
    F,
    A,
    N11,
    N12,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldValue {
    pub value: C,
    pub side: Side,
    pub function: FieldFn,
}

impl FieldValue {
    fn new(function: FieldFn, value: C, side: Side) -> Self {
        FieldValue { value, side, function }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    /// lim G(z)/z. Complex: its phase follows from G(ζ₂) = 1.
    pub value: C,
    /// Distance to an independent estimate by extrapolating G(z)/z.
    pub est_error: f64,
}

/// Immutable evaluation context for one (A,B).
#[derive(Clone, Debug)]
pub struct FieldContext {
    pub geometry: GeometryBundle,
    /// Normalizing constant of w.
    pub c_w: C,
    pub kappa: Kappa,
    /// f'(ζ₂) and (f(z)(z−ζ₁)/(z−ζ₂))^{1/4} at ζ₂.
    f1: C,
    g0: C,
}

/// Moves a point on the real axis to the requested side so that principal
/// branches pick the right boundary value. Off the axis z is returned as is.
fn on_side(z: C, side: Side) -> C {
    if z.im != 0.0 {
        return z;
    }
    match side {
        Side::Plus => C::new(z.re, 1e-300),
        Side::Minus => C::new(z.re, -1e-300),
        Side::None => z,
    }
}

fn is_real_cut(z: C) -> bool {
    z.im == 0.0 && z.re <= 1.0
}

/// Cube root of `v` closest to `near`.
fn nearest_root(v: C, near: C, k: u32) -> C {
    let base = v.powf(1.0 / f64::from(k));
    (0..k)
        .map(|j| base * C::from_polar(1.0, 2.0 * PI * f64::from(j) / f64::from(k)))
        .min_by(|a, b| (a - near).norm().partial_cmp(&(b - near).norm()).unwrap())
        .unwrap()
}

impl FieldContext {
    pub fn new(p: ParamPair) -> Result<Self> {
        Self::from_geometry(build_geometry(p)?)
    }

    pub fn from_geometry(geometry: GeometryBundle) -> Result<Self> {
        let p = geometry.params;
        let z2 = geometry.bp.zeta2;
        // w → 1 at ζ₂ from ℂ⁺ (C.3) or from anywhere (C.2, ζ₂ ∉ ℝ).
        let zz = on_side(z2, Side::Plus);
        let c_w = 1.0 / ((zz - 1.0).powf(p.a / 2.0) * (zz + 1.0).powf(p.b / 2.0));
        let k = p.half_total();
        let phi_inf = geometry.level.phi_infinity()?;
        let kappa_c = (phi_inf * k).exp() / c_w;
        let zeta1 = geometry.bp.zeta1;
        // f'(ζ₂)³ up to the choice of cube root, fixed below.
        let f1 = (k * (z2 - zeta1).sqrt() / (1.0 - z2 * z2)).powi(2);
        let mut ctx = FieldContext {
            geometry,
            c_w,
            kappa: Kappa { value: kappa_c, est_error: 0.0 },
            f1,
            g0: C::new(1.0, 0.0),
        };
        ctx.kappa.est_error = (ctx.kappa_extrapolated()? - kappa_c).norm();
        ctx.pin_edge_branches()?;
        Ok(ctx)
    }

    pub fn params(&self) -> ParamPair {
        self.geometry.params
    }

    pub fn tag(&self) -> CaseTag {
        self.geometry.tag()
    }

    pub fn k(&self) -> f64 {
        self.params().half_total()
    }

    pub fn kappa_complex(&self) -> C {
        self.kappa.value
    }

    /// κ from G(z)/z at z = 10², 10³, 10⁴ with two Richardson steps.
    pub fn kappa_extrapolated(&self) -> Result<C> {
        let g = |x: f64| -> Result<C> { Ok(self.g_value(C::new(x, 0.0), Side::None)? / x) };
        let (a, b, c) = (g(1e2)?, g(1e3)?, g(1e4)?);
        let ab = (b * 10.0 - a) / 9.0;
        let bc = (c * 10.0 - b) / 9.0;
        Ok((bc * 100.0 - ab) / 99.0)
    }

    /// σ = −1 inside Γ (C.3) or inside the region cut off by Γ (C.2).
    /// On Γ the side decides: + is outside.
    pub fn sigma(&self, z: C, side: Side) -> f64 {
        if self.on_inner_segment(z) {
            return if side == Side::Minus { 1.0 } else { -1.0 };
        }
        let on_gamma = side != Side::None && self.geometry.gamma().distance(z) < 1e-9;
        if on_gamma {
            return if side == Side::Plus { 1.0 } else { -1.0 };
        }
        if self.geometry.inside(z) {
            -1.0
        } else {
            1.0
        }
    }

    /// R with the cut on Σ's branch cut.
    pub fn r(&self, z: C, side: Side) -> Result<FieldValue> {
        Ok(FieldValue::new(FieldFn::R, self.geometry.sqrt_r(on_side(z, side), side)?, side))
    }

    /// dμ/|dz| at a point of Σ with unit tangent `tangent` along the
    /// orientation of Σ. Uses R₊ (R_seg on Γ, R_seg(x+i0) on the segment).
    pub fn mu_density(&self, z: C, tangent: C) -> Result<FieldValue> {
        if (z - 1.0).norm() < 1e-14 || (z + 1.0).norm() < 1e-14 {
            return Err(Error::Domain("the density has poles at z = +-1".into()));
        }
        let rp = self.geometry.level.r_seg_side(on_side(z, Side::Plus), Side::Plus);
        let v = rp / (1.0 - z * z) * (self.k() / (PI * I)) * (tangent / tangent.norm());
        Ok(FieldValue::new(FieldFn::MuDensity, v, Side::Plus))
    }

    /// Closed-form Cauchy transform σkR_seg/(z²−1) − (A/2)/(z−1) − (B/2)/(z+1).
    pub fn mu_hat(&self, z: C) -> Result<FieldValue> {
        if (z - 1.0).norm() == 0.0 || (z + 1.0).norm() == 0.0 {
            return Err(Error::Domain("mu_hat has poles at z = +-1".into()));
        }
        let p = self.params();
        let s = self.sigma(z, Side::None);
        let v = self.geometry.level.r_seg(z) / (z * z - 1.0) * (s * self.k()) - (p.a / 2.0) / (z - 1.0) - (p.b / 2.0) / (z + 1.0);
        Ok(FieldValue::new(FieldFn::MuHat, v, Side::None))
    }

    /// C.2 only: [ζ₁,ζ₂] is not part of Σ but is the cut of Φ. Its + side
    /// (towards Γ) lies inside, so points on it default to that side.
    fn on_inner_segment(&self, z: C) -> bool {
        self.tag() == CaseTag::C2 && self.geometry.level.on_segment(z)
    }

    fn phi_seg(&self, z: C, side: Side) -> Result<C> {
        let lf = &self.geometry.level;
        let side = if is_real_cut(z) && side == Side::None && !lf.on_segment(z) { Side::Plus } else { side };
        let side = if side == Side::None && self.on_inner_segment(z) { Side::Plus } else { side };
        lf.phi(z, side)
    }

    fn h_value(&self, z: C, side: Side) -> Result<C> {
        let s = self.sigma(z, side);
        Ok((self.phi_seg(z, side)? * (s * self.k())).exp())
    }

    /// H = G·w.
    pub fn h(&self, z: C, side: Side) -> Result<FieldValue> {
        if is_real_cut(z) && side == Side::None {
            return Err(Error::Domain(format!("{z} is on (-inf,1]; pass a side")));
        }
        Ok(FieldValue::new(FieldFn::H, self.h_value(z, side)?, side))
    }

    fn w_value(&self, z: C, side: Side) -> Result<C> {
        if (z - 1.0).norm() == 0.0 || (z + 1.0).norm() == 0.0 {
            return Err(Error::Domain("w is singular at z = +-1".into()));
        }
        let p = self.params();
        let zz = on_side(z, side);
        Ok(self.c_w * (zz - 1.0).powf(p.a / 2.0) * (zz + 1.0).powf(p.b / 2.0))
    }

    pub fn w(&self, z: C, side: Side) -> Result<FieldValue> {
        if is_real_cut(z) && side == Side::None {
            return Err(Error::Domain(format!("{z} is on (-inf,1]; pass a side")));
        }
        Ok(FieldValue::new(FieldFn::W, self.w_value(z, side)?, side))
    }

    fn g_value(&self, z: C, side: Side) -> Result<C> {
        // G is continuous across (−∞,1] off Σ; any side gives the same value.
        let side = if is_real_cut(z) && side == Side::None { Side::Plus } else { side };
        Ok(self.h_value(z, side)? / self.w_value(z, side)?)
    }

    pub fn g(&self, z: C, side: Side) -> Result<FieldValue> {
        Ok(FieldValue::new(FieldFn::G, self.g_value(z, side)?, side))
    }

    /// a = ((z−ζ₂)/(z−ζ₁))^{1/4}, a(∞) = 1, cut on Γ (C.2) or [ζ₁,ζ₂] (C.3).
    pub fn a(&self, z: C, side: Side) -> Result<FieldValue> {
        let bp = self.geometry.bp;
        if (z - bp.zeta1).norm() == 0.0 || (z - bp.zeta2).norm() == 0.0 {
            return Err(Error::Domain("a is singular at the branch points".into()));
        }
        let zz = on_side(z, side);
        let a_seg = ((zz - bp.zeta2) / (zz - bp.zeta1)).powf(0.25);
        let v = match self.tag() {
            CaseTag::C3 => {
                if self.geometry.level.on_segment(z) && side == Side::None {
                    return Err(Error::Domain(format!("{z} is on [zeta1,zeta2]; pass a side")));
                }
                a_seg
            }
            _ => {
                if self.sigma(z, side) < 0.0 {
                    -I * a_seg
                } else {
                    a_seg
                }
            }
        };
        Ok(FieldValue::new(FieldFn::A, v, side))
    }

    /// (N₁₁, N₁₂) = ((a+1/a)/2, (a−1/a)/(2i)).
    pub fn n_entries(&self, z: C, side: Side) -> Result<(FieldValue, FieldValue)> {
        let a = self.a(z, side)?.value;
        Ok((
            FieldValue::new(FieldFn::N11, (a + 1.0 / a) / 2.0, side),
            FieldValue::new(FieldFn::N12, (a - 1.0 / a) / (2.0 * I), side),
        ))
    }

    fn check_disc(&self, z: C) -> Result<()> {
        let eps = self.geometry.epsilon();
        if (z - self.geometry.bp.zeta2).norm() > eps * (1.0 + 1e-9) {
            return Err(Error::Domain(format!("{z} is outside the disc of radius {eps} around zeta2")));
        }
        Ok(())
    }

    /// φ = k∫_{ζ₂}^z R/(1−t²) dt in the disc around ζ₂. In C.3 it is
    /// continued from ℂ⁺ across (ζ₂,1), so the cut is [ζ₁,ζ₂] only.
    pub fn phi(&self, z: C, side: Side) -> Result<FieldValue> {
        self.check_disc(z)?;
        Ok(FieldValue::new(FieldFn::Phi, self.phi_value(z, side)?, side))
    }

    fn phi_value(&self, z: C, side: Side) -> Result<C> {
        if (z - self.geometry.bp.zeta2).norm() == 0.0 {
            return Ok(C::new(0.0, 0.0));
        }
        let k = self.k();
        match self.tag() {
            CaseTag::C3 => {
                let lower = z.im < 0.0 || (z.im == 0.0 && side == Side::Minus && z.re < self.geometry.bp.zeta2.re);
                let side = if z.im == 0.0 && z.re > self.geometry.bp.zeta2.re { Side::Plus } else { side };
                let v = -self.phi_seg(z, side)? * k;
                Ok(if lower { v + I * (PI * self.params().a) } else { v })
            }
            _ => Ok(-self.phi_seg(z, side)? * (self.sigma(z, side) * k)),
        }
    }

    /// f = (3φ/2)^{2/3}, analytic in the disc, f > 0 on (ζ₂,1) (C.3) or on
    /// γ⁻ (C.2). Continued along the ray from ζ₂ by root matching.
    pub fn f(&self, z: C) -> Result<FieldValue> {
        self.check_disc(z)?;
        Ok(FieldValue::new(FieldFn::F, self.f_value(z)?, Side::None))
    }

    fn f_value(&self, z: C) -> Result<C> {
        let z2 = self.geometry.bp.zeta2;
        let d = z - z2;
        if d.norm() == 0.0 {
            return Ok(C::new(0.0, 0.0));
        }
        let steps = 24;
        let mut prev = self.f1 * (d / steps as f64 * 0.5);
        let mut val = prev;
        for j in 1..=steps {
            let t = z2 + d * (j as f64 / steps as f64);
            // (3φ/2)² is continuous across the cuts of φ.
            let side = if t.im == 0.0 { Side::Plus } else { Side::None };
            let q = (self.phi_value(t, side)? * 1.5).powi(2);
            let guess = if j == 1 { self.f1 * (t - z2) } else { prev * (j as f64 / (j - 1) as f64) };
            val = nearest_root(q, guess, 3);
            prev = val;
        }
        Ok(val)
    }

    /// f^{1/4}/a = (f·(z−ζ₁)/(z−ζ₂))^{1/4}, analytic near ζ₂.
    pub fn f_quarter_over_a(&self, z: C) -> Result<C> {
        self.check_disc(z)?;
        let bp = self.geometry.bp;
        if (z - bp.zeta2).norm() == 0.0 {
            return Ok(self.g0);
        }
        let v = self.f_value(z)? * (z - bp.zeta1) / (z - bp.zeta2);
        Ok(nearest_root(v, self.g0, 4))
    }

    /// Fixes f'(ζ₂) and (f^{1/4}/a)(ζ₂) from the positivity conventions.
    fn pin_edge_branches(&mut self) -> Result<()> {
        let bp = self.geometry.bp;
        let cube = self.f1;
        match self.tag() {
            CaseTag::C3 => {
                self.f1 = nearest_root(cube, C::new(cube.norm().cbrt(), 0.0), 3);
                let q = self.f1 * (bp.zeta2 - bp.zeta1);
                self.g0 = nearest_root(q, C::new(q.norm().powf(0.25), 0.0), 4);
            }
            _ => {
                let orth = self.geometry.orth.as_ref().ok_or_else(|| Error::Topology("gamma- missing".into()))?;
                let gm = &orth[1];
                let dir = (gm.points[1] - bp.zeta2) / (gm.points[1] - bp.zeta2).norm();
                // f ≈ f'(ζ₂)(z−ζ₂) must be positive along γ⁻.
                self.f1 = nearest_root(cube, dir.conj() * cube.norm().cbrt(), 3);
                // On γ⁻ near ζ₂: f^{1/4} > 0 and a is the exterior branch.
                let z = gm.points[1];
                let fz = self.f1 * (z - bp.zeta2);
                let a = ((z - bp.zeta2) / (z - bp.zeta1)).powf(0.25);
                let target = fz.norm().powf(0.25) / a;
                let q = self.f1 * (bp.zeta2 - bp.zeta1);
                self.g0 = nearest_root(q, target, 4);
            }
        }
        Ok(())
    }

    /// w continued analytically into the disc around ζ₂. In C.3 this is the
    /// principal branch from ℂ⁺ carried across (ζ₂,1).
    pub fn w_edge(&self, z: C) -> Result<C> {
        let w = self.w_value(z, if z.im == 0.0 { Side::Plus } else { Side::None })?;
        if self.tag() == CaseTag::C3 && z.im < 0.0 {
            return Ok(w * C::from_polar(1.0, PI * self.params().a));
        }
        Ok(w)
    }
}

/// Fractional part of α as f64 (exact for α close to an integer) and the
/// nearest integer's parity.
fn split_alpha(alpha: &Float) -> (f64, bool) {
    let r = Float::with_val(alpha.prec(), alpha.round_ref());
    let frac = Float::with_val(alpha.prec(), alpha - &r).to_f64();
    let odd = !Float::with_val(r.prec(), &r / 2u32).is_integer();
    (frac, odd)
}

/// d_n = 1 − e^{−2πiα} with α = A·n.
pub fn d_n(alpha: &Float) -> C {
    let (frac, _) = split_alpha(alpha);
    if frac == 0.0 {
        return C::new(0.0, 0.0);
    }
    1.0 - C::from_polar(1.0, -2.0 * PI * frac)
}

pub fn d_n_f64(a: f64, n: u32) -> C {
    d_n(&Float::with_val(128, a * f64::from(n)))
}

/// (e^{−πiα}, sin(πα)) computed from the fractional part of α.
pub(crate) fn phase_and_sine(alpha: &Float) -> (C, f64) {
    let (frac, odd) = split_alpha(alpha);
    let sign = if odd { -1.0 } else { 1.0 };
    (C::from_polar(sign, -PI * frac), sign * (PI * frac).sin())
}

/// 𝒜(t) = e^{−πiα}Ai(t) + 2ie^{πi/3} sin(πα) Ai(e^{4πi/3}t) and 𝒜'(t).
pub fn script_a(t: C, alpha: &Float) -> (C, C) {
    let (e, s) = phase_and_sine(alpha);
    let rot = C::from_polar(1.0, 4.0 * PI / 3.0);
    let (ai, dai) = airy::airy_ai(t);
    if s == 0.0 {
        return (e * ai, e * dai);
    }
    let (bi, dbi) = airy::airy_ai(rot * t);
    let c = 2.0 * I * C::from_polar(1.0, PI / 3.0) * s;
    (e * ai + c * bi, e * dai + c * rot * dbi)
}

/// Unit tangent at vertex `i` of a polyline (central difference).
pub fn vertex_tangent(c: &geometry::Contour, i: usize) -> C {
    let n = c.points.len();
    let (a, b) = if c.closed {
        (c.points[(i + n - 1) % n], c.points[(i + 1) % n])
    } else if i == 0 {
        (c.points[0], c.points[1])
    } else if i + 1 == n {
        (c.points[n - 2], c.points[n - 1])
    } else {
        (c.points[i - 1], c.points[i + 1])
    };
    (b - a) / (b - a).norm()
}
