//! Branch points, trajectories of the quadratic differential
//! −(z−ζ₁)(z−ζ₂)/(z²−1)² dz² and the contours built from them.

mod level;
mod trace;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use level::{LevelFunction, PhiState};

use crate::error::{Error, Result};
use crate::params::{classify, CaseClass, CaseTag, FiniteParams, ParamPair};

type C = Complex64;

/// Which boundary value to take on a cut or contour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    None,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPoints {
    pub zeta1: C,
    pub zeta2: C,
}

/// ζ₁,₂ = (B²−A² ∓ 4√((A+1)(B+1)(A+B+1)))/(A+B+2)² without any ordering
/// convention. Defined wherever A+B ≠ −2.
pub fn branch_points_raw(p: ParamPair) -> Result<(C, C)> {
    let (a, b) = (p.a, p.b);
    let s = (a + b + 2.0).powi(2);
    if s == 0.0 {
        return Err(Error::Domain("A+B=-2: branch points are not defined".into()));
    }
    let d = C::new((a + 1.0) * (b + 1.0) * (a + b + 1.0), 0.0);
    let root = d.sqrt() * 4.0;
    let base = C::new(b * b - a * a, 0.0);
    Ok(((base - root) / s, (base + root) / s))
}

pub fn branch_points(p: ParamPair) -> Result<BranchPoints> {
    let case = classify(p);
    let (z1, z2) = branch_points_raw(p)?;
    match case.tag {
        CaseTag::C3 => {
            let (lo, hi) = if z1.re <= z2.re { (z1, z2) } else { (z2, z1) };
            Ok(BranchPoints { zeta1: C::new(lo.re, 0.0), zeta2: C::new(hi.re, 0.0) })
        }
        CaseTag::C2 => {
            let up = if z1.im > 0.0 { z1 } else { z2 };
            Ok(BranchPoints { zeta1: up, zeta2: up.conj() })
        }
        _ => Err(Error::Unsupported(format!("case not supported by geometry: {} ({})", case.tag, case.detail))),
    }
}

/// Radius of the disc around ζ₂ handled by the Airy-type formulas.
pub fn edge_radius(bp: &BranchPoints) -> f64 {
    let d = (bp.zeta2 - 1.0).norm().min((bp.zeta2 + 1.0).norm());
    (0.25 * (bp.zeta2 - bp.zeta1).norm()).min(0.5 * d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r")]
pub enum ContourKind {
    Gamma,
    GammaR(f64),
    Segment,
    GammaPlusOrth,
    GammaMinusOrth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Open arc traversed from ζ₁ to ζ₂.
    Zeta1ToZeta2,
    /// Closed loop traversed clockwise.
    Clockwise,
    /// Open arc from a branch point to −1.
    ToMinusOne,
}

/// A polyline. Closed contours do not repeat their first vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub kind: ContourKind,
    pub closed: bool,
    pub orientation: Orientation,
    /// Target value of Re Φ on the curve (NaN for orthogonal arcs).
    pub level: f64,
    pub points: Vec<C>,
}

impl Contour {
    /// Consecutive vertex pairs, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (C, C)> + '_ {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn distance(&self, z: C) -> f64 {
        if self.points.len() == 1 {
            return (z - self.points[0]).norm();
        }
        self.edges().map(|(a, b)| segment_distance(z, a, b)).fold(f64::INFINITY, f64::min)
    }

    /// Winding number of a closed contour around z.
    pub fn winding(&self, z: C) -> i32 {
        winding_number(&self.points, z)
    }

    /// Points at equal arclength spacing; `count` points with half-step
    /// offsets from the ends.
    pub fn resample(&self, count: usize) -> Vec<C> {
        let total = self.length();
        let mut out = Vec::with_capacity(count);
        let edges: Vec<(C, C)> = self.edges().collect();
        let mut acc = 0.0;
        let mut e = 0;
        for j in 0..count {
            let target = total * (j as f64 + 0.5) / count as f64;
            while e < edges.len() {
                let len = (edges[e].1 - edges[e].0).norm();
                if acc + len >= target || e + 1 == edges.len() {
                    let t = if len > 0.0 { ((target - acc) / len).clamp(0.0, 1.0) } else { 0.0 };
                    out.push(edges[e].0 + (edges[e].1 - edges[e].0) * t);
                    break;
                }
                acc += len;
                e += 1;
            }
        }
        out
    }

    pub fn conj(&self) -> Contour {
        Contour { points: self.points.iter().map(|z| z.conj()).collect(), ..self.clone() }
    }
}

pub fn segment_distance(z: C, a: C, b: C) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Winding number of the closed polygon `pts` around z.
pub fn winding_number(pts: &[C], z: C) -> i32 {
    let n = pts.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = pts[i] - z;
        let b = pts[(i + 1) % n] - z;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i32
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[C], b: &[C]) -> f64 {
    let one = |x: &[C], y: &[C]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// Σ together with the data needed to evaluate fields on it.
#[derive(Clone, Debug)]
pub struct GeometryBundle {
    pub params: ParamPair,
    pub case: CaseClass,
    pub bp: BranchPoints,
    /// C.2: `[Γ]`; C.3: `[[ζ₁,ζ₂], Γ]`.
    pub sigma: Vec<Contour>,
    /// C.2: `[γ⁺, γ⁻]`.
    pub orth: Option<Vec<Contour>>,
    pub level: LevelFunction,
    pub h_max: f64,
}

impl GeometryBundle {
    pub fn gamma(&self) -> &Contour {
        self.sigma.iter().find(|c| c.kind == ContourKind::Gamma).expect("sigma always holds Gamma")
    }

    pub fn segment(&self) -> Option<&Contour> {
        self.sigma.iter().find(|c| c.kind == ContourKind::Segment)
    }

    pub fn tag(&self) -> CaseTag {
        self.case.tag
    }

    pub fn epsilon(&self) -> f64 {
        edge_radius(&self.bp)
    }

    /// Boundary value of R_seg (cut on the straight segment).
    pub fn sqrt_r_seg(&self, z: C, side: Side) -> C {
        self.level.r_seg_side(z, side)
    }

    /// R with its cut on Σ: [ζ₁,ζ₂] in C.3, Γ in C.2 (R_Γ = −R_seg in
    /// the region between the segment and Γ). On Γ the side selects the
    /// boundary value; + is to the left of the orientation ζ₁→ζ₂.
    pub fn sqrt_r(&self, z: C, side: Side) -> Result<C> {
        match self.tag() {
            CaseTag::C3 => {
                if self.level.on_segment(z) && side == Side::None {
                    return Err(Error::Domain(format!("{z} is on the cut [zeta1,zeta2]; pass a side")));
                }
                Ok(self.level.r_seg_side(z, side))
            }
            _ => {
                let near_gamma = self.gamma().distance(z) <= 1e-9;
                if near_gamma {
                    return match side {
                        Side::None => Err(Error::Domain(format!("{z} is on Gamma; pass a side"))),
                        Side::Plus => Ok(self.level.r_seg(z)),
                        Side::Minus => Ok(-self.level.r_seg(z)),
                    };
                }
                let r = self.level.r_seg(z);
                Ok(if self.inside(z) { -r } else { r })
            }
        }
    }

    /// C.3: inside Γ. C.2: inside the region bounded by Γ and [ζ₁,ζ₂].
    pub fn inside(&self, z: C) -> bool {
        let gamma = self.gamma();
        let dist = gamma.distance(z);
        match self.tag() {
            CaseTag::C3 => {
                if dist < 2.0 * self.h_max && (z - self.bp.zeta2).norm() > 2.0 * self.h_max {
                    self.level.re_phi(z) < 0.0
                } else {
                    gamma.winding(z) != 0
                }
            }
            _ => {
                let seg = segment_distance(z, self.bp.zeta1, self.bp.zeta2);
                let far_from_ends =
                    (z - self.bp.zeta1).norm() > 2.0 * self.h_max && (z - self.bp.zeta2).norm() > 2.0 * self.h_max;
                if dist < 2.0 * self.h_max && seg > 2.0 * self.h_max && far_from_ends {
                    self.level.re_phi(z) < 0.0
                } else {
                    // Γ runs ζ₁→ζ₂; the polygon closes along the segment.
                    winding_number(&gamma.points, z) != 0
                }
            }
        }
    }

    /// Traces Γ_r (C.3) as a closed clockwise loop around 1.
    pub fn trace_gamma_r(&self, r: f64) -> Result<Contour> {
        trace_level_curve_with(&self.level, r, self.h_max)
    }
}

/// Traces Γ_r for the parameters `p`. For r = 0 this is Γ itself.
pub fn trace_level_curve(p: ParamPair, r: f64) -> Result<Contour> {
    let bp = branch_points(p)?;
    let case = classify(p);
    if case.tag == CaseTag::C2 && r != 0.0 {
        return Err(Error::Unsupported("level curves with r > 0 are defined for case C3 only".into()));
    }
    let lf = LevelFunction::new(p, case.tag, bp);
    trace_level_curve_with(&lf, r, default_h_max(&bp))
}

fn default_h_max(bp: &BranchPoints) -> f64 {
    0.02 * (bp.zeta2 - bp.zeta1).norm()
}

fn trace_level_curve_with(lf: &LevelFunction, r: f64, h_max: f64) -> Result<Contour> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("r must be >= 0, got {r}")));
    }
    let c = -r / (2.0 * lf.k());
    let x0 = trace::crossing_right_of_one(lf, c)?;
    let bp = lf.bp;
    let (stop, kind) = if r == 0.0 {
        let ends = if lf.case == CaseTag::C3 { vec![bp.zeta2] } else { vec![bp.zeta1] };
        (trace::Stop::AtPoints(ends), ContourKind::Gamma)
    } else {
        (trace::Stop::RealAxis, ContourKind::GammaR(r))
    };
    let upper = trace::trace_upper(lf, c, x0, &stop, h_max)?;
    // reverse(upper) runs from the far end over the top to x0; the
    // conjugate branch then returns underneath.
    let mut pts: Vec<C> = upper.iter().rev().copied().collect();
    pts.extend(upper.iter().skip(1).map(|z| z.conj()));
    let closed = lf.case == CaseTag::C3;
    if closed {
        pts.pop();
    }
    let orientation = if closed { Orientation::Clockwise } else { Orientation::Zeta1ToZeta2 };
    Ok(Contour { kind, closed, orientation, level: c, points: pts })
}

fn segment_contour(bp: &BranchPoints, h_max: f64) -> Contour {
    let n = ((bp.zeta2 - bp.zeta1).norm() / h_max).ceil().max(1.0) as usize;
    let points = (0..=n).map(|j| bp.zeta1 + (bp.zeta2 - bp.zeta1) * (j as f64 / n as f64)).collect();
    Contour { kind: ContourKind::Segment, closed: false, orientation: Orientation::Zeta1ToZeta2, level: 0.0, points }
}

/// Assembles Σ (and γ± in C.2) and checks the trajectory topology.
pub fn build_geometry(p: ParamPair) -> Result<GeometryBundle> {
    let bp = branch_points(p)?;
    let case = classify(p);
    let lf = LevelFunction::new(p, case.tag, bp);
    let h_max = default_h_max(&bp);
    let gamma = trace_level_curve_with(&lf, 0.0, h_max)?;
    let mut bundle = GeometryBundle {
        params: p,
        case: case.clone(),
        bp,
        sigma: vec![],
        orth: None,
        level: lf,
        h_max,
    };
    if case.tag == CaseTag::C3 {
        bundle.sigma = vec![segment_contour(&bp, h_max), gamma];
    } else {
        bundle.sigma = vec![gamma];
        let minus = trace_gamma_minus(&bundle)?;
        let mut plus = minus.conj();
        plus.kind = ContourKind::GammaPlusOrth;
        bundle.orth = Some(vec![plus, minus]);
    }
    check_topology(&bundle)?;
    check_residuals(&bundle)?;
    Ok(bundle)
}

/// γ⁻: the orthogonal trajectory Im Φ = 0 from ζ₂ to −1 (C.2).
fn trace_gamma_minus(g: &GeometryBundle) -> Result<Contour> {
    let lf = &g.level;
    let z2 = g.bp.zeta2;
    let pts = &g.gamma().points;
    // Γ ends at ζ₂; its last edge gives the direction in which Γ leaves ζ₂.
    let gdir = (pts[pts.len() - 2] - z2).arg();
    let rho = 0.05 * (g.bp.zeta2 - g.bp.zeta1).norm();
    let at = |t: f64| -> Result<C> {
        let z = z2 + C::from_polar(rho, t);
        let st = lf.advance(&lf.start_state(), z, None)?;
        Ok(lf.value(&st))
    };
    let mut last_err = None;
    for offset in [PI, PI / 3.0, -PI / 3.0] {
        let center = gdir + offset;
        // Scan for a sign change of Im Φ with Re Φ < 0 in a ±50° window.
        let m = 40;
        let width = 50f64.to_radians();
        let mut found = None;
        let mut prev: Option<(f64, C)> = None;
        for j in 0..=m {
            let t = center - width + 2.0 * width * j as f64 / m as f64;
            let v = at(t)?;
            if let Some((tp, vp)) = prev {
                if vp.im * v.im <= 0.0 && v.re < 0.0 && vp.re < 0.0 {
                    found = Some((tp, t));
                    break;
                }
            }
            prev = Some((t, v));
        }
        let Some((mut lo, mut hi)) = found else { continue };
        let flo = at(lo)?.im;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = at(mid)?.im;
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let start = z2 + C::from_polar(rho, 0.5 * (lo + hi));
        match trace::trace_orthogonal(lf, start, 0.0, C::new(-1.0, 0.0), g.h_max) {
            Ok(points) => {
                return Ok(Contour {
                    kind: ContourKind::GammaMinusOrth,
                    closed: false,
                    orientation: Orientation::ToMinusOne,
                    level: f64::NAN,
                    points,
                })
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Topology("no orthogonal trajectory joins zeta2 and -1".into())))
}

/// Sign changes of Re Φ on (a, b) sampled densely (log-spaced near the ends).
fn sign_changes(lf: &LevelFunction, a: f64, b: f64) -> usize {
    let m = 4000;
    let mut prev: Option<f64> = None;
    let mut count = 0;
    for j in 1..m {
        let t = j as f64 / m as f64;
        // cluster samples near both ends
        let w = 0.5 - 0.5 * (PI * t).cos();
        let x = a + (b - a) * w;
        let v = lf.re_phi_side(C::new(x, 0.0), Side::Plus);
        if let Some(p) = prev {
            if p * v < 0.0 {
                count += 1;
            }
        }
        prev = Some(v);
    }
    count
}

fn check_topology(g: &GeometryBundle) -> Result<()> {
    let lf = &g.level;
    let gamma = g.gamma();
    let mut failures = vec![];
    let far = 1e4;
    match g.tag() {
        CaseTag::C2 => {
            let s = lf.s.re;
            let left = sign_changes(lf, -far, -1.0);
            let mid = sign_changes(lf, -1.0, s) + sign_changes(lf, s, 1.0);
            let right = sign_changes(lf, 1.0, far);
            for (name, n) in [("(-inf,-1)", left), ("(-1,1)", mid), ("(1,inf)", right)] {
                if n != 1 {
                    failures.push(format!("expected one trajectory crossing on {name}, found {n}"));
                }
            }
            let ends_ok = (gamma.points[0] - g.bp.zeta1).norm() < 1e-12
                && (gamma.points[gamma.points.len() - 1] - g.bp.zeta2).norm() < 1e-12;
            if !ends_ok {
                failures.push("Gamma does not join zeta1 to zeta2".into());
            }
            let crossings = gamma.edges().filter(|(a, b)| a.im * b.im < 0.0 || (b.im == 0.0 && b.re > 1.0)).count();
            if crossings != 1 {
                failures.push(format!("Gamma crosses the real axis {crossings} times"));
            }
        }
        _ => {
            let seg_max = (1..20)
                .map(|j| {
                    let x = g.bp.zeta1 + (g.bp.zeta2 - g.bp.zeta1) * (j as f64 / 20.0);
                    lf.re_phi_side(x, Side::Plus).abs()
                })
                .fold(0.0, f64::max);
            if seg_max > 1e-12 {
                failures.push(format!("[zeta1,zeta2] is not a trajectory (|Re Phi| up to {seg_max:e})"));
            }
            if sign_changes(lf, -far, -1.0) != 1 {
                failures.push("no single trajectory crossing on (-inf,-1) (loop around -1 missing)".into());
            }
            if gamma.winding(C::new(1.0, 0.0)).abs() != 1 {
                failures.push("Gamma does not wind once around 1".into());
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Topology(failures.join("; ")))
    }
}

fn check_residuals(g: &GeometryBundle) -> Result<()> {
    for c in &g.sigma {
        if c.kind == ContourKind::Segment {
            continue;
        }
        for z in &c.points {
            let res = (g.level.re_phi(*z) - c.level).abs();
            if res > 1e-10 {
                return Err(Error::Topology(format!("vertex {z} of {:?} off its level by {res:e}", c.kind)));
            }
        }
    }
    Ok(())
}

/// Initial guesses for the zeros of P_n^{(α,β)}: spread along the limit
/// support for (α/n, β/n) where it is available, else a circle.
pub fn zero_seeds(fp: &FiniteParams) -> Vec<C> {
    let n = fp.n as usize;
    let circle = || (0..n).map(|j| C::from_polar(2.0, 2.0 * PI * (j as f64 + 0.25) / n as f64)).collect::<Vec<_>>();
    if n < 8 {
        return circle();
    }
    let p = fp.ratio();
    let Ok(g) = build_geometry(p) else { return circle() };
    match g.tag() {
        CaseTag::C2 => g.gamma().resample(n),
        CaseTag::C3 => {
            let alpha = fp.alpha_f64();
            let on_segment = (n as i64 - (-alpha).floor() as i64).clamp(0, n as i64) as usize;
            let r = crate::validation::estimate_r(&fp.alpha, fp.n).value();
            let curve = if r.is_finite() && r < 20.0 { g.trace_gamma_r(r).ok() } else { None };
            let mut seeds = g.segment().map(|s| s.resample(on_segment)).unwrap_or_default();
            let rest = n - seeds.len();
            match curve {
                Some(c) => seeds.extend(c.resample(rest)),
                None => seeds.extend((0..rest).map(|j| 1.0 + C::from_polar(0.05, 2.0 * PI * (j as f64 + 0.5) / rest as f64))),
            }
            seeds
        }
        _ => circle(),
    }
}
