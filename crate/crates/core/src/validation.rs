//! Weak zero asymptotics: masses, r estimation, distances to the support,
//! real-zero counts, orthogonality and the limiting Riccati equation.
//!
//! All integrals of the density k/(πi)·R/(1−t²) dt run along the straight
//! chords of traced polylines. The integrand is analytic off the cuts, so
//! the chord path gives the same value as the exact curve.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldContext;
use crate::geometry::{segment_distance, Contour, ContourKind, Side};
use crate::jacobi::{build_poly, EmpiricalMeasure, PolySpec, ZeroSet};
use crate::params::{CaseTag, FiniteParams};
use crate::quad;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RSource {
    Given,
    Estimated,
}

/// r ∈ [0, ∞]; `None` encodes r = ∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RParameter {
    pub r: Option<f64>,
    pub source: RSource,
}

impl RParameter {
    pub fn given(r: f64) -> Self {
        RParameter { r: if r.is_finite() { Some(r.max(0.0)) } else { None }, source: RSource::Given }
    }

    /// r as a float, +∞ when infinite.
    pub fn value(&self) -> f64 {
        self.r.unwrap_or(f64::INFINITY)
    }
}

/// r̂ = −ln(dist(α, ℤ))/n.
pub fn estimate_r(alpha: &Float, n: u32) -> RParameter {
    let frac = Float::with_val(alpha.prec(), alpha - Float::with_val(alpha.prec(), alpha.round_ref()));
    let dist = frac.abs();
    if dist.is_zero() {
        return RParameter { r: None, source: RSource::Estimated };
    }
    let r = -(dist.ln().to_f64()) / f64::from(n);
    RParameter { r: Some(r.max(0.0)), source: RSource::Estimated }
}

const QUAD_TOL: f64 = 1e-13;

/// One support component of μ_r with its analytic mass.
#[derive(Clone, Debug)]
pub struct Component {
    pub contour: Contour,
    pub mass: f64,
}

/// μ_r as absolutely continuous parts on polylines plus an optional atom.
#[derive(Clone, Debug)]
pub struct LimitMeasure {
    pub r: RParameter,
    pub components: Vec<Component>,
    /// (location, mass) of the point mass of μ_∞.
    pub atom: Option<(C, f64)>,
    k: f64,
    lf: crate::geometry::LevelFunction,
}

impl LimitMeasure {
    /// μ in C.2 (r is irrelevant there) and μ_r in C.3.
    pub fn new(ctx: &FieldContext, r: RParameter) -> Result<Self> {
        let g = &ctx.geometry;
        let a = ctx.params().a;
        let (components, atom) = match ctx.tag() {
            CaseTag::C2 => (vec![Component { contour: g.gamma().clone(), mass: 1.0 }], None),
            CaseTag::C3 => {
                let seg = g.segment().expect("C.3 has a segment").clone();
                let seg = Component { contour: seg, mass: 1.0 + a };
                match r.r {
                    None => (vec![seg], Some((C::new(1.0, 0.0), -a))),
                    Some(rv) => {
                        let curve = if rv == 0.0 { g.gamma().clone() } else { g.trace_gamma_r(rv)? };
                        (vec![seg, Component { contour: curve, mass: -a }], None)
                    }
                }
            }
            t => return Err(Error::Unsupported(format!("limit measure for case {t}"))),
        };
        Ok(LimitMeasure { r, components, atom, k: ctx.k(), lf: g.level.clone() })
    }

    /// dμ/dt, to be multiplied by dt along the component's orientation.
    fn density(&self, t: C, segment: bool) -> C {
        let r = if segment { self.lf.r_seg_side(t, Side::Plus) } else { self.lf.r_seg(t) };
        r / (1.0 - t * t) * (self.k / (PI * C::new(0.0, 1.0)))
    }

    /// ∫ g dμ over one component.
    pub fn integrate_component(&self, idx: usize, g: impl Fn(C) -> C) -> Result<C> {
        let comp = &self.components[idx];
        let seg = comp.contour.kind == ContourKind::Segment;
        let f = |t: C| g(t) * self.density(t, seg);
        if seg {
            let pts = &comp.contour.points;
            return quad::chord_sqrt_both(f, pts[0], pts[pts.len() - 1], QUAD_TOL);
        }
        let edges: Vec<(C, C)> = comp.contour.edges().collect();
        let m = edges.len() as f64;
        let near_bp = |z: C| (z - self.lf.bp.zeta1).norm() < 1e-9 || (z - self.lf.bp.zeta2).norm() < 1e-9;
        let mut acc = C::new(0.0, 0.0);
        for (a, b) in edges {
            // The density has square-root zeros at the branch points.
            acc += if (b - a).norm() < 1e-10 {
                f((a + b) / 2.0) * (b - a)
            } else if near_bp(a) {
                quad::chord_sqrt_start(f, a, b, QUAD_TOL / m)?
            } else if near_bp(b) {
                -quad::chord_sqrt_start(f, b, a, QUAD_TOL / m)?
            } else {
                quad::adaptive_chord(f, a, b, QUAD_TOL / m)?
            };
        }
        Ok(acc)
    }

    /// ∫ g dμ over the whole support including the atom.
    pub fn integrate(&self, g: impl Fn(C) -> C + Copy) -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for i in 0..self.components.len() {
            acc += self.integrate_component(i, g)?;
        }
        if let Some((p, m)) = self.atom {
            acc += g(p) * m;
        }
        Ok(acc)
    }

    /// Cauchy transform ∫ dμ(t)/(z−t) by quadrature.
    pub fn cauchy_transform(&self, z: C) -> Result<C> {
        self.integrate(move |t| 1.0 / (z - t))
    }

    /// Density samples dμ/|dt| (real part) at the vertices of each component.
    pub fn density_samples(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for comp in &self.components {
            let seg = comp.contour.kind == ContourKind::Segment;
            for i in 0..comp.contour.points.len() {
                let t = comp.contour.points[i];
                if (t - self.lf.bp.zeta1).norm() < 1e-12 || (t - self.lf.bp.zeta2).norm() < 1e-12 {
                    continue;
                }
                let tan = crate::fields::vertex_tangent(&comp.contour, i);
                out.push((self.density(t, seg) * tan).re);
            }
        }
        out
    }

    /// `count` atoms of weight 1/count distributed by inverse CDF along
    /// each component; the split between components follows the
    /// analytic masses.
    pub fn discretize(&self, count: usize) -> Result<Vec<C>> {
        let mut out = Vec::with_capacity(count);
        let total_ac: f64 = self.components.iter().map(|c| c.mass).sum();
        let atom_count = match self.atom {
            Some((_, m)) => ((m * count as f64).round() as usize).min(count),
            None => 0,
        };
        let mut remaining = count - atom_count;
        for (idx, comp) in self.components.iter().enumerate() {
            let m = if idx + 1 == self.components.len() {
                remaining
            } else {
                let share = (comp.mass / total_ac * (count - atom_count) as f64).round() as usize;
                share.min(remaining)
            };
            remaining -= m;
            out.extend(self.inverse_cdf(idx, m)?);
        }
        if let Some((p, _)) = self.atom {
            out.extend(std::iter::repeat(p).take(atom_count));
        }
        Ok(out)
    }

    fn inverse_cdf(&self, idx: usize, m: usize) -> Result<Vec<C>> {
        if m == 0 {
            return Ok(vec![]);
        }
        let comp = &self.components[idx];
        let seg = comp.contour.kind == ContourKind::Segment;
        let f = |t: C| self.density(t, seg);
        let edges: Vec<(C, C)> = comp.contour.edges().collect();
        let masses: Vec<f64> = edges
            .iter()
            .map(|&(a, b)| quad::chord_sqrt_both(f, a, b, 1e-10).map(|v| v.re.max(0.0)))
            .collect::<Result<_>>()?;
        let total: f64 = masses.iter().sum();
        let mut out = Vec::with_capacity(m);
        let mut acc = 0.0;
        let mut e = 0;
        for j in 0..m {
            let target = total * (j as f64 + 0.5) / m as f64;
            while e + 1 < edges.len() && acc + masses[e] < target {
                acc += masses[e];
                e += 1;
            }
            let frac = if masses[e] > 0.0 { ((target - acc) / masses[e]).clamp(0.0, 1.0) } else { 0.5 };
            out.push(edges[e].0 + (edges[e].1 - edges[e].0) * frac);
        }
        Ok(out)
    }

    /// Distance from z to the support.
    pub fn distance(&self, z: C) -> f64 {
        let mut d = self.components.iter().map(|c| c.contour.distance(z)).fold(f64::INFINITY, f64::min);
        if let Some((p, _)) = self.atom {
            d = d.min((z - p).norm());
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassEntry {
    /// `null` for r = ∞.
    pub r: Option<f64>,
    pub segment: Option<f64>,
    pub curve: f64,
    pub total: f64,
    pub expected_segment: Option<f64>,
    pub expected_curve: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub entries: Vec<MassEntry>,
    pub max_error: f64,
}

/// Integrates μ_r over each support component for every r in `rs`.
pub fn mass_identities(ctx: &FieldContext, rs: &[RParameter]) -> Result<MassReport> {
    let a = ctx.params().a;
    let mut entries = Vec::new();
    let mut max_error: f64 = 0.0;
    let rs: Vec<RParameter> = if ctx.tag() == CaseTag::C2 { vec![RParameter::given(0.0)] } else { rs.to_vec() };
    for r in rs {
        let mu = LimitMeasure::new(ctx, r)?;
        let entry = match ctx.tag() {
            CaseTag::C2 => {
                let curve = mu.integrate_component(0, |_| C::new(1.0, 0.0))?.re;
                MassEntry { r: r.r, segment: None, curve, total: curve, expected_segment: None, expected_curve: 1.0 }
            }
            _ => {
                let segment = mu.integrate_component(0, |_| C::new(1.0, 0.0))?.re;
                let curve = match mu.atom {
                    Some((_, m)) => m,
                    None => mu.integrate_component(1, |_| C::new(1.0, 0.0))?.re,
                };
                MassEntry {
                    r: r.r,
                    segment: Some(segment),
                    curve,
                    total: segment + curve,
                    expected_segment: Some(1.0 + a),
                    expected_curve: -a,
                }
            }
        };
        let mut err = (entry.total - 1.0).abs().max((entry.curve - entry.expected_curve).abs());
        if let (Some(s), Some(e)) = (entry.segment, entry.expected_segment) {
            err = err.max((s - e).abs());
        }
        max_error = max_error.max(err);
        entries.push(entry);
    }
    Ok(MassReport { entries, max_error })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub r: RParameter,
    pub mass_on_segment: f64,
    pub mass_on_curve: f64,
    pub transport_distance: f64,
    pub hausdorff_to_support: f64,
    /// Largest distance from a zero to the support (one-sided part).
    pub max_atom_distance: f64,
}

/// Compares the zero counting measure with μ_r.
pub fn compare_weak(em: &EmpiricalMeasure, ctx: &FieldContext, r: RParameter) -> Result<DiscrepancyReport> {
    if em.atoms.is_empty() {
        return Err(Error::InvalidParameter("empty zero set".into()));
    }
    let mu = LimitMeasure::new(ctx, r)?;
    let bp = ctx.geometry.bp;
    // Nearest-component (Voronoi) assignment.
    let on_segment = |z: C| -> bool {
        if ctx.tag() != CaseTag::C3 {
            return false;
        }
        let ds = segment_distance(z, bp.zeta1, bp.zeta2);
        let dc = if mu.components.len() > 1 { mu.components[1].contour.distance(z) } else { (z - 1.0).norm() };
        ds <= dc
    };
    let mass_on_segment = em.mass_where(on_segment);
    let mass_on_curve = em.total_mass() - mass_on_segment;
    let max_atom_distance = em.atoms.iter().map(|&z| mu.distance(z)).fold(0.0, f64::max);
    // Support → atoms on a fine sample of the support.
    let mut dense = Vec::new();
    for c in &mu.components {
        let count = ((c.contour.length() / 2e-3).ceil() as usize).max(10);
        dense.extend(c.contour.resample(count));
    }
    if let Some((p, _)) = mu.atom {
        dense.push(p);
    }
    let back = dense
        .iter()
        .map(|p| em.atoms.iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let target = mu.discretize(em.atoms.len())?;
    let transport_distance = transport(&em.atoms, &target)?;
    Ok(DiscrepancyReport {
        r,
        mass_on_segment,
        mass_on_curve,
        transport_distance,
        hausdorff_to_support: max_atom_distance.max(back),
        max_atom_distance,
    })
}

/// W₁ distance between two uniform atomic measures with equally many atoms.
pub fn transport(a: &[C], b: &[C]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!("atom counts differ: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|p| b.iter().map(|q| (p - q).norm()).collect()).collect();
    let assign = hungarian(&cost);
    Ok(assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>() / a.len() as f64)
}

/// Minimum-cost perfect matching on a square cost matrix (Kuhn–Munkres
/// with potentials, O(n³)). Returns the column assigned to each row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    // 1-based arrays; column 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealZeroCount {
    pub observed: usize,
    /// n − [−α] with [x] the integer part of x ≥ 0; `None` outside
    /// α > −n, β > −1 where that count is not exact.
    pub expected: Option<u32>,
}

/// Zeros with |Im z| < 1e−10 in (−1,1), against the Hilbert–Klein count.
pub fn real_zero_count(zs: &ZeroSet) -> RealZeroCount {
    let observed = zs.zeros().iter().filter(|z| z.im.abs() < 1e-10 && z.re.abs() < 1.0).count();
    let n = f64::from(zs.n);
    let expected = if zs.alpha > -n && zs.beta > -1 {
        let neg = Float::with_val(zs.alpha.prec(), -&zs.alpha);
        let k = if neg > 0 { neg.floor().to_f64() as u32 } else { 0 };
        Some(zs.n - k)
    } else {
        None
    };
    RealZeroCount { observed, expected }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthContour {
    /// γ⁺ ∪ Γ ∪ γ⁻ (C.2 only).
    Trajectories,
    /// |t−1| = 2, which passes through −1 and surrounds 1.
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub n: u32,
    pub contour: OrthContour,
    /// |∫ t^k p_n w² dt| / ∫ |t^k p_n w²| |dt| for k = 0..n−1.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Same ratio for k = n.
    pub moment_n: f64,
}

/// Non-hermitian orthogonality of p_n against t^k with weight
/// w²(t) = (t−1)^α (t+1)^β on a contour from −1+0i around 1 to −1−0i.
pub fn orthogonality_check(ctx: Option<&FieldContext>, fp: &FiniteParams, contour: OrthContour) -> Result<OrthogonalityReport> {
    if fp.beta_f64() <= 0.0 {
        return Err(Error::InvalidParameter("orthogonality on this contour needs beta > 0".into()));
    }
    let spec = build_poly(fp, crate::jacobi::precision_for(fp))?;
    let path: Vec<C> = match contour {
        OrthContour::Trajectories => {
            let ctx = ctx.ok_or_else(|| Error::InvalidParameter("the trajectory contour needs a field context".into()))?;
            let orth = ctx
                .geometry
                .orth
                .as_ref()
                .ok_or_else(|| Error::Unsupported("orthogonal trajectories exist only in case C.2".into()))?;
            let mut p: Vec<C> = orth[0].points.iter().rev().copied().collect();
            p.extend(ctx.geometry.gamma().points.iter().skip(1));
            p.extend(orth[1].points.iter().skip(1));
            p
        }
        OrthContour::Circle => {
            let m = 256;
            (0..=m)
                .map(|j| {
                    let th = PI - 2.0 * PI * j as f64 / m as f64;
                    if j == 0 || j == m {
                        C::new(-1.0, 0.0)
                    } else {
                        C::new(1.0, 0.0) + C::from_polar(2.0, th)
                    }
                })
                .collect()
        }
    };
    let coeffs: Vec<f64> = spec.monic_coeffs.iter().map(|c| c.to_f64()).collect();
    let (alpha, beta) = (fp.alpha_f64(), fp.beta_f64());
    let n = fp.n;
    let mut residuals = Vec::with_capacity(n as usize);
    let mut moment_n = 0.0;
    for k in 0..=n {
        let f = |t: C| -> C {
            if (t + 1.0).norm() == 0.0 {
                return C::new(0.0, 0.0);
            }
            let p = coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * t + c);
            t.powu(k) * p * (t - 1.0).powf(alpha) * (t + 1.0).powf(beta)
        };
        let (val, abs) = path_integral(&f, &path)?;
        let ratio = val.norm() / abs;
        if k < n {
            residuals.push(ratio);
        } else {
            moment_n = ratio;
        }
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(OrthogonalityReport { n, contour, residuals, max_residual, moment_n })
}

/// (∫ f dt, ∫ |f| |dt|) along a polyline whose ends sit at −1.
fn path_integral(f: &impl Fn(C) -> C, path: &[C]) -> Result<(C, f64)> {
    let m = path.len() - 1;
    // A coarse pass sets the absolute tolerance of the fine one.
    let mut abs = 0.0;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        abs += quad::adaptive_real(|s| f(a + (b - a) * s).norm() * len, 0.0, 1.0, 1e-6 * len.max(1e-300))
            .unwrap_or_else(|_| quad::gl20().real(&mut |s| f(a + (b - a) * s).norm() * len, 0.0, 1.0));
    }
    if abs == 0.0 || !abs.is_finite() {
        return Err(Error::Numerical("orthogonality integrand vanishes or overflows on the contour".into()));
    }
    let tol = 1e-12 * abs / m as f64;
    let mut val = C::new(0.0, 0.0);
    for (i, w) in path.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        val += if (b - a).norm() < 1e-10 {
            f((a + b) / 2.0) * (b - a)
        } else if i == 0 {
            quad::chord_sqrt_start(f, a, b, tol)?
        } else if i + 1 == m {
            -quad::chord_sqrt_start(f, b, a, tol)?
        } else {
            quad::adaptive_chord(f, a, b, tol)?
        };
    }
    Ok((val, abs))
}

/// |(1−z²)h² + [B−A−(A+B)z]h + A+B+1| with h the Cauchy transform of μ_r
/// computed by quadrature over the support.
pub fn riccati_residuals(ctx: &FieldContext, r: RParameter, points: &[C]) -> Result<Vec<f64>> {
    let mu = LimitMeasure::new(ctx, r)?;
    let p = ctx.params();
    points
        .iter()
        .map(|&z| {
            let h = mu.cauchy_transform(z)?;
            Ok(((1.0 - z * z) * h * h + (p.b - p.a - (p.a + p.b) * z) * h + (p.a + p.b + 1.0)).norm())
        })
        .collect()
}

/// The [`PolySpec`] of `fp` at the engine's working precision.
pub fn poly_for(fp: &FiniteParams) -> Result<PolySpec> {
    build_poly(fp, crate::jacobi::precision_for(fp))
}
