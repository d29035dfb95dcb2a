//! Strong asymptotic predictions for monic p_n = P̂_n^{(α,β)} with region
//! dispatch. Runs with α ≠ An take A = α/n and B = β/n.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy;
use crate::error::{Error, Result};
use crate::fields::{d_n, phase_and_sine, FieldContext};
use crate::geometry::Side;
use crate::params::{CaseTag, FiniteParams};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    Outer,
    InteriorC3,
    GammaPlusSide,
    GammaMinusSide,
    SegmentPlusSide,
    SegmentMinusSide,
    AiryDisc2,
    AiryDisc1,
    Unsupported,
}

impl RegionTag {
    pub fn is_airy(self) -> bool {
        matches!(self, RegionTag::AiryDisc1 | RegionTag::AiryDisc2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub n: u32,
    pub z: C,
    pub value: C,
    pub region: RegionTag,
    pub leading_terms: Vec<Term>,
    pub claimed_rel_error_order: String,
}

impl AsymptoticPrediction {
    fn from_terms(n: u32, z: C, region: RegionTag, terms: Vec<Term>) -> Self {
        let value = terms.iter().fold(C::new(0.0, 0.0), |acc, t| acc + t.value);
        AsymptoticPrediction { n, z, value, region, leading_terms: terms, claimed_rel_error_order: "O(1/n)".into() }
    }
}

fn term(label: &str, value: C) -> Term {
    Term { label: label.into(), value }
}

/// Distance under which a point with an explicit side counts as on a contour.
const ON_CONTOUR: f64 = 1e-9;

/// Region of z. `side` is only meaningful for points on Σ.
pub fn locate_region(ctx: &FieldContext, z: C, side: Side) -> RegionTag {
    region_of(ctx, z, side, true)
}

fn region_of(ctx: &FieldContext, z: C, side: Side, discs: bool) -> RegionTag {
    let tag = ctx.tag();
    if !matches!(tag, CaseTag::C2 | CaseTag::C3) {
        return RegionTag::Unsupported;
    }
    let g = &ctx.geometry;
    let eps = g.epsilon();
    if discs && (z - g.bp.zeta2).norm() < eps {
        return RegionTag::AiryDisc2;
    }
    if discs && (z - g.bp.zeta1).norm() < eps {
        return RegionTag::AiryDisc1;
    }
    let plus = side == Side::Plus;
    if tag == CaseTag::C3 && g.level.on_segment(z) {
        // On the cut a side is mandatory; default to the upper one.
        return if side == Side::Minus { RegionTag::SegmentMinusSide } else { RegionTag::SegmentPlusSide };
    }
    if side != Side::None && g.gamma().distance(z) <= ON_CONTOUR {
        return if plus { RegionTag::GammaPlusSide } else { RegionTag::GammaMinusSide };
    }
    if tag == CaseTag::C3 && g.inside(z) {
        RegionTag::InteriorC3
    } else {
        RegionTag::Outer
    }
}

/// exp(n·ln x), exact for integer n whatever branch of ln is used.
fn pow_n(x: C, n: f64) -> C {
    (x.ln() * n).exp()
}

/// Prediction of p_n(z) for `fp` using a context built for fp.ratio().
pub fn predict(ctx: &FieldContext, fp: &FiniteParams, z: C, side: Side) -> Result<AsymptoticPrediction> {
    predict_with(ctx, fp, z, side, true)
}

/// The outer, interior or side formula even inside the Airy discs, for
/// matching on the disc boundary.
pub fn predict_ignoring_discs(ctx: &FieldContext, fp: &FiniteParams, z: C, side: Side) -> Result<AsymptoticPrediction> {
    predict_with(ctx, fp, z, side, false)
}

fn predict_with(ctx: &FieldContext, fp: &FiniteParams, z: C, side: Side, discs: bool) -> Result<AsymptoticPrediction> {
    predict_in_region(ctx, fp, z, region_of(ctx, z, side, discs))
}

/// Evaluates the formula of a given region at z, which need not lie in it.
pub fn predict_in_region(ctx: &FieldContext, fp: &FiniteParams, z: C, region: RegionTag) -> Result<AsymptoticPrediction> {
    match region {
        RegionTag::Unsupported => return Err(Error::Unsupported(format!("no asymptotic formula for case {}", ctx.tag()))),
        RegionTag::AiryDisc1 | RegionTag::AiryDisc2 => return airy_predict(ctx, fp, z),
        _ => {}
    }
    let n = fp.n;
    let nf = f64::from(n);
    // Boundary values are taken from the side; off Σ the side is irrelevant
    // except on the real cut of w, where G is continuous anyway.
    let fside = match region {
        RegionTag::GammaPlusSide | RegionTag::SegmentPlusSide => Side::Plus,
        RegionTag::GammaMinusSide | RegionTag::SegmentMinusSide => Side::Minus,
        _ => Side::None,
    };
    let wside = if z.im == 0.0 && z.re <= 1.0 && fside == Side::None { Side::Plus } else { fside };
    let g = ctx.g(z, fside)?.value;
    let w = ctx.w(z, wside)?.value;
    let (n11, n12) = ctx.n_entries(z, fside)?;
    let (n11, n12) = (n11.value, n12.value);
    let lk = ctx.kappa_complex().ln();
    let gn = pow_n(g, nf) * (-lk * nf).exp();
    let gw2n = (-(g * w * w).ln() * nf - lk * nf).exp();
    // Coefficients fitted against the multiprecision engine. Each
    // sin(πα)-bearing one is d_n times e^{2πiα}.
    let e2 = C::new(1.0, 0.0) - d_n(&fp.alpha).conj();
    let dt = e2 - 1.0;
    let terms = match (ctx.tag(), region) {
        (_, RegionTag::Outer) => vec![term("(G/kappa)^n N11", gn * n11)],
        (CaseTag::C3, RegionTag::InteriorC3) | (CaseTag::C3, RegionTag::GammaMinusSide) => vec![
            term("kappa^-n (G w^2)^-n N11", gw2n * n11),
            term("(e^(2 pi i alpha) - 1) kappa^-n G^n N12", dt * gn * n12),
        ],
        (CaseTag::C3, RegionTag::GammaPlusSide) => vec![
            term("kappa^-n G^n N11", gn * n11),
            term("(e^(2 pi i alpha) - 1) kappa^-n (G w^2)^-n N12", dt * gw2n * n12),
        ],
        (_, RegionTag::GammaPlusSide) => {
            vec![term("kappa^-n G^n N11", gn * n11), term("kappa^-n (G w^2)^-n N12", gw2n * n12)]
        }
        (_, RegionTag::GammaMinusSide) => {
            vec![term("kappa^-n G^n N11", gn * n11), term("-kappa^-n (G w^2)^-n N12", -gw2n * n12)]
        }
        (_, RegionTag::SegmentPlusSide) => vec![
            term("kappa^-n G^n N11", gn * n11),
            term("e^(2 pi i alpha) kappa^-n (G w^2)^-n N12", e2 * gw2n * n12),
        ],
        (_, RegionTag::SegmentMinusSide) => {
            vec![term("kappa^-n G^n N11", gn * n11), term("-kappa^-n (G w^2)^-n N12", -gw2n * n12)]
        }
        _ => unreachable!("handled above"),
    };
    Ok(AsymptoticPrediction::from_terms(n, z, region, terms))
}

/// Airy-type prediction in the disc around ζ₂, and around ζ₁ in C.2 by
/// conjugate symmetry.
pub fn airy_predict(ctx: &FieldContext, fp: &FiniteParams, z: C) -> Result<AsymptoticPrediction> {
    let g = &ctx.geometry;
    // The closed disc, so that the boundary circle can be matched.
    let eps = g.epsilon() * (1.0 + 1e-9);
    if (z - g.bp.zeta2).norm() > eps {
        if ctx.tag() == CaseTag::C2 && (z - g.bp.zeta1).norm() <= eps {
            let mut p = airy_predict(ctx, fp, z.conj())?;
            p.z = z;
            p.value = p.value.conj();
            p.region = RegionTag::AiryDisc1;
            for t in &mut p.leading_terms {
                t.value = t.value.conj();
            }
            return Ok(p);
        }
        if ctx.tag() == CaseTag::C3 && (z - g.bp.zeta1).norm() <= eps {
            return Err(Error::Unsupported("Airy asymptotics at zeta1 in case C.3 are not implemented".into()));
        }
        return Err(Error::Domain(format!("{z} is outside the Airy disc of radius {eps}")));
    }
    let n = fp.n;
    let nf = f64::from(n);
    let f = ctx.f(z)?.value;
    let q = ctx.f_quarter_over_a(z)?;
    let w = ctx.w_edge(z)?;
    let t = f * nf.powf(2.0 / 3.0);
    let n6 = nf.powf(1.0 / 6.0);
    // log of √π/(κⁿwⁿ)
    let lpre = C::new(0.5 * PI.ln(), 0.0) - (ctx.kappa_complex().ln() + w.ln()) * nf;
    let (ai, dai, zeta) = airy::airy_ai_scaled(t);
    let mut terms = Vec::new();
    let pieces: Vec<(C, C, C, &str)> = if ctx.tag() == CaseTag::C3 {
        // 𝒜 times e^{πiα}, the normalization matching the engine.
        let (e, s) = phase_and_sine(&fp.alpha);
        let rot = C::from_polar(1.0, 4.0 * PI / 3.0);
        let mut v = vec![(ai, dai, zeta, "Ai")];
        if s != 0.0 {
            let (bi, dbi, zb) = airy::airy_ai_scaled(rot * t);
            let c = C::new(0.0, 2.0) * C::from_polar(1.0, PI / 3.0) * s * e.conj();
            v.push((c * bi, c * rot * dbi, zb, "2i e^(pi i/3) e^(pi i alpha) sin(pi alpha) Ai(e^(4 pi i/3) t)"));
        }
        v
    } else {
        vec![(ai, dai, zeta, "Ai")]
    };
    for (a, d, zz, label) in pieces {
        let scale = (lpre - zz).exp();
        terms.push(term(&format!("n^(1/6) f^(1/4)/a * {label}"), scale * a * q * n6));
        terms.push(term(&format!("-a/(n^(1/6) f^(1/4)) * ({label})'"), -scale * d / (q * n6)));
    }
    Ok(AsymptoticPrediction::from_terms(n, z, RegionTag::AiryDisc2, terms))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorScaling {
    pub degrees: Vec<u32>,
    pub errors: Vec<f64>,
    /// Fit log err ≈ log constant + slope·log n.
    pub slope: f64,
    pub constant: f64,
}

/// Least-squares fit of log|err| against log n.
pub fn fit_scaling(degrees: &[u32], errors: &[f64]) -> Result<ErrorScaling> {
    if degrees.len() < 3 || degrees.len() != errors.len() {
        return Err(Error::InvalidParameter("error scaling needs at least three degrees".into()));
    }
    if errors.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Numerical("relative errors must be positive and finite".into()));
    }
    let xs: Vec<f64> = degrees.iter().map(|&n| f64::from(n).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(ErrorScaling { degrees: degrees.to_vec(), errors: errors.to_vec(), slope, constant: (my - slope * mx).exp() })
}

/// Relative error |p_n/pred − 1| against the multiprecision engine.
pub fn relative_error(fp: &FiniteParams, z: C, side: Side) -> Result<f64> {
    let ctx = FieldContext::new(fp.ratio())?;
    let pred = predict(&ctx, fp, z, side)?;
    let exact = crate::jacobi::to_c64(&crate::jacobi::eval_monic(fp, z)?);
    Ok(((exact - pred.value) / pred.value).norm())
}

/// Fits the decay of the relative error over degrees produced by `params`
/// (for example α = An, β = Bn). Degenerate degrees are rejected.
pub fn error_scaling(
    degrees: &[u32],
    params: impl Fn(u32) -> Result<FiniteParams>,
    z: C,
    side: Side,
) -> Result<ErrorScaling> {
    let mut errs = Vec::with_capacity(degrees.len());
    for &n in degrees {
        let fp = params(n)?;
        if crate::params::reduce_degenerate(&fp).is_degenerate() {
            return Err(Error::Degenerate(format!("degree {n} has degenerate parameters {fp}")));
        }
        errs.push(relative_error(&fp, z, side)?);
    }
    fit_scaling(degrees, &errs)
}
