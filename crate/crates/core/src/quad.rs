//! Gauss–Legendre rules and adaptive quadrature along straight chords.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_m from the Chebyshev-like initial guesses.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..(m + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if m == 1 { x } else { p1 };
                let pm1 = if m == 1 { 1.0 } else { p0 };
                dp = mf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            if m == 1 {
                dp = 1.0;
            }
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// ∫_a^b f for a real integrand.
    pub fn real(&self, f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
    }

    /// ∫ f(t) dt along the straight chord from a to b.
    pub fn chord(&self, f: &mut impl FnMut(Complex64) -> Complex64, a: Complex64, b: Complex64) -> Complex64 {
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(c + h * x) * *w).sum::<Complex64>() * h
    }
}

/// Shared 20-point rule.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

const MAX_DEPTH: u32 = 40;

/// Adaptive ∫_a^b f with absolute tolerance `tol`.
pub fn adaptive_real(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let rule = gl20();
    let whole = rule.real(&mut f, a, b);
    real_rec(rule, &mut f, a, b, whole, tol, 0)
}

fn real_rec(
    rule: &GaussLegendre,
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = (a + b) / 2.0;
    let left = rule.real(f, a, m);
    let right = rule.real(f, m, b);
    let both = left + right;
    if !both.is_finite() {
        return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
    }
    if (both - whole).abs() <= tol || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && (both - whole).abs() > tol {
            return Err(Error::Numerical(format!("quadrature did not converge on [{a}, {b}]")));
        }
        return Ok(both);
    }
    Ok(real_rec(rule, f, a, m, left, tol / 2.0, depth + 1)? + real_rec(rule, f, m, b, right, tol / 2.0, depth + 1)?)
}

/// Adaptive ∫ f(t) dt along the chord a→b.
pub fn adaptive_chord(
    mut f: impl FnMut(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let rule = gl20();
    let whole = rule.chord(&mut f, a, b);
    chord_rec(rule, &mut f, a, b, whole, tol, 0)
}

fn chord_rec(
    rule: &GaussLegendre,
    f: &mut impl FnMut(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    let m = (a + b) / 2.0;
    let left = rule.chord(f, a, m);
    let right = rule.chord(f, m, b);
    let both = left + right;
    if !(both.re.is_finite() && both.im.is_finite()) {
        return Err(Error::Numerical(format!("non-finite integrand on chord {a} -> {b}")));
    }
    if (both - whole).norm() <= tol || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && (both - whole).norm() > tol {
            return Err(Error::Numerical(format!("quadrature did not converge on chord {a} -> {b}")));
        }
        return Ok(both);
    }
    Ok(chord_rec(rule, f, a, m, left, tol / 2.0, depth + 1)?
        + chord_rec(rule, f, m, b, right, tol / 2.0, depth + 1)?)
}

/// Sum of adaptive chord integrals along a polyline.
pub fn adaptive_path(
    mut f: impl FnMut(Complex64) -> Complex64,
    path: &[Complex64],
    tol: f64,
) -> Result<Complex64> {
    let legs = path.len().saturating_sub(1).max(1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for w in path.windows(2) {
        acc += adaptive_chord(&mut f, w[0], w[1], tol / legs)?;
    }
    Ok(acc)
}

/// Adaptive ∫_a^b g(s) ds for a complex integrand of a real variable.
pub fn adaptive_param(mut g: impl FnMut(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let mut h = |z: Complex64| g(z.re);
    adaptive_chord(&mut h, Complex64::new(a, 0.0), Complex64::new(b, 0.0), tol)
}

/// ∫ f(t) dt along a→b where f has an inverse-square-root singularity at `a`:
/// substitutes t = a + (b−a)s².
pub fn chord_sqrt_start(
    mut f: impl FnMut(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let d = b - a;
    adaptive_param(|s| f(a + d * (s * s)) * d * (2.0 * s), 0.0, 1.0, tol)
}

/// Same for singularities at both ends: t = a + (b−a)(1−cos πs)/2.
pub fn chord_sqrt_both(
    mut f: impl FnMut(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<Complex64> {
    use std::f64::consts::PI;
    let d = b - a;
    adaptive_param(
        |s| {
            let t = a + d * ((1.0 - (PI * s).cos()) / 2.0);
            f(t) * d * (PI * (PI * s).sin() / 2.0)
        },
        0.0,
        1.0,
        tol,
    )
}
