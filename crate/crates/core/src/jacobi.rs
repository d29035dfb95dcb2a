//! Multiprecision evaluation of P_n^{(α,β)}, monic power-basis coefficients
//! and simultaneous root finding.

use num_complex::Complex64;
use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{self, FiniteParams, Reduction};

/// Working precision for degree `n` and parameters of size `max(|α|,|β|)`.
pub fn precision_bits(n: u32, alpha: f64, beta: f64) -> u32 {
    let n = f64::from(n.max(1));
    let m = alpha.abs().max(beta.abs());
    let bits = 3.5 * n + 2.0 * n * (1.0 + m / n).log2();
    (bits.ceil() as u32).max(256)
}

/// [`precision_bits`] plus a margin for parameters just off a negative
/// integer in [−n,−1]: the nearly split-off factor (z∓1)^k makes the
/// power-basis evaluation cancel about 4·log₂(1/dist) bits near ±1.
pub fn precision_for(fp: &FiniteParams) -> u32 {
    let base = precision_bits(fp.n, fp.alpha_f64(), fp.beta_f64());
    let n = f64::from(fp.n);
    let margin = |x: &Float| -> u32 {
        let xf = x.to_f64();
        if !(xf < 0.0 && xf > -n - 1.0) {
            return 0;
        }
        let d = Float::with_val(x.prec(), x - Float::with_val(x.prec(), x.round_ref())).abs();
        if d.is_zero() {
            return 0;
        }
        let bits = -d.log2().to_f64();
        if bits > 0.0 {
            (4.0 * bits).ceil().min(4096.0) as u32
        } else {
            0
        }
    };
    base + margin(&fp.alpha) + margin(&fp.beta)
}

/// Binomials C(n+α, n−k) and C(n+β, k) for k = 0..=n.
fn sum_weights(n: u32, alpha: &Float, beta: &Float, prec: u32) -> Vec<Float> {
    let na = Float::with_val(prec, alpha + n);
    let nb = Float::with_val(prec, beta + n);
    // ca[m] = C(n+α, m)
    let mut ca = Vec::with_capacity(n as usize + 1);
    let mut cb = Vec::with_capacity(n as usize + 1);
    ca.push(Float::with_val(prec, 1));
    cb.push(Float::with_val(prec, 1));
    for m in 1..=n {
        let next = Float::with_val(prec, &ca[m as usize - 1] * Float::with_val(prec, &na - (m - 1))) / m;
        ca.push(next);
        let next = Float::with_val(prec, &cb[m as usize - 1] * Float::with_val(prec, &nb - (m - 1))) / m;
        cb.push(next);
    }
    (0..=n as usize).map(|k| Float::with_val(prec, &ca[n as usize - k] * &cb[k])).collect()
}

/// P_n^{(α,β)}(z) by the explicit binomial sum, at the precision of `z`.
pub fn direct_sum(n: u32, alpha: &Float, beta: &Float, z: &Complex) -> Complex {
    let prec = z.prec().0;
    if n == 0 {
        return Complex::with_val(prec, 1);
    }
    let weights = sum_weights(n, alpha, beta, prec);
    let zm = Complex::with_val(prec, z - 1u32);
    let zp = Complex::with_val(prec, z + 1u32);
    // Horner in t = (z−1)/(z+1) would divide by zero at z=−1; use powers.
    let mut pm = vec![Complex::with_val(prec, 1)];
    let mut pp = vec![Complex::with_val(prec, 1)];
    for k in 1..=n as usize {
        pm.push(Complex::with_val(prec, &pm[k - 1] * &zm));
        pp.push(Complex::with_val(prec, &pp[k - 1] * &zp));
    }
    let mut acc = Complex::with_val(prec, 0);
    for k in 0..=n as usize {
        let term = Complex::with_val(prec, &pm[k] * &pp[n as usize - k]) * &weights[k];
        acc += term;
    }
    acc >> n
}

/// Non-monic value P_n^{(α,β)}(z) at the policy precision.
pub fn eval_jacobi(fp: &FiniteParams, z: Complex64) -> Complex {
    let prec = precision_for(fp);
    direct_sum(fp.n, &fp.alpha, &fp.beta, &Complex::with_val(prec, (z.re, z.im)))
}

/// 2^{−n} C(2n+α+β, n), the coefficient of z^n.
pub fn leading_coefficient(n: u32, alpha: &Float, beta: &Float, prec: u32) -> Float {
    let top = Float::with_val(prec, Float::with_val(prec, alpha + beta) + 2 * n);
    let mut c = params::falling(&top, n);
    for j in 2..=n {
        c /= j;
    }
    c >> n
}

/// Monic power-basis form of P_n^{(α,β)}.
#[derive(Clone, Debug)]
pub struct PolySpec {
    pub n: u32,
    pub alpha: Float,
    pub beta: Float,
    /// Ascending powers; `monic_coeffs[n] == 1`.
    pub monic_coeffs: Vec<Float>,
    /// Coefficient of z^n in P_n, so that P_n = leading · p_n.
    pub leading: Float,
    pub precision_bits: u32,
}

impl PolySpec {
    pub fn params(&self) -> FiniteParams {
        FiniteParams { n: self.n, alpha: self.alpha.clone(), beta: self.beta.clone() }
    }
}

pub fn build_poly(fp: &FiniteParams, precision_bits: u32) -> Result<PolySpec> {
    if let Reduction::IdenticallyZero { reason } = params::reduce_degenerate(fp) {
        return Err(Error::Degenerate(format!("P_n vanishes identically ({reason})")));
    }
    let n = fp.n;
    let prec = precision_bits;
    let leading = leading_coefficient(n, &fp.alpha, &fp.beta, prec);
    if leading.is_zero() {
        return Err(Error::Degenerate(format!(
            "degree drops below {n} for {fp}; use reduce_degenerate for the reduced polynomial"
        )));
    }
    let weights = sum_weights(n, &fp.alpha, &fp.beta, prec);
    // Q_j = (z+1) Q_{j−1} + a_j (z−1)^j gives Σ a_k (z−1)^k (z+1)^{n−k} at j = n.
    let nn = n as usize;
    let mut q: Vec<Float> = vec![weights[0].clone()];
    let mut zm: Vec<Float> = vec![Float::with_val(prec, 1)];
    for j in 1..=nn {
        let mut next = vec![Float::with_val(prec, 0); j + 1];
        for (i, c) in q.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c;
        }
        let mut zm_next = vec![Float::with_val(prec, 0); j + 1];
        for (i, c) in zm.iter().enumerate() {
            zm_next[i] -= c;
            zm_next[i + 1] += c;
        }
        zm = zm_next;
        for (slot, c) in next.iter_mut().zip(zm.iter()) {
            *slot += Float::with_val(prec, c * &weights[j]);
        }
        q = next;
    }
    let scale = Float::with_val(prec, &leading << n);
    let mut monic: Vec<Float> = q.into_iter().map(|c| c / &scale).collect();
    monic[nn] = Float::with_val(prec, 1);
    Ok(PolySpec {
        n,
        alpha: fp.alpha.clone(),
        beta: fp.beta.clone(),
        monic_coeffs: monic,
        leading,
        precision_bits: prec,
    })
}

/// Horner evaluation of the monic polynomial.
pub fn eval_poly(spec: &PolySpec, z: &Complex) -> Complex {
    let prec = spec.precision_bits;
    let mut acc = Complex::with_val(prec, 0);
    for c in spec.monic_coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

/// Value and first derivative of the monic polynomial.
pub fn eval_poly_deriv(spec: &PolySpec, z: &Complex) -> (Complex, Complex) {
    let prec = spec.precision_bits;
    let mut p = Complex::with_val(prec, 0);
    let mut dp = Complex::with_val(prec, 0);
    for c in spec.monic_coeffs.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += c;
    }
    (p, dp)
}

/// Monic value p_n(z) = P_n(z)/leading, via the explicit sum (no power basis).
pub fn eval_monic(fp: &FiniteParams, z: Complex64) -> Result<Complex> {
    let prec = precision_for(fp);
    let leading = leading_coefficient(fp.n, &fp.alpha, &fp.beta, prec);
    if leading.is_zero() {
        return Err(Error::Degenerate(format!("leading coefficient vanishes for {fp}")));
    }
    let v = direct_sum(fp.n, &fp.alpha, &fp.beta, &Complex::with_val(prec, (z.re, z.im)));
    Ok(v / leading)
}

pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Computed zeros of the monic polynomial.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub n: u32,
    pub alpha: Float,
    pub beta: Float,
    pub zeros_mp: Vec<Complex>,
    /// Max over zeros of |p(z)| / Σ|c_k||z|^k.
    pub residual: f64,
    pub precision_bits: u32,
    pub iterations: usize,
}

impl ZeroSet {
    pub fn zeros(&self) -> Vec<Complex64> {
        self.zeros_mp.iter().map(to_c64).collect()
    }

    /// The residual bound enforced by [`find_zeros`]: 10^{−digits/2}.
    pub fn residual_bound(&self) -> f64 {
        let digits = f64::from(self.precision_bits) * std::f64::consts::LOG10_2;
        10f64.powf(-digits / 2.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RootDiagnostic {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub last_step: f64,
}

fn scaled_residual(spec: &PolySpec, z: &Complex) -> Float {
    let prec = spec.precision_bits;
    let p = eval_poly(spec, z);
    let r = abs(z);
    let mut bound = Float::with_val(prec, 0);
    for c in spec.monic_coeffs.iter().rev() {
        bound *= &r;
        bound += Float::with_val(prec, c.abs_ref());
    }
    abs(&p) / bound
}

/// Roots by Aberth–Ehrlich iteration from contour-informed seeds.
pub fn find_zeros(spec: &PolySpec) -> Result<ZeroSet> {
    let seeds = crate::geometry::zero_seeds(&spec.params());
    find_zeros_from(spec, &seeds)
}

pub fn find_zeros_from(spec: &PolySpec, seeds: &[Complex64]) -> Result<ZeroSet> {
    let n = spec.n as usize;
    if seeds.len() != n {
        return Err(Error::InvalidParameter(format!("need {n} seeds, got {}", seeds.len())));
    }
    let prec = spec.precision_bits;
    // Nudge seeds off the real axis and apart so that conjugate pairs can form.
    let mut z: Vec<Complex> = seeds
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let t = 2.399_963 * j as f64;
            let s = s + Complex64::from_polar(1e-3 * (1.0 + s.norm()), t);
            Complex::with_val(prec, (s.re, s.im))
        })
        .collect();
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 2 + 16) as i32)));
    let max_iter = 400 + 4 * n;
    let mut last = vec![Float::with_val(prec, 1); n];
    let mut converged = vec![false; n];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = eval_poly_deriv(spec, &z[i]);
            if p.real().is_zero() && p.imag().is_zero() {
                converged[i] = true;
                last[i] = Float::with_val(prec, 0);
                continue;
            }
            let ratio = Complex::with_val(prec, &p / &dp);
            let mut s = Complex::with_val(prec, 0);
            for j in 0..n {
                if j != i {
                    let d = Complex::with_val(prec, &z[i] - &z[j]);
                    s += d.recip();
                }
            }
            let denom = Complex::with_val(prec, 1 - Complex::with_val(prec, &ratio * &s));
            let step = if denom.real().is_zero() && denom.imag().is_zero() { ratio } else { ratio / denom };
            let size = abs(&step);
            let scale = Float::with_val(prec, abs(&z[i]) + 1u32);
            z[i] -= &step;
            if size.is_finite() && Float::with_val(prec, &size / &scale) < tol {
                converged[i] = true;
            }
            last[i] = size;
        }
        if converged.iter().all(|&c| c) {
            break;
        }
    }
    if !converged.iter().all(|&c| c) {
        let diags: Vec<RootDiagnostic> = (0..n)
            .filter(|&i| !converged[i])
            .map(|i| {
                let c = to_c64(&z[i]);
                RootDiagnostic { index: i, re: c.re, im: c.im, last_step: last[i].to_f64() }
            })
            .collect();
        let json = serde_json::to_string(&diags).unwrap_or_default();
        return Err(Error::Numerical(format!(
            "Aberth iteration did not converge in {max_iter} sweeps; unconverged roots: {json}"
        )));
    }
    // Newton polish.
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval_poly_deriv(spec, zi);
            if dp.real().is_zero() && dp.imag().is_zero() {
                break;
            }
            *zi -= p / dp;
        }
    }
    let mut residual = Float::with_val(prec, 0);
    for zi in &z {
        let r = scaled_residual(spec, zi);
        if r > residual {
            residual = r;
        }
    }
    let out = ZeroSet {
        n: spec.n,
        alpha: spec.alpha.clone(),
        beta: spec.beta.clone(),
        zeros_mp: z,
        residual: residual.to_f64(),
        precision_bits: prec,
        iterations,
    };
    if out.residual > out.residual_bound() {
        return Err(Error::Numerical(format!(
            "zero residual {:e} exceeds bound {:e}",
            out.residual,
            out.residual_bound()
        )));
    }
    Ok(out)
}

/// Normalized zero counting measure.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<Complex64>,
    pub weight: f64,
}

impl EmpiricalMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weight * self.atoms.len() as f64
    }

    /// Mass carried by atoms satisfying `pred`.
    pub fn mass_where(&self, pred: impl Fn(Complex64) -> bool) -> f64 {
        self.atoms.iter().filter(|&&z| pred(z)).count() as f64 * self.weight
    }
}

pub fn counting_measure(zs: &ZeroSet) -> EmpiricalMeasure {
    let atoms = zs.zeros();
    let weight = 1.0 / atoms.len() as f64;
    EmpiricalMeasure { atoms, weight }
}
