//! Parameter pairs, case classification, symmetry transforms and the
//! integer-parameter reductions.

use std::fmt;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi;

/// Precision used to store finite parameters.
pub const PARAM_PREC: u32 = 256;

/// The limiting ratios A = lim α_n/n and B = lim β_n/n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl ParamPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("A={a}, B={b} must be finite")));
        }
        Ok(ParamPair { a, b })
    }

    /// `(A+B+2)/2`, the factor in front of every phase integral.
    pub fn half_total(&self) -> f64 {
        (self.a + self.b + 2.0) / 2.0
    }
}

/// Degree and parameters of one polynomial P_n^{(α,β)}.
///
/// α and β are kept in multiprecision so that offsets such as `-80 - 1e-15`
/// survive.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteParams {
    pub n: u32,
    pub alpha: Float,
    pub beta: Float,
}

impl FiniteParams {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter("alpha and beta must be finite".into()));
        }
        Self::from_floats(n, Float::with_val(PARAM_PREC, alpha), Float::with_val(PARAM_PREC, beta))
    }

    pub fn from_floats(n: u32, alpha: Float, beta: Float) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("degree n must be at least 1".into()));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter("alpha and beta must be finite".into()));
        }
        let prec = PARAM_PREC.max(alpha.prec()).max(beta.prec());
        Ok(FiniteParams { n, alpha: Float::with_val(prec, alpha), beta: Float::with_val(prec, beta) })
    }

    /// Parses decimal strings exactly to [`PARAM_PREC`] bits.
    pub fn parse(n: u32, alpha: &str, beta: &str) -> Result<Self> {
        Self::from_floats(n, parse_float(alpha)?, parse_float(beta)?)
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64()
    }

    /// `(α/n, β/n)`: the pair the asymptotic formulas are evaluated at.
    pub fn ratio(&self) -> ParamPair {
        let n = f64::from(self.n);
        ParamPair { a: (self.alpha.clone() / n).to_f64(), b: (self.beta.clone() / n).to_f64() }
    }

    fn with(&self, n: u32, alpha: Float, beta: Float) -> FiniteParams {
        FiniteParams { n, alpha, beta }
    }
}

impl fmt::Display for FiniteParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, alpha={}, beta={}", self.n, float_string(&self.alpha), float_string(&self.beta))
    }
}

/// Parses a decimal literal into a multiprecision number.
pub fn parse_float(s: &str) -> Result<Float> {
    let parsed = Float::parse(s.trim()).map_err(|e| Error::InvalidParameter(format!("{s:?}: {e}")))?;
    let x = Float::with_val(PARAM_PREC, parsed);
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{s:?} is not finite")));
    }
    Ok(x)
}

/// Shortest decimal string that still identifies the value at its precision,
/// trimmed to 30 significant digits.
pub fn float_string(x: &Float) -> String {
    let d = x.to_f64();
    if Float::with_val(x.prec(), d) == *x {
        return format!("{d}");
    }
    x.to_string_radix(10, Some(30))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    C1,
    C2,
    C3,
    C4,
    C5,
    Boundary,
    Excluded,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::C1 => "C1",
            CaseTag::C2 => "C2",
            CaseTag::C3 => "C3",
            CaseTag::C4 => "C4",
            CaseTag::C5 => "C5",
            CaseTag::Boundary => "Boundary",
            CaseTag::Excluded => "Excluded",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseClass {
    pub tag: CaseTag,
    pub detail: String,
}

/// Classifies (A,B). Boundary lines are detected by exact comparison.
pub fn classify(p: ParamPair) -> CaseClass {
    let (a, b) = (p.a, p.b);
    let s = a + b;
    let lines: [(bool, &str); 6] = [
        (a == 0.0, "A=0"),
        (b == 0.0, "B=0"),
        (a == -1.0, "A=-1"),
        (b == -1.0, "B=-1"),
        (s == -1.0, "A+B=-1"),
        (s == -2.0, "A+B=-2"),
    ];
    let on: Vec<&str> = lines.iter().filter(|(hit, _)| *hit).map(|(_, name)| *name).collect();
    if !on.is_empty() {
        return CaseClass { tag: CaseTag::Boundary, detail: on.join(", ") };
    }
    let (tag, detail) = if a > 0.0 && b > 0.0 {
        (CaseTag::C1, "A>0, B>0")
    } else if a < -1.0 && s > -1.0 {
        (CaseTag::C2, "A<-1, A+B>-1")
    } else if a > -1.0 && a < 0.0 && b > 0.0 {
        (CaseTag::C3, "-1<A<0, B>0")
    } else if a < 0.0 && b < 0.0 && s > -1.0 {
        (CaseTag::C4, "A<0, B<0, A+B>-1")
    } else if s < -1.0 && a > -1.0 && b > -1.0 {
        (CaseTag::C5, "A+B<-1, A>-1, B>-1")
    } else {
        (CaseTag::Excluded, "outside the five regions (mirror images are reached by A<->B)")
    };
    CaseClass { tag, detail: detail.to_string() }
}

/// `P_n^{(α,β)}(z) = sign · P_n^{(β,α)}(−z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflection {
    pub params: FiniteParams,
    pub sign: i32,
}

impl Reflection {
    /// The argument map z ↦ −z that accompanies the parameter swap.
    pub fn map(&self, z: Complex64) -> Complex64 {
        -z
    }

    pub fn describe(&self) -> String {
        format!("P_n^(a,b)(z) = {} * P_n^(b,a)(-z)", self.sign)
    }
}

pub fn reflect_params(fp: &FiniteParams) -> Reflection {
    let sign = if fp.n % 2 == 0 { 1 } else { -1 };
    Reflection { params: fp.with(fp.n, fp.beta.clone(), fp.alpha.clone()), sign }
}

/// `P_n^{(α,β)}(z) = ((1−z)/2)^n · P_n^{(α',β)}((z+3)/(z−1))` with
/// `α' = −2n−α−β−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mobius {
    pub params: FiniteParams,
}

impl Mobius {
    pub fn prefactor(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(1.0, 0.0) {
            return Err(Error::Domain("Mobius transform is singular at z=1".into()));
        }
        Ok(((Complex64::new(1.0, 0.0) - z) / 2.0).powi(self.params.n as i32))
    }

    pub fn map(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(1.0, 0.0) {
            return Err(Error::Domain("Mobius transform is singular at z=1".into()));
        }
        Ok((z + 3.0) / (z - 1.0))
    }

    pub fn prefactor_mp(&self, z: &Complex) -> Result<Complex> {
        check_not_one(z)?;
        let t = Complex::with_val(z.prec(), 1 - z.clone()) / 2u32;
        Ok(t.pow(self.params.n))
    }

    pub fn map_mp(&self, z: &Complex) -> Result<Complex> {
        check_not_one(z)?;
        let num = Complex::with_val(z.prec(), z + 3u32);
        let den = Complex::with_val(z.prec(), z - 1u32);
        Ok(num / den)
    }
}

fn check_not_one(z: &Complex) -> Result<()> {
    if *z.real() == 1u32 && z.imag().is_zero() {
        return Err(Error::Domain("Mobius transform is singular at z=1".into()));
    }
    Ok(())
}

pub fn mobius_transform(fp: &FiniteParams) -> Mobius {
    let prec = fp.alpha.prec();
    let alpha2 = Float::with_val(prec, -2 * i64::from(fp.n) - 1) - fp.alpha.clone() - fp.beta.clone();
    Mobius { params: fp.with(fp.n, alpha2, fp.beta.clone()) }
}

/// Exact reductions available for integer parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Reduction {
    NotDegenerate,
    /// P_n is the zero polynomial.
    IdenticallyZero { reason: String },
    /// α = −k: `P_n = constant · ((z−1)/2)^k · P_{n−k}^{(k,β)}`.
    AlphaInteger { k: u32, constant: Float, reduced: FiniteParams },
    /// β = −l: `P_n = constant · ((z+1)/2)^l · P_{n−l}^{(α,l)}`.
    BetaInteger { l: u32, constant: Float, reduced: FiniteParams },
    /// α = −k, β = −l, k+l ≤ n: `P_n = 2^{−k−l}(z−1)^k(z+1)^l P_{n−k−l}^{(k,l)}`.
    BothIntegers { k: u32, l: u32, reduced: FiniteParams },
    /// n+α+β = −k: `P_n = constant · P_{k−1}^{(α,β)}`, a drop in degree.
    DegreeDrop { k: u32, constant: Float, reduced: FiniteParams },
}

impl Reduction {
    pub fn is_degenerate(&self) -> bool {
        !matches!(self, Reduction::NotDegenerate)
    }

    /// Evaluates the reduced right-hand side at `z` (None when not degenerate).
    pub fn evaluate(&self, z: &Complex) -> Option<Complex> {
        let prec = z.prec().0;
        let one = |x: u32| Complex::with_val(prec, x);
        match self {
            Reduction::NotDegenerate => None,
            Reduction::IdenticallyZero { .. } => Some(one(0)),
            Reduction::AlphaInteger { k, constant, reduced } => {
                let base = Complex::with_val(prec, z - 1u32) / 2u32;
                let p = reduced_value(reduced, z);
                Some(base.pow(*k) * p * constant)
            }
            Reduction::BetaInteger { l, constant, reduced } => {
                let base = Complex::with_val(prec, z + 1u32) / 2u32;
                let p = reduced_value(reduced, z);
                Some(base.pow(*l) * p * constant)
            }
            Reduction::BothIntegers { k, l, reduced } => {
                let zm = Complex::with_val(prec, z - 1u32) / 2u32;
                let zp = Complex::with_val(prec, z + 1u32) / 2u32;
                let p = reduced_value(reduced, z);
                Some(zm.pow(*k) * zp.pow(*l) * p)
            }
            Reduction::DegreeDrop { constant, reduced, .. } => Some(reduced_value(reduced, z) * constant),
        }
    }
}

fn reduced_value(fp: &FiniteParams, z: &Complex) -> Complex {
    jacobi::direct_sum(fp.n, &fp.alpha, &fp.beta, z)
}

/// Returns k when x = −k for some k in 1..=n.
fn negative_integer_up_to(x: &Float, n: u32) -> Option<u32> {
    if !x.is_integer() || *x >= 0 {
        return None;
    }
    let k = (-x.clone()).to_f64();
    (k <= f64::from(n)).then_some(k as u32)
}

/// Product x(x−1)…(x−m+1).
pub(crate) fn falling(x: &Float, m: u32) -> Float {
    let mut acc = Float::with_val(x.prec(), 1);
    for j in 0..m {
        acc *= Float::with_val(x.prec(), x - j);
    }
    acc
}

fn factorial_ratio(num: u32, den: u32, prec: u32) -> Float {
    // num!/den!
    let mut acc = Float::with_val(prec, 1);
    if num >= den {
        for j in den + 1..=num {
            acc *= j;
        }
    } else {
        for j in num + 1..=den {
            acc /= j;
        }
    }
    acc
}

/// Detects the integer-parameter reductions.
pub fn reduce_degenerate(fp: &FiniteParams) -> Reduction {
    let n = fp.n;
    let prec = fp.alpha.prec().max(fp.beta.prec());
    let ka = negative_integer_up_to(&fp.alpha, n);
    let lb = negative_integer_up_to(&fp.beta, n);

    if let (Some(k), Some(l)) = (ka, lb) {
        if k + l <= n {
            let reduced = fp.with(n - k - l, Float::with_val(prec, k), Float::with_val(prec, l));
            return Reduction::BothIntegers { k, l, reduced };
        }
    }
    if let Some(k) = ka {
        // Γ(n+β+1)/Γ(n+β+1−k) = (n+β)(n+β−1)…(n+β−k+1)
        let top = Float::with_val(prec, &fp.beta + n);
        let constant = falling(&top, k) * factorial_ratio(n - k, n, prec);
        if constant.is_zero() {
            return Reduction::IdenticallyZero {
                reason: format!("alpha=-{k} and beta integer with max(k,-beta) <= n <= k-beta-1"),
            };
        }
        let reduced = fp.with(n - k, Float::with_val(prec, k), fp.beta.clone());
        return Reduction::AlphaInteger { k, constant, reduced };
    }
    if let Some(l) = lb {
        let top = Float::with_val(prec, &fp.alpha + n);
        let constant = falling(&top, l) * factorial_ratio(n - l, n, prec);
        if constant.is_zero() {
            return Reduction::IdenticallyZero {
                reason: format!("beta=-{l} and alpha integer with max(l,-alpha) <= n <= l-alpha-1"),
            };
        }
        let reduced = fp.with(n - l, fp.alpha.clone(), Float::with_val(prec, l));
        return Reduction::BetaInteger { l, constant, reduced };
    }
    let total = Float::with_val(prec, &fp.alpha + &fp.beta) + n;
    if let Some(k) = negative_integer_up_to(&total, n) {
        // Γ(n+α+1)/Γ(k+α) = (k+α)(k+α+1)…(n+α), then ·(k−1)!/n!
        let mut constant = Float::with_val(prec, 1);
        for j in k..=n {
            constant *= Float::with_val(prec, &fp.alpha + j);
        }
        constant *= factorial_ratio(k - 1, n, prec);
        let reduced = fp.with(k - 1, fp.alpha.clone(), fp.beta.clone());
        return Reduction::DegreeDrop { k, constant, reduced };
    }
    Reduction::NotDegenerate
}
