#![allow(dead_code)]

use jacobi_rh::fields::FieldContext;
use jacobi_rh::params::ParamPair;
use num_complex::Complex64;
use rug::{Complex, Float};

pub type C = Complex64;

pub const PREC: u32 = 256;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn mp(z: C) -> Complex {
    Complex::with_val(PREC, (z.re, z.im))
}

pub fn ctx(a: f64, b: f64) -> FieldContext {
    FieldContext::new(ParamPair::new(a, b).unwrap()).unwrap()
}

pub fn rel(x: C, y: C) -> f64 {
    (x / y - 1.0).norm()
}

pub fn rel_mp(a: &Complex, b: &Complex) -> f64 {
    let d = Complex::with_val(a.prec().0, a - b);
    let num = Float::with_val(PREC, d.abs_ref()).to_f64();
    let den = Float::with_val(PREC, b.abs_ref()).to_f64().max(1e-300);
    num / den
}

/// P_n^{(α,β)}(z) from the hypergeometric form
/// Σ_k (−n)_k (n+α+β+1)_k / (k! n!) · Π_{j=k+1}^{n}(j+α) · ((1−z)/2)^k,
/// which stays finite for every real α and β.
pub fn hyp_jacobi(n: u32, alpha: &Float, beta: &Float, z: &Complex) -> Complex {
    let prec = z.prec().0;
    let x = Complex::with_val(prec, 1 - z.clone()) / 2u32;
    let s = Float::with_val(prec, alpha + beta) + (n + 1);
    let mut acc = Complex::with_val(prec, 0);
    let mut xk = Complex::with_val(prec, 1);
    for k in 0..=n {
        let mut coef = Float::with_val(prec, 1);
        for j in 0..k {
            coef *= Float::with_val(prec, -f64::from(n) + f64::from(j));
            coef *= Float::with_val(prec, &s + j);
            coef /= j + 1;
        }
        for j in k + 1..=n {
            coef *= Float::with_val(prec, alpha + j);
        }
        for j in 1..=n {
            coef /= j;
        }
        acc += Complex::with_val(prec, &xk * &coef);
        xk *= &x;
    }
    acc
}

pub fn hyp_f64(n: u32, alpha: f64, beta: f64, z: C) -> Complex {
    hyp_jacobi(n, &Float::with_val(PREC, alpha), &Float::with_val(PREC, beta), &mp(z))
}
