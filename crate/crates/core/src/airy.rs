//! Airy function Ai and its derivative for complex arguments.
//!
//! Small |z| uses the Maclaurin series in multiprecision (the series
//! cancels badly in double precision), large |z| the asymptotic expansion
//! in the sector |arg z| ≤ 2π/3 and the connection formula elsewhere.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Complex, Float};

const SERIES_RADIUS: f64 = 10.0;

fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// (Ai(z), Ai'(z)).
pub fn airy_ai(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= SERIES_RADIUS {
        return maclaurin(z);
    }
    if z.arg().abs() <= 2.0 * PI / 3.0 {
        let (a, d, zeta) = asymptotic_scaled(z);
        let e = (-zeta).exp();
        return (a * e, d * e);
    }
    // Ai(z) = −ωAi(ωz) − ω²Ai(ω²z), Ai'(z) = −ω²Ai'(ωz) − ωAi'(ω²z)
    let w = omega();
    let w2 = w * w;
    let (a1, d1) = airy_ai(w * z);
    let (a2, d2) = airy_ai(w2 * z);
    (-w * a1 - w2 * a2, -w2 * d1 - w * d2)
}

/// (Ai(z)e^{ζ}, Ai'(z)e^{ζ}, ζ) with ζ = (2/3)z^{3/2} on the principal branch.
pub fn airy_ai_scaled(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    if z.norm() > SERIES_RADIUS && z.arg().abs() <= 2.0 * PI / 3.0 {
        return asymptotic_scaled(z);
    }
    let (a, d) = airy_ai(z);
    let e = zeta.exp();
    (a * e, d * e, zeta)
}

fn asymptotic_scaled(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let zeta = z.powf(1.5) * (2.0 / 3.0);
    let q = z.powf(0.25);
    let mut u = 1.0f64;
    let mut sa = Complex64::new(1.0, 0.0);
    let mut sd = Complex64::new(1.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        pw = pw / (-zeta);
        let ta = pw * u;
        let size = ta.norm();
        // Stop at the smallest term of the divergent series.
        if size > prev {
            break;
        }
        sa += ta;
        sd += pw * v;
        prev = size;
        if size < 1e-17 * sa.norm() {
            break;
        }
    }
    let c = 1.0 / (2.0 * PI.sqrt());
    (sa * c / q, -sd * c * q, zeta)
}

fn maclaurin(z: Complex64) -> (Complex64, Complex64) {
    let r = z.norm();
    let prec = 64 + (3.0 * r.powf(1.5)) as u32 + 64;
    let zc = Complex::with_val(prec, (z.re, z.im));
    let z3 = Complex::with_val(prec, &zc * &zc) * &zc;
    let one = Complex::with_val(prec, 1);
    // f = Σ a_k z^{3k}, g = Σ b_k z^{3k+1} and their derivatives.
    let mut tf = one.clone();
    let mut tg = zc.clone();
    let mut tdf = Complex::with_val(prec, &zc * &zc) / 2u32;
    let mut tdg = one.clone();
    let mut f = tf.clone();
    let mut g = tg.clone();
    let mut df = tdf.clone();
    let mut dg = tdg.clone();
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    let mut k: u32 = 1;
    loop {
        let kk = 3 * k;
        tf = tf * &z3 / (kk * (kk - 1));
        tg = tg * &z3 / ((kk + 1) * kk);
        if k >= 2 {
            tdf = tdf * &z3 / ((kk - 3) * (kk - 1));
        }
        tdg = tdg * &z3 / (kk * (kk - 2));
        f += &tf;
        g += &tg;
        if k >= 2 {
            df += &tdf;
        }
        dg += &tdg;
        let size = Float::with_val(prec, tf.abs_ref()) + Float::with_val(prec, tg.abs_ref());
        if k > 3 && size < tiny {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    let third = Float::with_val(prec, 1) / 3u32;
    let two_thirds = Float::with_val(prec, 2) / 3u32;
    let three = Float::with_val(prec, 3);
    // c1 = 3^{−2/3}/Γ(2/3), c2 = 3^{−1/3}/Γ(1/3)
    let c1 = Float::with_val(prec, three.clone().pow(-two_thirds.clone())) / two_thirds.gamma();
    let c2 = Float::with_val(prec, three.pow(-third.clone())) / third.gamma();
    let ai = Complex::with_val(prec, &f * &c1) - Complex::with_val(prec, &g * &c2);
    let dai = Complex::with_val(prec, &df * &c1) - Complex::with_val(prec, &dg * &c2);
    (to_c64(&ai), to_c64(&dai))
}

fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}
