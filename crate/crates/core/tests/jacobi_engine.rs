use jacobi_rh::jacobi::{self, build_poly, counting_measure, eval_poly, find_zeros, find_zeros_from};
use jacobi_rh::params::FiniteParams;
use num_complex::Complex64;
use proptest::prelude::*;
use rug::{Complex, Float};

const PREC: u32 = 256;

fn c(re: f64, im: f64) -> Complex {
    Complex::with_val(PREC, (re, im))
}

fn rel(a: &Complex, b: &Complex) -> f64 {
    let d = Complex::with_val(PREC, a - b);
    let num = Float::with_val(PREC, d.abs_ref()).to_f64();
    let den = Float::with_val(PREC, b.abs_ref()).to_f64().max(1e-300);
    num / den
}

/// 1/(2^n n!) Σ_j C(n,j) [n+α]_j [n+β]_{n−j} (z−1)^{n−j} (z+1)^j, from the
/// Leibniz rule applied to the Rodrigues derivative.
fn rodrigues(n: u32, alpha: f64, beta: f64, z: &Complex) -> Complex {
    let falling = |x: f64, m: u32| {
        let x = Float::with_val(PREC, x) + n;
        (0..m).fold(Float::with_val(PREC, 1), |acc, j| acc * Float::with_val(PREC, &x - j))
    };
    let mut acc = Complex::with_val(PREC, 0);
    let mut binom = Float::with_val(PREC, 1);
    for j in 0..=n {
        if j > 0 {
            binom = binom * (n - j + 1) / j;
        }
        let zm = Complex::with_val(PREC, z - 1u32);
        let zp = Complex::with_val(PREC, z + 1u32);
        let zm = if n - j > 0 { zm.pow_ref_u(n - j) } else { c(1.0, 0.0) };
        let zp = if j > 0 { zp.pow_ref_u(j) } else { c(1.0, 0.0) };
        let coef = Float::with_val(PREC, &binom * falling(alpha, j)) * falling(beta, n - j);
        acc += zm * zp * coef;
    }
    let mut fact = Float::with_val(PREC, 1);
    for j in 2..=n {
        fact *= j;
    }
    acc / fact >> n
}

trait PowU {
    fn pow_ref_u(&self, e: u32) -> Complex;
}

impl PowU for Complex {
    fn pow_ref_u(&self, e: u32) -> Complex {
        let mut out = Complex::with_val(PREC, 1);
        for _ in 0..e {
            out *= self;
        }
        out
    }
}

/// Classical three-term recurrence in n.
fn recurrence(n: u32, a: f64, b: f64, z: &Complex) -> Complex {
    let f = |x: f64| Float::with_val(PREC, x);
    let (a, b) = (f(a), f(b));
    let ab = Float::with_val(PREC, &a + &b);
    let mut p0 = c(1.0, 0.0);
    let mut p1 = (Complex::with_val(PREC, z * Float::with_val(PREC, &ab + 2u32)) + Float::with_val(PREC, &a - &b)) / 2u32;
    if n == 0 {
        return p0;
    }
    let sq = Float::with_val(PREC, Float::with_val(PREC, a.square_ref()) - Float::with_val(PREC, b.square_ref()));
    for k in 2..=n {
        let s = Float::with_val(PREC, &ab + 2 * k);
        let c0 = Float::with_val(PREC, &ab + k) * (2 * k) * Float::with_val(PREC, &s - 2u32);
        let c1 = Complex::with_val(PREC, z * Float::with_val(PREC, &s * Float::with_val(PREC, &s - 2u32))) + &sq;
        let c1 = c1 * Float::with_val(PREC, &s - 1u32);
        let c2 = Float::with_val(PREC, &a + (k - 1)) * Float::with_val(PREC, &b + (k - 1)) * 2u32 * &s;
        let p2 = (Complex::with_val(PREC, &c1 * &p1) - Complex::with_val(PREC, &p0 * &c2)) / c0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[test]
fn degree_one_closed_form() {
    let fp = FiniteParams::new(1, 0.7, -0.2).unwrap();
    let z = c(0.4, -1.3);
    let want = (Complex::with_val(PREC, &z * 2.5) + 0.9) / 2u32;
    assert!(rel(&jacobi::direct_sum(1, &fp.alpha, &fp.beta, &z), &want) < 1e-15);
    let spec = build_poly(&fp, PREC).unwrap();
    let root = (-0.2 - 0.7) / (0.7 - 0.2 + 2.0);
    assert!((spec.monic_coeffs[0].to_f64() + root).abs() < 1e-15);
}

#[test]
fn value_at_one_is_binomial() {
    let fp = FiniteParams::new(3, 0.5, 1.7).unwrap();
    let v = jacobi::direct_sum(3, &fp.alpha, &fp.beta, &c(1.0, 0.0));
    // C(3.5, 3) = 3.5·2.5·1.5/6
    assert!((v.real().to_f64() - 2.1875).abs() < 1e-15);
    let spec = build_poly(&fp, PREC).unwrap();
    let monic_at_one = eval_poly(&spec, &c(1.0, 0.0)) * &spec.leading;
    assert!((monic_at_one.real().to_f64() - 2.1875).abs() < 1e-14);
}

#[test]
fn rodrigues_matches_sum() {
    let z = c(0.7, 0.0);
    let fp = FiniteParams::new(2, 0.3, -0.4).unwrap();
    let sum = jacobi::direct_sum(2, &fp.alpha, &fp.beta, &z);
    assert!(rel(&sum, &rodrigues(2, 0.3, -0.4, &z)) < 1e-25);
}

#[test]
fn recurrence_matches_horner_classical() {
    let fp = FiniteParams::new(20, 0.3, 0.4).unwrap();
    let spec = build_poly(&fp, PREC).unwrap();
    for k in 0..10 {
        let t = f64::from(k);
        let z = c(-1.2 + 0.25 * t, 0.3 * (t * 1.7).sin());
        let horner = eval_poly(&spec, &z) * &spec.leading;
        assert!(rel(&horner, &recurrence(20, 0.3, 0.4, &z)) < 1e-20, "z = {z}");
    }
}

#[test]
fn degenerate_zeros_small() {
    let fp = FiniteParams::new(2, -1.0, 0.0).unwrap();
    let spec = build_poly(&fp, PREC).unwrap();
    let mut zs = find_zeros(&spec).unwrap().zeros();
    zs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    assert!((zs[0] - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-30);
    assert!((zs[1] - Complex64::new(1.0, 0.0)).norm() < 1e-30);

    let fp = FiniteParams::new(1, 0.0, 0.0).unwrap();
    let zs = find_zeros(&build_poly(&fp, PREC).unwrap()).unwrap();
    assert!(zs.zeros()[0].norm() < 1e-30);
    let m = counting_measure(&zs);
    assert_eq!(m.total_mass(), 1.0);
}

#[test]
fn degree_drop_is_rejected() {
    // n+α+β = −1 makes the leading coefficient C(n−1, n) = 0.
    let fp = FiniteParams::new(3, -2.5, -1.5).unwrap();
    assert!(matches!(build_poly(&fp, PREC), Err(jacobi_rh::Error::Degenerate(_))));
}

#[test]
fn classical_zeros_are_real_and_inside() {
    let fp = FiniteParams::new(12, 0.5, 0.5).unwrap();
    let zs = find_zeros(&build_poly(&fp, PREC).unwrap()).unwrap();
    for z in zs.zeros() {
        assert!(z.im.abs() < 1e-30 && z.re.abs() < 1.0, "{z}");
    }
    assert!(zs.residual <= zs.residual_bound());
}

#[test]
fn reflected_parameters_negate_zeros() {
    let a = FiniteParams::new(15, -9.3, 4.1).unwrap();
    let b = FiniteParams::new(15, 4.1, -9.3).unwrap();
    let za = find_zeros(&build_poly(&a, PREC).unwrap()).unwrap();
    let zb = find_zeros(&build_poly(&b, PREC).unwrap()).unwrap();
    for z in &za.zeros_mp {
        let neg = Complex::with_val(PREC, -z);
        let best = zb
            .zeros_mp
            .iter()
            .map(|w| Float::with_val(PREC, Complex::with_val(PREC, w - &neg).abs_ref()).to_f64())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-20, "{best}");
    }
}

#[test]
fn seeds_length_checked() {
    let fp = FiniteParams::new(3, 0.1, 0.2).unwrap();
    let spec = build_poly(&fp, PREC).unwrap();
    assert!(find_zeros_from(&spec, &[Complex64::new(0.0, 0.0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monic_times_leading_is_direct_sum(n in 1u32..12, a in -6.0f64..6.0, b in -6.0f64..6.0,
                                         re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let fp = FiniteParams::new(n, a, b).unwrap();
        prop_assume!(jacobi::leading_coefficient(n, &fp.alpha, &fp.beta, PREC).to_f64().abs() > 1e-8);
        let spec = build_poly(&fp, PREC).unwrap();
        let z = c(re, im);
        let lhs = eval_poly(&spec, &z) * &spec.leading;
        let rhs = jacobi::direct_sum(n, &fp.alpha, &fp.beta, &z);
        let scale = Float::with_val(PREC, rhs.abs_ref()).to_f64().max(1e-10);
        let d = Complex::with_val(PREC, &lhs - &rhs);
        prop_assert!(Float::with_val(PREC, d.abs_ref()).to_f64() / scale < 1e-40);
    }

    #[test]
    fn rodrigues_agrees(n in 0u32..8, a in -5.0f64..5.0, b in -5.0f64..5.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let fp = FiniteParams::from_floats(n.max(1), Float::with_val(PREC, a), Float::with_val(PREC, b)).unwrap();
        let z = c(re, im);
        let s = jacobi::direct_sum(n, &fp.alpha, &fp.beta, &z);
        let r = rodrigues(n, a, b, &z);
        let d = Complex::with_val(PREC, &s - &r);
        let scale = Float::with_val(PREC, r.abs_ref()).to_f64().max(1e-10);
        prop_assert!(Float::with_val(PREC, d.abs_ref()).to_f64() / scale < 1e-40);
    }

    #[test]
    fn zero_residuals_hold(n in 2u32..25, a in -20.0f64..10.0, b in -5.0f64..10.0) {
        let fp = FiniteParams::new(n, a, b).unwrap();
        prop_assume!(jacobi::leading_coefficient(n, &fp.alpha, &fp.beta, PREC).to_f64().abs() > 1e-8);
        let prec = jacobi::precision_for(&fp);
        let spec = build_poly(&fp, prec).unwrap();
        let zs = find_zeros(&spec).unwrap();
        prop_assert!(zs.residual <= zs.residual_bound());
        // real coefficients: the zero multiset is closed under conjugation
        for z in zs.zeros() {
            let best = zs.zeros().iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8 * (1.0 + z.norm()));
        }
    }
}
