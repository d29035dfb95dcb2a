mod common;

use std::f64::consts::PI;

use common::{c, ctx, hyp_f64, C};
use jacobi_rh::jacobi::{counting_measure, find_zeros, ZeroSet};
use jacobi_rh::params::{parse_float, FiniteParams};
use jacobi_rh::validation::{
    compare_weak, estimate_r, hungarian, mass_identities, orthogonality_check, poly_for, real_zero_count,
    riccati_residuals, transport, LimitMeasure, OrthContour, RParameter, RSource,
};
use proptest::prelude::*;

fn zeros(n: u32, alpha: &str, beta: &str) -> ZeroSet {
    let fp = FiniteParams::parse(n, alpha, beta).unwrap();
    find_zeros(&poly_for(&fp).unwrap()).unwrap()
}

#[test]
fn estimate_r_examples() {
    let r = estimate_r(&parse_float("-80.00001").unwrap(), 100);
    assert_eq!(r.source, RSource::Estimated);
    assert!((r.value() - 0.11513).abs() < 5e-6);
    let r = estimate_r(&parse_float("-80.000000000000001").unwrap(), 100);
    assert!((r.value() - 0.34539).abs() < 5e-6);
    let r = estimate_r(&parse_float("-80.5").unwrap(), 100);
    assert!((r.value() - 0.5f64.ln().abs() / 100.0).abs() < 1e-15);
    assert!((r.value() - 0.00693).abs() < 5e-6);
    let r = estimate_r(&parse_float("-80").unwrap(), 100);
    assert_eq!(r.r, None);
    assert_eq!(r.value(), f64::INFINITY);
    assert_eq!(RParameter::given(-1.0).value(), 0.0);
}

#[test]
fn mass_identities_examples() {
    let c3 = ctx(-0.8, 0.5);
    let rs: Vec<RParameter> = [0.0, 0.5, 2.0].iter().map(|&r| RParameter::given(r)).collect();
    let report = mass_identities(&c3, &rs).unwrap();
    assert!(report.max_error <= 1e-8, "{report:?}");
    for e in &report.entries {
        assert!((e.segment.unwrap() - 0.2).abs() <= 1e-8 && (e.curve - 0.8).abs() <= 1e-8);
    }
    let report = mass_identities(&c3, &[RParameter::given(f64::INFINITY)]).unwrap();
    let e = &report.entries[0];
    assert_eq!(e.r, None);
    assert!((e.segment.unwrap() - 0.2).abs() <= 1e-8 && (e.curve - 0.8).abs() < 1e-15);
    assert!((e.total - 1.0).abs() <= 1e-8);

    let report = mass_identities(&ctx(-1.1, 0.5), &[]).unwrap();
    assert_eq!(report.entries.len(), 1);
    assert!((report.entries[0].curve - 1.0).abs() <= 1e-8);
    assert_eq!(report.entries[0].segment, None);
}

#[test]
fn density_is_nonnegative() {
    let c3 = ctx(-0.8, 0.5);
    for r in [0.0, 1.0] {
        let mu = LimitMeasure::new(&c3, RParameter::given(r)).unwrap();
        assert!(mu.density_samples().iter().all(|&d| d >= 0.0));
    }
    let mu = LimitMeasure::new(&ctx(-1.1, 0.5), RParameter::given(0.0)).unwrap();
    assert!(mu.density_samples().iter().all(|&d| d >= 0.0));
}

#[test]
fn discretization_follows_the_masses() {
    let c3 = ctx(-0.8, 0.5);
    let mu = LimitMeasure::new(&c3, RParameter::given(0.5)).unwrap();
    let pts = mu.discretize(100).unwrap();
    assert_eq!(pts.len(), 100);
    assert!(pts.iter().all(|&z| mu.distance(z) < 1e-12));
    let on_seg = pts.iter().filter(|z| z.im == 0.0 && z.re < c3.geometry.bp.zeta2.re + 1e-12).count();
    assert_eq!(on_seg, 20);

    let mu = LimitMeasure::new(&c3, RParameter::given(f64::INFINITY)).unwrap();
    let pts = mu.discretize(50).unwrap();
    assert_eq!(pts.iter().filter(|&&z| z == c(1.0, 0.0)).count(), 40);
}

#[test]
fn riccati_equation_holds_off_the_support() {
    let pts: Vec<C> = (0..20).map(|j| C::from_polar(1.7 + 0.1 * f64::from(j % 3), 2.0 * PI * f64::from(j) / 20.0 + 0.2)).collect();
    for (a, b, r) in [(-0.8, 0.5, 0.0), (-0.8, 0.5, 0.5), (-0.3, 0.7, 1.0), (-1.1, 0.5, 0.0)] {
        let res = riccati_residuals(&ctx(a, b), RParameter::given(r), &pts).unwrap();
        assert_eq!(res.len(), 20);
        assert!(res.iter().all(|&x| x <= 1e-8), "({a},{b}) r={r}: {res:?}");
    }
}

#[test]
fn real_zero_counts() {
    let zs = zeros(10, "-3.5", "0.5");
    let count = real_zero_count(&zs);
    assert_eq!(count.expected, Some(7));
    assert_eq!(count.observed, 7);
    // Independent count: sign changes of P_10 on a fine grid of (−1,1).
    let vals: Vec<f64> = (1..4000)
        .map(|j| hyp_f64(10, -3.5, 0.5, c(-1.0 + 2.0 * f64::from(j) / 4000.0, 0.0)).real().to_f64())
        .collect();
    let changes = vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(changes, 7);

    let count = real_zero_count(&zeros(5, "0.5", "0.5"));
    assert_eq!((count.observed, count.expected), (5, Some(5)));

    let count = real_zero_count(&zeros(100, "-80.00001", "49.99999"));
    assert_eq!((count.observed, count.expected), (20, Some(20)));

    assert_eq!(real_zero_count(&zeros(6, "-7.5", "2")).expected, None);
}

#[test]
fn orthogonality_examples() {
    let fp = FiniteParams::new(6, -4.3, 3.1).unwrap();
    let rep = orthogonality_check(None, &fp, OrthContour::Circle).unwrap();
    assert_eq!(rep.residuals.len(), 6);
    assert!(rep.max_residual <= 1e-10, "{rep:?}");
    // The n-th moment stands far above the rounding floor of the lower ones.
    assert!(rep.moment_n > 1e6 * rep.max_residual, "{rep:?}");

    let fp = FiniteParams::new(4, -3.2, 2.0).unwrap();
    let rep = orthogonality_check(None, &fp, OrthContour::Circle).unwrap();
    assert!(rep.max_residual <= 1e-10 && rep.moment_n > 1e6 * rep.max_residual, "{rep:?}");

    let fp = FiniteParams::new(3, 0.5, 0.5).unwrap();
    let rep = orthogonality_check(None, &fp, OrthContour::Circle).unwrap();
    assert!(rep.max_residual <= 1e-10 && rep.moment_n > 1e6 * rep.max_residual, "{rep:?}");

    let c2 = ctx(-1.1, 0.5);
    let fp = FiniteParams::new(6, -6.6, 3.0).unwrap();
    let rep = orthogonality_check(Some(&c2), &fp, OrthContour::Trajectories).unwrap();
    assert!(rep.max_residual <= 1e-10, "{rep:?}");

    let fp = FiniteParams::new(4, -3.2, -0.5).unwrap();
    assert!(orthogonality_check(None, &fp, OrthContour::Circle).is_err());
}

#[test]
fn weak_convergence_in_the_c3_family() {
    let c3 = ctx(-0.8, 0.5);
    let mut last_mass = f64::INFINITY;
    let mut last_transport = f64::INFINITY;
    for n in [50u32, 100, 150] {
        let alpha = format!("{}", -0.8 * f64::from(n) - 1e-5);
        let beta = format!("{}", 0.5 * f64::from(n) - 1e-5);
        let zs = zeros(n, &alpha, &beta);
        let em = counting_measure(&zs);
        assert!((em.total_mass() - 1.0).abs() < 1e-12);
        let r = estimate_r(&zs.alpha, n);
        let rep = compare_weak(&em, &c3, r).unwrap();
        assert!((rep.mass_on_segment + rep.mass_on_curve - 1.0).abs() < 1e-12);
        let gap = (rep.mass_on_segment - 0.2).abs();
        assert!(gap <= last_mass, "n={n}: {gap}");
        assert!(rep.transport_distance < last_transport, "n={n}: {}", rep.transport_distance);
        last_mass = gap;
        last_transport = rep.transport_distance;
    }
}

#[test]
fn larger_r_pulls_zeros_off_gamma() {
    let c3 = ctx(-0.8, 0.5);
    let zs = zeros(100, "-80.000000000000001", "49.999999999999999");
    let em = counting_measure(&zs);
    let r = estimate_r(&zs.alpha, 100);
    let near = compare_weak(&em, &c3, r).unwrap();
    let far = compare_weak(&em, &c3, RParameter::given(0.0)).unwrap();
    assert!(near.transport_distance < far.transport_distance, "{near:?} {far:?}");
    assert!(near.max_atom_distance <= near.hausdorff_to_support);
}

#[test]
fn transport_basics() {
    let a = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)];
    assert_eq!(transport(&a, &a).unwrap(), 0.0);
    let shifted: Vec<C> = a.iter().rev().map(|z| z + c(0.0, 0.1)).collect();
    assert!((transport(&a, &shifted).unwrap() - 0.1).abs() < 1e-15);
    assert!(transport(&a, &a[..2]).is_err());
}

fn brute_force(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == cost.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..cost.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(cost[row][j] + go(cost, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    go(cost, 0, &mut vec![false; cost.len()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hungarian_is_optimal(n in 1usize..=6, seed in proptest::collection::vec(0.0f64..10.0, 36)) {
        let cost: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 6 + j]).collect()).collect();
        let assign = hungarian(&cost);
        let mut seen = assign.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let total: f64 = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        prop_assert!((total - brute_force(&cost)).abs() < 1e-12);
    }

    #[test]
    fn estimate_r_inverts_the_distance(k in -200i32..0, e in 1.0f64..30.0, n in 10u32..200) {
        let alpha = parse_float(&format!("{k}.{}", "0".repeat(40))).unwrap() - rug::Float::with_val(256, 10f64.powf(-e));
        let r = estimate_r(&alpha, n);
        prop_assert!((r.value() - e * 10f64.ln() / f64::from(n)).abs() < 1e-9);
    }
}
