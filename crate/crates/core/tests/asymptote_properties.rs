use attractorlab::asymptote::{log_over_degree, q_residue, region_of, scaled_log_limit, w_hk};
use attractorlab::attractor::Region;
use attractorlab::dilog::{f_k, li2};
use attractorlab::polygen::{partition_coeffs, ExactPolynomial};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

fn dist(a: &Complex, b: &Complex) -> f64 {
    Float::with_val(64, Complex::with_val(a.prec().0, a - b).abs_ref()).to_f64()
}

fn polys() -> Vec<ExactPolynomial> {
    [200, 800, 3200].iter().map(|&n| partition_coeffs(n).unwrap()).collect()
}

#[test]
fn residues_are_scaled_dilogarithms() {
    for (re, im) in [(0.3, 0.0), (0.0, 0.5)] {
        let x = Complex::with_val(128, (re, im));
        for (h, k) in [(0u32, 1u32), (1, 2), (1, 3), (2, 3), (1, 4)] {
            let r = q_residue(&x, h, k, &[2, 3, 4], 128).unwrap();
            let xk = Complex::with_val(128, x.clone().pow(k));
            let want = Complex::with_val(128, li2(&xk, 128).unwrap().value / (k * k));
            assert!(dist(&r, &want) < 1e-10, "x = {re}+{im}i, h/k = {h}/{k}: {r} vs {want}");
        }
    }
}

#[test]
fn scaled_logs_approach_the_comparison_maximum() {
    let prec = 512;
    let polys = polys();
    let points = [
        ((0.5, 0.0), Region::R1),
        ((-0.6, 0.4), Region::R2),
        ((0.99 * 2.2f64.cos(), 0.99 * 2.2f64.sin()), Region::R3),
    ];
    for ((re, im), region) in points {
        let x = Complex::with_val(prec, (re, im));
        assert_eq!(region_of(&x, prec).unwrap(), region);
        let fmax = (1..=3).map(|k| f_k(&x, k, prec).unwrap().to_f64()).fold(f64::MIN, f64::max);
        let errs: Vec<f64> = polys.iter().map(|p| (scaled_log_limit(p, &x, prec).unwrap() - fmax).abs()).collect();
        for w in errs.windows(2) {
            let slope = (w[1] / w[0]).ln() / 4f64.ln();
            assert!((slope + 0.5).abs() < 0.3, "{region} at {re}+{im}i: errors {errs:?}");
        }
    }
}

#[test]
fn log_over_degree_decays_inside_the_disk() {
    let prec = 512;
    let polys = polys();
    for (re, im) in [(0.5, 0.0), (0.4, 0.6), (-0.3, 0.8)] {
        let x = Complex::with_val(prec, (re, im));
        let v: Vec<f64> = polys.iter().map(|p| log_over_degree(p, &x, prec).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{re}+{im}i: {v:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn w_conjugation(r in 0.0f64..0.9, t in -3.14f64..3.14, hk in prop::sample::select(vec![(1u32, 2u32), (1, 3), (1, 4), (2, 5), (3, 7)])) {
        let (h, k) = hk;
        let x = Complex::with_val(128, (r * t.cos(), r * t.sin()));
        let xc = Complex::with_val(128, x.conj_ref());
        let a = w_hk(&x, h, k, 128).unwrap();
        let b = w_hk(&xc, k - h, k, 128).unwrap();
        prop_assert!(dist(&a, &Complex::with_val(128, b.conj_ref())) < 1e-30, "{} vs {}", a, b);
    }
}
