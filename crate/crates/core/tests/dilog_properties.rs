use attractorlab::dilog::{circle_u, clausen, f_k, li2, li2_on_circle, li2_with, Route};
use proptest::prelude::*;
use rug::{Complex, Float};

fn dist(a: &Complex, b: &Complex) -> f64 {
    Float::with_val(64, Complex::with_val(a.prec().0, a - b).abs_ref()).to_f64()
}

fn polar(r: f64, t: f64, prec: u32) -> Complex {
    Complex::with_val(prec, (r * t.cos(), r * t.sin()))
}

#[test]
fn circle_closed_form_matches_series() {
    let prec = 128;
    for t in [0.3, 1.0, 2.0, 3.0] {
        let tf = Float::with_val(prec, t);
        let (sin, cos) = tf.clone().sin_cos(Float::new(prec));
        let series = li2(&Complex::with_val(prec, (cos, sin)), prec).unwrap().value;
        let parts = Complex::with_val(prec, (circle_u(&tf).unwrap(), clausen(&tf, prec)));
        assert!(dist(&series, &parts) < 1e-20, "t = {t}");
        assert!(dist(&series, &li2_on_circle(&tf, prec)) < 1e-20, "t = {t}");
    }
}

fn f_at(x: f64, y: f64, k: u32) -> f64 {
    f_k(&Complex::with_val(160, (x, y)), k, 160).unwrap().to_f64()
}

/// Five-point Laplacian of `f_k` at `(x, y)` with spacing `h`.
fn laplacian(x: f64, y: f64, k: u32, h: f64) -> f64 {
    let c = f_at(x, y, k);
    (f_at(x + h, y, k) + f_at(x - h, y, k) + f_at(x, y + h, k) + f_at(x, y - h, k) - 4.0 * c) / (h * h)
}

#[test]
fn comparison_functions_are_harmonic() {
    for (x, y, k) in [(0.3, 0.2, 1), (-0.4, 0.5, 2), (0.1, 0.6, 3), (-0.5, -0.3, 2)] {
        let coarse = laplacian(x, y, k, 2e-2).abs();
        let fine = laplacian(x, y, k, 1e-2).abs();
        // O(h²): halving h divides the discrete Laplacian by about four
        assert!(fine < coarse / 3.0, "({x}, {y}) k={k}: {coarse:e} -> {fine:e}");
        assert!(fine < 1e-2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_paths_agree(r in 0.0f64..1.0, t in -3.14159f64..3.14159) {
        let z = polar(r, t, 128);
        let a = li2_with(&z, 128, Route::Direct).unwrap();
        let b = li2_with(&z, 128, Route::Duplication).unwrap();
        prop_assert!(dist(&a.value, &b.value) <= a.err + b.err, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn conjugate_symmetry(r in 0.0f64..1.0, t in 0.0f64..3.14159) {
        let z = polar(r, t, 128);
        let a = li2(&z, 128).unwrap();
        let b = li2(&Complex::with_val(128, z.conj_ref()), 128).unwrap();
        prop_assert!(dist(&a.value, &Complex::with_val(128, b.value.conj_ref())) <= a.err + b.err);
    }
}
