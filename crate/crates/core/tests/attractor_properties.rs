use std::sync::OnceLock;

use attractorlab::attractor::{classify_region, difference, AttractorGeometry, GeometryConfig, Pair, Region};
use attractorlab::dilog::f_k;
use num_complex::Complex64;
use proptest::prelude::*;
use rug::Complex;

fn geom() -> &'static AttractorGeometry {
    static G: OnceLock<AttractorGeometry> = OnceLock::new();
    G.get_or_init(|| AttractorGeometry::build(&GeometryConfig::default()).unwrap())
}

fn label(z: Complex64) -> Region {
    classify_region(&Complex::with_val(64, (z.re, z.im)), 64).unwrap().value
}

fn near_boundary(z: Complex64, reach: f64) -> bool {
    let g = geom();
    z.im <= reach || z.norm() >= 1.0 - reach || g.curves.iter().any(|c| c.distance(z) <= reach)
}

#[test]
fn region_labels_change_only_across_curves() {
    let (nx, ny) = (400usize, 200usize);
    let (dx, dy) = (2.0 / nx as f64, 1.0 / ny as f64);
    let point = |i: usize, j: usize| Complex64::new(-1.0 + i as f64 * dx, j as f64 * dy);
    let grid: Vec<Vec<Option<Region>>> = (0..=ny)
        .map(|j| (0..=nx).map(|i| Some(point(i, j)).filter(|z| z.norm() <= 1.0).map(label)).collect())
        .collect();
    let reach = 1.5 * dx.hypot(dy);
    let mut seen = [false; 3];
    for j in 0..=ny {
        for i in 0..=nx {
            let Some(a) = grid[j][i] else { continue };
            seen[a.index() as usize - 1] = true;
            for (ii, jj) in [(i + 1, j), (i, j + 1)] {
                let Some(Some(b)) = grid.get(jj).and_then(|row| row.get(ii)) else { continue };
                if a != *b {
                    let mid = (point(i, j) + point(ii, jj)) / 2.0;
                    assert!(near_boundary(mid, reach), "{a} | {b} at {mid} away from every boundary");
                }
            }
        }
    }
    assert_eq!(seen, [true; 3]);
}

#[test]
fn curves_meet_the_circle_at_the_boundary_angles() {
    let g = geom();
    for (pair, theta) in [(Pair::P13, &g.theta13), (Pair::P23, &g.theta23)] {
        let end = g.curve(pair).end();
        assert!((end.norm() - 1.0).abs() < 1e-6, "{pair:?}: |end| = {}", end.norm());
        assert!((end.arg() - theta.to_f64()).abs() < 1e-6, "{pair:?}: {} vs {}", end.arg(), theta);
    }
}

#[test]
fn curves_meet_at_the_triple_point() {
    let g = geom();
    let tol = g.curves[0].tol;
    let ends = [g.curve(Pair::P12).end(), g.curve(Pair::P13).start(), g.curve(Pair::P23).start()];
    for a in &ends {
        for b in &ends {
            assert!((a - b).norm() <= 10.0 * tol, "{a} vs {b}");
        }
    }
    assert_eq!(g.curve(Pair::P12).start(), Complex64::new(0.0, 0.0));
}

fn gap(z: Complex64, pair: Pair) -> f64 {
    let x = Complex::with_val(128, (z.re, z.im));
    let fk = f_k(&x, pair.k(), 128).unwrap();
    let fl = f_k(&x, pair.l(), 128).unwrap();
    (fk - fl).to_f64()
}

#[test]
fn tangents_are_orthogonal_to_gradients() {
    for c in &geom().curves {
        for &z in c.points.iter().filter(|z| z.norm() > 1e-4 && z.norm() < 1.0 - 1e-5) {
            let (_, dd) = difference(&Complex::with_val(128, (z.re, z.im)), c.pair, 128).unwrap();
            let dd = Complex64::new(dd.real().to_f64(), dd.imag().to_f64());
            let tangent = Complex64::i() * dd.conj();
            let h = 1e-6f64.min(z.norm() * 1e-5);
            let gx = (gap(z + h, c.pair) - gap(z - h, c.pair)) / (2.0 * h);
            let gy = (gap(z + Complex64::new(0.0, h), c.pair) - gap(z - Complex64::new(0.0, h), c.pair)) / (2.0 * h);
            let grad = Complex64::new(gx, gy);
            let dot = (tangent.re * grad.re + tangent.im * grad.im) / (tangent.norm() * grad.norm());
            assert!(dot.abs() < 1e-8, "C{} at {z}: {dot:e}", c.pair.tag());
        }
    }
}

#[test]
fn curves_lie_on_their_level_sets() {
    for c in &geom().curves {
        for &z in c.points.iter().skip(1) {
            assert!(gap(z, c.pair).abs() < 1e-12, "C{} at {z}", c.pair.tag());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn labels_are_mirror_symmetric(r in 0.01f64..0.999, t in 0.01f64..3.13) {
        let z = Complex64::from_polar(r, t);
        let up = classify_region(&Complex::with_val(96, (z.re, z.im)), 96).unwrap();
        let down = classify_region(&Complex::with_val(96, (z.re, -z.im)), 96).unwrap();
        prop_assert_eq!(up.value, down.value);
    }

    #[test]
    fn margin_is_the_gap_to_the_runner_up(r in 0.05f64..0.95, t in 0.05f64..3.1) {
        let z = Complex64::from_polar(r, t);
        let x = Complex::with_val(96, (z.re, z.im));
        let l = classify_region(&x, 96).unwrap();
        let mut f: Vec<f64> = (1..=3).map(|k| f_k(&x, k, 96).unwrap().to_f64()).collect();
        prop_assert!((f[l.value.index() as usize - 1] - f.iter().cloned().fold(f64::MIN, f64::max)).abs() < 1e-15);
        f.sort_by(|a, b| b.partial_cmp(a).unwrap());
        prop_assert!((l.margin - (f[0] - f[1])).abs() < 1e-12);
    }
}
