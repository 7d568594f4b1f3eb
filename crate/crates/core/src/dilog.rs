//! Complex dilogarithm on the closed unit disk and the objects built on it:
//! the closed forms of `Li₂` on the unit circle, the comparison functions
//! `f_k`, the analytic branches `L_k(x) = √Li₂(x^k) / k` and the maps
//! `G_kℓ = exp(L_k − L_ℓ)`.
//!
//! `Li₂` is evaluated by one of three expansions chosen from the position of
//! `z`:
//!
//! * `|z| ≤ 1/2`: the defining series `Σ zⁿ/n²`;
//! * `|1 − z| ≤ 1/2`: the reflection `Li₂(z) = π²/6 − ln z ln(1−z) − Li₂(1−z)`;
//! * otherwise the Bernoulli series in `u = −ln(1−z)`,
//!   `Li₂(z) = Σ Bₙ u^{n+1}/(n+1)!`, which converges for `|u| < 2π`.
//!
//! The duplication formula `Li₂(z) = 2[Li₂(√z) + Li₂(−√z)]` gives an
//! independent second route used for self-checks.

use rug::{float::Constant, ops::Pow, Complex, Float};
use thiserror::Error;

use crate::numeric::{abs_f64, bernoulli_even_float, pi, tanh_sinh};

/// Largest modulus accepted by [`li2`]; curve tracing starts from rounded
/// on-circle points.
pub const DISK_SLACK: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DilogError {
    #[error("|z| = {modulus} lies outside the closed unit disk (slack {DISK_SLACK})")]
    OutsideDisk { modulus: f64 },
    #[error("t = {0} is outside [0, 2π]")]
    AngleOutOfRange(f64),
    #[error("comparison index k must be at least 1")]
    BadIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilogWarning {
    /// `z` is within `10^(-prec/4)` of the logarithmic branch point `z = 1`.
    BranchProximity,
}

/// Which chain of identities evaluates `Li₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    #[default]
    Direct,
    /// `Li₂(z) = 2[Li₂(s) + Li₂(−s)]` with `s = √z`, each half by `Direct`.
    Duplication,
}

#[derive(Debug, Clone)]
pub struct DilogValue {
    pub z: Complex,
    pub value: Complex,
    /// Bound on truncation plus rounding error of `value`.
    pub err: f64,
    pub warning: Option<DilogWarning>,
}

/// `Li₂(z)` to `prec` bits.
pub fn li2(z: &Complex, prec: u32) -> Result<DilogValue, DilogError> {
    li2_with(z, prec, Route::Direct)
}

pub fn li2_with(z: &Complex, prec: u32, route: Route) -> Result<DilogValue, DilogError> {
    let modulus = abs_f64(&z);
    if modulus > 1.0 + DISK_SLACK {
        return Err(DilogError::OutsideDisk { modulus });
    }
    let wp = prec + 32;
    let zw = Complex::with_val(wp, z);
    let value = match route {
        Route::Direct => li2_direct(&zw, wp),
        Route::Duplication => {
            let s = Complex::with_val(wp, zw.sqrt_ref());
            let neg = Complex::with_val(wp, -&s);
            let sum = li2_direct(&s, wp) + li2_direct(&neg, wp);
            sum * 2u32
        }
    };
    let mag = abs_f64(&value).max(1.0);
    let err = mag * 2f64.powi(-(prec as i32));

    let dist_to_one = Complex::with_val(64, &zw - 1u32).abs().real().to_f64();
    let warning = (dist_to_one < 10f64.powf(-(prec as f64) / 4.0)).then_some(DilogWarning::BranchProximity);

    Ok(DilogValue {
        z: z.clone(),
        value: Complex::with_val(prec, &value),
        err,
        warning,
    })
}

/// Value only, at working precision `wp`, for callers that have already
/// validated the argument.
pub(crate) fn li2_direct(z: &Complex, wp: u32) -> Complex {
    if z.real().is_zero() && z.imag().is_zero() {
        return Complex::new(wp);
    }
    let r = abs_f64(&z);
    if r <= 0.5 {
        return li2_series(z, wp);
    }
    let one_minus = Complex::with_val(wp, 1u32 - z);
    let d = abs_f64(&one_minus);
    if d == 0.0 {
        return Complex::with_val(wp, zeta2(wp));
    }
    if d <= 0.5 {
        // Li₂(z) = π²/6 − ln z ln(1−z) − Li₂(1−z)
        let pi2_6 = Float::with_val(wp, pi(wp).square_ref()) / 6u32;
        let lz = Complex::with_val(wp, z.ln_ref());
        let l1z = Complex::with_val(wp, one_minus.ln_ref());
        let prod = lz * l1z;
        let inner = li2_series(&one_minus, wp);
        let mut out = Complex::with_val(wp, (pi2_6, 0));
        out -= prod;
        out -= inner;
        return out;
    }
    li2_bernoulli(z, wp)
}

fn li2_series(z: &Complex, wp: u32) -> Complex {
    let r = abs_f64(&z);
    let mut sum = Complex::with_val(wp, z);
    let mut power = Complex::with_val(wp, z);
    let tol = 2f64.powi(-(wp as i32));
    let mut n: u64 = 1;
    loop {
        n += 1;
        power *= z;
        let term = Complex::with_val(wp, &power / (n * n));
        sum += &term;
        // tail after term n is below r^{n+1} / ((n+1)^2 (1 - r))
        let tail = r.powi((n + 1) as i32) / (((n + 1) * (n + 1)) as f64 * (1.0 - r));
        let scale = abs_f64(&sum);
        if tail <= tol * scale || n > 100_000 {
            break;
        }
    }
    sum
}

fn li2_bernoulli(z: &Complex, wp: u32) -> Complex {
    // u = -ln(1 - z)
    let one_minus = Complex::with_val(wp, 1u32 - z);
    let u = -Complex::with_val(wp, one_minus.ln_ref());
    let u2 = Complex::with_val(wp, u.square_ref());
    // u - u^2/4
    let mut sum = Complex::with_val(wp, &u - Complex::with_val(wp, &u2 / 4u32));
    // term_k = u^{2k+1} / (2k+1)!
    let mut power = Complex::with_val(wp, &u);
    let tol = Float::with_val(64, Float::i_exp(1, -(wp as i32)));
    for k in 1..2000usize {
        power *= &u2;
        power /= ((2 * k) * (2 * k + 1)) as u64;
        let term = Complex::with_val(wp, &power * bernoulli_even_float(k, wp));
        sum += &term;
        let t = Float::with_val(64, term.abs_ref());
        let s = Float::with_val(64, sum.abs_ref());
        if t < Float::with_val(64, &s * &tol) && k > 2 {
            break;
        }
    }
    sum
}

/// Real part of `Li₂(e^{it})`: the quadratic `(3t² − 6πt + 2π²)/12` on `[0, 2π]`.
pub fn circle_u(t: &Float) -> Result<Float, DilogError> {
    let prec = t.prec();
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    if t.is_sign_negative() && !t.is_zero() || *t > two_pi {
        return Err(DilogError::AngleOutOfRange(t.to_f64()));
    }
    let p = pi(prec);
    let mut v = Float::with_val(prec, t.square_ref()) * 3u32;
    v -= Float::with_val(prec, t * &p) * 6u32;
    v += Float::with_val(prec, p.square_ref()) * 2u32;
    Ok(v / 12u32)
}

/// Reduces `t` to `[0, 2π)`.
fn reduce_angle(t: &Float, prec: u32) -> Float {
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let mut r = Float::with_val(prec, t);
    if r.is_sign_negative() || r >= two_pi {
        let q = Float::with_val(prec, &r / &two_pi).floor();
        r -= q * &two_pi;
        if r.is_sign_negative() {
            r += &two_pi;
        }
    }
    r
}

/// Clausen function `Cl₂(t) = Σ sin(nt)/n²`, via the ζ-accelerated expansion
///
/// `Cl₂(θ) = θ − θ ln θ + Σ_{k≥1} |B_2k| θ^{2k+1} / (2k (2k+1) (2k)!)`
///
/// on `[0, π]` and the odd symmetry `Cl₂(2π − θ) = −Cl₂(θ)` elsewhere.
pub fn clausen(t: &Float, prec: u32) -> Float {
    let wp = prec + 24;
    let p = pi(wp);
    let mut theta = reduce_angle(&Float::with_val(wp, t), wp);
    let mut sign = 1i32;
    if theta > p {
        theta = Float::with_val(wp, &p * 2u32) - theta;
        sign = -1;
    }
    if theta.is_zero() {
        return Float::new(prec);
    }
    let ln_theta = Float::with_val(wp, theta.ln_ref());
    let mut sum = Float::with_val(wp, &theta - Float::with_val(wp, &theta * &ln_theta));
    let theta2 = Float::with_val(wp, theta.square_ref());
    // running value θ^{2k+1} / (2k)!
    let mut power = Float::with_val(wp, &theta);
    let tol = Float::with_val(64, Float::i_exp(1, -(wp as i32)));
    for k in 1..4000usize {
        power *= &theta2;
        power /= ((2 * k - 1) * (2 * k)) as u64;
        let b = bernoulli_even_float(k, wp).abs();
        let term = Float::with_val(wp, &power * b) / ((2 * k) * (2 * k + 1)) as u64;
        sum += &term;
        if Float::with_val(64, term.abs_ref()) < Float::with_val(64, &tol * Float::with_val(64, sum.abs_ref())) {
            break;
        }
    }
    if sign < 0 {
        sum = -sum;
    }
    // θ = π exactly gives 0 up to rounding
    Float::with_val(prec, sum)
}

/// `Cl₂(t) = −∫₀ᵗ ln(2 sin(ξ/2)) dξ` by tanh-sinh quadrature, for `t ∈ [0, 2π]`.
pub fn clausen_quadrature(t: &Float, prec: u32) -> Result<Float, DilogError> {
    let wp = prec + 16;
    let two_pi = Float::with_val(wp, pi(wp) * 2u32);
    if t.is_sign_negative() && !t.is_zero() || *t > two_pi {
        return Err(DilogError::AngleOutOfRange(t.to_f64()));
    }
    if t.is_zero() {
        return Ok(Float::new(prec));
    }
    let a = Float::new(wp);
    let b = Float::with_val(wp, t);
    let integrand = |xi: &Float| -> Float {
        let s = Float::with_val(wp, Float::with_val(wp, xi / 2u32).sin_ref()) * 2u32;
        -s.ln()
    };
    Ok(Float::with_val(prec, tanh_sinh(integrand, &a, &b, wp)))
}

/// `Li₂(e^{it}) = u(t) + i Cl₂(t)` for any real `t`.
pub fn li2_on_circle(t: &Float, prec: u32) -> Complex {
    let wp = prec + 16;
    let r = reduce_angle(&Float::with_val(wp, t), wp);
    let u = circle_u(&r).expect("reduced angle lies in [0, 2π)");
    let v = clausen(&r, wp);
    Complex::with_val(prec, (u, v))
}

/// `L_k(x) = √Li₂(x^k) / k` together with its inputs.
#[derive(Debug, Clone)]
pub struct BranchedRoot {
    pub k: u32,
    pub x: Complex,
    /// Principal square root, `Re ≥ 0`.
    pub value: Complex,
}

fn power_k(x: &Complex, k: u32, wp: u32) -> Complex {
    match k {
        1 => Complex::with_val(wp, x),
        _ => Complex::with_val(wp, x.pow(k)),
    }
}

pub fn branched_root(x: &Complex, k: u32, prec: u32) -> Result<BranchedRoot, DilogError> {
    if k == 0 {
        return Err(DilogError::BadIndex);
    }
    let wp = prec + 16;
    let xk = power_k(&Complex::with_val(wp, x), k, wp);
    let l = li2(&xk, wp)?.value;
    let value = Complex::with_val(prec, Complex::with_val(wp, l.sqrt_ref()) / k);
    Ok(BranchedRoot { k, x: x.clone(), value })
}

/// `f_k(x) = Re √Li₂(x^k) / k`.
pub fn f_k(x: &Complex, k: u32, prec: u32) -> Result<Float, DilogError> {
    Ok(branched_root(x, k, prec)?.value.real().clone())
}

/// `L_k(x)` and `L_k'(x) = −ln(1 − x^k) / (2x √Li₂(x^k))`.
pub fn branch_and_derivative(x: &Complex, k: u32, prec: u32) -> Result<(Complex, Complex), DilogError> {
    if k == 0 {
        return Err(DilogError::BadIndex);
    }
    let wp = prec + 16;
    let xw = Complex::with_val(wp, x);
    let xk = power_k(&xw, k, wp);
    let modulus = abs_f64(&xk);
    if modulus > 1.0 + DISK_SLACK {
        return Err(DilogError::OutsideDisk { modulus });
    }
    let li = li2_direct(&xk, wp);
    let root = Complex::with_val(wp, li.sqrt_ref());
    let value = Complex::with_val(prec, Complex::with_val(wp, &root / k));
    let log_term = Complex::with_val(wp, Complex::with_val(wp, 1u32 - &xk).ln_ref());
    let den = Complex::with_val(wp, &xw * &root) * 2u32;
    let deriv = Complex::with_val(prec, -log_term / den);
    Ok((value, deriv))
}

/// `G_kℓ(x) = exp(L_k(x) − L_ℓ(x))` for distinct `k, ℓ ∈ {1, 2, 3}`.
#[allow(non_snake_case)]
pub fn G_map(x: &Complex, k: u32, l: u32, prec: u32) -> Result<Complex, DilogError> {
    if k == l || !(1..=3).contains(&k) || !(1..=3).contains(&l) {
        return Err(DilogError::BadIndex);
    }
    let wp = prec + 16;
    let lk = branched_root(x, k, wp)?.value;
    let ll = branched_root(x, l, wp)?.value;
    Ok(Complex::with_val(prec, Complex::with_val(wp, lk - ll).exp_ref()))
}

/// `π²/6` at `prec` bits.
pub fn zeta2(prec: u32) -> Float {
    let p = Float::with_val(prec, Constant::Pi);
    Float::with_val(prec, p.square_ref()) / 6u32
}

/// `Im(L_k(x) − L_ℓ(x))`, the argument of `G_kℓ(x)` without reduction mod 2π.
pub fn phase_difference(x: &Complex, k: u32, l: u32, prec: u32) -> Result<Float, DilogError> {
    let lk = branched_root(x, k, prec)?.value;
    let ll = branched_root(x, l, prec)?.value;
    let mut d = Float::with_val(prec, lk.imag());
    d -= ll.imag();
    Ok(d)
}

/// Convenience: the three comparison functions at once.
pub fn f_triple(x: &Complex, prec: u32) -> Result<[Float; 3], DilogError> {
    Ok([f_k(x, 1, prec)?, f_k(x, 2, prec)?, f_k(x, 3, prec)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::with_val(128, (re, im))
    }

    fn dist(a: &Complex, b: &Complex) -> f64 {
        Complex::with_val(128, a - b).abs().real().to_f64()
    }

    #[test]
    fn li2_special_values() {
        let prec = 128;
        let zero = li2(&c(0.0, 0.0), prec).unwrap();
        assert!(zero.value.real().is_zero() && zero.value.imag().is_zero());

        let one = li2(&c(1.0, 0.0), prec).unwrap();
        let z2 = zeta2(prec);
        assert!(Float::with_val(prec, one.value.real() - &z2).abs() < 1e-35);
        assert_eq!(one.warning, Some(DilogWarning::BranchProximity));

        let m1 = li2(&c(-1.0, 0.0), prec).unwrap();
        let target = -Float::with_val(prec, &z2 / 2u32);
        assert!(Float::with_val(prec, m1.value.real() - &target).abs() < 1e-35);
        assert!(m1.value.imag().is_zero());
        assert!(m1.warning.is_none());
    }

    #[test]
    fn li2_half_closed_form() {
        // Li₂(1/2) = π²/12 − ln²2 / 2
        let prec = 200;
        let v = li2(&Complex::with_val(prec, (0.5, 0)), prec).unwrap().value;
        let ln2 = Float::with_val(prec, Constant::Log2);
        let expect = Float::with_val(prec, zeta2(prec) / 2u32) - Float::with_val(prec, ln2.square_ref()) / 2u32;
        assert!(Float::with_val(prec, v.real() - &expect).abs() < 1e-55);
    }

    #[test]
    fn real_segment_is_real() {
        for x in [-1.0, -0.75, -0.3, 0.2, 0.6, 0.9, 0.999] {
            let v = li2(&c(x, 0.0), 96).unwrap().value;
            assert!(v.imag().is_zero(), "Im Li₂({x}) = {}", v.imag());
        }
    }

    #[test]
    fn rejects_points_outside_disk() {
        assert!(matches!(li2(&c(1.1, 0.0), 64), Err(DilogError::OutsideDisk { .. })));
        assert!(li2(&c(0.0, 1.0 + 5e-7), 64).is_ok());
    }

    #[test]
    fn routes_agree_near_circle() {
        for (re, im) in [(0.3, 0.9), (-0.99, 0.1), (0.9, 0.4), (-0.2, -0.97), (0.7, 0.7)] {
            let z = c(re, im);
            let a = li2_with(&z, 128, Route::Direct).unwrap();
            let b = li2_with(&z, 128, Route::Duplication).unwrap();
            assert!(dist(&a.value, &b.value) < 1e-34, "{re}+{im}i");
        }
    }

    #[test]
    fn circle_u_endpoints() {
        let prec = 128;
        let z2 = zeta2(prec);
        let u0 = circle_u(&Float::new(prec)).unwrap();
        assert!(Float::with_val(prec, &u0 - &z2).abs() < 1e-36);
        let upi = circle_u(&pi(prec)).unwrap();
        assert!(Float::with_val(prec, upi + Float::with_val(prec, &z2 / 2u32)).abs() < 1e-36);
        let u2pi = circle_u(&Float::with_val(prec, pi(prec) * 2u32)).unwrap();
        assert!(Float::with_val(prec, &u2pi - &z2).abs() < 1e-36);
        assert!(circle_u(&Float::with_val(prec, 7)).is_err());
        assert!(circle_u(&Float::with_val(prec, -0.1)).is_err());
    }

    #[test]
    fn clausen_zeros() {
        let prec = 128;
        assert!(clausen(&Float::new(prec), prec).is_zero());
        assert!(clausen(&pi(prec), prec).abs() < 1e-36);
        assert!(clausen_quadrature(&pi(prec), prec).unwrap().abs() < 1e-34);
    }

    #[test]
    fn clausen_routes_agree() {
        let prec = 128;
        for t in [0.01, 0.5, 1.3, 2.066729664, 3.0, 4.5, 6.2] {
            let tf = Float::with_val(prec, t);
            let a = clausen(&tf, prec);
            let b = clausen_quadrature(&tf, prec).unwrap();
            assert!(Float::with_val(prec, &a - &b).abs() < 1e-32, "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn f_k_branch_conventions() {
        let prec = 96;
        let pos = f_k(&c(0.4, 0.0), 1, prec).unwrap();
        assert!(pos > 0);
        let neg = f_k(&c(-0.4, 0.0), 1, prec).unwrap();
        assert!(neg.is_zero());
        // f_k is never negative on the disk
        for (re, im) in [(-0.9, 0.1), (0.1, -0.95), (-0.5, -0.5)] {
            for k in 1..=3 {
                assert!(f_k(&c(re, im), k, prec).unwrap() >= 0);
            }
        }
        assert_eq!(f_k(&c(0.1, 0.0), 0, prec), Err(DilogError::BadIndex));
    }

    #[test]
    fn g_map_at_origin_is_one() {
        for (k, l) in [(1, 2), (1, 3), (2, 3)] {
            let g = G_map(&c(0.0, 0.0), k, l, 96).unwrap();
            assert!(dist(&g, &c(1.0, 0.0)) < 1e-25);
        }
        assert!(G_map(&c(0.1, 0.0), 2, 2, 64).is_err());
        assert!(G_map(&c(0.1, 0.0), 1, 4, 64).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let prec = 128;
        let x = c(-0.5, 0.6);
        for k in 1..=3 {
            let (_, d) = branch_and_derivative(&x, k, prec).unwrap();
            let h = 1e-7;
            let xp = Complex::with_val(prec, &x + h);
            let xm = Complex::with_val(prec, &x - h);
            let fp = branched_root(&xp, k, prec).unwrap().value;
            let fm = branched_root(&xm, k, prec).unwrap().value;
            let fd = Complex::with_val(prec, fp - fm) / (2.0 * h);
            assert!(dist(&fd, &d) < 1e-10, "k = {k}");
        }
    }
}
