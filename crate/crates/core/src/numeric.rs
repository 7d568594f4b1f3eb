//! Shared multiprecision helpers: exact Bernoulli numbers, double-exponential
//! quadrature and a few conversions used across the crate.

use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use rug::{ops::Pow, Assign, Complex, Float, Integer, Rational};

/// Even-index Bernoulli numbers `B_2, B_4, ...` as exact rationals.
///
/// Entry `k - 1` of the cache holds `B_{2k}`. The table is grown by
/// recomputation (tangent-number recurrence, integer arithmetic only) and is
/// read-mostly afterwards.
fn bernoulli_cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// Tangent numbers `T_1..=T_n` (1, 2, 16, 272, ...).
fn tangent_numbers(n: usize) -> Vec<Integer> {
    let mut t = vec![Integer::new(); n + 1];
    if n == 0 {
        return t;
    }
    t[1] = Integer::from(1);
    for k in 2..=n {
        let prev = Integer::from(&t[k - 1] * (k as u64 - 1));
        t[k] = prev;
    }
    for k in 2..=n {
        for j in k..=n {
            let a = Integer::from(&t[j - 1] * (j - k) as u64);
            let b = Integer::from(&t[j] * (j - k + 2) as u64);
            t[j] = a + b;
        }
    }
    t
}

fn compute_even_bernoulli(count: usize) -> Vec<Rational> {
    let t = tangent_numbers(count);
    (1..=count)
        .map(|k| {
            // B_{2k} = (-1)^{k-1} 2k T_k / (2^{2k} (2^{2k} - 1))
            let four_k = Integer::from(1) << (2 * k as u32);
            let den = Integer::from(&four_k - 1u32) * &four_k;
            let num = Integer::from(&t[k] * (2 * k) as u64);
            let mut r = Rational::from((num, den));
            if k % 2 == 0 {
                r = -r;
            }
            r
        })
        .collect()
}

/// `B_{2k}` for `k >= 1`.
pub fn bernoulli_even(k: usize) -> Rational {
    assert!(k >= 1, "B_0 and odd indices are not tabulated");
    {
        let cache = bernoulli_cache().read().expect("bernoulli cache poisoned");
        if let Some(b) = cache.get(k - 1) {
            return b.clone();
        }
    }
    let mut cache = bernoulli_cache().write().expect("bernoulli cache poisoned");
    if cache.len() < k {
        let target = k.max(2 * cache.len()).max(64);
        *cache = compute_even_bernoulli(target);
    }
    cache[k - 1].clone()
}

/// `B_{2k}` rounded to a float of `prec` bits.
pub fn bernoulli_even_float(k: usize, prec: u32) -> Float {
    Float::with_val(prec, &bernoulli_even(k))
}

/// `2^-bits` as an `f64` (saturating to 0 for very large `bits`).
pub fn ulp_f64(bits: u32) -> f64 {
    2f64.powi(-(bits.min(1070) as i32))
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// `|z|` rounded to `f64`.
pub fn abs_f64(z: &Complex) -> f64 {
    Float::with_val(64, z.abs_ref()).to_f64()
}

/// Magnitude of a multiprecision complex number as a low-precision float.
pub fn abs_float(z: &Complex) -> Float {
    Float::with_val(64, z.abs_ref())
}

/// Nearest `f64` complex; saturates to infinity outside the `f64` range.
pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn from_c64(z: Complex64, prec: u32) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

/// Double-exponential (tanh-sinh) quadrature of `f` over `[a, b]`.
///
/// The integrand receives abscissae computed as offsets from the nearer
/// endpoint, so integrable endpoint singularities (logarithmic, algebraic)
/// are resolved without cancellation. Levels are refined until two
/// successive estimates agree to `2^-prec` relative to the result.
pub fn tanh_sinh<F>(f: F, a: &Float, b: &Float, prec: u32) -> Float
where
    F: Fn(&Float) -> Float,
{
    let wp = prec + 24;
    let half = Float::with_val(wp, b - a) / 2u32;
    let mid = Float::with_val(wp, a + b) / 2u32;
    let half_pi = pi(wp) / 2u32;
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));

    // Contribution of the node t (and -t when t > 0), with its absolute size.
    let node = |t: &Float| -> (Float, Float) {
        let sh = Float::with_val(wp, t.sinh_ref());
        let ch = Float::with_val(wp, t.cosh_ref());
        let u = Float::with_val(wp, &half_pi * &sh);
        let cu = Float::with_val(wp, u.cosh_ref());
        // weight = half * (pi/2) cosh t / cosh^2(u)
        let w = Float::with_val(wp, &half * &half_pi) * &ch / Float::with_val(wp, cu.square_ref());
        // distance of the abscissa from the endpoint: half * 2 / (1 + e^{2|u|})
        let e2u = (Float::with_val(wp, u.abs_ref()) * 2u32).exp();
        let delta = Float::with_val(wp, &half * 2u32) / (e2u + 1u32);
        let mut acc = Float::new(wp);
        let mut mag = Float::new(wp);
        let mut add = |v: Float| {
            let c = v * &w;
            mag += Float::with_val(wp, c.abs_ref());
            acc += c;
        };
        if t.is_zero() {
            add(f(&mid));
        } else {
            let left = Float::with_val(wp, a + &delta);
            let right = Float::with_val(wp, b - &delta);
            if left > *a {
                add(f(&left));
            }
            if right < *b {
                add(f(&right));
            }
        }
        (acc, mag)
    };

    // Nodes are dropped once two in a row are negligible against ∫|f|.
    let mut h = Float::with_val(wp, 0.5);
    let (mut sum, mut abs_sum) = node(&Float::new(wp));
    let mut k = 1u32;
    let mut quiet = 0;
    loop {
        let t = Float::with_val(wp, &h * k);
        let (c, m) = node(&t);
        sum += &c;
        abs_sum += &m;
        quiet = if m < Float::with_val(wp, &eps * &abs_sum) { quiet + 1 } else { 0 };
        if quiet >= 2 || k > 64 {
            break;
        }
        k += 1;
    }
    let mut estimate = Float::with_val(wp, &sum * &h);
    let target = Float::with_val(wp, Float::i_exp(1, -(prec as i32 + 4)));
    for _level in 0..16 {
        h /= 2u32;
        let mut k = 1u32;
        let mut quiet = 0;
        loop {
            let t = Float::with_val(wp, &h * k);
            let (c, m) = node(&t);
            sum += &c;
            abs_sum += &m;
            quiet = if m < Float::with_val(wp, &eps * &abs_sum) { quiet + 1 } else { 0 };
            if quiet >= 2 && k > 8 {
                break;
            }
            k += 2;
            if k > 1 << 16 {
                break;
            }
        }
        let next = Float::with_val(wp, &sum * &h);
        let diff = Float::with_val(wp, &next - &estimate).abs();
        let scale = Float::with_val(wp, &abs_sum * &h);
        estimate.assign(&next);
        if diff < Float::with_val(wp, &scale * &target) {
            break;
        }
    }
    Float::with_val(prec, estimate)
}

/// Integer power of a float, exact exponent handling by MPFR.
pub fn powi(x: &Float, e: i32) -> Float {
    Float::with_val(x.prec(), x.pow(e))
}
