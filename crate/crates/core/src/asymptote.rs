//! Leading asymptotics of `F_n(x)` inside the unit disk and the ingredients
//! from the expansion of the generating function near `e^{2πih/k}`:
//!
//! * `w_{h,k}(x) = ln(1 − x^k)/(2k) + Σ_{k∤l} x^l / (l (e^{−2πilh/k} − 1))`;
//! * `Q_{h,k}(s) = Σ_{m,l ≥ 1} x^l e^{2πilmh/k} (lm)^{−s} / l` for `Re s > 1`;
//! * `I_k = π^{−1/2} n^{−3/4} [√Li₂(x^k)/k]^{1/2} exp(2√n √Li₂(x^k)/k)`.
//!
//! On the region where `f_k` dominates, `F_n(x) ≈ ½ e^{w} I_k` with the
//! phases `(−1)^n` for `k = 2` and `e^{−2πihn/3}`, `h = 1, 2` for `k = 3`.

use rug::{ops::Pow, Complex, Float, Integer};
use thiserror::Error;

use crate::attractor::{classify_region, AttractorError, Region, RegionLabel};
use crate::dilog::{li2, DilogError};
use crate::numeric::{abs_f64, bernoulli_even_float, pi};
use crate::polygen::ExactPolynomial;
use crate::solver::horner_eval;

/// `|x|` above which `w_{h,k}` is refused.
pub const SLOW_LIMIT: f64 = 1.0 - 1e-3;

/// Region margin below which the leading term is not trusted.
pub const NEAR_BOUNDARY: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum AsymptoticError {
    #[error(transparent)]
    Dilog(#[from] DilogError),
    #[error(transparent)]
    Attractor(#[from] AttractorError),
    #[error("need gcd(h, k) = 1 and 0 <= h < k, got h={h}, k={k}")]
    InvalidIndex { h: u32, k: u32 },
    #[error("|x| = {0} is too close to the unit circle for the series")]
    SlowConvergence(f64),
    #[error("Re s = {0} is not above 1")]
    DomainError(f64),
    #[error("Li2(x^k) is on the negative real axis")]
    BranchDegeneracy,
    #[error("x is within {margin:e} of a region boundary")]
    NearBoundary { margin: f64, candidates: Vec<AsymptoticEstimate> },
    #[error("|F_n(x)| is below its evaluation error")]
    EvaluationUnderflow,
}

fn check_index(h: u32, k: u32) -> Result<(), AsymptoticError> {
    let ok = k >= 1 && h < k && Integer::from(h).gcd(&Integer::from(k)) == 1;
    if ok {
        Ok(())
    } else {
        Err(AsymptoticError::InvalidIndex { h, k })
    }
}

/// `e^{iθ}` at `prec` bits.
fn cis(theta: &Float, prec: u32) -> Complex {
    let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// `e^{2πi·num/den}`.
fn root_of_unity(num: i64, den: u32, prec: u32) -> Complex {
    let r = num.rem_euclid(den as i64);
    let theta = pi(prec) * 2u32 * Float::with_val(prec, r) / den;
    cis(&theta, prec)
}

/// `w_{h,k}(x)` to `prec` bits.
pub fn w_hk(x: &Complex, h: u32, k: u32, prec: u32) -> Result<Complex, AsymptoticError> {
    check_index(h, k)?;
    let r = abs_f64(x);
    if r > SLOW_LIMIT {
        return Err(AsymptoticError::SlowConvergence(r));
    }
    let wp = prec + 32;
    let x = Complex::with_val(wp, x);
    let xk = Complex::with_val(wp, x.clone().pow(k));
    let mut sum = Complex::with_val(wp, Complex::with_val(wp, 1u32 - &xk).ln_ref()) / (2 * k);
    if k == 1 || r == 0.0 {
        return Ok(Complex::with_val(prec, sum));
    }
    // tail after L terms ≤ r^{L+1} / ((L+1)(1−r) sin(π/k))
    let sin_pk = (std::f64::consts::PI / k as f64).sin();
    let eps = 2f64.powi(-(prec as i32) - 8);
    let mut power = Complex::with_val(wp, 1u32);
    let mut l = 0u64;
    loop {
        l += 1;
        power *= &x;
        if l % k as u64 != 0 {
            let e = root_of_unity(-((l * h as u64) as i64), k, wp);
            let term = Complex::with_val(wp, &power / l) / (e - 1u32);
            sum += term;
        }
        let tail = r.powf(l as f64 + 1.0) / ((l as f64 + 1.0) * (1.0 - r) * sin_pk);
        if tail < eps {
            break;
        }
    }
    Ok(Complex::with_val(prec, sum))
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n + a)^{−s}` for `Re s > 1`, `a > 0`, by
/// Euler–Maclaurin summation. Returns the value and a bound on the
/// remainder.
pub fn hurwitz_zeta(s: &Complex, a: &Float, prec: u32) -> (Complex, f64) {
    let wp = prec + 32;
    let s = Complex::with_val(wp, s);
    let sigma = s.real().to_f64();
    let big_n = (prec / 3).max(16) + (abs_f64(&s) as u32);
    let neg_s = Complex::with_val(wp, -&s);
    let pow = |base: &Float| -> Complex {
        // base^{−s} = exp(−s ln base)
        let lb = Float::with_val(wp, base.ln_ref());
        Complex::with_val(wp, Complex::with_val(wp, &neg_s * lb).exp_ref())
    };
    let mut sum = Complex::new(wp);
    for n in 0..big_n {
        sum += pow(&Float::with_val(wp, a + n));
    }
    let na = Float::with_val(wp, a + big_n);
    let na_s = pow(&na);
    // (N+a)^{1−s}/(s−1) + (N+a)^{−s}/2
    sum += Complex::with_val(wp, &na_s * &na) / Complex::with_val(wp, &s - 1u32);
    sum += Complex::with_val(wp, &na_s / 2u32);
    let na2 = Float::with_val(wp, na.square_ref());
    let mut poch = Complex::with_val(wp, &s);
    let mut npow = Complex::with_val(wp, &na_s / &na);
    let mut fact = Float::with_val(wp, 2u32);
    let eps = 2f64.powi(-(wp as i32));
    let mut err = f64::INFINITY;
    for j in 1..(4 * prec as usize) {
        let b = bernoulli_even_float(j, wp);
        let term = Complex::with_val(wp, &poch * &npow) * b / &fact;
        let t = abs_f64(&term);
        sum += &term;
        let s_abs = abs_f64(&sum).max(f64::MIN_POSITIVE);
        // remainder bounded by the first omitted term times |s+2j+1|/(σ+2j+1)
        let tj = 2.0 * j as f64;
        let next_ratio = {
            let z = Complex::with_val(64, &s + (tj + 1.0));
            abs_f64(&z) / (sigma + tj + 1.0)
        };
        err = t * next_ratio;
        if t < eps * s_abs && j > 1 {
            break;
        }
        // s(s+1)…(s+2j−2) → s(s+1)…(s+2j)
        poch *= Complex::with_val(wp, &s + (tj - 1.0));
        poch *= Complex::with_val(wp, &s + tj);
        npow /= &na2;
        fact *= ((2 * j + 1) * (2 * j + 2)) as u64;
    }
    (Complex::with_val(prec, sum), err)
}

/// A value of `Q_{h,k}(s)`.
#[derive(Debug, Clone)]
pub struct QSeriesValue {
    pub h: u32,
    pub k: u32,
    pub s: Complex,
    pub x: Complex,
    pub value: Complex,
    pub truncation_error: f64,
}

/// `Q_{h,k}(s)` for `Re s > 1`.
///
/// The sum over `m` depends on `l` only through `ω = e^{2πilh/k}` and equals
/// `k^{−s} Σ_{j=1}^{k} ω^j ζ(s, j/k)`; the sum over `l` is geometric in `|x|`.
pub fn q_hk(s: &Complex, x: &Complex, h: u32, k: u32, prec: u32) -> Result<QSeriesValue, AsymptoticError> {
    check_index(h, k)?;
    let sigma = s.real().to_f64();
    if !(sigma > 1.0) {
        return Err(AsymptoticError::DomainError(sigma));
    }
    let r = abs_f64(x);
    if r > SLOW_LIMIT {
        return Err(AsymptoticError::SlowConvergence(r));
    }
    let wp = prec + 32;
    let s = Complex::with_val(wp, s);
    let make = |value: Complex, err: f64| QSeriesValue {
        h,
        k,
        s: Complex::with_val(prec, &s),
        x: Complex::with_val(prec, x),
        value: Complex::with_val(prec, value),
        truncation_error: err,
    };
    if r == 0.0 {
        return Ok(make(Complex::new(wp), 0.0));
    }
    // k^{−s}
    let neg_s = Complex::with_val(wp, -&s);
    let k_s = Complex::with_val(wp, Complex::with_val(wp, &neg_s * Float::with_val(wp, k).ln()).exp_ref());
    let zetas: Vec<(Complex, f64)> = (1..=k).map(|j| hurwitz_zeta(&s, &(Float::with_val(wp, j) / k), wp)).collect();
    let zeta_err: f64 = zetas.iter().map(|z| z.1).sum::<f64>() * abs_f64(&k_s);
    // inner[c] = Σ_m e^{2πimc/k} m^{−s}
    let inner: Vec<Complex> = (0..k)
        .map(|c| {
            let mut acc = Complex::new(wp);
            for (j, (z, _)) in zetas.iter().enumerate() {
                let w = root_of_unity(((j as u64 + 1) * c as u64) as i64, k, wp);
                acc += Complex::with_val(wp, &w * z);
            }
            acc * &k_s
        })
        .collect();
    let inner_max = inner.iter().map(abs_f64).fold(0.0, f64::max) + zeta_err;
    let x = Complex::with_val(wp, x);
    let neg_s1 = Complex::with_val(wp, -Complex::with_val(wp, &s + 1u32));
    let eps = 2f64.powi(-(prec as i32) - 8);
    let mut sum = Complex::new(wp);
    let mut power = Complex::with_val(wp, 1u32);
    let mut l = 0u64;
    let err_geo = loop {
        l += 1;
        power *= &x;
        let ls = Complex::with_val(wp, Complex::with_val(wp, &neg_s1 * Float::with_val(wp, l).ln()).exp_ref());
        let c = ((l * h as u64) % k as u64) as usize;
        sum += Complex::with_val(wp, &power * &ls) * &inner[c];
        // Σ_{l' > l} r^{l'} l'^{−σ−1} |inner| ≤ r^{l+1} (l+1)^{−σ−1} |inner| / (1 − r)
        let tail = r.powf(l as f64 + 1.0) * (l as f64 + 1.0).powf(-sigma - 1.0) * inner_max / (1.0 - r);
        if tail < eps * abs_f64(&sum).max(f64::MIN_POSITIVE) || l > 100_000 {
            break tail;
        }
    };
    // the Hurwitz remainders enter every l-term with weight |x|^l l^{−σ−1}
    let weight = r / (1.0 - r);
    Ok(make(sum, err_geo + zeta_err * weight))
}

/// `(s − 1) Q_{h,k}(s)` at `s = 1 + 10^{−j}` for `j` in `exponents`,
/// extrapolated to `s = 1` by Neville's scheme in `s − 1`.
pub fn q_residue(x: &Complex, h: u32, k: u32, exponents: &[i32], prec: u32) -> Result<Complex, AsymptoticError> {
    let wp = prec + 32;
    let mut eps = Vec::new();
    let mut vals = Vec::new();
    for &j in exponents {
        let e = Float::with_val(wp, 10u32).pow(-j);
        let s = Complex::with_val(wp, (Float::with_val(wp, &e + 1u32), 0));
        let q = q_hk(&s, x, h, k, wp)?;
        vals.push(Complex::with_val(wp, q.value * &e));
        eps.push(e);
    }
    let n = vals.len();
    for m in 1..n {
        for i in 0..n - m {
            // P_{i..i+m}(0) from P_{i..i+m−1} and P_{i+1..i+m}
            let num = Complex::with_val(wp, &vals[i + 1] * &eps[i]) - Complex::with_val(wp, &vals[i] * &eps[i + m]);
            let den = Float::with_val(wp, &eps[i] - &eps[i + m]);
            vals[i] = num / den;
        }
    }
    Ok(Complex::with_val(prec, &vals[0]))
}

/// `I_k(x, n) = π^{−1/2} n^{−3/4} [√Li₂(x^k)/k]^{1/2} exp(2√n √Li₂(x^k)/k)`,
/// principal branches throughout.
pub fn i_k_value(x: &Complex, n: u64, k: u32, prec: u32) -> Result<Complex, AsymptoticError> {
    let wp = prec + 32;
    let xk = Complex::with_val(wp, Complex::with_val(wp, x).pow(k));
    let li = li2(&xk, wp)?.value;
    let (re, im) = (li.real().to_f64(), li.imag().to_f64());
    if re < 0.0 && im.abs() < 1e-10 {
        return Err(AsymptoticError::BranchDegeneracy);
    }
    let root = Complex::with_val(wp, li.sqrt_ref()) / k;
    let amp = Complex::with_val(wp, root.sqrt_ref());
    let nf = Float::with_val(wp, n);
    let sqrt_n = Float::with_val(wp, nf.sqrt_ref());
    let expo = Complex::with_val(wp, Complex::with_val(wp, &root * sqrt_n) * 2u32).exp();
    let pre = Float::with_val(wp, pi(wp).sqrt()).recip() / Float::with_val(wp, nf.pow(Float::with_val(wp, 0.75)));
    Ok(Complex::with_val(prec, amp * expo * pre))
}

/// The leading term and what went into it.
#[derive(Debug, Clone)]
pub struct AsymptoticEstimate {
    pub x: Complex,
    pub n: u64,
    pub region: RegionLabel,
    pub k: u32,
    pub i_k: Complex,
    /// `(h, w_{h,k})` for each term used.
    pub w: Vec<(u32, Complex)>,
    /// Coefficient multiplying `I_k / 2`.
    pub phase_factor: Complex,
    pub value: Complex,
}

/// Leading term for region `R(k)` at a point of the closed upper half disk.
fn estimate_for(x: &Complex, n: u64, k: u32, region: RegionLabel, prec: u32) -> Result<AsymptoticEstimate, AsymptoticError> {
    let wp = prec + 32;
    let i_k = i_k_value(x, n, k, wp)?;
    let hs: Vec<u32> = match k {
        1 => vec![0],
        2 => vec![1],
        _ => vec![1, 2],
    };
    let mut w = Vec::new();
    let mut factor = Complex::new(wp);
    for h in hs {
        let whk = w_hk(x, h, k, wp)?;
        // e^{−2πihn/k}: (−1)^n for k = 2
        let phase = root_of_unity(-((h as u64 * (n % k as u64)) as i64), k, wp);
        factor += Complex::with_val(wp, whk.exp_ref()) * phase;
        w.push((h, Complex::with_val(prec, whk)));
    }
    let value = Complex::with_val(wp, &factor * &i_k) / 2u32;
    Ok(AsymptoticEstimate {
        x: x.clone(),
        n,
        region,
        k,
        i_k: Complex::with_val(prec, i_k),
        w,
        phase_factor: Complex::with_val(prec, factor),
        value: Complex::with_val(prec, value),
    })
}

/// `F_n(x) ≈ ½ e^{w_{0,1}} I₁` on `R(1)`, `½ (−1)^n e^{w_{1,2}} I₂` on `R(2)`
/// and `½ (e^{−2πin/3} e^{w_{1,3}} + e^{−4πin/3} e^{w_{2,3}}) I₃` on `R(3)`.
/// Points in the lower half plane use `F_n(x̄) = conj F_n(x)`.
pub fn leading_asymptotic(x: &Complex, n: u64, prec: u32) -> Result<AsymptoticEstimate, AsymptoticError> {
    let lower = x.imag().is_sign_negative() && !x.imag().is_zero();
    let xu = if lower { Complex::with_val(prec, x.conj_ref()) } else { x.clone() };
    let region = classify_region(&xu, prec)?;
    let finish = |mut e: AsymptoticEstimate| {
        if lower {
            e.x = x.clone();
            e.value = Complex::with_val(prec, e.value.conj_ref());
            e.i_k = Complex::with_val(prec, e.i_k.conj_ref());
            e.phase_factor = Complex::with_val(prec, e.phase_factor.conj_ref());
            for w in e.w.iter_mut() {
                w.1 = Complex::with_val(prec, w.1.conj_ref());
            }
        }
        e
    };
    if region.margin < NEAR_BOUNDARY {
        let f = crate::dilog::f_triple(&xu, prec)?;
        let fmax = f.iter().map(|v| v.to_f64()).fold(f64::NEG_INFINITY, f64::max);
        let candidates = (1..=3u32)
            .filter(|&k| fmax - f[k as usize - 1].to_f64() < NEAR_BOUNDARY)
            .filter_map(|k| estimate_for(&xu, n, k, region, prec).ok().map(&finish))
            .collect();
        return Err(AsymptoticError::NearBoundary { margin: region.margin, candidates });
    }
    Ok(finish(estimate_for(&xu, n, region.value.index(), region, prec)?))
}

/// `F_n(x)` from the exact coefficients with `prec` fraction bits, refusing
/// values that are not resolved.
pub fn exact_value(p: &ExactPolynomial, x: &Complex, prec: u32) -> Result<Complex, AsymptoticError> {
    let (v, bound) = horner_eval(p, x, prec);
    let a = Float::with_val(64, v.abs_ref());
    if a <= bound {
        return Err(AsymptoticError::EvaluationUnderflow);
    }
    Ok(v)
}

/// `ln |F_n(x)|`.
pub fn log_abs(p: &ExactPolynomial, x: &Complex, prec: u32) -> Result<f64, AsymptoticError> {
    let v = exact_value(p, x, prec)?;
    Ok(Float::with_val(64, v.abs_ref()).ln().to_f64())
}

/// `ln |F_n(x)| / (2√n)`, whose limit inside the disk is `f_max(x)`.
pub fn scaled_log_limit(p: &ExactPolynomial, x: &Complex, prec: u32) -> Result<f64, AsymptoticError> {
    let n = p.degree() as f64;
    Ok(log_abs(p, x, prec)? / (2.0 * n.sqrt()))
}

/// `ln |F_n(x)| / n`, whose limit is `max(0, ln |x|)`.
pub fn log_over_degree(p: &ExactPolynomial, x: &Complex, prec: u32) -> Result<f64, AsymptoticError> {
    Ok(log_abs(p, x, prec)? / p.degree() as f64)
}

/// Which region a point is in, for reporting.
pub fn region_of(x: &Complex, prec: u32) -> Result<Region, AsymptoticError> {
    let xu = Complex::with_val(prec, (x.real(), Float::with_val(prec, x.imag().abs_ref())));
    Ok(classify_region(&xu, prec)?.value)
}
