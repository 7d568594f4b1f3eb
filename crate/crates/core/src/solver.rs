//! Simultaneous root finding (Aberth–Ehrlich) for polynomials with exact
//! integer coefficients.
//!
//! The solve runs in two phases. A double-precision sweep places the roots
//! that `f64` can resolve at all; roots whose value drowns in rounding noise
//! are frozen there. The multiprecision phase then iterates every root at its
//! own working precision, raising that precision whenever the residual sinks
//! below the Horner error bound before the Aberth correction is small enough.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rug::{float::Round, Assign, Complex, Float, Integer};
use thiserror::Error;

use crate::numeric::{from_c64, to_c64};
use crate::polygen::ExactPolynomial;

/// Fraction bits with which every root starts its multiprecision iteration.
pub const START_PRECISION: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialRadiusPolicy {
    /// All starting points on the unit circle.
    UnitCircleCluster,
    /// Circles whose radii come from the upper convex hull of `(k, ln|a_k|)`.
    #[default]
    NewtonPolygon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateSchedule {
    #[default]
    Jacobi,
    GaussSeidel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Precision of the returned zeros, and the accuracy they are driven to.
    pub precision_bits: u32,
    pub max_iterations: usize,
    /// Relative size of the last Aberth correction at convergence.
    pub convergence_tol: f64,
    pub initial_radius_policy: InitialRadiusPolicy,
    pub update_schedule: UpdateSchedule,
    /// Ceiling for the per-root working precision.
    pub max_precision_bits: u32,
}

impl SolverConfig {
    pub fn with_precision(precision_bits: u32) -> Self {
        SolverConfig {
            precision_bits,
            convergence_tol: 2f64.powi(8 - precision_bits as i32),
            ..Default::default()
        }
    }

    /// Smallest tolerance allowed at this precision, `2^(8 − precision_bits)`.
    pub fn min_tol(&self) -> f64 {
        2f64.powi(8 - self.precision_bits as i32)
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            precision_bits: 128,
            max_iterations: 500,
            convergence_tol: 2f64.powi(-120),
            initial_radius_policy: InitialRadiusPolicy::NewtonPolygon,
            update_schedule: UpdateSchedule::Jacobi,
            max_precision_bits: 4096,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Zero {
    pub z: Complex,
    /// `|F(z)|` divided by the Horner error bound at the root's working precision.
    pub residual: f64,
    pub converged: bool,
    /// Radius of a disk around `z` guaranteed to contain a zero of `F`.
    pub radius: f64,
    /// Inclusion disk overlaps another one.
    pub cluster: bool,
    /// Working precision of the final evaluation.
    pub working_bits: u32,
}

#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub degree: usize,
    /// All `degree` zeros; the exact zeros at the origin come first.
    pub zeros: Vec<Zero>,
    pub origin_multiplicity: usize,
    pub precision_bits: u32,
    pub iterations: usize,
    /// Multiprecision Horner passes spent, keyed by working precision.
    pub evaluations: Vec<(u32, usize)>,
}

impl ZeroSet {
    pub fn all_converged(&self) -> bool {
        self.zeros.iter().all(|z| z.converged)
    }

    pub fn points(&self) -> impl Iterator<Item = &Complex> {
        self.zeros.iter().map(|z| &z.z)
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.points().map(to_c64).collect()
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("degree must be at least 1")]
    ConstantPolynomial,
    #[error("{unconverged} of {} zeros unconverged after {} sweeps", partial.degree, partial.iterations)]
    NonConvergence { partial: Box<ZeroSet>, unconverged: usize },
    #[error("{stuck} zeros need more than {max_bits} bits: {reason}")]
    PrecisionExhausted { partial: Option<Box<ZeroSet>>, stuck: usize, max_bits: u32, reason: String },
    #[error("|F'(z)| is below its rounding error bound")]
    DerivativeUnderflow,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One fixed-point Horner pass at a point `z`.
///
/// Inside the closed unit disk the pass evaluates `F` itself; outside it
/// evaluates the reversed polynomial `R(w) = w^d F(1/w)` at `w = 1/z`, so that
/// every intermediate stays bounded by `Σ|a_j|`. In both cases
/// `value / slope = F(z) / F'(z)`.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: Complex,
    pub slope: Complex,
    pub reversed: bool,
    /// `log₂` of the bound on the error of `value` as a value at `z`, rounding
    /// of `z` (or `1/z`) onto the `2^−P` grid included.
    pub log2_bound: f64,
    pub log2_slope_bound: f64,
    pub frac_bits: u32,
}

impl Evaluation {
    pub fn log2_abs_value(&self) -> f64 {
        log2_abs(&self.value)
    }

    pub fn log2_abs_slope(&self) -> f64 {
        log2_abs(&self.slope)
    }

    /// The value is indistinguishable from zero at this precision.
    pub fn in_noise(&self) -> bool {
        self.log2_abs_value() <= self.log2_bound
    }

    pub fn error_bound(&self) -> Float {
        pow2_float(self.log2_bound)
    }

    /// Newton correction `F(z)/F'(z)`, to 64 bits.
    pub fn newton(&self) -> Complex {
        Complex::with_val(64, &self.value / &self.slope)
    }

    /// `|F(z)|` over its error bound.
    pub fn residual(&self) -> f64 {
        (self.log2_abs_value() - self.log2_bound).exp2()
    }

    /// Radius of a disk about `z` that provably contains a zero:
    /// `d (|F| + E) / (|F'| − E')`, or infinity if the slope is not resolved.
    pub fn inclusion_radius(&self, d: usize) -> f64 {
        let ls = self.log2_abs_slope();
        if ls <= self.log2_slope_bound + 1.0 {
            return f64::INFINITY;
        }
        let num = log2_add(self.log2_abs_value(), self.log2_bound);
        let den = ls + (1.0 - (self.log2_slope_bound - ls).exp2()).log2();
        ((d as f64).log2() + num - den).exp2()
    }
}

fn log2_abs(z: &Complex) -> f64 {
    let a = Float::with_val(64, z.abs_ref());
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        a.log2().to_f64()
    }
}

/// `log₂(2^a + 2^b)`.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn pow2_float(e: f64) -> Float {
    if e == f64::NEG_INFINITY {
        return Float::new(64);
    }
    let int = e.floor();
    let frac = 2f64.powf(e - int);
    Float::with_val(64, frac) << (int as i32)
}

/// `log₂ Σ_{j<d} r^j`, rounded up.
fn log2_geometric(r: f64, d: usize) -> f64 {
    if d == 0 {
        return f64::NEG_INFINITY;
    }
    let r = r * (1.0 + 1e-12);
    let df = d as f64;
    if (r - 1.0).abs() < 1e-9 {
        return df.log2() + (df - 1.0) * r.max(1.0).log2();
    }
    if r < 1.0 {
        ((1.0 - r.powf(df)) / (1.0 - r)).log2()
    } else {
        df * r.log2() + (-(-df * r.log2()).exp2()).ln_1p() / std::f64::consts::LN_2 - (r - 1.0).log2()
    }
}

/// `round(x · 2^p)`.
fn to_fixed(x: &Float, p: u32) -> Integer {
    let scaled = Float::with_val(x.prec().max(64) + p, x << p);
    scaled.to_integer().expect("finite coordinate")
}

/// Horner in fixed point with `p` fraction bits: `coeffs` are the integer
/// coefficients times `2^p`, highest power first, and `x + iy` is the point
/// times `2^p`. Returns the value and derivative, also scaled by `2^p`.
///
/// Products are exact; each of the two `>> p` per complex product floors, so
/// every multiply-add contributes at most `√2 · 2^−p` of error.
fn horner_fixed<'a>(mut coeffs: impl Iterator<Item = &'a Integer>, x: &Integer, y: &Integer, p: u32) -> [Integer; 4] {
    let ymx = Integer::from(y - x);
    let xpy = Integer::from(x + y);
    let mut a = coeffs.next().expect("nonempty").clone();
    let mut b = Integer::new();
    let mut da = Integer::new();
    let mut db = Integer::new();
    let (mut s, mut k1, mut k2, mut k3) = (Integer::new(), Integer::new(), Integer::new(), Integer::new());
    for c in coeffs {
        // (u + iv)(x + iy) = [x(u+v) − v(x+y)] + i[x(u+v) + u(y−x)]
        s.assign(&da + &db);
        k1.assign(&s * x);
        k2.assign(&da * &ymx);
        k3.assign(&db * &xpy);
        da.assign(&k1 - &k3);
        da >>= p;
        da += &a;
        db.assign(&k1 + &k2);
        db >>= p;
        db += &b;

        s.assign(&a + &b);
        k1.assign(&s * x);
        k2.assign(&a * &ymx);
        k3.assign(&b * &xpy);
        a.assign(&k1 - &k3);
        a >>= p;
        a += c;
        b.assign(&k1 + &k2);
        b >>= p;
    }
    [a, b, da, db]
}

fn fixed_to_complex(re: &Integer, im: &Integer, p: u32) -> Complex {
    let bits = re.significant_bits().max(im.significant_bits()).max(2);
    let c = Complex::with_val(bits, (re, im));
    c >> p
}

/// Polynomial with exact coefficients, lowest degree first, and cached
/// fixed-point copies of them per precision.
#[derive(Debug)]
pub struct Evaluator {
    coeffs: Vec<Integer>,
    shifted: Mutex<HashMap<u32, Arc<Vec<Integer>>>>,
    counts: Mutex<HashMap<u32, usize>>,
}

impl Evaluator {
    pub fn new(coeffs: Vec<Integer>) -> Self {
        Evaluator { coeffs, shifted: Mutex::new(HashMap::new()), counts: Mutex::new(HashMap::new()) }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    /// Number of evaluations so far per precision, ascending.
    pub fn evaluation_counts(&self) -> Vec<(u32, usize)> {
        let mut v: Vec<(u32, usize)> = self.counts.lock().expect("counter poisoned").iter().map(|(&k, &v)| (k, v)).collect();
        v.sort_unstable();
        v
    }

    fn shifted(&self, p: u32) -> Arc<Vec<Integer>> {
        *self.counts.lock().expect("counter poisoned").entry(p).or_insert(0) += 1;
        let mut cache = self.shifted.lock().expect("coefficient cache poisoned");
        cache.entry(p).or_insert_with(|| Arc::new(self.coeffs.iter().map(|c| Integer::from(c << p)).collect())).clone()
    }

    /// Evaluates at `z` with `p` fraction bits, reversing outside the unit disk.
    pub fn eval(&self, z: &Complex, p: u32) -> Evaluation {
        let r = Float::with_val(64, z.abs_ref()).to_f64();
        if r <= 1.0 {
            self.eval_direct(z, p)
        } else {
            self.eval_reversed(z, p)
        }
    }

    /// `F(z)` and `F'(z)` without reversal, whatever `|z|`.
    pub fn eval_direct(&self, z: &Complex, p: u32) -> Evaluation {
        let cs = self.shifted(p);
        let d = self.degree();
        let x = to_fixed(z.real(), p);
        let y = to_fixed(z.imag(), p);
        let [a, b, da, db] = horner_fixed(cs.iter().rev(), &x, &y, p);
        let value = fixed_to_complex(&a, &b, p);
        let slope = fixed_to_complex(&da, &db, p);
        let r = Float::with_val(64, z.abs_ref()).to_f64();
        let (round, dround) = fixed_bounds(r, d, p);
        // moving z onto the grid shifts F by at most |F'| 2^−p / √2
        let grid = log2_abs(&slope) - p as f64 - 0.5;
        Evaluation {
            value,
            slope,
            reversed: false,
            log2_bound: log2_add(round, log2_add(grid, dround - p as f64 - 0.5)),
            log2_slope_bound: dround,
            frac_bits: p,
        }
    }

    fn eval_reversed(&self, z: &Complex, p: u32) -> Evaluation {
        let cs = self.shifted(p);
        let d = self.degree();
        let w = Complex::with_val(p + 64, z.recip_ref());
        let x = to_fixed(w.real(), p);
        let y = to_fixed(w.imag(), p);
        let wg = fixed_to_complex(&x, &y, p);
        // R(w) = Σ a_j w^{d−j}: Horner from a_0
        let [a, b, da, db] = horner_fixed(cs.iter(), &x, &y, p);
        let rv = fixed_to_complex(&a, &b, p);
        let rd = fixed_to_complex(&da, &db, p);
        let rw = Float::with_val(64, wg.abs_ref()).to_f64();
        let (round, dround) = fixed_bounds(rw, d, p);
        let grid = log2_abs(&rd) - p as f64 - 0.5;
        // F/F' = R / (w (d R − w R'))
        let wide = rv.prec().0.max(rd.prec().0).max(p + 64);
        let mut slope = Complex::with_val(wide, &rv * d as u32);
        slope -= Complex::with_val(wide, &wg * &rd);
        slope *= &wg;
        let lw = log2_abs(&wg);
        let value_bound = log2_add(round, log2_add(grid, dround - p as f64 - 0.5));
        let slope_bound = lw + log2_add((d as f64).log2() + value_bound, lw + dround);
        Evaluation { value: rv, slope, reversed: true, log2_bound: value_bound, log2_slope_bound: slope_bound, frac_bits: p }
    }
}

/// `log₂` of the rounding bounds for value and derivative of a fixed-point
/// Horner pass at modulus `r`.
fn fixed_bounds(r: f64, d: usize, p: u32) -> (f64, f64) {
    let s0 = log2_geometric(r, d);
    let half = 0.5 - p as f64;
    // Σ_m r^{d−1−m} S_m with S_m = Σ_{i<m} r^i, at most S0² and, for r > 1,
    // at most d r^{d−1} / (r − 1)
    let mut cross = 2.0 * s0;
    if r > 1.0 + 1e-9 {
        let r = r * (1.0 + 1e-12);
        cross = cross.min((d as f64).log2() + (d as f64 - 1.0) * r.log2() - (r - 1.0).log2());
    }
    (half + s0, half + log2_add(s0, cross))
}

/// `F(z)` with `prec` fraction bits and a rigorous bound on its error.
pub fn horner_eval(p: &ExactPolynomial, z: &Complex, prec: u32) -> (Complex, Float) {
    let e = Evaluator::new(p.coeffs.clone()).eval_direct(z, prec);
    let bound = e.error_bound();
    (e.value, bound)
}

/// Newton iteration with `prec` fraction bits from `z`, stopping once the
/// residual is in rounding noise or stops decreasing. The result never has a
/// larger residual than the input.
pub fn newton_polish(p: &ExactPolynomial, z: &Complex, prec: u32) -> Result<Complex, SolverError> {
    let ev = Evaluator::new(p.coeffs.clone());
    newton_polish_with(&ev, z, prec)
}

pub fn newton_polish_with(ev: &Evaluator, z: &Complex, prec: u32) -> Result<Complex, SolverError> {
    let work = prec + 64;
    let mut best = Complex::with_val(work, z);
    let mut e = ev.eval(&best, prec);
    for _ in 0..64 {
        if e.in_noise() {
            break;
        }
        if e.log2_abs_slope() <= e.log2_slope_bound {
            return Err(SolverError::DerivativeUnderflow);
        }
        let cand = Complex::with_val(work, &best - e.newton());
        let ce = ev.eval(&cand, prec);
        if ce.log2_abs_value() >= e.log2_abs_value() {
            break;
        }
        best = cand;
        e = ce;
    }
    Ok(Complex::with_val(prec, best))
}

/// Starting points, deterministic and never on the real axis.
pub fn initial_guesses(coeffs: &[Integer], policy: InitialRadiusPolicy) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let mut out = Vec::with_capacity(d);
    let ring = |m: usize, r: f64, offset: f64, out: &mut Vec<Complex64>| {
        for t in 0..m {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / m as f64 + std::f64::consts::PI / (2.0 * m as f64) + offset;
            out.push(Complex64::from_polar(r, theta));
        }
    };
    match policy {
        InitialRadiusPolicy::UnitCircleCluster => ring(d, 1.0, 0.0, &mut out),
        InitialRadiusPolicy::NewtonPolygon => {
            let pts: Vec<(usize, f64)> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j, Float::with_val(64, c).abs().ln().to_f64()))
                .collect();
            let hull = upper_hull(&pts);
            for (e, w) in hull.windows(2).enumerate() {
                let ((i, li), (j, lj)) = (w[0], w[1]);
                let m = j - i;
                let r = ((li - lj) / m as f64).exp();
                ring(m, r, 0.5 * e as f64, &mut out);
            }
        }
    }
    out
}

/// Upper convex hull of points sorted by abscissa.
fn upper_hull(pts: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or below the chord a–p
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Double-precision Aberth sweeps. Roots whose value is lost in rounding
/// noise are left where they are.
fn f64_phase(coeffs: &[Integer], z: &mut [Complex64], sweeps: usize) {
    let d = coeffs.len() - 1;
    // scale so the largest coefficient is near 2^600
    let max_bits = coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0) as i32;
    let shift = (max_bits - 600).max(0);
    let c: Vec<f64> = coeffs.iter().map(|c| Float::with_val(64, c).to_f64() * 2f64.powi(-shift)).collect();
    let abs_c: Vec<f64> = c.iter().map(|x| x.abs()).collect();
    let noise_factor = 4.0 * (d as f64 + 1.0) * f64::EPSILON;

    let newton = |x: Complex64| -> Option<Complex64> {
        let r = x.norm();
        if r <= 1.0 {
            let (mut p, mut dp, mut b) = (Complex64::new(c[d], 0.0), Complex64::new(0.0, 0.0), abs_c[d]);
            for j in (0..d).rev() {
                dp = dp * x + p;
                p = p * x + c[j];
                b = b * r + abs_c[j];
            }
            if p.norm() <= noise_factor * b {
                return None;
            }
            Some(p / dp)
        } else {
            // F(z) = z^d R(1/z), R(w) = Σ c_j w^{d−j}; N = 1 / (w (d − w R'/R))
            let w = x.inv();
            let rw = w.norm();
            let (mut p, mut dp, mut b) = (Complex64::new(c[0], 0.0), Complex64::new(0.0, 0.0), abs_c[0]);
            for j in 1..=d {
                dp = dp * w + p;
                p = p * w + c[j];
                b = b * rw + abs_c[j];
            }
            if p.norm() <= noise_factor * b {
                return None;
            }
            Some((w * (Complex64::new(d as f64, 0.0) - w * dp / p)).inv())
        }
    };

    let mut done = vec![false; d];
    for _ in 0..sweeps {
        let snapshot = z.to_vec();
        let steps: Vec<Option<Complex64>> = (0..d)
            .into_par_iter()
            .map(|i| {
                if done[i] {
                    return None;
                }
                let n = newton(snapshot[i])?;
                let s: Complex64 = snapshot.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &zj)| (snapshot[i] - zj).inv()).sum();
                Some(n / (Complex64::new(1.0, 0.0) - n * s))
            })
            .collect();
        let mut moved = false;
        for i in 0..d {
            if done[i] {
                continue;
            }
            match steps[i] {
                Some(delta) if delta.is_finite() => {
                    z[i] -= delta;
                    if delta.norm() <= 1e-14 * z[i].norm() {
                        done[i] = true;
                    } else {
                        moved = true;
                    }
                }
                _ => done[i] = true,
            }
        }
        if !moved {
            break;
        }
    }
}

#[derive(Debug, Clone)]
struct RootState {
    z: Complex,
    /// Fraction bits of the fixed-point evaluation.
    frac: u32,
    converged: bool,
    exhausted: bool,
    last: Option<Evaluation>,
}

enum Outcome {
    Step(Complex),
    Converged,
    Escalate,
}

/// All zeros of `p`.
pub fn aberth_solve(p: &ExactPolynomial, cfg: &SolverConfig) -> Result<ZeroSet, SolverError> {
    aberth_solve_coeffs(&p.coeffs, cfg)
}

pub fn aberth_solve_coeffs(coeffs: &[Integer], cfg: &SolverConfig) -> Result<ZeroSet, SolverError> {
    let top = coeffs.iter().rposition(|c| !c.is_zero()).ok_or(SolverError::ZeroPolynomial)?;
    if top == 0 {
        return Err(SolverError::ConstantPolynomial);
    }
    if cfg.convergence_tol < cfg.min_tol() {
        return Err(SolverError::PrecisionExhausted {
            partial: None,
            stuck: top,
            max_bits: cfg.precision_bits,
            reason: format!("tolerance {:e} is below 2^(8 - {})", cfg.convergence_tol, cfg.precision_bits),
        });
    }
    let origin = coeffs.iter().position(|c| !c.is_zero()).expect("nonzero polynomial");
    let reduced: Vec<Integer> = coeffs[origin..=top].to_vec();
    let d = reduced.len() - 1;
    let out_prec = cfg.precision_bits;

    let mut zeros: Vec<Zero> = (0..origin)
        .map(|_| Zero {
            z: Complex::new(out_prec),
            residual: 0.0,
            converged: true,
            radius: 0.0,
            cluster: origin > 1,
            working_bits: out_prec,
        })
        .collect();
    if d == 0 {
        return Ok(ZeroSet {
            degree: top,
            zeros,
            origin_multiplicity: origin,
            precision_bits: out_prec,
            iterations: 0,
            evaluations: Vec::new(),
        });
    }

    let mut guess = initial_guesses(&reduced, cfg.initial_radius_policy);
    f64_phase(&reduced, &mut guess, 60);
    let ev = Evaluator::new(reduced);
    let start = START_PRECISION.min(cfg.max_precision_bits);
    let mut roots: Vec<RootState> = guess
        .iter()
        .map(|&g| RootState { z: from_c64(g, start + 64), frac: start, converged: false, exhausted: false, last: None })
        .collect();
    let mut approx: Vec<Complex64> = guess;
    let log2_tol = cfg.convergence_tol.log2();

    let step_for = |i: usize, root: &RootState, approx: &[Complex64]| -> (Outcome, Evaluation) {
        let e = ev.eval(&root.z, root.frac);
        if e.value.real().is_zero() && e.value.imag().is_zero() {
            return (Outcome::Converged, e);
        }
        let n = e.newton();
        let zi = approx[i];
        let mut s = Complex64::new(0.0, 0.0);
        for (j, &zj) in approx.iter().enumerate() {
            if j != i {
                s += (zi - zj).inv();
            }
        }
        // δ = N / (1 − N S)
        let ns = Complex::with_val(64, &n * Complex::with_val(64, (s.re, s.im)));
        let delta = Complex::with_val(64, &n / (1u32 - ns));
        let finite = delta.real().is_finite() && delta.imag().is_finite();
        let small = finite && log2_abs(&delta) <= log2_tol + log2_abs(&root.z);
        let outcome = match (e.in_noise(), small) {
            (true, true) => Outcome::Converged,
            (true, false) => Outcome::Escalate,
            (false, _) if !finite => Outcome::Escalate,
            (false, _) => Outcome::Step(delta),
        };
        (outcome, e)
    };

    let mut iterations = 0;
    for sweep in 0..cfg.max_iterations {
        let active: Vec<usize> = (0..d).filter(|&i| !roots[i].converged && !roots[i].exhausted).collect();
        if active.is_empty() {
            break;
        }
        iterations = sweep + 1;
        match cfg.update_schedule {
            UpdateSchedule::Jacobi => {
                let results: Vec<(usize, Outcome, Evaluation)> = active
                    .par_iter()
                    .map(|&i| {
                        let (o, e) = step_for(i, &roots[i], &approx);
                        (i, o, e)
                    })
                    .collect();
                for (i, o, e) in results {
                    apply(&mut roots[i], &mut approx[i], o, e, cfg.max_precision_bits);
                }
            }
            UpdateSchedule::GaussSeidel => {
                for i in active {
                    let (o, e) = step_for(i, &roots[i], &approx);
                    apply(&mut roots[i], &mut approx[i], o, e, cfg.max_precision_bits);
                }
            }
        }
    }

    for r in roots.iter_mut() {
        if r.last.is_none() {
            r.last = Some(ev.eval(&r.z, r.frac));
        }
    }
    let mut found: Vec<Zero> = roots
        .iter()
        .map(|r| {
            let e = r.last.as_ref().expect("evaluated above");
            Zero {
                z: Complex::with_val_round(out_prec, &r.z, (Round::Nearest, Round::Nearest)).0,
                residual: e.residual(),
                converged: r.converged,
                radius: e.inclusion_radius(d),
                cluster: false,
                working_bits: r.frac,
            }
        })
        .collect();
    flag_clusters(&mut found);
    zeros.extend(found);
    let set = ZeroSet {
        degree: top,
        zeros,
        origin_multiplicity: origin,
        precision_bits: out_prec,
        iterations,
        evaluations: ev.evaluation_counts(),
    };

    let stuck = roots.iter().filter(|r| r.exhausted).count();
    if stuck > 0 {
        return Err(SolverError::PrecisionExhausted {
            partial: Some(Box::new(set)),
            stuck,
            max_bits: cfg.max_precision_bits,
            reason: "residual reached rounding noise before the correction met the tolerance".into(),
        });
    }
    let unconverged = set.zeros.iter().filter(|z| !z.converged).count();
    if unconverged > 0 {
        return Err(SolverError::NonConvergence { partial: Box::new(set), unconverged });
    }
    Ok(set)
}

fn apply(root: &mut RootState, approx: &mut Complex64, outcome: Outcome, e: Evaluation, max_bits: u32) {
    match outcome {
        Outcome::Converged => {
            root.converged = true;
            root.last = Some(e);
        }
        Outcome::Escalate => {
            if root.frac >= max_bits {
                root.exhausted = true;
                root.last = Some(e);
            } else {
                root.frac = (root.frac + (root.frac / 2).max(64)).min(max_bits);
                root.z = Complex::with_val(root.frac + 64, &root.z);
                root.last = None;
            }
        }
        Outcome::Step(delta) => {
            root.z -= delta;
            *approx = to_c64(&root.z);
            root.last = None;
        }
    }
}

/// Marks zeros whose inclusion disks overlap.
fn flag_clusters(zeros: &mut [Zero]) {
    let mut order: Vec<(f64, f64, f64, usize)> =
        zeros.iter().enumerate().map(|(i, z)| (z.z.real().to_f64(), z.z.imag().to_f64(), z.radius, i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let max_r = order.iter().map(|o| o.2).fold(0.0, f64::max);
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[b].0 - order[a].0 > order[a].2 + max_r {
                break;
            }
            let (dx, dy) = (order[b].0 - order[a].0, order[b].1 - order[a].1);
            if dx.hypot(dy) <= order[a].2 + order[b].2 {
                zeros[order[a].3].cluster = true;
                zeros[order[b].3].cluster = true;
            }
        }
    }
}

/// Vieta checks against the top coefficients.
#[derive(Debug, Clone)]
pub struct ChecksumReport {
    /// `|Σ z + a_{n−1}/a_n|` over the zeros as computed.
    pub sum_residual: f64,
    /// `|e₂ − a_{n−2}/a_n|`, with `e₂ = ((Σz)² − Σz²)/2`.
    pub e2_residual: f64,
    pub raw_sum: Complex,
    pub raw_e2: Complex,
    /// The same after snapping conjugate pairs and near-real zeros.
    pub paired_sum_residual: f64,
    pub paired_e2_residual: f64,
    pub paired_sum: Complex,
    pub paired_e2: Complex,
}

pub fn checksum_report(zs: &ZeroSet, p: &ExactPolynomial) -> ChecksumReport {
    let prec = zs.precision_bits + 64;
    let n = p.degree();
    let an = Float::with_val(prec, &p.coeffs[n]);
    let sum_target = if n >= 1 { -Float::with_val(prec, &p.coeffs[n - 1]) / &an } else { Float::new(prec) };
    let e2_target = if n >= 2 { Float::with_val(prec, &p.coeffs[n - 2]) / &an } else { Float::new(prec) };
    let sums = |pts: &[Complex]| -> (Complex, Complex) {
        let mut s1 = Complex::new(prec);
        let mut s2 = Complex::new(prec);
        for z in pts {
            s1 += z;
            s2 += Complex::with_val(prec, z.square_ref());
        }
        let e2 = (Complex::with_val(prec, s1.square_ref()) - s2) / 2u32;
        (s1, e2)
    };
    let dist = |a: &Complex, t: &Float| Float::with_val(64, Complex::with_val(prec, a - t).abs_ref()).to_f64();
    let raw: Vec<Complex> = zs.points().cloned().collect();
    let (raw_sum, raw_e2) = sums(&raw);
    let paired = pair_conjugates(zs);
    let (paired_sum, paired_e2) = sums(&paired);
    ChecksumReport {
        sum_residual: dist(&raw_sum, &sum_target),
        e2_residual: dist(&raw_e2, &e2_target),
        paired_sum_residual: dist(&paired_sum, &sum_target),
        paired_e2_residual: dist(&paired_e2, &e2_target),
        raw_sum,
        raw_e2,
        paired_sum,
        paired_e2,
    }
}

/// Zeros with conjugate partners averaged into exact conjugate pairs and
/// zeros within their inclusion radius of the real axis made real.
pub fn pair_conjugates(zs: &ZeroSet) -> Vec<Complex> {
    let prec = zs.precision_bits;
    let n = zs.zeros.len();
    let slack = |z: &Zero| z.radius.max(2f64.powi(8 - prec as i32) * Float::with_val(64, z.z.abs_ref()).to_f64());
    let mut out: Vec<Option<Complex>> = vec![None; n];
    let mut upper: Vec<usize> = Vec::new();
    let mut lower: Vec<usize> = Vec::new();
    for (i, z) in zs.zeros.iter().enumerate() {
        let im = z.z.imag().to_f64();
        if im.abs() <= slack(z) {
            out[i] = Some(Complex::with_val(prec, (z.z.real(), 0)));
        } else if im > 0.0 {
            upper.push(i);
        } else {
            lower.push(i);
        }
    }
    let mut taken = vec![false; n];
    lower.sort_by(|&a, &b| zs.zeros[a].z.real().to_f64().total_cmp(&zs.zeros[b].z.real().to_f64()));
    let lower_re: Vec<f64> = lower.iter().map(|&i| zs.zeros[i].z.real().to_f64()).collect();
    for &i in &upper {
        let zi = to_c64(&zs.zeros[i].z).conj();
        let tol = slack(&zs.zeros[i]) * 4.0 + 1e-300;
        let lo = lower_re.partition_point(|&x| x < zi.re - tol);
        let mut best: Option<(usize, f64)> = None;
        for k in lo..lower.len() {
            if lower_re[k] > zi.re + tol {
                break;
            }
            let j = lower[k];
            if taken[j] {
                continue;
            }
            let dist = (to_c64(&zs.zeros[j].z) - zi).norm();
            if dist <= tol + slack(&zs.zeros[j]) * 4.0 && best.map_or(true, |(_, bd)| dist < bd) {
                best = Some((j, dist));
            }
        }
        match best {
            Some((j, _)) => {
                taken[j] = true;
                let avg_re = Float::with_val(prec, zs.zeros[i].z.real() + zs.zeros[j].z.real()) / 2u32;
                let avg_im = Float::with_val(prec, zs.zeros[i].z.imag() - zs.zeros[j].z.imag()) / 2u32;
                out[i] = Some(Complex::with_val(prec, (&avg_re, &avg_im)));
                out[j] = Some(Complex::with_val(prec, (&avg_re, -avg_im)));
            }
            None => out[i] = Some(zs.zeros[i].z.clone()),
        }
    }
    for (i, z) in zs.zeros.iter().enumerate() {
        if out[i].is_none() {
            out[i] = Some(z.z.clone());
        }
    }
    out.into_iter().map(|z| z.expect("filled")).collect()
}

/// Decimal digits written per component: `prec / 3.32`.
pub fn digits_for(prec: u32) -> usize {
    ((prec as f64) / 3.32).ceil() as usize
}

/// Writes the `zeros v1` text format.
pub fn write_zeros<W: Write>(zs: &ZeroSet, mut out: W) -> io::Result<()> {
    writeln!(out, "zeros v1 n={} prec={}", zs.degree, zs.precision_bits)?;
    let digits = Some(digits_for(zs.precision_bits));
    for z in &zs.zeros {
        let re = z.z.real().to_string_radix(10, digits);
        let im = z.z.imag().to_string_radix(10, digits);
        writeln!(out, "{re}\t{im}\t{:.6e}", z.residual)?;
    }
    out.flush()
}

/// A parsed zero file: header fields and `(z, residual)` rows.
#[derive(Debug, Clone)]
pub struct ZeroFile {
    pub degree: usize,
    pub precision_bits: u32,
    pub zeros: Vec<(Complex, f64)>,
}

pub fn read_zeros<R: BufRead>(input: R) -> Result<ZeroFile, SolverError> {
    let bad = |line: usize, msg: &str| SolverError::Parse { line, msg: msg.to_string() };
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty input"))??;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != "zeros" || fields[1] != "v1" {
        return Err(bad(1, "expected header `zeros v1 n=<n> prec=<bits>`"));
    }
    let degree: usize =
        fields[2].strip_prefix("n=").and_then(|s| s.parse().ok()).ok_or_else(|| bad(1, "bad n field"))?;
    let precision_bits: u32 = fields[3]
        .strip_prefix("prec=")
        .and_then(|s| s.parse().ok())
        .filter(|&p| p >= 2)
        .ok_or_else(|| bad(1, "bad prec field"))?;
    let mut zeros = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let lineno = i + 2;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(bad(lineno, "expected three tab-separated columns"));
        }
        let parse = |s: &str| {
            Float::parse(s).map(|v| Float::with_val(precision_bits, v)).map_err(|_| bad(lineno, &format!("not a number: {s:?}")))
        };
        let re = parse(cols[0])?;
        let im = parse(cols[1])?;
        let residual: f64 = cols[2].parse().map_err(|_| bad(lineno, "bad residual"))?;
        zeros.push((Complex::with_val(precision_bits, (re, im)), residual));
    }
    Ok(ZeroFile { degree, precision_bits, zeros })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygen::partition_coeffs;

    fn solve(n: usize, prec: u32) -> (ExactPolynomial, ZeroSet) {
        let p = partition_coeffs(n).unwrap();
        let zs = aberth_solve(&p, &SolverConfig::with_precision(prec)).unwrap();
        (p, zs)
    }

    #[test]
    fn f5_vieta() {
        let (p, zs) = solve(5, 128);
        assert_eq!(zs.zeros.len(), 5);
        assert_eq!(zs.origin_multiplicity, 1);
        assert!(zs.zeros[0].z.real().is_zero() && zs.zeros[0].z.imag().is_zero());
        let mut prod = Complex::with_val(256, 1);
        let mut sum = Complex::new(256);
        for z in zs.points().skip(1) {
            prod *= z;
            sum += z;
        }
        assert!(Float::with_val(64, Complex::with_val(256, &prod - 1u32).abs_ref()) < 1e-30);
        assert!(Float::with_val(64, Complex::with_val(256, &sum + 1u32).abs_ref()) < 1e-30);
        let ck = checksum_report(&zs, &p);
        assert!(ck.sum_residual < 1e-30 && ck.e2_residual < 1e-30, "{ck:?}");
    }

    #[test]
    fn f2_zeros() {
        let (p, zs) = solve(2, 128);
        let pts = zs.to_c64();
        assert_eq!(pts[0], Complex64::new(0.0, 0.0));
        assert!((pts[1] + 1.0).norm() < 1e-30);
        let ck = checksum_report(&zs, &p);
        assert!(ck.sum_residual < 1e-35);
        assert!(ck.e2_residual < 1e-35);
    }

    #[test]
    fn horner_small_cases() {
        let p = partition_coeffs(5).unwrap();
        let (v, b) = horner_eval(&p, &Complex::with_val(128, 1), 128);
        assert_eq!(v, Complex::with_val(128, 7));
        assert!(b < 1e-30 && b > 0);
        let (v0, _) = horner_eval(&p, &Complex::new(128), 128);
        assert!(v0.real().is_zero() && v0.imag().is_zero());

        let p200 = partition_coeffs(200).unwrap();
        let exact = p200.eval_integer(-1);
        let (v, b) = horner_eval(&p200, &Complex::with_val(128, -1), 128);
        let err = Float::with_val(128, v.real() - &exact).abs();
        assert!(err <= b);
        assert!(v.imag().is_zero());
    }

    #[test]
    fn newton_polish_behaviour() {
        let p = partition_coeffs(5).unwrap();
        let z0 = newton_polish(&p, &Complex::new(128), 128).unwrap();
        assert!(z0.real().is_zero() && z0.imag().is_zero());

        let zs = aberth_solve(&p, &SolverConfig::with_precision(128)).unwrap();
        let root = &zs.zeros[2].z;
        let again = newton_polish(&p, root, 128).unwrap();
        let moved = Float::with_val(64, Complex::with_val(128, &again - root).abs_ref()).to_f64();
        assert!(moved <= 2f64.powi(-120), "{moved}");

        let ev = Evaluator::new(p.coeffs.clone());
        let mut z = Complex::with_val(128, root + Complex::with_val(128, (1e-6, 0)));
        let mut prev = ev.eval(&z, 128).log2_abs_value();
        for _ in 0..3 {
            let e = ev.eval(&z, 128);
            let step = e.newton();
            z -= step;
            let now = ev.eval(&z, 128).log2_abs_value();
            assert!(now <= prev - 3.32, "{now} vs {prev}");
            prev = now;
            if ev.eval(&z, 128).in_noise() {
                break;
            }
        }
    }

    #[test]
    fn f200_checks() {
        let (p, zs) = solve(200, 128);
        assert_eq!(zs.zeros.len(), 200);
        assert!(zs.all_converged());
        let ck = checksum_report(&zs, &p);
        assert!(ck.sum_residual < 1e-19, "{ck:?}");
        assert!(ck.e2_residual < 1e-19, "{ck:?}");
        // every zero but the origin has a conjugate partner
        let pts = zs.to_c64();
        for z in &pts {
            if z.im.abs() > 1e-20 {
                assert!(pts.iter().any(|w| (w - z.conj()).norm() < 1e-25), "{z}");
            }
        }
        let near_circle = pts.iter().filter(|z| (z.norm() - 1.0).abs() < 0.2).count();
        assert!(near_circle > 180, "{near_circle}");
    }

    #[test]
    fn solves_are_deterministic() {
        let p = partition_coeffs(60).unwrap();
        let cfg = SolverConfig::with_precision(128);
        let a = aberth_solve(&p, &cfg).unwrap();
        let b = aberth_solve(&p, &cfg).unwrap();
        for (x, y) in a.zeros.iter().zip(&b.zeros) {
            assert_eq!(x.z, y.z);
        }
    }

    #[test]
    fn gauss_seidel_agrees() {
        let p = partition_coeffs(40).unwrap();
        let mut cfg = SolverConfig::with_precision(128);
        let a = aberth_solve(&p, &cfg).unwrap();
        cfg.update_schedule = UpdateSchedule::GaussSeidel;
        cfg.initial_radius_policy = InitialRadiusPolicy::UnitCircleCluster;
        let b = aberth_solve(&p, &cfg).unwrap();
        for z in a.to_c64() {
            assert!(b.to_c64().iter().any(|w| (w - z).norm() < 1e-30));
        }
    }

    #[test]
    fn rejects_tolerance_below_precision() {
        let p = partition_coeffs(5).unwrap();
        let cfg = SolverConfig { convergence_tol: 1e-60, ..SolverConfig::with_precision(128) };
        assert!(matches!(aberth_solve(&p, &cfg), Err(SolverError::PrecisionExhausted { .. })));
        assert!(matches!(aberth_solve_coeffs(&[Integer::from(3)], &cfg), Err(SolverError::ConstantPolynomial)));
    }

    #[test]
    fn zero_file_round_trip() {
        let (_, zs) = solve(12, 128);
        let mut buf = Vec::new();
        write_zeros(&zs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("zeros v1 n=12 prec=128\n"));
        let back = read_zeros(text.as_bytes()).unwrap();
        assert_eq!(back.degree, 12);
        assert_eq!(back.zeros.len(), 12);
        for ((z, _), orig) in back.zeros.iter().zip(&zs.zeros) {
            let d = Float::with_val(64, Complex::with_val(128, z - &orig.z).abs_ref()).to_f64();
            assert!(d < 1e-37);
        }
        assert!(read_zeros("zeros v1 n=2\n".as_bytes()).is_err());
    }

    #[test]
    fn newton_hull_radii() {
        // x^2 − 3x + 2 has |a| hull (0, ln 2), (1, ln 3), (2, 0)
        let c: Vec<Integer> = [2, -3, 1].iter().map(|&v| Integer::from(v)).collect();
        let g = initial_guesses(&c, InitialRadiusPolicy::NewtonPolygon);
        assert_eq!(g.len(), 2);
        assert!((g[0].norm() - 2.0 / 3.0).abs() < 1e-12);
        assert!((g[1].norm() - 3.0).abs() < 1e-12);
        assert!(g.iter().all(|z| z.im.abs() > 1e-3));
    }
}
