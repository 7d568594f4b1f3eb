//! Geometry of the zero attractor inside the unit disk: which of `f₁, f₂, f₃`
//! dominates where, the angles at which the boundary curves meet the circle,
//! the triple point and the curves `C_kℓ = {f_k = f_ℓ}` themselves.
//!
//! With `D = L_k − L_ℓ` holomorphic, `f_k − f_ℓ = Re D`, its gradient is
//! `conj(D')` and the curve tangent is `i·conj(D')`. Curves are traced by
//! stepping along the tangent and projecting back onto `Re D = 0` with Newton
//! along the gradient.

use std::fmt;
use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use rug::{Complex, Float};
use thiserror::Error;

use crate::dilog::{branch_and_derivative, f_triple, li2_on_circle, DilogError};
use crate::numeric::{from_c64, pi, to_c64};

/// Regions closer than this in `f` are reported as on a boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AttractorError {
    #[error(transparent)]
    Dilog(#[from] DilogError),
    #[error("no sign change of f_{}-f_{} on [{lo}, {hi}]", pair.k(), pair.l())]
    BracketFailure { pair: Pair, lo: f64, hi: f64 },
    #[error("Newton did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("step fell below {step:e} at {at}")]
    StepCollapse { at: Complex64, step: f64 },
    #[error("|L_k' - L_l'| vanishes at {at}")]
    DerivativeVanishes { at: Complex64 },
    #[error("start point misses the level set by {0:e}")]
    OffCurve(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    R1,
    R2,
    R3,
}

impl Region {
    pub fn index(self) -> u32 {
        match self {
            Region::R1 => 1,
            Region::R2 => 2,
            Region::R3 => 3,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.index())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionLabel {
    pub value: Region,
    /// `f_max` minus the runner-up.
    pub margin: f64,
    /// The margin is below [`BOUNDARY_MARGIN`].
    pub boundary: bool,
}

/// Which `f_k` is largest at `x`, for `x` in the closed upper unit disk.
pub fn classify_region(x: &Complex, prec: u32) -> Result<RegionLabel, AttractorError> {
    let f = f_triple(x, prec)?;
    let v: Vec<f64> = f.iter().map(|t| t.to_f64()).collect();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    // with exact comparison in case the f64 values tie
    let (best, second) = (order[0], order[1]);
    let margin = Float::with_val(prec, &f[best] - &f[second]).to_f64();
    let value = [Region::R1, Region::R2, Region::R3][best];
    Ok(RegionLabel { value, margin, boundary: margin < BOUNDARY_MARGIN })
}

/// One of the three attractor curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    pub fn k(self) -> u32 {
        match self {
            Pair::P12 | Pair::P13 => 1,
            Pair::P23 => 2,
        }
    }

    pub fn l(self) -> u32 {
        match self {
            Pair::P12 => 2,
            Pair::P13 | Pair::P23 => 3,
        }
    }

    /// `"12"`, `"13"` or `"23"`.
    pub fn tag(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P23 => "23",
        }
    }

    pub fn from_tag(s: &str) -> Option<Pair> {
        Pair::ALL.into_iter().find(|p| p.tag() == s)
    }
}

/// `D = L_k − L_ℓ` and `D'` at `x`.
pub fn difference(x: &Complex, pair: Pair, prec: u32) -> Result<(Complex, Complex), AttractorError> {
    let (lk, dk) = branch_and_derivative(x, pair.k(), prec)?;
    let (ll, dl) = branch_and_derivative(x, pair.l(), prec)?;
    Ok((Complex::with_val(prec, lk - ll), Complex::with_val(prec, dk - dl)))
}

/// `f_k(e^{it}) − f_ℓ(e^{it})` from the closed forms on the circle.
pub fn circle_gap(t: &Float, pair: Pair, prec: u32) -> Float {
    let wp = prec + 16;
    let f = |k: u32| -> Float {
        let kt = Float::with_val(wp, t * k);
        let li = li2_on_circle(&kt, wp);
        Float::with_val(wp, Complex::with_val(wp, li.sqrt_ref()).real()) / k
    };
    Float::with_val(prec, f(pair.k()) - f(pair.l()))
}

/// Root of `g` on `[lo, hi]` by the Illinois variant of regula falsi, to
/// `prec` bits.
fn illinois<G>(g: G, lo: &Float, hi: &Float, prec: u32) -> Option<Float>
where
    G: Fn(&Float) -> Float,
{
    let mut a = Float::with_val(prec, lo);
    let mut b = Float::with_val(prec, hi);
    let mut ga = g(&a);
    let mut gb = g(&b);
    if ga.is_zero() {
        return Some(a);
    }
    if gb.is_zero() {
        return Some(b);
    }
    if ga.is_sign_negative() == gb.is_sign_negative() {
        return None;
    }
    let width_tol = Float::with_val(prec, Float::i_exp(1, 4 - prec as i32));
    let mut side = 0i32;
    for _ in 0..4 * prec {
        let num = Float::with_val(prec, &b - &a) * &ga;
        let c = Float::with_val(prec, &a - num / Float::with_val(prec, &gb - &ga));
        let gc = g(&c);
        if gc.is_zero() {
            return Some(c);
        }
        if gc.is_sign_negative() == gb.is_sign_negative() {
            b = c;
            gb = gc;
            if side == 1 {
                ga /= 2u32;
            }
            side = 1;
        } else {
            a = c;
            ga = gc;
            if side == -1 {
                gb /= 2u32;
            }
            side = -1;
        }
        let w = Float::with_val(prec, &b - &a).abs();
        if w <= Float::with_val(prec, &width_tol * Float::with_val(prec, b.abs_ref()).max(&Float::with_val(prec, 1))) {
            break;
        }
    }
    // the endpoint with the smaller |g|
    if Float::with_val(prec, ga.abs_ref()) < Float::with_val(prec, gb.abs_ref()) {
        Some(a)
    } else {
        Some(b)
    }
}

/// Angle in `(lo, hi)` at which `C_kℓ` meets the unit circle.
pub fn circle_angle(pair: Pair, lo: f64, hi: f64, prec: u32) -> Result<Float, AttractorError> {
    let a = Float::with_val(prec, lo);
    let b = Float::with_val(prec, hi);
    illinois(|t| circle_gap(t, pair, prec + 16), &a, &b, prec).ok_or(AttractorError::BracketFailure { pair, lo, hi })
}

/// `(θ₁₃, θ₁₂, θ₂₃)`, the angles in the upper half plane where `f₁ = f₃`,
/// `f₁ = f₂` and `f₂ = f₃` on the unit circle.
pub fn boundary_angles(prec: u32) -> Result<(Float, Float, Float), AttractorError> {
    let two_thirds_pi = (pi(64) * 2u32 / 3u32).to_f64();
    let three_quarter_pi = (pi(64) * 3u32 / 4u32).to_f64();
    let t13 = circle_angle(Pair::P13, 1.9, two_thirds_pi, prec)?;
    let t12 = circle_angle(Pair::P12, two_thirds_pi, three_quarter_pi, prec)?;
    let t23 = circle_angle(Pair::P23, three_quarter_pi, 2.5, prec)?;
    Ok((t13, t12, t23))
}

/// `Re D` and its gradient `(Re D', −Im D')` at `x`.
fn level_and_gradient(x: &Complex, pair: Pair, prec: u32) -> Result<[Float; 3], AttractorError> {
    let (d, e) = difference(x, pair, prec)?;
    let (re_d, _) = d.into_real_imag();
    let (re_e, im_e) = e.into_real_imag();
    Ok([re_d, re_e, -im_e])
}

/// The point `T` in the upper half disk where `f₁ = f₂ = f₃`, by damped 2-D
/// Newton on `(f₁ − f₃, f₂ − f₃)` from `seed`.
pub fn triple_point_from(seed: &Complex, prec: u32) -> Result<Complex, AttractorError> {
    let wp = prec + 16;
    let tol = Float::with_val(64, Float::i_exp(1, 8 - prec as i32)).to_f64();
    let rows = |x: &Complex| -> Result<([Float; 3], [Float; 3], f64), AttractorError> {
        let a = level_and_gradient(x, Pair::P13, wp)?;
        let b = level_and_gradient(x, Pair::P23, wp)?;
        let r = a[0].to_f64().abs().max(b[0].to_f64().abs());
        Ok((a, b, r))
    };
    let mut x = Complex::with_val(wp, seed);
    let mut last = f64::INFINITY;
    for it in 0..100 {
        let (a, b, r) = rows(&x)?;
        if r < tol {
            return Ok(Complex::with_val(prec, x));
        }
        last = r;
        let det = Float::with_val(wp, &a[1] * &b[2]) - Float::with_val(wp, &a[2] * &b[1]);
        if det.is_zero() {
            return Err(AttractorError::NonConvergence { iterations: it, residual: r });
        }
        let dx = (Float::with_val(wp, &a[0] * &b[2]) - Float::with_val(wp, &b[0] * &a[2])) / &det;
        let dy = (Float::with_val(wp, &a[1] * &b[0]) - Float::with_val(wp, &b[1] * &a[0])) / &det;
        let step = Complex::with_val(wp, (dx, dy));
        let mut lambda = 1.0;
        loop {
            let cand = Complex::with_val(wp, &x - Complex::with_val(wp, &step * lambda));
            let (_, _, rc) = rows(&cand)?;
            if rc < r || lambda < 1e-6 {
                x = cand;
                break;
            }
            lambda /= 2.0;
        }
    }
    Err(AttractorError::NonConvergence { iterations: 100, residual: last })
}

/// Seed for [`triple_point`]: just inside the circle between `θ₁₂` and `θ₂₃`.
fn triple_seed(prec: u32) -> Complex {
    let t = Float::with_val(prec, 2.3568);
    let r = 0.978;
    Complex::with_val(prec, (Float::with_val(prec, t.cos_ref()) * r, Float::with_val(prec, t.sin_ref()) * r))
}

pub fn triple_point(prec: u32) -> Result<Complex, AttractorError> {
    triple_point_from(&triple_seed(prec), prec)
}

/// A traced curve `C_kℓ` as a polyline.
#[derive(Debug, Clone)]
pub struct CurveSample {
    pub pair: Pair,
    pub points: Vec<Complex64>,
    /// Cumulative polyline length, starting at 0.
    pub arclength: Vec<f64>,
    /// `|f_k − f_ℓ|` at each point.
    pub residuals: Vec<f64>,
    /// `Im(L_k − L_ℓ)` at each point.
    pub phase: Vec<f64>,
    pub tol: f64,
}

impl CurveSample {
    fn new(pair: Pair, tol: f64) -> Self {
        CurveSample { pair, points: Vec::new(), arclength: Vec::new(), residuals: Vec::new(), phase: Vec::new(), tol }
    }

    fn push(&mut self, x: Complex64, d: Complex64) {
        let s = match (self.points.last(), self.arclength.last()) {
            (Some(p), Some(s)) => s + (x - p).norm(),
            _ => 0.0,
        };
        self.points.push(x);
        self.arclength.push(s);
        self.residuals.push(d.re.abs());
        self.phase.push(d.im);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> Complex64 {
        self.points[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.points.last().expect("nonempty curve")
    }

    /// Point at arclength `s` by linear interpolation, with its segment index.
    pub fn point_at(&self, s: f64) -> (Complex64, usize) {
        let n = self.points.len();
        if n == 1 {
            return (self.points[0], 0);
        }
        let i = match self.arclength.partition_point(|&a| a <= s) {
            0 => 0,
            i => (i - 1).min(n - 2),
        };
        let (s0, s1) = (self.arclength[i], self.arclength[i + 1]);
        let t = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
        (self.points[i] + (self.points[i + 1] - self.points[i]) * t, i)
    }

    /// Euclidean distance from `z` to the polyline.
    pub fn distance(&self, z: Complex64) -> f64 {
        if self.points.len() == 1 {
            return (z - self.points[0]).norm();
        }
        self.points.windows(2).map(|w| segment_distance(z, w[0], w[1])).fold(f64::INFINITY, f64::min)
    }
}

pub fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    (z - (a + ab * t.clamp(0.0, 1.0))).norm()
}

fn polyline_length(points: &[Complex64]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Length of the curve: the polyline length improved by one Richardson step
/// against the polyline through every other point.
pub fn curve_length(c: &CurveSample) -> f64 {
    let n = c.points.len();
    if n < 3 {
        return polyline_length(&c.points);
    }
    let fine = polyline_length(&c.points);
    let mut coarse_pts: Vec<Complex64> = c.points.iter().step_by(2).copied().collect();
    if (n - 1) % 2 == 1 {
        coarse_pts.push(c.end());
    }
    let coarse = polyline_length(&coarse_pts);
    fine + (fine - coarse) / 3.0
}

/// Settings for [`trace_curve`].
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// Largest step along the curve.
    pub step: f64,
    /// Bound on `|f_k − f_ℓ|` at accepted points.
    pub tol: f64,
    pub prec: u32,
    /// Stop within `10·step` of this point and close the curve with it.
    pub target: Option<Complex64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { step: 2e-3, tol: 1e-13, prec: 128, target: None }
    }
}

fn eval_difference(x: Complex64, pair: Pair, prec: u32) -> Result<(Complex64, Complex64), AttractorError> {
    let (d, e) = difference(&from_c64(x, prec), pair, prec)?;
    Ok((to_c64(&d), to_c64(&e)))
}

/// Unit tangent `i·conj(D')/|D'|` of the level set through `x`.
fn unit_tangent(e: Complex64, at: Complex64) -> Result<Complex64, AttractorError> {
    let m = e.norm();
    if !(m > 1e-12) {
        return Err(AttractorError::DerivativeVanishes { at });
    }
    Ok(Complex64::i() * e.conj() / m)
}

/// Projects `x` onto `Re D = 0` by Newton along the gradient.
fn correct(x: Complex64, pair: Pair, opts: &TraceOptions) -> Result<(Complex64, Complex64, Complex64), AttractorError> {
    let mut x = x;
    for _ in 0..16 {
        let (d, e) = eval_difference(x, pair, opts.prec)?;
        if d.re.abs() < opts.tol / 16.0 {
            return Ok((x, d, e));
        }
        let g = e.norm_sqr();
        if !(g > 1e-24) {
            return Err(AttractorError::DerivativeVanishes { at: x });
        }
        let delta = -e.conj() * (d.re / g);
        x += delta;
        if delta.norm() < 1e-17 * x.norm().max(1e-300) {
            let (d, e) = eval_difference(x, pair, opts.prec)?;
            if d.re.abs() < opts.tol {
                return Ok((x, d, e));
            }
            break;
        }
    }
    Err(AttractorError::NonConvergence { iterations: 16, residual: eval_difference(x, pair, opts.prec)?.0.re.abs() })
}

/// Point where the curve through `near` meets the unit circle.
fn circle_exit(pair: Pair, near: Complex64, width: f64, prec: u32) -> Result<Complex64, AttractorError> {
    let t0 = near.arg();
    let mut w = width.max(1e-6);
    for _ in 0..8 {
        if let Ok(t) = circle_angle(pair, t0 - w, t0 + w, prec) {
            return Ok(Complex64::from_polar(1.0, t.to_f64()));
        }
        w *= 4.0;
    }
    Err(AttractorError::BracketFailure { pair, lo: t0 - w, hi: t0 + w })
}

/// Traces `C_kℓ` from `start` by predictor–corrector steps, heading along
/// `direction` (±1) times the tangent `i·conj(D')` at the start.
///
/// Stops at the unit circle (closing exactly on it), at the real axis, or
/// near `opts.target`.
pub fn trace_curve(pair: Pair, start: Complex64, direction: f64, opts: &TraceOptions) -> Result<CurveSample, AttractorError> {
    let (d0, e0) = eval_difference(start, pair, opts.prec)?;
    if d0.re.abs() >= opts.tol {
        return Err(AttractorError::OffCurve(d0.re.abs()));
    }
    let mut curve = CurveSample::new(pair, opts.tol);
    curve.push(start, d0);
    let mut x = start;
    let mut tangent = unit_tangent(e0, x)? * direction.signum();
    let min_step = 1e-13;
    let mut h = opts.step;
    let max_points = 10_000_000;
    while curve.len() < max_points {
        let h_now = h.min(opts.step).min(0.25 * x.norm().max(1e-300));
        let predicted = x + tangent * h_now;
        if predicted.norm() >= 1.0 {
            let exit = circle_exit(pair, predicted, 4.0 * h_now, opts.prec)?;
            let (d, _) = eval_difference(exit, pair, opts.prec)?;
            curve.push(exit, d);
            return Ok(curve);
        }
        if predicted.im < 0.0 {
            let t = x.im / (x.im - predicted.im);
            let hit = Complex64::new(x.re + t * (predicted.re - x.re), 0.0);
            let (d, _) = eval_difference(hit, pair, opts.prec)?;
            curve.push(hit, d);
            return Ok(curve);
        }
        let attempt = correct(predicted, pair, opts).and_then(|(xc, d, e)| {
            let mut t = unit_tangent(e, xc)?;
            if (t * tangent.conj()).re < 0.0 {
                t = -t;
            }
            Ok((xc, d, t))
        });
        match attempt {
            Ok((xc, d, t)) if (t * tangent.conj()).arg().abs() < 0.1 && (xc - x).norm() < 2.0 * h_now => {
                if xc.norm() >= 1.0 {
                    let exit = circle_exit(pair, xc, 4.0 * h_now, opts.prec)?;
                    let (d, _) = eval_difference(exit, pair, opts.prec)?;
                    curve.push(exit, d);
                    return Ok(curve);
                }
                curve.push(xc, d);
                x = xc;
                tangent = t;
                if let Some(target) = opts.target {
                    if (x - target).norm() < 10.0 * opts.step {
                        let (d, _) = eval_difference(target, pair, opts.prec)?;
                        curve.push(target, d);
                        return Ok(curve);
                    }
                }
                h = (h_now * 1.5).min(opts.step);
            }
            Ok(_) | Err(AttractorError::NonConvergence { .. }) => {
                h = h_now / 2.0;
                if h < min_step {
                    return Err(AttractorError::StepCollapse { at: x, step: h });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(AttractorError::StepCollapse { at: x, step: h })
}

/// Settings for [`AttractorGeometry::build`].
#[derive(Debug, Clone, Copy)]
pub struct GeometryConfig {
    /// Bits for the angles and the triple point.
    pub prec: u32,
    pub step: f64,
    pub tol: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { prec: 256, step: 2e-3, tol: 1e-13 }
    }
}

/// Modulus at which the curve from the origin is started.
pub const ORIGIN_START: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct AttractorGeometry {
    pub triple_point: Complex,
    pub theta13: Float,
    pub theta12: Float,
    pub theta23: Float,
    /// `C₁₂` (origin to `T`), `C₁₃` and `C₂₃` (`T` to the circle).
    pub curves: [CurveSample; 3],
}

impl AttractorGeometry {
    pub fn build(cfg: &GeometryConfig) -> Result<Self, AttractorError> {
        let (theta13, theta12, theta23) = boundary_angles(cfg.prec)?;
        let triple_point = triple_point(cfg.prec)?;
        let t = to_c64(&triple_point);
        let trace_prec = cfg.prec.min(128);
        let opts = TraceOptions { step: cfg.step, tol: cfg.tol, prec: trace_prec, target: None };

        let c12 = trace_from_origin(&TraceOptions { target: Some(t), ..opts })?;
        let from_t = |pair: Pair, third: u32| -> Result<CurveSample, AttractorError> {
            let (_, e) = eval_difference(t, pair, trace_prec)?;
            let tangent = unit_tangent(e, t)?;
            // the attractor half of C_kℓ is where f_k = f_ℓ beats the third function
            let probe = t + tangent * 1e-4;
            let f = f_triple(&from_c64(probe, trace_prec), trace_prec)?;
            let gap = f[pair.k() as usize - 1].to_f64() - f[third as usize - 1].to_f64();
            trace_curve(pair, t, if gap > 0.0 { 1.0 } else { -1.0 }, &opts)
        };
        let c13 = from_t(Pair::P13, 2)?;
        let c23 = from_t(Pair::P23, 1)?;
        Ok(AttractorGeometry { triple_point, theta13, theta12, theta23, curves: [c12, c13, c23] })
    }

    pub fn curve(&self, pair: Pair) -> &CurveSample {
        match pair {
            Pair::P12 => &self.curves[0],
            Pair::P13 => &self.curves[1],
            Pair::P23 => &self.curves[2],
        }
    }
}

/// `C₁₂` from the origin: near 0, `L₁ − L₂ ≈ √x + x/2`, so the curve leaves
/// at angle `π − √ρ` on the circle of radius `ρ`. The start is refined on that
/// circle and the origin is prepended.
pub fn trace_from_origin(opts: &TraceOptions) -> Result<CurveSample, AttractorError> {
    let pair = Pair::P12;
    let rho = ORIGIN_START;
    let mut phi = std::f64::consts::PI - rho.sqrt();
    for _ in 0..30 {
        let x = Complex64::from_polar(rho, phi);
        let (d, e) = eval_difference(x, pair, opts.prec)?;
        if d.re.abs() < opts.tol / 16.0 {
            break;
        }
        // d/dφ Re D(ρ e^{iφ}) = Re(D' · i x)
        let slope = (e * Complex64::i() * x).re;
        phi -= d.re / slope;
    }
    let start = Complex64::from_polar(rho, phi);
    let (_, e) = eval_difference(start, pair, opts.prec)?;
    let tangent = unit_tangent(e, start)?;
    let outward = (tangent * start.conj()).re > 0.0;
    let traced = trace_curve(pair, start, if outward { 1.0 } else { -1.0 }, opts)?;
    let mut curve = CurveSample::new(pair, opts.tol);
    curve.push(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (x, (r, ph)) in traced.points.iter().zip(traced.residuals.iter().zip(&traced.phase)) {
        curve.push(*x, Complex64::new(*r, *ph));
    }
    Ok(curve)
}

/// Writes `curve v1 pair=<kl> tol=<t>` and `s<TAB>re<TAB>im` rows.
pub fn write_curve<W: Write>(c: &CurveSample, mut out: W) -> io::Result<()> {
    writeln!(out, "curve v1 pair={} tol={:e}", c.pair.tag(), c.tol)?;
    for (s, z) in c.arclength.iter().zip(&c.points) {
        writeln!(out, "{s:e}\t{:e}\t{:e}", z.re, z.im)?;
    }
    out.flush()
}

/// Reads a curve file; residuals and phases are recomputed at `prec` bits.
pub fn read_curve<R: BufRead>(input: R, prec: u32) -> Result<CurveSample, AttractorError> {
    let bad = |line: usize, msg: &str| AttractorError::Parse { line, msg: msg.to_string() };
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty input"))??;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != "curve" || fields[1] != "v1" {
        return Err(bad(1, "expected header `curve v1 pair=<kl> tol=<t>`"));
    }
    let pair = fields[2].strip_prefix("pair=").and_then(Pair::from_tag).ok_or_else(|| bad(1, "bad pair field"))?;
    let tol: f64 = fields[3].strip_prefix("tol=").and_then(|s| s.parse().ok()).ok_or_else(|| bad(1, "bad tol field"))?;
    let mut curve = CurveSample::new(pair, tol);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split('\t')
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(i + 2, "not a number"))?;
        if cols.len() != 3 {
            return Err(bad(i + 2, "expected three tab-separated columns"));
        }
        let z = Complex64::new(cols[1], cols[2]);
        let d = if z.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { eval_difference(z, pair, prec)?.0 };
        curve.push(z, d);
    }
    Ok(curve)
}
