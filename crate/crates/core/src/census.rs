//! Zeros inside the unit disk: counting, assignment to the three families
//! along the attractor curves, and the predictions that follow from the
//! zero density carried by each curve.
//!
//! The density on `C_kℓ` is the pull-back of arc length on the unit circle
//! under `G_kℓ² = exp(2(L_k − L_ℓ))`, so the mass of a piece of curve is the
//! total variation of `2 Im(L_k − L_ℓ)` along it.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::attractor::{curve_length, AttractorError, AttractorGeometry, CurveSample, Pair};

pub const DEFAULT_THRESHOLD: f64 = 0.99;

/// Zeros with `|Im z|` below this are treated as real.
pub const REAL_TOL: f64 = 1e-12;

/// The rounded least-squares coefficient of the `√n` law.
pub const LS_PRINTED: f64 = 0.9154;

/// Observed counts of zeros inside the disk at the four smallest degrees
/// of the counting-law fit.
pub const FIT_COUNTS: [(u64, u64); 4] = [(5000, 64), (10000, 92), (15000, 112), (20000, 130)];

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Attractor(#[from] AttractorError),
    #[error("threshold {0} is outside (0.9, 1)")]
    BadThreshold(f64),
    #[error("arclength {s} is outside [0, {len}]")]
    OutOfRange { s: f64, len: f64 },
    #[error("the density of C12 is unbounded at the origin")]
    Unbounded,
}

/// Least-squares `a` in `count ≈ a √n` over [`FIT_COUNTS`].
pub fn ls_coefficient() -> f64 {
    let num: f64 = FIT_COUNTS.iter().map(|&(n, c)| c as f64 * (n as f64).sqrt()).sum();
    let den: f64 = FIT_COUNTS.iter().map(|&(n, _)| n as f64).sum();
    num / den
}

/// Nonzero zeros with `|z| < threshold`.
pub fn inside_zeros(points: &[Complex64], threshold: f64) -> Result<Vec<Complex64>, CensusError> {
    if !(threshold > 0.9 && threshold < 1.0) {
        return Err(CensusError::BadThreshold(threshold));
    }
    Ok(points.iter().copied().filter(|z| z.norm() < threshold && z.norm() > 0.0).collect())
}

/// Representative in the closed upper half plane.
pub fn upper(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        z.conj()
    } else {
        z
    }
}

/// In the closed second quadrant, counting nearly real zeros as real.
pub fn in_q2(z: Complex64) -> bool {
    z.re <= 0.0 && z.im >= -REAL_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    F1,
    F2,
    F3,
}

impl Family {
    pub fn curve(self) -> Pair {
        match self {
            Family::F1 => Pair::P12,
            Family::F2 => Pair::P13,
            Family::F3 => Pair::P23,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Family::F1 => 1,
            Family::F2 => 2,
            Family::F3 => 3,
        };
        write!(f, "F{i}")
    }
}

/// Nearest family set for `z`: `C₁₂` together with `[−1, 1]` for F1, `C₁₃`
/// for F2 and `C₂₃` for F3. Returns the family and the distance to its set.
pub fn classify_family(z: Complex64, geom: &AttractorGeometry) -> (Family, f64) {
    let z = upper(z);
    let real = if z.re.abs() <= 1.0 { z.im } else { (z - Complex64::new(z.re.signum(), 0.0)).norm() };
    let d1 = geom.curve(Pair::P12).distance(z).min(real);
    let d2 = geom.curve(Pair::P13).distance(z);
    let d3 = geom.curve(Pair::P23).distance(z);
    if d1 <= d2 && d1 <= d3 {
        (Family::F1, d1)
    } else if d2 <= d3 {
        (Family::F2, d2)
    } else {
        (Family::F3, d3)
    }
}

/// Density mass, arc and weight of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveDensity {
    pub pair: Pair,
    pub length: f64,
    /// Total variation of `2 Im(L_k − L_ℓ)`.
    pub mass: f64,
    /// `|2 Im(L_k − L_ℓ)|` at the end minus at the start.
    pub endpoint_difference: f64,
    pub arc_lo: f64,
    pub arc_hi: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    /// `C₁₂`, `C₁₃`, `C₂₃`.
    pub rows: [CurveDensity; 3],
}

impl DensityTable {
    pub fn new(geom: &AttractorGeometry) -> Self {
        let rows = geom.curves.clone().map(|c| {
            let mass = density_mass(&c);
            let a = (2.0 * c.phase[0]).abs();
            let b = (2.0 * c.phase[c.len() - 1]).abs();
            CurveDensity {
                pair: c.pair,
                length: curve_length(&c),
                mass,
                endpoint_difference: (b - a).abs(),
                arc_lo: a.min(b),
                arc_hi: a.max(b),
                weight: 0.0,
            }
        });
        let total: f64 = rows.iter().map(|r| r.mass).sum();
        let rows = rows.map(|r| CurveDensity { weight: r.mass / total, ..r });
        DensityTable { rows }
    }

    pub fn row(&self, pair: Pair) -> &CurveDensity {
        self.rows.iter().find(|r| r.pair == pair).expect("all three pairs present")
    }

    pub fn total_mass(&self) -> f64 {
        self.rows.iter().map(|r| r.mass).sum()
    }

    /// Zeros per `√n` implied by the densities: total mass over `π`.
    pub fn square_root_constant(&self) -> f64 {
        self.total_mass() / PI
    }

    pub fn weights(&self) -> [f64; 3] {
        self.rows.clone().map(|r| r.weight)
    }
}

/// Total variation of `2 Im(L_k − L_ℓ)` along the polyline.
pub fn density_mass(c: &CurveSample) -> f64 {
    2.0 * c.phase.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
}

/// `dν/ds` at the sample points of `c`: central differences of
/// `2 Im(L_k − L_ℓ)` in arclength, three-point one-sided at the ends.
pub fn node_densities(c: &CurveSample) -> Vec<f64> {
    let n = c.len();
    let (s, p) = (&c.arclength, &c.phase);
    let slope = |i: usize, j: usize| 2.0 * (p[j] - p[i]) / (s[j] - s[i]);
    match n {
        0 | 1 => vec![0.0; n],
        2 => vec![slope(0, 1).abs(); 2],
        _ => (0..n)
            .map(|i| {
                let d = if i == 0 {
                    // derivative at s₀ of the parabola through the first three points
                    let (a, b) = (slope(0, 1), slope(1, 2));
                    a - (b - a) * (s[1] - s[0]) / (s[2] - s[0])
                } else if i == n - 1 {
                    let (a, b) = (slope(n - 3, n - 2), slope(n - 2, n - 1));
                    b + (b - a) * (s[n - 1] - s[n - 2]) / (s[n - 1] - s[n - 3])
                } else {
                    let (a, b) = (slope(i - 1, i), slope(i, i + 1));
                    let (h0, h1) = (s[i] - s[i - 1], s[i + 1] - s[i]);
                    (a * h1 + b * h0) / (h0 + h1)
                };
                d.abs()
            })
            .collect(),
    }
}

/// `dν/ds` at arclength `s` along `c`. Between sample points the density is
/// the line through the two [`node_densities`] plus a multiple of
/// `6t(1 − t)` chosen so that each segment integrates to its own mass. On
/// `C₁₂` the density diverges at the origin, and the segment from the origin
/// reports [`CensusError::Unbounded`].
pub fn density_function(c: &CurveSample, s: f64) -> Result<f64, CensusError> {
    let len = *c.arclength.last().unwrap_or(&0.0);
    let slack = 1e-12 * len.max(1.0);
    if !(s >= -slack && s <= len + slack) {
        return Err(CensusError::OutOfRange { s, len });
    }
    let s = s.clamp(0.0, len);
    if c.len() < 2 {
        return Ok(0.0);
    }
    let (_, i) = c.point_at(s);
    if c.points[i].norm() == 0.0 {
        return Err(CensusError::Unbounded);
    }
    let rho = node_densities(c);
    let (s0, s1) = (c.arclength[i], c.arclength[i + 1]);
    let t = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
    let h = s1 - s0;
    let mass = 2.0 * (c.phase[i + 1] - c.phase[i]).abs();
    let bump = mass / h - (rho[i] + rho[i + 1]) / 2.0;
    Ok(rho[i] + (rho[i + 1] - rho[i]) * t + 6.0 * bump * t * (1.0 - t))
}

/// Count inside the disk predicted at degree `n`: `(a √n, C √n)` with `a` from
/// [`ls_coefficient`] and `C` from the densities.
pub fn predicted_count(n: u64, table: &DensityTable) -> (f64, f64) {
    let r = (n as f64).sqrt();
    (ls_coefficient() * r, table.square_root_constant() * r)
}

/// Expected number of second-quadrant zeros near `C₁₃` and `C₂₃`.
pub fn family_prediction(n: u64, weights: [f64; 3]) -> f64 {
    (weights[1] + weights[2]) * ls_coefficient() * (n as f64).sqrt() / 2.0
}

/// Smallest degree at which `weight · a √n / 2` rounds to at least `count`.
pub fn first_degree_with(weight: f64, count: u32) -> u64 {
    let target = (count as f64 - 0.5) / (weight * ls_coefficient() / 2.0);
    (target * target).ceil() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub degree: usize,
    pub total_inside: usize,
    pub q2_inside: usize,
    /// Second-quadrant counts per family.
    pub family_counts: [usize; 3],
    pub prediction_ls: f64,
    pub prediction_c: f64,
    pub threshold: f64,
}

impl CensusReport {
    pub fn new(degree: usize, points: &[Complex64], geom: &AttractorGeometry, table: &DensityTable, threshold: f64) -> Result<Self, CensusError> {
        let inside = inside_zeros(points, threshold)?;
        let q2: Vec<Complex64> = inside.iter().copied().filter(|&z| in_q2(z)).collect();
        let mut family_counts = [0usize; 3];
        for &z in &q2 {
            let i = match classify_family(z, geom).0 {
                Family::F1 => 0,
                Family::F2 => 1,
                Family::F3 => 2,
            };
            family_counts[i] += 1;
        }
        let (prediction_ls, prediction_c) = predicted_count(degree as u64, table);
        Ok(CensusReport { degree, total_inside: inside.len(), q2_inside: q2.len(), family_counts, prediction_ls, prediction_c, threshold })
    }
}

pub const CSV_HEADER: &str = "degree,total_inside,q2,f1,f2,f3,pred_ls,pred_C";

pub fn write_census_csv<W: Write>(reports: &[CensusReport], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        let [f1, f2, f3] = r.family_counts;
        writeln!(
            out,
            "{},{},{},{},{},{},{:.4},{:.4}",
            r.degree, r.total_inside, r.q2_inside, f1, f2, f3, r.prediction_ls, r.prediction_c
        )?;
    }
    out.flush()
}

/// Fraction of the mass of `c` between its start and the point of `c`
/// nearest to `z`.
pub fn mass_fraction(c: &CurveSample, z: Complex64) -> f64 {
    let total: f64 = c.phase.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let mut best = (f64::INFINITY, 0.0);
    let mut acc = 0.0;
    for (i, w) in c.points.windows(2).enumerate() {
        let dist = crate::attractor::segment_distance(z, w[0], w[1]);
        let ab = w[1] - w[0];
        let t = if ab.norm_sqr() == 0.0 { 0.0 } else { (((z - w[0]) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0) };
        let dphase = (c.phase[i + 1] - c.phase[i]).abs();
        if dist < best.0 {
            best = (dist, acc + t * dphase);
        }
        acc += dphase;
    }
    if total == 0.0 {
        0.0
    } else {
        best.1 / total
    }
}

/// Zeros per cell when `c` is cut into `cells` pieces of equal mass.
pub fn cell_occupancy(c: &CurveSample, zeros: &[Complex64], cells: usize) -> Vec<usize> {
    let mut counts = vec![0usize; cells];
    for &z in zeros {
        let f = mass_fraction(c, upper(z));
        let i = ((f * cells as f64) as usize).min(cells.saturating_sub(1));
        counts[i] += 1;
    }
    counts
}
