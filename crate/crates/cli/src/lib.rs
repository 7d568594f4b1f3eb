//! The `attractorlab` command line: generation, solving, geometry, census,
//! asymptotics and plots, each writing files with a manifest sidecar.

pub mod manifest;
pub mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use attractorlab::asymptote::{exact_value, leading_asymptotic, log_over_degree, AsymptoticError};
use attractorlab::attractor::{
    boundary_angles, read_curve, triple_point, write_curve, AttractorGeometry, CurveSample, GeometryConfig, Pair,
};
use attractorlab::census::{
    cell_occupancy, classify_family, density_function, family_prediction, in_q2, inside_zeros, write_census_csv,
    CensusReport, DensityTable, Family, DEFAULT_THRESHOLD,
};
use attractorlab::numeric::to_c64;
use attractorlab::polygen::{digit_stats, decimal_digits, partition_coeffs, plane_partition_coeffs, ExactPolynomial, PolyKind};
use attractorlab::solver::{aberth_solve, checksum_report, read_zeros, write_zeros, SolverConfig, SolverError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rug::{Complex, Float};
use thiserror::Error;

use crate::manifest::Recorder;
use crate::svg::Figure;

#[derive(Debug, Parser)]
#[command(name = "attractorlab", version, about = "Partition polynomials, their zeros and the zero attractor")]
pub struct Cli {
    /// Upper bound on worker threads.
    #[arg(long, global = true, env = "ATTRACTORLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the coefficients of a partition polynomial.
    Gen(GenArgs),
    /// Compute all zeros of a polynomial.
    Solve(SolveArgs),
    /// Trace the attractor curves and tabulate their densities.
    Attractor(AttractorArgs),
    /// Count and classify the zeros inside the disk.
    Census(CensusArgs),
    /// Compare exact values with the leading asymptotic term.
    Asympt(AsymptArgs),
    /// Draw a figure.
    #[command(subcommand)]
    Plot(PlotKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Partition,
    Plane,
}

impl From<Kind> for PolyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Partition => PolyKind::Partition,
            Kind::Plane => PolyKind::PlanePartition,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Kind::Partition)]
    pub kind: Kind,
    /// Coefficient file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Coefficient file written by `gen`.
    #[arg(long, conflicts_with = "n", required_unless_present = "n")]
    pub input: Option<PathBuf>,
    /// Generate the partition polynomial of this degree instead of reading one.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 128)]
    pub precision: u32,
    /// Relative size of the last correction at convergence.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct AttractorArgs {
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    #[arg(long, default_value_t = 2e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Zero files written by `solve`.
    #[arg(long, required = true, num_args = 1..)]
    pub zeros: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    /// Directory written by `attractor`; traced afresh if omitted.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AsymptArgs {
    /// Real part of x.
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Imaginary part of x.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y: f64,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 512)]
    pub precision: u32,
    /// Table file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PlotKind {
    /// Zeros of a solved polynomial with the unit circle.
    Zeros {
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decimal digits of each coefficient.
    Digits {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Partition)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Zero densities along the three curves against arclength.
    Density {
        #[arg(long, default_value_t = 256)]
        precision: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0:#}")]
    Numerical(anyhow::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 0 success, 1 numerical failure, 2 usage error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn numerical<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Numerical(e.into())
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn check_precision(bits: u32) -> Result<()> {
    if (16..=1 << 16).contains(&bits) {
        Ok(())
    } else {
        Err(usage(format!("precision must be between 16 and 65536 bits, got {bits}")))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        // a pool already built by an embedding program is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, &mut stdout),
        Command::Solve(a) => cmd_solve(&a, &mut stdout),
        Command::Attractor(a) => cmd_attractor(&a, &mut stdout),
        Command::Census(a) => cmd_census(&a, &mut stdout),
        Command::Asympt(a) => cmd_asympt(&a, &mut stdout),
        Command::Plot(k) => cmd_plot(&k, &mut stdout),
    }
}

fn generate(n: usize, kind: Kind) -> Result<ExactPolynomial> {
    let p = match kind {
        Kind::Partition => partition_coeffs(n),
        Kind::Plane => plane_partition_coeffs(n),
    };
    p.map_err(|e| usage(e.to_string()))
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let mut rec = Recorder::new("gen", None);
    rec.param("n", a.n).param("kind", PolyKind::from(a.kind).tag());
    let p = generate(a.n, a.kind)?;
    let text = p.to_text();
    match &a.out {
        Some(path) => {
            write_file(path, text.as_bytes())?;
            rec.output(path);
            rec.finish().map_err(io_err(path))?;
        }
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))?,
    }
    Ok(())
}

fn read_polynomial(path: &Path) -> Result<ExactPolynomial> {
    let text = read_file(path)?;
    ExactPolynomial::from_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    check_precision(a.precision)?;
    let mut rec = Recorder::new("solve", Some(a.precision));
    let p = match (&a.input, a.n) {
        (Some(path), _) => {
            rec.input(path);
            read_polynomial(path)?
        }
        (None, Some(n)) => {
            rec.param("n", n);
            generate(n, Kind::Partition)?
        }
        (None, None) => return Err(usage("one of --input or --n is required")),
    };
    let mut cfg = SolverConfig::with_precision(a.precision);
    cfg.max_iterations = a.max_iterations;
    if let Some(tol) = a.tol {
        if !(tol >= cfg.min_tol() && tol < 1.0) {
            return Err(usage(format!("--tol must lie in [{:e}, 1) at {} bits", cfg.min_tol(), a.precision)));
        }
        cfg.convergence_tol = tol;
    }
    rec.param("tol", cfg.convergence_tol).param("max_iterations", cfg.max_iterations);
    let zs = aberth_solve(&p, &cfg).map_err(|e| match e {
        SolverError::ZeroPolynomial | SolverError::ConstantPolynomial => usage(e.to_string()),
        e => numerical(e),
    })?;
    let ck = checksum_report(&zs, &p);
    let mut buf = Vec::new();
    write_zeros(&zs, &mut buf).map_err(io_err(&a.out))?;
    write_file(&a.out, &buf)?;
    rec.output(&a.out);
    let m = rec.finish().map_err(io_err(&a.out))?;
    let stdout = Path::new("<stdout>");
    writeln!(out, "degree {} solved in {} sweeps ({:.2} s)", zs.degree, zs.iterations, m.wall_clock_seconds)
        .map_err(io_err(stdout))?;
    writeln!(out, "|sum + a(n-1)/a(n)| = {:.3e}", ck.sum_residual).map_err(io_err(stdout))?;
    writeln!(out, "|e2 - a(n-2)/a(n)| = {:.3e}", ck.e2_residual).map_err(io_err(stdout))?;
    writeln!(out, "sum = {}", fmt_complex(&ck.raw_sum, 20)).map_err(io_err(stdout))?;
    writeln!(out, "e2  = {}", fmt_complex(&ck.raw_e2, 20)).map_err(io_err(stdout))?;
    Ok(())
}

fn fmt_float(v: &Float, digits: usize) -> String {
    v.to_string_radix(10, Some(digits))
}

fn fmt_complex(z: &Complex, digits: usize) -> String {
    let im = z.imag();
    let sign = if im.is_sign_negative() { "-" } else { "+" };
    format!("{} {sign} {}i", fmt_float(z.real(), digits), fmt_float(&Float::with_val(im.prec(), im.abs_ref()), digits))
}

/// Thirteen significant digits, without the `f64` exponent range limit.
fn sci(v: &Float) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    v.to_string_radix(10, Some(13))
}

fn curve_file(dir: &Path, pair: Pair) -> PathBuf {
    dir.join(format!("c{}.curve", pair.tag()))
}

fn plane_points(c: &CurveSample) -> Vec<(f64, f64)> {
    c.points.iter().map(|z| (z.re, z.im)).collect()
}

const CURVE_COLOURS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

fn attractor_figure(geom: &AttractorGeometry, title: &str) -> Figure {
    let mut f = Figure::plane((-1.1, 1.1), (-0.2, 1.1), 640.0);
    f.title(title);
    f.axes("Re x", "Im x");
    f.circle(1.0, "unit-circle", false);
    for (c, colour) in geom.curves.iter().zip(CURVE_COLOURS) {
        f.path(&plane_points(c), &format!("curve c{}", c.pair.tag()), colour);
    }
    f
}

pub fn cmd_attractor(a: &AttractorArgs, out: &mut dyn Write) -> Result<()> {
    check_precision(a.precision)?;
    if !(a.step > 0.0 && a.step < 0.1) {
        return Err(usage("--step must lie in (0, 0.1)"));
    }
    if !(a.tol > 0.0 && a.tol < 1e-3) {
        return Err(usage("--tol must lie in (0, 1e-3)"));
    }
    let mut rec = Recorder::new("attractor", Some(a.precision));
    rec.param("step", a.step).param("tol", a.tol);
    let cfg = GeometryConfig { prec: a.precision, step: a.step, tol: a.tol };
    let geom = AttractorGeometry::build(&cfg).map_err(numerical)?;
    let table = DensityTable::new(&geom);

    for c in &geom.curves {
        let path = curve_file(&a.out_dir, c.pair);
        let mut buf = Vec::new();
        write_curve(c, &mut buf).map_err(io_err(&path))?;
        write_file(&path, &buf)?;
        rec.output(&path);
    }
    let path = a.out_dir.join("geometry.csv");
    write_file(&path, geometry_csv(&geom).as_bytes())?;
    rec.output(&path);
    let path = a.out_dir.join("density.csv");
    write_file(&path, density_csv(&table).as_bytes())?;
    rec.output(&path);
    let path = a.out_dir.join("attractor.svg");
    write_file(&path, attractor_figure(&geom, "Attractor curves").finish().as_bytes())?;
    rec.output(&path);
    rec.finish().map_err(io_err(&a.out_dir))?;

    let stdout = Path::new("<stdout>");
    let mut say = |s: String| writeln!(out, "{s}").map_err(io_err(stdout));
    say(format!("triple point {}", fmt_complex(&geom.triple_point, 12)))?;
    say(format!(
        "theta13 {}  theta12 {}  theta23 {}",
        fmt_float(&geom.theta13, 12),
        fmt_float(&geom.theta12, 12),
        fmt_float(&geom.theta23, 12)
    ))?;
    for r in &table.rows {
        say(format!(
            "C{}: length {:.10} mass {:.9} arc [{:.9}, {:.9}] weight {:.6}",
            r.pair.tag(),
            r.length,
            r.mass,
            r.arc_lo,
            r.arc_hi,
            r.weight
        ))?;
    }
    say(format!("C = {:.10}", table.square_root_constant()))
}

fn geometry_csv(geom: &AttractorGeometry) -> String {
    let d = 20;
    let rows = [
        ("triple_re", fmt_float(geom.triple_point.real(), d)),
        ("triple_im", fmt_float(geom.triple_point.imag(), d)),
        ("theta13", fmt_float(&geom.theta13, d)),
        ("theta12", fmt_float(&geom.theta12, d)),
        ("theta23", fmt_float(&geom.theta23, d)),
    ];
    let mut s = String::from("quantity,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

fn density_csv(table: &DensityTable) -> String {
    let mut s = String::from("curve,length,mass,endpoint_difference,arc_lo,arc_hi,weight\n");
    for r in &table.rows {
        s.push_str(&format!(
            "C{},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10}\n",
            r.pair.tag(),
            r.length,
            r.mass,
            r.endpoint_difference,
            r.arc_lo,
            r.arc_hi,
            r.weight
        ));
    }
    s.push_str(&format!("C,,{:.10},,,,\n", table.square_root_constant()));
    s
}

/// Geometry from an `attractor` output directory, with the angles and the
/// triple point recomputed.
fn load_geometry(dir: &Path, prec: u32) -> Result<AttractorGeometry> {
    let read = |pair: Pair| -> Result<CurveSample> {
        let path = curve_file(dir, pair);
        let text = read_file(&path)?;
        let c = read_curve(text.as_bytes(), prec.min(128)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if c.pair != pair {
            return Err(usage(format!("{}: holds curve C{}", path.display(), c.pair.tag())));
        }
        Ok(c)
    };
    let curves = [read(Pair::P12)?, read(Pair::P13)?, read(Pair::P23)?];
    let (theta13, theta12, theta23) = boundary_angles(prec).map_err(numerical)?;
    let triple_point = triple_point(prec).map_err(numerical)?;
    Ok(AttractorGeometry { triple_point, theta13, theta12, theta23, curves })
}

/// Zeros from a zero file; an empty file is an empty set of degree 0.
fn load_zeros(path: &Path) -> Result<(usize, Vec<Complex64>)> {
    let text = read_file(path)?;
    if text.trim().is_empty() {
        return Ok((0, Vec::new()));
    }
    let zf = read_zeros(text.as_bytes()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((zf.degree, zf.zeros.iter().map(|(z, _)| to_c64(z)).collect()))
}

pub fn cmd_census(a: &CensusArgs, out: &mut dyn Write) -> Result<()> {
    check_precision(a.precision)?;
    if !(a.threshold > 0.0 && a.threshold <= 1.0) {
        return Err(usage("--threshold must lie in (0, 1]"));
    }
    let mut rec = Recorder::new("census", Some(a.precision));
    rec.param("threshold", a.threshold);
    let geom = match &a.geometry {
        Some(dir) => {
            rec.input(dir);
            load_geometry(dir, a.precision)?
        }
        None => AttractorGeometry::build(&GeometryConfig { prec: a.precision, ..Default::default() }).map_err(numerical)?,
    };
    let table = DensityTable::new(&geom);
    let weights = table.weights();

    let mut reports = Vec::new();
    let mut families = String::from("degree,f2_f3,predicted\n");
    let stdout = Path::new("<stdout>");
    for path in &a.zeros {
        rec.input(path);
        let (degree, zeros) = load_zeros(path)?;
        let report = CensusReport::new(degree, &zeros, &geom, &table, a.threshold).map_err(numerical)?;
        let [f1, f2, f3] = report.family_counts;
        writeln!(
            out,
            "degree {degree}: {} inside |z| < {}, second quadrant {} (F1 {f1}, F2 {f2}, F3 {f3}), predicted {:.2} / {:.2}",
            report.total_inside, a.threshold, report.q2_inside, report.prediction_ls, report.prediction_c
        )
        .map_err(io_err(stdout))?;
        families.push_str(&format!("{degree},{},{:.4}\n", f2 + f3, family_prediction(degree as u64, weights)));

        let svg_path = a.out_dir.join(format!("{}.census.svg", file_stem(path)));
        let svg = census_figure(&geom, &zeros, a.threshold, degree);
        write_file(&svg_path, svg.as_bytes())?;
        rec.output(&svg_path);

        let occ_path = a.out_dir.join(format!("{}.occupancy.csv", file_stem(path)));
        write_file(&occ_path, occupancy_csv(&geom, &zeros, a.threshold)?.as_bytes())?;
        rec.output(&occ_path);
        reports.push(report);
    }
    let csv_path = a.out_dir.join("census.csv");
    let mut buf = Vec::new();
    write_census_csv(&reports, &mut buf).map_err(io_err(&csv_path))?;
    write_file(&csv_path, &buf)?;
    rec.output(&csv_path);
    let fam_path = a.out_dir.join("families.csv");
    write_file(&fam_path, families.as_bytes())?;
    rec.output(&fam_path);
    let dens_path = a.out_dir.join("density.csv");
    write_file(&dens_path, density_csv(&table).as_bytes())?;
    rec.output(&dens_path);
    rec.finish().map_err(io_err(&a.out_dir))?;
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "zeros".to_string())
}

/// Per family, the number of upper-half inside zeros in each equal-mass cell
/// of its curve, with one cell per zero.
fn occupancy_csv(geom: &AttractorGeometry, zeros: &[Complex64], threshold: f64) -> Result<String> {
    let inside = inside_zeros(zeros, threshold).map_err(numerical)?;
    let mut s = String::from("family,cell,count\n");
    for fam in [Family::F1, Family::F2, Family::F3] {
        let members: Vec<Complex64> = inside
            .iter()
            .copied()
            .filter(|&z| in_q2(z) && classify_family(z, geom).0 == fam)
            .collect();
        let occ = cell_occupancy(geom.curve(fam.curve()), &members, members.len().max(1));
        for (i, c) in occ.iter().enumerate() {
            s.push_str(&format!("{fam},{i},{c}\n"));
        }
    }
    Ok(s)
}

fn census_figure(geom: &AttractorGeometry, zeros: &[Complex64], threshold: f64, degree: usize) -> String {
    let mut f = Figure::plane((-1.1, 1.1), (-1.1, 1.1), 640.0);
    f.title(&format!("Zeros of degree {degree} against the attractor"));
    f.axes("Re x", "Im x");
    f.circle(1.0, "unit-circle", false);
    f.circle(threshold, "threshold", true);
    for (c, colour) in geom.curves.iter().zip(CURVE_COLOURS) {
        f.path(&plane_points(c), &format!("curve c{}", c.pair.tag()), colour);
    }
    let mut groups: [Vec<(f64, f64)>; 4] = Default::default();
    for &z in zeros {
        let g = if z.norm() >= threshold {
            3
        } else {
            match classify_family(z, geom).0 {
                Family::F1 => 0,
                Family::F2 => 1,
                Family::F3 => 2,
            }
        };
        groups[g].push((z.re, z.im));
    }
    f.markers(&groups[3], "zeros outside", "#999999", 1.2);
    for (i, colour) in CURVE_COLOURS.iter().enumerate() {
        f.markers(&groups[i], &format!("zeros f{}", i + 1), colour, 2.5);
    }
    f.finish()
}

pub fn cmd_asympt(a: &AsymptArgs, out: &mut dyn Write) -> Result<()> {
    check_precision(a.precision)?;
    if !(a.x.is_finite() && a.y.is_finite()) {
        return Err(usage("x must be finite"));
    }
    if a.x == 0.0 && a.y == 0.0 {
        return Err(usage("x = 0 is not allowed: F_n(0) = 0 for every n"));
    }
    if let Some(bad) = a.n.iter().find(|&&n| n == 0) {
        return Err(usage(format!("degrees must be positive, got {bad}")));
    }
    let prec = a.precision;
    let x = Complex::with_val(prec, (a.x, a.y));
    let modulus = Complex64::new(a.x, a.y).norm();
    let mut rec = Recorder::new("asympt", Some(prec));
    rec.param("x", a.x).param("y", a.y).param("n", &a.n);

    let mut s = String::from("n,region,exact_re,exact_im,estimate_re,estimate_im,rel_error,log_over_n,log_limit\n");
    for &n in &a.n {
        let p = partition_coeffs(n as usize).map_err(numerical)?;
        let exact = exact_value(&p, &x, prec).with_context(|| format!("evaluating F_{n}")).map_err(numerical)?;
        let lon = log_over_degree(&p, &x, prec).map_err(numerical)?;
        let limit = modulus.ln().max(0.0);
        let (ex_re, ex_im) = (sci(exact.real()), sci(exact.imag()));
        let mut row = format!("{n},");
        if modulus < 1.0 {
            match leading_asymptotic(&x, n, prec) {
                Ok(est) => {
                    let diff = Complex::with_val(prec, &exact - &est.value);
                    let rel = Float::with_val(prec, diff.abs_ref()) / Float::with_val(prec, exact.abs_ref());
                    row.push_str(&format!(
                        "R{},{ex_re},{ex_im},{},{},{:.6e},",
                        est.k,
                        sci(est.value.real()),
                        sci(est.value.imag()),
                        rel.to_f64()
                    ));
                }
                Err(e @ (AsymptoticError::NearBoundary { .. } | AsymptoticError::SlowConvergence(_))) => {
                    eprintln!("n = {n}: no estimate: {e}");
                    row.push_str(&format!("-,{ex_re},{ex_im},,,,"));
                }
                Err(e) => return Err(numerical(e)),
            }
        } else {
            row.push_str(&format!("-,{ex_re},{ex_im},,,,"));
        }
        row.push_str(&format!("{lon:.9},{limit:.9}\n"));
        s.push_str(&row);
    }
    match &a.out {
        Some(path) => {
            write_file(path, s.as_bytes())?;
            rec.output(path);
            rec.finish().map_err(io_err(path))?;
        }
        None => out.write_all(s.as_bytes()).map_err(io_err(Path::new("<stdout>")))?,
    }
    Ok(())
}

pub fn cmd_plot(k: &PlotKind, _out: &mut dyn Write) -> Result<()> {
    match k {
        PlotKind::Zeros { zeros, out } => {
            let mut rec = Recorder::new("plot zeros", None);
            rec.input(zeros);
            let (degree, pts) = load_zeros(zeros)?;
            let r = pts.iter().map(|z| z.norm()).fold(1.0f64, f64::max) * 1.05;
            let mut f = Figure::plane((-r, r), (-r, r), 640.0);
            f.title(&format!("Zeros of the degree {degree} polynomial"));
            f.axes("Re x", "Im x");
            f.circle(1.0, "unit-circle", false);
            let pts: Vec<(f64, f64)> = pts.iter().map(|z| (z.re, z.im)).collect();
            f.markers(&pts, "zeros", "black", 1.5);
            write_file(out, f.finish().as_bytes())?;
            rec.output(out);
            rec.finish().map_err(io_err(out))?;
        }
        PlotKind::Digits { n, kind, out } => {
            let mut rec = Recorder::new("plot digits", None);
            rec.param("n", n).param("kind", PolyKind::from(*kind).tag());
            let p = generate(*n, *kind)?;
            let stats = digit_stats(&p);
            let pts: Vec<(f64, f64)> =
                p.coeffs.iter().enumerate().map(|(k, c)| (k as f64, decimal_digits(c) as f64)).collect();
            let mut f = Figure::new((0.0, p.degree() as f64), (0.0, stats.max_digits as f64 * 1.05 + 1.0), 720.0, 420.0);
            f.title(&format!("Digits of the coefficients, degree {n} (max {})", stats.max_digits));
            f.axes("k", "digits");
            f.path(&pts, "digits", "black");
            write_file(out, f.finish().as_bytes())?;
            rec.output(out);
            rec.finish().map_err(io_err(out))?;
        }
        PlotKind::Density { precision, out } => {
            check_precision(*precision)?;
            let mut rec = Recorder::new("plot density", Some(*precision));
            let geom = AttractorGeometry::build(&GeometryConfig { prec: *precision, ..Default::default() })
                .map_err(numerical)?;
            let series: Vec<(Pair, Vec<(f64, f64)>)> = geom
                .curves
                .iter()
                .map(|c| {
                    let pts = c
                        .arclength
                        .windows(2)
                        .filter_map(|w| {
                            let s = (w[0] + w[1]) / 2.0;
                            density_function(c, s).ok().map(|d| (s, d))
                        })
                        .collect();
                    (c.pair, pts)
                })
                .collect();
            let smax = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).fold(0.0, f64::max);
            // the density of C12 diverges at the origin; clip to the bulk
            let dmax = series.iter().flat_map(|(_, p)| p.iter().skip(p.len() / 10).map(|q| q.1)).fold(0.0, f64::max);
            let mut f = Figure::new((0.0, smax), (0.0, dmax * 1.2), 720.0, 420.0);
            f.title("Zero density against arclength");
            f.axes("arclength", "density");
            for ((pair, pts), colour) in series.iter().zip(CURVE_COLOURS) {
                let clipped: Vec<(f64, f64)> = pts.iter().copied().filter(|q| q.1 <= dmax * 1.2).collect();
                f.path(&clipped, &format!("density c{}", pair.tag()), colour);
            }
            write_file(out, f.finish().as_bytes())?;
            rec.output(out);
            rec.finish().map_err(io_err(out))?;
        }
    }
    Ok(())
}
