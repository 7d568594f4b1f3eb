//! Exact coefficients of the partition polynomials
//! `F_n(x) = Σ_k p_k(n) x^k` and the plane-partition polynomials `Q_n(x)`.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use rug::{Assign, Float, Integer};
use thiserror::Error;

use crate::numeric::pi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyKind {
    Partition,
    PlanePartition,
}

impl PolyKind {
    pub fn tag(self) -> &'static str {
        match self {
            PolyKind::Partition => "partition",
            PolyKind::PlanePartition => "plane",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "partition" => Some(PolyKind::Partition),
            "plane" => Some(PolyKind::PlanePartition),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PolygenError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A polynomial with exact nonnegative integer coefficients, `coeffs[k]` being
/// the coefficient of `x^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPolynomial {
    pub kind: PolyKind,
    pub coeffs: Vec<Integer>,
}

impl ExactPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Sum of the coefficients, i.e. the value at `x = 1`.
    pub fn coefficient_sum(&self) -> Integer {
        Integer::sum(self.coeffs.iter()).into()
    }

    /// Exact value at an integer point.
    pub fn eval_integer(&self, x: i64) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Writes the `partition-poly v1` text format.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "partition-poly v1 kind={} n={}", self.kind.tag(), self.degree())?;
        let mut line = String::new();
        for c in &self.coeffs {
            line.clear();
            write!(line, "{c}").expect("writing to a String cannot fail");
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the `partition-poly v1` text format.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self, PolygenError> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "empty input"))??;
        let (kind, n) = parse_header(&header)?;
        let mut coeffs = Vec::with_capacity(n + 1);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if coeffs.len() == n + 1 {
                if line.is_empty() {
                    continue;
                }
                return Err(parse_err(lineno, "more coefficients than n + 1"));
            }
            let c: Integer = line
                .parse()
                .map_err(|_| parse_err(lineno, &format!("not a decimal integer: {line:?}")))?;
            if c < 0 {
                return Err(parse_err(lineno, "negative coefficient"));
            }
            coeffs.push(c);
        }
        if coeffs.len() != n + 1 {
            return Err(parse_err(coeffs.len() + 2, &format!("expected {} coefficients, found {}", n + 1, coeffs.len())));
        }
        Ok(ExactPolynomial { kind, coeffs })
    }

    pub fn from_text(text: &str) -> Result<Self, PolygenError> {
        Self::read_from(text.as_bytes())
    }
}

fn parse_err(line: usize, msg: &str) -> PolygenError {
    PolygenError::Parse { line, msg: msg.to_string() }
}

fn parse_header(header: &str) -> Result<(PolyKind, usize), PolygenError> {
    let mut parts = header.split(' ');
    if parts.next() != Some("partition-poly") || parts.next() != Some("v1") {
        return Err(parse_err(1, "expected header `partition-poly v1 ...`"));
    }
    let kind = parts
        .next()
        .and_then(|s| s.strip_prefix("kind="))
        .and_then(PolyKind::from_tag)
        .ok_or_else(|| parse_err(1, "bad kind field"))?;
    let n = parts
        .next()
        .and_then(|s| s.strip_prefix("n="))
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_err(1, "bad n field"))?;
    if parts.next().is_some() {
        return Err(parse_err(1, "trailing header fields"));
    }
    Ok((kind, n))
}

/// Runs the recurrence `p_k(m) = p_{k−1}(m−1) + p_k(m−k)` for `k = 1..=n`,
/// handing each row `m ↦ p_k(m)`, `0 ≤ m ≤ n`, to `visit`. Only two rows are
/// kept alive.
pub fn partition_rows<V: FnMut(usize, &[Integer])>(n: usize, mut visit: V) {
    // prev[m] = p_{k-1}(m); row 0 is p_0(m) = [m == 0].
    let mut prev = vec![Integer::new(); n + 1];
    let mut cur = vec![Integer::new(); n + 1];
    prev[0].assign(1);
    for k in 1..=n {
        for slot in cur.iter_mut().take(k) {
            slot.assign(0);
        }
        for m in k..=n {
            let (lo, hi) = cur.split_at_mut(m);
            hi[0].assign(&prev[m - 1]);
            hi[0] += &lo[m - k];
        }
        visit(k, &cur);
        std::mem::swap(&mut prev, &mut cur);
    }
}

/// `F_n`, the last column of [`partition_rows`].
pub fn partition_coeffs(n: usize) -> Result<ExactPolynomial, PolygenError> {
    if n == 0 {
        return Err(PolygenError::ZeroDegree);
    }
    let mut coeffs = vec![Integer::new(); n + 1];
    partition_rows(n, |k, row| coeffs[k].assign(&row[n]));
    Ok(ExactPolynomial { kind: PolyKind::Partition, coeffs })
}

/// `p(0), p(1), ..., p(n)` from a single sweep of the recurrence.
pub fn partition_counts_upto(n: usize) -> Vec<Integer> {
    let mut totals = vec![Integer::new(); n + 1];
    totals[0].assign(1);
    partition_rows(n, |_, row| {
        for (t, v) in totals.iter_mut().zip(row).skip(1) {
            *t += v;
        }
    });
    totals
}

/// `p(n) = F_n(1)`.
pub fn partition_count(n: usize) -> Result<Integer, PolygenError> {
    Ok(partition_coeffs(n)?.coefficient_sum())
}

/// `e^{π√(2n/3)} / (4n√3)`.
pub fn hardy_ramanujan_estimate(n: usize, prec: u32) -> Float {
    let nf = Float::with_val(prec, n);
    let arg = Float::with_val(prec, &nf * 2u32) / 3u32;
    let expo = arg.sqrt() * pi(prec);
    let den = Float::with_val(prec, 3u32).sqrt() * nf * 4u32;
    expo.exp() / den
}

/// The full table `p_k(m)` for `0 ≤ k, m ≤ n`, for inspection at small `n`.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    n: usize,
    rows: Vec<Vec<Integer>>,
}

impl PartitionTable {
    pub fn new(n: usize) -> Self {
        let mut rows = vec![vec![Integer::new(); n + 1]; n + 1];
        rows[0][0].assign(1);
        for k in 1..=n {
            for m in k..=n {
                let v = Integer::from(&rows[k - 1][m - 1] + &rows[k][m - k]);
                rows[k][m] = v;
            }
        }
        PartitionTable { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p_k(m)`, zero outside the table.
    pub fn get(&self, k: usize, m: usize) -> &Integer {
        static ZERO: Integer = Integer::ZERO;
        self.rows.get(k).and_then(|r| r.get(m)).unwrap_or(&ZERO)
    }
}

/// `Q_n`: coefficient of `u^n` in `∏_{k≤n} (1 − x u^k)^{−k}`, where the power of
/// `x` records the trace.
pub fn plane_partition_coeffs(n: usize) -> Result<ExactPolynomial, PolygenError> {
    if n == 0 {
        return Err(PolygenError::ZeroDegree);
    }
    // series[d] is the coefficient of u^d, a polynomial in x of degree ≤ d.
    let mut series: Vec<Vec<Integer>> = (0..=n).map(|d| vec![Integer::new(); d + 1]).collect();
    series[0][0].assign(1);
    for k in 1..=n {
        // (1 − x u^k)^{−k} = Σ_j C(k+j−1, j) x^j u^{kj}
        let jmax = n / k;
        let binoms: Vec<Integer> = (0..=jmax).map(|j| Integer::from(k + j - 1).binomial(j as u32)).collect();
        let mut next: Vec<Vec<Integer>> = series.clone();
        for d in 0..=n {
            for (j, b) in binoms.iter().enumerate().skip(1) {
                let target = d + k * j;
                if target > n {
                    break;
                }
                for (t, c) in series[d].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    next[target][t + j] += Integer::from(c * b);
                }
            }
        }
        series = next;
    }
    let coeffs = std::mem::take(&mut series[n]);
    Ok(ExactPolynomial { kind: PolyKind::PlanePartition, coeffs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitStats {
    pub max_digits: usize,
    /// `log₁₀` of the largest coefficient.
    pub max_log10: f64,
    /// Smallest index whose coefficient has `max_digits` digits.
    pub argmax_index: usize,
    pub unimodal: bool,
}

pub fn decimal_digits(c: &Integer) -> usize {
    if c.is_zero() {
        return 1;
    }
    c.to_string_radix(10).trim_start_matches('-').len()
}

pub fn is_unimodal(coeffs: &[Integer]) -> bool {
    let mut i = 1;
    while i < coeffs.len() && coeffs[i] >= coeffs[i - 1] {
        i += 1;
    }
    while i < coeffs.len() && coeffs[i] <= coeffs[i - 1] {
        i += 1;
    }
    i >= coeffs.len()
}

pub fn digit_stats(p: &ExactPolynomial) -> DigitStats {
    // Only coefficients as long as the current maximum in bits need printing.
    let max_bits = p.coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0);
    let mut max_digits = 0;
    let mut argmax_index = 0;
    for (k, c) in p.coeffs.iter().enumerate() {
        if c.significant_bits() + 4 < max_bits {
            continue;
        }
        let d = decimal_digits(c);
        if d > max_digits {
            max_digits = d;
            argmax_index = k;
        }
    }
    let max_log10 = p.coeffs.iter().max().map_or(f64::NEG_INFINITY, |c| Float::with_val(64, c).log10().to_f64());
    DigitStats { max_digits, max_log10, argmax_index, unimodal: is_unimodal(&p.coeffs) }
}
