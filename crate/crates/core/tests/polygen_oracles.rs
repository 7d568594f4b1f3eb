use attractorlab::polygen::*;
use rug::{Assign, Integer};

/// p(0..=n) by Euler's pentagonal-number recurrence.
fn pentagonal(n: usize) -> Vec<Integer> {
    let mut p = vec![Integer::new(); n + 1];
    p[0].assign(1);
    for m in 1..=n {
        let mut acc = Integer::new();
        for j in 1.. {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > m {
                break;
            }
            let sign_plus = j % 2 == 1;
            let g2 = j * (3 * j + 1) / 2;
            for g in [g1, g2] {
                if g <= m {
                    if sign_plus {
                        acc += &p[m - g];
                    } else {
                        acc -= &p[m - g];
                    }
                }
            }
        }
        p[m] = acc;
    }
    p
}

#[test]
fn counts_match_pentagonal_recurrence_to_2000() {
    let oracle = pentagonal(2000);
    let sweep = partition_counts_upto(2000);
    assert_eq!(sweep, oracle);
    for n in (1..=2000).step_by(199) {
        assert_eq!(partition_count(n).unwrap(), oracle[n], "p({n})");
    }
    assert_eq!(partition_count(200).unwrap(), oracle[200]);
    assert_eq!(oracle[200].to_string(), "3972999029388");
}

#[test]
fn every_f_n_up_to_2000_is_unimodal() {
    const N: usize = 2000;
    // Per degree m: last coefficient seen and whether the sequence has started falling.
    let mut last = vec![Integer::new(); N + 1];
    let mut falling = vec![false; N + 1];
    let mut ok = vec![true; N + 1];
    partition_rows(N, |_, row| {
        for m in 1..=N {
            let v = &row[m];
            if *v < last[m] {
                falling[m] = true;
            } else if *v > last[m] && falling[m] {
                ok[m] = false;
            }
            last[m].assign(v);
        }
    });
    let bad: Vec<usize> = (1..=N).filter(|&m| !ok[m]).collect();
    assert!(bad.is_empty(), "non-unimodal degrees: {bad:?}");
}

#[test]
fn second_and_third_coefficients_from_the_top() {
    for n in 4..=400 {
        let p = partition_coeffs(n).unwrap();
        assert_eq!(p.coeffs[n - 1], 1);
        assert_eq!(p.coeffs[n - 2], 2);
    }
}

#[test]
fn hardy_ramanujan_ratio_converges() {
    let counts = partition_counts_upto(2000);
    let err = |n: usize| {
        let r = rug::Float::with_val(256, &counts[n]) / hardy_ramanujan_estimate(n, 256);
        (r.to_f64() - 1.0).abs()
    };
    assert!(err(400) < err(100));
    let ratio_2000 = 1.0 + err(2000);
    assert!(ratio_2000 < 1.05);
    let mut prev = hardy_ramanujan_estimate(1, 128);
    for n in 2..=1000 {
        let cur = hardy_ramanujan_estimate(n, 128);
        assert!(cur > prev, "estimate not increasing at {n}");
        prev = cur;
    }
}

/// Plane partitions of n counted by trace, by direct enumeration of arrays
/// with weakly decreasing rows and columns.
fn plane_by_trace(n: usize) -> Vec<u64> {
    fn rows(rem: usize, above: &[usize], depth: usize, trace: usize, out: &mut Vec<u64>) {
        if rem == 0 {
            out[trace] += 1;
            return;
        }
        let mut row = Vec::new();
        fill(rem, above, depth, trace, &mut row, out);
    }
    // Builds the current row entry by entry; each entry is bounded by the one
    // to its left and the one above.
    fn fill(rem: usize, above: &[usize], depth: usize, trace: usize, row: &mut Vec<usize>, out: &mut Vec<u64>) {
        let col = row.len();
        if !row.is_empty() {
            let diag = if depth < row.len() { row[depth] } else { 0 };
            rows(rem, &row.clone(), depth + 1, trace + diag, out);
        }
        if col >= above.len() {
            return;
        }
        let cap = above[col].min(*row.last().unwrap_or(&usize::MAX)).min(rem);
        for v in 1..=cap {
            row.push(v);
            fill(rem - v, above, depth, trace, row, out);
            row.pop();
        }
    }
    let mut out = vec![0u64; n + 1];
    rows(n, &vec![usize::MAX; n], 0, 0, &mut out);
    out
}

#[test]
fn plane_partitions_match_enumeration_to_12() {
    let totals = [1u64, 3, 6, 13, 24, 48, 86, 160, 282, 500, 859, 1479];
    for n in 1..=12 {
        let q = plane_partition_coeffs(n).unwrap();
        let want = plane_by_trace(n);
        for (m, w) in want.iter().enumerate() {
            assert_eq!(q.coeffs[m], *w, "trace {m} of n = {n}");
        }
        assert_eq!(q.coefficient_sum(), totals[n - 1]);
    }
}

#[test]
#[ignore = "long-running: degree 25000"]
fn digits_at_25000() {
    let s = digit_stats(&partition_coeffs(25000).unwrap());
    assert_eq!(s.max_digits, 169);
    assert_eq!(s.max_log10.floor(), 168.0);
    assert!(s.unimodal);
}
