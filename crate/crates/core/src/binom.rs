//! Binomial coefficients, exact where the test machinery needs them exact.

/// Row `q` of Pascal's triangle in `f64`, built by additions so every entry
/// is exact as long as it stays below 2^53 (q <= 53; beyond that entries are
/// correctly rounded).
pub(crate) fn pascal_row(q: usize) -> Vec<f64> {
    let mut row = vec![0.0f64; q + 1];
    row[0] = 1.0;
    for n in 1..=q {
        for k in (1..=n).rev() {
            row[k] += row[k - 1];
        }
    }
    row
}

/// Exact binomial coefficient in i128, with C(n, 0) = 1 for every n (empty
/// selection) and 0 for k < 0 or k > n. Panics on overflow, which cannot
/// happen for the q <= 25 range used by the enumeration-backed code paths.
pub(crate) fn binom_i128(n: i64, k: i64) -> i128 {
    if k < 0 {
        return 0;
    }
    if k == 0 {
        return 1;
    }
    if n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: i128 = 1;
    for i in 1..=k {
        // exact at every step: c * (n - k + i) is divisible by i
        c = c * (n - k + i) as i128 / i as i128;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_matches_exact() {
        for (k, &count) in pascal_row(12).iter().enumerate() {
            assert_eq!(count, binom_i128(12, k as i64) as f64);
        }
    }

    #[test]
    fn binom_edge_cases() {
        assert_eq!(binom_i128(10, 0), 1);
        assert_eq!(binom_i128(10, 10), 1);
        assert_eq!(binom_i128(10, -1), 0);
        assert_eq!(binom_i128(10, 11), 0);
        assert_eq!(binom_i128(20, 10), 184_756);
    }
}
