//! Integer-exact evaluation of the quantities that involve `m`-th roots.
//!
//! `α = (2L/n)^{1/m}` is irrational in general, so every comparison against
//! it is rewritten by raising both sides to the `m`-th power and clearing
//! denominators. No floating point is involved in any decision.

use num_bigint::BigUint;
use num_traits::One;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `⌈count · (2L/n)^{1/m}⌉`: the least `s` with `s^m · n ≥ count^m · 2L`.
pub fn ceil_alpha_times(count: u64, n: u64, segment: u64, m: u32) -> u64 {
    if count == 0 {
        return 0;
    }
    let rhs = big(count).pow(m) * big(2 * segment);
    let nn = big(n);
    let ok = |s: u64| big(s).pow(m) * &nn >= rhs;
    // α ≤ 1 whenever n ≥ 2L, so `count` is an upper bound; widen otherwise.
    let mut hi = count;
    while !ok(hi) {
        hi = hi.saturating_mul(2);
    }
    let mut lo = 0u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// `⌊n^{1+1/m} / (6L(m+1)²(2L)^{1/m})⌋`: the largest `k` with
/// `(6kL(m+1)²)^m · 2L ≤ n^{m+1}`.
pub fn max_team_size(n: u64, segment: u64, m: u32) -> u64 {
    let lhs_bound = big(n).pow(m + 1);
    let unit = big(6 * segment) * big(u64::from(m) + 1).pow(2);
    let two_l = big(2 * segment);
    let ok = |k: u64| (big(k) * &unit).pow(m) * &two_l <= lhs_bound;
    if !ok(1) {
        return 0;
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while ok(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            break;
        }
    }
    // invariant: ok(lo), !ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `s ≥ α^i · n / (2L)`, i.e. `s^m (2L)^{m-i} ≥ n^{m-i}`.
pub fn selection_lower_bound_holds(s: u64, i: u32, n: u64, segment: u64, m: u32) -> bool {
    assert!(i <= m);
    big(s).pow(m) * big(2 * segment).pow(m - i) >= big(n).pow(m - i)
}

/// `s ≤ (2α)^i · n / (2L)`, i.e. `s^m (2L)^{m-i} ≤ 2^{im} n^{m-i}`.
pub fn selection_upper_bound_holds(s: u64, i: u32, n: u64, segment: u64, m: u32) -> bool {
    assert!(i <= m);
    let two_pow: BigUint = BigUint::one() << (i * m) as usize;
    big(s).pow(m) * big(2 * segment).pow(m - i) <= two_pow * big(n).pow(m - i)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: BigUint = BigUint::one();
    for j in 0..k {
        acc *= big(n - j);
        acc /= big(j + 1);
    }
    u64::try_from(acc).expect("binomial fits in u64")
}

/// `16^m`, or `None` on overflow.
pub fn sixteen_pow(m: u32) -> Option<u64> {
    16u64.checked_pow(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_sizes() {
        assert_eq!(ceil_alpha_times(2048, 4096, 1, 3), 162);
        assert_eq!(ceil_alpha_times(162, 4096, 1, 3), 13);
        assert_eq!(ceil_alpha_times(32768, 65536, 1, 4), 2436);
        assert_eq!(ceil_alpha_times(0, 4096, 1, 3), 0);
        assert_eq!(ceil_alpha_times(1, 4096, 1, 3), 1);
        // α = 1/2 exactly: 2^3 * 1 / 16 with n = 16, L = 1, m = 3 -> (2/16)^{1/3} = 1/2
        assert_eq!(ceil_alpha_times(10, 16, 1, 3), 5);
        assert_eq!(ceil_alpha_times(11, 16, 1, 3), 6);
    }

    #[test]
    fn team_size_goldens() {
        assert_eq!(max_team_size(4096, 1, 3), 541);
        assert_eq!(max_team_size(65536, 1, 4), 5878);
        assert_eq!(max_team_size(16384, 4, 3), 541);
        assert_eq!(max_team_size(1 << 20, 1, 4), 188_105);
        // exact rational boundary: 2^21 / 96 = 21845.33…
        assert_eq!(max_team_size(65536, 1, 3), 21845);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 5), 0);
    }

    #[test]
    fn claim3_bounds_at_equality() {
        // α^1·n/(2L) with n = 16, L = 1, m = 3: α = 1/2, bound = 4
        assert!(selection_lower_bound_holds(4, 1, 16, 1, 3));
        assert!(!selection_lower_bound_holds(3, 1, 16, 1, 3));
        // (2α)^1·n/(2L) = 8
        assert!(selection_upper_bound_holds(8, 1, 16, 1, 3));
        assert!(!selection_upper_bound_holds(9, 1, 16, 1, 3));
    }
}
