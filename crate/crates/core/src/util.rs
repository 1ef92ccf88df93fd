//! Integer and rational combinatorics shared by every module.

use std::sync::OnceLock;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::series::Rational;

/// `n / d` as an exact rational.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_q(n: u32) -> Rational {
    Rational::from_integer(factorial(n))
}

/// `(2k-1)!!` for `k >= 0`, with `(-1)!! = 1`.
pub fn odd_double_factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i - 1))
}

/// `(2k-1)!!` as a rational.
pub fn odf_q(k: u32) -> Rational {
    Rational::from_integer(odd_double_factorial(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial coefficient `C(n, k)` for any integer `n`.
pub fn binomial_signed(n: i64, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k as i64 {
        acc = acc * qi(n - i) / qi(i + 1);
    }
    acc
}

pub fn pow_q(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli(n: u32) -> Rational {
    let mut table = bernoulli_table().lock().expect("bernoulli table poisoned");
    while table.len() <= n as usize {
        let m = table.len() as u32;
        // sum_{k<m} C(m+1, k) B_k + (m+1) B_m = 0
        let mut s = Rational::zero();
        for (k, b) in table.iter().enumerate() {
            s += Rational::from_integer(binomial(m + 1, k as u32)) * b;
        }
        let bm = -s / qi(m as i64 + 1);
        table.push(bm);
    }
    table[n as usize].clone()
}

/// `(-1)^n` as a rational.
pub fn sign(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs_q(r: &Rational) -> Rational {
    r.abs()
}

/// All multisets (as non-decreasing vectors) of `len` integers in `[lo, ..]`
/// summing to exactly `total`.
pub fn multisets_with_sum(len: usize, total: u32, lo: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, total: u32, lo: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if (lo as u64) * (len as u64) > total as u64 {
            return;
        }
        let mut v = lo;
        while (v as u64) * (len as u64) <= total as u64 {
            cur.push(v);
            rec(len - 1, total - v, v, cur, out);
            cur.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    rec(len, total, lo, &mut Vec::new(), &mut out);
    out
}

/// `1 / prod(multiplicity!)` for a sorted multiset, i.e. the weight that turns
/// a sum over ordered tuples divided by `n!` into a sum over multisets.
pub fn inv_automorphism(sorted: &[u32]) -> Rational {
    let mut denom = BigInt::one();
    let mut run = 0u32;
    for (i, v) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == *v {
            run += 1;
        } else {
            run = 1;
        }
        denom *= BigInt::from(run);
    }
    Rational::new(BigInt::one(), denom)
}
