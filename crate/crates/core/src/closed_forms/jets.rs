//! Polynomials in jet variables `z_2, z_3, ...` with Laurent dependence on `z_1`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::series::{Rational, Series};
use crate::util::qi;

/// `sum c * z_1^{e_1} z_2^{e_2} ...`; the exponent vector is stored without
/// trailing zeros, entry `k-1` belonging to `z_k`. Only `e_1` may be negative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JetPoly {
    terms: BTreeMap<Vec<i32>, Rational>,
}

fn trim(mut e: Vec<i32>) -> Vec<i32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl JetPoly {
    pub fn zero() -> Self {
        JetPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = JetPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        JetPoly::constant(Rational::one())
    }

    /// `c * prod z_k^{e_k}` with `exps[k-1] = e_k`.
    pub fn monomial(exps: &[i32], c: Rational) -> Self {
        let mut p = JetPoly::zero();
        p.add_term(exps.to_vec(), c);
        p
    }

    /// The jet variable `z_k`, `k >= 1`.
    pub fn var(k: usize) -> Self {
        let mut e = vec![0; k];
        e[k - 1] = 1;
        JetPoly::monomial(&e, Rational::one())
    }

    pub fn add_term(&mut self, e: Vec<i32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = trim(e);
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i32>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[i32]) -> Rational {
        self.terms.get(&trim(exps.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &JetPoly) -> JetPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        let mut out = JetPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let n = ea.len().max(eb.len());
                let e: Vec<i32> = (0..n).map(|i| ea.get(i).unwrap_or(&0) + eb.get(i).unwrap_or(&0)).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> JetPoly {
        (0..n).fold(JetPoly::one(), |acc, _| acc.mul(self))
    }

    /// `d/dz_k`.
    pub fn partial(&self, k: usize) -> JetPoly {
        let mut out = JetPoly::zero();
        for (e, c) in &self.terms {
            let ek = *e.get(k - 1).unwrap_or(&0);
            if ek != 0 {
                let mut f = e.clone();
                f[k - 1] -= 1;
                out.add_term(f, c * qi(ek as i64));
            }
        }
        out
    }

    /// `sum_{j >= 1} z_{j+1} d/dz_j`.
    pub fn total_derivative(&self) -> JetPoly {
        let mut out = JetPoly::zero();
        for (e, c) in &self.terms {
            for j in 0..e.len() {
                if e[j] == 0 {
                    continue;
                }
                let mut f = e.clone();
                f[j] -= 1;
                if f.len() <= j + 1 {
                    f.resize(j + 2, 0);
                }
                f[j + 1] += 1;
                out.add_term(f, c * qi(e[j] as i64));
            }
        }
        out
    }

    /// Weighted degree `sum k e_k` of each monomial, if all agree.
    pub fn homogeneous_weight(&self) -> Option<i32> {
        let mut w = None;
        for e in self.terms.keys() {
            let d: i32 = e.iter().enumerate().map(|(i, x)| (i as i32 + 1) * x).sum();
            match w {
                None => w = Some(d),
                Some(v) if v != d => return None,
                _ => {}
            }
        }
        w
    }

    /// `sum_k k z_k dF/dz_k`.
    pub fn euler(&self) -> JetPoly {
        let mut out = JetPoly::zero();
        for (e, c) in &self.terms {
            let d: i32 = e.iter().enumerate().map(|(i, x)| (i as i32 + 1) * x).sum();
            out.add_term(e.clone(), c * qi(d as i64));
        }
        out
    }

    /// Highest `k` with a nonzero exponent.
    pub fn max_jet(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    /// Substitutes series for `z_1, z_2, ...`; `jets[0]` is `z_1` and must be
    /// invertible when negative powers occur.
    pub fn evaluate(&self, jets: &[Series]) -> Result<Series> {
        let ring = jets[0].ring();
        let z1_inv = if self.terms.keys().any(|e| e.first().is_some_and(|&x| x < 0)) { Some(jets[0].inv()?) } else { None };
        let mut cache: BTreeMap<(usize, i32), Series> = BTreeMap::new();
        let mut power = |k: usize, e: i32| -> Result<Series> {
            if let Some(s) = cache.get(&(k, e)) {
                return Ok(s.clone());
            }
            let s = if e >= 0 { jets[k].pow(e as u32)? } else { z1_inv.as_ref().unwrap().pow((-e) as u32)? };
            cache.insert((k, e), s.clone());
            Ok(s)
        };
        let mut out = ring.zero();
        for (e, c) in &self.terms {
            let mut term = ring.constant(c.clone());
            for (k, &x) in e.iter().enumerate() {
                if x != 0 {
                    term = term.checked_mul(&power(k, x)?)?;
                }
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (k, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => write!(f, "*z{}", k + 1)?,
                    _ => write!(f, "*z{}^{}", k + 1, x)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives() {
        // d(z1^{-1}) = -z2 z1^{-2}
        let p = JetPoly::monomial(&[-1], qi(1));
        assert_eq!(p.total_derivative(), JetPoly::monomial(&[-2, 1], qi(-1)));
        let q = JetPoly::monomial(&[1, 2], qi(3));
        assert_eq!(q.partial(2), JetPoly::monomial(&[1, 1], qi(6)));
        assert_eq!(q.homogeneous_weight(), Some(5));
        assert_eq!(q.euler(), q.scale(&qi(5)));
    }
}
