//! Psi-class intersection numbers by string, dilaton and the
//! coefficient-extracted Virasoro recursion, plus truncated partition
//! polynomials.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::series::{ring_new, Monomial, Rational, Ring, Series, Tag, TruncationPolicy, Var};
use crate::util::{binomial, inv_automorphism, multisets_with_sum, odf_q, qi};

/// Canonical key: genus and sorted psi-exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WkKey {
    pub g: u32,
    pub indices: Vec<u32>,
}

impl WkKey {
    pub fn new(g: u32, indices: &[u32]) -> Self {
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        WkKey { g, indices }
    }

    /// Whether the dimension rule allows a nonzero value.
    pub fn dimension_ok(&self) -> bool {
        let n = self.indices.len() as i64;
        let s: i64 = self.indices.iter().map(|&i| i as i64).sum();
        let stable = match self.g {
            0 => n >= 3,
            1 => n >= 1,
            _ => true,
        };
        stable && s == 3 * self.g as i64 - 3 + n
    }
}

/// Memo table. Lookups and insertions are atomic; recursion happens outside
/// the lock so concurrent callers never deadlock.
#[derive(Default)]
pub struct WkTable {
    memo: Mutex<HashMap<WkKey, Rational>>,
}

impl WkTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide shared table.
    pub fn global() -> &'static WkTable {
        static TABLE: OnceLock<WkTable> = OnceLock::new();
        TABLE.get_or_init(WkTable::new)
    }

    pub fn len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&self, key: WkKey, value: Rational) {
        self.memo.lock().unwrap().insert(key, value);
    }

    pub fn entries(&self) -> Vec<(WkKey, Rational)> {
        let mut v: Vec<_> = self.memo.lock().unwrap().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        v.sort();
        v
    }

    pub fn correlator(&self, g: u32, indices: &[u32]) -> Rational {
        let key = WkKey::new(g, indices);
        if !key.dimension_ok() {
            return Rational::zero();
        }
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.compute(&key);
        self.insert(key, v.clone());
        v
    }

    fn compute(&self, key: &WkKey) -> Rational {
        let g = key.g;
        let idx = &key.indices;
        let n = idx.len();
        if g == 0 && idx.as_slice() == [0, 0, 0] {
            return Rational::one();
        }
        if g == 1 && idx.as_slice() == [1] {
            // L_0 at t = 0: -(3/2)<tau_1>_1 + 1/16 = 0
            return crate::util::q(1, 24);
        }
        if idx[0] == 0 {
            let rest = &idx[1..];
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] == 0 || (j > 0 && rest[j] == rest[j - 1]) {
                    continue;
                }
                let mult = rest.iter().filter(|&&v| v == rest[j]).count() as i64;
                let mut d = rest.to_vec();
                d[j] -= 1;
                acc += qi(mult) * self.correlator(g, &d);
            }
            return acc;
        }
        if let Some(p) = idx.iter().position(|&i| i == 1) {
            let mut rest = idx.clone();
            rest.remove(p);
            let factor = 2 * g as i64 - 2 + rest.len() as i64;
            return qi(factor) * self.correlator(g, &rest);
        }
        // Highest index k+1 >= 2, remove it and apply L_k.
        let k = idx[n - 1] - 1;
        let rest = &idx[..n - 1];
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if j > 0 && rest[j] == rest[j - 1] {
                continue;
            }
            let mult = rest.iter().filter(|&&v| v == rest[j]).count() as i64;
            let dj = rest[j];
            let c = odf_q(dj + k + 1) / odf_q(dj);
            let mut d = rest.to_vec();
            d[j] += k;
            acc += qi(mult) * c * self.correlator(g, &d);
        }
        let mut quad = Rational::zero();
        for r in 0..k {
            let s = k - 1 - r;
            let c = odf_q(r + 1) * odf_q(s + 1);
            let mut inner = Rational::zero();
            if g > 0 {
                let mut d = rest.to_vec();
                d.push(r);
                d.push(s);
                inner += self.correlator(g - 1, &d);
            }
            for (left, right, w) in multiset_splits(rest) {
                for g1 in 0..=g {
                    let mut a = left.clone();
                    a.push(r);
                    let mut b = right.clone();
                    b.push(s);
                    let x = self.correlator(g1, &a);
                    if x.is_zero() {
                        continue;
                    }
                    inner += &w * x * self.correlator(g - g1, &b);
                }
            }
            quad += c * inner;
        }
        acc += quad / qi(2);
        acc / odf_q(k + 2)
    }

    /// Polynomial truncation of the free energy `F = sum hbar^{2g-2} F_g`.
    pub fn free_energy_poly(&self, ring: Ring, g_max: u32, n_max: u32) -> Series {
        let mut f = ring.zero();
        for g in 0..=g_max {
            for n in 0..=n_max {
                let total = 3 * g as i64 - 3 + n as i64;
                if total < 0 {
                    continue;
                }
                for idx in multisets_with_sum(n as usize, total as u32, 0) {
                    let v = self.correlator(g, &idx);
                    if v.is_zero() {
                        continue;
                    }
                    let mut m = Monomial::pow(Var::Hbar2, g as i32 - 1);
                    for &i in &idx {
                        let e = m.exponent(Var::Tsmall(i as u16));
                        m.set(Var::Tsmall(i as u16), e + 1);
                    }
                    f.add_term(m, v * inv_automorphism(&idx)).expect("free energy within floor");
                }
            }
        }
        f
    }
}

/// All ways to split a sorted multiset into an ordered pair of sub-multisets,
/// with the number of position-level splittings each one represents.
pub fn multiset_splits(items: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, Rational)> {
    let mut groups: Vec<(u32, u32)> = Vec::new();
    for &v in items {
        match groups.last_mut() {
            Some((w, c)) if *w == v => *c += 1,
            _ => groups.push((v, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new(), Rational::one())];
    for (v, m) in groups {
        let mut next = Vec::new();
        for (l, r, w) in &out {
            for c in 0..=m {
                let mut l2 = l.clone();
                l2.extend(std::iter::repeat_n(v, c as usize));
                let mut r2 = r.clone();
                r2.extend(std::iter::repeat_n(v, (m - c) as usize));
                next.push((l2, r2, w * Rational::from_integer(binomial(m, c))));
            }
        }
        out = next;
    }
    out
}

/// `<tau_{indices}>_g` from the shared table.
pub fn wk_correlator(g: u32, indices: &[u32]) -> Rational {
    WkTable::global().correlator(g, indices)
}

/// Ring of `t_i` and `hbar^2` used for WK polynomials.
pub fn wk_ring(g_max: u32, n_max: u32) -> Ring {
    // Z has hbar^2 exponents >= -n/3 at n factors; L_{-1} multiplies by t_0^2/hbar^2.
    let floor = -(((n_max + 1) / 3) as i32).max(1);
    let policy = TruncationPolicy::unbounded()
        .with_genus(Some(g_max))
        .with_t_count(Some(n_max))
        .with_floor(floor);
    ring_new(policy, &[Tag::Tsmall, Tag::Hbar2])
}

/// Truncation of `Z_WK = exp(F)` keeping `hbar` exponents of genus at most
/// `g_max` and at most `n_max` factors of `t`.
pub fn wk_partition_poly(g_max: u32, n_max: u32) -> Series {
    let ring = wk_ring(g_max, n_max);
    // Higher-genus terms can pair with genus-0 factors and land back in range.
    let g_src = g_max + n_max.saturating_sub(1) / 3;
    let wide = ring.with_policy(ring.policy.with_genus(Some(g_src)));
    let f = WkTable::global().free_energy_poly(wide, g_src, n_max);
    let z = f.exp().expect("count-bounded free energy is nilpotent");
    z.truncate_to(ring).expect("same variables")
}

/// Applies `L_k` (k >= -1) in the `t`, `eps^2` normalization with `eps^2`
/// stored as `Hbar2`.
pub fn virasoro_wk(k: i32, z: &Series) -> Series {
    let ring = z.ring();
    let t = |i: u32| Var::Tsmall(i as u16);
    let mut out = ring.zero();
    let max_idx = z
        .iter()
        .filter_map(|(m, _)| m.max_t_index())
        .max()
        .unwrap_or(0) as i32;
    if k == -1 {
        out = &out - &z.derive(t(0));
        for i in 0..=max_idx {
            let d = z.derive(t(i as u32));
            out = &out + &d.mul_monomial(&Monomial::var(t(i as u32 + 1)), &Rational::one()).unwrap();
        }
        let quad = Monomial::from_pairs(&[(t(0), 2), (Var::Hbar2, -1)]);
        out = &out + &z.mul_monomial(&quad, &crate::util::q(1, 2)).unwrap();
        return out;
    }
    let k = k as u32;
    let pow2 = |e: u32| Rational::from_integer(num_bigint::BigInt::one() << e);
    let lead = odf_q(k + 2) / pow2(k + 1);
    out = &out - &z.derive(t(k + 1)).scale(&lead);
    for i in 0..=(max_idx.max(0) as u32) {
        if i + k > max_idx as u32 {
            break;
        }
        let c = odf_q(i + k + 1) / (odf_q(i) * pow2(k + 1));
        let d = z.derive(t(i + k));
        out = &out + &d.mul_monomial(&Monomial::var(t(i)), &c).unwrap();
    }
    if k >= 1 {
        for i in 0..k {
            let j = k - 1 - i;
            let c = odf_q(i + 1) * odf_q(j + 1) / pow2(k + 2);
            let d = z.derive(t(i)).derive(t(j));
            out = &out + &d.mul_monomial(&Monomial::var(Var::Hbar2), &c).unwrap();
        }
    }
    if k == 0 {
        out = &out + &z.scale(&crate::util::q(1, 16));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::q;

    #[test]
    fn known_values() {
        assert_eq!(wk_correlator(0, &[0, 0, 0]), qi(1));
        assert_eq!(wk_correlator(1, &[1]), q(1, 24));
        assert_eq!(wk_correlator(1, &[0]), qi(0));
        assert_eq!(wk_correlator(0, &[0, 0, 0, 1]), qi(1));
        assert_eq!(wk_correlator(0, &[0, 0, 0, 1, 1]), qi(2));
        assert_eq!(wk_correlator(1, &[1, 1]), q(1, 24));
        assert_eq!(wk_correlator(2, &[4]), q(1, 1152));
        assert_eq!(wk_correlator(2, &[2, 3]), q(29, 5760));
        assert_eq!(wk_correlator(2, &[2, 2, 2]), q(7, 240));
        assert_eq!(wk_correlator(3, &[7]), q(1, 82944));
    }

    #[test]
    fn constraints_annihilate_partition_poly() {
        let z = wk_partition_poly(3, 6);
        for k in -1..=3 {
            let r = virasoro_wk(k, &z).filter(|m| m.t_count() <= 4 && m.exponent(Var::Hbar2) <= 1);
            assert!(r.is_zero(), "L_{k}: {r}");
        }
    }

    #[test]
    fn splits_count_positions() {
        let total: Rational = multiset_splits(&[0, 0, 1]).iter().map(|(_, _, w)| w.clone()).sum();
        assert_eq!(total, qi(8));
    }

    #[test]
    fn partition_poly_coefficients() {
        let z = wk_partition_poly(1, 3);
        let m = Monomial::from_pairs(&[(Var::Tsmall(0), 3), (Var::Hbar2, -1)]);
        assert_eq!(z.get(&m), q(1, 6));
        assert_eq!(z.get(&Monomial::var(Var::Tsmall(1))), q(1, 24));
    }
}
