//! Sparse truncated multivariate power series over exact rationals.
//!
//! A [`Series`] is a finite map from [`Monomial`] to nonzero [`Rational`],
//! stamped with the [`Ring`] (truncation policy plus active variable tags)
//! under which it is exact. Coefficients of monomials outside the policy are
//! unknown, never implicitly zero.
//!
//! Invariants:
//! - no stored zero coefficients
//! - every stored monomial is admitted by the policy
//! - the `Hbar2` exponent of every monomial is at least the ring floor
//! - arithmetic between series of different rings is rejected

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A formal variable. `X` stands for `x + 2`, `Todd(a)` for `T_{2a+1}`,
/// `Tsmall(i)` for `t_i`, `Nu` for `N^2`, `Hbar2` for `hbar^2` (or `eps^2`),
/// `Zinv` for `1/z` and `LambdaInv` for `1/lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Todd(u16),
    Tsmall(u16),
    Nu,
    Hbar2,
    Zinv,
    LambdaInv,
}

impl Var {
    pub fn tag(self) -> Tag {
        match self {
            Var::X => Tag::X,
            Var::Todd(_) => Tag::Todd,
            Var::Tsmall(_) => Tag::Tsmall,
            Var::Nu => Tag::Nu,
            Var::Hbar2 => Tag::Hbar2,
            Var::Zinv => Tag::Zinv,
            Var::LambdaInv => Tag::LambdaInv,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "X"),
            Var::Todd(a) => write!(f, "T{}", 2 * a + 1),
            Var::Tsmall(i) => write!(f, "t{i}"),
            Var::Nu => write!(f, "nu"),
            Var::Hbar2 => write!(f, "h2"),
            Var::Zinv => write!(f, "zinv"),
            Var::LambdaInv => write!(f, "linv"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    X,
    Todd,
    Tsmall,
    Nu,
    Hbar2,
    Zinv,
    LambdaInv,
}

/// Set of active variable tags of a ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct TagSet(u8);

impl TagSet {
    pub fn of(tags: &[Tag]) -> Self {
        TagSet(tags.iter().fold(0, |acc, t| acc | (1 << *t as u8)))
    }

    pub fn contains(self, t: Tag) -> bool {
        self.0 & (1 << t as u8) != 0
    }

    pub fn is_superset(self, other: TagSet) -> bool {
        self.0 & other.0 == other.0
    }
}

/// Exponent vector, sorted by variable with no zero entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(SmallVec<[(Var, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial::pow(v, 1)
    }

    pub fn pow(v: Var, e: i32) -> Self {
        let mut m = Monomial::one();
        m.set(v, e);
        m
    }

    /// Builds a monomial from arbitrary (variable, exponent) pairs.
    pub fn from_pairs(pairs: &[(Var, i32)]) -> Self {
        let mut m = Monomial::one();
        for &(v, e) in pairs {
            let cur = m.exponent(v);
            m.set(v, cur + e);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> i32 {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn set(&mut self, v: Var, e: i32) {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => {
                if e == 0 {
                    self.0.remove(i);
                } else {
                    self.0[i].1 = e;
                }
            }
            Err(i) => {
                if e != 0 {
                    self.0.insert(i, (v, e));
                }
            }
        }
    }

    pub fn with(&self, v: Var, e: i32) -> Self {
        let mut m = self.clone();
        m.set(v, e);
        m
    }

    pub fn without(&self, v: Var) -> Self {
        self.with(v, 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, i32)> + '_ {
        self.0.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[(Var, i32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Total exponent of the `T_{2a+1}` and `t_i` variables.
    pub fn t_count(&self) -> i32 {
        self.0
            .iter()
            .filter(|(v, _)| matches!(v, Var::Todd(_) | Var::Tsmall(_)))
            .map(|(_, e)| *e)
            .sum()
    }

    /// Twice the half-integer grading `deg T_{2a+1} = (2a+1)/2`.
    pub fn weight(&self) -> i32 {
        self.0
            .iter()
            .map(|(v, e)| match v {
                Var::Todd(a) => (2 * *a as i32 + 1) * e,
                _ => 0,
            })
            .sum()
    }

    /// `|a|`: sum of `a` over the `T_{2a+1}` factors.
    pub fn todd_index_sum(&self) -> i32 {
        self.0
            .iter()
            .map(|(v, e)| match v {
                Var::Todd(a) => *a as i32 * e,
                _ => 0,
            })
            .sum()
    }

    pub fn max_t_index(&self) -> Option<u16> {
        self.0
            .iter()
            .filter_map(|(v, _)| match v {
                Var::Todd(a) => Some(*a),
                Var::Tsmall(i) => Some(*i),
                _ => None,
            })
            .max()
    }

    /// Sorted multiset of `a` over the `T_{2a+1}` factors.
    pub fn todd_multiset(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (v, e) in self.iter() {
            if let Var::Todd(a) = v {
                out.extend(std::iter::repeat_n(a as u32, e.max(0) as usize));
            }
        }
        out
    }

    /// Sorted multiset of `i` over the `t_i` factors.
    pub fn tsmall_multiset(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (v, e) in self.iter() {
            if let Var::Tsmall(i) = v {
                out.extend(std::iter::repeat_n(i as u32, e.max(0) as usize));
            }
        }
        out
    }

    pub fn tags(&self) -> TagSet {
        let tags: Vec<Tag> = self.0.iter().map(|(v, _)| v.tag()).collect();
        TagSet::of(&tags)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Truncation bounds. `None` leaves a grading unbounded; every computation
/// that needs an unbounded grading keeps it finite by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct TruncationPolicy {
    /// Keeps monomials with `hbar2 exponent + 1 <= genus_max`.
    pub genus_max: Option<u32>,
    /// Maximal number of `T`/`t` factors.
    pub t_count_max: Option<u32>,
    /// Maximal `a` in `T_{2a+1}` and `i` in `t_i`.
    pub t_index_max: Option<u32>,
    pub x_degree_max: Option<u32>,
    /// Maximal twice-grading `sum (2a+1)` over `T_{2a+1}` factors.
    pub weight_max: Option<u32>,
    /// Maximal exponent of `Zinv` and of `LambdaInv`.
    pub aux_order: Option<u32>,
    /// Smallest admissible `Hbar2` exponent. Going below it is an error.
    pub hbar2_floor: i32,
}

impl TruncationPolicy {
    pub fn new(genus_max: u32, t_count_max: u32, t_index_max: u32, x_degree_max: u32, aux_order: u32) -> Self {
        TruncationPolicy {
            genus_max: Some(genus_max),
            t_count_max: Some(t_count_max),
            t_index_max: Some(t_index_max),
            x_degree_max: Some(x_degree_max),
            weight_max: None,
            aux_order: Some(aux_order),
            hbar2_floor: -1,
        }
    }

    /// No bounds at all; only safe for polynomial computations.
    pub fn unbounded() -> Self {
        TruncationPolicy {
            genus_max: None,
            t_count_max: None,
            t_index_max: None,
            x_degree_max: None,
            weight_max: None,
            aux_order: None,
            hbar2_floor: -1,
        }
    }

    pub fn with_genus(mut self, g: Option<u32>) -> Self {
        self.genus_max = g;
        self
    }
    pub fn with_t_count(mut self, c: Option<u32>) -> Self {
        self.t_count_max = c;
        self
    }
    pub fn with_t_index(mut self, a: Option<u32>) -> Self {
        self.t_index_max = a;
        self
    }
    pub fn with_x_degree(mut self, d: Option<u32>) -> Self {
        self.x_degree_max = d;
        self
    }
    pub fn with_weight(mut self, w: Option<u32>) -> Self {
        self.weight_max = w;
        self
    }
    pub fn with_aux(mut self, o: Option<u32>) -> Self {
        self.aux_order = o;
        self
    }
    pub fn with_floor(mut self, floor: i32) -> Self {
        self.hbar2_floor = floor;
        self
    }

    /// Whether the coefficient of `m` is tracked under this policy.
    pub fn admits(&self, m: &Monomial) -> bool {
        let mut count = 0i64;
        let mut weight = 0i64;
        for (v, e) in m.iter() {
            match v {
                Var::X => {
                    if let Some(d) = self.x_degree_max {
                        if e as i64 > d as i64 {
                            return false;
                        }
                    }
                }
                Var::Todd(a) => {
                    if let Some(mx) = self.t_index_max {
                        if a as u32 > mx {
                            return false;
                        }
                    }
                    count += e as i64;
                    weight += (2 * a as i64 + 1) * e as i64;
                }
                Var::Tsmall(i) => {
                    if let Some(mx) = self.t_index_max {
                        if i as u32 > mx {
                            return false;
                        }
                    }
                    count += e as i64;
                }
                Var::Hbar2 => {
                    if let Some(g) = self.genus_max {
                        if e as i64 + 1 > g as i64 {
                            return false;
                        }
                    }
                }
                Var::Zinv | Var::LambdaInv => {
                    if let Some(o) = self.aux_order {
                        if e as i64 > o as i64 {
                            return false;
                        }
                    }
                }
                Var::Nu => {}
            }
        }
        if let Some(c) = self.t_count_max {
            if count > c as i64 {
                return false;
            }
        }
        if let Some(w) = self.weight_max {
            if weight > w as i64 {
                return false;
            }
        }
        true
    }

    /// Whether substituting into `v` is bounded by this policy, so that an
    /// assignment with a constant term would make the substitution inexact.
    fn bounds_var(&self, v: Var) -> bool {
        match v {
            Var::X => self.x_degree_max.is_some(),
            Var::Todd(_) => self.t_count_max.is_some() || self.weight_max.is_some(),
            Var::Tsmall(_) => self.t_count_max.is_some(),
            Var::Hbar2 => self.genus_max.is_some(),
            Var::Zinv | Var::LambdaInv => self.aux_order.is_some(),
            Var::Nu => false,
        }
    }
}

/// A truncation policy together with the set of active variable tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub policy: TruncationPolicy,
    pub tags: TagSet,
}

/// Builds a ring context.
pub fn ring_new(policy: TruncationPolicy, active: &[Tag]) -> Ring {
    Ring { policy, tags: TagSet::of(active) }
}

impl Ring {
    pub fn zero(&self) -> Series {
        Series { ring: *self, terms: BTreeMap::new() }
    }

    pub fn one(&self) -> Series {
        self.constant(Rational::one())
    }

    pub fn constant(&self, c: Rational) -> Series {
        let mut s = self.zero();
        if !c.is_zero() {
            s.terms.insert(Monomial::one(), c);
        }
        s
    }

    /// The series `v`. Panics if `v` is not active in this ring.
    pub fn var(&self, v: Var) -> Series {
        self.monomial(Monomial::var(v), Rational::one())
    }

    /// `c * m`, dropped if `m` is outside the policy.
    pub fn monomial(&self, m: Monomial, c: Rational) -> Series {
        assert!(
            self.tags.is_superset(m.tags()),
            "monomial {m} uses variables not active in this ring"
        );
        let mut s = self.zero();
        if !c.is_zero() && self.policy.admits(&m) {
            s.terms.insert(m, c);
        }
        s
    }

    pub fn with_policy(&self, policy: TruncationPolicy) -> Ring {
        Ring { policy, tags: self.tags }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl Series {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.ring.policy
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    /// Coefficient of `m`; errors if `m` is outside the policy.
    pub fn coeff(&self, m: &Monomial) -> Result<Rational> {
        if !self.ring.tags.is_superset(m.tags()) {
            return Err(Error::InactiveVariable(m.to_string()));
        }
        if !self.ring.policy.admits(m) || m.exponent(Var::Hbar2) < self.ring.policy.hbar2_floor {
            return Err(Error::OutOfPolicy(m.to_string()));
        }
        Ok(self.get(m))
    }

    /// Stored coefficient of `m`, zero if absent. No policy check.
    pub fn get(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.get(&Monomial::one())
    }

    /// Adds `c * m` in place, respecting truncation.
    pub fn add_term(&mut self, m: Monomial, c: Rational) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        if !self.ring.policy.admits(&m) {
            return Ok(());
        }
        let e = m.exponent(Var::Hbar2);
        if e < self.ring.policy.hbar2_floor {
            return Err(Error::HbarFloor { exponent: e, floor: self.ring.policy.hbar2_floor });
        }
        debug_assert!(self.ring.tags.is_superset(m.tags()), "inactive variable in {m}");
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    fn check_same(&self, other: &Series) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::PolicyMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Series) -> Result<Series> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Series) -> Result<Series> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Series) -> Result<Series> {
        self.check_same(other)?;
        if self.terms.len() * other.terms.len() < 64 {
            let mut out = self.ring.zero();
            for (ma, ca) in &self.terms {
                for (mb, cb) in &other.terms {
                    out.add_term(ma.mul(mb), ca * cb)?;
                }
            }
            return Ok(out);
        }
        // Integer numerators over a common denominator, pairs visited in
        // increasing T-count so that the count bound cuts whole runs.
        let (na, da) = self.numerators();
        let (mut nb, db) = other.numerators();
        nb.sort_by_key(|(m, _)| m.t_count());
        let cmax = self.ring.policy.t_count_max.map(|c| c as i32);
        let policy = self.ring.policy;
        let mut acc: std::collections::HashMap<Monomial, BigInt> = std::collections::HashMap::new();
        for (ma, ca) in &na {
            let ka = ma.t_count();
            for (mb, cb) in &nb {
                if cmax.is_some_and(|c| ka + mb.t_count() > c) {
                    break;
                }
                let m = ma.mul(mb);
                if !policy.admits(&m) {
                    continue;
                }
                *acc.entry(m).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let den = da * db;
        let mut out = self.ring.zero();
        for (m, c) in acc {
            if !c.is_zero() {
                out.add_term(m, BigRational::new(c, den.clone()))?;
            }
        }
        Ok(out)
    }

    /// Terms as integers over the least common denominator.
    fn numerators(&self) -> (Vec<(Monomial, BigInt)>, BigInt) {
        use num_integer::Integer;
        let den = self.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let v = self.terms.iter().map(|(m, c)| (m.clone(), c.numer() * (&den / c.denom()))).collect();
        (v, den)
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Series { ring: self.ring, terms }
    }

    /// Multiplies by the monomial `m` with coefficient `c`.
    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Result<Series> {
        let mut out = self.ring.zero();
        for (k, v) in &self.terms {
            out.add_term(k.mul(m), v * c)?;
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Series> {
        let mut acc = self.ring.one();
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// `exp(a)` for `a` with zero constant term whose powers eventually
    /// truncate to zero.
    pub fn exp(&self) -> Result<Series> {
        if !self.constant_term().is_zero() {
            return Err(Error::Precondition("exp needs a zero constant term".into()));
        }
        let mut out = self.ring.one();
        let mut power = self.ring.one();
        for k in 1..=MAX_NILPOTENT_STEPS {
            power = power.checked_mul(self)?.scale(&crate::util::q(1, k as i64));
            if power.is_zero() {
                return Ok(out);
            }
            out = out.checked_add(&power)?;
        }
        Err(Error::NonConvergence("exp: argument is not nilpotent under the policy".into()))
    }

    /// `log(a)` for `a` with constant term exactly 1.
    pub fn log(&self) -> Result<Series> {
        if self.constant_term() != Rational::one() {
            return Err(Error::Precondition("log needs constant term 1".into()));
        }
        let b = self.checked_sub(&self.ring.one())?;
        let mut out = self.ring.zero();
        let mut power = self.ring.one();
        for k in 1..=MAX_NILPOTENT_STEPS {
            power = power.checked_mul(&b)?;
            if power.is_zero() {
                return Ok(out);
            }
            let c = crate::util::q(if k % 2 == 1 { 1 } else { -1 }, k as i64);
            out = out.checked_add(&power.scale(&c))?;
        }
        Err(Error::NonConvergence("log: argument minus 1 is not nilpotent".into()))
    }

    /// Multiplicative inverse for series with a nonzero constant term.
    pub fn inv(&self) -> Result<Series> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::Precondition("inverse needs a nonzero constant term".into()));
        }
        let ci = c.recip();
        // a = c (1 + b)
        let b = self.scale(&ci).checked_sub(&self.ring.one())?;
        let mut out = self.ring.one();
        let mut power = self.ring.one();
        for _ in 1..=MAX_NILPOTENT_STEPS {
            power = -&power.checked_mul(&b)?;
            if power.is_zero() {
                return Ok(out.scale(&ci));
            }
            out = out.checked_add(&power)?;
        }
        Err(Error::NonConvergence("inverse: series is not invertible under the policy".into()))
    }

    /// Partial derivative with respect to `v`.
    pub fn derive(&self, v: Var) -> Series {
        let mut out = self.ring.zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e != 0 {
                // Lowering an exponent never leaves the policy, except for
                // the hbar floor, which only a derivative in Hbar2 can breach.
                out.add_term(m.with(v, e - 1), c * crate::util::qi(e as i64))
                    .expect("derivative breached the hbar floor");
            }
        }
        out
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Series {
        let terms = self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect();
        Series { ring: self.ring, terms }
    }

    /// Re-stamps under `target`, dropping terms it does not admit.
    pub fn truncate_to(&self, target: Ring) -> Result<Series> {
        let mut out = target.zero();
        for (m, c) in &self.terms {
            if !target.tags.is_superset(m.tags()) {
                return Err(Error::InactiveVariable(m.to_string()));
            }
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// Applies `f` to every monomial and re-collects in `target`.
    pub fn map_monomials(&self, target: Ring, f: impl Fn(&Monomial) -> Option<Monomial>) -> Result<Series> {
        let mut out = target.zero();
        for (m, c) in &self.terms {
            if let Some(n) = f(m) {
                out.add_term(n, c.clone())?;
            }
        }
        Ok(out)
    }

    /// Coefficient of `hbar^{2e}` as a series with `Hbar2` removed.
    pub fn hbar2_sector(&self, e: i32) -> Series {
        let mut out = self.ring.zero();
        for (m, c) in &self.terms {
            if m.exponent(Var::Hbar2) == e {
                out.terms.insert(m.without(Var::Hbar2), c.clone());
            }
        }
        out
    }

    /// Substitutes each listed variable by a series of the `target` ring;
    /// all other variables are carried over unchanged.
    pub fn substitute(&self, target: Ring, assignments: &[(Var, Series)]) -> Result<Series> {
        for (v, s) in assignments {
            if s.ring != target {
                return Err(Error::PolicyMismatch);
            }
            if !s.constant_term().is_zero() && self.ring.policy.bounds_var(*v) {
                return Err(Error::InexactSubstitution(v.to_string()));
            }
        }
        let mut cache: Vec<Vec<Series>> = assignments.iter().map(|_| vec![target.one()]).collect();
        let mut out = target.zero();
        for (m, c) in &self.terms {
            let mut rest = Monomial::one();
            let mut factor = target.constant(c.clone());
            for (v, e) in m.iter() {
                if let Some(k) = assignments.iter().position(|(w, _)| *w == v) {
                    if e < 0 {
                        return Err(Error::Precondition(format!("negative power of substituted {v}")));
                    }
                    while cache[k].len() <= e as usize {
                        let next = cache[k].last().unwrap().checked_mul(&assignments[k].1)?;
                        cache[k].push(next);
                    }
                    factor = factor.checked_mul(&cache[k][e as usize])?;
                } else {
                    rest.set(v, e);
                }
            }
            if !target.tags.is_superset(rest.tags()) {
                return Err(Error::InactiveVariable(rest.to_string()));
            }
            for (fm, fc) in factor.terms {
                out.add_term(fm.mul(&rest), fc)?;
            }
        }
        Ok(out)
    }

    /// Largest `Hbar2` exponent present, if any.
    pub fn max_hbar2(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(Var::Hbar2)).max()
    }
}

const MAX_NILPOTENT_STEPS: usize = 4096;

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.checked_add(rhs).expect("series addition")
    }
}

impl std::ops::Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.checked_sub(rhs).expect("series subtraction")
    }
}

impl std::ops::Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.checked_mul(rhs).expect("series multiplication")
    }
}

impl std::ops::Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(&-Rational::one())
    }
}

/// Integer rational helper for call sites that build coefficients from `BigInt`.
pub fn rat(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{q, qi};

    fn ring(x: u32) -> Ring {
        ring_new(TruncationPolicy::new(3, 3, 2, x, 0), &[Tag::X, Tag::Todd, Tag::Hbar2])
    }

    #[test]
    fn constructors() {
        let r = ring(4);
        assert_eq!(r.one().get(&Monomial::one()), qi(1));
        assert_eq!(r.var(Var::X).get(&Monomial::var(Var::X)), qi(1));
        assert_eq!(r.constant(q(3, 4)).constant_term(), q(3, 4));
    }

    #[test]
    fn truncated_products() {
        let r = ring(2);
        let x = r.var(Var::X);
        let p = &(&r.one() + &x) * &(&r.one() - &x);
        assert_eq!(p, &r.one() - &(&x * &x));
        let r1 = ring(1);
        let x1 = r1.var(Var::X);
        assert!((&x1 * &x1).is_zero());
    }

    #[test]
    fn hbar_floor_guard() {
        let r = ring(2);
        let hinv = r.monomial(Monomial::pow(Var::Hbar2, -1), qi(1));
        assert!(matches!(hinv.checked_mul(&hinv), Err(Error::HbarFloor { .. })));
    }

    #[test]
    fn mixed_policies_rejected() {
        assert_eq!(ring(2).one().checked_add(&ring(3).one()), Err(Error::PolicyMismatch));
    }

    #[test]
    fn mercator_series() {
        let r = ring(3);
        let a = &r.one() - &r.var(Var::X).scale(&q(1, 2));
        let l = a.log().unwrap();
        let x = |e| Monomial::pow(Var::X, e);
        assert_eq!(l.get(&x(1)), q(-1, 2));
        assert_eq!(l.get(&x(2)), q(-1, 8));
        assert_eq!(l.get(&x(3)), q(-1, 24));
    }

    #[test]
    fn exp_log_round_trip() {
        let r = ring(3);
        let xt = &r.var(Var::X) * &r.var(Var::Todd(0));
        assert_eq!(xt.exp().unwrap().log().unwrap(), xt);
        assert_eq!(r.zero().exp().unwrap(), r.one());
    }

    #[test]
    fn substitution() {
        let r = ring(4);
        let nu_ring = ring_new(TruncationPolicy::unbounded(), &[Tag::Nu]);
        let nu = nu_ring.var(Var::Nu);
        // nu -> -(X-2)^2 / (2 hbar^2)
        let xm2 = &r.var(Var::X) - &r.constant(qi(2));
        let img = (&xm2 * &xm2).mul_monomial(&Monomial::pow(Var::Hbar2, -1), &q(-1, 2)).unwrap();
        let s = nu.substitute(r, &[(Var::Nu, img.clone())]).unwrap();
        assert_eq!(s.get(&Monomial::pow(Var::Hbar2, -1)), qi(-2));
        assert_eq!(s.get(&Monomial::from_pairs(&[(Var::X, 1), (Var::Hbar2, -1)])), qi(2));
        // nu^2 alone would need hbar^-4
        let nu2 = &nu * &nu;
        assert!(matches!(nu2.substitute(r, &[(Var::Nu, img)]), Err(Error::HbarFloor { .. })));
    }

    #[test]
    fn derivative_and_coeff() {
        let r = ring(4);
        let x = r.var(Var::X);
        let t1 = r.var(Var::Todd(0));
        let s = &(&x * &x) * &t1;
        assert_eq!(s.derive(Var::X), (&x * &t1).scale(&qi(2)));
        let half = &r.one() - &x.scale(&q(1, 2));
        assert_eq!(half.coeff(&Monomial::var(Var::X)).unwrap(), q(-1, 2));
        assert!(matches!(half.coeff(&Monomial::pow(Var::X, 9)), Err(Error::OutOfPolicy(_))));
    }
}
