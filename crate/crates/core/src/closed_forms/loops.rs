//! Genus-by-genus solution of the loop equations in jet variables.
//!
//! Both loop equations are polynomial in `S^{-1}` where `S = sqrt(lambda - z_0)`
//! for the topological case and `S = sqrt(1 - 4 e^{u_0} / lambda)` for the
//! generalized BGW case. Coefficients of distinct powers of `S` must vanish
//! separately, which gives a linear system for each genus.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linsolve;
use crate::series::Rational;
use crate::util::{binomial, q, qi};

use super::jets::JetPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopKind {
    /// Jets `z_k = d^k v`, `v = d^2 F_0 / dt_0^2`.
    Wk,
    /// Jets `u_k = d^k u` in the spatial variable.
    Gbgw,
}

/// `F_g = poly + log_coeff * log(z_1) + z0_coeff * z_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSolution {
    pub g: u32,
    pub poly: JetPoly,
    pub log_coeff: Rational,
    pub z0_coeff: Rational,
}

impl LoopSolution {
    /// `dF/dz_k` for `k = 0..=max_jet`.
    pub fn gradient(&self) -> Vec<JetPoly> {
        let n = self.poly.max_jet().max(1);
        let mut grad = vec![JetPoly::constant(self.z0_coeff.clone())];
        for k in 1..=n {
            grad.push(self.poly.partial(k));
        }
        grad[1] = grad[1].add(&JetPoly::monomial(&[-1], self.log_coeff.clone()));
        grad
    }
}

/// Polynomial in `S^{-1}`; key `n` holds the coefficient of `S^{-n}`.
type LoopPoly = BTreeMap<u32, JetPoly>;

fn lp_add_into(acc: &mut LoopPoly, p: &LoopPoly) {
    for (n, c) in p {
        let e = acc.entry(*n).or_default();
        *e = e.add(c);
        if e.is_zero() {
            acc.remove(n);
        }
    }
}

fn lp_mul(a: &LoopPoly, b: &LoopPoly) -> LoopPoly {
    let mut out = LoopPoly::new();
    for (n, c) in a {
        for (m, d) in b {
            lp_add_into(&mut out, &LoopPoly::from([(n + m, c.mul(d))]));
        }
    }
    out
}

fn lp_times(a: &LoopPoly, c: &JetPoly) -> LoopPoly {
    a.iter().map(|(n, v)| (*n, v.mul(c))).filter(|(_, v)| !v.is_zero()).collect()
}

fn s_pow(n: u32, c: Rational) -> LoopPoly {
    LoopPoly::from([(n, JetPoly::constant(c))])
}

struct Calculus {
    kind: LoopKind,
    cache: BTreeMap<(u32, usize), LoopPoly>,
}

impl Calculus {
    fn new(kind: LoopKind) -> Self {
        Calculus { kind, cache: BTreeMap::new() }
    }

    fn d(&self, p: &LoopPoly) -> LoopPoly {
        let z1 = JetPoly::var(1);
        let mut out = LoopPoly::new();
        for (&n, c) in p {
            lp_add_into(&mut out, &LoopPoly::from([(n, c.total_derivative())]));
            if n == 0 {
                continue;
            }
            let half_n = q(n as i64, 2);
            let shifted = c.mul(&z1).scale(&half_n);
            lp_add_into(&mut out, &LoopPoly::from([(n + 2, shifted.clone())]));
            if self.kind == LoopKind::Gbgw {
                lp_add_into(&mut out, &LoopPoly::from([(n, shifted.scale(&qi(-1)))]));
            }
        }
        out
    }

    /// `d^j (S^{-m})`.
    fn ds(&mut self, m: u32, j: usize) -> LoopPoly {
        if let Some(p) = self.cache.get(&(m, j)) {
            return p.clone();
        }
        let p = if j == 0 {
            s_pow(m, Rational::one())
        } else {
            let prev = self.ds(m, j - 1);
            self.d(&prev)
        };
        self.cache.insert((m, j), p.clone());
        p
    }

    /// Coefficient operator of `dF/dz_k` in the linear part.
    fn a_k(&mut self, k: usize) -> LoopPoly {
        let mut out = self.ds(2, k);
        for j in 1..=k {
            let t = lp_mul(&self.ds(1, j - 1), &self.ds(1, k + 1 - j));
            let c = Rational::from(binomial(k as u32, j as u32));
            lp_add_into(&mut out, &t.iter().map(|(n, v)| (*n, v.scale(&c))).collect());
        }
        out
    }

    fn linear(&mut self, grad: &[JetPoly]) -> LoopPoly {
        let sign = if self.kind == LoopKind::Wk { qi(-1) } else { qi(1) };
        let mut out = LoopPoly::new();
        for (k, g) in grad.iter().enumerate() {
            if !g.is_zero() {
                lp_add_into(&mut out, &lp_times(&self.a_k(k), &g.scale(&sign)));
            }
        }
        out
    }

    /// Everything in the genus-`g` equation not involving `F_g`.
    fn inhomogeneous(&mut self, g: u32, lower: &[LoopSolution]) -> LoopPoly {
        let (quad, third, source) = match self.kind {
            LoopKind::Wk => (q(1, 2), s_pow(4, q(1, 16)), s_pow(4, q(1, 16))),
            LoopKind::Gbgw => {
                let mut third = s_pow(4, q(1, 4));
                lp_add_into(&mut third, &s_pow(2, q(-1, 2)));
                let mut source = s_pow(2, q(1, 8));
                lp_add_into(&mut source, &s_pow(4, q(-1, 16)));
                (qi(2), third, source)
            }
        };
        let mut out = if g == 1 { source } else { LoopPoly::new() };
        if g == 1 {
            return out;
        }
        let grads: Vec<Vec<JetPoly>> = lower.iter().map(|s| s.gradient()).collect();
        let prev = &grads[(g - 2) as usize];
        let n = grads.iter().map(|v| v.len()).max().unwrap_or(0);
        let at = |v: &Vec<JetPoly>, k: usize| v.get(k).cloned().unwrap_or_default();
        for k in 0..n {
            for l in 0..n {
                let mut c = if k == 0 { JetPoly::zero() } else { at(prev, l).partial(k) };
                for g1 in 1..g {
                    let g2 = g - g1;
                    c = c.add(&at(&grads[(g1 - 1) as usize], k).mul(&at(&grads[(g2 - 1) as usize], l)));
                }
                if c.is_zero() {
                    continue;
                }
                let ops = lp_mul(&self.ds(1, k + 1), &self.ds(1, l + 1));
                lp_add_into(&mut out, &lp_times(&ops, &c.scale(&quad)));
            }
        }
        for (k, gk) in prev.iter().enumerate() {
            if gk.is_zero() {
                continue;
            }
            let mut op = LoopPoly::new();
            for (&m, c) in &third {
                let d = self.ds(m, k + 2);
                lp_add_into(&mut op, &lp_times(&d, c));
            }
            lp_add_into(&mut out, &lp_times(&op, gk));
        }
        out
    }
}

/// Gradients of the ansatz elements for genus `g`, with a label per element.
fn ansatz(kind: LoopKind, g: u32) -> Vec<(Vec<JetPoly>, LoopSolution)> {
    let empty = |g| LoopSolution { g, poly: JetPoly::zero(), log_coeff: Rational::zero(), z0_coeff: Rational::zero() };
    // log z_1 and z_0 are offered at every genus; above genus one the
    // solver has to return zero for them.
    let mut out = Vec::new();
    let mut s = empty(g);
    s.log_coeff = Rational::one();
    out.push((s.gradient(), s));
    if kind == LoopKind::Gbgw {
        let mut s = empty(g);
        s.z0_coeff = Rational::one();
        out.push((s.gradient(), s));
    }
    if g == 1 {
        return out;
    }
    let top = (3 * g - 2) as usize;
    let budget = (3 * g - 3) as i32;
    let mut e = vec![0i32; top];
    fn rec(k: usize, top: usize, left: i32, e: &mut Vec<i32>, acc: &mut Vec<Vec<i32>>) {
        if k > top {
            acc.push(e.clone());
            return;
        }
        let mut x = 0;
        while x * (k as i32 - 1) <= left {
            e[k - 1] = x;
            rec(k + 1, top, left - x * (k as i32 - 1), e, acc);
            x += 1;
        }
        e[k - 1] = 0;
    }
    let mut exps = Vec::new();
    rec(2, top, budget, &mut e, &mut exps);
    for mut v in exps {
        let w: i32 = v.iter().enumerate().skip(1).map(|(i, x)| (i as i32 + 1) * x).sum();
        v[0] = 2 * g as i32 - 2 - w;
        let mut s = empty(g);
        s.poly = JetPoly::monomial(&v, Rational::one());
        let mut grad = vec![JetPoly::zero()];
        grad.extend((1..=top).map(|k| s.poly.partial(k)));
        out.push((grad, s));
    }
    out
}

/// Solves the loop equation for genera `1..=g_max`.
pub fn loop_solve_all(kind: LoopKind, g_max: u32) -> Result<Vec<LoopSolution>> {
    let mut calc = Calculus::new(kind);
    let mut sols: Vec<LoopSolution> = Vec::new();
    for g in 1..=g_max {
        let basis = ansatz(kind, g);
        let images: Vec<LoopPoly> = basis.iter().map(|(grad, _)| calc.linear(grad)).collect();
        let rhs = calc.inhomogeneous(g, &sols);
        let mut keys: BTreeMap<(u32, Vec<i32>), usize> = BTreeMap::new();
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let mut row_of = |n: u32, e: &Vec<i32>, rows: &mut Vec<(Vec<Rational>, Rational)>| -> usize {
            *keys.entry((n, e.clone())).or_insert_with(|| {
                rows.push((vec![Rational::zero(); basis.len()], Rational::zero()));
                rows.len() - 1
            })
        };
        for (i, img) in images.iter().enumerate() {
            for (n, c) in img {
                for (e, v) in c.iter() {
                    let r = row_of(*n, e, &mut rows);
                    rows[r].0[i] += v;
                }
            }
        }
        for (n, c) in &rhs {
            for (e, v) in c.iter() {
                let r = row_of(*n, e, &mut rows);
                rows[r].1 += v;
            }
        }
        let coeffs = linsolve::solve(&rows, basis.len())
            .map_err(|e| Error::Inconsistent(format!("loop equation at genus {g}: {e}")))?;
        let mut sol = LoopSolution { g, poly: JetPoly::zero(), log_coeff: Rational::zero(), z0_coeff: Rational::zero() };
        for (c, (_, s)) in coeffs.iter().zip(&basis) {
            sol.poly = sol.poly.add(&s.poly.scale(c));
            sol.log_coeff += &s.log_coeff * c;
            sol.z0_coeff += &s.z0_coeff * c;
        }
        if g > 1 && !(sol.log_coeff.is_zero() && sol.z0_coeff.is_zero()) {
            return Err(Error::Inconsistent(format!("genus {g} keeps a log z_1 or z_0 term")));
        }
        sols.push(sol);
    }
    Ok(sols)
}

/// Genus-`g` topological free energy in jet variables.
pub fn loop_solve_wk(g: u32) -> Result<LoopSolution> {
    Ok(loop_solve_all(LoopKind::Wk, g)?.pop().expect("g >= 1"))
}

/// Genus-`g` generalized BGW free energy in jet variables.
pub fn loop_solve_gbgw(g: u32) -> Result<LoopSolution> {
    Ok(loop_solve_all(LoopKind::Gbgw, g)?.pop().expect("g >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_one() {
        let wk = loop_solve_wk(1).unwrap();
        assert_eq!((wk.log_coeff.clone(), wk.z0_coeff.clone()), (q(1, 24), qi(0)));
        let b = loop_solve_gbgw(1).unwrap();
        assert_eq!((b.log_coeff.clone(), b.z0_coeff.clone()), (q(1, 24), q(-1, 16)));
    }

    #[test]
    fn wk_genus_two() {
        let f = loop_solve_wk(2).unwrap();
        let mut expect = JetPoly::monomial(&[-2, 0, 0, 1], q(1, 1152));
        expect = expect.add(&JetPoly::monomial(&[-3, 1, 1], q(-7, 1920)));
        expect = expect.add(&JetPoly::monomial(&[-4, 3], q(1, 360)));
        assert_eq!(f.poly, expect, "{}", f.poly);
    }
}
