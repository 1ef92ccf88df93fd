//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::Instant;

use hodge_bgw::closed_forms::{bernoulli_sector, f1_formulas, kw_bernoulli_check, verify_genus0, verify_loop_genus2};
use hodge_bgw::correspondence::{bgw_side_free_energy, elsv_constant, hodge_side_free_energy, main_ring, verify_elsv, verify_main};
use hodge_bgw::gbgw::{genus_part, virasoro_check, x_power};
use hodge_bgw::hodge::phi_ratio_check;
use hodge_bgw::kdv::{verify_kdv_flow, verify_tau_initial, KdvSide};
use hodge_bgw::report::VerificationReport;
use hodge_bgw::util::q;
use hodge_bgw::{Result, Series, TruncationPolicy, Var};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reps: Vec<VerificationReport>) -> Outcome {
    let pass = reps.iter().all(|r| r.passed() && r.checked > 0);
    let mut parts: Vec<String> = reps.iter().map(|r| format!("{} {}", r.name, r.checked)).collect();
    for r in &reps {
        parts.extend(r.notes.iter().cloned());
        if let Some(m) = r.failures.first() {
            parts.push(format!("first mismatch {}: {} vs {}", m.monomial, m.lhs, m.rhs));
        }
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main_identity() -> Result<Outcome> {
    let a = verify_main(&TruncationPolicy::new(2, 3, 2, 5, 0))?;
    let mut b = verify_main(&TruncationPolicy::new(3, 2, 1, 3, 0))?;
    b.name = "main (extended)".into();
    Ok(from_reports(vec![a, b]))
}

/// `T = 0` sectors of both free energies against the Bernoulli constants.
fn bernoulli_constants() -> Result<Outcome> {
    let mut rep = VerificationReport::new("bernoulli", None);
    for (policy, genera) in [(TruncationPolicy::new(2, 3, 2, 5, 0), 0..=2u32), (TruncationPolicy::new(3, 2, 1, 3, 0), 3..=3)] {
        let ring = main_ring(&policy)?;
        let log = (&ring.one() - &ring.var(Var::X).scale(&q(1, 2))).log()?;
        let x2 = x_power(ring, 2)?;
        let sides = [hodge_side_free_energy(&policy)?, bgw_side_free_energy(&policy)?];
        for g in genera {
            let want: Series = match g {
                0 => &(&x2 * &log).scale(&q(1, 4)) - &x2.scale(&q(3, 8)),
                1 => log.scale(&q(1, 12)),
                _ => bernoulli_sector(ring, g)?,
            };
            for f in &sides {
                rep.compare_series(&genus_part(f, g).filter(|m| m.t_count() == 0), &want, |_| true);
            }
        }
    }
    Ok(from_reports(vec![rep]))
}

fn virasoro() -> Result<Outcome> {
    let rep = virasoro_check(3, 9);
    let mut out = from_reports(vec![rep]);
    match common::virasoro_brackets() {
        Ok(()) => out.detail.push_str(&format!("; brackets (0,1) (1,2) (0,2) on {} random series", common::CASES)),
        Err(e) => {
            out.pass = false;
            out.detail.push_str(&format!("; brackets: {e}"));
        }
    }
    Ok(out)
}

fn kdv() -> Result<Outcome> {
    let mut reps = Vec::new();
    for side in [KdvSide::Wk, KdvSide::Gbgw] {
        for a in 0..=1 {
            let mut r = verify_kdv_flow(a, side, 3, 3)?;
            r.name = format!("{side:?} a={a}");
            reps.push(r);
        }
    }
    reps.push(verify_tau_initial(6, 3, 4)?);
    Ok(from_reports(reps))
}

fn properties() -> Result<Outcome> {
    let mut failures = Vec::new();
    let names = ["ring axioms", "truncation coherence", "wk dimension/string/dilaton", "cut-and-join homogeneity", "jet homogeneity"];
    for (name, suite) in common::all_suites().into_iter().filter(|(n, _)| names.contains(n)) {
        if let Err(e) = suite() {
            failures.push(format!("{name}: {e}"));
        }
    }
    let pass = failures.is_empty();
    let detail = if pass { format!("{} suites x {} cases", names.len(), common::CASES) } else { failures.join("; ") };
    Ok(Outcome { pass, detail })
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 main identity", main_identity),
        ("2 bernoulli constants", bernoulli_constants),
        ("3 virasoro constraints", virasoro),
        ("4 genus zero", || Ok(from_reports(vec![verify_genus0(4, 3, 8)?]))),
        ("5 genus one", || Ok(from_reports(vec![f1_formulas(3, 2, 6)?]))),
        ("6 loop equations", || Ok(from_reports(vec![verify_loop_genus2(2, 2, 4)?]))),
        ("7 elsv", || Ok(from_reports(vec![verify_elsv(2, 3, 3)?, elsv_constant(2)?]))),
        ("8 kappa-bernoulli", || Ok(from_reports(vec![kw_bernoulli_check(2)?]))),
        ("9 kdv", kdv),
        ("10 phi ratio", || Ok(from_reports(vec![phi_ratio_check(8)]))),
        ("11 property suites", properties),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let out = run().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let secs = start.elapsed().as_secs_f64();
        println!("[{}] {name} ({secs:.1}s): {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
