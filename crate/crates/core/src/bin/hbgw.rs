use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hodge_bgw::cache::Cache;
use hodge_bgw::closed_forms::{f1_formulas, kw_bernoulli_check, verify_genus0, verify_iz, verify_loop_genus2, verify_os_jets};
use hodge_bgw::config::{OutputFormat, RunConfig};
use hodge_bgw::correspondence::{elsv_constant, verify_elsv, verify_main};
use hodge_bgw::export::{correlator_table, render_report, CorrelatorKind};
use hodge_bgw::gbgw::virasoro_check;
use hodge_bgw::hodge::phi_ratio_check;
use hodge_bgw::kdv::{tau4_genus2_via_kdv, verify_kdv_flow, verify_tau_initial, KdvSide};
use hodge_bgw::report::VerificationReport;
use hodge_bgw::wk::wk_correlator;
use hodge_bgw::{Error, Result};

#[derive(Parser)]
#[command(name = "hbgw", version, about = "Exact Hodge / generalized BGW correlators and identity checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    genus_max: Option<u32>,
    #[arg(long = "t-count", global = true)]
    t_count: Option<u32>,
    /// Largest `a` in `T_{2a+1}` (and largest psi exponent in tables).
    #[arg(long, global = true)]
    a_max: Option<u32>,
    #[arg(long = "x-deg", global = true)]
    x_deg: Option<u32>,
    #[arg(long, global = true)]
    aux_order: Option<u32>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Correlator cache, loaded before and rewritten after the command.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true)]
    allow_high_genus: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Wk,
    Hodge,
    Gbgw,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Wk,
    Gbgw,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Main,
    Virasoro,
    Elsv,
    ElsvConst,
    F0,
    F1,
    OsJets,
    Iz,
    Loop,
    Kdv,
    TauInitial,
    Tau4,
    PhiRatio,
    KwBernoulli,
}

#[derive(Subcommand)]
enum Cmd {
    /// Table of correlators.
    Correlators {
        #[arg(long, value_enum)]
        kind: Kind,
        /// `a..b` or a single genus.
        #[arg(long, value_parser = parse_range)]
        g: RangeInclusive<u32>,
        /// Largest number of insertions.
        #[arg(long, default_value_t = 2)]
        n_max: u32,
    },
    /// Checks one identity; exit status 0 on pass, 1 on a mismatch.
    Verify {
        #[arg(value_enum)]
        target: Target,
        /// Genus for `elsv-const` and `kw-bernoulli`.
        #[arg(long, default_value_t = 2)]
        g: u32,
        /// Largest KdV flow index.
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
        /// Comparison size for `kdv`, highest `T_1` power for `tau-initial`.
        #[arg(long)]
        size: Option<u32>,
        /// Order for `phi-ratio`, largest `m` for `virasoro`.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Recomputes every record of the cache file from scratch.
    Audit,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad genus {t:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => {
            let g = num(s)?;
            Ok(g..=g)
        }
    }
}

fn config(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &c.config {
        cfg = cfg.apply_file(p)?;
    }
    let set = |slot: &mut u32, v: Option<u32>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.genus_max, c.genus_max);
    set(&mut cfg.t_count_max, c.t_count);
    set(&mut cfg.t_index_max, c.a_max);
    set(&mut cfg.x_degree_max, c.x_deg);
    set(&mut cfg.aux_order, c.aux_order);
    if let Some(f) = c.format {
        cfg.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Markdown => OutputFormat::Markdown,
        };
    }
    if c.cache.is_some() {
        cfg.cache = c.cache.clone();
    }
    cfg.allow_high_genus |= c.allow_high_genus;
    cfg.validate()?;
    Ok(cfg)
}

fn verify(cfg: &RunConfig, target: Target, g: u32, a: u32, side: Side, size: Option<u32>, order: Option<u32>) -> Result<VerificationReport> {
    let (gm, c, am, d) = (cfg.genus_max, cfg.t_count_max, cfg.t_index_max, cfg.x_degree_max);
    Ok(match target {
        Target::Main => verify_main(&cfg.policy())?,
        Target::Virasoro => virasoro_check(order.unwrap_or(3), size.unwrap_or(8)),
        Target::Elsv => verify_elsv(gm, am, c)?,
        Target::ElsvConst => elsv_constant(g)?,
        Target::F0 => verify_genus0(c, am, d)?,
        Target::F1 => f1_formulas(c, am, d)?,
        Target::OsJets => verify_os_jets(gm, c, am, d)?,
        Target::Iz => verify_iz(gm, c, am, d)?,
        Target::Loop => verify_loop_genus2(c, am, d)?,
        Target::Kdv => {
            let mut rep = VerificationReport::new("kdv", None);
            for k in 0..=a {
                for s in [KdvSide::Wk, KdvSide::Gbgw] {
                    let wanted = match s {
                        KdvSide::Wk => side != Side::Gbgw,
                        KdvSide::Gbgw => side != Side::Wk,
                    };
                    if wanted {
                        rep.merge(verify_kdv_flow(k, s, gm, size.unwrap_or(3))?);
                    }
                }
            }
            rep
        }
        Target::TauInitial => verify_tau_initial(size.unwrap_or(6), gm, d)?,
        Target::Tau4 => {
            let mut rep = VerificationReport::new("tau4-dual", None);
            rep.check("<tau_4>_2", tau4_genus2_via_kdv()?, wk_correlator(2, &[4]));
            rep
        }
        Target::PhiRatio => phi_ratio_check(order.unwrap_or(8)),
        Target::KwBernoulli => kw_bernoulli_check(g)?,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = config(&cli.common)?;
    let mut cache = match &cfg.cache {
        Some(p) if p.exists() => Cache::load(p)?,
        _ => Cache::new(),
    };
    // An audit must not see the values it is auditing.
    if !matches!(cli.cmd, Cmd::Audit) {
        cache.install_globals();
    }
    let code = match cli.cmd {
        Cmd::Correlators { kind, g, n_max } => {
            if *g.end() > cfg.genus_max.max(hodge_bgw::config::GENUS_GUARD) && !cfg.allow_high_genus {
                return Err(Error::Precondition(format!("genus {} above the guard; pass --allow-high-genus", g.end())));
            }
            let kind = match kind {
                Kind::Wk => CorrelatorKind::Wk,
                Kind::Hodge => CorrelatorKind::Hodge,
                Kind::Gbgw => CorrelatorKind::Gbgw,
            };
            let t = correlator_table(kind, g, cfg.t_index_max, n_max, &mut cache)?;
            print!("{}", t.render(cfg.format));
            ExitCode::SUCCESS
        }
        Cmd::Verify { target, g, a, side, size, order } => {
            let rep = verify(&cfg, target, g, a, side, size, order)?;
            print!("{}", render_report(&rep, cfg.format));
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Audit => {
            let rep = cache.audit()?;
            print!("{}", render_report(&rep, cfg.format));
            return Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    if let Some(p) = &cfg.cache {
        cache.merge(&Cache::snapshot_globals());
        cache.store(p)?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hbgw: {e}");
            ExitCode::from(2)
        }
    }
}
