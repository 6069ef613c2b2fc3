//! Verification commands. Each returns report records, plot-ready tables and, for spectral
//! runs, a spectrum summary.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::estimates::{
    berezin_ratio, envelope_blows_up, i_ab_sweep, i_abs_sweep, kernel_norm_bracket, EstimateReport,
};
use crate::quadrature::{build_grid, integrate, FocusedRule, GridSpec};
use crate::report::{num, ReportRecord, RunConfig, RunOutput, Table};
use crate::schur::{
    default_sweep_points, norm_bound_constant, sweep_entry, tau1, tau2, tau_product_bound,
    verify_test_inequalities, SchurParams, SpaceParams,
};
use crate::toeplitz::{
    berezin, berezin_bracket, boundedness_criterion, compactness_criterion, essential_norm_with,
    exact_l2_norm, exhaustion_disagreement, galerkin_radial, l2_singular_values, m_profile,
    schatten_criterion, schatten_from_oracle, spectral_decay, trace_identity_check,
    weak_null_pairings, DiscreteOperator, EssSummary, EssentialNormReport, ExhaustionSpec,
    GridSummary, NormContext, NormOptions, NormSummary, RadialSymbol, SchattenSummary,
    SpectrumReport, SymbolSpec, Verdict, Window,
};

/// Tolerances of the checks.
pub mod tol {
    /// Closed-form kernel against its power series.
    pub const KERNEL_SERIES: f64 = 1e-8;
    /// Reproducing property on monomials.
    pub const REPRODUCING: f64 = 1e-6;
    pub const VOLUME: f64 = 1e-10;
    /// Sup-ratio change between a grid and its refinement.
    pub const REFINEMENT: f64 = 0.10;
    /// Kernel norm ratio for (p, a) = (2, 0), which is exactly 1.
    pub const EXACT_RATIO: f64 = 1e-6;
    /// Schur factors against their closed forms.
    pub const TAU_EXACT: f64 = 1e-12;
    /// Relative disagreement between two exhaustions.
    pub const EXHAUSTION: f64 = 0.10;
    /// Nystrom against the radial oracle.
    pub const NYSTROM: f64 = 1e-3;
    pub const TRACE: f64 = 1e-6;
    /// Berezin transform at 0 against the lowest radial eigenvalue.
    pub const BEREZIN_ORIGIN: f64 = 1e-8;
}

/// Galerkin degree of the Schatten verdicts (the finer spectrum uses 4D + 3).
const SCHATTEN_DEGREE: usize = 1024;
/// Resolution of the Nystrom cross-check on the disc.
const NYSTROM_GRID: (usize, usize) = (60, 128);
/// Leading singular values compared against the oracle.
const NYSTROM_LEADING: usize = 4;
/// Number of singular values written to the spectrum summary.
const SIGMA_EXPORT: usize = 64;
/// Boundary distance outside which the compact-support probe keeps the symbol.
const CORE_CUT: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    KernelCheck,
    Estimates,
    Schur,
    Bound,
    EssNorm,
    Schatten,
    Berezin,
    All,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::KernelCheck,
        Command::Estimates,
        Command::Schur,
        Command::Bound,
        Command::EssNorm,
        Command::Schatten,
        Command::Berezin,
        Command::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::KernelCheck => "kernel-check",
            Command::Estimates => "estimates",
            Command::Schur => "schur",
            Command::Bound => "bound",
            Command::EssNorm => "essnorm",
            Command::Schatten => "schatten",
            Command::Berezin => "berezin",
            Command::All => "all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

/// Validate the configuration, then run the command.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cmd {
        Command::KernelCheck => kernel_check(cfg),
        Command::Estimates => estimates(cfg),
        Command::Schur => schur(cfg),
        Command::Bound => bound(cfg),
        Command::EssNorm => essnorm(cfg),
        Command::Schatten => schatten(cfg),
        Command::Berezin => berezin_checks(cfg),
        Command::All => {
            let mut out = RunOutput::default();
            for c in &Command::ALL[..7] {
                out.extend(run(*c, cfg)?);
            }
            Ok(out)
        }
    }
}

fn timed<F: FnOnce() -> Result<ReportRecord>>(f: F) -> Result<ReportRecord> {
    let t = Instant::now();
    let mut r = f()?;
    r.wall_time = t.elapsed().as_secs_f64();
    Ok(r)
}

fn norm_options(cfg: &RunConfig) -> NormOptions {
    NormOptions {
        sweep: cfg.sweep.clone(),
        seed: cfg.seed,
        ..NormOptions::default()
    }
}

fn sweep_table(name: &str, r: &EstimateReport) -> Table {
    let mut t = Table::new(name, &["d_z", "lhs", "rhs_envelope", "ratio"]);
    for p in &r.points {
        t.push(vec![p.d_z, p.lhs, p.rhs_envelope, p.ratio]);
    }
    t
}

/// Random points with |z| <= radius, fixed by the seed.
fn sample_points(dim: usize, radius: f64, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut c: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let n = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let r = radius * rng.random::<f64>().powf(1.0 / (2 * dim) as f64);
            c.iter_mut().for_each(|v| *v *= r / n);
            Point::new(&c).expect("sampled point lies inside the ball")
        })
        .collect()
}

pub fn kernel_check(cfg: &RunConfig) -> Result<RunOutput> {
    let dom = cfg.domain;
    let mut records = Vec::new();
    records.push(timed(|| {
        let mut pts = sample_points(dom.dim(), 0.9, 24, cfg.seed);
        pts.push(Point::on_axis(dom.dim(), 0.9));
        let mut worst: f64 = 0.0;
        for z in &pts {
            for w in &pts {
                let k = dom.kernel(z, w)?;
                let s = dom.kernel_series_default(z, w)?;
                worst = worst.max((k - s).norm() / k.norm());
            }
        }
        Ok(ReportRecord::new("kernel-series", cfg.grid)
            .input("domain", dom.name())
            .input("max_modulus", 0.9)
            .value("max_rel_error", worst)
            .tolerance("rel", tol::KERNEL_SERIES)
            .judged(worst < tol::KERNEL_SERIES, false))
    })?);
    records.push(timed(|| {
        let zs = [0.0, 0.5, 0.8];
        let mut worst: f64 = 0.0;
        if dom.dim() == 1 {
            let grid = build_grid(&dom, &cfg.grid)?;
            for &x in &zs {
                let z = Point::polar(x, 0.3);
                for k in 0..=10u32 {
                    let f = grid.sample(|w, _| dom.kernel_unchecked(&z, w) * w.first().powu(k));
                    let got = integrate(&grid, &f, 0.0)?;
                    let want = z.first().powu(k);
                    worst = worst.max(rel_or_abs(got, want));
                }
            }
        } else {
            for &x in &zs {
                let rule = FocusedRule::new(&dom, &cfg.grid, x)?;
                for k in 0..=10u32 {
                    // K(z, w) with z on the first axis depends on x conj(w_1)
                    let got = rule.integrate_complex(
                        |v| dom.kernel_of_inner(v.conj() * x) * v.powu(k),
                        |_| 1.0,
                    );
                    worst = worst.max(rel_or_abs(got, Complex64::new(x.powi(k as i32), 0.0)));
                }
            }
        }
        Ok(ReportRecord::new("reproducing-property", cfg.grid)
            .input("max_degree", 10)
            .input("moduli", zs)
            .value("max_error", worst)
            .tolerance("rel", tol::REPRODUCING)
            .judged(worst < tol::REPRODUCING, false))
    })?);
    records.push(timed(|| {
        let vol = if dom.dim() == 1 {
            build_grid(&dom, &cfg.grid)?.weight_sum()
        } else {
            FocusedRule::new(&dom, &cfg.grid, 0.5)?.integrate(|_| 1.0, |_| 1.0)
        };
        let err = (vol / dom.volume() - 1.0).abs();
        Ok(ReportRecord::new("volume", cfg.grid)
            .value("computed", vol)
            .value("exact", dom.volume())
            .tolerance("rel", tol::VOLUME)
            .judged(err < tol::VOLUME, false))
    })?);
    Ok(RunOutput {
        records,
        ..Default::default()
    })
}

// Relative error, or absolute when the target vanishes.
fn rel_or_abs(got: Complex64, want: Complex64) -> f64 {
    let e = (got - want).norm();
    if want.norm() > 1e-12 {
        e / want.norm()
    } else {
        e
    }
}

/// Integral pairs (a, b) and triples (a, b, s) of the envelope checks.
pub const AB_TUPLES: [(f64, f64); 3] = [(2.0, 0.0), (2.0, 0.5), (1.5, -0.5)];
pub const ABS_TUPLES: [(f64, f64, f64); 2] = [(2.0, 0.0, 0.25), (2.0, 0.5, 0.25)];
/// (p, a) pairs of the kernel-norm bracket.
pub const NORM_PAIRS: [(f64, f64); 4] = [(2.0, 0.0), (2.0, 1.0), (4.0, 0.0), (1.5, 0.0)];

pub fn estimates(cfg: &RunConfig) -> Result<RunOutput> {
    let dom = cfg.domain;
    let fine = cfg.grid.refined();
    let mut out = RunOutput::default();
    for (a, b) in AB_TUPLES {
        let t = Instant::now();
        let c = i_ab_sweep(&dom, &cfg.grid, a, b, &cfg.sweep)?;
        let f = i_ab_sweep(&dom, &fine, a, b, &cfg.sweep)?;
        envelope_record(
            &mut out,
            cfg,
            format!("i_ab_{a}_{b}"),
            &[("a", a), ("b", b)],
            c,
            f,
            t,
        );
    }
    for (a, b, s) in ABS_TUPLES {
        let t = Instant::now();
        let c = i_abs_sweep(&dom, &cfg.grid, a, b, s, &cfg.sweep)?;
        let f = i_abs_sweep(&dom, &fine, a, b, s, &cfg.sweep)?;
        envelope_record(
            &mut out,
            cfg,
            format!("i_abs_{a}_{b}_{s}"),
            &[("a", a), ("b", b), ("s", s)],
            c,
            f,
            t,
        );
    }
    for (p, a) in NORM_PAIRS {
        let rec = timed(|| {
            let r = kernel_norm_bracket(&dom, &cfg.grid, p, a, &cfg.sweep)?;
            let exact = p == 2.0 && a == 0.0;
            let dev = r
                .points
                .iter()
                .map(|x| (x.ratio - 1.0).abs())
                .fold(0.0, f64::max);
            let blows_up = a < 2.0 * (p - 1.0) && envelope_blows_up(&dom, p, a, &cfg.sweep);
            let ok = r.ratios_finite_positive() && (!exact || dev < tol::EXACT_RATIO) && blows_up;
            out.tables
                .push(sweep_table(&format!("kernel_norm_{p}_{a}"), &r));
            let mut rec = ReportRecord::new(format!("kernel-norm_{p}_{a}"), cfg.grid)
                .input("p", p)
                .input("a", a)
                .value("min_ratio", r.min_ratio)
                .value("max_ratio", r.max_ratio)
                .value("envelope_blows_up", blows_up);
            if exact {
                rec = rec
                    .value("max_deviation_from_1", dev)
                    .tolerance("exact", tol::EXACT_RATIO);
            }
            Ok(rec.judged(ok, false))
        })?;
        out.records.push(rec);
    }
    let rec = timed(|| {
        let r = berezin_ratio(&dom, &cfg.grid, cfg.alpha, cfg.beta, &cfg.sweep)?;
        out.tables.push(sweep_table("berezin_ratio", &r));
        Ok(ReportRecord::new("berezin-type-bound", cfg.grid)
            .input("alpha", cfg.alpha)
            .input("beta", cfg.beta)
            .value("min_ratio", r.min_ratio)
            .value("max_ratio", r.max_ratio)
            .judged(r.ratios_finite_positive(), false))
    })?;
    out.records.push(rec);
    Ok(out)
}

fn envelope_record(
    out: &mut RunOutput,
    cfg: &RunConfig,
    label: String,
    inputs: &[(&str, f64)],
    mut coarse: EstimateReport,
    finer: EstimateReport,
    started: Instant,
) {
    let change = coarse.compare_sup(&finer);
    let mut r = ReportRecord::new(label.clone(), cfg.grid);
    for (k, v) in inputs {
        r = r.input(k, v);
    }
    let ok = coarse.ratios_finite_positive()
        && finer.ratios_finite_positive()
        && change < tol::REFINEMENT;
    out.tables.push(sweep_table(&label, &coarse));
    let mut r = r
        .value("sup_ratio", coarse.max_ratio)
        .value("sup_ratio_refined", finer.max_ratio)
        .value("min_ratio", coarse.min_ratio)
        .value("refinement_change", change)
        .value("grids", &coarse.grids)
        .tolerance("refinement", tol::REFINEMENT)
        .judged(ok, false);
    r.wall_time = started.elapsed().as_secs_f64();
    out.records.push(r);
}

pub fn schur(cfg: &RunConfig) -> Result<RunOutput> {
    let sp = cfg.space()?;
    sp.check_bounded_regime()?;
    let mut out = RunOutput::default();
    out.records.push(timed(|| {
        let reference = SpaceParams::new(2.0, 2.0, 0.0)?;
        let (t1, t2) = (tau1(&reference, 0.25), tau2(&reference, 0.25));
        let ok = (t1 - 4.0).abs() < tol::TAU_EXACT && (t2 - 4.0).abs() < tol::TAU_EXACT;
        Ok(ReportRecord::new("schur-tau-reference", cfg.grid)
            .input("p", 2.0)
            .input("q", 2.0)
            .input("a", 0.0)
            .input("gamma", 0.25)
            .value("tau1", t1)
            .value("tau2", t2)
            .value("expected", 4.0)
            .tolerance("abs", tol::TAU_EXACT)
            .judged(ok, false))
    })?);
    out.records.push(timed(|| {
        let entries = default_sweep_points()
            .iter()
            .map(sweep_entry)
            .collect::<Result<Vec<_>>>()?;
        let ok = entries
            .iter()
            .all(|e| e.gamma0_in_window && e.inequality_ok);
        let mut t = Table::new(
            "schur_sweep",
            &["p", "q", "a", "gamma0", "tau1", "tau2", "bound_factor"],
        );
        for e in &entries {
            t.push(vec![
                e.p,
                e.q,
                e.a,
                e.gamma0,
                e.tau1,
                e.tau2,
                e.bound_factor,
            ]);
        }
        out.tables.push(t);
        Ok(ReportRecord::new("schur-window-sweep", cfg.grid)
            .value("points", entries.len())
            .value(
                "all_gamma0_inside",
                entries.iter().all(|e| e.gamma0_in_window),
            )
            .value(
                "all_tau_products_hold",
                entries.iter().all(|e| e.inequality_ok),
            )
            .judged(ok, false))
    })?);
    out.records.push(timed(|| {
        let sch = SchurParams::at_gamma0(&sp)?;
        let tp = tau_product_bound(&sp, sch.gamma)?;
        let (lo, hi) = sp.gamma_window()?;
        let (t1, t2) =
            verify_test_inequalities(&cfg.domain, &cfg.grid, &sp, sch.gamma, &cfg.sweep)?;
        out.tables.push(sweep_table("schur_test_1", &t1));
        out.tables.push(sweep_table("schur_test_2", &t2));
        let ok = tp.holds && t1.ratios_finite_positive() && t2.ratios_finite_positive();
        Ok(ReportRecord::new("schur-test", cfg.grid)
            .input("p", sp.p)
            .input("q", sp.q)
            .input("a", sp.a)
            .value("gamma0", sch.gamma)
            .value("gamma_window", [lo, hi])
            .value("tau1", sch.tau1)
            .value("tau2", sch.tau2)
            .value("tau_product", tp.lhs)
            .value("tau_product_bound", tp.rhs)
            .value("bound_factor", norm_bound_constant(&sp)?)
            .value("test1_sup_ratio", t1.max_ratio)
            .value("test2_sup_ratio", t2.max_ratio)
            .judged(ok, false))
    })?);
    Ok(out)
}

pub fn bound(cfg: &RunConfig) -> Result<RunOutput> {
    let dom = cfg.domain;
    let sp = cfg.space()?;
    let sym = cfg.symbol()?;
    let radial = *sym.as_radial()?;
    let mut out = RunOutput::default();
    let b = boundedness_criterion(&dom, &sym, &sp)?;
    let profile = m_profile(&dom, &radial, &sp);
    let mut t = Table::new("m_profile", &["d_z", "m"]);
    for (d, m) in profile.distances.iter().zip(&profile.values) {
        t.push(vec![*d, *m]);
    }
    out.tables.push(t);
    out.records.push(
        ReportRecord::new("boundedness", cfg.grid)
            .input("p", sp.p)
            .input("q", sp.q)
            .input("a", sp.a)
            .input("alpha", radial.alpha)
            .input("beta", radial.beta)
            .value("bounded", b.bounded)
            .value("boundary_exponent", b.boundary_exponent)
            .value("fitted_exponent", b.fitted_exponent)
            .value("numeric_bounded", b.numeric_bounded)
            .value("sup_m", num(b.sup_m))
            .value("limsup_m", num(b.limsup_m))
            .judged(b.consistent(), b.critical),
    );
    if !b.bounded {
        return Ok(out);
    }
    out.records.push(timed(|| {
        let ctx = NormContext::new(&dom, &cfg.grid, &sp, &norm_options(cfg))?;
        let br = ctx.bracket(&radial)?;
        let factor = norm_bound_constant(&sp)?;
        let mut ok = br.is_ordered() && br.lower > 0.0;
        let mut rec = ReportRecord::new("norm-bracket", cfg.grid)
            .input("seed", cfg.seed)
            .value("lower", br.lower)
            .value("upper", br.upper)
            .value("lower_source", &br.lower_source)
            .value("upper_source", &br.upper_source)
            .value("families", &br.families)
            .value("sup_m", br.sup_m)
            .value("bound_factor", factor)
            .value("global_ratio", br.lower / (factor * br.sup_m));
        if sp.p == 2.0 && sp.q == 2.0 && sp.a == 0.0 {
            let exact = exact_l2_norm(&dom, &radial)?;
            ok &= br.contains(exact);
            rec = rec.value("exact_l2_norm", exact);
        }
        Ok(rec.judged(ok, b.critical))
    })?);
    Ok(out)
}

/// A second exhaustion with base 3 over the same range of depths.
fn companion_exhaustion(e: &ExhaustionSpec) -> Result<ExhaustionSpec> {
    let (hi, lo) = (e.levels()[0], *e.levels().last().unwrap());
    let first = (-hi.ln() / 3f64.ln()).round().max(1.0) as u32;
    let last = ((-lo.ln() / 3f64.ln()).round() as u32).max(first + 2);
    ExhaustionSpec::geometric(3.0, first, last)
}

fn ess_record(label: &str, cfg: &RunConfig, r: &EssentialNormReport) -> ReportRecord {
    ReportRecord::new(label, cfg.grid)
        .input("exhaustion", &r.exhaustion)
        .value("levels", &r.levels)
        .value("tail_uppers", &r.tail_uppers)
        .value("upper_proxy", r.upper_proxy)
        .value("lower_proxy", r.lower_proxy)
        .value("limsup_m", r.limsup_m)
        .value("norm_upper", r.norm_upper)
}

pub fn essnorm(cfg: &RunConfig) -> Result<RunOutput> {
    let dom = cfg.domain;
    let sp = cfg.space()?;
    let sym = cfg.symbol()?;
    let mut out = RunOutput::default();
    let comp = compactness_criterion(&dom, &sym, &sp)?;
    let t = Instant::now();
    let ctx = NormContext::new(&dom, &cfg.grid, &sp, &norm_options(cfg))?;
    let r1 = essential_norm_with(&ctx, &dom, &sym, &cfg.exhaustion)?;
    let r2 = essential_norm_with(&ctx, &dom, &sym, &companion_exhaustion(&cfg.exhaustion)?)?;
    let disagreement = exhaustion_disagreement(&r1, &r2);
    let mut table = Table::new("essnorm_tails", &["eps", "tail_upper"]);
    for (e, u) in r1.levels.iter().zip(&r1.tail_uppers) {
        table.push(vec![*e, *u]);
    }
    out.tables.push(table);
    // a compact operator has tails that extrapolate to well below the first tail bound;
    // a non-compact one keeps a positive kernel lower proxy
    let verdict_ok = if comp.compact {
        r1.upper_proxy <= 0.5 * r1.tail_uppers[0]
    } else {
        r1.upper_proxy > 0.0 && r1.lower_proxy.is_none_or(|l| l > 0.0)
    };
    let lower_ok = r1
        .lower_proxy
        .is_none_or(|l| l <= r1.norm_upper * (1.0 + 1e-6));
    let mut rec = ess_record("essential-norm", cfg, &r1)
        .input("p", sp.p)
        .input("q", sp.q)
        .input("a", sp.a)
        .input("alpha", cfg.alpha)
        .input("beta", cfg.beta)
        .value("compact", comp.compact)
        .value("tails_nonincreasing", r1.tails_nonincreasing())
        .value("companion_exhaustion", &r2.exhaustion)
        .value("companion_upper_proxy", r2.upper_proxy)
        .value("exhaustion_disagreement", disagreement)
        .tolerance("exhaustion", tol::EXHAUSTION)
        .judged(
            r1.tails_nonincreasing() && verdict_ok && lower_ok && disagreement < tol::EXHAUSTION,
            comp.critical,
        );
    rec.wall_time = t.elapsed().as_secs_f64();
    out.records.push(rec);
    Ok(out)
}

pub fn schatten(cfg: &RunConfig) -> Result<RunOutput> {
    let dom = cfg.domain;
    let sym = cfg.symbol()?;
    let radial = *sym.as_radial()?;
    let mut out = RunOutput::default();
    let t = Instant::now();
    let crit = schatten_criterion(&dom, radial.alpha, radial.beta, cfg.s)?;
    let est = schatten_from_oracle(&dom, &radial, cfg.s, SCHATTEN_DEGREE)?;
    let agrees = match (crit.in_class, est.verdict) {
        (Some(true), v) => v == Verdict::Converging,
        (Some(false), v) => v == Verdict::Diverging,
        (None, _) => true,
    };
    let mut rec = ReportRecord::new("schatten", cfg.grid)
        .input("s", cfg.s)
        .input("alpha", radial.alpha)
        .input("beta", radial.beta)
        .input("degree", SCHATTEN_DEGREE)
        .value("criterion_exponent", crit.exponent)
        .value("in_class", crit.in_class)
        .value("verdict", est.verdict)
        .value("increment_ratio", num(est.increment_ratio))
        .value("partial_sums", &est.partial_sums)
        .value("resolution_spread", est.resolution_spread)
        .judged(agrees, crit.critical);
    rec.wall_time = t.elapsed().as_secs_f64();
    out.records.push(rec);

    let spectrum = l2_singular_values(&dom, &radial, SCHATTEN_DEGREE)?;
    let mut t_sigma = Table::new("sigma", &["k", "sigma", "multiplicity"]);
    for (k, (s, m)) in spectrum
        .values()
        .iter()
        .zip(spectrum.multiplicities())
        .enumerate()
    {
        t_sigma.push(vec![k as f64, *s, *m as f64]);
    }
    out.tables.push(t_sigma);

    if dom.dim() == 1 {
        out.records.push(timed(|| {
            let spec = GridSpec::new(NYSTROM_GRID.0, NYSTROM_GRID.1).with_kappa(cfg.grid.kappa);
            let grid = build_grid(&dom, &spec)?;
            let ny = DiscreteOperator::assemble(&dom, &grid, &sym)?.singular_values()?;
            let oracle = spectrum.leading(NYSTROM_LEADING);
            let got = ny.leading(NYSTROM_LEADING);
            let err = oracle
                .iter()
                .zip(&got)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let mut t = Table::new("sigma_nystrom", &["k", "sigma"]);
            for (k, s) in ny.values().iter().enumerate() {
                t.push(vec![k as f64, *s]);
            }
            out.tables.push(t);
            Ok(ReportRecord::new("nystrom-vs-oracle", spec)
                .value("nystrom", &got)
                .value("oracle", &oracle)
                .value("max_abs_error", err)
                .value("nonincreasing", ny.is_nonincreasing())
                .tolerance("abs", tol::NYSTROM)
                .judged(err < tol::NYSTROM && ny.is_nonincreasing(), false))
        })?);
    }

    if radial.boundary_order(&dom) > dom.dim() as f64 {
        out.records.push(timed(|| {
            let tr = trace_identity_check(&dom, &radial)?;
            Ok(ReportRecord::new("trace-identity", cfg.grid)
                .value("eigenvalue_sum", tr.lhs)
                .value("kernel_integral", tr.rhs)
                .value("relative_difference", tr.relative_difference)
                .tolerance("rel", tol::TRACE)
                .judged(tr.relative_difference < tol::TRACE, false))
        })?);
    }

    out.spectra.push(spectrum_report(
        cfg,
        &radial,
        &spectrum.leading(SIGMA_EXPORT),
        &est,
    )?);
    Ok(out)
}

fn spectrum_report(
    cfg: &RunConfig,
    radial: &RadialSymbol,
    sigma: &[f64],
    est: &crate::toeplitz::SchattenEstimate,
) -> Result<SpectrumReport> {
    let dom = cfg.domain;
    let sp = cfg.space()?;
    let sym = SymbolSpec::Radial(*radial);
    let bounded = sp.check_bounded_regime().is_ok()
        && boundedness_criterion(&dom, &sym, &sp).is_ok_and(|b| b.bounded);
    let (norm_bracket, essnorm) = if bounded {
        let ctx = NormContext::new(&dom, &cfg.grid, &sp, &norm_options(cfg))?;
        let br = ctx.bracket(radial)?;
        let ess = essential_norm_with(&ctx, &dom, &sym, &cfg.exhaustion)?;
        (
            Some(NormSummary {
                lo: br.lower,
                hi: br.upper,
            }),
            Some(EssSummary {
                upper: ess.upper_proxy,
                lower: ess.lower_proxy,
                limsup_m: ess.limsup_m,
            }),
        )
    } else {
        (None, None)
    };
    Ok(SpectrumReport {
        domain: dom.name().into(),
        alpha: radial.alpha,
        beta: radial.beta,
        p: sp.p,
        q: sp.q,
        a: sp.a,
        grid: GridSummary::from(&cfg.grid),
        sigma: sigma.to_vec(),
        norm_bracket,
        essnorm,
        schatten: Some(SchattenSummary {
            s: est.s,
            verdict: est.verdict,
            partial_sums: est.partial_sums.clone(),
        }),
    })
}

pub fn berezin_checks(cfg: &RunConfig) -> Result<RunOutput> {
    let dom = cfg.domain;
    let radial = *cfg.symbol()?.as_radial()?;
    let sp = cfg.space()?;
    let mut out = RunOutput::default();
    out.records.push(timed(|| {
        let t0 = berezin(&dom, &cfg.grid, &radial, &Point::origin(dom.dim()))?;
        // k_0 is constant, so the transform at 0 is the lowest radial eigenvalue
        let lambda0 = galerkin_radial(&dom, &radial, 0)?.eigenvalues[0];
        let err = (t0 - lambda0).abs() / lambda0.abs();
        Ok(ReportRecord::new("berezin-origin", cfg.grid)
            .input("alpha", radial.alpha)
            .input("beta", radial.beta)
            .value("transform", t0)
            .value("lowest_eigenvalue", lambda0)
            .tolerance("rel", tol::BEREZIN_ORIGIN)
            .judged(err < tol::BEREZIN_ORIGIN, false))
    })?);
    out.records.push(timed(|| {
        let r = berezin_bracket(&dom, &cfg.grid, &radial, &cfg.sweep)?;
        out.tables.push(sweep_table("berezin", &r));
        Ok(ReportRecord::new("berezin-bracket", cfg.grid)
            .value("min_ratio", r.min_ratio)
            .value("max_ratio", r.max_ratio)
            .judged(r.ratios_finite_positive(), false))
    })?);
    out.records.push(timed(|| {
        let pairs = weak_null_pairings(&dom, &cfg.grid, sp.p, sp.a, &cfg.sweep, |v| {
            Complex64::new(1.0, 0.0) + v
        })?;
        let first = pairs[0].value;
        let last = pairs.last().unwrap().value;
        let decreasing = pairs.windows(2).all(|w| w[1].value < w[0].value);
        Ok(ReportRecord::new("weak-null-kernels", cfg.grid)
            .input("p", sp.p)
            .input("a", sp.a)
            .value(
                "pairings",
                pairs.iter().map(|x| [x.d_z, x.value]).collect::<Vec<_>>(),
            )
            .judged(decreasing && last < first, false))
    })?);
    out.records.push(timed(|| {
        let core = radial.windowed(Window::Core { cut: CORE_CUT });
        let decay = spectral_decay(&l2_singular_values(&dom, &core, 400)?, 10.0);
        Ok(ReportRecord::new("compact-support-decay", cfg.grid)
            .input("cut", CORE_CUT)
            .value("local_rates", &decay.local_rates)
            .value("super_polynomial", decay.super_polynomial)
            .judged(decay.super_polynomial, false))
    })?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainModel;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("frobnicate".parse::<Command>().is_err());
    }

    #[test]
    fn projection_bound_on_disc() {
        let cfg = RunConfig {
            alpha: 0.0,
            beta: 0.0,
            ..RunConfig::default()
        };
        let out = run(Command::Bound, &cfg).unwrap();
        assert!(out.all_pass(), "{:#?}", out.records);
        let br = &out.records[1];
        let lo = br.values["lower"].as_f64().unwrap();
        let hi = br.values["upper"].as_f64().unwrap();
        assert!(lo <= 1.0 + 1e-6 && hi >= 1.0 - 1e-6);
        assert_eq!(out.records[0].values["sup_m"].as_f64(), Some(1.0));
    }

    #[test]
    fn window_violations_surface_as_input_errors() {
        let cfg = RunConfig {
            q: 4.0,
            a: 3.0,
            ..RunConfig::default()
        };
        let e = run(Command::Bound, &cfg).unwrap_err();
        assert!(matches!(e, Error::Admissibility { .. }), "{e}");
    }

    #[test]
    fn ball_kernel_check() {
        let cfg = RunConfig {
            domain: DomainModel::ball(2).unwrap(),
            ..RunConfig::default()
        };
        let out = run(Command::KernelCheck, &cfg).unwrap();
        assert!(out.all_pass(), "{:#?}", out.records);
    }

    #[test]
    fn companion_spans_same_depths() {
        let c = companion_exhaustion(&ExhaustionSpec::default()).unwrap();
        assert_eq!(c.to_string(), "3^-m:1..6");
    }
}
