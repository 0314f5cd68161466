//! The acceptance suite: one pass/fail line per numbered criterion.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::Rng;

use crate::brown::{bad_shell_volume, check_vertex_proximity, mu, ConeParams, EXPLICIT_FIT_FRACTION};
use crate::cone::{cone_trace_experiment, ConeExperiment, ConeSide, ConeTable};
use crate::error::{validation, Result};
use crate::geometry::{check_convex_bounds, theta, ConvexPolygon, Domain, Point};
use crate::localization::{
    localization_defect, partition_residual, region_volumes, BumpProfile, DefectQuadrature, LengthScale,
    PartitionQuadrature,
};
use crate::sampling::block_rng;
use crate::spectral::{
    check_berezin, discretize, eigen_below, exact_disk_spectrum, exact_rectangle_spectrum, exact_spectrum, SolveMode,
    Spectrum,
};
use crate::weyl::{
    check_aizenman_lieb, check_hersch_protter, check_universal_convex_bound, constants, midpoint_grid,
    remainder_series_with, Prediction,
};

pub const CRITERIA: u8 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported but never failing.
    Info,
}

impl Status {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "criterion {:>2} {} {}: {}", self.id, self.status.as_str(), self.title, self.detail)
    }
}

/// Knobs of the suite; the defaults are the acceptance settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Convex test domains besides the square and disk oracles.
    pub polygons: Vec<Domain>,
    pub fd_resolution: usize,
    pub fd_cutoff: f64,
    pub random_lambdas: usize,
    pub random_polygons: usize,
    pub mc_samples: u64,
    pub cone_l: f64,
    pub cone_ladder: Vec<f64>,
    /// `h / h_grid` on the coarse grid for the half-plane and for tilted cones.
    pub cone_grid_ratio: (f64, f64),
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            polygons: (0..5u64)
                .map(|i| Domain::ConvexPolygon(ConvexPolygon::random_inscribed(5 + i as usize, 7 + i).expect("valid seed")))
                .collect(),
            fd_resolution: 511,
            fd_cutoff: 2e3,
            random_lambdas: 50,
            random_polygons: 200,
            mc_samples: 100_000,
            cone_l: 1.0,
            cone_ladder: vec![8.0, 16.0, 32.0],
            cone_grid_ratio: (8.0, 12.0),
        }
    }
}

/// Criteria whose strict form is not met by the model problem; they still
/// print FAIL.
pub const KNOWN_FAILURES: &[u8] = &[11];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fmt_ok(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "VIOLATED"
    }
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let start = Instant::now();
    let (title, status, detail) = match id {
        1 => constants_check()?,
        2 => exact_oracle_check()?,
        3 => aizenman_lieb_check(cfg)?,
        4 => berezin_check()?,
        5 => remainder_check()?,
        6 => convex_bound_check(cfg)?,
        7 => convex_geometry_check(cfg)?,
        8 => good_set_check(cfg)?,
        9 => partition_check()?,
        10 => region_check(cfg)?,
        11 => cone_check(cfg)?,
        12 => hersch_protter_check(cfg)?,
        13 => defect_check()?,
        _ => return Err(validation(format!("no criterion {id}; valid ids are 1..={CRITERIA}"))),
    };
    Ok(CheckOutcome {
        id,
        title,
        status,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs `ids` in order; an error inside a criterion is reported as a failure.
pub fn run_suite(ids: &[u8], cfg: &SuiteConfig) -> Vec<CheckOutcome> {
    ids.iter()
        .map(|&id| {
            let start = Instant::now();
            run_criterion(id, cfg).unwrap_or_else(|e| CheckOutcome {
                id,
                title: "error",
                status: Status::Fail,
                detail: e.to_string(),
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

type Line = (&'static str, Status, String);

fn constants_check() -> Result<Line> {
    let mut worst: f64 = 0.0;
    for d in 1..=16 {
        let c = constants(d)?;
        worst = worst.max(rel(c.l_gamma_d(1.0), c.l_d));
    }
    let e2 = rel(constants(2)?.l_d, 1.0 / (8.0 * PI));
    let e1 = rel(constants(1)?.l_d, 2.0 / (3.0 * PI));
    let pass = worst <= 1e-12 && e2 <= 1e-12 && e1 <= 1e-12;
    Ok((
        "semiclassical constants",
        Status::from_pass(pass),
        format!("max rel |L_1,d - L_d| over d=1..16 = {worst:.1e}; L_2 err {e2:.1e}; L_1 err {e1:.1e}"),
    ))
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First zero of `J_0` by bisection on its power series.
fn j01_bisection() -> f64 {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if j0_series(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-16 {
            break;
        }
    }
    0.5 * (a + b)
}

fn exact_oracle_check() -> Result<Line> {
    let sq = exact_rectangle_spectrum(1.0, 1.0, 200.0)?;
    let n = sq.counting(100.0)?;
    let tr = sq.riesz_mean(100.0, 1.0)?;
    let tr_err = rel(tr, 600.0 - 40.0 * PI * PI);
    let disk = exact_disk_spectrum(1.0, 10.0)?;
    let j = j01_bisection();
    let l1 = disk.first().unwrap_or(f64::NAN);
    let l1_err = rel(l1, j * j);
    let pass = n == 6 && tr_err <= 1e-10 && l1_err <= 1e-10;
    Ok((
        "exact oracles",
        Status::from_pass(pass),
        format!("square N(100) = {n}, Tr = {tr:.10} (rel err {tr_err:.1e}); disk lambda_1 = {l1:.12} vs j01^2 (rel err {l1_err:.1e})"),
    ))
}

fn oracle_domains() -> Result<Vec<(&'static str, Domain)>> {
    Ok(vec![("square", Domain::unit_square()), ("disk", Domain::disk(1.0)?)])
}

fn aizenman_lieb_check(cfg: &SuiteConfig) -> Result<Line> {
    let cutoff = 1e4;
    let mut worst: f64 = 0.0;
    for (k, (_, d)) in oracle_domains()?.into_iter().enumerate() {
        let spec = exact_spectrum(&d, cutoff)?;
        let mut rng = block_rng(cfg.seed, k as u64);
        for i in 0..cfg.random_lambdas {
            let lambda = spec.eigenvalues[0] + (cutoff - spec.eigenvalues[0]) * rng.random::<f64>();
            let (lo, hi) = [(0, 1), (1, 2), (0, 2)][i % 3];
            worst = worst.max(check_aizenman_lieb(&spec, lambda, lo, hi)?.relative_residual());
        }
    }
    Ok((
        "Aizenman-Lieb identity",
        Status::from_pass(worst <= 1e-10),
        format!("max relative residual {worst:.1e} over {} random lambda per domain", cfg.random_lambdas),
    ))
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)).collect()
}

fn berezin_check() -> Result<Line> {
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for (_, d) in oracle_domains()? {
        let spec = exact_spectrum(&d, 1e4)?;
        for l in log_grid(1.0, 1e4, 20) {
            let c = check_berezin(&spec, d.area(), l)?;
            pass &= c.pass;
            if c.bound > 0.0 {
                worst = worst.min(c.margin() / c.bound);
            }
        }
    }
    let sq = check_berezin(&exact_rectangle_spectrum(1.0, 1.0, 200.0)?, 1.0, 100.0)?;
    Ok((
        "Berezin-Li-Yau",
        Status::from_pass(pass && sq.pass),
        format!(
            "square lambda=100: {:.3} <= {:.3}; smallest relative margin {worst:.3e}",
            sq.trace, sq.bound
        ),
    ))
}

fn remainder_check() -> Result<Line> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d, top) in [("square", Domain::unit_square(), 1e5), ("disk", Domain::disk(1.0)?, 1e4)] {
        let spec = exact_spectrum(&d, top)?;
        let grid = midpoint_grid(&spec, 1e2, top, 40)?;
        let two = remainder_series_with(&spec, &d.summary(), &grid, Prediction::TwoTerm)?;
        let one = remainder_series_with(&spec, &d.summary(), &grid, Prediction::OneTerm)?;
        let early = two.decade_median(1e2, 1e3).unwrap_or(f64::NAN);
        let late = two.decade_median(top / 10.0, top * (1.0 + 1e-12)).unwrap_or(f64::NAN);
        let ok = late < early && two.slope <= 1.2 && one.slope >= 1.45;
        pass &= ok;
        parts.push(format!(
            "{name}: medians {early:.3e} -> {late:.3e}, slope {:.3}, one-term slope {:.3} {}",
            two.slope,
            one.slope,
            fmt_ok(ok)
        ));
    }
    Ok(("two-term remainder", Status::from_pass(pass), parts.join("; ")))
}

fn fd_spectrum(d: &Domain, cfg: &SuiteConfig) -> Result<Spectrum> {
    eigen_below(&discretize(d, cfg.fd_resolution)?, cfg.fd_cutoff, SolveMode::Auto)
}

fn convex_bound_check(cfg: &SuiteConfig) -> Result<Line> {
    let mut runs: Vec<(String, Spectrum, Domain, f64)> = Vec::new();
    for (name, d) in oracle_domains()? {
        runs.push((name.to_string(), exact_spectrum(&d, 1e5)?, d, 1e5));
    }
    for (i, d) in cfg.polygons.iter().enumerate() {
        runs.push((format!("polygon{i}"), fd_spectrum(d, cfg)?, d.clone(), cfg.fd_cutoff));
    }
    let mut pass = true;
    let mut cs = Vec::new();
    let mut parts = Vec::new();
    for (name, spec, d, top) in &runs {
        let grid = midpoint_grid(spec, 1e2, *top, 20)?;
        let rep = check_universal_convex_bound(spec, &d.summary(), &grid, d.is_convex())?;
        pass &= rep.bounded(1.5);
        cs.push(rep.fitted_c);
        parts.push(format!("{name} ratio {:.3} C {:.3e}", rep.decade_ratio, rep.fitted_c));
    }
    let spread = cs.iter().copied().fold(0.0, f64::max) / cs.iter().copied().fold(f64::INFINITY, f64::min);
    pass &= spread <= 5.0;
    parts.push(format!("C spread {spread:.3}"));
    Ok(("universal convex bound", Status::from_pass(pass), parts.join("; ")))
}

fn convex_geometry_check(cfg: &SuiteConfig) -> Result<Line> {
    let sq = Domain::unit_square();
    let mut worst: f64 = 0.0;
    for t in [0.01, 0.1, 0.3] {
        let r = theta(&sq, t)?;
        worst = worst.max((r.theta_inner + t).abs()).max((r.theta_outer - PI * t / 4.0).abs());
    }
    let mut failures = 0;
    for i in 0..cfg.random_polygons {
        let d = Domain::ConvexPolygon(ConvexPolygon::random_hull(8 + i % 8, cfg.seed.wrapping_add(1000 + i as u64))?);
        let r = d.inradius();
        let rep = check_convex_bounds(&d, &[0.05 * r, 0.25 * r, 0.5 * r, 0.9 * r], 1e-10)?;
        failures += rep.failures().count();
    }
    Ok((
        "convex geometry",
        Status::from_pass(worst <= 1e-12 && failures == 0),
        format!(
            "square theta max error {worst:.1e}; {failures} sandwich violations on {} random polygons",
            cfg.random_polygons
        ),
    ))
}

fn good_set_check(cfg: &SuiteConfig) -> Result<Line> {
    let sq = Domain::unit_square();
    let c = ConeParams::new(0.6, 0.2)?;
    let mu_sq = mu(&sq, c);
    let disk = Domain::disk(1.0)?;
    // one cone on each side of the sagitta threshold
    let mu_disk = [mu(&disk, ConeParams::new(0.3, 0.5)?), mu(&disk, ConeParams::new(0.2, 0.5)?)];
    let prox = check_vertex_proximity(&sq, ConeParams::new(0.5, 0.2)?, cfg.mc_samples, cfg.seed)?;
    let mut shell_ok = true;
    let mut parts = Vec::new();
    let fit = bad_shell_volume(&sq, c.r * EXPLICIT_FIT_FRACTION, c, cfg.mc_samples, cfg.seed)?;
    let fitted = fit.fitted_constant();
    for s in [c.r / 20.0, c.r / 50.0] {
        let rep = bad_shell_volume(&sq, s, c, cfg.mc_samples, cfg.seed.wrapping_add(1))?;
        let ok = rep.within_shell_bound(4.0) && (!rep.explicit_applies || rep.within_explicit_bound(fitted, 4.0));
        shell_ok &= ok;
        parts.push(format!(
            "s={s}: bad {:.3e}+-{:.1e} vs shell {:.3e}, fitted {:.3e} {}",
            rep.bad_volume.value,
            rep.bad_volume.stderr,
            rep.bound_shell,
            fitted * rep.explicit_shape,
            fmt_ok(ok)
        ));
    }
    let pass = (mu_sq - 0.32).abs() <= 1e-6 && mu_disk == [0.0, 1.0] && prox.pass() && shell_ok;
    Ok((
        "good sets",
        Status::from_pass(pass),
        format!(
            "mu(square) = {mu_sq:.9}; mu(disk) = {mu_disk:?}; {} proximity violations in {} samples; {}",
            prox.violations + prox.sharp_violations,
            prox.samples,
            parts.join("; ")
        ),
    ))
}

fn partition_check() -> Result<Line> {
    let p = BumpProfile::default();
    let ls = LengthScale::new(Domain::unit_square(), 0.05)?;
    // exterior, collar and bulk of the unit square
    let pts: Vec<Point> = (0..20)
        .map(|k| {
            let t = k as f64 / 19.0;
            Point::new(-0.1 + 0.6 * t, 0.3 + 0.13 * (7.0 * t).sin())
        })
        .collect();
    let q = PartitionQuadrature::default();
    let worst = |q: PartitionQuadrature| {
        pts.iter()
            .map(|&x| partition_residual(&p, &ls, x, q).residual)
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (worst(q), worst(q.refined(2)));
    let gain = coarse / fine;
    Ok((
        "partition of unity",
        Status::from_pass(coarse <= 1e-3 && gain >= 4.0),
        format!("max residual {coarse:.2e} at 20 points, {fine:.2e} refined ({gain:.0}x)"),
    ))
}

fn region_check(cfg: &SuiteConfig) -> Result<Line> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d, cone, l0) in [
        ("square", Domain::unit_square(), ConeParams::new(0.5, 0.2)?, 0.02),
        ("disk", Domain::disk(1.0)?, ConeParams::new(0.3, 0.5)?, 0.05),
    ] {
        let v = region_volumes(&d, cone, l0, cfg.mc_samples, cfg.seed)?;
        pass &= v.matches_collar && v.within_bound;
        parts.push(format!(
            "{name}: collar {:.4e}+-{:.1e} vs exact {:.4e}, bound {:.4e}",
            v.collar.value, v.collar.stderr, v.collar_exact, v.collar_bound
        ));
    }
    Ok(("region decomposition", Status::from_pass(pass), parts.join("; ")))
}

/// Half-plane and vertex-centred tilted cone over the ladder `h = l / k`.
pub fn cone_tables(cfg: &SuiteConfig) -> Result<(ConeTable, ConeTable)> {
    let l = cfg.cone_l;
    let hs: Vec<f64> = cfg.cone_ladder.iter().map(|k| l / k).collect();
    let mut half = ConeExperiment::new(0.0, ConeSide::Cone, Point::zeros(), l, hs.clone())?;
    half.grid_ratio = cfg.cone_grid_ratio.0;
    let mut tilted = ConeExperiment::new(0.5, ConeSide::Cone, Point::zeros(), l, hs)?;
    tilted.grid_ratio = cfg.cone_grid_ratio.1;
    Ok((cone_trace_experiment(&half)?, cone_trace_experiment(&tilted)?))
}

fn cone_check(cfg: &SuiteConfig) -> Result<Line> {
    let (half, tilted) = cone_tables(cfg)?;
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, t) in [("eps=0", &half), ("eps=0.5", &tilted)] {
        let spread = t.normalized_spread();
        let contamination = t.rows.iter().map(|r| r.contamination_ratio()).fold(0.0, f64::max);
        let ok = spread <= 3.0 && !t.any_contaminated();
        pass &= ok;
        parts.push(format!(
            "{name}: remainders [{}], spread {spread:.2}, contamination {:.0}% {}",
            t.rows.iter().map(|r| format!("{:.4}", r.remainder)).collect::<Vec<_>>().join(", "),
            100.0 * contamination,
            fmt_ok(ok)
        ));
    }
    let (a, b) = (
        half.rows.last().map_or(f64::NAN, |r| r.remainder.abs()),
        tilted.rows.last().map_or(f64::NAN, |r| r.remainder.abs()),
    );
    let ratio = b / a;
    pass &= ratio >= 5.0;
    parts.push(format!("vertex/half-plane remainder ratio at the finest h {ratio:.2} (need >= 5)"));
    Ok(("cone asymptotics", Status::from_pass(pass), parts.join("; ")))
}

fn hersch_protter_check(cfg: &SuiteConfig) -> Result<Line> {
    let mut pass = true;
    let mut worst = f64::INFINITY;
    let mut count = 0;
    let mut exact: Vec<Domain> = oracle_domains()?.into_iter().map(|p| p.1).collect();
    exact.push(Domain::rectangle(2.0, 1.0)?);
    for d in &exact {
        let hp = check_hersch_protter(&exact_spectrum(d, 100.0)?, &d.summary())?;
        pass &= hp.pass;
        worst = worst.min(hp.lambda_1 / hp.bound);
        count += 1;
    }
    let coarse = SuiteConfig {
        fd_resolution: 127,
        fd_cutoff: 200.0,
        ..cfg.clone()
    };
    for d in exact.iter().chain(&cfg.polygons) {
        let hp = check_hersch_protter(&fd_spectrum(d, &coarse)?, &d.summary())?;
        pass &= hp.pass;
        worst = worst.min(hp.lambda_1 / hp.bound);
        count += 1;
    }
    Ok((
        "Hersch-Protter",
        Status::from_pass(pass),
        format!("{count} spectra, smallest lambda_1 / bound {worst:.4}"),
    ))
}

fn defect_check() -> Result<Line> {
    let sq = Domain::unit_square();
    let a = localization_defect(&sq, 0.1, 0.5, 127, DefectQuadrature::default())?;
    let b = localization_defect(&sq, 0.05, 0.5, 255, DefectQuadrature::default())?;
    let observed = b.defect / a.defect;
    let predicted = b.reference / a.reference;
    let ok = observed <= 2.0 * predicted;
    Ok((
        "localization defect (informative)",
        Status::Info,
        format!(
            "defect {:.4e} -> {:.4e} (x{observed:.3}), reference scaling x{predicted:.3}, fitted C {:.3e}, {:.3e}; within 2x: {}",
            a.defect,
            b.defect,
            a.ratio(),
            b.ratio(),
            fmt_ok(ok)
        ),
    ))
}
