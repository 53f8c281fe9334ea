//! Verification suites. Every check becomes one [`CheckRow`]; a suite passes
//! when all of its rows do.
//!
//! Trend checks compare a coarse radius (half the configured one) with the
//! configured radius and pass when the defect shrinks by the configured ratio
//! or is already below the rounding floor.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{rat, Paravector};
use crate::error::{Error, Result};
use crate::function::{Evaluate, SeriesValue};
use crate::jacobi::{
    alternating_subset_sum_identity, determining_subsets, estimate_residue, half_period_relation_defect,
    hidden_periodicity_defects, laurent_approximations, residue_sign, subsets, zero_catalog, JacobiFamily,
    JacobiFunction, JacobiKind,
};
use crate::lattice::PeriodLattice;
use crate::operators::{
    annihilation_check, degree_reduction_check, exact_periods, factorization_identities, sharpness_witnesses,
    CliffordianPolynomial, Shift,
};
use crate::zeta::{EvalConfig, QuasiForm, ZetaFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Periodicity,
    Oddness,
    Quasi,
    Zeros,
    Residues,
    Hidden,
    Laurent,
    Relations,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Periodicity,
        Suite::Oddness,
        Suite::Quasi,
        Suite::Zeros,
        Suite::Residues,
        Suite::Hidden,
        Suite::Laurent,
        Suite::Relations,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Periodicity => "periodicity",
            Suite::Oddness => "oddness",
            Suite::Quasi => "quasi",
            Suite::Zeros => "zeros",
            Suite::Residues => "residues",
            Suite::Hidden => "hidden",
            Suite::Laurent => "laurent",
            Suite::Relations => "relations",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Pass thresholds; the defaults are the acceptance values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Largest accepted `defect(R) / defect(R/2)`.
    pub trend_ratio: f64,
    /// Defects below this count as converged in trend checks.
    pub trend_floor: f64,
    /// Oddness defect bound, in units of the combined tail estimates.
    pub oddness_tail_factor: f64,
    /// Zero and hidden-relation bounds, in units of the tail estimates.
    pub zero_tail_factor: f64,
    pub hidden_tail_factor: f64,
    /// Absolute bounds used on `m = 0` lattices.
    pub quasi_m0: f64,
    pub relation_m0: f64,
    pub residue_m0: f64,
    pub residue_sum_m0: f64,
    /// Residue bounds on `m >= 1` lattices.
    pub residue_m1: f64,
    pub residue_sum_m1: f64,
    /// Relative residual of the Laurent approximation near the origin.
    pub laurent_rel: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            trend_ratio: 0.35,
            trend_floor: 1e-10,
            oddness_tail_factor: 2.0,
            zero_tail_factor: 10.0,
            hidden_tail_factor: 10.0,
            quasi_m0: 1e-8,
            relation_m0: 1e-8,
            residue_m0: 1e-4,
            residue_sum_m0: 1e-3,
            residue_m1: 5e-2,
            residue_sum_m1: 5e-2,
            laurent_rel: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Fine truncation radius; trend checks also use `radius / 2`.
    pub radius: u32,
    /// Sample points for the cheap pointwise suites.
    pub samples: usize,
    /// Sample points for the trend suites, which evaluate at two radii.
    pub trend_samples: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
}

impl SuiteConfig {
    /// Radius at which the `m = 0` absolute thresholds are met.
    pub const M0_RADIUS: u32 = 4096;
    pub const M1_RADIUS: u32 = 24;

    pub fn for_lattice(lattice: &PeriodLattice) -> Self {
        Self {
            radius: if lattice.m() == 0 { Self::M0_RADIUS } else { Self::M1_RADIUS },
            samples: 10,
            trend_samples: 2,
            seed: 0,
            thresholds: Thresholds::default(),
        }
    }

    fn radii(&self) -> [u32; 2] {
        [(self.radius / 2).max(1), self.radius]
    }
}

/// One check. `threshold` is the bound `defect_norm` is compared with.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check_id: String,
    pub function: String,
    pub point: Vec<f64>,
    pub defect_norm: f64,
    pub tail_estimate: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    pub const HEADER: [&'static str; 7] = [
        "check_id",
        "function",
        "point",
        "defect_norm",
        "tail_estimate",
        "threshold",
        "pass",
    ];

    fn bounded(check_id: String, function: &str, point: &Paravector<f64>, defect: f64, tail: f64, threshold: f64) -> Self {
        Self {
            check_id,
            function: function.to_string(),
            point: point.coords().to_vec(),
            defect_norm: defect,
            tail_estimate: tail,
            pass: defect <= threshold,
            threshold,
        }
    }

    fn exact(check_id: String, function: &str, holds: bool) -> Self {
        Self {
            check_id,
            function: function.to_string(),
            point: Vec::new(),
            defect_norm: if holds { 0.0 } else { 1.0 },
            tail_estimate: 0.0,
            threshold: 0.0,
            pass: holds,
        }
    }

    /// The CSV fields, in [`HEADER`](Self::HEADER) order.
    pub fn fields(&self) -> [String; 7] {
        [
            self.check_id.clone(),
            self.function.clone(),
            self.point.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(";"),
            format!("{:e}", self.defect_norm),
            format!("{:e}", self.tail_estimate),
            format!("{:e}", self.threshold),
            self.pass.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

fn trend_row(
    th: &Thresholds,
    check_id: String,
    function: &str,
    point: &Paravector<f64>,
    coarse: &SeriesValue<f64>,
    fine: &SeriesValue<f64>,
) -> CheckRow {
    let threshold = (th.trend_ratio * coarse.value.norm_inf()).max(th.trend_floor);
    CheckRow::bounded(check_id, function, point, fine.value.norm_inf(), fine.tail_estimate, threshold)
}

fn shift_label(indices: &[usize]) -> String {
    if indices.is_empty() {
        return "0".into();
    }
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &j in indices {
        match counts.iter_mut().find(|(k, _)| *k == j) {
            Some((_, c)) => *c += 1,
            None => counts.push((j, 1)),
        }
    }
    counts
        .iter()
        .map(|(j, c)| if *c == 1 { format!("w{j}") } else { format!("{c}w{j}") })
        .collect::<Vec<_>>()
        .join("+")
}

/// Periods claimed by construction: `2 omega_k` and `omega_i + omega_k` for
/// `C`; `omega_i` and `2 omega_j`, `j != i`, for `S_i`.
pub fn claimed_periods(kind: JacobiKind, n: usize) -> Vec<Vec<usize>> {
    match kind {
        JacobiKind::C => {
            let mut out: Vec<Vec<usize>> = (1..=n).map(|k| vec![k, k]).collect();
            for i in 1..=n {
                for k in i + 1..=n {
                    out.push(vec![i, k]);
                }
            }
            out
        }
        JacobiKind::S(i) => std::iter::once(vec![i])
            .chain((1..=n).filter(|&j| j != i).map(|j| vec![j, j]))
            .collect(),
    }
}

fn family(lattice: &PeriodLattice, radius: u32) -> Result<JacobiFamily> {
    Ok(JacobiFamily::new(ZetaFunction::new(lattice.clone(), EvalConfig::with_radius(radius))?))
}

/// Runs `suite` on `lattice`. Suites that need `N = 2m+2` half-periods (all
/// but `quasi` on `m = 0` and `relations`) reject other lattices.
pub fn run_suite(suite: Suite, lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.radius < 2 {
        return Err(Error::InvalidArgument("the suites need a radius of at least 2".into()));
    }
    let rows = match suite {
        Suite::Periodicity => periodicity(lattice, cfg)?,
        Suite::Oddness => oddness(lattice, cfg)?,
        Suite::Quasi => quasi(lattice, cfg)?,
        Suite::Zeros => zeros(lattice, cfg)?,
        Suite::Residues => residues(lattice, cfg)?,
        Suite::Hidden => hidden(lattice, cfg)?,
        Suite::Laurent => laurent(lattice, cfg)?,
        Suite::Relations => relations(lattice)?,
    };
    Ok(SuiteReport { suite, rows })
}

fn per_point<F>(points: &[Paravector<f64>], f: F) -> Result<Vec<CheckRow>>
where
    F: Fn(&Paravector<f64>) -> Result<Vec<CheckRow>> + Sync + Send,
{
    let chunks: Vec<Result<Vec<CheckRow>>> = points.par_iter().map(f).collect();
    let mut rows = Vec::new();
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(rows)
}

fn periodicity(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let fam = family(lattice, cfg.radius)?;
    let functions = fam.functions()?;
    let n = lattice.rank();
    let radii = cfg.radii();
    per_point(&lattice.sample_points(cfg.trend_samples, cfg.seed), |x| {
        let mut rows = Vec::new();
        for f in &functions {
            for p in claimed_periods(f.kind(), n) {
                let v = Shift::from_indices(&p).vector(lattice.omegas())?;
                let d = f.period_defect(x, &v, &radii)?;
                let id = format!("period:{}", shift_label(&p));
                rows.push(trend_row(&cfg.thresholds, id, &f.kind().to_string(), x, &d[0], &d[1]));
            }
        }
        Ok(rows)
    })
}

fn oddness(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let fam = family(lattice, cfg.radius)?;
    let functions = fam.functions()?;
    let zeta = fam.zeta().clone();
    let factor = cfg.thresholds.oddness_tail_factor;
    per_point(&lattice.sample_points(cfg.samples, cfg.seed), |x| {
        let mut rows = Vec::new();
        let mut check = |name: &str, f: &dyn Evaluate<f64>| -> Result<()> {
            let a = f.eval(x)?;
            let b = f.eval(&-x)?;
            let tail = a.tail_estimate + b.tail_estimate;
            let d = (&a.value + &b.value).norm_inf();
            rows.push(CheckRow::bounded("odd".into(), name, x, d, tail, factor * tail));
            Ok(())
        };
        check("zeta", &zeta)?;
        for f in &functions {
            check(&f.kind().to_string(), f)?;
        }
        Ok(rows)
    })
}

fn quasi(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let zeta = ZetaFunction::new(lattice.clone(), EvalConfig::with_radius(cfg.radius))?;
    let th = &cfg.thresholds;
    if lattice.m() == 0 {
        // constant polynomial 2 zeta(omega) for any half-period sum omega
        let mut shifts: Vec<Vec<usize>> = subsets(lattice.rank());
        shifts.retain(|s| !s.is_empty());
        return per_point(&lattice.sample_points(cfg.samples, cfg.seed), |x| {
            let mut rows = Vec::new();
            for s in &shifts {
                let w = Shift::from_indices(s).vector(lattice.omegas())?;
                let a = zeta.value(&(x + &w))?;
                let b = zeta.value(&(x - &w))?;
                let c = zeta.value(&w)?;
                let d = SeriesValue::combine(0, [(1.0, &a), (-1.0, &b), (-2.0, &c)]);
                rows.push(CheckRow::bounded(
                    format!("quasi:{}", shift_label(s)),
                    "zeta",
                    x,
                    d.value.norm_inf(),
                    d.tail_estimate,
                    th.quasi_m0,
                ));
            }
            Ok(rows)
        });
    }
    let radii = cfg.radii();
    per_point(&lattice.sample_points(cfg.trend_samples, cfg.seed), |x| {
        let mut rows = Vec::new();
        for alpha in 1..=lattice.rank() {
            let w = lattice.omega(alpha)?;
            let a = zeta.eval_radii(&(x + w), &radii)?;
            let b = zeta.eval_radii(&(x - w), &radii)?;
            let p = zeta.quasi_polynomial_radii(x, alpha, QuasiForm::Centered, &radii)?;
            let d: Vec<_> = (0..2)
                .map(|i| SeriesValue::combine(lattice.m(), [(1.0, &a[i]), (-1.0, &b[i]), (-1.0, &p[i])]))
                .collect();
            rows.push(trend_row(th, format!("quasi:w{alpha}"), "zeta", x, &d[0], &d[1]));
        }
        Ok(rows)
    })
}

fn zeros(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let fam = family(lattice, cfg.radius)?;
    let radii = cfg.radii();
    let th = &cfg.thresholds;
    let mut jobs = Vec::new();
    for f in fam.functions()? {
        for z in zero_catalog(f.kind(), lattice)? {
            jobs.push((f.clone(), z));
        }
    }
    let rows: Vec<Result<CheckRow>> = jobs
        .par_iter()
        .map(|(f, z)| {
            let v = f.eval_at_radii(z, &radii)?;
            let (coarse, fine) = (v[0].value.norm_inf(), v[1].value.norm_inf());
            let threshold = th.zero_tail_factor * v[1].tail_estimate;
            let mut row = CheckRow::bounded("zero".into(), &f.kind().to_string(), z, fine, v[1].tail_estimate, threshold);
            row.pass &= fine <= coarse || fine <= th.trend_floor;
            Ok(row)
        })
        .collect();
    rows.into_iter().collect()
}

fn residues(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let fam = family(lattice, cfg.radius)?;
    let n = lattice.rank();
    let th = &cfg.thresholds;
    let (tol, sum_tol) = if lattice.m() == 0 {
        (th.residue_m0, th.residue_sum_m0)
    } else {
        (th.residue_m1, th.residue_sum_m1)
    };
    let mut rows = Vec::new();
    for f in fam.functions()? {
        let determining = determining_subsets(f.kind(), n);
        // every vertex on m = 0; the determining ones otherwise
        let poles: Vec<Vec<usize>> = if lattice.m() == 0 { subsets(n) } else { determining.clone() };
        let estimates: Vec<Result<(Vec<usize>, Paravector<f64>, f64, f64)>> = poles
            .par_iter()
            .map(|s| {
                let at = Shift::from_indices(s).vector(lattice.omegas())?;
                let est = estimate_residue(&f, &at)?;
                Ok((s.clone(), at, est.value, est.spread))
            })
            .collect();
        let mut sum = 0.0;
        let mut spread = 0.0;
        for e in estimates {
            let (s, at, value, est_spread) = e?;
            let sign = residue_sign(f.kind(), &s);
            let mut row = CheckRow::bounded(
                format!("residue:{sign:+}"),
                &f.kind().to_string(),
                &at,
                (value - sign as f64).abs(),
                est_spread,
                tol,
            );
            row.pass &= value.signum() == sign as f64;
            rows.push(row);
            if determining.contains(&s) {
                sum += value;
                spread += est_spread;
            }
        }
        let want = 2.0 - n as f64;
        rows.push(CheckRow::bounded(
            format!("residue_sum:{want:+}"),
            &f.kind().to_string(),
            &Paravector::zero(lattice.m()),
            (sum - want).abs(),
            spread,
            sum_tol,
        ));
    }
    Ok(rows)
}

fn hidden(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let fam = family(lattice, cfg.radius)?;
    let factor = cfg.thresholds.hidden_tail_factor;
    per_point(&lattice.sample_points(cfg.trend_samples, cfg.seed), |x| {
        Ok(hidden_periodicity_defects(&fam, x, &[cfg.radius])?
            .into_iter()
            .map(|d| {
                let v = &d.values[0];
                CheckRow::bounded(
                    format!("hidden:{}", d.relation),
                    &d.relation.function.to_string(),
                    x,
                    v.value.norm_inf(),
                    v.tail_estimate,
                    factor * v.tail_estimate,
                )
            })
            .collect())
    })
}

fn laurent(lattice: &PeriodLattice, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let fam = family(lattice, cfg.radius)?;
    let th = &cfg.thresholds;
    let origin = Paravector::zero(lattice.m());
    let d = half_period_relation_defect(fam.zeta(), &cfg.radii())?;
    let mut rows = vec![if lattice.m() == 0 {
        CheckRow::bounded(
            "phi0:vertex_sum".into(),
            "zeta",
            &origin,
            d[1].value.norm_inf(),
            d[1].tail_estimate,
            th.relation_m0,
        )
    } else {
        trend_row(th, "phi0:vertex_sum".into(), "zeta", &origin, &d[0], &d[1])
    }];
    let scale = 0.05 * lattice.min_modulus();
    let points: Vec<Paravector<f64>> = lattice
        .sample_points(cfg.trend_samples, cfg.seed)
        .into_iter()
        .map(|p| p.scale(&(scale / p.modulus())))
        .collect();
    let functions: Vec<JacobiFunction> = fam.functions()?;
    rows.extend(per_point(&points, |x| {
        let mut rows = Vec::new();
        for (f, approx) in functions.iter().zip(laurent_approximations(&functions, x, 5)?) {
            let exact = f.eval(x)?;
            let rel = (&approx.value - &exact.value).norm_inf() / exact.value.norm_inf();
            rows.push(CheckRow::bounded(
                "laurent:order5".into(),
                &f.kind().to_string(),
                x,
                rel,
                (approx.tail_estimate + exact.tail_estimate) / exact.value.norm_inf(),
                th.laurent_rel,
            ));
        }
        Ok(rows)
    })?);
    Ok(rows)
}

/// Largest degree for the exact annihilation sweep at each `m`.
fn annihilation_degree(m: usize) -> usize {
    match m {
        0 | 1 => 4,
        _ => 2,
    }
}

fn relations(lattice: &PeriodLattice) -> Result<Vec<CheckRow>> {
    let n = lattice.rank();
    let periods = exact_periods(lattice);
    let mut rows: Vec<CheckRow> = factorization_identities(n)
        .into_iter()
        .map(|c| CheckRow::exact(format!("identity:{}", c.name), "operator", c.holds))
        .collect();
    let top = annihilation_degree(lattice.m());
    for d in 0..=top {
        let report = annihilation_check(d, &periods)?;
        rows.push(CheckRow::exact(format!("annihilation:degree{d}"), "operator", report.holds()));
    }
    for d in 1..top {
        let found = matches!(sharpness_witnesses(d, &periods)?, Ok(_));
        rows.push(CheckRow::exact(format!("sharpness:degree{d}"), "operator", found));
    }
    // x^2-type Cliffordian monomials lose a degree under each difference
    for j in 1..=n {
        let lambda = Paravector::basis(lattice.m(), (j - 1) % lattice.dim());
        let poly = CliffordianPolynomial {
            m: lattice.m(),
            terms: vec![(rat(1, 1), lambda, 2)],
        };
        let red = degree_reduction_check(j, &poly, &periods)?;
        rows.push(CheckRow::exact(format!("degree_reduction:E{j}"), "operator", red.holds()));
    }
    for k in 2..=8 {
        let r = alternating_subset_sum_identity(k)?;
        rows.push(CheckRow::exact(format!("lemma:n{k}"), "combinatorics", r.holds()));
    }
    Ok(rows)
}
