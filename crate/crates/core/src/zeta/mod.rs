//! The lattice function
//! `zeta_N(x) = x^-1 + sum_p { (x - w_p)^-1 + sum_{mu<N} (w_p^-1 x)^mu w_p^-1 }`,
//! its directional derivatives, the quasi-periodicity polynomial and the
//! Laurent tail term.
//!
//! Summation runs over infinity-norm shells of the multi-index with `w` and
//! `-w` paired. The correction polynomial of every shell depends on the
//! lattice only, so it is accumulated once as a [`CoordPoly`] and cached;
//! evaluation then costs two paravector inverses per pair.

mod pde;
pub(crate) mod poly;

use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::clifford::{lambda_power, Multivector, Paravector, Scalar, MAX_PARA};
use crate::error::{Error, Result};
use crate::function::{Evaluate, SeriesValue};
use crate::lattice::{for_each_representative, PeriodLattice};

pub use pde::{check_holomorphic_cliffordian, HolomorphicResidual};
pub use poly::CoordPoly;
use poly::{factorial, MomentPlan};

/// Safety multiplier on the summed-decay tail estimate.
pub const TAIL_SAFETY: f64 = 2.0;

/// Reject arguments closer than this fraction of the minimal lattice modulus
/// to a lattice point.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// Smallest radius at which `target_tol` may stop the summation early.
const MIN_STOP_RADIUS: u32 = 8;

/// Truncation policy for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub max_radius: u32,
    /// Stop once the tail estimate drops below this (0 sums to `max_radius`).
    pub target_tol: f64,
    /// Pair `w` with `-w`. The unpaired route is a slow reference path.
    pub pairing: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_radius: 24,
            target_tol: 0.0,
            pairing: true,
        }
    }
}

impl EvalConfig {
    pub fn with_radius(max_radius: u32) -> Self {
        Self {
            max_radius,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_radius < 1 {
            return Err(Error::InvalidArgument("max_radius must be at least 1".into()));
        }
        if !(self.target_tol >= 0.0) {
            return Err(Error::InvalidArgument("target_tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// The two equivalent forms of the quasi-periodicity relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiForm {
    /// `zeta(x + omega) - zeta(x - omega) = 2 sum_p (x|grad)^2p / (2p)! zeta(omega)`.
    Centered,
    /// `zeta(x + 2 omega) - zeta(x) = 2 sum_p ((x + omega)|grad)^2p / (2p)! zeta(omega)`.
    FullPeriod,
}

macro_rules! with_dim {
    ($d:expr, $D:ident => $body:expr) => {
        match $d {
            2 => {
                const $D: usize = 2;
                $body
            }
            4 => {
                const $D: usize = 4;
                $body
            }
            6 => {
                const $D: usize = 6;
                $body
            }
            other => unreachable!("paravector dimension {other}"),
        }
    };
}

#[inline(always)]
fn inverse_d<T: Scalar + Copy, const D: usize>(u: &[T; D], guard2: f64) -> Option<[T; D]> {
    let mut n = u[0] * u[0];
    for a in 1..D {
        n = n + u[a] * u[a];
    }
    if !(n.magnitude() >= guard2) || n.is_zero() {
        return None;
    }
    let inv_n = T::one() / n;
    let mut out = [T::zero(); D];
    out[0] = u[0] * inv_n;
    for a in 1..D {
        out[a] = -(u[a] * inv_n);
    }
    Some(out)
}

/// `(z v)^n z` for paravectors, in closed form.
///
/// With `s = <v, conj z>`, `rho = |z|^2`, `q = rho |v|^2`, the element `a = z v`
/// satisfies `a^2 = 2 s a - q`, so `a^n = alpha_n a + beta_n` and
/// `a^n z = alpha_{n+1} z - rho alpha_n conj(v)`.
#[inline(always)]
fn sandwich_power<T: Scalar + Copy, const D: usize>(z: &[T; D], v: &[T; D], n: usize) -> [T; D] {
    if n == 0 {
        return *z;
    }
    let mut s = z[0] * v[0];
    let mut rho = z[0] * z[0];
    let mut vv = v[0] * v[0];
    for a in 1..D {
        s = s - z[a] * v[a];
        rho = rho + z[a] * z[a];
        vv = vv + v[a] * v[a];
    }
    let q = rho * vv;
    let two_s = s + s;
    let (mut alpha, mut beta) = (T::zero(), T::one());
    let mut alpha_n = T::zero();
    for k in 0..=n {
        let next = two_s * alpha + beta;
        beta = -(q * alpha);
        alpha = next;
        if k + 1 == n {
            alpha_n = alpha;
        }
    }
    let alpha_n1 = alpha;
    let c = rho * alpha_n;
    let mut out = [T::zero(); D];
    out[0] = alpha_n1 * z[0] - c * v[0];
    for a in 1..D {
        out[a] = alpha_n1 * z[a] + c * v[a];
    }
    out
}

fn to_array<T: Scalar + Copy, const D: usize>(p: &Paravector<T>) -> [T; D] {
    std::array::from_fn(|a| *p.coord(a))
}

fn to_multivector<T: Scalar + Copy>(m: usize, coords: &[T]) -> Multivector<T> {
    Paravector::from_coords(m, coords)
        .expect("paravector dimension")
        .to_multivector()
}

fn inf_norm<T: Scalar>(c: &[T]) -> f64 {
    c.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

fn real_point<T: Scalar>(c: &[T]) -> Vec<f64> {
    c.iter().map(|v| v.to_real().unwrap_or(f64::NAN)).collect()
}

/// Calls `body(y - w, y + w)` for every representative `w = 2 k omega` of
/// shell `r`, where `steps` holds the rows `2 omega_alpha`. Returns the first
/// index for which `body` reported a singular point.
#[inline(always)]
fn walk_pairs<T: Scalar + Copy, const D: usize>(
    rank: usize,
    steps: &[[f64; D]],
    y: &[T; D],
    r: u32,
    mut body: impl FnMut(&[T; D], &[T; D]) -> bool,
) -> Option<Vec<i64>> {
    let mut bad = None;
    for_each_representative(rank, r, |k| {
        let mut w = [0.0; D];
        for (step, &ka) in steps.iter().zip(k) {
            let f = ka as f64;
            for a in 0..D {
                w[a] += f * step[a];
            }
        }
        let mut u1 = *y;
        let mut u2 = *y;
        for a in 0..D {
            let wa = T::from_f64(w[a]);
            u1[a] = u1[a] - wa;
            u2[a] = u2[a] + wa;
        }
        if !body(&u1, &u2) && bad.is_none() {
            bad = Some(k.to_vec());
        }
    });
    bad
}

/// `(x|grad_w)^n (w^-1) = (-1)^n n! (w^-1 x)^n w^-1`.
pub fn directional_derivative_inverse<T: Scalar + Copy>(
    x: &Paravector<T>,
    w: &Paravector<T>,
    n: usize,
) -> Result<Multivector<T>> {
    if x.m() != w.m() {
        return Err(Error::SignatureMismatch {
            left: x.m(),
            right: w.m(),
        });
    }
    let winv = w.inverse().map_err(|_| Error::Pole {
        point: real_point(w.coords()),
        detail: "w^-1 is undefined at w = 0".into(),
    })?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let f = T::from_f64(sign * factorial(n));
    Ok(with_dim!(x.dim(), D => {
        let t = sandwich_power::<T, D>(&to_array(&winv), &to_array(x), n);
        let scaled: [T; D] = std::array::from_fn(|a| t[a] * f);
        to_multivector(x.m(), &scaled)
    }))
}

/// `zeta_N` of a fixed lattice, with a cache of per-shell correction polynomials.
#[derive(Debug, Clone)]
pub struct ZetaFunction {
    lattice: Arc<PeriodLattice>,
    cfg: EvalConfig,
    plan: Arc<MomentPlan>,
    polys: Arc<RwLock<Vec<Arc<CoordPoly>>>>,
    guard: f64,
}

/// Tail estimate after summing through shell `r` whose contribution had
/// infinity-norm `last`. Shell contributions decay like `r^-p` with `p = 3`
/// for even `N` and `p = 2` for odd `N`, so the omitted shells add up to about
/// `r / (p - 1)` times the last one.
pub fn tail_estimate(rank: usize, r: u32, last: f64) -> f64 {
    let p = if rank % 2 == 0 { 3.0 } else { 2.0 };
    TAIL_SAFETY * (r as f64 / (p - 1.0)).max(1.0) * last
}

impl ZetaFunction {
    pub fn new(lattice: PeriodLattice, cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let n = lattice.rank();
        // even mu cancel between w and -w
        let mus: Vec<usize> = (1..n).filter(|mu| mu % 2 == 1).collect();
        let plan = MomentPlan::new(lattice.dim(), &mus);
        let guard = SINGULARITY_GUARD * lattice.min_modulus();
        Ok(Self {
            lattice: Arc::new(lattice),
            cfg,
            plan: Arc::new(plan),
            polys: Arc::new(RwLock::new(Vec::new())),
            guard,
        })
    }

    /// Same function and cache, different truncation policy.
    pub fn with_config(&self, cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            ..self.clone()
        })
    }

    pub fn lattice(&self) -> &PeriodLattice {
        &self.lattice
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn m(&self) -> usize {
        self.lattice.m()
    }

    /// Distance below which an argument counts as sitting on a pole.
    pub fn singularity_guard(&self) -> f64 {
        self.guard
    }

    /// `sum_{w in shell r} sum_{mu<N} (w^-1 x)^mu w^-1` as a polynomial in `x`.
    pub fn shell_correction(&self, r: u32) -> Arc<CoordPoly> {
        self.ensure_polys(r);
        if r == 0 {
            return Arc::new(CoordPoly::default());
        }
        self.polys.read().expect("poly cache")[r as usize - 1].clone()
    }

    fn ensure_polys(&self, rmax: u32) {
        let have = self.polys.read().expect("poly cache").len() as u32;
        if have >= rmax {
            return;
        }
        let mut guard = self.polys.write().expect("poly cache");
        let have = guard.len() as u32;
        if have >= rmax {
            return;
        }
        let fresh: Vec<Arc<CoordPoly>> = ((have + 1)..=rmax)
            .into_par_iter()
            .map(|r| Arc::new(self.plan.shell_poly(&self.lattice, r)))
            .collect();
        guard.extend(fresh);
    }

    fn polys_up_to(&self, rmax: u32) -> Vec<Arc<CoordPoly>> {
        self.ensure_polys(rmax);
        self.polys.read().expect("poly cache")[..rmax as usize].to_vec()
    }

    fn check_arg<T: Scalar>(&self, x: &Paravector<T>) -> Result<()> {
        if x.m() != self.m() {
            return Err(Error::SignatureMismatch {
                left: x.m(),
                right: self.m(),
            });
        }
        Ok(())
    }

    /// Sum over `+-w` of `f((y - w)^-1) + f((y + w)^-1)` for shell `r`, where
    /// `f` is the identity (`order = 0`) or `z -> (z v)^order z`.
    fn shell_kernel<T: Scalar + Copy, const D: usize>(
        &self,
        y: &[T; D],
        dir: &[T; D],
        order: usize,
        r: u32,
    ) -> Result<[T; D]> {
        let lat = &*self.lattice;
        let guard2 = self.guard * self.guard;
        let steps: Vec<[f64; D]> = lat
            .omegas()
            .iter()
            .map(|w| std::array::from_fn(|a| 2.0 * w.coord(a)))
            .collect();
        let mut acc = [T::zero(); D];
        let bad = if order == 0 {
            walk_pairs(lat.rank(), &steps, y, r, |u1, u2| {
                match (inverse_d(u1, guard2), inverse_d(u2, guard2)) {
                    (Some(i1), Some(i2)) => {
                        for a in 0..D {
                            acc[a] = acc[a] + (i1[a] + i2[a]);
                        }
                        true
                    }
                    _ => false,
                }
            })
        } else {
            walk_pairs(lat.rank(), &steps, y, r, |u1, u2| {
                match (inverse_d(u1, guard2), inverse_d(u2, guard2)) {
                    (Some(i1), Some(i2)) => {
                        let t1 = sandwich_power(&i1, dir, order);
                        let t2 = sandwich_power(&i2, dir, order);
                        for a in 0..D {
                            acc[a] = acc[a] + (t1[a] + t2[a]);
                        }
                        true
                    }
                    _ => false,
                }
            })
        };
        match bad {
            None => Ok(acc),
            Some(k) => Err(Error::Pole {
                point: real_point(y),
                detail: format!("argument meets the lattice point with index +-{k:?}"),
            }),
        }
    }

    /// Sums `start + sum_{r>=1} shell(r)` in shell order, recording a value at
    /// every radius in `radii` (ascending). With `stop_tol`, `radii` must hold
    /// one radius and the sum may end early.
    fn run_series<T: Scalar + Copy, const D: usize>(
        &self,
        start: [T; D],
        radii: &[u32],
        stop_tol: Option<f64>,
        shell: impl Fn(u32) -> Result<[T; D]> + Sync,
    ) -> Result<Vec<SeriesValue<T>>> {
        if radii.is_empty() {
            return Ok(Vec::new());
        }
        if radii.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::InvalidArgument("radii must be ascending".into()));
        }
        let m = self.m();
        let rmax = *radii.last().expect("nonempty");
        let batch = match stop_tol {
            Some(_) => (2 * rayon::current_num_threads()).max(4) as u32,
            None => rmax.max(1),
        };
        let mut total = start;
        let mut out = Vec::with_capacity(radii.len());
        let mut next_radius = 0;
        // radius 0: the x^-1 term alone
        while next_radius < radii.len() && radii[next_radius] == 0 {
            out.push(SeriesValue {
                value: to_multivector(m, &total),
                radius_used: 0,
                tail_estimate: f64::INFINITY,
            });
            next_radius += 1;
        }
        let mut lo = 1;
        while lo <= rmax {
            let hi = (lo + batch - 1).min(rmax);
            let parts: Vec<Result<[T; D]>> = (lo..=hi).into_par_iter().map(&shell).collect();
            for (r, part) in (lo..=hi).zip(parts) {
                let c = part?;
                for a in 0..D {
                    total[a] = total[a] + c[a];
                }
                let tail = tail_estimate(self.lattice.rank(), r, inf_norm(&c));
                let stop = matches!(stop_tol, Some(tol) if tol > 0.0 && r >= MIN_STOP_RADIUS && tail <= tol);
                while next_radius < radii.len() && (radii[next_radius] == r || stop) {
                    out.push(SeriesValue {
                        value: to_multivector(m, &total),
                        radius_used: r,
                        tail_estimate: tail,
                    });
                    next_radius += 1;
                }
                if next_radius == radii.len() {
                    return Ok(out);
                }
            }
            lo = hi + 1;
        }
        Ok(out)
    }

    fn eval_paired<T: Scalar + Copy>(
        &self,
        x: &Paravector<T>,
        radii: &[u32],
        stop_tol: Option<f64>,
    ) -> Result<Vec<SeriesValue<T>>> {
        self.check_arg(x)?;
        let rmax = radii.last().copied().unwrap_or(0);
        let polys = self.polys_up_to(rmax);
        let guard2 = self.guard * self.guard;
        with_dim!(self.lattice.dim(), D => {
            let xa: [T; D] = to_array(x);
            let start = inverse_d(&xa, guard2).ok_or_else(|| Error::Pole {
                point: real_point(x.coords()),
                detail: "argument meets the lattice point 0".into(),
            })?;
            self.run_series(start, radii, stop_tol, |r| {
                let mut c = self.shell_kernel(&xa, &xa, 0, r)?;
                let p = polys[r as usize - 1].eval(&xa);
                for a in 0..D {
                    c[a] = c[a] + p[a];
                }
                Ok(c)
            })
        })
    }

    /// Term-by-term evaluation without `+-w` pairing, through the general
    /// Clifford product. Reference route for tests; slow.
    pub fn eval_unpaired<T: Scalar + Copy>(&self, x: &Paravector<T>, radius: u32) -> Result<SeriesValue<T>> {
        self.check_arg(x)?;
        let m = self.m();
        let n = self.lattice.rank();
        let guard2 = self.guard * self.guard;
        let pole = |detail: String| Error::Pole {
            point: real_point(x.coords()),
            detail,
        };
        if !(x.norm_sq().magnitude() >= guard2) {
            return Err(pole("argument meets the lattice point 0".into()));
        }
        let mut total = x.inverse()?.to_multivector();
        let mut last = Multivector::zero(m);
        for r in 1..=radius {
            let mut shell_sum = Multivector::zero(m);
            for k in self.lattice.enumerate_shell(r).points {
                let w = self.lattice.lattice_point(&k)?.lift::<T>();
                let u = x - &w;
                if !(u.norm_sq().magnitude() >= guard2) {
                    return Err(pole(format!("argument meets the lattice point with index {:?}", k.0)));
                }
                let winv = w.inverse()?;
                let mut term = u.inverse()?.to_multivector();
                for mu in 0..n {
                    term += &lambda_power(&winv, x, mu)?;
                }
                shell_sum += &term;
            }
            total += &shell_sum;
            last = shell_sum;
        }
        Ok(SeriesValue {
            value: total,
            radius_used: radius,
            tail_estimate: tail_estimate(n, radius, last.norm_inf()),
        })
    }

    /// `zeta_N(x)` truncated at each radius in `radii`.
    pub fn eval_radii<T: Scalar + Copy>(&self, x: &Paravector<T>, radii: &[u32]) -> Result<Vec<SeriesValue<T>>> {
        if self.cfg.pairing {
            self.eval_paired(x, radii, None)
        } else {
            radii.iter().map(|&r| self.eval_unpaired(x, r)).collect()
        }
    }

    /// `zeta_N(x)` under the configured truncation policy.
    pub fn value<T: Scalar + Copy>(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        if !self.cfg.pairing {
            return self.eval_unpaired(x, self.cfg.max_radius);
        }
        let stop = (self.cfg.target_tol > 0.0).then_some(self.cfg.target_tol);
        Ok(self
            .eval_paired(x, &[self.cfg.max_radius], stop)?
            .pop()
            .expect("one radius requested"))
    }

    /// `(v|grad)^n zeta_N` at `y`, by termwise exact differentiation, truncated
    /// at each radius in `radii`.
    pub fn derivative_radii<T: Scalar + Copy>(
        &self,
        v: &Paravector<T>,
        n: usize,
        y: &Paravector<T>,
        radii: &[u32],
    ) -> Result<Vec<SeriesValue<T>>> {
        self.check_arg(v)?;
        self.check_arg(y)?;
        if n == 0 {
            return self.eval_paired(y, radii, None);
        }
        let rmax = radii.last().copied().unwrap_or(0);
        let polys = self.polys_up_to(rmax);
        let guard2 = self.guard * self.guard;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let f = T::from_f64(sign * factorial(n));
        with_dim!(self.lattice.dim(), D => {
            let ya: [T; D] = to_array(y);
            let va: [T; D] = to_array(v);
            let yinv = inverse_d(&ya, guard2).ok_or_else(|| Error::Pole {
                point: real_point(y.coords()),
                detail: "argument meets the lattice point 0".into(),
            })?;
            let s0 = sandwich_power(&yinv, &va, n);
            let start: [T; D] = std::array::from_fn(|a| s0[a] * f);
            self.run_series(start, radii, None, |r| {
                let k = self.shell_kernel(&ya, &va, n, r)?;
                let p = polys[r as usize - 1].directional(&ya, &va, n);
                Ok(std::array::from_fn(|a| k[a] * f + p[a]))
            })
        })
    }

    pub fn derivative<T: Scalar + Copy>(&self, v: &Paravector<T>, n: usize, y: &Paravector<T>) -> Result<SeriesValue<T>> {
        Ok(self
            .derivative_radii(v, n, y, &[self.cfg.max_radius])?
            .pop()
            .expect("one radius requested"))
    }

    /// The quasi-periodicity polynomial of half-period `alpha` (1-based) at `x`,
    /// in either form; truncated at each radius in `radii`.
    pub fn quasi_polynomial_radii<T: Scalar + Copy>(
        &self,
        x: &Paravector<T>,
        alpha: usize,
        form: QuasiForm,
        radii: &[u32],
    ) -> Result<Vec<SeriesValue<T>>> {
        let m = self.m();
        if self.lattice.rank() != self.lattice.dim() {
            return Err(Error::InvalidArgument(format!(
                "the quasi-periodicity polynomial needs N = 2m+2 = {} half-periods, lattice has {}",
                self.lattice.dim(),
                self.lattice.rank()
            )));
        }
        let omega = self.lattice.omega(alpha)?.lift::<T>();
        let dir = match form {
            QuasiForm::Centered => x.clone(),
            QuasiForm::FullPeriod => x + &omega,
        };
        let mut parts = Vec::with_capacity(m + 1);
        for p in 0..=m {
            parts.push(self.derivative_radii(&dir, 2 * p, &omega, radii)?);
        }
        Ok((0..radii.len())
            .map(|i| {
                SeriesValue::combine(
                    m,
                    parts
                        .iter()
                        .enumerate()
                        .map(|(p, v)| (T::from_f64(2.0 / factorial(2 * p)), &v[i])),
                )
            })
            .collect())
    }

    pub fn quasi_polynomial<T: Scalar + Copy>(&self, x: &Paravector<T>, alpha: usize, form: QuasiForm) -> Result<SeriesValue<T>> {
        Ok(self
            .quasi_polynomial_radii(x, alpha, form, &[self.cfg.max_radius])?
            .pop()
            .expect("one radius requested"))
    }

    /// Leading term of `zeta_N(x) - x^-1` near the origin:
    /// `-sum_p (w_p^-1 x)^(2k+1) w_p^-1` with `k = [N/2]`.
    pub fn laurent_term<T: Scalar + Copy>(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        self.laurent_term_of_order(x, 2 * (self.lattice.rank() / 2) + 1)
    }

    /// `-sum_p (w_p^-1 x)^mu w_p^-1` for odd `mu >= N`, which is
    /// `(x|grad)^mu W / mu!` with `W` the formal sum of the `w_p^-1`.
    pub fn laurent_term_of_order<T: Scalar + Copy>(&self, x: &Paravector<T>, mu: usize) -> Result<SeriesValue<T>> {
        self.check_arg(x)?;
        if mu % 2 == 0 || mu < self.lattice.rank() {
            return Err(Error::InvalidArgument(format!(
                "Laurent orders of zeta_N are odd and at least N = {}; got {mu}",
                self.lattice.rank()
            )));
        }
        let lat = &*self.lattice;
        with_dim!(lat.dim(), D => {
            let xa: [T; D] = to_array(x);
            let zero = [T::zero(); D];
            let out = self.run_series(zero, &[self.cfg.max_radius], None, |r| {
                let mut acc = [T::zero(); D];
                let mut w = [0.0; MAX_PARA];
                for_each_representative(lat.rank(), r, |k| {
                    lat.point_coords(k, &mut w);
                    let wa: [T; D] = std::array::from_fn(|a| T::from_f64(w[a]));
                    let y = inverse_d(&wa, 0.0).expect("nonzero lattice point");
                    let t = sandwich_power(&y, &xa, mu);
                    for a in 0..D {
                        // -w contributes the same term for odd mu
                        acc[a] = acc[a] - (t[a] + t[a]);
                    }
                });
                Ok(acc)
            })?;
            Ok(out.into_iter().next().expect("one radius requested"))
        })
    }
}

impl<T: Scalar + Copy> Evaluate<T> for ZetaFunction {
    fn m(&self) -> usize {
        self.lattice.m()
    }

    fn eval(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        self.value(x)
    }

    fn eval_at_radii(&self, x: &Paravector<T>, radii: &[u32]) -> Result<Vec<SeriesValue<T>>> {
        self.eval_radii(x, radii)
    }

    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        Some(self.lattice.distance_to_lattice(x))
    }
}

/// `zeta_N(x)` for a one-off evaluation. Reuse a [`ZetaFunction`] for repeated calls.
pub fn zeta_eval(lattice: &PeriodLattice, x: &Paravector<f64>, cfg: EvalConfig) -> Result<SeriesValue<f64>> {
    ZetaFunction::new(lattice.clone(), cfg)?.value(x)
}

/// `(x|grad)^n zeta_N(y)`.
pub fn zeta_derivative(
    lattice: &PeriodLattice,
    direction: &Paravector<f64>,
    n: usize,
    at: &Paravector<f64>,
    cfg: EvalConfig,
) -> Result<SeriesValue<f64>> {
    ZetaFunction::new(lattice.clone(), cfg)?.derivative(direction, n, at)
}

/// `p_2m(x; omega_alpha)` in the requested form.
pub fn p2m_eval(
    lattice: &PeriodLattice,
    x: &Paravector<f64>,
    alpha: usize,
    form: QuasiForm,
    cfg: EvalConfig,
) -> Result<SeriesValue<f64>> {
    ZetaFunction::new(lattice.clone(), cfg)?.quasi_polynomial(x, alpha, form)
}

/// Complex-coefficient `zeta_N`, used by the complexified constructions.
pub fn zeta_eval_complex(
    lattice: &PeriodLattice,
    x: &Paravector<Complex64>,
    cfg: EvalConfig,
) -> Result<SeriesValue<Complex64>> {
    ZetaFunction::new(lattice.clone(), cfg)?.value(x)
}

#[cfg(test)]
mod tests;
