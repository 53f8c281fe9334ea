//! The classical Weierstrass zeta function in the complex plane, coded
//! independently of the Clifford summation (the `m = 0` ground truth).
//!
//! Two routes are offered. [`weierstrass_zeta_c`] is the truncated lattice sum
//! of `1/(z-w) + 1/w + z/w^2`, walked row by row in complex arithmetic.
//! [`weierstrass_zeta_exact`] uses the `q`-series of the zeta function after
//! reducing the argument into the fundamental parallelogram; it converges
//! geometrically and carries no truncation tail.
//!
//! The plane is identified with the `m = 0` paravectors by
//! `x_0 + x_1 e_1 <-> x_0 + i x_1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clifford::Paravector;
use crate::error::{Error, Result};
use crate::lattice::PeriodLattice;
use crate::zeta::{EvalConfig, ZetaFunction};

/// Half-periods `w1, w2` of the lattice `2 Z w1 + 2 Z w2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexLattice {
    w1: Complex64,
    w2: Complex64,
}

impl ComplexLattice {
    pub fn new(w1: Complex64, w2: Complex64) -> Result<Self> {
        if w1.norm() == 0.0 || w2.norm() == 0.0 {
            return Err(Error::InvalidLattice("zero half-period".into()));
        }
        let ratio = w2 / w1;
        if !(ratio.im.abs() > 1e-12 * ratio.norm()) {
            return Err(Error::InvalidLattice("half-periods have a real ratio".into()));
        }
        Ok(Self { w1, w2 })
    }

    /// `w1 = 1`, `w2 = i`.
    pub fn square() -> Self {
        Self {
            w1: Complex64::new(1.0, 0.0),
            w2: Complex64::new(0.0, 1.0),
        }
    }

    /// The image of an `m = 0` period lattice under `e_1 -> i`.
    pub fn from_lattice(lattice: &PeriodLattice) -> Result<Self> {
        if lattice.m() != 0 || lattice.rank() != 2 {
            return Err(Error::InvalidArgument(
                "the classical oracle needs an m = 0 lattice with two half-periods".into(),
            ));
        }
        Self::new(embed(&lattice.omegas()[0])?, embed(&lattice.omegas()[1])?)
    }

    pub fn w1(&self) -> Complex64 {
        self.w1
    }

    pub fn w2(&self) -> Complex64 {
        self.w2
    }

    /// `2 a w1 + 2 b w2`.
    pub fn period(&self, a: i64, b: i64) -> Complex64 {
        (self.w1 * a as f64 + self.w2 * b as f64) * 2.0
    }

    /// Real coordinates `(s, t)` with `z = 2 s w1 + 2 t w2`.
    fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let (a, b) = (2.0 * self.w1, 2.0 * self.w2);
        let det = a.re * b.im - a.im * b.re;
        let s = (z.re * b.im - z.im * b.re) / det;
        let t = (a.re * z.im - a.im * z.re) / det;
        (s, t)
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        let (s, t) = self.coordinates(z);
        let (a0, b0) = (s.floor() as i64, t.floor() as i64);
        let mut best = f64::INFINITY;
        for a in a0 - 1..=a0 + 2 {
            for b in b0 - 1..=b0 + 2 {
                best = best.min((z - self.period(a, b)).norm());
            }
        }
        best
    }

    fn shortest(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in -2..=2i64 {
            for b in -2..=2i64 {
                if a != 0 || b != 0 {
                    best = best.min(self.period(a, b).norm());
                }
            }
        }
        best
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        if self.distance_to_lattice(z) <= 1e-9 * self.shortest() {
            return Err(Error::Pole {
                point: vec![z.re, z.im],
                detail: "argument is a lattice point of the classical lattice".into(),
            });
        }
        Ok(())
    }
}

/// `x_0 + x_1 e_1 -> x_0 + i x_1`.
pub fn embed(x: &Paravector<f64>) -> Result<Complex64> {
    if x.m() != 0 {
        return Err(Error::SignatureMismatch { left: x.m(), right: 0 });
    }
    Ok(Complex64::new(*x.coord(0), *x.coord(1)))
}

/// Inverse of [`embed`].
pub fn unembed(z: Complex64) -> Paravector<f64> {
    Paravector::from_coords(0, &[z.re, z.im]).expect("two coordinates")
}

/// A truncated classical lattice sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub radius: u32,
    /// Size of the omitted `|a|, |b| > radius` part, from its leading term.
    pub tail_bound: f64,
}

/// `1/z + sum' [1/(z-w) + 1/w + z/w^2]` over `w = 2 a w1 + 2 b w2` with
/// `max(|a|, |b|) <= radius`, summed row by row.
pub fn weierstrass_zeta_c(lattice: &ComplexLattice, z: Complex64, radius: u32) -> Result<OracleValue> {
    lattice.check_pole(z)?;
    let r = radius as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for b in -r..=r {
        let mut row = Complex64::new(0.0, 0.0);
        for a in -r..=r {
            if a == 0 && b == 0 {
                continue;
            }
            let w = lattice.period(a, b);
            let inv = w.inv();
            row += (z - w).inv() + inv + z * inv * inv;
        }
        acc += row;
    }
    acc += z.inv();
    // the paired tail starts at z^3 sum_{|w|>R} w^-4; a shell of index radius
    // k has 8k points of modulus at least k * shortest / 2
    let tail_bound = if radius == 0 {
        f64::INFINITY
    } else {
        let d = lattice.shortest() / 2.0;
        2.0 * z.norm().powi(3) * 8.0 / d.powi(4) / (2.0 * (radius as f64).powi(2))
    };
    Ok(OracleValue {
        value: acc,
        radius,
        tail_bound,
    })
}

/// Nome data for a lattice normalised so that `Im(w2 / w1) > 0`.
struct Nome {
    w1: Complex64,
    w2: Complex64,
    tau: Complex64,
    eta1: Complex64,
    eta2: Complex64,
}

impl Nome {
    fn new(lattice: &ComplexLattice) -> Self {
        let w1 = lattice.w1;
        let mut w2 = lattice.w2;
        if (w2 / w1).im < 0.0 {
            w2 = -w2;
        }
        let tau = w2 / w1;
        let q2 = (Complex64::i() * 2.0 * PI * tau).exp();
        // E_2(tau) = 1 - 24 sum n q^2n / (1 - q^2n)
        let mut e2 = Complex64::new(1.0, 0.0);
        let mut qn = q2;
        for n in 1..10_000 {
            let term = qn * n as f64 / (Complex64::new(1.0, 0.0) - qn) * 24.0;
            e2 -= term;
            if term.norm() < 1e-18 * e2.norm() {
                break;
            }
            qn *= q2;
        }
        let eta1 = e2 * PI * PI / (12.0 * w1);
        // Legendre: eta1 w2 - eta2 w1 = i pi / 2
        let eta2 = (eta1 * w2 - Complex64::i() * PI / 2.0) / w1;
        Self {
            w1,
            w2,
            tau,
            eta1,
            eta2,
        }
    }
}

/// The Weierstrass zeta function of the lattice, from its `q`-series.
pub fn weierstrass_zeta_exact(lattice: &ComplexLattice, z: Complex64) -> Result<Complex64> {
    lattice.check_pole(z)?;
    let nome = Nome::new(lattice);
    let normalised = ComplexLattice {
        w1: nome.w1,
        w2: nome.w2,
    };
    let (s, t) = normalised.coordinates(z);
    let (a, b) = (s.round(), t.round());
    let z0 = z - normalised.period(a as i64, b as i64);
    let one = Complex64::new(1.0, 0.0);
    let v = z0 * PI / (2.0 * nome.w1);
    let q2 = (Complex64::i() * 2.0 * PI * nome.tau).exp();
    let mut series = v.cos() / v.sin();
    let mut qn = q2;
    for n in 1..10_000 {
        series += qn / (one - qn) * (v * 2.0 * n as f64).sin() * 4.0;
        // sin vanishes at some n, so stop on a bound rather than the term itself
        let bound = 4.0 * qn.norm() / (1.0 - qn.norm()) * (2.0 * n as f64 * v.im.abs()).exp();
        if bound < 1e-18 * series.norm().max(1.0) {
            break;
        }
        qn *= q2;
    }
    let zeta0 = nome.eta1 * z0 / nome.w1 + series * PI / (2.0 * nome.w1);
    Ok(zeta0 + nome.eta1 * (2.0 * a) + nome.eta2 * (2.0 * b))
}

/// `zeta(w1)`, the first quasi-period constant.
pub fn eta1(lattice: &ComplexLattice) -> Complex64 {
    Nome::new(lattice).eta1
}

/// One sample of [`compare_m0`].
#[derive(Debug, Clone, PartialEq)]
pub struct M0Sample {
    pub point: Paravector<f64>,
    pub clifford: Complex64,
    /// Classical lattice sum truncated at the same radius.
    pub oracle: Complex64,
    pub exact: Complex64,
    /// `|clifford - oracle|`.
    pub matched: f64,
    /// `|clifford - exact|`.
    pub converged: f64,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct M0Comparison {
    pub radius: u32,
    pub samples: Vec<M0Sample>,
}

impl M0Comparison {
    pub fn max_matched(&self) -> f64 {
        self.samples.iter().map(|s| s.matched).fold(0.0, f64::max)
    }

    pub fn max_converged(&self) -> f64 {
        self.samples.iter().map(|s| s.converged).fold(0.0, f64::max)
    }
}

/// Compares `zeta_2` of an `m = 0` lattice against the classical function at
/// each sample, both at the truncation radius of `cfg` and against the
/// converged value.
pub fn compare_m0(lattice: &PeriodLattice, samples: &[Paravector<f64>], cfg: EvalConfig) -> Result<M0Comparison> {
    let classical = ComplexLattice::from_lattice(lattice)?;
    let zeta = ZetaFunction::new(lattice.clone(), cfg)?;
    let radius = cfg.max_radius;
    let mut out = Vec::with_capacity(samples.len());
    for x in samples {
        let v = zeta.value(x)?;
        let clifford = Complex64::new(*v.value.coeff(0), *v.value.coeff(1));
        let z = embed(x)?;
        let oracle = weierstrass_zeta_c(&classical, z, radius)?.value;
        let exact = weierstrass_zeta_exact(&classical, z)?;
        out.push(M0Sample {
            point: x.clone(),
            clifford,
            oracle,
            exact,
            matched: (clifford - oracle).norm(),
            converged: (clifford - exact).norm(),
            tail_estimate: v.tail_estimate,
        });
    }
    Ok(M0Comparison { radius, samples: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn skew() -> ComplexLattice {
        ComplexLattice::new(c(1.0, 0.2), c(0.3, 1.1)).unwrap()
    }

    #[test]
    fn odd() {
        for l in [ComplexLattice::square(), skew()] {
            for z in [c(0.3, 0.1), c(-0.7, 0.45), c(1.3, -0.9)] {
                let a = weierstrass_zeta_exact(&l, z).unwrap();
                let b = weierstrass_zeta_exact(&l, -z).unwrap();
                assert!((a + b).norm() < 1e-12, "{a} {b}");
                let a = weierstrass_zeta_c(&l, z, 20).unwrap().value;
                let b = weierstrass_zeta_c(&l, -z, 20).unwrap().value;
                assert!((a + b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn half_period_sum_relation() {
        for l in [ComplexLattice::square(), skew()] {
            let f = |z| weierstrass_zeta_exact(&l, z).unwrap();
            let d = f(l.w1()) + f(l.w2()) - f(l.w1() + l.w2());
            assert!(d.norm() < 1e-10, "{d}");
        }
    }

    #[test]
    fn quasi_periodicity() {
        for l in [ComplexLattice::square(), skew()] {
            let f = |z| weierstrass_zeta_exact(&l, z).unwrap();
            for z in [c(0.2, 0.3), c(-0.4, 0.1), c(0.9, 0.8)] {
                for w in [l.w1(), l.w2()] {
                    let d = f(z + 2.0 * w) - f(z) - 2.0 * f(w);
                    assert!(d.norm() < 1e-10, "{d}");
                }
            }
        }
    }

    #[test]
    fn square_lattice_closed_forms() {
        let l = ComplexLattice::square();
        // Legendre's relation with zeta(i z) = -i zeta(z) forces zeta(1) = pi/4
        assert!((eta1(&l) - c(PI / 4.0, 0.0)).norm() < 1e-14);
        let half = weierstrass_zeta_exact(&l, c(0.5, 0.0)).unwrap();
        assert!(half.im.abs() < 1e-10);
        // frozen from a 30-digit evaluation of the same series
        assert!((half.re - 1.975_250_808_922_440_1).abs() < 1e-14, "{half}");
        let rot = weierstrass_zeta_exact(&l, c(0.0, 0.5)).unwrap();
        assert!((rot + Complex64::i() * half).norm() < 1e-12, "{rot} {half}");
    }

    #[test]
    fn laurent_leading_coefficient() {
        // zeta(z) = 1/z - G4 z^3 - ..., and G4(i) = Gamma(1/4)^8 / (960 pi^2)
        // for the lattice Z + iZ; ours is twice as large, so G4 / 16
        let gamma_quarter: f64 = 3.625_609_908_221_908_3;
        let g4 = gamma_quarter.powi(8) / (960.0 * PI * PI) / 16.0;
        let l = ComplexLattice::square();
        let z = c(0.02, 0.01);
        let f = weierstrass_zeta_exact(&l, z).unwrap();
        let est = -(f - z.inv()) / z.powi(3);
        assert!((est - c(g4, 0.0)).norm() < 1e-3 * g4, "{est} vs {g4}");
    }

    #[test]
    fn lattice_sum_converges_to_q_series_like_inverse_square() {
        let l = ComplexLattice::square();
        let z = c(0.4, 0.3);
        let exact = weierstrass_zeta_exact(&l, z).unwrap();
        let e20 = (weierstrass_zeta_c(&l, z, 20).unwrap().value - exact).norm();
        let e40 = (weierstrass_zeta_c(&l, z, 40).unwrap().value - exact).norm();
        let ratio = e40 / e20;
        assert!((ratio - 0.25).abs() < 0.03, "ratio {ratio}");
        let v = weierstrass_zeta_c(&l, z, 40).unwrap();
        assert!(e40 <= v.tail_bound, "{e40} > {}", v.tail_bound);
    }

    #[test]
    fn poles_are_rejected() {
        let l = skew();
        for z in [c(0.0, 0.0), l.period(1, -1), l.period(2, 3)] {
            assert!(matches!(weierstrass_zeta_exact(&l, z), Err(Error::Pole { .. })));
            assert!(matches!(weierstrass_zeta_c(&l, z, 5), Err(Error::Pole { .. })));
        }
    }

    #[test]
    fn real_ratio_rejected() {
        assert!(ComplexLattice::new(c(1.0, 0.0), c(2.0, 0.0)).is_err());
        assert!(ComplexLattice::new(c(0.0, 0.0), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn clifford_sum_matches_at_equal_truncation() {
        let lattice = PeriodLattice::m0_square();
        let samples = lattice.sample_points(5, 7);
        let cmp = compare_m0(&lattice, &samples, EvalConfig::with_radius(30)).unwrap();
        assert!(cmp.max_matched() < 1e-12, "{}", cmp.max_matched());
        for s in &cmp.samples {
            assert!(s.converged <= s.tail_estimate, "{} > {}", s.converged, s.tail_estimate);
        }
    }

    #[test]
    fn conjugation_symmetry_of_difference() {
        let lattice = PeriodLattice::m0_square();
        let x = Paravector::from_coords(0, &[0.3, 0.2]).unwrap();
        let y = Paravector::from_coords(0, &[0.3, -0.2]).unwrap();
        let cmp = compare_m0(&lattice, &[x, y], EvalConfig::with_radius(10)).unwrap();
        let d0 = cmp.samples[0].clifford - cmp.samples[0].exact;
        let d1 = cmp.samples[1].clifford - cmp.samples[1].exact;
        assert!((d0 - d1.conj()).norm() < 1e-12);
    }

    #[test]
    fn shared_singular_set() {
        let lattice = PeriodLattice::m0_square();
        let p = Paravector::from_coords(0, &[2.0, 2.0]).unwrap();
        assert!(matches!(
            compare_m0(&lattice, &[p], EvalConfig::with_radius(5)),
            Err(Error::Pole { .. })
        ));
        let classical = ComplexLattice::from_lattice(&lattice).unwrap();
        assert!(weierstrass_zeta_c(&classical, c(2.0, 2.0), 5).is_err());
    }
}
