//! Polynomials in the paravector coordinates with paravector coefficients,
//! and the per-shell moment sums of the correction terms.

use std::collections::BTreeMap;

use crate::clifford::{Scalar, MAX_PARA};
use crate::lattice::{for_each_representative, PeriodLattice};

pub(crate) type Exps = [u8; MAX_PARA];
type Coef = [f64; MAX_PARA];

/// `sum_e c_e x^e` with `c_e` a paravector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoordPoly {
    dim: usize,
    terms: Vec<(Exps, Coef)>,
}

impl CoordPoly {
    fn from_map(dim: usize, map: BTreeMap<Exps, Coef>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| c.iter().any(|v| *v != 0.0))
            .collect();
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&k| k as usize).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `x` (coordinates `x[..dim]`), as paravector coordinates.
    pub fn eval<T: Scalar + Copy>(&self, x: &[T]) -> [T; MAX_PARA] {
        let d = self.dim;
        let deg = self.degree();
        let mut pows = [[T::one(); 8]; MAX_PARA];
        for a in 0..d {
            for p in 1..=deg.min(7) {
                pows[a][p] = pows[a][p - 1] * x[a];
            }
        }
        let mut out = [T::zero(); MAX_PARA];
        for (e, c) in &self.terms {
            let mut mono = T::one();
            for a in 0..d {
                if e[a] > 0 {
                    mono = mono * pows[a][e[a] as usize];
                }
            }
            for b in 0..d {
                if c[b] != 0.0 {
                    out[b] = out[b] + mono * T::from_f64(c[b]);
                }
            }
        }
        out
    }

    /// `(v | grad)^n P` at `y`, computed as `n!` times the `t^n` coefficient of `P(y + t v)`.
    pub fn directional<T: Scalar + Copy>(&self, y: &[T], v: &[T], n: usize) -> [T; MAX_PARA] {
        let d = self.dim;
        let mut out = [T::zero(); MAX_PARA];
        if n > self.degree() {
            return out;
        }
        let nf = T::from_f64(factorial(n));
        for (e, c) in &self.terms {
            // univariate product, truncated at t^n
            let mut acc = vec![T::zero(); n + 1];
            acc[0] = T::one();
            for a in 0..d {
                for _ in 0..e[a] {
                    for k in (0..=n).rev() {
                        let lower = if k > 0 { acc[k - 1] * v[a] } else { T::zero() };
                        acc[k] = acc[k] * y[a] + lower;
                    }
                }
            }
            let coeff = acc[n] * nf;
            for b in 0..d {
                if c[b] != 0.0 {
                    out[b] = out[b] + coeff * T::from_f64(c[b]);
                }
            }
        }
        out
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    std::array::from_fn(|i| a[i] + b[i])
}

/// Exponent vectors of total degree `deg` in `d` variables (lexicographic),
/// with their multinomial coefficients.
pub(crate) fn monomials(d: usize, deg: usize) -> Vec<(Exps, f64)> {
    fn rec(d: usize, a: usize, left: usize, cur: &mut Exps, out: &mut Vec<Exps>) {
        if a + 1 == d {
            cur[a] = left as u8;
            out.push(*cur);
            cur[a] = 0;
            return;
        }
        for k in (0..=left).rev() {
            cur[a] = k as u8;
            rec(d, a + 1, left - k, cur, out);
        }
        cur[a] = 0;
    }
    let mut list = Vec::new();
    rec(d, 0, deg, &mut [0; MAX_PARA], &mut list);
    list.into_iter()
        .map(|e| {
            let denom: f64 = e.iter().map(|&k| factorial(k as usize)).product();
            (e, factorial(deg) / denom)
        })
        .collect()
}

/// Coefficients of `alpha_n(s, q)` with `(z v)^n = alpha_n (z v) + beta_n`,
/// keyed by `(i, j)` for the monomial `s^i q^j`.
fn alpha_coefficients(n: usize) -> BTreeMap<(usize, usize), f64> {
    // alpha_{k+1} = 2 s alpha_k + beta_k, beta_{k+1} = -q alpha_k
    let mut alpha: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut beta: BTreeMap<(usize, usize), f64> = BTreeMap::from([((0, 0), 1.0)]);
    for _ in 0..n {
        let mut next_a = BTreeMap::new();
        for (&(i, j), &c) in &alpha {
            *next_a.entry((i + 1, j)).or_insert(0.0) += 2.0 * c;
        }
        for (&k, &c) in &beta {
            *next_a.entry(k).or_insert(0.0) += c;
        }
        let next_b = alpha.iter().map(|(&(i, j), &c)| ((i, j + 1), -c)).collect();
        alpha = next_a;
        beta = next_b;
    }
    alpha.retain(|_, c| *c != 0.0);
    alpha
}

#[derive(Debug, Clone)]
struct PlanTerm {
    i: usize,
    j: usize,
    coeff: f64,
}

/// Which moments to accumulate so that a shell's correction polynomial
/// `sum_w sum_{mu in mus} (w^-1 x)^mu w^-1` can be assembled.
///
/// With `y = w^-1`, `s = <x, conj y>`, `rho = |y|^2` and `X = |x|^2`:
/// `(y x)^mu y = alpha_{mu+1}(s, rho X) y - rho alpha_mu(s, rho X) conj(x)`.
#[derive(Debug, Clone)]
pub(crate) struct MomentPlan {
    dim: usize,
    y_terms: Vec<PlanTerm>,
    xbar_terms: Vec<PlanTerm>,
    monos: Vec<Vec<(Exps, f64)>>,
}

impl MomentPlan {
    /// `mus` must hold odd exponents only (even ones cancel over `+-w`).
    pub(crate) fn new(dim: usize, mus: &[usize]) -> Self {
        debug_assert!(mus.iter().all(|mu| mu % 2 == 1));
        let mut y: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut xb: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &mu in mus {
            for ((i, j), c) in alpha_coefficients(mu + 1) {
                *y.entry((i, j)).or_insert(0.0) += c;
            }
            for ((i, j), c) in alpha_coefficients(mu) {
                *xb.entry((i, j)).or_insert(0.0) += c;
            }
        }
        let to_terms = |map: BTreeMap<(usize, usize), f64>| -> Vec<PlanTerm> {
            map.into_iter()
                .map(|((i, j), coeff)| PlanTerm { i, j, coeff })
                .collect()
        };
        let y_terms = to_terms(y);
        let xbar_terms = to_terms(xb);
        let max_i = y_terms
            .iter()
            .chain(&xbar_terms)
            .map(|t| t.i)
            .max()
            .unwrap_or(0);
        let monos = (0..=max_i).map(|deg| monomials(dim, deg)).collect();
        Self {
            dim,
            y_terms,
            xbar_terms,
            monos,
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.y_terms.is_empty() && self.xbar_terms.is_empty()
    }

    /// `sum_{w in shell r} sum_mu (w^-1 x)^mu w^-1` as a polynomial in `x`.
    pub(crate) fn shell_poly(&self, lattice: &PeriodLattice, r: u32) -> CoordPoly {
        let d = self.dim;
        if self.is_empty() || r == 0 {
            return CoordPoly {
                dim: d,
                terms: Vec::new(),
            };
        }
        let mut acc_y: Vec<Vec<Coef>> = self
            .y_terms
            .iter()
            .map(|t| vec![[0.0; MAX_PARA]; self.monos[t.i].len()])
            .collect();
        let mut acc_x: Vec<Vec<f64>> = self
            .xbar_terms
            .iter()
            .map(|t| vec![0.0; self.monos[t.i].len()])
            .collect();
        let mut w = [0.0; MAX_PARA];
        let mut mono_vals: Vec<Vec<f64>> = self.monos.iter().map(|l| vec![0.0; l.len()]).collect();
        let max_j = self
            .y_terms
            .iter()
            .map(|t| t.j)
            .chain(self.xbar_terms.iter().map(|t| t.j + 1))
            .max()
            .unwrap_or(0);
        for_each_representative(lattice.rank(), r, |k| {
            lattice.point_coords(k, &mut w);
            let n2: f64 = w[..d].iter().map(|c| c * c).sum();
            let rho = 1.0 / n2;
            // y = conj(w) / |w|^2, and conj(y) = w / |w|^2 carries the s-contraction
            let mut y = [0.0; MAX_PARA];
            let mut c = [0.0; MAX_PARA];
            for a in 0..d {
                c[a] = w[a] * rho;
                y[a] = if a == 0 { c[a] } else { -c[a] };
            }
            let mut rho_pow = [1.0; 8];
            for p in 1..=max_j.min(7) {
                rho_pow[p] = rho_pow[p - 1] * rho;
            }
            for (deg, list) in self.monos.iter().enumerate() {
                for (slot, (e, mult)) in mono_vals[deg].iter_mut().zip(list) {
                    let mut v = *mult;
                    for a in 0..d {
                        for _ in 0..e[a] {
                            v *= c[a];
                        }
                    }
                    *slot = v;
                }
            }
            for (t, acc) in self.y_terms.iter().zip(acc_y.iter_mut()) {
                let f = rho_pow[t.j];
                for (slot, mv) in acc.iter_mut().zip(&mono_vals[t.i]) {
                    let g = f * mv;
                    for a in 0..d {
                        slot[a] += g * y[a];
                    }
                }
            }
            for (t, acc) in self.xbar_terms.iter().zip(acc_x.iter_mut()) {
                let f = rho_pow[t.j + 1];
                for (slot, mv) in acc.iter_mut().zip(&mono_vals[t.i]) {
                    *slot += f * mv;
                }
            }
        });

        // assemble 2 * [sum_Y c X^j A(x) - sum_Xbar c X^j B(x) conj(x)]
        let mut out: BTreeMap<Exps, Coef> = BTreeMap::new();
        for (t, acc) in self.y_terms.iter().zip(&acc_y) {
            for (ex, qc) in x_norm_power(d, t.j) {
                for ((e, _), a_coef) in self.monos[t.i].iter().zip(acc) {
                    let slot = out.entry(add_exps(&ex, e)).or_insert([0.0; MAX_PARA]);
                    for b in 0..d {
                        slot[b] += 2.0 * t.coeff * qc * a_coef[b];
                    }
                }
            }
        }
        for (t, acc) in self.xbar_terms.iter().zip(&acc_x) {
            for (ex, qc) in x_norm_power(d, t.j) {
                for ((e, _), b_coef) in self.monos[t.i].iter().zip(acc) {
                    let base = add_exps(&ex, e);
                    for b in 0..d {
                        let mut key = base;
                        key[b] += 1;
                        let sign = if b == 0 { 1.0 } else { -1.0 };
                        let slot = out.entry(key).or_insert([0.0; MAX_PARA]);
                        slot[b] -= 2.0 * t.coeff * qc * b_coef * sign;
                    }
                }
            }
        }
        CoordPoly::from_map(d, out)
    }
}

/// `(x_0^2 + ... + x_{d-1}^2)^j` as exponent/coefficient pairs.
fn x_norm_power(d: usize, j: usize) -> Vec<(Exps, f64)> {
    // multinomial over squares: exponents are twice those of degree-j monomials
    monomials(d, j)
        .into_iter()
        .map(|(e, c)| (std::array::from_fn(|a| 2 * e[a]), c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_recursion_matches_chebyshev_form() {
        // alpha_3 = 4 s^2 - q, alpha_4 = 8 s^3 - 4 s q
        let a3 = alpha_coefficients(3);
        assert_eq!(a3, BTreeMap::from([((0, 1), -1.0), ((2, 0), 4.0)]));
        let a4 = alpha_coefficients(4);
        assert_eq!(a4, BTreeMap::from([((1, 1), -4.0), ((3, 0), 8.0)]));
        assert_eq!(alpha_coefficients(1), BTreeMap::from([((0, 0), 1.0)]));
    }

    #[test]
    fn monomial_counts_and_weights() {
        let m = monomials(4, 3);
        assert_eq!(m.len(), 20);
        let total: f64 = m.iter().map(|(_, c)| c).sum();
        assert_eq!(total, 64.0);
        assert_eq!(monomials(2, 0), vec![([0; MAX_PARA], 1.0)]);
    }

    #[test]
    fn directional_derivative_of_cubic() {
        // P = x0^2 x1 in slot 0; (v|grad)^2 P = 2 v0^2 x1 + 4 v0 v1 x0
        let mut map = BTreeMap::new();
        let mut e = [0u8; MAX_PARA];
        e[0] = 2;
        e[1] = 1;
        let mut c = [0.0; MAX_PARA];
        c[0] = 1.0;
        map.insert(e, c);
        let p = CoordPoly::from_map(2, map);
        let y = [0.5, -1.5];
        let v = [2.0, 3.0];
        let got = p.directional(&y, &v, 2)[0];
        let want = 2.0 * 4.0 * -1.5 + 4.0 * 2.0 * 3.0 * 0.5;
        assert!((got - want).abs() < 1e-12);
        assert_eq!(p.directional(&y, &v, 4)[0], 0.0);
        assert!((p.directional(&y, &v, 0)[0] - p.eval(&y)[0]).abs() < 1e-15);
    }
}
