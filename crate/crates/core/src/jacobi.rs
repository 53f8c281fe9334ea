//! The Jacobi elliptic Cliffordian functions
//!
//! ```text
//! C   = prod_{j=1}^{2m+2} (I - E_j) zeta
//! S_i = (I + E_i) prod_{j != i} (I - E_j) zeta
//! ```
//!
//! together with their pole and zero catalogs, the periodic constructions
//! built from translates of `zeta`, and the Laurent data at the origin.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::clifford::{Multivector, Paravector, ScalarField};
use crate::error::{Error, Result};
use crate::function::{Evaluate, Memo, SeriesValue, ShiftSum};
use crate::lattice::PeriodLattice;
use crate::operators::{apply, apply_at_radii, difference_word, expand, Factor, OperatorExpr, Shift, TranslationWord};
use crate::zeta::poly::factorial;
use crate::zeta::ZetaFunction;

/// `C` or `S_i` (`i` 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JacobiKind {
    C,
    S(usize),
}

impl JacobiKind {
    /// `C, S_1, ..., S_n`.
    pub fn all(n: usize) -> Vec<Self> {
        std::iter::once(Self::C).chain((1..=n).map(Self::S)).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        match *self {
            Self::S(i) if i == 0 || i > n => Err(Error::InvalidArgument(format!(
                "S_{i} does not exist for {n} half-periods"
            ))),
            _ => Ok(()),
        }
    }

    /// The defining operator product on `n` half-periods.
    pub fn expr(&self, n: usize) -> Result<OperatorExpr> {
        self.check(n)?;
        Ok(match *self {
            Self::C => OperatorExpr::from_indices(&(1..=n).collect::<Vec<_>>(), &[]),
            Self::S(i) => {
                let minus: Vec<usize> = (1..=n).filter(|&j| j != i).collect();
                let mut e = OperatorExpr::new(vec![Factor::plus(i)]);
                e.factors.extend(minus.iter().map(|&j| Factor::minus(j)));
                e
            }
        })
    }
}

impl fmt::Display for JacobiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::C => write!(f, "C"),
            Self::S(i) => write!(f, "S{i}"),
        }
    }
}

impl FromStr for JacobiKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "C" {
            return Ok(Self::C);
        }
        s.strip_prefix('S')
            .and_then(|i| i.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .map(Self::S)
            .ok_or_else(|| Error::Parse(format!("unknown Jacobi function {s:?}; expected C or S<i>")))
    }
}

/// Residue of `kind` at the vertex `omega_{j_1} + ... + omega_{j_k}` given by
/// the distinct indices in `subset`.
pub fn residue_sign(kind: JacobiKind, subset: &[usize]) -> i32 {
    let k = subset.len() as i32;
    let parity = match kind {
        JacobiKind::C => k,
        JacobiKind::S(i) if subset.contains(&i) => k - 1,
        JacobiKind::S(_) => k,
    };
    if parity % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All subsets of `1..=n`, by size then lexicographically.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (1..=n).filter(|j| mask & (1 << (j - 1)) != 0).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The expanded word written directly from the closed sign rule:
/// `sum_J residue_sign(J) E_J` over all subsets `J`.
pub fn sign_formula_word(kind: JacobiKind, n: usize) -> TranslationWord {
    TranslationWord::from_terms(
        subsets(n)
            .into_iter()
            .map(|s| (residue_sign(kind, &s) as i64, Shift::from_indices(&s))),
    )
}

/// The poles whose residues fix all others through the (hidden) periods:
/// `{0, omega_2, ..., omega_n}` for `C`, `{0} + {omega_j : j != i}` for `S_i`.
pub fn determining_subsets(kind: JacobiKind, n: usize) -> Vec<Vec<usize>> {
    let skip = match kind {
        JacobiKind::C => 1,
        JacobiKind::S(i) => i,
    };
    std::iter::once(Vec::new())
        .chain((1..=n).filter(|&j| j != skip).map(|j| vec![j]))
        .collect()
}

/// One vertex of the pole hyperparallelogram.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleRecord {
    pub subset: Vec<usize>,
    pub location: Paravector<f64>,
    pub residue_sign: i32,
    pub determining: bool,
}

/// `x -> sum c zeta(x + shift)` for a translation word on the half-periods of
/// the lattice of `zeta`.
#[derive(Clone)]
pub struct WordFunction {
    label: String,
    word: TranslationWord,
    zeta: ZetaFunction,
    evaluator: Arc<dyn Evaluate<f64>>,
    periods: Vec<Paravector<f64>>,
}

impl fmt::Debug for WordFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordFunction")
            .field("label", &self.label)
            .field("word", &self.word.to_string())
            .finish()
    }
}

impl WordFunction {
    /// `evaluator` must compute the same function as `zeta` (for instance a
    /// memoised copy); it defaults to `zeta` itself.
    pub fn new(
        label: impl Into<String>,
        word: TranslationWord,
        zeta: &ZetaFunction,
        evaluator: Option<Arc<dyn Evaluate<f64>>>,
    ) -> Result<Self> {
        let periods = zeta.lattice().omegas().to_vec();
        if word.max_index() > periods.len() {
            return Err(Error::InvalidArgument(format!(
                "word {word} refers to E{} but the lattice has {} half-periods",
                word.max_index(),
                periods.len()
            )));
        }
        Ok(Self {
            label: label.into(),
            word,
            zeta: zeta.clone(),
            evaluator: evaluator.unwrap_or_else(|| Arc::new(zeta.clone())),
            periods,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn word(&self) -> &TranslationWord {
        &self.word
    }

    pub fn zeta(&self) -> &ZetaFunction {
        &self.zeta
    }

    pub fn periods(&self) -> &[Paravector<f64>] {
        &self.periods
    }

    /// The same word without its identity term: `F - zeta` when the identity
    /// coefficient is one.
    pub fn regular_part(&self) -> Self {
        let word = TranslationWord::from_terms(
            self.word
                .terms()
                .iter()
                .filter(|(_, s)| !s.is_identity())
                .cloned(),
        );
        Self {
            label: format!("{} - zeta", self.label),
            word,
            ..self.clone()
        }
    }

    /// `F(x + shift) - sign F(x + other)`, at each radius.
    pub fn relation_defect(
        &self,
        x: &Paravector<f64>,
        shift: &Shift,
        sign: i32,
        other: &Shift,
        radii: &[u32],
    ) -> Result<Vec<SeriesValue<f64>>> {
        let a = self.eval_at_radii(&(x + &shift.vector(&self.periods)?), radii)?;
        let b = self.eval_at_radii(&(x + &other.vector(&self.periods)?), radii)?;
        Ok(a.iter()
            .zip(&b)
            .map(|(a, b)| SeriesValue::combine(self.zeta.m(), [(1.0, a), (-(sign as f64), b)]))
            .collect())
    }

    /// `F(x + p) - F(x)` for a period `p`, at each radius.
    pub fn period_defect(&self, x: &Paravector<f64>, p: &Paravector<f64>, radii: &[u32]) -> Result<Vec<SeriesValue<f64>>> {
        let a = self.eval_at_radii(&(x + p), radii)?;
        let b = self.eval_at_radii(x, radii)?;
        Ok(a.iter().zip(&b).map(|(a, b)| a.sub(b)).collect())
    }
}

impl Evaluate<f64> for WordFunction {
    fn m(&self) -> usize {
        self.zeta.m()
    }

    fn eval(&self, x: &Paravector<f64>) -> Result<SeriesValue<f64>> {
        apply(&self.word, &*self.evaluator, &self.periods, x)
    }

    fn eval_at_radii(&self, x: &Paravector<f64>, radii: &[u32]) -> Result<Vec<SeriesValue<f64>>> {
        apply_at_radii(&self.word, &*self.evaluator, &self.periods, x, radii)
    }

    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        let mut best = f64::INFINITY;
        for (_, s) in self.word.terms() {
            let y = x + &s.vector(&self.periods).ok()?;
            best = best.min(self.zeta.lattice().distance_to_lattice(&y));
        }
        best.is_finite().then_some(best)
    }
}

/// `C` or `S_i` of a lattice with `N = 2m+2` half-periods.
#[derive(Debug, Clone)]
pub struct JacobiFunction {
    kind: JacobiKind,
    inner: WordFunction,
}

impl JacobiFunction {
    pub fn build(kind: JacobiKind, zeta: &ZetaFunction) -> Result<Self> {
        Self::build_with(kind, zeta, None)
    }

    /// As [`build`](Self::build), evaluating `zeta` through `evaluator`.
    pub fn build_with(kind: JacobiKind, zeta: &ZetaFunction, evaluator: Option<Arc<dyn Evaluate<f64>>>) -> Result<Self> {
        let lattice = zeta.lattice();
        let n = lattice.rank();
        if n != lattice.dim() {
            return Err(Error::InvalidArgument(format!(
                "Jacobi functions need exactly N = 2m+2 = {} half-periods; the lattice has {n}",
                lattice.dim()
            )));
        }
        let word = expand(&kind.expr(n)?);
        if word != sign_formula_word(kind, n) {
            return Err(Error::InvalidArgument(format!(
                "expansion of {kind} disagrees with its closed sign formula"
            )));
        }
        Ok(Self {
            kind,
            inner: WordFunction::new(kind.to_string(), word, zeta, evaluator)?,
        })
    }

    pub fn kind(&self) -> JacobiKind {
        self.kind
    }

    pub fn word(&self) -> &TranslationWord {
        self.inner.word()
    }

    pub fn lattice(&self) -> &PeriodLattice {
        self.inner.zeta.lattice()
    }

    pub fn zeta(&self) -> &ZetaFunction {
        &self.inner.zeta
    }

    pub fn as_word_function(&self) -> &WordFunction {
        &self.inner
    }

    pub fn rank(&self) -> usize {
        self.lattice().rank()
    }

    /// The `2^N` vertices with their residue signs.
    pub fn poles(&self) -> Vec<PoleRecord> {
        let n = self.rank();
        let determining = determining_subsets(self.kind, n);
        subsets(n)
            .into_iter()
            .map(|s| PoleRecord {
                location: Shift::from_indices(&s)
                    .vector(self.inner.periods())
                    .expect("indices within range"),
                residue_sign: residue_sign(self.kind, &s),
                determining: determining.contains(&s),
                subset: s,
            })
            .collect()
    }

    /// `phi = C - zeta` or `psi_i = S_i - zeta`, regular at the origin.
    pub fn regular_part(&self) -> WordFunction {
        self.inner.regular_part()
    }

    pub fn period_defect(&self, x: &Paravector<f64>, p: &Paravector<f64>, radii: &[u32]) -> Result<Vec<SeriesValue<f64>>> {
        self.inner.period_defect(x, p, radii)
    }
}

impl Evaluate<f64> for JacobiFunction {
    fn m(&self) -> usize {
        self.inner.m()
    }
    fn eval(&self, x: &Paravector<f64>) -> Result<SeriesValue<f64>> {
        self.inner.eval(x)
    }
    fn eval_at_radii(&self, x: &Paravector<f64>, radii: &[u32]) -> Result<Vec<SeriesValue<f64>>> {
        self.inner.eval_at_radii(x, radii)
    }
    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        self.inner.pole_distance(x)
    }
}

/// `zeta` of one lattice with a shared evaluation cache, and the Jacobi
/// functions built on it. All members evaluate `zeta` at the same translates.
#[derive(Clone)]
pub struct JacobiFamily {
    zeta: ZetaFunction,
    memo: Arc<Memo<ZetaFunction>>,
}

impl JacobiFamily {
    pub fn new(zeta: ZetaFunction) -> Self {
        Self {
            memo: Arc::new(Memo::new(zeta.clone())),
            zeta,
        }
    }

    pub fn zeta(&self) -> &ZetaFunction {
        &self.zeta
    }

    pub fn evaluator(&self) -> Arc<dyn Evaluate<f64>> {
        self.memo.clone()
    }

    pub fn function(&self, kind: JacobiKind) -> Result<JacobiFunction> {
        JacobiFunction::build_with(kind, &self.zeta, Some(self.evaluator()))
    }

    pub fn functions(&self) -> Result<Vec<JacobiFunction>> {
        JacobiKind::all(self.zeta.lattice().rank())
            .into_iter()
            .map(|k| self.function(k))
            .collect()
    }

    pub fn word_function(&self, label: impl Into<String>, word: TranslationWord) -> Result<WordFunction> {
        WordFunction::new(label, word, &self.zeta, Some(self.evaluator()))
    }
}

/// Step sizes for residue extraction along the scalar axis.
pub const RESIDUE_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Largest accepted disagreement between the two Richardson values.
pub const RESIDUE_SPREAD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueEstimate {
    /// Scalar part of the extrapolated limit.
    pub value: f64,
    /// `|R(eps_2, eps_3) - R(eps_1, eps_2)|` for the two-term Richardson values.
    pub spread: f64,
    /// Largest non-scalar component of the extrapolated limit.
    pub off_scalar: f64,
    pub converged: bool,
}

/// Limit of `eps f(a + eps)` as `eps -> 0` along the scalar axis, by
/// repeated Richardson extrapolation over [`RESIDUE_STEPS`].
pub fn estimate_residue(f: &dyn Evaluate<f64>, a: &Paravector<f64>) -> Result<ResidueEstimate> {
    let g: Vec<Multivector<f64>> = RESIDUE_STEPS
        .iter()
        .map(|&eps| {
            let x = a + &Paravector::scalar(a.m(), eps);
            Ok(f.eval(&x)?.value.scale(&eps))
        })
        .collect::<Result<_>>()?;
    // steps halve, so R = 2 g(eps/2) - g(eps) removes the O(eps) term and
    // (4 R_2 - R_1) / 3 the O(eps^2) term
    let r1 = &g[1].scale(&2.0) - &g[0];
    let r2 = &g[2].scale(&2.0) - &g[1];
    let spread = (&r2 - &r1).norm_inf();
    let limit = (&r2.scale(&4.0) - &r1).scale(&(1.0 / 3.0));
    let value = *limit.scalar_part();
    let mut rest = limit;
    rest.add_scaled(&-value, &Multivector::one(a.m()));
    Ok(ResidueEstimate {
        value,
        spread,
        off_scalar: rest.norm_inf(),
        converged: spread <= RESIDUE_SPREAD_TOL,
    })
}

/// Sum of the estimated residues over the determining poles.
pub fn residue_sum_determining(f: &JacobiFunction) -> Result<f64> {
    let mut sum = 0.0;
    for s in determining_subsets(f.kind(), f.rank()) {
        let a = Shift::from_indices(&s).vector(f.as_word_function().periods())?;
        let est = estimate_residue(f, &a)?;
        if !est.converged {
            return Err(Error::InvalidArgument(format!(
                "residue extrapolation of {} at {:?} did not settle (spread {:.3e})",
                f.kind(),
                s,
                est.spread
            )));
        }
        sum += est.value;
    }
    Ok(sum)
}

/// Certified zeros (not claimed exhaustive): `S_i` vanishes at `omega_i / 2`
/// and `omega_j + omega_i / 2`; `C` at `(omega_1 + omega_j) / 2` and
/// `3/2 omega_1 + omega_j / 2`, `j >= 2`.
pub fn zero_catalog(kind: JacobiKind, lattice: &PeriodLattice) -> Result<Vec<Paravector<f64>>> {
    let n = lattice.rank();
    if n != lattice.dim() {
        return Err(Error::InvalidArgument("zero catalog needs N = 2m+2".into()));
    }
    kind.expr(n)?;
    let w = |j: usize, c: f64| lattice.omegas()[j - 1].scale(&c);
    Ok(match kind {
        JacobiKind::S(i) => std::iter::once(w(i, 0.5))
            .chain((1..=n).filter(|&j| j != i).map(|j| &w(j, 1.0) + &w(i, 0.5)))
            .collect(),
        JacobiKind::C => (2..=n)
            .map(|j| &w(1, 0.5) + &w(j, 0.5))
            .chain((2..=n).map(|j| &w(1, 1.5) + &w(j, 0.5)))
            .collect(),
    })
}

/// `F(x + omega_lhs) = sign F(x + omega_rhs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenRelation {
    pub function: JacobiKind,
    pub lhs: Vec<usize>,
    pub sign: i32,
    pub rhs: Vec<usize>,
}

impl fmt::Display for HiddenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &[usize]| {
            if s.is_empty() {
                "x".to_string()
            } else {
                format!("x+{}", s.iter().map(|j| format!("w{j}")).collect::<Vec<_>>().join("+"))
            }
        };
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{k}({}) = {sign}{k}({})", side(&self.lhs), side(&self.rhs), k = self.function)
    }
}

fn relation(function: JacobiKind, lhs: &[usize], sign: i32, rhs: &[usize]) -> HiddenRelation {
    HiddenRelation {
        function,
        lhs: lhs.to_vec(),
        sign,
        rhs: rhs.to_vec(),
    }
}

/// The hidden periodicities of `S_1` and `S_2` for `m = 1`.
///
/// The `S_2` families are stated for `1 <= j < k <= 4`; with `j` or `k` equal
/// to 2 they collapse, through the period `omega_2`, to a single half-period
/// shift, which flips the sign. Only pairs from `{1, 3, 4}` are listed here;
/// the collapsed ones are in [`collapsed_s2_relations`].
pub fn hidden_relations() -> Vec<HiddenRelation> {
    let s1 = JacobiKind::S(1);
    let s2 = JacobiKind::S(2);
    let mut out = vec![
        relation(s1, &[2, 3], -1, &[4]),
        relation(s1, &[3, 4], -1, &[2]),
        relation(s1, &[2, 4], -1, &[3]),
        relation(s1, &[2, 3, 4], -1, &[]),
    ];
    for (j, k) in [(1, 3), (1, 4), (3, 4)] {
        out.push(relation(s2, &[j, k], 1, &[]));
    }
    for (j, k) in [(1, 3), (1, 4), (3, 4)] {
        out.push(relation(s2, &[1, j, k], -1, &[]));
    }
    out
}

/// The literal `S_2` relations with an index equal to 2. They do not hold;
/// the opposite sign does.
pub fn collapsed_s2_relations() -> Vec<HiddenRelation> {
    let s2 = JacobiKind::S(2);
    let mut out = Vec::new();
    for (j, k) in [(1, 2), (2, 3), (2, 4)] {
        out.push(relation(s2, &[j, k], 1, &[]));
    }
    out
}

/// Defect of one relation at each radius.
#[derive(Debug, Clone)]
pub struct RelationDefect {
    pub relation: HiddenRelation,
    pub values: Vec<SeriesValue<f64>>,
}

/// Evaluates each relation of [`hidden_relations`] at `x`.
pub fn hidden_periodicity_defects(family: &JacobiFamily, x: &Paravector<f64>, radii: &[u32]) -> Result<Vec<RelationDefect>> {
    relation_defects(family, &hidden_relations(), x, radii)
}

pub fn relation_defects(
    family: &JacobiFamily,
    relations: &[HiddenRelation],
    x: &Paravector<f64>,
    radii: &[u32],
) -> Result<Vec<RelationDefect>> {
    let lattice = family.zeta().lattice();
    if lattice.m() != 1 || lattice.rank() != 4 {
        return Err(Error::InvalidArgument(
            "the hidden periodicities are stated for m = 1, N = 4".into(),
        ));
    }
    relations
        .iter()
        .map(|r| {
            let f = family.function(r.function)?;
            let values = f.as_word_function().relation_defect(
                x,
                &Shift::from_indices(&r.lhs),
                r.sign,
                &Shift::from_indices(&r.rhs),
                radii,
            )?;
            Ok(RelationDefect {
                relation: r.clone(),
                values,
            })
        })
        .collect()
}

fn check_off_lattice(lattice: &PeriodLattice, alpha: &Paravector<f64>, guard: f64) -> Result<()> {
    if lattice.distance_to_lattice(alpha) <= guard {
        return Err(Error::Pole {
            point: alpha.coords().to_vec(),
            detail: "the pole offset lies on the period lattice".into(),
        });
    }
    Ok(())
}

/// `k zeta_2(x - alpha) - k zeta_2(x + alpha)`: periodic, simple poles at
/// `+-alpha` with residues `+-k`. `alpha = 0` gives the zero function.
pub fn construct_two_pole_m0(zeta: &ZetaFunction, alpha: &Paravector<f64>, k: f64) -> Result<ShiftSum<f64>> {
    let lattice = zeta.lattice();
    if lattice.m() != 0 || lattice.rank() != 2 {
        return Err(Error::InvalidArgument("the two-pole construction is for m = 0, N = 2".into()));
    }
    let inner: Arc<dyn Evaluate<f64>> = Arc::new(zeta.clone());
    if alpha.is_zero() {
        return Ok(ShiftSum::new(inner, Vec::new()));
    }
    check_off_lattice(lattice, alpha, zeta.singularity_guard())?;
    Ok(ShiftSum::new(inner, vec![(k, -alpha), (-k, alpha.clone())]))
}

/// `k zeta(x - a) - k zeta(x + a) + ik zeta(x - ia) - ik zeta(x + ia)` over the
/// complexified algebra. The quadratic quasi-periodicity polynomials cancel
/// because `i^2 = -1`, so the result is periodic for `m <= 1`.
pub fn construct_complexified_two_pole(
    zeta: &ZetaFunction,
    alpha: &Paravector<f64>,
    k: f64,
) -> Result<ShiftSum<Complex64>> {
    let lattice = zeta.lattice();
    if lattice.signature().scalar_field != ScalarField::Complex {
        return Err(Error::InvalidArgument(
            "the complexified construction needs a lattice with complex scalars".into(),
        ));
    }
    if lattice.m() > 1 || lattice.rank() != lattice.dim() {
        return Err(Error::InvalidArgument(
            "the complexified construction removes quadratic polynomials only (m <= 1, N = 2m+2)".into(),
        ));
    }
    check_off_lattice(lattice, alpha, zeta.singularity_guard())?;
    let a = alpha.lift::<Complex64>();
    let ia = a.scale(&Complex64::i());
    let kc = Complex64::new(k, 0.0);
    let ik = Complex64::new(0.0, k);
    let inner: Arc<dyn Evaluate<Complex64>> = Arc::new(zeta.clone());
    Ok(ShiftSum::new(inner, vec![(kc, -&a), (-kc, a), (ik, -&ia), (-ik, ia)]))
}

/// `zeta(x) - 3 zeta(x + b) + 3 zeta(x + 2b) - zeta(x + 3b)`, the word
/// `(I - E_b)^3` for a formal period `b`; periodic for `m <= 1`.
pub fn construct_third_difference(zeta: &ZetaFunction, beta: &Paravector<f64>) -> Result<ShiftSum<f64>> {
    let lattice = zeta.lattice();
    if lattice.m() > 1 || lattice.rank() != lattice.dim() {
        return Err(Error::InvalidArgument(
            "the third difference removes quadratic polynomials only (m <= 1, N = 2m+2)".into(),
        ));
    }
    let word = difference_word(&[1, 1, 1]);
    word.shift_sum(Arc::new(zeta.clone()), std::slice::from_ref(beta))
}

/// `prod_{j in plus} (I + E_j) f`: halves the periods `2 omega_j`, `j in plus`,
/// of a function periodic on all `2 omega_j`.
pub fn half_period_reduce<T: crate::clifford::Scalar>(
    f: Arc<dyn Evaluate<T>>,
    periods: &[Paravector<T>],
    plus_indices: &[usize],
) -> Result<ShiftSum<T>> {
    let word = expand(&OperatorExpr::from_indices(&[], plus_indices));
    word.shift_sum(f, periods)
}

/// `(I + E_1)(I + E_2) prod_{j >= 3} (I - E_j) zeta`: the product with two
/// `I + E` factors, which is not periodic on `omega_1`.
pub fn two_plus_function(family: &JacobiFamily) -> Result<WordFunction> {
    let n = family.zeta().lattice().rank();
    if n < 2 {
        return Err(Error::InvalidArgument("needs at least two half-periods".into()));
    }
    let minus: Vec<usize> = (3..=n).collect();
    family.word_function("F", expand(&OperatorExpr::from_indices(&minus, &[1, 2])))
}

/// `(x|grad_w)^n phi(w) / n!` at `w = 0` for the regular part `phi = F - zeta`,
/// by exact termwise differentiation of the translates. Odd `n` only; order
/// zero returns the computed `phi(0)`, which vanishes up to the tails.
pub fn phi_taylor_coefficient(f: &JacobiFunction, direction: &Paravector<f64>, n: usize) -> Result<SeriesValue<f64>> {
    let phi = f.regular_part();
    let m = f.lattice().m();
    if n == 0 {
        return phi.eval(&Paravector::zero(m));
    }
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "{} - zeta is odd, so its even Taylor coefficients vanish; order {n} requested",
            f.kind()
        )));
    }
    let zeta = f.zeta();
    let scale = 1.0 / factorial(n);
    let mut parts = Vec::with_capacity(phi.word().len());
    for (c, s) in phi.word().terms() {
        let at = s.vector(phi.periods())?;
        parts.push((*c as f64 * scale, zeta.derivative(direction, n, &at)?));
    }
    Ok(SeriesValue::combine(m, parts.iter().map(|(c, v)| (*c, v))))
}

/// The Laurent expansion of `F` at the origin, truncated after order
/// `max_order` in `x`:
/// `x^-1 + phi(0) + sum_{odd n} (x|grad)^n phi(0)/n! + sum_{k >= m+1} (x|grad)^{2k+1} W / (2k+1)!`.
///
/// The constant `phi(0)` vanishes for `C`, and for `S_i` when `m >= 1`; for
/// `m = 0` it is `-2 zeta(omega_j)`, `j != i`, and is kept.
pub fn laurent_approximation(f: &JacobiFunction, x: &Paravector<f64>, max_order: usize) -> Result<SeriesValue<f64>> {
    Ok(laurent_approximations(std::slice::from_ref(f), x, max_order)?.remove(0))
}

/// [`laurent_approximation`] for several functions built on one `zeta`,
/// sharing the vertex derivatives.
pub fn laurent_approximations(
    functions: &[JacobiFunction],
    x: &Paravector<f64>,
    max_order: usize,
) -> Result<Vec<SeriesValue<f64>>> {
    let Some(first) = functions.first() else {
        return Ok(Vec::new());
    };
    let zeta = first.zeta();
    if functions.iter().any(|f| f.zeta().lattice() != zeta.lattice()) {
        return Err(Error::InvalidArgument("functions must share one lattice".into()));
    }
    let m = zeta.m();
    let orders: Vec<usize> = std::iter::once(0).chain((1..=max_order).step_by(2)).collect();
    let mut vertex: BTreeMap<Shift, Vec<SeriesValue<f64>>> = BTreeMap::new();
    for f in functions {
        for (_, s) in f.word().terms() {
            if s.is_identity() || vertex.contains_key(s) {
                continue;
            }
            let at = s.vector(f.as_word_function().periods())?;
            let values = orders
                .iter()
                .map(|&n| zeta.derivative(x, n, &at))
                .collect::<Result<Vec<_>>>()?;
            vertex.insert(s.clone(), values);
        }
    }
    let mut common = vec![(1.0, SeriesValue::exact(x.inverse()?.to_multivector()))];
    let first_mu = 2 * (zeta.lattice().rank() / 2) + 1;
    for mu in (first_mu..=max_order).step_by(2) {
        common.push((1.0, zeta.laurent_term_of_order(x, mu)?));
    }
    Ok(functions
        .iter()
        .map(|f| {
            let mut parts: Vec<(f64, &SeriesValue<f64>)> = common.iter().map(|(c, v)| (*c, v)).collect();
            for (c, s) in f.word().terms() {
                if let Some(values) = vertex.get(s) {
                    for (&n, v) in orders.iter().zip(values) {
                        parts.push((*c as f64 / factorial(n), v));
                    }
                }
            }
            SeriesValue::combine(m, parts)
        })
        .collect())
}

/// `sum_{k>=1} (-1)^(k-1) sum_{|J| = k} zeta(omega_J)`, which `phi(0) = 0`
/// forces to vanish; one value per radius.
pub fn half_period_relation_defect(zeta: &ZetaFunction, radii: &[u32]) -> Result<Vec<SeriesValue<f64>>> {
    let lattice = zeta.lattice();
    let n = lattice.rank();
    if n != lattice.dim() {
        return Err(Error::InvalidArgument("the half-period relation needs N = 2m+2".into()));
    }
    let word = TranslationWord::from_terms(
        subsets(n)
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| (if s.len() % 2 == 1 { 1 } else { -1 }, Shift::from_indices(&s))),
    );
    apply_at_radii(&word, zeta, lattice.omegas(), &Paravector::zero(lattice.m()), radii)
}

/// Outcome of the subset-sum lemma check for one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: usize,
    /// `sum_{|S| = k} sum_{i in S} p_i = C(n-1, k-1) p`, for `k = 1..=n`.
    pub per_k: Vec<bool>,
    /// The alternating sum over `k` vanishes.
    pub alternating_zero: bool,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.alternating_zero && self.per_k.iter().all(|&b| b)
    }
}

/// Checks the subset-sum lemma and the alternating identity exactly, with the
/// `p_i` as independent unit coefficient vectors.
pub fn alternating_subset_sum_identity(n: usize) -> Result<LemmaReport> {
    if !(2..=10).contains(&n) {
        return Err(Error::InvalidArgument(format!("n must lie in 2..=10, got {n}")));
    }
    let mut per_k = Vec::with_capacity(n);
    let mut alternating = vec![0i64; n];
    for k in 1..=n {
        let mut sum = vec![0i64; n];
        for s in subsets(n).into_iter().filter(|s| s.len() == k) {
            for i in s {
                sum[i - 1] += 1;
            }
        }
        let c = binomial(n - 1, k - 1);
        per_k.push(sum.iter().all(|&v| v == c));
        let sign = if k % 2 == 1 { 1 } else { -1 };
        for (a, v) in alternating.iter_mut().zip(&sum) {
            *a += sign * v;
        }
    }
    Ok(LemmaReport {
        n,
        per_k,
        alternating_zero: alternating.iter().all(|&v| v == 0),
    })
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}
