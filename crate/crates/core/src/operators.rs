//! The commutative algebra generated by the half-period translations `E_j`,
//! `(E_j f)(x) = f(x + omega_j)`.
//!
//! Products of `I +- E_j` expand to signed sums of shifts ([`TranslationWord`]),
//! which act either on evaluatable functions (numerically) or on polynomials
//! with exact rational coefficients ([`SymPoly`]).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::clifford::{Multivector, Paravector, Scalar, MAX_PARA};
use crate::error::{Error, Result};
use crate::function::{Evaluate, SeriesValue, ShiftSum};
use crate::lattice::PeriodLattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    IMinusE,
    IPlusE,
    IMinusESq,
    E,
}

/// One factor of an operator product; `index` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub kind: FactorKind,
    pub index: usize,
}

impl Factor {
    pub fn new(kind: FactorKind, index: usize) -> Self {
        Self { kind, index }
    }

    pub fn minus(index: usize) -> Self {
        Self::new(FactorKind::IMinusE, index)
    }

    pub fn plus(index: usize) -> Self {
        Self::new(FactorKind::IPlusE, index)
    }

    pub fn word(&self) -> TranslationWord {
        let e = Shift::single(self.index, 1);
        match self.kind {
            FactorKind::IMinusE => TranslationWord::from_terms([(1, Shift::identity()), (-1, e)]),
            FactorKind::IPlusE => TranslationWord::from_terms([(1, Shift::identity()), (1, e)]),
            FactorKind::IMinusESq => {
                TranslationWord::from_terms([(1, Shift::identity()), (-1, Shift::single(self.index, 2))])
            }
            FactorKind::E => TranslationWord::from_terms([(1, e)]),
        }
    }
}

/// A product of commuting factors `I - E_j`, `I + E_j`, `I - E_j^2`, `E_j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    pub factors: Vec<Factor>,
}

impl OperatorExpr {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    /// `prod_{j in minus} (I - E_j) * prod_{j in plus} (I + E_j)`.
    pub fn from_indices(minus: &[usize], plus: &[usize]) -> Self {
        let mut factors: Vec<Factor> = minus.iter().map(|&j| Factor::minus(j)).collect();
        factors.extend(plus.iter().map(|&j| Factor::plus(j)));
        Self { factors }
    }

    /// Parses a product such as `"(1-E1)(1+E2)(1-E3^2)E4"`. Whitespace is
    /// ignored and `I` may stand for `1`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src);
        let expr = p.product()?;
        if !p.at_end() {
            return Err(p.error("unexpected trailing input"));
        }
        if expr.factors.is_empty() {
            return Err(Error::Parse("empty operator product".into()));
        }
        Ok(expr)
    }

    pub fn max_index(&self) -> usize {
        self.factors.iter().map(|f| f.index).max().unwrap_or(0)
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in &self.factors {
            match factor.kind {
                FactorKind::IMinusE => write!(f, "(1-E{})", factor.index)?,
                FactorKind::IPlusE => write!(f, "(1+E{})", factor.index)?,
                FactorKind::IMinusESq => write!(f, "(1-E{}^2)", factor.index)?,
                FactorKind::E => write!(f, "E{}", factor.index)?,
            }
        }
        Ok(())
    }
}

/// A multiset of half-period indices: `multiplicity[j-1]` copies of `omega_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Shift {
    multiplicity: Vec<u32>,
}

impl Shift {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(index: usize, count: u32) -> Self {
        assert!(index >= 1, "half-period indices are 1-based");
        let mut multiplicity = vec![0; index];
        multiplicity[index - 1] = count;
        Self::from_multiplicities(multiplicity)
    }

    pub fn from_multiplicities(mut multiplicity: Vec<u32>) -> Self {
        while multiplicity.last() == Some(&0) {
            multiplicity.pop();
        }
        Self { multiplicity }
    }

    /// The shift `omega_{j_1} + ... + omega_{j_k}` for distinct 1-based indices.
    pub fn from_indices(indices: &[usize]) -> Self {
        let mut s = Self::identity();
        for &j in indices {
            s = s.combine(&Self::single(j, 1));
        }
        s
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicity
    }

    pub fn multiplicity(&self, index: usize) -> u32 {
        self.multiplicity.get(index - 1).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.multiplicity.iter().sum()
    }

    pub fn is_identity(&self) -> bool {
        self.multiplicity.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.multiplicity.len()
    }

    /// Indices with multiplicity, ascending: `E1^2 E3 -> [1, 1, 3]`.
    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (i, &c) in self.multiplicity.iter().enumerate() {
            out.extend(std::iter::repeat(i + 1).take(c as usize));
        }
        out
    }

    pub fn combine(&self, other: &Self) -> Self {
        let len = self.multiplicity.len().max(other.multiplicity.len());
        let multiplicity = (0..len)
            .map(|i| {
                self.multiplicity.get(i).copied().unwrap_or(0) + other.multiplicity.get(i).copied().unwrap_or(0)
            })
            .collect();
        Self::from_multiplicities(multiplicity)
    }

    /// `sum_j multiplicity_j * periods[j-1]`.
    pub fn vector<T: Scalar>(&self, periods: &[Paravector<T>]) -> Result<Paravector<T>> {
        if self.max_index() > periods.len() {
            return Err(Error::InvalidArgument(format!(
                "shift {self} uses E{} but only {} half-periods are given",
                self.max_index(),
                periods.len()
            )));
        }
        let m = periods.first().map_or(0, Paravector::m);
        let mut acc = Paravector::zero(m);
        for (j, &c) in self.multiplicity.iter().enumerate() {
            if c > 0 {
                acc = &acc + &periods[j].scale(&T::from_f64(c as f64));
            }
        }
        Ok(acc)
    }
}

impl Ord for Shift {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for Shift {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for (i, &c) in self.multiplicity.iter().enumerate() {
            match c {
                0 => {}
                1 => write!(f, "E{}", i + 1)?,
                _ => write!(f, "E{}{}", i + 1, superscript(c))?,
            }
        }
        Ok(())
    }
}

/// A signed integer combination of shifts in canonical form: sorted by shift
/// (total degree, then indices), like shifts merged, zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TranslationWord {
    terms: Vec<(i64, Shift)>,
}

impl TranslationWord {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_terms([(1, Shift::identity())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Shift)>) -> Self {
        let mut map: BTreeMap<Shift, i64> = BTreeMap::new();
        for (c, s) in terms {
            *map.entry(s).or_insert(0) += c;
        }
        Self {
            terms: map.into_iter().filter(|(_, c)| *c != 0).map(|(s, c)| (c, s)).collect(),
        }
    }

    /// Parses a signed sum of operator products, e.g.
    /// `"(1-E1)(1+E2) + (1+E1) - (1+E2)"`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src);
        let word = p.sum()?;
        if !p.at_end() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(word)
    }

    pub fn terms(&self) -> &[(i64, Shift)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.terms.iter().map(|(_, s)| s.max_index()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, shift: &Shift) -> i64 {
        self.terms
            .iter()
            .find(|(_, s)| s == shift)
            .map_or(0, |(c, _)| *c)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| &acc * self)
    }

    /// `(shift vector, coefficient)` pairs for a concrete set of half-periods.
    pub fn shifts<T: Scalar>(&self, periods: &[Paravector<T>]) -> Result<Vec<(T, Paravector<T>)>> {
        self.terms
            .iter()
            .map(|(c, s)| Ok((T::from_f64(*c as f64), s.vector(periods)?)))
            .collect()
    }

    /// The evaluatable function `x -> sum c f(x + shift)`.
    pub fn shift_sum<T: Scalar>(&self, f: Arc<dyn Evaluate<T>>, periods: &[Paravector<T>]) -> Result<ShiftSum<T>> {
        Ok(ShiftSum::new(f, self.shifts(periods)?))
    }
}

impl fmt::Display for TranslationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let sign = if *c < 0 { '−' } else { '+' };
            write!(f, "{sign}{}·{s}", c.unsigned_abs())?;
        }
        Ok(())
    }
}

impl Mul for &TranslationWord {
    type Output = TranslationWord;
    fn mul(self, rhs: &TranslationWord) -> TranslationWord {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, s) in &self.terms {
            for (b, t) in &rhs.terms {
                out.push((a * b, s.combine(t)));
            }
        }
        TranslationWord::from_terms(out)
    }
}

impl Add for &TranslationWord {
    type Output = TranslationWord;
    fn add(self, rhs: &TranslationWord) -> TranslationWord {
        TranslationWord::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl Sub for &TranslationWord {
    type Output = TranslationWord;
    fn sub(self, rhs: &TranslationWord) -> TranslationWord {
        self + &(-rhs)
    }
}

impl Neg for &TranslationWord {
    type Output = TranslationWord;
    fn neg(self) -> TranslationWord {
        TranslationWord {
            terms: self.terms.iter().map(|(c, s)| (-c, s.clone())).collect(),
        }
    }
}

/// Distributes the product into a canonical signed sum of shifts.
pub fn expand(expr: &OperatorExpr) -> TranslationWord {
    expr.factors
        .iter()
        .fold(TranslationWord::identity(), |acc, f| &acc * &f.word())
}

/// `sum c f(x + shift)` with the shifts taken from `periods` (`periods[j-1] =
/// omega_j`). Tail estimates add.
pub fn apply<T: Scalar>(
    word: &TranslationWord,
    f: &dyn Evaluate<T>,
    periods: &[Paravector<T>],
    x: &Paravector<T>,
) -> Result<SeriesValue<T>> {
    let mut values = Vec::with_capacity(word.len());
    for (c, s) in word.terms() {
        let v = f.eval(&(x + &s.vector(periods)?)).map_err(|e| name_shift(e, s))?;
        values.push((T::from_f64(*c as f64), v));
    }
    Ok(SeriesValue::combine(f.m(), values.iter().map(|(c, v)| (c.clone(), v))))
}

/// [`apply`] at several truncation radii of `f` at once.
pub fn apply_at_radii<T: Scalar>(
    word: &TranslationWord,
    f: &dyn Evaluate<T>,
    periods: &[Paravector<T>],
    x: &Paravector<T>,
    radii: &[u32],
) -> Result<Vec<SeriesValue<T>>> {
    let mut values = Vec::with_capacity(word.len());
    for (c, s) in word.terms() {
        let v = f.eval_at_radii(&(x + &s.vector(periods)?), radii).map_err(|e| name_shift(e, s))?;
        values.push((T::from_f64(*c as f64), v));
    }
    Ok((0..radii.len())
        .map(|i| SeriesValue::combine(f.m(), values.iter().map(|(c, v)| (c.clone(), &v[i]))))
        .collect())
}

fn name_shift(e: Error, s: &Shift) -> Error {
    match e {
        Error::Pole { point, detail } => Error::Pole {
            point,
            detail: format!("{detail}; reached through the shift {s}"),
        },
        other => other,
    }
}

/// The half-periods of `lattice` as exact rationals (every float is one).
pub fn exact_periods(lattice: &PeriodLattice) -> Vec<Paravector<BigRational>> {
    lattice.omegas().iter().map(Paravector::lift).collect()
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            src,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_sign(&mut self) -> Option<i64> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(1)
            }
            Some('-') | Some('−') => {
                self.pos += 1;
                Some(-1)
            }
            _ => None,
        }
    }

    fn index(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        match digits.parse::<usize>() {
            Ok(j) if j >= 1 => Ok(j),
            _ => Err(self.error("expected a period index >= 1")),
        }
    }

    fn squared(&mut self) -> Result<bool> {
        if self.eat('²') {
            return Ok(true);
        }
        if self.eat('^') {
            if self.eat('2') {
                return Ok(true);
            }
            return Err(self.error("only the exponent 2 is supported"));
        }
        Ok(false)
    }

    fn factor(&mut self) -> Result<Option<Factor>> {
        if self.eat('E') {
            let j = self.index()?;
            if self.squared()? {
                return Err(self.error("a bare E_j^2 is not a factor; write (1-Ej^2)"));
            }
            return Ok(Some(Factor::new(FactorKind::E, j)));
        }
        if !self.eat('(') {
            return Ok(None);
        }
        if !(self.eat('1') || self.eat('I')) {
            return Err(self.error("expected 1 or I"));
        }
        let sign = self.eat_sign().ok_or_else(|| self.error("expected + or -"))?;
        if !self.eat('E') {
            return Err(self.error("expected E"));
        }
        let j = self.index()?;
        let sq = self.squared()?;
        if !self.eat(')') {
            return Err(self.error("expected )"));
        }
        let kind = match (sign, sq) {
            (-1, false) => FactorKind::IMinusE,
            (1, false) => FactorKind::IPlusE,
            (-1, true) => FactorKind::IMinusESq,
            _ => return Err(self.error("(1+Ej^2) is not a supported factor")),
        };
        Ok(Some(Factor::new(kind, j)))
    }

    fn product(&mut self) -> Result<OperatorExpr> {
        let mut factors = Vec::new();
        while let Some(f) = self.factor()? {
            factors.push(f);
        }
        Ok(OperatorExpr { factors })
    }

    fn term(&mut self) -> Result<TranslationWord> {
        // a lone "1" or "I" is the identity
        if (self.peek() == Some('1') || self.peek() == Some('I')) && self.chars.get(self.pos + 1) != Some(&'(') {
            self.pos += 1;
            return Ok(TranslationWord::identity());
        }
        let expr = self.product()?;
        if expr.factors.is_empty() {
            return Err(self.error("expected an operator product"));
        }
        Ok(expand(&expr))
    }

    fn sum(&mut self) -> Result<TranslationWord> {
        let first_sign = self.eat_sign().unwrap_or(1);
        let mut acc = self.term()?;
        if first_sign < 0 {
            acc = -&acc;
        }
        while let Some(sign) = self.eat_sign() {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }
}

/// Coefficients of a [`SymPoly`].
pub trait PolyCoeff: Clone + PartialEq + fmt::Debug {
    fn is_zero_coeff(&self) -> bool;
    fn add_assign_coeff(&mut self, other: &Self);
    fn scaled(&self, s: &BigRational) -> Self;
}

impl PolyCoeff for BigRational {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_assign_coeff(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, s: &BigRational) -> Self {
        self * s
    }
}

impl PolyCoeff for Multivector<BigRational> {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_assign_coeff(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, s: &BigRational) -> Self {
        self.scale(s)
    }
}

type Exps = [u8; MAX_PARA];

/// A polynomial in the paravector coordinates `x_0 .. x_{2m+1}` with exact
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPoly<C> {
    dim: usize,
    terms: BTreeMap<Exps, C>,
}

/// Clifford-valued exact polynomial.
pub type CliffordPoly = SymPoly<Multivector<BigRational>>;

impl<C: PolyCoeff> SymPoly<C> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// `c x^exps`.
    pub fn monomial(dim: usize, exps: &[u8], c: C) -> Self {
        let mut e = [0u8; MAX_PARA];
        e[..exps.len()].copy_from_slice(exps);
        let mut p = Self::zero(dim);
        p.add_term(e, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &C)> {
        self.terms.iter().map(move |(e, c)| (&e[..self.dim], c))
    }

    fn add_term(&mut self, e: Exps, c: C) {
        if c.is_zero_coeff() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                existing.add_assign_coeff(&c);
                if existing.is_zero_coeff() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add_scaled(&mut self, s: &BigRational, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.scaled(s));
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero(self.dim);
        out.add_scaled(s, self);
        out
    }

    /// `p(x + h)`, by binomial expansion of each coordinate power.
    pub fn translate(&self, h: &Paravector<BigRational>) -> Self {
        let mut out = Self::zero(self.dim);
        // powers[a][k] = h_a^k
        let maxdeg = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<BigRational>> = (0..self.dim)
            .map(|a| {
                let mut v = vec![BigRational::one()];
                for k in 1..=maxdeg {
                    let next = &v[k - 1] * h.coord(a);
                    v.push(next);
                }
                v
            })
            .collect();
        for (e, c) in &self.terms {
            // iterate over all k <= e coordinatewise
            let mut k = [0u8; MAX_PARA];
            loop {
                let mut factor = BigRational::one();
                for a in 0..self.dim {
                    let drop = (e[a] - k[a]) as usize;
                    if drop > 0 {
                        if powers[a][drop].is_zero() {
                            factor = BigRational::zero();
                            break;
                        }
                        factor *= &powers[a][drop] * BigRational::from(binomial(e[a] as u64, k[a] as u64));
                    }
                }
                if !factor.is_zero() {
                    out.add_term(k, c.scaled(&factor));
                }
                // odometer over k <= e
                let mut a = 0;
                while a < self.dim {
                    if k[a] < e[a] {
                        k[a] += 1;
                        break;
                    }
                    k[a] = 0;
                    a += 1;
                }
                if a == self.dim {
                    break;
                }
            }
        }
        out
    }

    /// `sum c p(x + shift)`.
    pub fn apply_word(&self, word: &TranslationWord, periods: &[Paravector<BigRational>]) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for (c, s) in word.terms() {
            let h = s.vector(periods)?;
            out.add_scaled(&BigRational::from(BigInt::from(*c)), &self.translate(&h));
        }
        Ok(out)
    }

    /// `(I - E_j) p` applied one factor at a time.
    pub fn difference(&self, h: &Paravector<BigRational>) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-BigRational::one(), &self.translate(h));
        out
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl SymPoly<Multivector<BigRational>> {
    /// The constant polynomial `c`.
    pub fn constant(m: usize, c: Multivector<BigRational>) -> Self {
        let dim = 2 * m + 2;
        let mut p = Self::zero(dim);
        p.add_term([0; MAX_PARA], c);
        p
    }

    /// `x = sum_a x_a e_a` with `e_0 = 1`.
    pub fn identity_map(m: usize) -> Self {
        let dim = 2 * m + 2;
        let mut p = Self::zero(dim);
        for a in 0..dim {
            let mut e = [0u8; MAX_PARA];
            e[a] = 1;
            p.add_term(e, Paravector::<BigRational>::basis(m, a).to_multivector());
        }
        p
    }

    pub fn m(&self) -> usize {
        (self.dim - 2) / 2
    }

    /// Clifford product; coordinates commute with everything.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, a) in &self.terms {
            for (f, b) in &rhs.terms {
                let mut g = [0u8; MAX_PARA];
                for i in 0..MAX_PARA {
                    g[i] = e[i] + f[i];
                }
                out.add_term(g, a * b);
            }
        }
        out
    }

    /// `(lambda x)^n lambda` as a polynomial in the coordinates of `x`.
    pub fn lambda_monomial(lambda: &Paravector<BigRational>, n: usize) -> Self {
        let m = lambda.m();
        let l = Self::constant(m, lambda.to_multivector());
        let lx = l.mul(&Self::identity_map(m));
        let mut acc = l;
        for _ in 0..n {
            acc = lx.mul(&acc);
        }
        acc
    }

    /// Value at a rational point.
    pub fn eval(&self, x: &Paravector<BigRational>) -> Multivector<BigRational> {
        let mut acc = Multivector::zero(self.m());
        for (e, c) in &self.terms {
            let mut s = BigRational::one();
            for a in 0..self.dim {
                for _ in 0..e[a] {
                    s *= x.coord(a);
                }
            }
            acc.add_scaled(&s, c);
        }
        acc
    }
}

/// A holomorphic Cliffordian polynomial `sum_i c_i (lambda_i x)^{n_i} lambda_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordianPolynomial {
    pub m: usize,
    pub terms: Vec<(BigRational, Paravector<BigRational>, usize)>,
}

impl CliffordianPolynomial {
    pub fn new(m: usize, terms: Vec<(BigRational, Paravector<BigRational>, usize)>) -> Self {
        Self { m, terms }
    }

    /// Nominal degree `max n_i` (the expansion may cancel below it).
    pub fn nominal_degree(&self) -> usize {
        self.terms.iter().map(|t| t.2).max().unwrap_or(0)
    }

    pub fn expand(&self) -> CliffordPoly {
        let mut out = CliffordPoly::zero(2 * self.m + 2);
        for (c, lambda, n) in &self.terms {
            out.add_scaled(c, &CliffordPoly::lambda_monomial(lambda, *n));
        }
        out
    }
}

/// Exact degrees before and after one application of `I - E_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReduction {
    pub before: Option<usize>,
    pub after: Option<usize>,
}

impl DegreeReduction {
    /// Degree dropped by at least one (or the result vanished).
    pub fn holds(&self) -> bool {
        match (self.before, self.after) {
            (_, None) => true,
            (Some(b), Some(a)) => a < b,
            (None, Some(_)) => false,
        }
    }
}

/// Applies `I - E_j` to `poly` symbolically and reports the exact degrees.
pub fn degree_reduction_check(
    j: usize,
    poly: &CliffordianPolynomial,
    periods: &[Paravector<BigRational>],
) -> Result<DegreeReduction> {
    let p = poly.expand();
    let word = Factor::minus(j).word();
    let q = p.apply_word(&word, periods)?;
    Ok(DegreeReduction {
        before: p.degree(),
        after: q.degree(),
    })
}

/// All multisets of size `k` drawn from `1..=n`, ascending.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..=n {
            cur.push(j);
            rec(n, k, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 1, &mut Vec::with_capacity(k), &mut out);
    out
}

/// The word `prod_{j in indices} (I - E_j)`.
pub fn difference_word(indices: &[usize]) -> TranslationWord {
    expand(&OperatorExpr::from_indices(indices, &[]))
}

/// Outcome of the exhaustive annihilation check at one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilationReport {
    pub degree: usize,
    pub words_checked: usize,
    pub basis_size: usize,
    /// Multisets whose word left some basis monomial alive.
    pub failures: Vec<Vec<usize>>,
}

impl AnnihilationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every product of `n + 1` factors `I - E_j` (indices drawn with repetition
/// from the given half-periods) kills every polynomial of degree `<= n`.
///
/// Shifts act on coordinates only, so it is enough to check the scalar
/// coordinate monomials of degree `<= n`, which span all such polynomials
/// (Clifford-valued ones componentwise).
pub fn annihilation_check(n: usize, periods: &[Paravector<BigRational>]) -> Result<AnnihilationReport> {
    let dim = periods
        .first()
        .map(Paravector::dim)
        .ok_or_else(|| Error::InvalidArgument("no half-periods given".into()))?;
    let basis: Vec<SymPoly<BigRational>> = (0..=n)
        .flat_map(|d| exponent_vectors(dim, d))
        .map(|e| SymPoly::monomial(dim, &e, BigRational::one()))
        .collect();
    let sets = multisets(periods.len(), n + 1);
    let mut failures = Vec::new();
    for set in &sets {
        let word = difference_word(set);
        for b in &basis {
            if !b.apply_word(&word, periods)?.is_zero() {
                failures.push(set.clone());
                break;
            }
        }
    }
    Ok(AnnihilationReport {
        degree: n,
        words_checked: sets.len(),
        basis_size: basis.len(),
        failures,
    })
}

/// All exponent vectors of length `dim` and total degree `d`.
pub fn exponent_vectors(dim: usize, d: usize) -> Vec<Vec<u8>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == dim - 1 {
            cur.push(left as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k as u8);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, d, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// A degree-`n` Cliffordian monomial that survives a product of `n` factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessWitness {
    pub indices: Vec<usize>,
    pub lambda: Paravector<BigRational>,
    /// The (constant) image of `(lambda x)^n lambda` under the word.
    pub image: Multivector<BigRational>,
}

/// For each multiset of `n` factors `I - E_j`, searches small integer
/// `lambda` (coordinates in `-1..=2`, in a fixed order) for a monomial
/// `(lambda x)^n lambda` that the word does not annihilate. Returns `None`
/// for the first multiset without a witness.
pub fn sharpness_witnesses(
    n: usize,
    periods: &[Paravector<BigRational>],
) -> Result<std::result::Result<Vec<SharpnessWitness>, Vec<usize>>> {
    let m = periods
        .first()
        .map(Paravector::m)
        .ok_or_else(|| Error::InvalidArgument("no half-periods given".into()))?;
    let dim = 2 * m + 2;
    let candidates = small_lambdas(m, dim);
    let mut out = Vec::new();
    for set in multisets(periods.len(), n) {
        let word = difference_word(&set);
        let mut found = None;
        for lambda in &candidates {
            let image = CliffordPoly::lambda_monomial(lambda, n).apply_word(&word, periods)?;
            if !image.is_zero() {
                let value = image.eval(&Paravector::zero(m));
                found = Some(SharpnessWitness {
                    indices: set.clone(),
                    lambda: lambda.clone(),
                    image: value,
                });
                break;
            }
        }
        match found {
            Some(w) => out.push(w),
            None => return Ok(Err(set)),
        }
    }
    Ok(Ok(out))
}

fn small_lambdas(m: usize, dim: usize) -> Vec<Paravector<BigRational>> {
    let values = [1i64, 2, -1, 0];
    let mut out = Vec::new();
    let total = values.len().pow(dim as u32);
    for code in 0..total {
        let mut c = code;
        let coords: Vec<BigRational> = (0..dim)
            .map(|_| {
                let v = values[c % values.len()];
                c /= values.len();
                BigRational::from(BigInt::from(v))
            })
            .collect();
        if coords.iter().all(Zero::is_zero) {
            continue;
        }
        out.push(Paravector::from_coords(m, &coords).expect("dimension matches"));
    }
    out
}

/// A named operator identity and whether it holds exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

fn identity(name: String, lhs: &TranslationWord, rhs: &TranslationWord) -> IdentityCheck {
    IdentityCheck {
        name,
        holds: lhs == rhs,
    }
}

/// The factorization identities of the translation algebra on `n`
/// half-periods, including the ones used to prove the periods of the
/// Jacobi functions.
pub fn factorization_identities(n: usize) -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    let minus = |j| Factor::minus(j).word();
    let plus = |j| Factor::plus(j).word();
    let sq = |j| Factor::new(FactorKind::IMinusESq, j).word();
    let e = |j| Factor::new(FactorKind::E, j).word();
    let id = TranslationWord::identity();
    for j in 1..=n {
        out.push(identity(format!("I-E{j}^2 = (I-E{j})(I+E{j})"), &sq(j), &(&minus(j) * &plus(j))));
        out.push(identity(
            format!("E{j}^2 is the full-period translation"),
            &(&e(j) * &e(j)),
            &TranslationWord::from_terms([(1, Shift::single(j, 2))]),
        ));
    }
    for i in 1..=n {
        for j in 1..=n {
            out.push(identity(format!("E{i}E{j} = E{j}E{i}"), &(&e(i) * &e(j)), &(&e(j) * &e(i))));
            let lhs = &id - &(&e(i) * &e(j));
            let rhs = &(&(&minus(i) * &plus(j)) + &plus(i)) - &plus(j);
            out.push(identity(format!("I-E{i}E{j} = (I-E{i})(I+E{j}) + (I+E{i}) - (I+E{j})"), &lhs, &rhs));
        }
    }
    if n >= 2 {
        let all: Vec<usize> = (1..=n).collect();
        let prod_except = |skip: usize| difference_word(&all.iter().copied().filter(|&j| j != skip).collect::<Vec<_>>());
        let c = difference_word(&all);
        for i in 1..=n {
            let s = &plus(i) * &prod_except(i);
            out.push(identity(
                format!("(I-E{i}) S{i} = prod_(j!={i}) (I-E_j) (I-E{i}^2)"),
                &(&minus(i) * &s),
                &(&prod_except(i) * &sq(i)),
            ));
            for k in 1..=n {
                if k == i {
                    continue;
                }
                out.push(identity(
                    format!("(I-E{k}^2) S{i} = (I+E{i}) prod_(j!={i}) (I-E_j) (I-E{k}^2)"),
                    &(&sq(k) * &s),
                    &(&(&plus(i) * &prod_except(i)) * &sq(k)),
                ));
                let lhs = &(&id - &(&e(i) * &e(k))) * &c;
                let rhs = &(&(&minus(i) * &(&prod_except(k) * &sq(k))) + &(&prod_except(i) * &sq(i)))
                    - &(&prod_except(k) * &sq(k));
                out.push(identity(format!("(I-E{i}E{k}) C splits into annihilated pieces"), &lhs, &rhs));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::rat;
    use proptest::prelude::*;

    fn periods_unit(m: usize) -> Vec<Paravector<BigRational>> {
        (0..2 * m + 2).map(|a| Paravector::basis(m, a)).collect()
    }

    fn periods_skew() -> Vec<Paravector<BigRational>> {
        let rows = [[1, 0, 0, 0], [1, 2, 0, 0], [0, -1, 3, 1], [2, 0, 1, -1]];
        rows.iter()
            .map(|r| {
                let c: Vec<BigRational> = r.iter().map(|&v| rat(v, 2)).collect();
                Paravector::from_coords(1, &c).unwrap()
            })
            .collect()
    }

    #[test]
    fn expand_square_factorization() {
        let w = expand(&OperatorExpr::parse("(1-E1)(1+E1)").unwrap());
        assert_eq!(w.to_string(), "+1·I −1·E1²");
    }

    #[test]
    fn expand_two_minus_factors() {
        let w = expand(&OperatorExpr::parse("(1-E1)(1-E2)").unwrap());
        assert_eq!(w.to_string(), "+1·I −1·E1 −1·E2 +1·E1E2");
    }

    #[test]
    fn sum_collapses_to_diagonal_translation() {
        let w = TranslationWord::parse("(1-E1)(1+E2) + (1+E1) - (1+E2)").unwrap();
        assert_eq!(w.to_string(), "+1·I −1·E1E2");
    }

    #[test]
    fn parser_accepts_whitespace_and_squares() {
        let a = OperatorExpr::parse(" ( 1 - E1 ^2 ) E3 (I+E2)").unwrap();
        assert_eq!(
            a.factors,
            vec![
                Factor::new(FactorKind::IMinusESq, 1),
                Factor::new(FactorKind::E, 3),
                Factor::new(FactorKind::IPlusE, 2)
            ]
        );
        assert_eq!(expand(&a), expand(&OperatorExpr::parse("(1-E1²)E3(1+E2)").unwrap()));
    }

    #[test]
    fn parser_rejects_garbage() {
        for bad in ["", "(1-E0)", "(1*E1)", "(1-E1", "(2-E1)", "(1+E1^2)", "(1-E1^3)", "x"] {
            assert!(OperatorExpr::parse(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn display_roundtrips_through_parse() {
        let expr = OperatorExpr::parse("(1-E1^2)(1+E2)E4").unwrap();
        assert_eq!(OperatorExpr::parse(&expr.to_string()).unwrap(), expr);
    }

    #[test]
    fn cube_of_single_difference() {
        let w = difference_word(&[1, 1, 1]);
        let coeffs: Vec<i64> = w.terms().iter().map(|t| t.0).collect();
        assert_eq!(coeffs, vec![1, -3, 3, -1]);
    }

    #[test]
    fn canonical_order_is_degree_then_indices() {
        let w = &difference_word(&[1, 2]) * &TranslationWord::identity();
        let shifts: Vec<String> = w.terms().iter().map(|t| t.1.to_string()).collect();
        assert_eq!(shifts, ["I", "E1", "E2", "E1E2"]);
        let sq = &difference_word(&[2, 1]) * &difference_word(&[1]);
        let shifts: Vec<String> = sq.terms().iter().map(|t| t.1.to_string()).collect();
        assert_eq!(shifts, ["I", "E1", "E2", "E1²", "E1E2", "E1²E2"]);
    }

    #[test]
    fn empty_word_gives_zero_and_identity_gives_f() {
        let f = crate::function::FnEval::new(0, |x: &Paravector<f64>| Ok(x.to_multivector()));
        let periods = vec![Paravector::basis(0, 0), Paravector::basis(0, 1)];
        let x = Paravector::from_coords(0, &[0.3, -0.2]).unwrap();
        let zero = apply(&TranslationWord::zero(), &f, &periods, &x).unwrap();
        assert!(zero.value.is_zero());
        let same = apply(&TranslationWord::identity(), &f, &periods, &x).unwrap();
        assert_eq!(same.value, x.to_multivector());
        let shifted = apply(&Factor::new(FactorKind::E, 2).word(), &f, &periods, &x).unwrap();
        assert_eq!(shifted.value, (&x + &periods[1]).to_multivector());
    }

    #[test]
    fn apply_names_the_offending_shift() {
        let f = crate::function::FnEval::new(0, |x: &Paravector<f64>| {
            if x.modulus() < 1e-12 {
                Err(Error::Pole {
                    point: x.coords().to_vec(),
                    detail: "test pole".into(),
                })
            } else {
                Ok(Multivector::one(0))
            }
        });
        let periods = vec![Paravector::basis(0, 0), Paravector::basis(0, 1)];
        let x = Paravector::from_coords(0, &[-1.0, -1.0]).unwrap();
        let err = apply(&difference_word(&[1, 2]), &f, &periods, &x).unwrap_err();
        assert!(err.to_string().contains("E1E2"), "{err}");
    }

    #[test]
    fn periodic_function_is_killed_by_full_period_difference() {
        // sin(pi x_0) cos(pi x_1) has periods 2 e_0 and 2 e_1
        let f = crate::function::FnEval::new(0, |x: &Paravector<f64>| {
            let v = (std::f64::consts::PI * x.coord(0)).sin() * (std::f64::consts::PI * x.coord(1)).cos();
            Ok(Multivector::scalar(0, v))
        });
        let periods = vec![Paravector::basis(0, 0), Paravector::basis(0, 1)];
        let x = Paravector::from_coords(0, &[0.37, -0.81]).unwrap();
        for j in 1..=2 {
            let w = Factor::new(FactorKind::IMinusESq, j).word();
            assert!(apply(&w, &f, &periods, &x).unwrap().value.norm_inf() < 1e-14);
        }
    }

    #[test]
    fn constant_is_annihilated() {
        let h = Paravector::from_coords(1, &[rat(1, 3), rat(-2, 1), rat(0, 1), rat(5, 7)]).unwrap();
        let p = CliffordianPolynomial::new(1, vec![(BigRational::one(), h, 0)]);
        let r = degree_reduction_check(2, &p, &periods_skew()).unwrap();
        assert_eq!(r, DegreeReduction { before: Some(0), after: None });
    }

    #[test]
    fn x_squared_drops_to_degree_one() {
        let one = Paravector::scalar(1, BigRational::one());
        let p = CliffordianPolynomial::new(1, vec![(BigRational::one(), one, 2)]);
        for j in 1..=4 {
            let r = degree_reduction_check(j, &p, &periods_skew()).unwrap();
            assert_eq!(r.before, Some(2));
            assert_eq!(r.after, Some(1));
        }
    }

    #[test]
    fn lambda_monomial_matches_numeric_product() {
        let lambda = Paravector::from_coords(1, &[rat(1, 2), rat(-1, 1), rat(2, 1), rat(1, 3)]).unwrap();
        let x = Paravector::from_coords(1, &[rat(3, 1), rat(1, 5), rat(-2, 1), rat(1, 1)]).unwrap();
        for n in 0..4 {
            let p = CliffordPoly::lambda_monomial(&lambda, n);
            let direct = crate::clifford::lambda_power(&lambda, &x, n).unwrap();
            assert_eq!(p.eval(&x), direct);
            assert_eq!(p.degree(), Some(n));
        }
    }

    #[test]
    fn quadratic_killed_by_three_factors() {
        let l1 = Paravector::from_coords(1, &[rat(1, 1), rat(2, 1), rat(0, 1), rat(-1, 1)]).unwrap();
        let l2 = Paravector::from_coords(1, &[rat(0, 1), rat(1, 1), rat(1, 2), rat(3, 1)]).unwrap();
        let p = CliffordianPolynomial::new(1, vec![(rat(2, 1), l1, 2), (rat(-1, 3), l2, 1)]).expand();
        for periods in [periods_unit(1), periods_skew()] {
            for set in [[1, 2, 3], [1, 1, 1]] {
                assert!(p.apply_word(&difference_word(&set), &periods).unwrap().is_zero());
            }
            assert!(!p.apply_word(&difference_word(&[1, 2]), &periods).unwrap().is_zero());
        }
    }

    #[test]
    fn third_difference_kills_quadratics_for_any_step() {
        let h = Paravector::from_coords(1, &[rat(3, 7), rat(-1, 2), rat(5, 1), rat(2, 9)]).unwrap();
        let lambda = Paravector::from_coords(1, &[rat(1, 1), rat(-1, 3), rat(2, 1), rat(1, 1)]).unwrap();
        let p = CliffordPoly::lambda_monomial(&lambda, 2);
        let word = difference_word(&[1, 1, 1]);
        assert!(p.apply_word(&word, &[h.clone()]).unwrap().is_zero());
        let cubic = CliffordPoly::lambda_monomial(&lambda, 3);
        assert!(!cubic.apply_word(&word, &[h]).unwrap().is_zero());
    }

    #[test]
    fn annihilation_low_degrees_m0() {
        let periods = vec![
            Paravector::from_coords(0, &[rat(1, 1), rat(0, 1)]).unwrap(),
            Paravector::from_coords(0, &[rat(1, 3), rat(2, 1)]).unwrap(),
        ];
        for n in 0..=3 {
            let r = annihilation_check(n, &periods).unwrap();
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.words_checked, multisets(2, n + 1).len());
        }
    }

    #[test]
    fn sharpness_m0() {
        let periods = vec![
            Paravector::from_coords(0, &[rat(1, 1), rat(0, 1)]).unwrap(),
            Paravector::from_coords(0, &[rat(0, 1), rat(1, 1)]).unwrap(),
        ];
        for n in 1..=3 {
            let w = sharpness_witnesses(n, &periods).unwrap().unwrap();
            assert_eq!(w.len(), multisets(2, n).len());
            assert!(w.iter().all(|w| !w.image.is_zero()));
        }
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(4, 3).len(), 20);
        assert_eq!(multisets(2, 5).len(), 6);
        assert_eq!(exponent_vectors(4, 2).len(), 10);
    }

    #[test]
    fn factorization_identities_hold() {
        for n in [2, 4, 6] {
            let checks = factorization_identities(n);
            let bad: Vec<_> = checks.iter().filter(|c| !c.holds).collect();
            assert!(bad.is_empty(), "{bad:?}");
        }
    }

    #[test]
    fn translation_inverts_with_negated_step() {
        let lambda = Paravector::from_coords(1, &[rat(1, 1), rat(2, 1), rat(-1, 1), rat(1, 2)]).unwrap();
        let h = Paravector::from_coords(1, &[rat(1, 4), rat(0, 1), rat(3, 1), rat(-2, 1)]).unwrap();
        let p = CliffordPoly::lambda_monomial(&lambda, 3);
        assert_eq!(p.translate(&h).translate(&-&h), p);
    }

    fn factor_strategy() -> impl Strategy<Value = Factor> {
        (0..4usize, 1..=4usize).prop_map(|(k, j)| {
            let kind = [FactorKind::IMinusE, FactorKind::IPlusE, FactorKind::IMinusESq, FactorKind::E][k];
            Factor::new(kind, j)
        })
    }

    proptest! {
        #[test]
        fn expansion_is_order_independent(factors in prop::collection::vec(factor_strategy(), 0..6), seed in any::<u64>()) {
            let mut shuffled = factors.clone();
            let len = shuffled.len();
            if len > 1 {
                for i in 0..len {
                    let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % len as u64) as usize;
                    shuffled.swap(i, j);
                }
            }
            prop_assert_eq!(expand(&OperatorExpr::new(factors)), expand(&OperatorExpr::new(shuffled)));
        }

        #[test]
        fn difference_products_have_alternating_binomial_signs(set in prop::collection::btree_set(1..=6usize, 0..6)) {
            let set: Vec<usize> = set.into_iter().collect();
            let w = difference_word(&set);
            prop_assert_eq!(w.len(), 1 << set.len());
            for (c, s) in w.terms() {
                prop_assert_eq!(*c, if s.degree() % 2 == 0 { 1 } else { -1 });
            }
        }

        #[test]
        fn degree_always_drops(coords in prop::collection::vec(-3i64..=3, 4), n in 1usize..=4, j in 1usize..=4) {
            let lambda = Paravector::from_coords(1, &coords.iter().map(|&c| rat(c, 1)).collect::<Vec<_>>()).unwrap();
            prop_assume!(!lambda.is_zero());
            let p = CliffordianPolynomial::new(1, vec![(BigRational::one(), lambda, n)]);
            let r = degree_reduction_check(j, &p, &periods_skew()).unwrap();
            prop_assert!(r.holds());
            if let Some(a) = r.after {
                prop_assert!(a + 1 <= n);
            }
        }
    }

    #[test]
    fn negative_terms_have_signed_display() {
        let w = TranslationWord::from_terms([(-3, Shift::single(2, 1)), (2, Shift::identity())]);
        assert_eq!(w.to_string(), "+2·I −3·E2");
        assert!(w.terms().iter().all(|t| t.0 != 0));
        assert_eq!(TranslationWord::zero().to_string(), "0");
    }
}
