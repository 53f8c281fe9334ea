//! Arithmetic in the anti-Euclidean Clifford algebra `R(0, 2m+1)`.
//!
//! Generators `e_1 .. e_{2m+1}` anticommute and square to `-1`; `e_0 = 1`.
//! A basis blade is stored as a bitmask over the generators (bit `i - 1`
//! stands for `e_i`), and a multivector keeps a dense array of
//! `2^(2m+1)` coefficients. The coefficient type is generic so the same
//! product kernel serves real, complex and exact rational arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `m`.
pub const MAX_M: usize = 2;
/// Blade count of the largest supported algebra, `2^(2 MAX_M + 1)`.
pub const MAX_BLADES: usize = 1 << (2 * MAX_M + 1);
/// Coordinate count of the largest supported paravector space, `2 MAX_M + 2`.
pub const MAX_PARA: usize = 2 * MAX_M + 2;

/// Coefficient ring of a multivector.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Absolute value, as a float (used for norms and tail estimates only).
    fn magnitude(&self) -> f64;
    /// The value as a real number, if it is one.
    fn to_real(&self) -> Option<f64>;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    #[inline]
    fn to_real(&self) -> Option<f64> {
        Some(*self)
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    #[inline]
    fn to_real(&self) -> Option<f64> {
        (self.im == 0.0).then_some(self.re)
    }
}

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().map_or(f64::INFINITY, f64::abs)
    }
    fn to_real(&self) -> Option<f64> {
        self.to_f64()
    }
}

/// Exact rational built from a small integer ratio.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Which coefficient field a lattice configuration asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

/// `R(0, 2m+1)` together with the coefficient field in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraSignature {
    pub m: usize,
    pub scalar_field: ScalarField,
}

impl AlgebraSignature {
    pub fn new(m: usize, scalar_field: ScalarField) -> Result<Self> {
        if m > MAX_M {
            return Err(Error::UnsupportedAlgebra(m));
        }
        Ok(Self { m, scalar_field })
    }

    pub fn real(m: usize) -> Result<Self> {
        Self::new(m, ScalarField::Real)
    }

    pub fn generator_count(&self) -> usize {
        2 * self.m + 1
    }

    pub fn blade_count(&self) -> usize {
        blade_count(self.m)
    }

    /// Dimension of the paravector space `S (+) V`.
    pub fn paravector_dim(&self) -> usize {
        2 * self.m + 2
    }
}

#[inline]
pub(crate) fn blade_count(m: usize) -> usize {
    1 << (2 * m + 1)
}

/// Blade index of the `a`-th paravector basis element (`a = 0` is the unit).
#[inline]
pub(crate) fn para_blade(a: usize) -> usize {
    if a == 0 {
        0
    } else {
        1 << (a - 1)
    }
}

const fn blade_sign(a: usize, b: usize) -> i8 {
    // transpositions needed to sort e_A e_B, then e_i^2 = -1 per shared generator
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

const fn build_sign_table() -> [[i8; MAX_BLADES]; MAX_BLADES] {
    let mut table = [[0i8; MAX_BLADES]; MAX_BLADES];
    let mut a = 0;
    while a < MAX_BLADES {
        let mut b = 0;
        while b < MAX_BLADES {
            table[a][b] = blade_sign(a, b);
            b += 1;
        }
        a += 1;
    }
    table
}

/// `SIGN[a][b]` is the sign of `e_A e_B = SIGN[a][b] * e_(A xor B)`.
pub(crate) static SIGN: [[i8; MAX_BLADES]; MAX_BLADES] = build_sign_table();

fn check_m(m: usize) -> Result<()> {
    if m > MAX_M {
        Err(Error::UnsupportedAlgebra(m))
    } else {
        Ok(())
    }
}

#[inline]
fn accumulate<T: Scalar>(slot: &mut T, sign: i8, term: T) {
    let cur = std::mem::replace(slot, T::zero());
    *slot = if sign > 0 { cur + term } else { cur - term };
}

/// Element of `R(0, 2m+1)` with coefficients in `T`.
#[derive(Clone, PartialEq)]
pub struct Multivector<T> {
    m: u8,
    coeffs: [T; MAX_BLADES],
}

impl<T: Scalar> Multivector<T> {
    pub fn zero(m: usize) -> Self {
        assert!(m <= MAX_M, "m = {m} exceeds dense storage");
        Self {
            m: m as u8,
            coeffs: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn scalar(m: usize, s: T) -> Self {
        let mut out = Self::zero(m);
        out.coeffs[0] = s;
        out
    }

    pub fn one(m: usize) -> Self {
        Self::scalar(m, T::one())
    }

    /// Basis blade `e_A` with the given bitmask and coefficient.
    pub fn blade(m: usize, mask: usize, coeff: T) -> Result<Self> {
        check_m(m)?;
        if mask >= blade_count(m) {
            return Err(Error::InvalidArgument(format!(
                "blade mask {mask:#b} outside R(0,{})",
                2 * m + 1
            )));
        }
        let mut out = Self::zero(m);
        out.coeffs[mask] = coeff;
        Ok(out)
    }

    /// Generator `e_i`, `1 <= i <= 2m+1`.
    pub fn generator(m: usize, i: usize) -> Result<Self> {
        if i == 0 || i > 2 * m + 1 {
            return Err(Error::InvalidArgument(format!(
                "generator e_{i} outside R(0,{})",
                2 * m + 1
            )));
        }
        Self::blade(m, 1 << (i - 1), T::one())
    }

    pub fn from_coeffs(m: usize, coeffs: Vec<T>) -> Result<Self> {
        check_m(m)?;
        if coeffs.len() != blade_count(m) {
            return Err(Error::DimensionMismatch {
                expected: blade_count(m),
                got: coeffs.len(),
            });
        }
        let mut out = Self::zero(m);
        for (slot, c) in out.coeffs.iter_mut().zip(coeffs) {
            *slot = c;
        }
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn blade_count(&self) -> usize {
        blade_count(self.m())
    }

    /// Coefficients indexed by blade bitmask.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs[..self.blade_count()]
    }

    pub fn coeff(&self, mask: usize) -> &T {
        &self.coeffs[mask]
    }

    pub fn scalar_part(&self) -> &T {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(Zero::is_zero)
    }

    /// Projection onto grade `k`.
    pub fn grade(&self, k: u32) -> Self {
        let mut out = Self::zero(self.m());
        for (mask, c) in self.coeffs().iter().enumerate() {
            if mask.count_ones() == k {
                out.coeffs[mask] = c.clone();
            }
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs()
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().take(self.blade_count()) {
            *c = c.clone() * s.clone();
        }
        out
    }

    /// Clifford product, rejecting operands from different algebras.
    pub fn product(&self, rhs: &Self) -> Result<Self> {
        if self.m != rhs.m {
            return Err(Error::SignatureMismatch {
                left: self.m(),
                right: rhs.m(),
            });
        }
        Ok(self.geometric(rhs))
    }

    fn geometric(&self, rhs: &Self) -> Self {
        let n = self.blade_count();
        let mut out = Self::zero(self.m());
        for i in 0..n {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            let row = &SIGN[i];
            for j in 0..n {
                let b = &rhs.coeffs[j];
                if b.is_zero() {
                    continue;
                }
                accumulate(&mut out.coeffs[i ^ j], row[j], a.clone() * b.clone());
            }
        }
        out
    }

    /// `self * p` for a paravector `p`, touching only the `2m+2` blades of `p`.
    pub fn mul_paravector(&self, p: &Paravector<T>) -> Self {
        debug_assert_eq!(self.m, p.m);
        let mut out = Self::zero(self.m());
        for i in 0..self.blade_count() {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for (k, pc) in p.coords().iter().enumerate() {
                let b = para_blade(k);
                accumulate(&mut out.coeffs[i ^ b], SIGN[i][b], a.clone() * pc.clone());
            }
        }
        out
    }

    /// `p * self` for a paravector `p`.
    pub fn left_mul_paravector(&self, p: &Paravector<T>) -> Self {
        debug_assert_eq!(self.m, p.m);
        let mut out = Self::zero(self.m());
        for (k, pc) in p.coords().iter().enumerate() {
            let b = para_blade(k);
            for i in 0..self.blade_count() {
                let a = &self.coeffs[i];
                if a.is_zero() {
                    continue;
                }
                accumulate(&mut out.coeffs[b ^ i], SIGN[b][i], pc.clone() * a.clone());
            }
        }
        out
    }

    /// `self * e_B` for a basis blade: a signed permutation of coefficients.
    pub fn mul_blade(&self, mask: usize) -> Self {
        let mut out = Self::zero(self.m());
        for i in 0..self.blade_count() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            out.coeffs[i ^ mask] = if SIGN[i][mask] > 0 {
                c.clone()
            } else {
                -c.clone()
            };
        }
        out
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: &T, other: &Self) {
        for (slot, c) in self.coeffs.iter_mut().zip(other.coeffs()) {
            if !c.is_zero() {
                *slot = slot.clone() + s.clone() * c.clone();
            }
        }
    }

    /// Paravector part (grades 0 and 1); the other grades are dropped.
    pub fn paravector_part(&self) -> Paravector<T> {
        let m = self.m();
        let mut p = Paravector::zero(m);
        for a in 0..2 * m + 2 {
            p.coords[a] = self.coeffs[para_blade(a)].clone();
        }
        p
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Multivector<U> {
        let mut out = Multivector::<U>::zero(self.m());
        for (slot, c) in out.coeffs.iter_mut().zip(self.coeffs()) {
            *slot = f(c);
        }
        out
    }
}

impl Multivector<f64> {
    pub fn to_complex(&self) -> Multivector<Complex64> {
        self.map(|&c| Complex64::new(c, 0.0))
    }
}

impl<T: Scalar> fmt::Debug for Multivector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multivector")
            .field("m", &self.m)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

/// Label of a blade, e.g. `1`, `e2`, `e13`.
pub fn blade_label(mask: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut s = String::from("e");
    for i in 0..MAX_BLADES.trailing_zeros() as usize {
        if mask & (1 << i) != 0 {
            s.push_str(&(i + 1).to_string());
        }
    }
    s
}

impl<T: Scalar + fmt::Display> fmt::Display for Multivector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c}){}", blade_label(mask))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! mv_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<T: Scalar> $tr<&Multivector<T>> for &Multivector<T> {
            type Output = Multivector<T>;
            fn $method(self, rhs: &Multivector<T>) -> Multivector<T> {
                assert_eq!(self.m, rhs.m, "multivectors from different algebras");
                let mut out = self.clone();
                for (slot, c) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
                    *slot = slot.clone() $op c.clone();
                }
                out
            }
        }
        impl<T: Scalar> $tr for Multivector<T> {
            type Output = Multivector<T>;
            fn $method(self, rhs: Multivector<T>) -> Multivector<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

mv_binop!(Add, add, +);
mv_binop!(Sub, sub, -);

impl<T: Scalar> AddAssign<&Multivector<T>> for Multivector<T> {
    fn add_assign(&mut self, rhs: &Multivector<T>) {
        assert_eq!(self.m, rhs.m, "multivectors from different algebras");
        for (slot, c) in self.coeffs.iter_mut().zip(rhs.coeffs()) {
            if !c.is_zero() {
                *slot = slot.clone() + c.clone();
            }
        }
    }
}

impl<T: Scalar> SubAssign<&Multivector<T>> for Multivector<T> {
    fn sub_assign(&mut self, rhs: &Multivector<T>) {
        assert_eq!(self.m, rhs.m, "multivectors from different algebras");
        for (slot, c) in self.coeffs.iter_mut().zip(rhs.coeffs()) {
            if !c.is_zero() {
                *slot = slot.clone() - c.clone();
            }
        }
    }
}

impl<T: Scalar> Mul<&Multivector<T>> for &Multivector<T> {
    type Output = Multivector<T>;
    fn mul(self, rhs: &Multivector<T>) -> Multivector<T> {
        assert_eq!(self.m, rhs.m, "multivectors from different algebras");
        self.geometric(rhs)
    }
}

impl<T: Scalar> Mul for Multivector<T> {
    type Output = Multivector<T>;
    fn mul(self, rhs: Multivector<T>) -> Multivector<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Neg for Multivector<T> {
    type Output = Multivector<T>;
    fn neg(mut self) -> Multivector<T> {
        for c in self.coeffs.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl<T: Scalar> Neg for &Multivector<T> {
    type Output = Multivector<T>;
    fn neg(self) -> Multivector<T> {
        -self.clone()
    }
}

/// Element `x0 + x1 e_1 + ... + x_{2m+1} e_{2m+1}` of `S (+) V`.
#[derive(Clone, PartialEq)]
pub struct Paravector<T> {
    m: u8,
    coords: [T; MAX_PARA],
}

impl<T: Scalar> Paravector<T> {
    pub fn zero(m: usize) -> Self {
        assert!(m <= MAX_M, "m = {m} exceeds dense storage");
        Self {
            m: m as u8,
            coords: std::array::from_fn(|_| T::zero()),
        }
    }

    /// Scalar part `x0` and vector part along `e_1 .. e_{2m+1}`.
    pub fn new(m: usize, x0: T, vector: &[T]) -> Result<Self> {
        check_m(m)?;
        if vector.len() != 2 * m + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * m + 1,
                got: vector.len(),
            });
        }
        let mut p = Self::zero(m);
        p.coords[0] = x0;
        for (slot, v) in p.coords[1..].iter_mut().zip(vector) {
            *slot = v.clone();
        }
        Ok(p)
    }

    /// From all `2m+2` coordinates `(x0, x1, ..., x_{2m+1})`.
    pub fn from_coords(m: usize, coords: &[T]) -> Result<Self> {
        check_m(m)?;
        if coords.len() != 2 * m + 2 {
            return Err(Error::DimensionMismatch {
                expected: 2 * m + 2,
                got: coords.len(),
            });
        }
        let mut p = Self::zero(m);
        for (slot, v) in p.coords.iter_mut().zip(coords) {
            *slot = v.clone();
        }
        Ok(p)
    }

    pub fn scalar(m: usize, x0: T) -> Self {
        let mut p = Self::zero(m);
        p.coords[0] = x0;
        p
    }

    /// The `a`-th basis paravector: `1` for `a = 0`, `e_a` otherwise.
    pub fn basis(m: usize, a: usize) -> Self {
        assert!(a < 2 * m + 2, "basis index {a} out of range");
        let mut p = Self::zero(m);
        p.coords[a] = T::one();
        p
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn dim(&self) -> usize {
        2 * self.m() + 2
    }

    pub fn coords(&self) -> &[T] {
        &self.coords[..self.dim()]
    }

    pub fn coord(&self, a: usize) -> &T {
        &self.coords[a]
    }

    pub fn x0(&self) -> &T {
        &self.coords[0]
    }

    pub fn vector(&self) -> &[T] {
        &self.coords[1..self.dim()]
    }

    /// `x0^2 + |v|^2`, which equals `x * conj(x)` (algebraic over complex scalars).
    pub fn norm_sq(&self) -> T {
        self.coords()
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    /// Euclidean length of the coefficient vector (Hermitian for complex).
    pub fn modulus(&self) -> f64 {
        self.coords()
            .iter()
            .map(|c| {
                let a = c.magnitude();
                a * a
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn conj(&self) -> Self {
        let mut p = self.clone();
        let d = p.dim();
        for c in p.coords[1..d].iter_mut() {
            *c = -c.clone();
        }
        p
    }

    /// `(x0 - v) / (x0^2 + |v|^2)`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm_sq();
        if n.is_zero() || !(n.magnitude() > 0.0) {
            return Err(Error::NotInvertible);
        }
        let mut p = self.conj();
        let d = p.dim();
        for c in p.coords[..d].iter_mut() {
            *c = c.clone() / n.clone();
        }
        Ok(p)
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut p = self.clone();
        let d = p.dim();
        for c in p.coords[..d].iter_mut() {
            *c = c.clone() * s.clone();
        }
        p
    }

    pub fn to_multivector(&self) -> Multivector<T> {
        let mut out = Multivector::zero(self.m());
        for (a, c) in self.coords().iter().enumerate() {
            out.coeffs[para_blade(a)] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(Zero::is_zero)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Paravector<U> {
        let mut out = Paravector::<U>::zero(self.m());
        for (slot, c) in out.coords.iter_mut().zip(self.coords()) {
            *slot = f(c);
        }
        out
    }
}

impl Paravector<f64> {
    pub fn lift<T: Scalar>(&self) -> Paravector<T> {
        self.map(|&c| T::from_f64(c))
    }
}

impl<T: Scalar> fmt::Debug for Paravector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Paravector").field(&self.coords()).finish()
    }
}

macro_rules! pv_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<T: Scalar> $tr<&Paravector<T>> for &Paravector<T> {
            type Output = Paravector<T>;
            fn $method(self, rhs: &Paravector<T>) -> Paravector<T> {
                assert_eq!(self.m, rhs.m, "paravectors from different algebras");
                let mut out = self.clone();
                for (slot, c) in out.coords.iter_mut().zip(rhs.coords.iter()) {
                    *slot = slot.clone() $op c.clone();
                }
                out
            }
        }
        impl<T: Scalar> $tr for Paravector<T> {
            type Output = Paravector<T>;
            fn $method(self, rhs: Paravector<T>) -> Paravector<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

pv_binop!(Add, add, +);
pv_binop!(Sub, sub, -);

impl<T: Scalar> Neg for Paravector<T> {
    type Output = Paravector<T>;
    fn neg(mut self) -> Paravector<T> {
        for c in self.coords.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl<T: Scalar> Neg for &Paravector<T> {
    type Output = Paravector<T>;
    fn neg(self) -> Paravector<T> {
        -self.clone()
    }
}

/// Clifford product of two multivectors from the same algebra.
pub fn clifford_product<T: Scalar>(a: &Multivector<T>, b: &Multivector<T>) -> Result<Multivector<T>> {
    a.product(b)
}

/// Inverse of a nonzero paravector.
pub fn paravector_inverse<T: Scalar>(x: &Paravector<T>) -> Result<Paravector<T>> {
    x.inverse()
}

/// The holomorphic Cliffordian monomial `(lambda x)^n lambda`.
pub fn lambda_power<T: Scalar>(
    lambda: &Paravector<T>,
    x: &Paravector<T>,
    n: usize,
) -> Result<Multivector<T>> {
    if lambda.m != x.m {
        return Err(Error::SignatureMismatch {
            left: lambda.m(),
            right: x.m(),
        });
    }
    let mut acc = lambda.to_multivector();
    for _ in 0..n {
        acc = acc.mul_paravector(x).mul_paravector(lambda);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(m: usize, i: usize) -> Multivector<f64> {
        Multivector::generator(m, i).unwrap()
    }

    #[test]
    fn generators_square_to_minus_one() {
        for m in 0..=MAX_M {
            for i in 1..=2 * m + 1 {
                assert_eq!(&e(m, i) * &e(m, i), Multivector::scalar(m, -1.0));
            }
        }
    }

    #[test]
    fn distinct_generators_anticommute() {
        let e12 = Multivector::blade(1, 0b011, 1.0).unwrap();
        assert_eq!(&e(1, 1) * &e(1, 2), e12);
        assert_eq!(&e(1, 2) * &e(1, 1), -e12);
        for i in 1..=5 {
            for j in 1..=5 {
                let sym = &(&e(2, i) * &e(2, j)) + &(&e(2, j) * &e(2, i));
                let expect = if i == j { -2.0 } else { 0.0 };
                assert_eq!(sym, Multivector::scalar(2, expect), "e{i} e{j}");
            }
        }
    }

    #[test]
    fn unit_is_neutral() {
        let a = Multivector::from_coeffs(1, (0..8).map(|k| k as f64 - 3.5).collect()).unwrap();
        assert_eq!(&Multivector::one(1) * &a, a);
        assert_eq!(&a * &Multivector::one(1), a);
    }

    #[test]
    fn pseudoscalar_of_r03_is_central() {
        let e123 = Multivector::blade(1, 0b111, 1.0).unwrap();
        for i in 1..=3 {
            assert_eq!(&e123 * &e(1, i), &e(1, i) * &e123);
        }
        assert_eq!(&e123 * &e123, Multivector::scalar(1, 1.0));
    }

    #[test]
    fn product_rejects_mixed_algebras() {
        let a = Multivector::<f64>::one(0);
        let b = Multivector::<f64>::one(1);
        assert_eq!(
            a.product(&b),
            Err(Error::SignatureMismatch { left: 0, right: 1 })
        );
    }

    #[test]
    fn inverse_examples() {
        let two = Paravector::scalar(1, 2.0);
        assert_eq!(two.inverse().unwrap(), Paravector::scalar(1, 0.5));

        let x = Paravector::new(1, 1.0, &[1.0, 0.0, 0.0]).unwrap();
        let expect = Paravector::new(1, 0.5, &[-0.5, 0.0, 0.0]).unwrap();
        assert_eq!(x.inverse().unwrap(), expect);

        let e1 = Paravector::new(1, 0.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e1.inverse().unwrap(), -e1);

        assert_eq!(Paravector::<f64>::zero(1).inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn lambda_power_examples() {
        let x = Paravector::new(1, 0.3, &[-1.0, 2.0, 0.5]).unwrap();
        let one = Paravector::scalar(1, 1.0);
        assert_eq!(lambda_power(&one, &x, 1).unwrap(), x.to_multivector());

        let l = Paravector::scalar(0, 2.0);
        let x = Paravector::scalar(0, 3.0);
        assert_eq!(lambda_power(&l, &x, 2).unwrap(), Multivector::scalar(0, 72.0));
        assert_eq!(lambda_power(&l, &x, 0).unwrap(), l.to_multivector());

        let e1 = Paravector::new(1, 0.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(lambda_power(&e1, &e1, 1).unwrap(), (-e1).to_multivector());
    }

    #[test]
    fn paravector_products_leave_paravector_space() {
        // w^-1 x leaves the paravector space; the palindrome (w^-1 x) w^-1 returns to it
        let w = Paravector::new(1, 1.0, &[0.0, 1.0, 0.0]).unwrap();
        let x = Paravector::new(1, 0.0, &[1.0, 0.0, 0.0]).unwrap();
        let winv = w.inverse().unwrap();
        let half = winv.to_multivector().mul_paravector(&x);
        assert!((half.grade(2).norm_inf() - 0.5).abs() < 1e-15, "{half:?}");
        let t = lambda_power(&winv, &x, 1).unwrap();
        assert_eq!(t.paravector_part().to_multivector(), t);
        assert_eq!(*t.coeff(0b001), 0.5);
    }

    fn small_mv(m: usize) -> impl Strategy<Value = Multivector<BigRational>> {
        prop::collection::vec(-3i64..=3, blade_count(m))
            .prop_map(move |v| Multivector::from_coeffs(m, v.into_iter().map(|k| rat(k, 1)).collect()).unwrap())
    }

    fn para(m: usize) -> impl Strategy<Value = Paravector<f64>> {
        (prop::collection::vec(-1.0f64..1.0, 2 * m + 2), -6i32..6).prop_map(move |(v, e)| {
            let s = 10f64.powi(e);
            Paravector::from_coords(m, &v.iter().map(|c| c * s).collect::<Vec<_>>()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_is_associative_exactly(a in small_mv(1), b in small_mv(1), c in small_mv(1)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn product_is_associative_m2(a in small_mv(2), b in small_mv(2), c in small_mv(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn paravector_product_scalar_part(x in para(1), y in para(1)) {
            let xy = &x.to_multivector() * &y.to_multivector();
            let dot: f64 = x.vector().iter().zip(y.vector()).map(|(a, b)| a * b).sum();
            let expect = x.x0() * y.x0() - dot;
            prop_assert!((xy.scalar_part() - expect).abs() <= 1e-12 * (x.modulus() * y.modulus()));
        }

        #[test]
        fn inverse_is_accurate(x in para(1)) {
            prop_assume!(x.modulus() > 1e-6 && x.modulus() < 1e6);
            let prod = &x.to_multivector() * &x.inverse().unwrap().to_multivector();
            let err = (&prod - &Multivector::one(1)).norm_inf();
            prop_assert!(err <= 4.0 * f64::EPSILON, "err = {}", err);
        }
    }
}
