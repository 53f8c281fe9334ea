//! Evaluatable functions `S (+) V -> R(0,2m+1)` and linear combinations of
//! their translates.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::clifford::{Multivector, Paravector, Scalar};
use crate::error::{Error, Result};

/// A truncated-series value together with its truncation bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue<T: Scalar> {
    pub value: Multivector<T>,
    /// Outermost shell that was summed (0 for closed-form values).
    pub radius_used: u32,
    /// Infinity-norm estimate of the omitted tail.
    pub tail_estimate: f64,
}

impl<T: Scalar> SeriesValue<T> {
    pub fn exact(value: Multivector<T>) -> Self {
        Self {
            value,
            radius_used: 0,
            tail_estimate: 0.0,
        }
    }

    /// `sum c_i v_i`, with tails adding as `sum |c_i| tail_i`.
    pub fn combine<'a>(m: usize, terms: impl IntoIterator<Item = (T, &'a SeriesValue<T>)>) -> Self
    where
        T: 'a,
    {
        let mut value = Multivector::zero(m);
        let mut tail = 0.0;
        let mut radius = u32::MAX;
        for (c, v) in terms {
            tail += c.magnitude() * v.tail_estimate;
            radius = radius.min(v.radius_used);
            value.add_scaled(&c, &v.value);
        }
        Self {
            value,
            radius_used: if radius == u32::MAX { 0 } else { radius },
            tail_estimate: tail,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            value: &self.value - &other.value,
            radius_used: self.radius_used.min(other.radius_used),
            tail_estimate: self.tail_estimate + other.tail_estimate,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: &self.value + &other.value,
            radius_used: self.radius_used.min(other.radius_used),
            tail_estimate: self.tail_estimate + other.tail_estimate,
        }
    }
}

/// A function that can be sampled at paravector arguments.
pub trait Evaluate<T: Scalar>: Send + Sync {
    fn m(&self) -> usize;

    fn eval(&self, x: &Paravector<T>) -> Result<SeriesValue<T>>;

    /// Values truncated at each of `radii` (ascending). Functions without a
    /// series repeat their exact value.
    fn eval_at_radii(&self, x: &Paravector<T>, radii: &[u32]) -> Result<Vec<SeriesValue<T>>> {
        let v = self.eval(x)?;
        Ok(radii.iter().map(|_| v.clone()).collect())
    }

    /// Distance from a real point to the nearest singularity, when known.
    fn pole_distance(&self, _x: &Paravector<f64>) -> Option<f64> {
        None
    }
}

impl<T: Scalar, F: Evaluate<T> + ?Sized> Evaluate<T> for Arc<F> {
    fn m(&self) -> usize {
        (**self).m()
    }
    fn eval(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        (**self).eval(x)
    }
    fn eval_at_radii(&self, x: &Paravector<T>, radii: &[u32]) -> Result<Vec<SeriesValue<T>>> {
        (**self).eval_at_radii(x, radii)
    }
    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        (**self).pole_distance(x)
    }
}

impl<T: Scalar, F: Evaluate<T> + ?Sized> Evaluate<T> for &F {
    fn m(&self) -> usize {
        (**self).m()
    }
    fn eval(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        (**self).eval(x)
    }
    fn eval_at_radii(&self, x: &Paravector<T>, radii: &[u32]) -> Result<Vec<SeriesValue<T>>> {
        (**self).eval_at_radii(x, radii)
    }
    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        (**self).pole_distance(x)
    }
}

/// Closure adapter for exact (non-series) functions.
pub struct FnEval<F> {
    m: usize,
    f: F,
}

impl<F> FnEval<F> {
    pub fn new(m: usize, f: F) -> Self {
        Self { m, f }
    }
}

impl<T, F> Evaluate<T> for FnEval<F>
where
    T: Scalar,
    F: Fn(&Paravector<T>) -> Result<Multivector<T>> + Send + Sync,
{
    fn m(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        (self.f)(x).map(SeriesValue::exact)
    }
}

/// `x -> sum_i c_i f(x + s_i)`.
#[derive(Clone)]
pub struct ShiftSum<T: Scalar> {
    inner: Arc<dyn Evaluate<T>>,
    terms: Vec<(T, Paravector<T>)>,
}

impl<T: Scalar> ShiftSum<T> {
    pub fn new(inner: Arc<dyn Evaluate<T>>, terms: Vec<(T, Paravector<T>)>) -> Self {
        Self { inner, terms }
    }

    pub fn terms(&self) -> &[(T, Paravector<T>)] {
        &self.terms
    }

    pub fn inner(&self) -> &Arc<dyn Evaluate<T>> {
        &self.inner
    }
}

impl<T: Scalar> Evaluate<T> for ShiftSum<T> {
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn eval(&self, x: &Paravector<T>) -> Result<SeriesValue<T>> {
        let mut values = Vec::with_capacity(self.terms.len());
        for (c, s) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let v = self.inner.eval(&(x + s)).map_err(|e| annotate(e, s))?;
            values.push((c.clone(), v));
        }
        Ok(SeriesValue::combine(
            self.m(),
            values.iter().map(|(c, v)| (c.clone(), v)),
        ))
    }

    fn eval_at_radii(&self, x: &Paravector<T>, radii: &[u32]) -> Result<Vec<SeriesValue<T>>> {
        let mut values = Vec::with_capacity(self.terms.len());
        for (c, s) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let v = self
                .inner
                .eval_at_radii(&(x + s), radii)
                .map_err(|e| annotate(e, s))?;
            values.push((c.clone(), v));
        }
        Ok((0..radii.len())
            .map(|i| {
                SeriesValue::combine(self.m(), values.iter().map(|(c, v)| (c.clone(), &v[i])))
            })
            .collect())
    }

    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (c, s) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let coords = s.coords().iter().map(Scalar::to_real).collect::<Option<Vec<_>>>()?;
            let shift = Paravector::from_coords(s.m(), &coords).ok()?;
            let d = self.inner.pole_distance(&(x + &shift))?;
            best = Some(best.map_or(d, |b| b.min(d)));
        }
        best
    }
}

fn annotate<T: Scalar>(e: Error, s: &Paravector<T>) -> Error {
    match e {
        Error::Pole { point, detail } => Error::Pole {
            point,
            detail: format!("{detail} (translate by {s:?})"),
        },
        other => other,
    }
}

type MemoKey = (Vec<u64>, Vec<u32>);

/// Caches real-argument evaluations by the exact bit pattern of the point.
/// Translates of one function family hit the same points over and over.
pub struct Memo<F> {
    inner: F,
    cache: Mutex<HashMap<MemoKey, Vec<SeriesValue<f64>>>>,
}

impl<F: Evaluate<f64>> Memo<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn cached_points(&self) -> usize {
        self.cache.lock().expect("memo cache").len()
    }

    fn lookup(&self, x: &Paravector<f64>, radii: &[u32], compute: impl FnOnce() -> Result<Vec<SeriesValue<f64>>>) -> Result<Vec<SeriesValue<f64>>> {
        let key = (x.coords().iter().map(|c| c.to_bits()).collect(), radii.to_vec());
        if let Some(v) = self.cache.lock().expect("memo cache").get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.cache.lock().expect("memo cache").insert(key, v.clone());
        Ok(v)
    }
}

impl<F: Evaluate<f64>> Evaluate<f64> for Memo<F> {
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn eval(&self, x: &Paravector<f64>) -> Result<SeriesValue<f64>> {
        let mut v = self.lookup(x, &[], || Ok(vec![self.inner.eval(x)?]))?;
        Ok(v.pop().expect("one value cached"))
    }

    fn eval_at_radii(&self, x: &Paravector<f64>, radii: &[u32]) -> Result<Vec<SeriesValue<f64>>> {
        self.lookup(x, radii, || self.inner.eval_at_radii(x, radii))
    }

    fn pole_distance(&self, x: &Paravector<f64>) -> Option<f64> {
        self.inner.pole_distance(x)
    }
}
