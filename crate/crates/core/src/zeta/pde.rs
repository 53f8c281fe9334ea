use std::collections::HashMap;

use crate::clifford::{Multivector, Paravector, MAX_PARA};
use crate::error::{Error, Result};
use crate::function::Evaluate;

/// Finite-difference value of `D Delta^m f` together with a cancellation scale.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicResidual {
    pub residual: Multivector<f64>,
    /// `sum_i |d_i Delta^m f|`, the size of the terms that cancel in `D`.
    pub scale: f64,
}

impl HolomorphicResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual.norm_inf()
        } else {
            self.residual.norm_inf() / self.scale
        }
    }
}

type Offset = [i32; MAX_PARA];

struct Stencil<'a, F: ?Sized> {
    f: &'a F,
    x: &'a Paravector<f64>,
    h: f64,
    dim: usize,
    cache: HashMap<Offset, Multivector<f64>>,
}

impl<F: Evaluate<f64> + ?Sized> Stencil<'_, F> {
    fn value(&mut self, off: &Offset) -> Result<Multivector<f64>> {
        if let Some(v) = self.cache.get(off) {
            return Ok(v.clone());
        }
        let coords: Vec<f64> = (0..self.dim)
            .map(|a| self.x.coord(a) + self.h * off[a] as f64)
            .collect();
        let p = Paravector::from_coords(self.x.m(), &coords)?;
        let v = self.f.eval(&p)?.value;
        self.cache.insert(*off, v.clone());
        Ok(v)
    }

    /// `Delta^k f` at `x + h off` by iterated three-point second differences.
    fn laplacian_power(&mut self, off: &Offset, k: usize) -> Result<Multivector<f64>> {
        if k == 0 {
            return self.value(off);
        }
        let centre = self.laplacian_power(off, k - 1)?;
        let mut acc = Multivector::zero(self.x.m());
        for a in 0..self.dim {
            let mut plus = *off;
            plus[a] += 1;
            let mut minus = *off;
            minus[a] -= 1;
            acc += &self.laplacian_power(&plus, k - 1)?;
            acc += &self.laplacian_power(&minus, k - 1)?;
            acc.add_scaled(&-2.0, &centre);
        }
        Ok(acc.scale(&(1.0 / (self.h * self.h))))
    }
}

/// `D Delta^m f` at `x` with `D = sum_i e_i d_i` by central differences of
/// step `h` (`e_0 = 1`).
pub fn check_holomorphic_cliffordian<F: Evaluate<f64> + ?Sized>(
    f: &F,
    x: &Paravector<f64>,
    h: f64,
) -> Result<HolomorphicResidual> {
    let m = f.m();
    if x.m() != m {
        return Err(Error::SignatureMismatch { left: x.m(), right: m });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if let Some(d) = f.pole_distance(x) {
        let reach = (2 * m + 1) as f64 * h;
        if d <= reach {
            return Err(Error::InvalidArgument(format!(
                "step {h} too large: pole at distance {d} is within the stencil reach {reach}"
            )));
        }
    }
    let dim = x.dim();
    let mut st = Stencil {
        f,
        x,
        h,
        dim,
        cache: HashMap::new(),
    };
    let mut residual = Multivector::zero(m);
    let mut scale = 0.0;
    for i in 0..dim {
        let mut plus = [0; MAX_PARA];
        plus[i] = 1;
        let mut minus = [0; MAX_PARA];
        minus[i] = -1;
        let g = (&st.laplacian_power(&plus, m)? - &st.laplacian_power(&minus, m)?).scale(&(0.5 / h));
        scale += g.norm_inf();
        residual += &g.left_mul_paravector(&Paravector::basis(m, i));
    }
    Ok(HolomorphicResidual { residual, scale })
}
