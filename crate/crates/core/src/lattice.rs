//! Period lattices `2 Z^N omega` and their shell enumeration.
//!
//! Lattice points are enumerated in shells of constant infinity-norm of the
//! multi-index. Inside a shell the representatives `k` (first nonzero entry
//! positive) come in lexicographic order and each is followed by `-k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{AlgebraSignature, Paravector, ScalarField};
use crate::error::{Error, Result};

/// Integer coordinates `k = (k_1, ..., k_N)` of the lattice point `2 k omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn inf_norm(&self) -> i64 {
        self.0.iter().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

impl std::ops::Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|k| -k).collect())
    }
}

/// All multi-indices of a given infinity-norm, in `k, -k` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shell {
    pub radius: u32,
    pub points: Vec<MultiIndex>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of multi-indices in `Z^n` with infinity-norm exactly `r`.
pub fn shell_size(n: usize, r: u32) -> u64 {
    if r == 0 {
        return 1;
    }
    let outer = (2 * r as u64 + 1).pow(n as u32);
    let inner = (2 * r as u64 - 1).pow(n as u32);
    outer - inner
}

/// Calls `f` on every representative of shell `r` (first nonzero entry
/// positive), in lexicographic order. Shell 0 has no representatives.
pub fn for_each_representative(n: usize, r: u32, mut f: impl FnMut(&[i64])) {
    if r == 0 || n == 0 {
        return;
    }
    let r = r as i64;
    let mut k = vec![0i64; n];
    let p = n - 1;
    if p == 0 {
        k[0] = r;
        f(&k);
        return;
    }
    for c in k[..p].iter_mut() {
        *c = -r;
    }
    loop {
        let prefix = &k[..p];
        let first_nonzero = prefix.iter().copied().find(|&c| c != 0);
        match first_nonzero {
            Some(c) if c < 0 => {}
            None => {
                k[p] = r;
                f(&k);
            }
            Some(_) => {
                if prefix.iter().any(|c| c.abs() == r) {
                    for last in -r..=r {
                        k[p] = last;
                        f(&k);
                    }
                } else {
                    k[p] = -r;
                    f(&k);
                    k[p] = r;
                    f(&k);
                }
            }
        }
        // advance the prefix odometer
        let mut i = p;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if k[i] < r {
                k[i] += 1;
                break;
            }
            k[i] = -r;
        }
    }
}

/// On-disk lattice description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub m: usize,
    pub scalar_field: ScalarField,
    pub omegas: Vec<Vec<f64>>,
}

/// `N` linearly independent half-periods in `S (+) V`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodLattice {
    signature: AlgebraSignature,
    omegas: Vec<Paravector<f64>>,
}

impl PeriodLattice {
    pub fn new(signature: AlgebraSignature, omegas: Vec<Paravector<f64>>) -> Result<Self> {
        let d = signature.paravector_dim();
        if omegas.is_empty() || omegas.len() > d {
            return Err(Error::InvalidLattice(format!(
                "need 1..={d} half-periods, got {}",
                omegas.len()
            )));
        }
        for w in &omegas {
            if w.m() != signature.m {
                return Err(Error::SignatureMismatch {
                    left: signature.m,
                    right: w.m(),
                });
            }
            if w.coords().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidLattice("non-finite half-period".into()));
            }
        }
        let lattice = Self { signature, omegas };
        let eig = symmetric_eigenvalues(lattice.gram());
        let max = eig.iter().copied().fold(0.0, f64::max);
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if !(max > 0.0) || min <= 1e-12 * max {
            return Err(Error::InvalidLattice(
                "half-periods are linearly dependent".into(),
            ));
        }
        Ok(lattice)
    }

    pub fn from_coords(m: usize, omegas: &[Vec<f64>]) -> Result<Self> {
        let sig = AlgebraSignature::real(m)?;
        let omegas = omegas
            .iter()
            .map(|w| Paravector::from_coords(m, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sig, omegas)
    }

    /// `m = 0`, `omega = (1, e_1)`.
    pub fn m0_square() -> Self {
        Self::unit(0)
    }

    /// `m = 1`, `omega = (1, e_1, e_2, e_3)`.
    pub fn m1_unit() -> Self {
        Self::unit(1)
    }

    /// Orthonormal coordinate half-periods, `N = 2m+2`.
    pub fn unit(m: usize) -> Self {
        let d = 2 * m + 2;
        let omegas = (0..d).map(|a| Paravector::basis(m, a)).collect();
        Self::new(AlgebraSignature::real(m).expect("m <= 2"), omegas).expect("unit lattice")
    }

    /// A bundled lattice by name: `m0-square` or `m1-unit`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "m0-square" => Some(Self::m0_square()),
            "m1-unit" => Some(Self::m1_unit()),
            _ => None,
        }
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.signature
    }

    pub fn with_scalar_field(mut self, field: ScalarField) -> Self {
        self.signature.scalar_field = field;
        self
    }

    pub fn m(&self) -> usize {
        self.signature.m
    }

    /// Number of half-periods `N`.
    pub fn rank(&self) -> usize {
        self.omegas.len()
    }

    pub fn dim(&self) -> usize {
        self.signature.paravector_dim()
    }

    pub fn omegas(&self) -> &[Paravector<f64>] {
        &self.omegas
    }

    /// Half-period `omega_alpha`, 1-based like the period indices.
    pub fn omega(&self, alpha: usize) -> Result<&Paravector<f64>> {
        if alpha == 0 || alpha > self.rank() {
            return Err(Error::InvalidArgument(format!(
                "period index {alpha} outside 1..={}",
                self.rank()
            )));
        }
        Ok(&self.omegas[alpha - 1])
    }

    /// `count` reproducible points `sum_a t_a omega_a` with `t_a` uniform in
    /// `[-1/2, 1/2]`, keeping at least a tenth of the minimal modulus away
    /// from the origin.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Paravector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keep_out = 0.1 * self.min_modulus();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let t: Vec<f64> = (0..self.rank()).map(|_| rng.gen_range(-0.5..=0.5)).collect();
            let x = self.combination(&t).expect("one weight per half-period");
            if x.modulus() >= keep_out {
                out.push(x);
            }
        }
        out
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    /// Lattice scaled by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let omegas = self.omegas.iter().map(|w| w.scale(&s)).collect();
        Self::new(self.signature, omegas)
    }

    /// `sum_alpha c_alpha omega_alpha` for real weights.
    pub fn combination(&self, weights: &[f64]) -> Result<Paravector<f64>> {
        if weights.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: weights.len(),
            });
        }
        let mut out = Paravector::zero(self.m());
        for (w, c) in self.omegas.iter().zip(weights) {
            out = &out + &w.scale(c);
        }
        Ok(out)
    }

    /// `2 k omega`.
    pub fn lattice_point(&self, k: &MultiIndex) -> Result<Paravector<f64>> {
        if k.0.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: k.0.len(),
            });
        }
        let mut coords = [0.0; crate::clifford::MAX_PARA];
        self.point_coords(&k.0, &mut coords);
        Paravector::from_coords(self.m(), &coords[..self.dim()])
    }

    /// Writes the coordinates of `2 k omega` into `out[..dim]`.
    #[inline]
    pub(crate) fn point_coords(&self, k: &[i64], out: &mut [f64]) {
        let d = self.dim();
        for o in out[..d].iter_mut() {
            *o = 0.0;
        }
        for (w, &ka) in self.omegas.iter().zip(k) {
            if ka == 0 {
                continue;
            }
            let f = 2.0 * ka as f64;
            for (o, c) in out[..d].iter_mut().zip(w.coords()) {
                *o += f * c;
            }
        }
    }

    /// Multi-indices of infinity-norm `r`, representatives followed by their negatives.
    pub fn enumerate_shell(&self, r: u32) -> Shell {
        let n = self.rank();
        if r == 0 {
            return Shell {
                radius: 0,
                points: vec![MultiIndex::zero(n)],
            };
        }
        let mut points = Vec::with_capacity(shell_size(n, r) as usize);
        for_each_representative(n, r, |k| {
            let k = MultiIndex(k.to_vec());
            let neg = -&k;
            points.push(k);
            points.push(neg);
        });
        Shell { radius: r, points }
    }

    /// Gram matrix `<omega_a, omega_b>` of the half-periods.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let n = self.rank();
        let mut g = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                g[a][b] = dot(self.omegas[a].coords(), self.omegas[b].coords());
            }
        }
        g
    }

    /// Smallest modulus of a nonzero lattice point.
    pub fn min_modulus(&self) -> f64 {
        // |2 k omega|^2 >= 4 lambda_min |k|^2 bounds the search radius
        let lambda_min = symmetric_eigenvalues(self.gram())
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let floor = 2.0 * lambda_min.max(0.0).sqrt();
        let mut best = f64::INFINITY;
        let mut r = 1u32;
        let mut coords = [0.0; crate::clifford::MAX_PARA];
        loop {
            for_each_representative(self.rank(), r, |k| {
                self.point_coords(k, &mut coords);
                let len = dot(&coords[..self.dim()], &coords[..self.dim()]).sqrt();
                best = best.min(len);
            });
            if floor * (r as f64 + 1.0) >= best || r >= 64 {
                return best;
            }
            r += 1;
        }
    }

    /// Distance from `x` to the nearest lattice point.
    pub fn distance_to_lattice(&self, x: &Paravector<f64>) -> f64 {
        let n = self.rank();
        let rhs: Vec<f64> = self
            .omegas
            .iter()
            .map(|w| dot(w.coords(), x.coords()))
            .collect();
        let c = solve(self.gram(), rhs).unwrap_or_else(|| vec![0.0; n]);
        let mut best = f64::INFINITY;
        let mut k = vec![0i64; n];
        let mut coords = [0.0; crate::clifford::MAX_PARA];
        // nearest candidates around the real coordinates c / 2
        for mask in 0..(1u32 << n) {
            for a in 0..n {
                let half = c[a] / 2.0;
                k[a] = if mask & (1 << a) == 0 {
                    half.floor() as i64
                } else {
                    half.ceil() as i64
                };
            }
            self.point_coords(&k, &mut coords);
            let d2: f64 = coords[..self.dim()]
                .iter()
                .zip(x.coords())
                .map(|(w, y)| (y - w) * (y - w))
                .sum();
            best = best.min(d2.sqrt());
        }
        best
    }

    pub fn to_config(&self) -> LatticeConfig {
        LatticeConfig {
            m: self.m(),
            scalar_field: self.signature.scalar_field,
            omegas: self.omegas.iter().map(|w| w.coords().to_vec()).collect(),
        }
    }

    pub fn from_config(cfg: &LatticeConfig) -> Result<Self> {
        let sig = AlgebraSignature::new(cfg.m, cfg.scalar_field)?;
        let omegas = cfg
            .omegas
            .iter()
            .map(|w| Paravector::from_coords(cfg.m, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sig, omegas)
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        let cfg: LatticeConfig =
            serde_json::from_str(doc).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_config(&cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_config()).expect("lattice config serializes")
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub(crate) fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
