//! Dense complex matrix kernel: arithmetic and factorization helpers,
//! colligations (system matrices) with their disc/bidisc transfer functions,
//! matrix polynomials, evaluation grids and sampled sup norms.
//!
//! Everything is double precision; all values are immutable after
//! construction and all operations are pure, so grid sweeps can run in
//! parallel. Randomness only enters through explicitly passed generators.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Threshold above which a resolvent/solve is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e13;

/// Eigenvalue clip applied before PSD square roots.
pub const PSD_CLIP: f64 = 1e-12;

pub fn cplx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn one() -> C64 {
    Complex::new(1.0, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Hermitian eigendecomposition of (m + m*)/2. Eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(herm);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| se.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// PSD square root with eigenvalues below `clip` treated as zero.
pub fn psd_sqrt(m: &CMat, clip: f64) -> CMat {
    let n = m.nrows();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let (vals, vecs) = hermitian_eigen(m);
    let sq = CMat::from_fn(n, n, |r, c| {
        let lam = vals[c];
        let s = if lam < clip { 0.0 } else { lam.sqrt() };
        vecs[(r, c)] * cplx(s, 0.0)
    });
    &sq * vecs.adjoint()
}

/// Largest singular value, computed as sqrt of the top eigenvalue of m*m.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let vals = hermitian_eigenvalues(&gram);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Operator-norm distance between two matrices.
pub fn norm_diff(a: &CMat, b: &CMat) -> f64 {
    operator_norm(&(a - b))
}

/// Defect operators (I - t*t)^{1/2} and (I - tt*)^{1/2} of a contraction.
pub fn defect_operators(t: &CMat) -> Result<(CMat, CMat)> {
    if t.nrows() != t.ncols() {
        return Err(Error::NotSquare { rows: t.nrows(), cols: t.ncols() });
    }
    let norm = operator_norm(t);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContractive { norm });
    }
    let n = t.nrows();
    let id = identity(n);
    let d_t = psd_sqrt(&(&id - t.adjoint() * t), PSD_CLIP);
    let d_tstar = psd_sqrt(&(&id - t * t.adjoint()), PSD_CLIP);
    Ok((d_t, d_tstar))
}

#[derive(Debug, Clone, Copy)]
pub struct ContractionCheck {
    pub contractive: bool,
    /// sigma_max - 1
    pub defect: f64,
}

pub fn is_contraction(m: &CMat, tol: f64) -> ContractionCheck {
    let defect = operator_norm(m) - 1.0;
    ContractionCheck { contractive: defect <= tol, defect }
}

#[derive(Debug, Clone, Copy)]
pub struct UnitaryCheck {
    pub unitary: bool,
    /// max(||m*m - I||, ||mm* - I||)
    pub defect: f64,
}

pub fn is_unitary(m: &CMat, tol: f64) -> Result<UnitaryCheck> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let id = identity(m.nrows());
    let left = norm_diff(&(m.adjoint() * m), &id);
    let right = norm_diff(&(m * m.adjoint()), &id);
    let defect = left.max(right);
    Ok(UnitaryCheck { unitary: defect <= tol, defect })
}

/// Unitarity defect of a value, for grid sweeps: ||m*m - I||.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let id = identity(m.ncols());
    norm_diff(&(m.adjoint() * m), &id)
}

/// Solve a x = b by dense LU with a pivot-growth condition estimate.
pub fn solve_gated(a: &CMat, b: &CMat, on_singular: impl FnOnce(f64) -> Error) -> Result<CMat> {
    let n = a.nrows();
    if n == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let lu = a.clone().lu();
    let diag = lu.u();
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for i in 0..n {
        let v = diag[(i, i)].norm();
        dmin = dmin.min(v);
        dmax = dmax.max(v);
    }
    let cond = if dmin == 0.0 { f64::INFINITY } else { dmax / dmin };
    if cond > CONDITION_LIMIT {
        return Err(on_singular(cond));
    }
    lu.solve(b).ok_or_else(|| on_singular(f64::INFINITY))
}

pub fn invert_gated(a: &CMat, on_singular: impl FnOnce(f64) -> Error) -> Result<CMat> {
    let id = identity(a.nrows());
    solve_gated(a, &id, on_singular)
}

// ---------------------------------------------------------------------------
// Random generators (deterministic in the passed rng)
// ---------------------------------------------------------------------------

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        cplx(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-ish unitary from the QR of a complex Gaussian, phases fixed from R.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = random_matrix(n, n, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = CMat::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() == 0.0 { one() } else { d / d.norm() }
        } else {
            cplx(0.0, 0.0)
        }
    });
    &q * phases
}

/// Random strict contraction: Gaussian rescaled to norm 1/(1 + margin).
pub fn random_contraction<R: Rng>(rows: usize, cols: usize, margin: f64, rng: &mut R) -> CMat {
    let g = random_matrix(rows, cols, rng);
    let norm = operator_norm(&g);
    if norm == 0.0 {
        return g;
    }
    g * cplx(1.0 / (norm * (1.0 + margin)), 0.0)
}

// ---------------------------------------------------------------------------
// Colligation (system matrix) and transfer functions
// ---------------------------------------------------------------------------

/// Block system matrix [A B; C D] with transfer F(z) = A + zB(I - zD)^{-1}C.
#[derive(Debug, Clone, PartialEq)]
pub struct Colligation {
    n_out: usize,
    n_state: usize,
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
}

impl Colligation {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let n = a.nrows();
        let s = d.nrows();
        if a.ncols() != n {
            return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
        }
        if d.ncols() != s {
            return Err(Error::NotSquare { rows: d.nrows(), cols: d.ncols() });
        }
        if b.nrows() != n || b.ncols() != s || c.nrows() != s || c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "colligation blocks inconsistent with (N, d) = ({n}, {s}): B is {}x{}, C is {}x{}",
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        for m in [&a, &b, &c, &d] {
            if !all_finite(m) {
                return Err(Error::Parse("colligation block contains a non-finite entry".into()));
            }
        }
        Ok(Self { n_out: n, n_state: s, a, b, c, d })
    }

    /// Constant function F = a, with empty state space.
    pub fn constant(a: CMat) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, CMat::zeros(n, 0), CMat::zeros(0, n), CMat::zeros(0, 0))
    }

    /// Random colligation with contractive system matrix, seeded.
    pub fn random<R: Rng>(n_out: usize, n_state: usize, margin: f64, rng: &mut R) -> Self {
        let t = random_contraction(n_out + n_state, n_out + n_state, margin, rng);
        Self::from_system_matrix(&t, n_out).expect("blocks consistent by construction")
    }

    /// Split a (N+d)x(N+d) system matrix into blocks.
    pub fn from_system_matrix(t: &CMat, n_out: usize) -> Result<Self> {
        if t.nrows() != t.ncols() {
            return Err(Error::NotSquare { rows: t.nrows(), cols: t.ncols() });
        }
        if t.nrows() < n_out {
            return Err(Error::DimensionMismatch(format!(
                "system matrix of size {} cannot carry output dimension {n_out}",
                t.nrows()
            )));
        }
        let d = t.nrows() - n_out;
        Self::new(
            t.view((0, 0), (n_out, n_out)).into(),
            t.view((0, n_out), (n_out, d)).into(),
            t.view((n_out, 0), (d, n_out)).into(),
            t.view((n_out, n_out), (d, d)).into(),
        )
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn n_state(&self) -> usize {
        self.n_state
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn d(&self) -> &CMat {
        &self.d
    }

    /// Assembled T = [A B; C D].
    pub fn system_matrix(&self) -> CMat {
        let n = self.n_out;
        let s = self.n_state;
        let mut t = CMat::zeros(n + s, n + s);
        t.view_mut((0, 0), (n, n)).copy_from(&self.a);
        t.view_mut((0, n), (n, s)).copy_from(&self.b);
        t.view_mut((n, 0), (s, n)).copy_from(&self.c);
        t.view_mut((n, n), (s, s)).copy_from(&self.d);
        t
    }

    /// F(z) = A + zB(I - zD)^{-1}C.
    pub fn eval_disc(&self, z: C64) -> Result<CMat> {
        if self.n_state == 0 {
            return Ok(self.a.clone());
        }
        let m = identity(self.n_state) - &self.d * z;
        let x = solve_gated(&m, &self.c, |cond| Error::SingularResolvent { z, cond })?;
        Ok(&self.a + (&self.b * x) * z)
    }

    /// F(z1, z2) = A + BZ(I - DZ)^{-1}C with Z = z1 I_{d1} + z2 I_{d2}.
    pub fn eval_bidisc(&self, split: &BidiscSplit, z1: C64, z2: C64) -> Result<CMat> {
        split.check(self.n_state)?;
        if self.n_state == 0 {
            return Ok(self.a.clone());
        }
        let z = split.z_diag(z1, z2);
        let m = identity(self.n_state) - &self.d * &z;
        let x = solve_gated(&m, &self.c, |cond| Error::SingularResolvent { z: z1, cond })?;
        Ok(&self.a + &self.b * (&z * x))
    }

    /// Output scaling: transfer becomes s * F(z).
    pub fn output_scaled(&self, s: C64) -> Self {
        Self {
            n_out: self.n_out,
            n_state: self.n_state,
            a: &self.a * s,
            b: &self.b * s,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    /// Series interconnection: transfer self(z) * other(z).
    ///
    /// Preserves unitarity of the system matrix (the composite factors into
    /// two identity-padded copies of the inputs).
    pub fn cascade(&self, other: &Self) -> Result<Self> {
        if self.n_out != other.n_out {
            return Err(Error::DimensionMismatch(format!(
                "cascade of {}x{} with {}x{} outputs",
                self.n_out, self.n_out, other.n_out, other.n_out
            )));
        }
        let (d1, d2) = (self.n_state, other.n_state);
        let n = self.n_out;
        let a = &self.a * &other.a;
        let mut b = CMat::zeros(n, d1 + d2);
        b.view_mut((0, 0), (n, d1)).copy_from(&self.b);
        b.view_mut((0, d1), (n, d2)).copy_from(&(&self.a * &other.b));
        let mut c = CMat::zeros(d1 + d2, n);
        c.view_mut((0, 0), (d1, n)).copy_from(&(&self.c * &other.a));
        c.view_mut((d1, 0), (d2, n)).copy_from(&other.c);
        let mut d = CMat::zeros(d1 + d2, d1 + d2);
        d.view_mut((0, 0), (d1, d1)).copy_from(&self.d);
        d.view_mut((0, d1), (d1, d2)).copy_from(&(&self.c * &other.b));
        d.view_mut((d1, d1), (d2, d2)).copy_from(&other.d);
        Ok(Self { n_out: n, n_state: d1 + d2, a, b, c, d })
    }

    /// Diagonal coupling: transfer diag(self(z), other(z)).
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n1, n2) = (self.n_out, other.n_out);
        let (d1, d2) = (self.n_state, other.n_state);
        let mut a = CMat::zeros(n1 + n2, n1 + n2);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = CMat::zeros(n1 + n2, d1 + d2);
        b.view_mut((0, 0), (n1, d1)).copy_from(&self.b);
        b.view_mut((n1, d1), (n2, d2)).copy_from(&other.b);
        let mut c = CMat::zeros(d1 + d2, n1 + n2);
        c.view_mut((0, 0), (d1, n1)).copy_from(&self.c);
        c.view_mut((d1, n1), (d2, n2)).copy_from(&other.c);
        let mut d = CMat::zeros(d1 + d2, d1 + d2);
        d.view_mut((0, 0), (d1, d1)).copy_from(&self.d);
        d.view_mut((d1, d1), (d2, d2)).copy_from(&other.d);
        Self { n_out: n1 + n2, n_state: d1 + d2, a, b, c, d }
    }

    /// Colligation of the value-side Moebius transform
    /// (F + cI)(I + conj(c)F)^{-1}, |c| < 1.
    ///
    /// The balanced sqrt(1-|c|^2) scaling keeps a unitary system matrix
    /// unitary, so inner transfers stay inner.
    pub fn moebius(&self, c: C64) -> Result<Self> {
        if c.norm() >= 1.0 {
            return Err(Error::InvalidRadius { r: c.norm() });
        }
        let n = self.n_out;
        let beta = cplx((1.0 - c.norm_sqr()).sqrt(), 0.0);
        let denom = identity(n) + &self.a * c.conj();
        let e = invert_gated(&denom, |cond| Error::SingularBlock { cond })?;
        let a = &e * (&self.a + identity(n) * c);
        let b = (&e * &self.b) * beta;
        let cc = (&self.c * &e) * beta;
        let d = &self.d - (&self.c * &e * &self.b) * c.conj();
        Self::new(a, b, cc, d)
    }
}

/// State-space split d = d1 + d2 for bidisc evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BidiscSplit {
    pub d1: usize,
    pub d2: usize,
}

impl BidiscSplit {
    pub fn new(d1: usize, d2: usize) -> Self {
        Self { d1, d2 }
    }

    pub fn total(&self) -> usize {
        self.d1 + self.d2
    }

    pub fn check(&self, n_state: usize) -> Result<()> {
        if self.total() != n_state {
            return Err(Error::DimensionMismatch(format!(
                "bidisc split {} + {} does not match state dimension {}",
                self.d1, self.d2, n_state
            )));
        }
        Ok(())
    }

    /// Z = z1 I_{d1} (+) z2 I_{d2} as a dense diagonal.
    pub fn z_diag(&self, z1: C64, z2: C64) -> CMat {
        CMat::from_fn(self.total(), self.total(), |i, j| {
            if i != j {
                cplx(0.0, 0.0)
            } else if i < self.d1 {
                z1
            } else {
                z2
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Matrix polynomials
// ---------------------------------------------------------------------------

/// p(z) = sum coeffs[k] z^k with square N x N coefficients, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    n: usize,
    coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<CMat>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parse("polynomial needs at least the constant coefficient".into()));
        }
        let n = coeffs[0].nrows();
        for c in &coeffs {
            if c.nrows() != n || c.ncols() != n {
                return Err(Error::DimensionMismatch(
                    "polynomial coefficients must all be square of the same size".into(),
                ));
            }
            if !all_finite(c) {
                return Err(Error::Parse("polynomial coefficient contains a non-finite entry".into()));
            }
        }
        Ok(Self { n, coeffs })
    }

    pub fn constant(a: CMat) -> Result<Self> {
        Self::new(vec![a])
    }

    /// Scalar polynomial from complex coefficients.
    pub fn scalar(coeffs: &[C64]) -> Self {
        let cs = coeffs.iter().map(|&c| CMat::from_element(1, 1, c)).collect();
        Self::new(cs).expect("scalar coefficients are square")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> CMat {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// (1 - delta) * p(r z): coefficient k is scaled by (1 - delta) r^k.
    pub fn strictify(&self, delta: f64, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidRadius { r: delta });
        }
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidRadius { r });
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut rk = 1.0;
        for c in &self.coeffs {
            coeffs.push(c * cplx((1.0 - delta) * rk, 0.0));
            rk *= r;
        }
        Ok(Self { n: self.n, coeffs })
    }

    /// Random polynomial rescaled to a sampled sup norm on the circle.
    pub fn random<R: Rng>(n: usize, degree: usize, sup_target: f64, rng: &mut R) -> Self {
        let coeffs: Vec<CMat> = (0..=degree).map(|_| random_matrix(n, n, rng)).collect();
        let raw = Self { n, coeffs };
        let grid = CircleGrid::new(2048);
        let sup = grid
            .points()
            .map(|z| operator_norm(&raw.eval(z)))
            .fold(0.0f64, f64::max);
        let scale = if sup == 0.0 { 0.0 } else { sup_target / sup };
        let coeffs = raw.coeffs.into_iter().map(|c| c * cplx(scale, 0.0)).collect();
        Self { n, coeffs }
    }
}

// ---------------------------------------------------------------------------
// Pointwise matrix functions on the disc
// ---------------------------------------------------------------------------

/// A matrix-valued function of one disc variable, evaluable pointwise.
pub trait DiscFn: Sync {
    fn size(&self) -> usize;
    fn eval(&self, z: C64) -> Result<CMat>;
}

impl DiscFn for Colligation {
    fn size(&self) -> usize {
        self.n_out
    }

    fn eval(&self, z: C64) -> Result<CMat> {
        self.eval_disc(z)
    }
}

impl DiscFn for MatrixPolynomial {
    fn size(&self) -> usize {
        self.n
    }

    fn eval(&self, z: C64) -> Result<CMat> {
        Ok(MatrixPolynomial::eval(self, z))
    }
}

impl<T: DiscFn + ?Sized> DiscFn for &T {
    fn size(&self) -> usize {
        (**self).size()
    }

    fn eval(&self, z: C64) -> Result<CMat> {
        (**self).eval(z)
    }
}

// ---------------------------------------------------------------------------
// Grids and sampled sup norms
// ---------------------------------------------------------------------------

/// Equispaced points e^{2 pi i j / size} on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    size: usize,
}

impl CircleGrid {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "circle grid needs at least one point");
        Self { size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn point(&self, j: usize) -> C64 {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / (self.size as f64);
        cplx(theta.cos(), theta.sin())
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.size).map(move |j| self.point(j))
    }
}

/// n1 x n2 equispaced grid on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    pub n1: usize,
    pub n2: usize,
}

impl TorusGrid {
    pub fn new(n1: usize, n2: usize) -> Self {
        assert!(n1 > 0 && n2 > 0);
        Self { n1, n2 }
    }

    pub fn size(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn points(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let g1 = CircleGrid::new(self.n1);
        let g2 = CircleGrid::new(self.n2);
        (0..self.n1).flat_map(move |i| (0..self.n2).map(move |j| (g1.point(i), g2.point(j))))
    }
}

/// Sampled sup norm: the maximum is a lower estimate of the true sup,
/// reported together with the grid size that produced it.
#[derive(Debug, Clone, Copy)]
pub struct SupNormEstimate {
    pub value: f64,
    pub grid_size: usize,
}

pub fn sup_norm_on_points(f: &dyn DiscFn, points: &[C64]) -> Result<SupNormEstimate> {
    let norms: Result<Vec<f64>> = points
        .par_iter()
        .map(|&z| f.eval(z).map(|m| operator_norm(&m)))
        .collect();
    let value = norms?.into_iter().fold(0.0f64, f64::max);
    Ok(SupNormEstimate { value, grid_size: points.len() })
}

pub fn sup_norm_on_circle(f: &dyn DiscFn, grid: &CircleGrid) -> Result<SupNormEstimate> {
    let pts: Vec<C64> = grid.points().collect();
    sup_norm_on_points(f, &pts)
}

pub fn sup_norm_on_torus<F>(f: F, grid: &TorusGrid) -> Result<SupNormEstimate>
where
    F: Fn(C64, C64) -> Result<CMat> + Sync,
{
    let pts: Vec<(C64, C64)> = grid.points().collect();
    let norms: Result<Vec<f64>> = pts
        .par_iter()
        .map(|&(z1, z2)| f(z1, z2).map(|m| operator_norm(&m)))
        .collect();
    let value = norms?.into_iter().fold(0.0f64, f64::max);
    Ok(SupNormEstimate { value, grid_size: grid.size() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_col(a: f64, b: f64, c: f64, d: f64) -> Colligation {
        Colligation::new(
            CMat::from_element(1, 1, cplx(a, 0.0)),
            CMat::from_element(1, 1, cplx(b, 0.0)),
            CMat::from_element(1, 1, cplx(c, 0.0)),
            CMat::from_element(1, 1, cplx(d, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn transfer_of_shift_is_z() {
        let col = scalar_col(0.0, 1.0, 1.0, 0.0);
        let v = col.eval_disc(cplx(0.5, 0.0)).unwrap();
        assert!((v[(0, 0)] - cplx(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn transfer_with_zero_c_is_feedthrough() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(2, 2, &mut rng);
        let col = Colligation::new(
            a.clone(),
            random_matrix(2, 3, &mut rng),
            CMat::zeros(3, 2),
            random_matrix(3, 3, &mut rng) * cplx(0.1, 0.0),
        )
        .unwrap();
        let v = col.eval_disc(cplx(0.7, -0.2)).unwrap();
        assert!(norm_diff(&v, &a) < 1e-14);
    }

    #[test]
    fn transfer_matches_power_series() {
        // F(z) = A + sum_{k>=0} z^{k+1} B D^k C, truncated at 60 terms.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let col = Colligation::random(2, 3, 0.05, &mut rng);
        let z = cplx(0.3, 0.2);
        let direct = col.eval_disc(z).unwrap();
        let mut series = col.a().clone();
        let mut dk = identity(3);
        for k in 0..=60 {
            let term = (col.b() * &dk * col.c()) * z.powu(k as u32 + 1);
            series += term;
            dk = &dk * col.d();
        }
        assert!(norm_diff(&direct, &series) < 1e-10);
    }

    #[test]
    fn bidisc_diagonal_matches_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let col = Colligation::random(2, 3, 0.05, &mut rng);
        let split = BidiscSplit::new(2, 1);
        let z = cplx(0.4, -0.1);
        let disc = col.eval_disc(z).unwrap();
        let bi = col.eval_bidisc(&split, z, z).unwrap();
        assert!(norm_diff(&disc, &bi) < 1e-12);
    }

    #[test]
    fn bidisc_at_origin_is_feedthrough() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let col = Colligation::random(2, 3, 0.05, &mut rng);
        let v = col.eval_bidisc(&BidiscSplit::new(1, 2), cplx(0.0, 0.0), cplx(0.0, 0.0)).unwrap();
        assert!(norm_diff(&v, col.a()) < 1e-15);
    }

    #[test]
    fn bidisc_matches_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let col = Colligation::random(2, 3, 0.05, &mut rng);
        let split = BidiscSplit::new(2, 1);
        let (z1, z2) = (cplx(0.4, 0.0), cplx(0.0, -0.3));
        let direct = col.eval_bidisc(&split, z1, z2).unwrap();
        let z = split.z_diag(z1, z2);
        let mut series = col.a().clone();
        let mut dzk = identity(3);
        for _ in 0..=60 {
            series += col.b() * &z * &dzk * col.c();
            dzk = (col.d() * &z) * dzk;
        }
        assert!(norm_diff(&direct, &series) < 1e-10);
    }

    #[test]
    fn bidisc_split_mismatch_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let col = Colligation::random(2, 3, 0.05, &mut rng);
        let err = col.eval_bidisc(&BidiscSplit::new(1, 1), cplx(0.1, 0.0), cplx(0.2, 0.0));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn polynomial_constant_and_linear() {
        let a0 = CMat::from_element(1, 1, cplx(0.3, -0.1));
        let p = MatrixPolynomial::constant(a0.clone()).unwrap();
        assert!(norm_diff(&p.eval(cplx(0.9, 0.4)), &a0) < 1e-15);

        let zi = MatrixPolynomial::new(vec![CMat::zeros(2, 2), identity(2)]).unwrap();
        assert!(norm_diff(&zi.eval(cplx(0.25, 0.0)), &(identity(2) * cplx(0.25, 0.0))) < 1e-15);
    }

    #[test]
    fn polynomial_matches_monomial_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = MatrixPolynomial::random(3, 4, 0.9, &mut rng);
        let z = cplx(0.0, 0.6);
        let mut naive = CMat::zeros(3, 3);
        for (k, c) in p.coeffs().iter().enumerate() {
            naive += c * z.powu(k as u32);
        }
        assert!(norm_diff(&p.eval(z), &naive) < 1e-13);
    }

    #[test]
    fn defect_operators_of_unitary_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(3, &mut rng);
        let (dt, dts) = defect_operators(&u).unwrap();
        assert!(operator_norm(&dt) < 1e-7);
        assert!(operator_norm(&dts) < 1e-7);
    }

    #[test]
    fn defect_operators_of_zero_are_identity() {
        let (dt, dts) = defect_operators(&CMat::zeros(2, 2)).unwrap();
        assert!(norm_diff(&dt, &identity(2)) < 1e-14);
        assert!(norm_diff(&dts, &identity(2)) < 1e-14);
    }

    #[test]
    fn defect_operators_scalar() {
        let t = CMat::from_element(1, 1, cplx(0.6, 0.0));
        let (dt, dts) = defect_operators(&t).unwrap();
        assert!((dt[(0, 0)].re - 0.8).abs() < 1e-14);
        assert!((dts[(0, 0)].re - 0.8).abs() < 1e-14);
    }

    #[test]
    fn defect_operators_reject_expansions() {
        let t = identity(2) * cplx(1.5, 0.0);
        assert!(matches!(defect_operators(&t), Err(Error::NotContractive { .. })));
    }

    #[test]
    fn defect_squares_and_intertwining() {
        // d_t^2 = I - t*t and t d_t = d_{t*} t, up to roundoff.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let t = random_contraction(4, 4, 0.02, &mut rng);
            let (dt, dts) = defect_operators(&t).unwrap();
            let resid = norm_diff(&(&dt * &dt), &(identity(4) - t.adjoint() * &t));
            assert!(resid < 1e-11, "square defect {resid}");
            let inter = norm_diff(&(&t * &dt), &(&dts * &t));
            assert!(inter < 1e-10, "intertwining defect {inter}");
        }
    }

    #[test]
    fn operator_norm_cases() {
        assert!((operator_norm(&identity(3)) - 1.0).abs() < 1e-14);
        let d = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                cplx(if i == 0 { 0.2 } else { -0.9 }, 0.0)
            } else {
                cplx(0.0, 0.0)
            }
        });
        assert!((operator_norm(&d) - 0.9).abs() < 1e-14);
    }

    #[test]
    fn operator_norm_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(4, 4, &mut rng);
        // power iteration on m*m
        let gram = m.adjoint() * &m;
        let mut v = CMat::from_element(4, 1, one());
        let mut lam = 0.0;
        for _ in 0..500 {
            v = &gram * v;
            lam = v.norm();
            v /= cplx(lam, 0.0);
        }
        assert!((operator_norm(&m) - lam.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn contraction_checks() {
        let half = identity(2) * cplx(0.5, 0.0);
        assert!(is_contraction(&half, 1e-12).contractive);
        let two = identity(2) * cplx(2.0, 0.0);
        let c = is_contraction(&two, 1e-12);
        assert!(!c.contractive);
        assert!((c.defect - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(4, &mut rng);
        let cu = is_contraction(&u, 1e-12);
        assert!(cu.contractive && cu.defect.abs() <= 1e-13);
    }

    #[test]
    fn unitary_checks() {
        assert!(is_unitary(&identity(3), 1e-12).unwrap().unitary);
        assert!(!is_unitary(&(identity(3) * cplx(0.99, 0.0)), 1e-12).unwrap().unitary);
        // Householder reflector I - 2vv*
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v = random_matrix(4, 1, &mut rng);
        v /= cplx(v.norm(), 0.0);
        let h = identity(4) - (&v * v.adjoint()) * cplx(2.0, 0.0);
        assert!(is_unitary(&h, 1e-12).unwrap().unitary);
        assert!(is_unitary(&CMat::zeros(2, 3), 1e-12).is_err());
    }

    #[test]
    fn schur_bound_on_contractive_transfer() {
        // ||F(z)|| <= 1 on |z| <= rho < 1 for contractive system matrices.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let col = Colligation::random(2, 3, 0.0, &mut rng);
        for j in 0..32 {
            let z = CircleGrid::new(32).point(j) * cplx(0.9, 0.0);
            let norm = operator_norm(&col.eval_disc(z).unwrap());
            assert!(norm <= 1.0 + 1e-9, "norm {norm} at grid point {j}");
        }
    }

    #[test]
    fn sup_norm_constant_and_shift() {
        let a0 = CMat::from_element(1, 1, cplx(0.3, 0.4));
        let p = MatrixPolynomial::constant(a0.clone()).unwrap();
        let grid = CircleGrid::new(64);
        let est = sup_norm_on_circle(&p, &grid).unwrap();
        assert!((est.value - 0.5).abs() < 1e-14);
        assert_eq!(est.grid_size, 64);

        let zpoly = MatrixPolynomial::scalar(&[cplx(0.0, 0.0), one()]);
        let est = sup_norm_on_circle(&zpoly, &CircleGrid::new(256)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sup_norm_refined_grid_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = MatrixPolynomial::random(2, 3, 0.9, &mut rng);
        let coarse = sup_norm_on_circle(&p, &CircleGrid::new(4096)).unwrap();
        let fine = sup_norm_on_circle(&p, &CircleGrid::new(65536)).unwrap();
        assert!((coarse.value - fine.value).abs() < 1e-3);
        assert!(coarse.value <= fine.value + 1e-15);
    }

    #[test]
    fn strictify_examples() {
        let p = MatrixPolynomial::new(vec![CMat::zeros(2, 2), identity(2)]).unwrap();
        let s = p.strictify(0.1, 1.0).unwrap();
        let est = sup_norm_on_circle(&s, &CircleGrid::new(128)).unwrap();
        assert!((est.value - 0.9).abs() < 1e-12);

        let zero = MatrixPolynomial::constant(CMat::zeros(2, 2)).unwrap();
        let sz = zero.strictify(0.05, 0.98).unwrap();
        assert!(sup_norm_on_circle(&sz, &CircleGrid::new(16)).unwrap().value < 1e-15);
    }

    #[test]
    fn cascade_preserves_unitarity_and_multiplies_transfers() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u1 = random_unitary(4, &mut rng);
        let u2 = random_unitary(5, &mut rng);
        let c1 = Colligation::from_system_matrix(&u1, 2).unwrap();
        let c2 = Colligation::from_system_matrix(&u2, 2).unwrap();
        let prod = c1.cascade(&c2).unwrap();
        assert!(is_unitary(&prod.system_matrix(), 1e-12).unwrap().unitary);
        let z = cplx(0.35, -0.6);
        let expect = c1.eval_disc(z).unwrap() * c2.eval_disc(z).unwrap();
        assert!(norm_diff(&prod.eval_disc(z).unwrap(), &expect) < 1e-12);
    }

    #[test]
    fn moebius_transform_of_colligation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(5, &mut rng);
        let col = Colligation::from_system_matrix(&u, 2).unwrap();
        let c = cplx(0.3, 0.25);
        let moeb = col.moebius(c).unwrap();
        // unitary in, unitary out
        assert!(is_unitary(&moeb.system_matrix(), 1e-12).unwrap().unitary);
        for z in [cplx(0.2, 0.1), cplx(-0.7, 0.05), cplx(0.0, 0.95)] {
            let f = col.eval_disc(z).unwrap();
            let direct = (&f + identity(2) * c)
                * invert_gated(&(identity(2) + &f * c.conj()), |cond| Error::SingularBlock { cond })
                    .unwrap();
            assert!(norm_diff(&moeb.eval_disc(z).unwrap(), &direct) < 1e-12);
        }
    }

    #[test]
    fn random_generators_are_seed_deterministic() {
        let a = random_matrix(3, 3, &mut ChaCha8Rng::seed_from_u64(4));
        let b = random_matrix(3, 3, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
        let u = random_unitary(4, &mut ChaCha8Rng::seed_from_u64(4));
        assert!(is_unitary(&u, 1e-12).unwrap().unitary);
    }

    #[test]
    fn circle_grid_points_unimodular() {
        let g = CircleGrid::new(101);
        for z in g.points() {
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }
}
