//! Truncated Fock-space linear algebra: single- and two-mode operators,
//! tensor products, partial transposition, Hermitian spectra, beam-splitter
//! unitaries, and Uhlmann fidelity.
//!
//! Operators are dense complex matrices in the photon-number basis
//! `{|0>, ..., |N>}` with the convention `entries[(j, k)] = <j|A|k>`. Two-mode
//! operators use the Kronecker-ordered product basis `|j>_X |m>_Y` with X as
//! the slow index.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by the eigenvalue solver (the matrix is
/// symmetrized before solving).
pub const HERMITICITY_TOL: f64 = 1e-8;
/// Hermiticity tolerance required of density operators.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-10;
/// Trace may fall short of one by at most this much (truncation tail).
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
/// Eigenvalues of a density operator may dip below zero by at most this much.
pub const DENSITY_EIGENVALUE_FLOOR: f64 = -1e-10;

const MAX_FACTORIAL: usize = 170;

pub(crate) fn factorial(n: usize) -> f64 {
    assert!(n <= MAX_FACTORIAL, "factorial({n}) overflows f64");
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn complex(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest elementwise modulus of a complex matrix.
pub fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn max_asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.nrows() {
        for k in j..m.ncols() {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>, tol: f64) -> Result<Vec<f64>> {
    let asym = max_asymmetry(m);
    if asym > tol {
        return Err(Error::NotHermitian(asym));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(vals)
}

/// Square root of a positive-semidefinite Hermitian matrix; eigenvalue dust
/// below zero is clamped to zero before the square root.
fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = m.nrows();
    let mut scaled = eig.eigenvectors.clone();
    for (c, &v) in eig.eigenvalues.iter().enumerate() {
        let s = complex(v.max(0.0).sqrt());
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    &scaled * eig.eigenvectors.adjoint()
}

fn check_density_mat(m: &DMatrix<Complex64>, trace_tol: f64) -> Result<()> {
    let asym = max_asymmetry(m);
    if asym > DENSITY_HERMITICITY_TOL {
        return Err(Error::NotDensity(format!(
            "max Hermiticity violation {asym:.3e} exceeds {DENSITY_HERMITICITY_TOL:.1e}"
        )));
    }
    let tr = m.trace();
    if tr.re < 1.0 - trace_tol || tr.re > 1.0 + 1e-12 {
        return Err(Error::NotDensity(format!(
            "trace {:.12} outside [1 - {trace_tol:.1e}, 1]",
            tr.re
        )));
    }
    let min = hermitian_eigenvalues(m, DENSITY_HERMITICITY_TOL)
        .map_err(|e| Error::NotDensity(e.to_string()))?
        .into_iter()
        .next()
        .unwrap_or(0.0);
    if min < DENSITY_EIGENVALUE_FLOOR {
        return Err(Error::NotDensity(format!(
            "minimum eigenvalue {min:.3e} below {DENSITY_EIGENVALUE_FLOOR:.1e}"
        )));
    }
    Ok(())
}

/// Single-mode operator on the truncated Fock space `{|0>, ..., |cutoff>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    cutoff: usize,
    mat: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn zeros(cutoff: usize) -> Self {
        let n = cutoff + 1;
        Self { cutoff, mat: DMatrix::zeros(n, n) }
    }

    pub fn identity(cutoff: usize) -> Self {
        let n = cutoff + 1;
        Self { cutoff, mat: DMatrix::identity(n, n) }
    }

    /// Wraps an `(cutoff+1) x (cutoff+1)` matrix.
    pub fn from_matrix(cutoff: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let n = cutoff + 1;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::domain(format!(
                "matrix is {}x{}, expected {n}x{n} for cutoff {cutoff}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { cutoff, mat })
    }

    /// The dyad `|m><n|`.
    pub fn basis_op(m: usize, n: usize, cutoff: usize) -> Result<Self> {
        if m > cutoff || n > cutoff {
            return Err(Error::domain(format!(
                "basis indices ({m}, {n}) exceed cutoff {cutoff}"
            )));
        }
        let mut op = Self::zeros(cutoff);
        op.mat[(m, n)] = complex(1.0);
        Ok(op)
    }

    /// Diagonal operator from real entries (must have length `cutoff + 1`).
    pub fn from_diagonal(cutoff: usize, diag: &[f64]) -> Result<Self> {
        if diag.len() != cutoff + 1 {
            return Err(Error::domain(format!(
                "diagonal has {} entries, expected {}",
                diag.len(),
                cutoff + 1
            )));
        }
        let mut op = Self::zeros(cutoff);
        for (k, &v) in diag.iter().enumerate() {
            op.mat[(k, k)] = complex(v);
        }
        Ok(op)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.mat[(j, k)]
    }

    pub fn set(&mut self, j: usize, k: usize, v: Complex64) {
        self.mat[(j, k)] = v;
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { cutoff: self.cutoff, mat: self.mat.adjoint() }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { cutoff: self.cutoff, mat: &self.mat * c }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoff(other)?;
        Ok(Self { cutoff: self.cutoff, mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoff(other)?;
        Ok(Self { cutoff: self.cutoff, mat: &self.mat - &other.mat })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoff(other)?;
        Ok(Self { cutoff: self.cutoff, mat: &self.mat * &other.mat })
    }

    /// Divides by the trace. Fails when `|trace| < 1e-14`.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.norm() < 1e-14 {
            return Err(Error::domain(format!("cannot normalize: |trace| = {:.3e}", tr.norm())));
        }
        Ok(self.scaled(complex(1.0) / tr))
    }

    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// Ascending real eigenvalues; the operator must be Hermitian within
    /// [`HERMITICITY_TOL`] and is symmetrized before solving.
    pub fn eigvals_hermitian(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.mat, HERMITICITY_TOL)
    }

    /// Validates the density-operator invariants: Hermitian within `1e-10`,
    /// trace within `trace_tol` of one (from below), eigenvalues >= `-1e-10`.
    pub fn check_density(&self, trace_tol: f64) -> Result<()> {
        check_density_mat(&self.mat, trace_tol)
    }

    fn check_same_cutoff(&self, other: &Self) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch(self.cutoff, other.cutoff));
        }
        Ok(())
    }
}

/// Uhlmann fidelity `F = [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2` between two
/// density operators on the same cutoff. Symmetric in its arguments.
pub fn uhlmann_fidelity(rho: &FockOperator, sigma: &FockOperator) -> Result<f64> {
    if rho.cutoff != sigma.cutoff {
        return Err(Error::CutoffMismatch(rho.cutoff, sigma.cutoff));
    }
    rho.check_density(DENSITY_TRACE_TOL)?;
    sigma.check_density(DENSITY_TRACE_TOL)?;
    Ok(fidelity_of_mats(&rho.mat, &sigma.mat))
}

fn fidelity_of_mats(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let root_sum: f64 = hermitian_eigenvalues(&inner, 1e-6)
        .expect("s * sigma * s is Hermitian by construction")
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    (root_sum * root_sum).clamp(0.0, 1.0)
}

/// Operator on the tensor product of two truncated Fock spaces. Basis order
/// is `|j>_X |m>_Y` with X as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    cutoff_x: usize,
    cutoff_y: usize,
    mat: DMatrix<Complex64>,
}

impl TwoModeOperator {
    pub fn zeros(cutoff_x: usize, cutoff_y: usize) -> Self {
        let n = (cutoff_x + 1) * (cutoff_y + 1);
        Self { cutoff_x, cutoff_y, mat: DMatrix::zeros(n, n) }
    }

    pub fn from_matrix(cutoff_x: usize, cutoff_y: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let n = (cutoff_x + 1) * (cutoff_y + 1);
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::domain(format!(
                "matrix is {}x{}, expected {n}x{n} for cutoffs ({cutoff_x}, {cutoff_y})",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { cutoff_x, cutoff_y, mat })
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.cutoff_x, self.cutoff_y)
    }

    pub fn dim(&self) -> usize {
        (self.cutoff_x + 1) * (self.cutoff_y + 1)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    #[inline]
    pub fn index(&self, j: usize, m: usize) -> usize {
        j * (self.cutoff_y + 1) + m
    }

    /// `<j, m| A |k, n>`.
    pub fn get(&self, j: usize, m: usize, k: usize, n: usize) -> Complex64 {
        self.mat[(self.index(j, m), self.index(k, n))]
    }

    pub fn set(&mut self, j: usize, m: usize, k: usize, n: usize, v: Complex64) {
        let (r, c) = (self.index(j, m), self.index(k, n));
        self.mat[(r, c)] = v;
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { cutoff_x: self.cutoff_x, cutoff_y: self.cutoff_y, mat: self.mat.adjoint() }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { cutoff_x: self.cutoff_x, cutoff_y: self.cutoff_y, mat: &self.mat * c }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoffs(other)?;
        Ok(Self { cutoff_x: self.cutoff_x, cutoff_y: self.cutoff_y, mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoffs(other)?;
        Ok(Self { cutoff_x: self.cutoff_x, cutoff_y: self.cutoff_y, mat: &self.mat - &other.mat })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoffs(other)?;
        Ok(Self { cutoff_x: self.cutoff_x, cutoff_y: self.cutoff_y, mat: &self.mat * &other.mat })
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.norm() < 1e-14 {
            return Err(Error::domain(format!("cannot normalize: |trace| = {:.3e}", tr.norm())));
        }
        Ok(self.scaled(complex(1.0) / tr))
    }

    /// `U self U^dagger`.
    pub fn conjugated_by(&self, u: &TwoModeOperator) -> Result<Self> {
        self.check_same_cutoffs(u)?;
        Ok(Self {
            cutoff_x: self.cutoff_x,
            cutoff_y: self.cutoff_y,
            mat: &u.mat * &self.mat * u.mat.adjoint(),
        })
    }

    /// Partial transposition of the X mode:
    /// `entries'[(j,m),(k,n)] = entries[(k,m),(j,n)]`.
    pub fn partial_transpose_x(&self) -> Self {
        let mut out = Self::zeros(self.cutoff_x, self.cutoff_y);
        for j in 0..=self.cutoff_x {
            for k in 0..=self.cutoff_x {
                for m in 0..=self.cutoff_y {
                    for n in 0..=self.cutoff_y {
                        let v = self.get(k, m, j, n);
                        out.set(j, m, k, n, v);
                    }
                }
            }
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    pub fn eigvals_hermitian(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.mat, HERMITICITY_TOL)
    }

    pub fn check_density(&self, trace_tol: f64) -> Result<()> {
        check_density_mat(&self.mat, trace_tol)
    }

    /// Uhlmann fidelity between two two-mode density operators.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.check_same_cutoffs(other)?;
        self.check_density(DENSITY_TRACE_TOL)?;
        other.check_density(DENSITY_TRACE_TOL)?;
        Ok(fidelity_of_mats(&self.mat, &other.mat))
    }

    fn check_same_cutoffs(&self, other: &Self) -> Result<()> {
        if self.cutoff_x != other.cutoff_x {
            return Err(Error::CutoffMismatch(self.cutoff_x, other.cutoff_x));
        }
        if self.cutoff_y != other.cutoff_y {
            return Err(Error::CutoffMismatch(self.cutoff_y, other.cutoff_y));
        }
        Ok(())
    }
}

/// Kronecker product `a (x) b` with the X (first) factor as the slow index.
pub fn tensor(a: &FockOperator, b: &FockOperator) -> TwoModeOperator {
    TwoModeOperator {
        cutoff_x: a.cutoff,
        cutoff_y: b.cutoff,
        mat: a.mat.kronecker(&b.mat),
    }
}

/// Beam-splitter unitary defined by its action on creation operators,
///
/// ```text
/// U a_X^dag U^dag = beta* a_X^dag - alpha a_Y^dag,
/// U a_Y^dag U^dag = alpha* a_X^dag + beta a_Y^dag,
/// ```
///
/// with `U|0,0> = |0,0>` and `|alpha|^2 + |beta|^2 = 1`. Columns are built by
/// binomial expansion, so the matrix is exactly block-diagonal in total photon
/// number; blocks with `j + k <= cutoff` are exactly unitary, higher blocks
/// are truncated.
pub fn beam_splitter(alpha: Complex64, beta: Complex64, cutoff: usize) -> Result<TwoModeOperator> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "beam-splitter amplitudes not normalized: |alpha|^2 + |beta|^2 = {norm:.12}"
        )));
    }
    if 2 * cutoff > MAX_FACTORIAL {
        return Err(Error::domain(format!("cutoff {cutoff} too large for factorial arithmetic")));
    }
    let mut u = TwoModeOperator::zeros(cutoff, cutoff);
    let mut binom = vec![vec![0.0f64; cutoff + 1]; cutoff + 1];
    for n in 0..=cutoff {
        binom[n][0] = 1.0;
        for r in 1..=n {
            binom[n][r] = binom[n - 1][r - 1] + if r <= n - 1 { binom[n - 1][r] } else { 0.0 };
        }
    }
    for j in 0..=cutoff {
        for k in 0..=cutoff {
            let col_norm = (factorial(j) * factorial(k)).sqrt();
            for s in 0..=j {
                for t in 0..=k {
                    let a = s + t;
                    if a > cutoff || j + k - a > cutoff {
                        continue;
                    }
                    let b = j + k - a;
                    let amp = binom[j][s]
                        * binom[k][t]
                        * beta.conj().powu(s as u32)
                        * (-alpha).powu((j - s) as u32)
                        * alpha.conj().powu(t as u32)
                        * beta.powu((k - t) as u32)
                        * complex((factorial(a) * factorial(b)).sqrt() / col_norm);
                    let (r, c) = (u.index(a, b), u.index(j, k));
                    u.mat[(r, c)] += amp;
                }
            }
        }
    }
    Ok(u)
}
