//! Independent phase-space oracle: generalized Wigner functions sampled on a
//! uniform grid, numerical channel action, and overlap integrals.
//!
//! Everything here exists to cross-check the closed forms elsewhere in the
//! crate, so it deliberately shares no algebra with them: the channel acts by
//! convolution and rescaling of grid samples, and transition coefficients
//! come out of overlap quadrature,
//!
//! ```text
//! T_{mn->jk} = 2 pi  integral  W_out^{|m><n|}(xi) W^{|k><j|}(xi) d xi.
//! ```
//!
//! The channel kernel switches between two sampling strategies:
//!
//! * `tau >= 0.25`: direct Gaussian quadrature with the output nodes mapped
//!   through the rescaling, `W_out(xi_i) = (1/g^2) sum_l W(xi_l) G_tau(xi_i/g
//!   - xi_l) h^2`. The kernel is wide enough to be resolved by the grid, and
//!   no values outside the sampled square are ever needed.
//! * `tau < 0.25`: convolution as a spectral multiplier on the trigonometric
//!   interpolant, evaluated at the rescaled nodes `xi_i / g` (zero outside
//!   the grid, where the barely-convolved function has decayed to nothing).
//!
//! Both branches are separable, so one `M x M` axis operator `A` applied as
//! `A W A^T` implements the full two-dimensional action.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::GaussianChannel;
use crate::error::{Error, Result};
use crate::fock::FockOperator;

/// Default grid half-extent; covers 6 sigma of every state up to six photons
/// and of thermal outputs with lambda <= 6.
pub const DEFAULT_HALF_EXTENT: f64 = 8.0;
/// Default points per axis (odd, so the origin is a node).
pub const DEFAULT_POINTS: usize = 401;
/// Largest photon index accepted by [`wigner_mn`] (factorial guard).
pub const MAX_WIGNER_INDEX: usize = 30;
/// Largest index accepted by the numeric transition-coefficient oracle.
pub const ORACLE_MAX_INDEX: usize = 8;

/// Crossover between the quadrature and spectral channel branches.
const TAU_SPECTRAL_MAX: f64 = 0.25;

/// A complex function sampled on a uniform square grid over
/// `[-L, L] x [-L, L]`, stored row-major as `values[ix * points + ip]`.
#[derive(Debug, Clone)]
pub struct PhaseSpaceGrid {
    half_extent: f64,
    points: usize,
    values: Vec<Complex64>,
}

impl PhaseSpaceGrid {
    pub fn zeros(half_extent: f64, points: usize) -> Result<Self> {
        if !half_extent.is_finite() || half_extent <= 0.0 {
            return Err(Error::domain(format!("grid half-extent {half_extent} must be > 0")));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::domain(format!(
                "grid needs an odd number of points >= 3 per axis, got {points}"
            )));
        }
        Ok(Self { half_extent, points, values: vec![Complex64::new(0.0, 0.0); points * points] })
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.points - 1) as f64
    }

    /// Node coordinates along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| -self.half_extent + h * i as f64).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, ix: usize, ip: usize) -> Complex64 {
        self.values[ix * self.points + ip]
    }

    /// Trapezoid quadrature of the samples.
    pub fn integral(&self) -> Complex64 {
        let m = self.points;
        let h = self.spacing();
        let w = |i: usize| if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for ix in 0..m {
            let wx = w(ix);
            for ip in 0..m {
                acc += self.values[ix * m + ip] * (wx * w(ip));
            }
        }
        acc * (h * h)
    }

    fn same_geometry(&self, other: &Self) -> bool {
        self.points == other.points && (self.half_extent - other.half_extent).abs() < 1e-12
    }

    fn geometry_error(&self, other: &Self) -> Error {
        Error::GridMismatch(self.half_extent, self.points, other.half_extent, other.points)
    }
}

/// Generalized Laguerre polynomial `L_n^alpha(x)` by the stable three-term
/// recurrence.
fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Samples of the generalized Wigner function of the dyad `|m><n|`,
///
/// ```text
/// W^{|m><n|}(xi) = ((-1)^n / pi) sqrt(n!/m!) (sqrt(2) (x - i p))^{m-n}
///                  L_n^{m-n}(2 xi.xi) exp(-xi.xi)          for m >= n,
/// ```
///
/// and the index-swapped form with `p -> -p` for `n > m` (equivalently, the
/// complex conjugate of `W^{|n><m|}`).
pub fn wigner_mn(m: usize, n: usize, half_extent: f64, points: usize) -> Result<PhaseSpaceGrid> {
    if m > MAX_WIGNER_INDEX || n > MAX_WIGNER_INDEX {
        return Err(Error::domain(format!(
            "wigner_mn indices ({m}, {n}) exceed the factorial guard {MAX_WIGNER_INDEX}"
        )));
    }
    let mut grid = PhaseSpaceGrid::zeros(half_extent, points)?;
    // Reduce to mm >= nn; p picks up a sign in the swapped case.
    let (mm, nn, p_sign) = if m >= n { (m, n, -1.0) } else { (n, m, 1.0) };
    let order = mm - nn;
    let mut ratio = 1.0f64; // mm! / nn!
    for i in (nn + 1)..=mm {
        ratio *= i as f64;
    }
    let pref = if nn % 2 == 0 { 1.0 } else { -1.0 } / (PI * ratio.sqrt());
    let axis = grid.axis();
    let mpts = points;
    for (ix, &x) in axis.iter().enumerate() {
        for (ip, &p) in axis.iter().enumerate() {
            let r2 = x * x + p * p;
            let base = pref * laguerre(nn, order as f64, 2.0 * r2) * (-r2).exp();
            let v = Complex64::new(2.0f64.sqrt() * x, 2.0f64.sqrt() * p_sign * p);
            grid.values[ix * mpts + ip] = v.powu(order as u32) * base;
        }
    }
    Ok(grid)
}

/// `sum_mn rho^{mn} W^{|m><n|}` sampled on the grid.
pub fn wigner_from_density(
    rho: &FockOperator,
    half_extent: f64,
    points: usize,
) -> Result<PhaseSpaceGrid> {
    if rho.cutoff() > MAX_WIGNER_INDEX {
        return Err(Error::domain(format!(
            "cutoff {} exceeds the factorial guard {MAX_WIGNER_INDEX}",
            rho.cutoff()
        )));
    }
    let mut grid = PhaseSpaceGrid::zeros(half_extent, points)?;
    for m in 0..=rho.cutoff() {
        for n in 0..=rho.cutoff() {
            let w = rho.get(m, n);
            if w.norm() < 1e-17 {
                continue;
            }
            let term = wigner_mn(m, n, half_extent, points)?;
            for (dst, src) in grid.values.iter_mut().zip(&term.values) {
                *dst += w * src;
            }
        }
    }
    Ok(grid)
}

/// `2 pi integral W_a W_b = Tr(A B)` by trapezoid quadrature.
pub fn overlap(a: &PhaseSpaceGrid, b: &PhaseSpaceGrid) -> Result<Complex64> {
    if !a.same_geometry(b) {
        return Err(a.geometry_error(b));
    }
    let m = a.points;
    let w = |i: usize| if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
    let mut acc = Complex64::new(0.0, 0.0);
    for ix in 0..m {
        let wx = w(ix);
        for ip in 0..m {
            acc += a.values[ix * m + ip] * b.values[ix * m + ip] * (wx * w(ip));
        }
    }
    let h = a.spacing();
    Ok(acc * (2.0 * PI * h * h))
}

// ---------------------------------------------------------------------------
// Separable axis operators backed by real dgemm on split re/im planes.

struct Planes {
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

fn dgemm_acc(m: usize, alpha: f64, a: &[f64], b: &[f64], b_trans: bool, beta: f64, c: &mut [f64]) {
    let (rsb, csb) = if b_trans { (1isize, m as isize) } else { (m as isize, 1isize) };
    debug_assert!(a.len() == m * m && b.len() == m * m && c.len() == m * m);
    unsafe {
        matrixmultiply::dgemm(
            m,
            m,
            m,
            alpha,
            a.as_ptr(),
            m as isize,
            1,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            m as isize,
            1,
        );
    }
}

/// `A * B` (or `A * B^T`) for complex matrices held as separate planes; a
/// missing imaginary plane means the factor is real.
fn cmatmul(m: usize, a: &Planes, b: &Planes, b_trans: bool) -> Planes {
    let mut re = vec![0.0f64; m * m];
    dgemm_acc(m, 1.0, &a.re, &b.re, b_trans, 0.0, &mut re);
    if let (Some(ai), Some(bi)) = (&a.im, &b.im) {
        dgemm_acc(m, -1.0, ai, bi, b_trans, 1.0, &mut re);
    }
    let im = if a.im.is_none() && b.im.is_none() {
        None
    } else {
        let mut im = vec![0.0f64; m * m];
        let mut first = true;
        if let Some(bi) = &b.im {
            dgemm_acc(m, 1.0, &a.re, bi, b_trans, 0.0, &mut im);
            first = false;
        }
        if let Some(ai) = &a.im {
            dgemm_acc(m, 1.0, ai, &b.re, b_trans, if first { 0.0 } else { 1.0 }, &mut im);
        }
        Some(im)
    };
    Planes { re, im }
}

fn split(values: &[Complex64]) -> Planes {
    Planes {
        re: values.iter().map(|v| v.re).collect(),
        im: Some(values.iter().map(|v| v.im).collect()),
    }
}

/// Precomputed separable action of one Gaussian channel on one grid geometry.
/// Build once per channel and reuse across input functions.
pub struct ChannelKernel {
    half_extent: f64,
    points: usize,
    inv_g2: f64,
    axis_op: Planes,
}

impl ChannelKernel {
    pub fn new(ch: &GaussianChannel, half_extent: f64, points: usize) -> Result<Self> {
        let probe = PhaseSpaceGrid::zeros(half_extent, points)?;
        let axis = probe.axis();
        let h = probe.spacing();
        let m = points;
        let (tau, g) = (ch.tau(), ch.g());
        let axis_op = if tau >= TAU_SPECTRAL_MAX {
            // Mapped-node Gaussian quadrature.
            let norm = 1.0 / (2.0 * PI * tau).sqrt();
            let mut k = vec![0.0f64; m * m];
            for (i, &xi) in axis.iter().enumerate() {
                let s = xi / g;
                for (l, &xl) in axis.iter().enumerate() {
                    let wl = if l == 0 || l == m - 1 { 0.5 } else { 1.0 };
                    let d = s - xl;
                    k[i * m + l] = wl * h * norm * (-d * d / (2.0 * tau)).exp();
                }
            }
            Planes { re: k, im: None }
        } else {
            // Spectral multiplier on the trigonometric interpolant, evaluated
            // at the rescaled nodes.
            let half = (m - 1) / 2;
            let period = m as f64 * h;
            let mut d_re = vec![0.0f64; m * m];
            let mut d_im = vec![0.0f64; m * m];
            for k in 0..m {
                for a in 0..m {
                    let ang = -2.0 * PI * ((k * a) % m) as f64 / m as f64;
                    d_re[k * m + a] = ang.cos();
                    d_im[k * m + a] = ang.sin();
                }
            }
            let mut e_re = vec![0.0f64; m * m];
            let mut e_im = vec![0.0f64; m * m];
            for (i, &xi) in axis.iter().enumerate() {
                let s = xi / g;
                if s.abs() > half_extent * (1.0 + 1e-12) {
                    continue; // zero row: outside the sampled square
                }
                let frac = (s + half_extent) / h;
                for k in 0..m {
                    let ktilde = if k <= half { k as f64 } else { k as f64 - m as f64 };
                    let kappa = 2.0 * PI * ktilde / period;
                    let damp = (-tau * kappa * kappa / 2.0).exp() / m as f64;
                    let ang = 2.0 * PI * ktilde * frac / m as f64;
                    e_re[i * m + k] = damp * ang.cos();
                    e_im[i * m + k] = damp * ang.sin();
                }
            }
            let d = Planes { re: d_re, im: Some(d_im) };
            let e = Planes { re: e_re, im: Some(e_im) };
            cmatmul(m, &e, &d, false)
        };
        Ok(Self { half_extent, points, inv_g2: 1.0 / (g * g), axis_op })
    }

    /// `W_out = (1/g^2) A W A^T`.
    pub fn apply(&self, w: &PhaseSpaceGrid) -> Result<PhaseSpaceGrid> {
        if w.points != self.points || (w.half_extent - self.half_extent).abs() > 1e-12 {
            return Err(Error::GridMismatch(self.half_extent, self.points, w.half_extent, w.points));
        }
        let m = self.points;
        let input = split(&w.values);
        let tmp = cmatmul(m, &self.axis_op, &input, false);
        let out = cmatmul(m, &tmp, &self.axis_op, true);
        let mut grid = PhaseSpaceGrid::zeros(self.half_extent, self.points)?;
        let zero = vec![0.0f64; m * m];
        let im = out.im.as_deref().unwrap_or(&zero);
        for (dst, (re, imv)) in grid.values.iter_mut().zip(out.re.iter().zip(im)) {
            *dst = Complex64::new(re * self.inv_g2, imv * self.inv_g2);
        }
        Ok(grid)
    }
}

/// One-shot numerical channel action
/// `W_out(xi) = (1/g^2) [W_in o G_tau](xi / g)`.
pub fn apply_channel_numeric(ch: &GaussianChannel, w: &PhaseSpaceGrid) -> Result<PhaseSpaceGrid> {
    ChannelKernel::new(ch, w.half_extent, w.points)?.apply(w)
}

/// Brute-force transition coefficient
/// `T_{mn->jk} = 2 pi integral W_out^{|m><n|} W^{|k><j|}`.
pub fn transition_coefficient_numeric(
    ch: &GaussianChannel,
    m: usize,
    n: usize,
    j: usize,
    k: usize,
    half_extent: f64,
    points: usize,
) -> Result<f64> {
    for (name, v) in [("m", m), ("n", n), ("j", j), ("k", k)] {
        if v > ORACLE_MAX_INDEX {
            return Err(Error::domain(format!(
                "oracle index {name} = {v} exceeds {ORACLE_MAX_INDEX}"
            )));
        }
    }
    let w_in = wigner_mn(m, n, half_extent, points)?;
    let w_out = apply_channel_numeric(ch, &w_in)?;
    let probe = wigner_mn(k, j, half_extent, points)?;
    Ok(overlap(&w_out, &probe)?.re)
}
