//! Closed-form transition coefficients `T_{mn->jk}` and the transition-
//! operator map `rho -> sum_mn rho^{mn} T(|m><n|)` for one and two modes.
//!
//! With `lambda = g^2 (2 tau + 1)` and `q = (lambda - 1)/(lambda + 1)`, the
//! printed closed forms are, in cancelled form (no negative power of
//! `lambda - 1` is ever evaluated, so the `lambda = 1` limit is exact):
//!
//! ```text
//! T_{00->kk}    = 2 q^k / (lambda+1)
//! T_{10->k+1,k} = 4 g sqrt(k+1) q^k / (lambda+1)^2
//! T_{11->kk}    = 2 A q^k / (lambda+1)^2 + 8 k g^2 q^{k-1} / (lambda+1)^3
//! T_{22->kk}    = 2 (A^2 + 8 k g^2) q^k / (lambda+1)^3
//!               + 32 k g^2 (1 - g^2) q^{k-1} / (lambda+1)^4
//!               + 16 k (k-1) g^4 q^{k-2} / (lambda+1)^5
//! ```
//!
//! where `A = lambda - 2 g^2 + 1`, everything off the selection rule
//! `j - k = m - n` is exactly zero, and `T_{01->jk} = T_{10->kj}`.

use num_complex::Complex64;

use crate::channel::GaussianChannel;
use crate::error::{Error, Result};
use crate::fock::{tensor, FockOperator, TwoModeOperator};

/// Largest tolerated truncated tail weight for a diagonal transition operator.
pub const DEFAULT_TAIL_TOL: f64 = 1e-9;
/// Largest tolerated weight on an unsupported source component.
pub const SOURCE_SUPPORT_TOL: f64 = 1e-10;
/// Cutoff policy clamp range.
pub const MIN_CUTOFF: usize = 8;
pub const MAX_CUTOFF: usize = 40;

/// Source dyads `(m, n)` with printed closed forms.
pub const SUPPORTED_SOURCES: [(usize, usize); 5] = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)];

/// Smallest cutoff `N` in `[MIN_CUTOFF, MAX_CUTOFF]` with
/// `((lambda-1)/(lambda+1))^{N+1} < 1e-12`; the output photon distribution is
/// geometric with that ratio.
pub fn default_cutoff(lambda: f64) -> usize {
    let q = (lambda - 1.0) / (lambda + 1.0);
    if q <= 0.0 {
        return MIN_CUTOFF;
    }
    let needed = (1e-12f64.ln() / q.ln()).ceil() as i64 - 1;
    needed.clamp(MIN_CUTOFF as i64, MAX_CUTOFF as i64) as usize
}

/// Applies an explicit cutoff override (validated against `[8, 40]`) or falls
/// back to [`default_cutoff`].
pub fn resolve_cutoff(override_cutoff: Option<usize>, lambda: f64) -> Result<usize> {
    match override_cutoff {
        Some(n) if (MIN_CUTOFF..=MAX_CUTOFF).contains(&n) => Ok(n),
        Some(n) => Err(Error::domain(format!(
            "cutoff override {n} outside [{MIN_CUTOFF}, {MAX_CUTOFF}]"
        ))),
        None => Ok(default_cutoff(lambda)),
    }
}

/// `q^e` with `q^0 = 1` (also at `q = 0`) and zero for negative exponents.
/// Negative exponents only ever appear multiplied by a vanishing prefactor.
#[inline]
fn qpow(q: f64, e: i64) -> f64 {
    if e < 0 {
        0.0
    } else if e == 0 {
        1.0
    } else {
        q.powi(e as i32)
    }
}

/// Per-channel quantities shared by all coefficient evaluations.
#[derive(Debug, Clone, Copy)]
struct ChannelCoeffs {
    g: f64,
    q: f64,
    /// `1 / (lambda + 1)`
    s: f64,
    /// `A = lambda - 2 g^2 + 1`
    a: f64,
}

impl ChannelCoeffs {
    fn new(ch: &GaussianChannel) -> Result<Self> {
        let lambda = ch.lambda();
        if lambda < 1.0 - 1e-9 {
            return Err(Error::domain(format!(
                "channel lambda = {lambda:.12} < 1: no physical teleportation channel reaches it"
            )));
        }
        let u = (lambda - 1.0).max(0.0);
        let s = 1.0 / (lambda + 1.0);
        Ok(Self { g: ch.g(), q: u * s, s, a: lambda - 2.0 * ch.g() * ch.g() + 1.0 })
    }

    fn t00(&self, k: usize) -> f64 {
        2.0 * self.s * qpow(self.q, k as i64)
    }

    fn t10(&self, k: usize) -> f64 {
        4.0 * self.g * ((k + 1) as f64).sqrt() * self.s * self.s * qpow(self.q, k as i64)
    }

    fn t11(&self, k: usize) -> f64 {
        let g2 = self.g * self.g;
        let s2 = self.s * self.s;
        2.0 * self.a * s2 * qpow(self.q, k as i64)
            + 8.0 * k as f64 * g2 * s2 * self.s * qpow(self.q, k as i64 - 1)
    }

    fn t22(&self, k: usize) -> f64 {
        let g2 = self.g * self.g;
        let kf = k as f64;
        let s3 = self.s * self.s * self.s;
        2.0 * (self.a * self.a + 8.0 * kf * g2) * s3 * qpow(self.q, k as i64)
            + 32.0 * kf * g2 * (1.0 - g2) * s3 * self.s * qpow(self.q, k as i64 - 1)
            + 16.0 * kf * (kf - 1.0) * g2 * g2 * s3 * self.s * self.s * qpow(self.q, k as i64 - 2)
    }

    fn diagonal(&self, m: usize, k: usize) -> f64 {
        match m {
            0 => self.t00(k),
            1 => self.t11(k),
            _ => self.t22(k),
        }
    }
}

/// Closed-form coefficient `T_{mn->jk}`. Supported sources are listed in
/// [`SUPPORTED_SOURCES`]; everything off the selection rule `j - k = m - n`
/// is exactly zero.
pub fn transition_coefficient(
    ch: &GaussianChannel,
    m: usize,
    n: usize,
    j: usize,
    k: usize,
) -> Result<f64> {
    let c = ChannelCoeffs::new(ch)?;
    match (m, n) {
        (0, 0) => Ok(if j == k { c.t00(k) } else { 0.0 }),
        (1, 1) => Ok(if j == k { c.t11(k) } else { 0.0 }),
        (2, 2) => Ok(if j == k { c.t22(k) } else { 0.0 }),
        (1, 0) => Ok(if j == k + 1 { c.t10(k) } else { 0.0 }),
        (0, 1) => Ok(if k == j + 1 { c.t10(j) } else { 0.0 }),
        _ => Err(Error::UnsupportedSource { m, n }),
    }
}

/// Precomputed transition coefficients for one channel at one cutoff. Only
/// the band permitted by the selection rule is stored.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    channel: GaussianChannel,
    cutoff: usize,
    /// `T_{mm->kk}` for `m = 0, 1, 2`, `k = 0..=cutoff`.
    diag: [Vec<f64>; 3],
    /// `T_{10->k+1,k}` for `k = 0..cutoff`.
    subdiag: Vec<f64>,
    /// `1 - sum_k T_{mm->kk}` for `m = 0, 1, 2`.
    tails: [f64; 3],
}

impl TransitionTable {
    pub fn new(ch: &GaussianChannel, cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::domain(format!(
                "transition table needs cutoff >= 2, got {cutoff}"
            )));
        }
        let c = ChannelCoeffs::new(ch)?;
        let diag = [0usize, 1, 2].map(|m| (0..=cutoff).map(|k| c.diagonal(m, k)).collect::<Vec<_>>());
        let subdiag = (0..cutoff).map(|k| c.t10(k)).collect();
        let tails = [0usize, 1, 2].map(|m| (1.0 - diag[m].iter().sum::<f64>()).max(0.0));
        Ok(Self { channel: *ch, cutoff, diag, subdiag, tails })
    }

    pub fn channel(&self) -> &GaussianChannel {
        &self.channel
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Table lookup of `T_{mn->jk}` for `j, k <= cutoff`.
    pub fn coefficient(&self, m: usize, n: usize, j: usize, k: usize) -> Result<f64> {
        if j > self.cutoff || k > self.cutoff {
            return Err(Error::domain(format!(
                "target indices ({j}, {k}) exceed cutoff {}",
                self.cutoff
            )));
        }
        match (m, n) {
            (0, 0) | (1, 1) | (2, 2) => Ok(if j == k { self.diag[m][k] } else { 0.0 }),
            (1, 0) => Ok(if j == k + 1 { self.subdiag[k] } else { 0.0 }),
            (0, 1) => Ok(if k == j + 1 { self.subdiag[j] } else { 0.0 }),
            _ => Err(Error::UnsupportedSource { m, n }),
        }
    }

    /// Truncated tail weight `sum_{k > cutoff} T_{mm->kk}` for a diagonal
    /// source `m = 0, 1, 2`.
    pub fn tail_weight(&self, m: usize) -> Result<f64> {
        if m > 2 {
            return Err(Error::UnsupportedSource { m, n: m });
        }
        Ok(self.tails[m])
    }

    /// The truncated operator `T(|m><n|)`. Diagonal sources fail with a
    /// cutoff error when the tail weight exceeds [`DEFAULT_TAIL_TOL`].
    pub fn operator(&self, m: usize, n: usize) -> Result<FockOperator> {
        let mut op = FockOperator::zeros(self.cutoff);
        match (m, n) {
            (0, 0) | (1, 1) | (2, 2) => {
                let tail = self.tails[m];
                if tail > DEFAULT_TAIL_TOL {
                    return Err(Error::CutoffTail {
                        cutoff: self.cutoff,
                        tail,
                        tol: DEFAULT_TAIL_TOL,
                    });
                }
                for k in 0..=self.cutoff {
                    op.set(k, k, Complex64::new(self.diag[m][k], 0.0));
                }
            }
            (1, 0) => {
                for k in 0..self.cutoff {
                    op.set(k + 1, k, Complex64::new(self.subdiag[k], 0.0));
                }
            }
            (0, 1) => {
                for k in 0..self.cutoff {
                    op.set(k, k + 1, Complex64::new(self.subdiag[k], 0.0));
                }
            }
            _ => return Err(Error::UnsupportedSource { m, n }),
        }
        Ok(op)
    }
}

/// The truncated transition operator `T(|m><n|)` at the given cutoff.
pub fn transition_operator(
    ch: &GaussianChannel,
    m: usize,
    n: usize,
    cutoff: usize,
) -> Result<FockOperator> {
    TransitionTable::new(ch, cutoff)?.operator(m, n)
}

fn check_source_support<F>(dim: usize, weight: F) -> Result<()>
where
    F: Fn(usize, usize) -> f64,
{
    for m in 0..dim {
        for n in 0..dim {
            if weight(m, n) > SOURCE_SUPPORT_TOL && !SUPPORTED_SOURCES.contains(&(m, n)) {
                return Err(Error::UnsupportedSource { m, n });
            }
        }
    }
    Ok(())
}

/// Sends `rho = sum rho^{mn} |m><n|` through the channel:
/// `rho_out = sum rho^{mn} T(|m><n|)`. The input must be supported on the
/// sources with printed closed forms (see [`SUPPORTED_SOURCES`]).
pub fn apply_channel(ch: &GaussianChannel, rho: &FockOperator) -> Result<FockOperator> {
    let dim = rho.dim();
    check_source_support(dim, |m, n| rho.get(m, n).norm())?;
    let table = TransitionTable::new(ch, rho.cutoff())?;
    let mut out = FockOperator::zeros(rho.cutoff());
    for (m, n) in SUPPORTED_SOURCES {
        if m >= dim || n >= dim {
            continue;
        }
        let w = rho.get(m, n);
        if w.norm() == 0.0 {
            continue;
        }
        out = out.add(&table.operator(m, n)?.scaled(w))?;
    }
    Ok(out)
}

/// Two-mode extension: each mode goes through its own channel,
/// `rho_out = sum rho_{jkmn} T_X(|j><k|) (x) T_Y(|m><n|)`.
pub fn apply_two_mode(
    ch_x: &GaussianChannel,
    ch_y: &GaussianChannel,
    rho: &TwoModeOperator,
) -> Result<TwoModeOperator> {
    let (cx, cy) = rho.cutoffs();
    let max_weight_x = |j: usize, k: usize| {
        let mut w = 0.0f64;
        for m in 0..=cy {
            for n in 0..=cy {
                w = w.max(rho.get(j, m, k, n).norm());
            }
        }
        w
    };
    let max_weight_y = |m: usize, n: usize| {
        let mut w = 0.0f64;
        for j in 0..=cx {
            for k in 0..=cx {
                w = w.max(rho.get(j, m, k, n).norm());
            }
        }
        w
    };
    check_source_support(cx + 1, max_weight_x)?;
    check_source_support(cy + 1, max_weight_y)?;

    let table_x = TransitionTable::new(ch_x, cx)?;
    let table_y = TransitionTable::new(ch_y, cy)?;
    let mut ops_x = Vec::new();
    let mut ops_y = Vec::new();
    for (m, n) in SUPPORTED_SOURCES {
        ops_x.push(((m, n), table_x.operator(m, n)));
        ops_y.push(((m, n), table_y.operator(m, n)));
    }

    let mut out = TwoModeOperator::zeros(cx, cy);
    for (src_x, op_x) in &ops_x {
        if src_x.0 > cx || src_x.1 > cx {
            continue;
        }
        for (src_y, op_y) in &ops_y {
            if src_y.0 > cy || src_y.1 > cy {
                continue;
            }
            let w = rho.get(src_x.0, src_y.0, src_x.1, src_y.1);
            if w.norm() == 0.0 {
                continue;
            }
            let term = tensor(op_x.as_ref().map_err(Clone::clone)?, op_y.as_ref().map_err(Clone::clone)?);
            out = out.add(&term.scaled(w))?;
        }
    }
    Ok(out)
}
