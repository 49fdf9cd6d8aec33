//! Registered verification suites: each one pits a closed form against an
//! independent route (phase-space quadrature, dense eigensolvers, brute-force
//! scans) and reports its worst error against a fixed tolerance.
//!
//! The suites back the `verify` command; they are deterministic for a given
//! seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{GaussianChannel, ResourceParams};
use crate::error::{Error, Result};
use crate::fock::{beam_splitter, TwoModeOperator};
use crate::phasespace::{overlap, wigner_mn, ChannelKernel, DEFAULT_HALF_EXTENT, DEFAULT_POINTS};
use crate::swap::{ppt_blocks, swapped_state};
use crate::transition::{
    apply_two_mode, default_cutoff, transition_coefficient, SUPPORTED_SOURCES,
};

/// Default seed for the randomized suites.
pub const DEFAULT_SEED: u64 = 0x7e1e;

/// Names of all registered suites, in run order.
pub const SUITE_NAMES: [&str; 8] = [
    "oracle",
    "trace",
    "positivity",
    "selection",
    "commutation",
    "block-spectrum",
    "composition",
    "decomposition",
];

/// Outcome of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// The twelve verification channels spanning `lambda` in `[1, 6]` and `g` in
/// `[0.3, 2]` (with `tau = (lambda/g^2 - 1)/2 >= 0`), exercising both kernel
/// branches of the phase-space oracle.
pub fn oracle_channels() -> Vec<GaussianChannel> {
    [
        (1.0, 0.3),
        (1.0, 0.76),
        (1.0, 1.0),
        (1.5, 0.7),
        (1.5, 1.2),
        (2.5, 0.5),
        (2.5, 1.0),
        (2.5, 1.5),
        (4.0, 0.9),
        (4.0, 2.0),
        (6.0, 0.3),
        (6.0, 2.0),
    ]
    .into_iter()
    .map(|(lambda, g): (f64, f64)| {
        let tau = (lambda / (g * g) - 1.0) / 2.0;
        GaussianChannel::new(tau.max(0.0), g).expect("verification channels are valid")
    })
    .collect()
}

/// Runs one suite by name with an optional tolerance override.
pub fn run_suite(name: &str, tol_override: Option<f64>, seed: u64) -> Result<SuiteReport> {
    let report = match name {
        "oracle" => oracle_suite(),
        "trace" => trace_suite(),
        "positivity" => positivity_suite(seed),
        "selection" => selection_suite(),
        "commutation" => commutation_suite(seed)?,
        "block-spectrum" => block_spectrum_suite()?,
        "composition" => composition_suite(seed),
        "decomposition" => decomposition_suite(),
        _ => {
            return Err(Error::domain(format!(
                "unknown suite '{name}'; available: {}",
                SUITE_NAMES.join(", ")
            )))
        }
    };
    Ok(match tol_override {
        Some(tol) => SuiteReport { tolerance: tol, ..report },
        None => report,
    })
}

/// Runs every registered suite.
pub fn run_all(tol_override: Option<f64>, seed: u64) -> Result<Vec<SuiteReport>> {
    SUITE_NAMES.iter().map(|name| run_suite(name, tol_override, seed)).collect()
}

/// Closed-form transition coefficients against phase-space quadrature for
/// every supported source and all targets `j, k <= 6` over the twelve
/// verification channels.
fn oracle_suite() -> SuiteReport {
    let (half_extent, points) = (DEFAULT_HALF_EXTENT, DEFAULT_POINTS);
    let probes: Vec<Vec<_>> = (0..=6)
        .map(|j| {
            (0..=6)
                .map(|k| wigner_mn(k, j, half_extent, points).expect("probe indices are small"))
                .collect()
        })
        .collect();
    let mut max_error = 0.0f64;
    let mut cases = 0usize;
    for ch in oracle_channels() {
        let kernel = ChannelKernel::new(&ch, half_extent, points).expect("valid grid");
        for (m, n) in SUPPORTED_SOURCES {
            let w_in = wigner_mn(m, n, half_extent, points).expect("source indices are small");
            let w_out = kernel.apply(&w_in).expect("geometry matches");
            for j in 0..=6usize {
                for k in 0..=6usize {
                    let numeric = overlap(&w_out, &probes[j][k]).expect("geometry matches").re;
                    let closed = transition_coefficient(&ch, m, n, j, k)
                        .expect("supported source on a lambda >= 1 channel");
                    max_error = max_error.max((numeric - closed).abs());
                    cases += 1;
                }
            }
        }
    }
    SuiteReport { name: "oracle", cases, max_error, tolerance: 1e-6 }
}

/// `sum_k T_{mm->kk} = 1` for `m = 0, 1, 2`, summed to the geometric tail
/// bound.
fn trace_suite() -> SuiteReport {
    let mut max_error = 0.0f64;
    let mut cases = 0usize;
    for ch in oracle_channels() {
        let lambda = ch.lambda();
        let q = ((lambda - 1.0) / (lambda + 1.0)).max(0.0);
        let k_max = if q == 0.0 { 8 } else { ((1e-18f64.ln() / q.ln()) as usize).max(8) };
        for m in 0..=2usize {
            let sum: f64 = (0..=k_max)
                .map(|k| transition_coefficient(&ch, m, m, k, k).expect("diagonal source"))
                .sum();
            max_error = max_error.max((sum - 1.0).abs());
            cases += 1;
        }
    }
    SuiteReport { name: "trace", cases, max_error, tolerance: 1e-10 }
}

/// The channel maps positive inputs to positive outputs: worst negative
/// eigenvalue excursion over randomized supported densities and physical
/// channels.
fn positivity_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error = 0.0f64;
    let mut cases = 0usize;
    for _ in 0..60 {
        let p = ResourceParams::new(rng.random_range(0.1..2.2), rng.random_range(0.0..0.6))
            .expect("sampled parameters are valid");
        let ch = GaussianChannel::teleport(&p, rng.random_range(0.3..1.8))
            .expect("sampled gain is valid");
        let cutoff = default_cutoff(ch.lambda());
        let mut rho = crate::fock::FockOperator::zeros(cutoff);
        let w2: f64 = rng.random_range(0.0..0.3);
        let a: f64 = rng.random_range(0.0..1.0);
        let (p0, p1) = ((1.0 - w2) * a, (1.0 - w2) * (1.0 - a));
        let mut coh = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let cap = 0.98 * (p0 * p1).sqrt();
        if coh.norm() > cap {
            coh *= Complex64::new(cap / coh.norm(), 0.0);
        }
        rho.set(0, 0, Complex64::new(p0, 0.0));
        rho.set(1, 1, Complex64::new(p1, 0.0));
        rho.set(2, 2, Complex64::new(w2, 0.0));
        rho.set(0, 1, coh);
        rho.set(1, 0, coh.conj());
        let out = crate::transition::apply_channel(&ch, &rho).expect("supported input");
        let min = out.eigvals_hermitian().expect("output is Hermitian")[0];
        max_error = max_error.max((-min).max(0.0));
        cases += 1;
    }
    SuiteReport { name: "positivity", cases, max_error, tolerance: 1e-10 }
}

/// Coefficients off the selection rule `j - k = m - n` are exact zeros.
fn selection_suite() -> SuiteReport {
    let mut max_error = 0.0f64;
    let mut cases = 0usize;
    for ch in oracle_channels() {
        for (m, n) in SUPPORTED_SOURCES {
            for j in 0..=8usize {
                for k in 0..=8usize {
                    if j as i64 - k as i64 == m as i64 - n as i64 {
                        continue;
                    }
                    let v = transition_coefficient(&ch, m, n, j, k)
                        .expect("supported source")
                        .abs();
                    max_error = max_error.max(v);
                    cases += 1;
                }
            }
        }
    }
    SuiteReport { name: "selection", cases, max_error, tolerance: 0.0 }
}

/// Beam-splitter rotation and two-mode channel map commute (equal channels):
/// elementwise difference over 20 random `(alpha, beta)` pairs and random
/// states on the subspace the rotation preserves.
fn commutation_suite(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11ce);
    let p = ResourceParams::new(1.0, 0.2)?;
    let ch = GaussianChannel::teleport(&p, 0.79)?;
    let cutoff = default_cutoff(ch.lambda());
    let mut max_error = 0.0f64;
    for _ in 0..20 {
        let z = [
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        ];
        let norm = (z[0].norm_sqr() + z[1].norm_sqr()).sqrt();
        let u = beam_splitter(z[0] / norm, z[1] / norm, cutoff)?;

        let g = nalgebra::DMatrix::from_fn(3, 3, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let small = &g * g.adjoint();
        let small = &small / small.trace();
        let mut rho = TwoModeOperator::zeros(cutoff, cutoff);
        let basis = [(0usize, 0usize), (0, 1), (1, 0)];
        for (r, &(j, m)) in basis.iter().enumerate() {
            for (c, &(k, n)) in basis.iter().enumerate() {
                rho.set(j, m, k, n, small[(r, c)]);
            }
        }
        let lhs = apply_two_mode(&ch, &ch, &rho.conjugated_by(&u)?)?;
        let rhs = apply_two_mode(&ch, &ch, &rho)?.conjugated_by(&u)?;
        max_error = max_error.max(crate::fock::max_modulus(&(lhs.matrix() - rhs.matrix())));
    }
    Ok(SuiteReport { name: "commutation", cases: 20, max_error, tolerance: 1e-9 })
}

/// Analytic 2x2 block eigenvalues against the dense spectrum of the partial
/// transpose of the swapped state (multiset comparison after sorting).
fn block_spectrum_suite() -> Result<SuiteReport> {
    let mut max_error = 0.0f64;
    let mut cases = 0usize;
    for (eta, r, l, g) in [(0.8, 1.0, 0.2, 0.90), (0.5, 0.6, 0.1, 0.5), (1.0, 1.3, 0.3, 1.4)] {
        let p = ResourceParams::new(r, l)?;
        let ch = GaussianChannel::teleport(&p, g)?;
        let cutoff = default_cutoff(ch.lambda());
        let mut dense = swapped_state(eta, &ch, cutoff)?.partial_transpose_x().eigvals_hermitian()?;
        let mut analytic = Vec::with_capacity(dense.len());
        for b in ppt_blocks(eta, &ch, cutoff - 1)? {
            analytic.push(b.lambda_minus);
            analytic.push(b.lambda_plus);
        }
        analytic.push(
            (1.0 - eta) * transition_coefficient(&ch, 0, 0, cutoff, cutoff)?
                + eta / 2.0 * transition_coefficient(&ch, 1, 1, cutoff, cutoff)?,
        );
        analytic.push(eta / 2.0 * transition_coefficient(&ch, 0, 0, 0, 0)?);
        analytic.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        dense.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        for (x, y) in dense.iter().zip(&analytic) {
            max_error = max_error.max((x - y).abs());
            cases += 1;
        }
    }
    Ok(SuiteReport { name: "block-spectrum", cases, max_error, tolerance: 1e-8 })
}

/// Channel composition is associative (relative fieldwise error).
fn composition_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0);
    let rel = |a: f64, b: f64| (a - b).abs() / f64::max(1.0, a.abs().max(b.abs()));
    let mut max_error = 0.0f64;
    for _ in 0..10_000 {
        let mut mk = || {
            GaussianChannel::new(rng.random_range(0.0..4.0), rng.random_range(0.05..3.0))
                .expect("sampled channels are valid")
        };
        let (a, b, c) = (mk(), mk(), mk());
        let left = a.compose(&b.compose(&c));
        let right = a.compose(&b).compose(&c);
        max_error = max_error.max(rel(left.tau(), right.tau()).max(rel(left.g(), right.g())));
    }
    SuiteReport { name: "composition", cases: 10_000, max_error, tolerance: 1e-12 }
}

/// Lossless teleportation at the canonical gains equals pure attenuation /
/// amplification (relative fieldwise error over a squeezing scan).
fn decomposition_suite() -> SuiteReport {
    let rel = |a: f64, b: f64| (a - b).abs() / f64::max(1.0, a.abs().max(b.abs()));
    let mut max_error = 0.0f64;
    let mut cases = 0usize;
    for i in 0..40 {
        let r = 0.1 + 0.07 * i as f64;
        let p = ResourceParams::new(r, 0.0).expect("valid");
        let t = r.tanh();
        let tele_att = GaussianChannel::teleport(&p, t).expect("valid gain");
        let att = GaussianChannel::attenuation(t * t).expect("valid transmittance");
        max_error = max_error.max(rel(tele_att.tau(), att.tau()).max(rel(tele_att.g(), att.g())));
        if 1.0 / t <= crate::channel::GAIN_MAX {
            let tele_amp = GaussianChannel::teleport(&p, 1.0 / t).expect("valid gain");
            let amp = GaussianChannel::amplification(1.0 / (t * t)).expect("valid gain");
            max_error =
                max_error.max(rel(tele_amp.tau(), amp.tau()).max(rel(tele_amp.g(), amp.g())));
        }
        cases += 2;
    }
    SuiteReport { name: "decomposition", cases, max_error, tolerance: 1e-12 }
}
