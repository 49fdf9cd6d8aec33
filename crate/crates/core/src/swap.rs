//! Entanglement swapping of a split single photon: the teleported two-mode
//! state, the analytic spectrum of its partial transpose, the violation
//! condition, and the logarithmic negativity with its optimal gain.
//!
//! After teleporting the Y half of `(1-eta)|00><00| + eta |psi><psi|` with
//! `|psi> = (|01> + |10>)/sqrt(2)`, the partial transpose over X decomposes
//! into orthogonal 2x2 blocks on span{|0,k>, |1,k+1>} with entries
//!
//! ```text
//! a_k = (1-eta) T_{00->kk} + (eta/2) T_{11->kk},
//! b_k = (eta/2) T_{10->k+1,k},
//! c_k = (eta/2) T_{00->k+1,k+1},
//! ```
//!
//! whose negative eigenvalue (the same sign for every `k`) witnesses the
//! surviving entanglement.

use num_complex::Complex64;

use crate::channel::{GaussianChannel, ResourceParams};
use crate::error::{Error, Result};
use crate::fock::{tensor, FockOperator, TwoModeOperator};
use crate::optimize::{maximize, Maximum};
use crate::transition::{transition_coefficient, TransitionTable};

/// Default block count for the logarithmic-negativity series; block entries
/// decay geometrically with ratio `(lambda-1)/(lambda+1)`.
pub const DEFAULT_K_MAX: usize = 64;

/// Truncation target for the block series.
const SERIES_TAIL_TOL: f64 = 1e-12;

/// One 2x2 block of the partially transposed swapped state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptBlock {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

impl PptBlock {
    fn new(k: usize, a: f64, b: f64, c: f64) -> Self {
        let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
        Self { k, a, b, c, lambda_minus: (a + c - disc) / 2.0, lambda_plus: (a + c + disc) / 2.0 }
    }
}

/// Swapping figures of merit for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapMetrics {
    pub ppt_violated: bool,
    pub log_negativity: f64,
    /// Filled in when the gain was optimized rather than given.
    pub g_ln_opt: Option<f64>,
}

fn check_eta(eta: f64) -> Result<()> {
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("input efficiency eta = {eta} must lie in [0, 1]")));
    }
    Ok(())
}

/// The teleported two-mode state `rho_XZ` (X is a qubit mode with cutoff 1,
/// Z carries the thermalized photon distribution up to `cutoff`):
///
/// ```text
/// rho_XZ = (1-eta)|0><0| (x) T^00
///        + (eta/2) (|1><1| (x) T^00 + |1><0| (x) T^01
///                 + |0><1| (x) T^10 + |0><0| (x) T^11).
/// ```
pub fn swapped_state(eta: f64, ch: &GaussianChannel, cutoff: usize) -> Result<TwoModeOperator> {
    check_eta(eta)?;
    let table = TransitionTable::new(ch, cutoff)?;
    let t00 = table.operator(0, 0)?;
    let t11 = table.operator(1, 1)?;
    let t10 = table.operator(1, 0)?;
    let t01 = table.operator(0, 1)?;
    let dyad = |m: usize, n: usize| FockOperator::basis_op(m, n, 1).unwrap();
    let half = Complex64::new(eta / 2.0, 0.0);
    let mut rho = tensor(&dyad(0, 0), &t00).scaled(Complex64::new(1.0 - eta, 0.0));
    rho = rho.add(&tensor(&dyad(1, 1), &t00).scaled(half))?;
    rho = rho.add(&tensor(&dyad(1, 0), &t01).scaled(half))?;
    rho = rho.add(&tensor(&dyad(0, 1), &t10).scaled(half))?;
    rho = rho.add(&tensor(&dyad(0, 0), &t11).scaled(half))?;
    Ok(rho)
}

/// Analytic 2x2 blocks `k = 0..=k_max` of the partial transpose of
/// [`swapped_state`]. The leftover `k = -1` piece is the bare entry
/// `(eta/2) T_{00->00}`, which is always positive and therefore omitted.
pub fn ppt_blocks(eta: f64, ch: &GaussianChannel, k_max: usize) -> Result<Vec<PptBlock>> {
    check_eta(eta)?;
    (0..=k_max)
        .map(|k| {
            let a = (1.0 - eta) * transition_coefficient(ch, 0, 0, k, k)?
                + eta / 2.0 * transition_coefficient(ch, 1, 1, k, k)?;
            let b = eta / 2.0 * transition_coefficient(ch, 1, 0, k + 1, k)?;
            let c = eta / 2.0 * transition_coefficient(ch, 0, 0, k + 1, k + 1)?;
            Ok(PptBlock::new(k, a, b, c))
        })
        .collect()
}

/// Closed-form violation test: the partial transpose acquires a negative
/// eigenvalue exactly when
///
/// ```text
/// (3 eta - 2)/(2 - eta) > 2 tau - 1/g^2,
/// ```
///
/// with `tau` the teleportation variance for `(p, g)`. Equality does not
/// violate (PPT fails only on strictly negative eigenvalues).
pub fn ppt_violated(eta: f64, p: &ResourceParams, g: f64) -> Result<bool> {
    check_eta(eta)?;
    let ch = GaussianChannel::teleport(p, g)?;
    Ok((3.0 * eta - 2.0) / (2.0 - eta) > 2.0 * ch.tau() - 1.0 / (g * g))
}

/// Logarithmic negativity
/// `E_LN = log2[1 + sum_k (|lambda_k^-| - lambda_k^-)]` over the analytic
/// blocks. Fails when the geometric tail at `k_max` has not decayed below
/// the truncation target.
pub fn log_negativity(eta: f64, ch: &GaussianChannel, k_max: usize) -> Result<f64> {
    let blocks = ppt_blocks(eta, ch, k_max)?;
    let (last, used) = blocks.split_last().expect("k_max >= 0 yields at least one block");
    let next_term = 2.0 * (last.a + last.b + last.c);
    if next_term >= SERIES_TAIL_TOL {
        return Err(Error::Truncation(format!(
            "block series not converged at k_max = {k_max}: next term bound {next_term:.3e} \
             >= {SERIES_TAIL_TOL:.1e}; raise k_max"
        )));
    }
    let negative_sum: f64 =
        used.iter().map(|b| if b.lambda_minus < 0.0 { -2.0 * b.lambda_minus } else { 0.0 }).sum();
    Ok((1.0 + negative_sum).log2())
}

/// Logarithmic negativity of the pre-teleportation state
/// `(1-eta)|00><00| + eta |psi><psi|`, computed from the full spectrum of its
/// partial transpose on the two-qubit space.
pub fn initial_log_negativity(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let mut rho = TwoModeOperator::zeros(1, 1);
    rho.set(0, 0, 0, 0, Complex64::new(1.0 - eta, 0.0));
    for (j, m) in [(0usize, 1usize), (1, 0)] {
        for (k, n) in [(0usize, 1usize), (1, 0)] {
            rho.set(j, m, k, n, Complex64::new(eta / 2.0, 0.0));
        }
    }
    let trace_norm: f64 =
        rho.partial_transpose_x().eigvals_hermitian()?.iter().map(|v| v.abs()).sum();
    Ok(trace_norm.max(1.0).log2())
}

/// Maximizes the logarithmic negativity over the feedforward gain.
pub fn optimize_gain_ln(eta: f64, p: &ResourceParams, bracket: (f64, f64)) -> Result<Maximum> {
    check_eta(eta)?;
    let best = maximize(
        |g| log_negativity(eta, &GaussianChannel::teleport(p, g)?, DEFAULT_K_MAX),
        bracket,
    )?;
    if best.value <= 0.0 {
        return Err(Error::Bracket(format!(
            "log negativity vanishes on the whole bracket [{}, {}]: PPT is never violated",
            bracket.0, bracket.1
        )));
    }
    Ok(best)
}

/// Violation flag and negativity at a fixed gain.
pub fn swap_metrics(
    eta: f64,
    p: &ResourceParams,
    g: f64,
    k_max: usize,
) -> Result<SwapMetrics> {
    let ch = GaussianChannel::teleport(p, g)?;
    Ok(SwapMetrics {
        ppt_violated: ppt_violated(eta, p, g)?,
        log_negativity: log_negativity(eta, &ch, k_max)?,
        g_ln_opt: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn channel(r: f64, l: f64, g: f64) -> GaussianChannel {
        GaussianChannel::teleport(&ResourceParams::new(r, l).unwrap(), g).unwrap()
    }

    #[test]
    fn zero_efficiency_is_separable() {
        let ch = channel(1.0, 0.2, 0.9);
        let cutoff = crate::transition::default_cutoff(ch.lambda());
        let rho = swapped_state(0.0, &ch, cutoff).unwrap();
        // Product of vacuum in X and the thermal T^00 in Z.
        let thermal = TransitionTable::new(&ch, cutoff).unwrap().operator(0, 0).unwrap();
        for k in 0..=cutoff {
            assert_abs_diff_eq!(rho.get(0, k, 0, k).re, thermal.get(k, k).re, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(log_negativity(0.0, &ch, DEFAULT_K_MAX).unwrap(), 0.0);
        let min = rho.partial_transpose_x().eigvals_hermitian().unwrap()[0];
        assert!(min >= -1e-12);
    }

    #[test]
    fn ideal_channel_reproduces_bell_state() {
        let ch = channel(30.0, 0.0, 30.0f64.tanh());
        let rho = swapped_state(1.0, &ch, 8).unwrap();
        for (j, m) in [(0usize, 1usize), (1, 0)] {
            for (k, n) in [(0usize, 1usize), (1, 0)] {
                assert_abs_diff_eq!(rho.get(j, m, k, n).re, 0.5, epsilon = 1e-6);
            }
        }
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-9);
        // Maximally entangled pair: lambda_0^- = -1/2 and E_LN = 1.
        let blocks = ppt_blocks(1.0, &ch, 4).unwrap();
        assert_abs_diff_eq!(blocks[0].lambda_minus, -0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(log_negativity(1.0, &ch, DEFAULT_K_MAX).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn headline_state_is_real_and_positive() {
        // (eta, r, l, g) = (0.8, 1.0, 0.2, 0.90).
        let ch = channel(1.0, 0.2, 0.90);
        let cutoff = crate::transition::default_cutoff(ch.lambda());
        let rho = swapped_state(0.8, &ch, cutoff).unwrap();
        let max_im = rho.matrix().iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
        assert!(max_im < 1e-14);
        rho.check_density(1e-9).unwrap();
        // Entanglement lives on the {|0,k+1>, |1,k>} cross terms.
        for k in 0..4 {
            assert!(rho.get(0, k + 1, 1, k).re.abs() > 1e-4);
        }
    }

    #[test]
    fn block_spectrum_matches_full_partial_transpose() {
        let ch = channel(1.0, 0.2, 0.9);
        let cutoff = crate::transition::default_cutoff(ch.lambda());
        let eta = 0.8;
        let rho = swapped_state(eta, &ch, cutoff).unwrap();
        let mut full = rho.partial_transpose_x().eigvals_hermitian().unwrap();

        // Analytic spectrum of the truncated matrix: blocks k = 0..cutoff-1
        // plus the unpaired corner a_cutoff and the k = -1 entry.
        let blocks = ppt_blocks(eta, &ch, cutoff - 1).unwrap();
        let mut analytic = Vec::new();
        for b in &blocks {
            analytic.push(b.lambda_minus);
            analytic.push(b.lambda_plus);
        }
        analytic.push(
            (1.0 - eta) * transition_coefficient(&ch, 0, 0, cutoff, cutoff).unwrap()
                + eta / 2.0 * transition_coefficient(&ch, 1, 1, cutoff, cutoff).unwrap(),
        );
        analytic.push(eta / 2.0 * transition_coefficient(&ch, 0, 0, 0, 0).unwrap());
        analytic.sort_by(|a, b| a.partial_cmp(b).unwrap());
        full.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(full.len(), analytic.len());
        for (x, y) in full.iter().zip(&analytic) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
    }

    #[test]
    fn negative_eigenvalue_sign_is_k_independent() {
        for (eta, r, l, g) in [(0.8, 1.0, 0.2, 0.9), (0.5, 0.7, 0.1, 0.6), (0.2, 1.2, 0.4, 1.0)] {
            let p = ResourceParams::new(r, l).unwrap();
            let ch = GaussianChannel::teleport(&p, g).unwrap();
            let blocks = ppt_blocks(eta, &ch, 12).unwrap();
            let signs: Vec<bool> = blocks.iter().map(|b| b.lambda_minus < -1e-15).collect();
            assert!(
                signs.iter().all(|&s| s == signs[0]),
                "negative-eigenvalue sign varies with k at (eta={eta}, r={r}, l={l}, g={g})"
            );
            assert_eq!(signs[0], ppt_violated(eta, &p, g).unwrap());
        }
    }

    #[test]
    fn blocks_are_orthogonal_and_recompose_the_partial_transpose() {
        let ch = channel(1.0, 0.2, 0.9);
        let cutoff = 12;
        let eta = 0.8;
        let pt = swapped_state(eta, &ch, cutoff).unwrap().partial_transpose_x();
        // Materialize each block as a full matrix.
        let blocks = ppt_blocks(eta, &ch, cutoff - 1).unwrap();
        let mut mats = Vec::new();
        for b in &blocks {
            let mut m = TwoModeOperator::zeros(1, cutoff);
            m.set(0, b.k, 0, b.k, Complex64::new(b.a, 0.0));
            m.set(0, b.k, 1, b.k + 1, Complex64::new(b.b, 0.0));
            m.set(1, b.k + 1, 0, b.k, Complex64::new(b.b, 0.0));
            m.set(1, b.k + 1, 1, b.k + 1, Complex64::new(b.c, 0.0));
            mats.push(m);
        }
        let mut corner = TwoModeOperator::zeros(1, cutoff);
        let corner_val = (1.0 - eta) * transition_coefficient(&ch, 0, 0, cutoff, cutoff).unwrap()
            + eta / 2.0 * transition_coefficient(&ch, 1, 1, cutoff, cutoff).unwrap();
        corner.set(0, cutoff, 0, cutoff, Complex64::new(corner_val, 0.0));
        let mut minus_one = TwoModeOperator::zeros(1, cutoff);
        minus_one.set(
            1,
            0,
            1,
            0,
            Complex64::new(eta / 2.0 * transition_coefficient(&ch, 0, 0, 0, 0).unwrap(), 0.0),
        );
        mats.push(corner);
        mats.push(minus_one);

        // Pairwise products vanish.
        for i in 0..mats.len() {
            for j in 0..mats.len() {
                if i == j {
                    continue;
                }
                let prod = mats[i].matmul(&mats[j]).unwrap();
                assert!(crate::fock::max_modulus(prod.matrix()) < 1e-12);
            }
        }
        // And they sum back to the partial transpose.
        let mut sum = TwoModeOperator::zeros(1, cutoff);
        for m in &mats {
            sum = sum.add(m).unwrap();
        }
        assert!(crate::fock::max_modulus(&(sum.matrix() - pt.matrix())) < 1e-12);
    }

    #[test]
    fn violation_condition_at_attenuation_gain() {
        // At g = tanh r the test reduces to eta/(2-eta) > l for every r.
        for r in [0.3, 0.8, 1.5, 2.5] {
            let p = ResourceParams::new(r, 0.2).unwrap();
            let g = r.tanh();
            for eta in [0.1, 0.2, 0.3, 1.0 / 3.0 + 1e-6, 0.4, 0.9] {
                let expect = eta / (2.0 - eta) > 0.2;
                assert_eq!(ppt_violated(eta, &p, g).unwrap(), expect, "at (r={r}, eta={eta})");
            }
        }
        // l = 0.2 needs eta > 1/3.
        let p = ResourceParams::new(1.0, 0.2).unwrap();
        assert!(!ppt_violated(1.0 / 3.0 - 1e-6, &p, 1.0f64.tanh()).unwrap());
        assert!(ppt_violated(1.0 / 3.0 + 1e-6, &p, 1.0f64.tanh()).unwrap());
    }

    #[test]
    fn violation_window_for_pure_qubit() {
        // eta = 1, r = 1: violated exactly inside ((cosh 1 - 1)/sinh 1,
        // (cosh 1 + 1)/sinh 1), independent of l.
        let lo = (1.0f64.cosh() - 1.0) / 1.0f64.sinh();
        let hi = (1.0f64.cosh() + 1.0) / 1.0f64.sinh();
        assert_abs_diff_eq!(lo, 0.462_117, epsilon = 1e-6);
        assert_abs_diff_eq!(hi, 2.163_953, epsilon = 1e-6);
        for l in [0.0, 0.2, 0.7] {
            let p = ResourceParams::new(1.0, l).unwrap();
            assert!(!ppt_violated(1.0, &p, lo - 1e-9).unwrap());
            assert!(ppt_violated(1.0, &p, lo + 1e-9).unwrap());
            assert!(ppt_violated(1.0, &p, hi - 1e-9).unwrap());
            assert!(!ppt_violated(1.0, &p, hi + 1e-9).unwrap());
        }
    }

    #[test]
    fn violation_flag_matches_block_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..1000 {
            let eta = rng.random_range(0.0..=1.0);
            let p = ResourceParams::new(rng.random_range(0.05..2.5), rng.random_range(0.0..0.9))
                .unwrap();
            let g = rng.random_range(0.2..2.2);
            let ch = GaussianChannel::teleport(&p, g).unwrap();
            let min_lambda = ppt_blocks(eta, &ch, 24)
                .unwrap()
                .iter()
                .map(|b| b.lambda_minus)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(
                ppt_violated(eta, &p, g).unwrap(),
                min_lambda < -1e-12,
                "mismatch at (eta={eta}, r={}, l={}, g={g}): min lambda {min_lambda:e}",
                p.r(),
                p.l()
            );
        }
    }

    #[test]
    fn initial_state_negativity() {
        assert_abs_diff_eq!(initial_log_negativity(1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(initial_log_negativity(0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            initial_log_negativity(0.7).unwrap(),
            0.547_526_142_965_168,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(initial_log_negativity(0.8).unwrap(), 0.70, epsilon = 2e-3);
    }

    #[test]
    fn headline_gain_optimization() {
        let p = ResourceParams::new(1.0, 0.2).unwrap();
        let best = optimize_gain_ln(0.8, &p, (0.05, 2.0)).unwrap();
        assert_abs_diff_eq!(best.x, 0.90, epsilon = 0.01);
        assert_abs_diff_eq!(best.value, 0.30, epsilon = 0.01);
    }

    #[test]
    fn optimal_gain_exceeds_attenuation_gain() {
        for (eta, l, r) in [(0.8, 0.2, 1.0), (0.6, 0.1, 0.7), (1.0, 0.3, 1.3), (0.9, 0.0, 0.4)] {
            let p = ResourceParams::new(r, l).unwrap();
            let best = optimize_gain_ln(eta, &p, (0.05, 2.0)).unwrap();
            assert!(
                best.x > r.tanh(),
                "g_ln_opt = {} not above tanh r = {} at (eta={eta}, l={l}, r={r})",
                best.x,
                r.tanh()
            );
        }
    }

    #[test]
    fn negativity_grows_with_squeezing_and_never_beats_the_input() {
        let mut prev = 0.0;
        for r in [0.25, 0.5, 1.0, 2.0] {
            let p = ResourceParams::new(r, 0.2).unwrap();
            let best = optimize_gain_ln(0.8, &p, (0.05, 2.0)).unwrap();
            assert!(best.value > prev, "E_LN not increasing at r = {r}");
            prev = best.value;
        }
        let initial = initial_log_negativity(0.8).unwrap();
        assert!(prev <= initial + 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..50 {
            let eta = rng.random_range(0.0..=1.0);
            let p = ResourceParams::new(rng.random_range(0.1..2.0), rng.random_range(0.0..0.8))
                .unwrap();
            let ch = GaussianChannel::teleport(&p, rng.random_range(0.2..2.0)).unwrap();
            let after = log_negativity(eta, &ch, DEFAULT_K_MAX).unwrap();
            assert!(after <= initial_log_negativity(eta).unwrap() + 1e-12);
        }
    }

    #[test]
    fn no_violation_makes_gain_optimization_fail() {
        // eta below the 1/3 threshold at l = 0.2: negativity is identically
        // zero over the bracket.
        let p = ResourceParams::new(1.0, 0.2).unwrap();
        assert!(optimize_gain_ln(0.2, &p, (0.05, 2.0)).is_err());
    }

    #[test]
    fn truncation_bound_is_enforced() {
        // lambda = 6 decays with ratio 5/7; 16 blocks are far too few.
        let ch = GaussianChannel::new(2.5, 1.0).unwrap();
        assert!(matches!(
            log_negativity(0.8, &ch, 16),
            Err(Error::Truncation(_))
        ));
        // The default block count handles lambda <= 4.
        let ch = GaussianChannel::new(1.5, 1.0).unwrap();
        assert!(log_negativity(0.8, &ch, DEFAULT_K_MAX).is_ok());
    }

    #[test]
    fn domain_errors() {
        let p = ResourceParams::new(1.0, 0.2).unwrap();
        assert!(ppt_violated(1.2, &p, 0.9).is_err());
        assert!(initial_log_negativity(-0.1).is_err());
        let ch = channel(1.0, 0.2, 0.9);
        assert!(swapped_state(1.5, &ch, 10).is_err());
    }
}
