//! Dual-rail-qubit teleportation figures of merit and their optimization
//! over feedforward gain and squeezing.
//!
//! The experimental input is a qubit `alpha |0>_X |1>_Y + beta |1>_X |0>_Y`
//! mixed with vacuum (fraction `1 - eta1 - eta2`) and a two-photon
//! contribution (`eta2`). A beam-splitter rotation `U` built from `(alpha,
//! beta)` maps it onto a photon-number-diagonal state in the X rail times
//! vacuum in the Y rail, which is what makes closed-form fidelities possible:
//! both figures of merit depend only on the transition coefficients and are
//! independent of the qubit amplitudes.

use num_complex::Complex64;

use crate::channel::{GaussianChannel, ResourceParams};
use crate::error::{Error, Result};
use crate::fock::{beam_splitter, tensor, FockOperator, TwoModeOperator};
use crate::optimize::{maximize, Maximum};
use crate::transition::{resolve_cutoff, TransitionTable};
use crate::{swap, transition};

/// Default gain bracket for the optimizers; matches the plotted gain range.
pub const DEFAULT_GAIN_BRACKET: (f64, f64) = (0.05, 2.0);

/// Experimental dual-rail qubit model: amplitudes `(alpha, beta)` with
/// `|alpha|^2 + |beta|^2 = 1`, single-photon fraction `eta1`, and two-photon
/// fraction `eta2` (zero in the plain single-photon model).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualRailInput {
    alpha: Complex64,
    beta: Complex64,
    eta1: f64,
    eta2: f64,
}

impl DualRailInput {
    pub fn new(alpha: Complex64, beta: Complex64, eta1: f64, eta2: f64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!(
                "qubit amplitudes not normalized: |alpha|^2 + |beta|^2 = {norm:.12}"
            )));
        }
        if !eta1.is_finite() || !eta2.is_finite() || eta1 < 0.0 || eta2 < 0.0 || eta1 + eta2 > 1.0 {
            return Err(Error::domain(format!(
                "photon fractions (eta1, eta2) = ({eta1}, {eta2}) must be >= 0 with sum <= 1"
            )));
        }
        Ok(Self { alpha, beta, eta1, eta2 })
    }

    /// Single-photon model at efficiency `eta` with the default qubit
    /// `(alpha, beta) = (1, 0)`; both fidelities are amplitude-independent.
    pub fn with_efficiency(eta: f64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), eta, 0.0)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    fn vacuum_fraction(&self) -> f64 {
        (1.0 - self.eta1 - self.eta2).max(0.0)
    }

    fn rotation(&self, cutoff: usize) -> Result<TwoModeOperator> {
        beam_splitter(self.alpha, self.beta, cutoff)
    }
}

/// Which computation produced a state fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityPath {
    /// Printed closed form in the transition coefficients (eta2 = 0).
    ClosedForm,
    /// Uhlmann fidelity between the constructed input and output matrices.
    UhlmannOracle,
}

/// A state fidelity together with the path that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FStateValue {
    pub value: f64,
    pub path: FidelityPath,
}

/// Teleportation figures of merit for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMetrics {
    pub f_state: f64,
    pub f_qubit: f64,
    pub p_trans: f64,
    pub p_flip: f64,
    pub p_qubit: f64,
    pub f_state_path: FidelityPath,
}

/// The two-mode input density matrix
/// `U^dag [(1-eta1-eta2)|0><0| + eta1|1><1| + eta2|2><2|]_X (x) |0><0|_Y U`.
pub fn build_input(spec: &DualRailInput, cutoff: usize) -> Result<TwoModeOperator> {
    if cutoff < 2 {
        return Err(Error::domain(format!("dual-rail input needs cutoff >= 2, got {cutoff}")));
    }
    let mut mix = vec![0.0; cutoff + 1];
    mix[0] = spec.vacuum_fraction();
    mix[1] = spec.eta1;
    mix[2] = spec.eta2;
    let rho_x = FockOperator::from_diagonal(cutoff, &mix)?;
    let vac = FockOperator::basis_op(0, 0, cutoff)?;
    let rotated = tensor(&rho_x, &vac);
    let u = spec.rotation(cutoff)?;
    rotated.conjugated_by(&u.adjoint())
}

/// Sends the dual-rail input through one shared channel per rail by the
/// decomposed route `U^dag {[sum_i eta_i T^{ii}] (x) T^{00}} U`; for
/// `eta2 = 0` this agrees elementwise with the generic two-mode transition
/// map applied to [`build_input`].
pub fn teleport_dual_rail(
    spec: &DualRailInput,
    ch: &GaussianChannel,
    cutoff: usize,
) -> Result<TwoModeOperator> {
    if cutoff < 2 {
        return Err(Error::domain(format!("dual-rail output needs cutoff >= 2, got {cutoff}")));
    }
    let table = TransitionTable::new(ch, cutoff)?;
    let t00 = table.operator(0, 0)?;
    let mut mix = t00.scaled(Complex64::new(spec.vacuum_fraction(), 0.0));
    if spec.eta1 > 0.0 {
        mix = mix.add(&table.operator(1, 1)?.scaled(Complex64::new(spec.eta1, 0.0)))?;
    }
    if spec.eta2 > 0.0 {
        mix = mix.add(&table.operator(2, 2)?.scaled(Complex64::new(spec.eta2, 0.0)))?;
    }
    let rotated = tensor(&mix, &t00);
    let u = spec.rotation(cutoff)?;
    rotated.conjugated_by(&u.adjoint())
}

/// Closed-form transfer fidelity for the single-photon model (`eta2 = 0`):
///
/// ```text
/// F_state = T_{00->00} [ sqrt(eta (eta T_{11->11} + (1-eta) T_{00->11}))
///                      + sqrt((1-eta)(eta T_{11->00} + (1-eta) T_{00->00})) ]^2
/// ```
fn f_state_closed(eta: f64, ch: &GaussianChannel) -> Result<f64> {
    let t0000 = transition::transition_coefficient(ch, 0, 0, 0, 0)?;
    let t0011 = transition::transition_coefficient(ch, 0, 0, 1, 1)?;
    let t1100 = transition::transition_coefficient(ch, 1, 1, 0, 0)?;
    let t1111 = transition::transition_coefficient(ch, 1, 1, 1, 1)?;
    let qubit_part = (eta * (eta * t1111 + (1.0 - eta) * t0011)).max(0.0).sqrt();
    let vac_part = ((1.0 - eta) * (eta * t1100 + (1.0 - eta) * t0000)).max(0.0).sqrt();
    Ok(t0000 * (qubit_part + vac_part).powi(2))
}

/// Transfer fidelity between input and teleported output over the full
/// two-mode space. `eta2 = 0` evaluates the closed form; `eta2 > 0` has no
/// printed formula and routes to the Uhlmann oracle at `cutoff` (resolved
/// from the channel when `None`).
pub fn f_state(
    spec: &DualRailInput,
    ch: &GaussianChannel,
    cutoff: Option<usize>,
) -> Result<FStateValue> {
    if spec.eta2 == 0.0 {
        return Ok(FStateValue { value: f_state_closed(spec.eta1, ch)?, path: FidelityPath::ClosedForm });
    }
    let n = resolve_cutoff(cutoff, ch.lambda())?;
    let rho_in = build_input(spec, n)?;
    let rho_out = teleport_dual_rail(spec, ch, n)?;
    Ok(FStateValue { value: rho_in.fidelity(&rho_out)?, path: FidelityPath::UhlmannOracle })
}

/// All figures of merit at one parameter point. The qubit-subspace numbers
/// project the output onto span{|0,1>, |1,0>} and renormalize, which in the
/// rotated frame reads
///
/// ```text
/// P_trans = T_{00->00} sum_i eta_i T_{ii->11},
/// P_flip  = T_{00->11} sum_i eta_i T_{ii->00},
/// F_qubit = P_trans / (P_trans + P_flip).
/// ```
pub fn qubit_metrics(
    spec: &DualRailInput,
    ch: &GaussianChannel,
    cutoff: Option<usize>,
) -> Result<QubitMetrics> {
    let t0000 = transition::transition_coefficient(ch, 0, 0, 0, 0)?;
    let t0011 = transition::transition_coefficient(ch, 0, 0, 1, 1)?;
    let eta0 = spec.vacuum_fraction();
    let mut to_one = eta0 * t0011 + spec.eta1 * transition::transition_coefficient(ch, 1, 1, 1, 1)?;
    let mut to_zero = eta0 * t0000 + spec.eta1 * transition::transition_coefficient(ch, 1, 1, 0, 0)?;
    if spec.eta2 > 0.0 {
        to_one += spec.eta2 * transition::transition_coefficient(ch, 2, 2, 1, 1)?;
        to_zero += spec.eta2 * transition::transition_coefficient(ch, 2, 2, 0, 0)?;
    }
    let p_trans = t0000 * to_one;
    let p_flip = t0011 * to_zero;
    let p_qubit = p_trans + p_flip;
    if p_qubit < 1e-15 {
        return Err(Error::domain(format!(
            "qubit subspace is empty (P_qubit = {p_qubit:.3e}); F_qubit is undefined"
        )));
    }
    let fs = f_state(spec, ch, cutoff)?;
    Ok(QubitMetrics {
        f_state: fs.value,
        f_qubit: p_trans / p_qubit,
        p_trans,
        p_flip,
        p_qubit,
        f_state_path: fs.path,
    })
}

/// Metric selector for the gain/squeezing optimizers (all three are
/// amplitude-independent, so the single-photon efficiency is enough).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainMetric {
    FState,
    FQubit,
    LogNegativity,
}

impl GainMetric {
    pub(crate) fn evaluate(&self, eta: f64, p: &ResourceParams, g: f64) -> Result<f64> {
        let ch = GaussianChannel::teleport(p, g)?;
        match self {
            GainMetric::FState => f_state_closed(eta, &ch),
            GainMetric::FQubit => {
                let spec = DualRailInput::with_efficiency(eta)?;
                Ok(qubit_metrics(&spec, &ch, None)?.f_qubit)
            }
            GainMetric::LogNegativity => swap::log_negativity(eta, &ch, swap::DEFAULT_K_MAX),
        }
    }
}

/// Maximizes a metric over the feedforward gain at fixed `(eta, r, l)`.
pub fn optimize_gain(
    metric: GainMetric,
    eta: f64,
    p: &ResourceParams,
    bracket: (f64, f64),
) -> Result<Maximum> {
    maximize(|g| metric.evaluate(eta, p, g), bracket)
}

/// Result of the nested squeezing optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingOptimum {
    pub r_opt: f64,
    pub g_opt: f64,
    pub value: f64,
    /// Set when the metric kept growing to the edge of the squeezing
    /// bracket (no interior optimum).
    pub at_bracket_end: bool,
}

/// Maximizes `max_g metric` over the squeezing parameter, with the gain
/// optimization nested inside. A metric that is monotone in `r` (such as
/// the lossless state fidelity) reports the bracket end with a flag instead
/// of failing.
pub fn optimize_squeezing(
    metric: GainMetric,
    eta: f64,
    l: f64,
    r_bracket: (f64, f64),
    g_bracket: (f64, f64),
) -> Result<SqueezingOptimum> {
    let inner = |r: f64| -> Result<Maximum> {
        let p = ResourceParams::new(r, l)?;
        optimize_gain(metric, eta, &p, g_bracket)
    };
    match maximize(|r| inner(r).map(|m| m.value), r_bracket) {
        Ok(best) => {
            let gain = inner(best.x)?;
            Ok(SqueezingOptimum {
                r_opt: best.x,
                g_opt: gain.x,
                value: best.value,
                at_bracket_end: false,
            })
        }
        Err(Error::Bracket(_)) => {
            // Monotone in r: report the better bracket end.
            let (lo, hi) = r_bracket;
            let (vlo, vhi) = (inner(lo)?, inner(hi)?);
            let (r_opt, m) = if vlo.value >= vhi.value { (lo, vlo) } else { (hi, vhi) };
            Ok(SqueezingOptimum { r_opt, g_opt: m.x, value: m.value, at_bracket_end: true })
        }
        Err(e) => Err(e),
    }
}
