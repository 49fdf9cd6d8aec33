//! Gaussian channel algebra for continuous-variable teleportation.
//!
//! A one-mode Gaussian channel is described by two numbers: the variance `tau`
//! of the Gaussian noise convolved onto the input Wigner function and the
//! phase-space rescaling gain `g`,
//!
//! ```text
//! W_out(xi) = (1/g^2) [W_in ∘ G_tau](xi / g).
//! ```
//!
//! Teleportation with resource squeezing `r`, resource loss `l`, and
//! feedforward gain `g` is exactly such a channel, and so are pure attenuation
//! and pure amplification. Channels compose, which is what makes the whole
//! class closed under sequencing.

use crate::error::{Error, Result};

/// Smallest gain accepted by public constructors. `tau` carries a `1/g^2`
/// term, so letting `g -> 0` overflows long before anything physical happens.
pub const GAIN_MIN: f64 = 1e-3;
/// Largest gain accepted by public constructors.
pub const GAIN_MAX: f64 = 10.0;

/// Squeezed resource parameters: squeezing `r >= 0` and loss fraction
/// `l` in `[0, 1]` applied symmetrically to both resource modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceParams {
    r: f64,
    l: f64,
}

impl ResourceParams {
    pub fn new(r: f64, l: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain(format!("squeezing parameter r = {r} must be >= 0")));
        }
        if !l.is_finite() || !(0.0..=1.0).contains(&l) {
            return Err(Error::domain(format!("loss fraction l = {l} must lie in [0, 1]")));
        }
        Ok(Self { r, l })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// `(V_sq, V_an)`: squeezed and anti-squeezed quadrature variances,
    /// `V_sq = [(1-l) e^{-2r} + l]/2` and `V_an = [(1-l) e^{2r} + l]/2`
    /// (`hbar = 1`; the vacuum has variance `1/2`).
    pub fn variances(&self) -> (f64, f64) {
        let v_sq = ((1.0 - self.l) * (-2.0 * self.r).exp() + self.l) / 2.0;
        let v_an = ((1.0 - self.l) * (2.0 * self.r).exp() + self.l) / 2.0;
        (v_sq, v_an)
    }

    /// `V = V_an + V_sq`, the diagonal entry of the resource covariance.
    pub fn v_total(&self) -> f64 {
        let (v_sq, v_an) = self.variances();
        v_an + v_sq
    }

    /// `C = V_an - V_sq`, the cross-correlation entry of the resource covariance.
    pub fn c_total(&self) -> f64 {
        let (v_sq, v_an) = self.variances();
        v_an - v_sq
    }
}

/// Squeezed and anti-squeezed variances of a resource; see
/// [`ResourceParams::variances`].
pub fn squeezed_variances(p: &ResourceParams) -> (f64, f64) {
    p.variances()
}

/// One-mode Gaussian channel `(tau, g)`: convolution by a normalized Gaussian
/// of variance `tau`, then phase-space rescaling `xi -> xi / g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianChannel {
    tau: f64,
    g: f64,
}

impl GaussianChannel {
    /// Builds a channel from raw parameters. `tau >= 0` and
    /// `g` in `[GAIN_MIN, GAIN_MAX]`.
    pub fn new(tau: f64, g: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::domain(format!("channel variance tau = {tau} must be >= 0")));
        }
        if !g.is_finite() || !(GAIN_MIN..=GAIN_MAX).contains(&g) {
            return Err(Error::domain(format!(
                "gain g = {g} must lie in [{GAIN_MIN}, {GAIN_MAX}]"
            )));
        }
        Ok(Self { tau, g })
    }

    /// The identity channel `(0, 1)`.
    pub fn identity() -> Self {
        Self { tau: 0.0, g: 1.0 }
    }

    /// The teleportation channel for resource `p` and feedforward gain `g`:
    ///
    /// ```text
    /// tau = (V_an/2)(1 - 1/g)^2 + (V_sq/2)(1 + 1/g)^2.
    /// ```
    pub fn teleport(p: &ResourceParams, g: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::domain(format!("feedforward gain g = {g} must be > 0")));
        }
        let (v_sq, v_an) = p.variances();
        let down = 1.0 - 1.0 / g;
        let up = 1.0 + 1.0 / g;
        let tau = v_an / 2.0 * down * down + v_sq / 2.0 * up * up;
        Self::new(tau, g)
    }

    /// Pure attenuation with transmittance `epsilon` in `(0, 1)`:
    /// `tau = (1 - epsilon)/(2 epsilon)`, `g = sqrt(epsilon)`.
    pub fn attenuation(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
            return Err(Error::domain(format!(
                "attenuation transmittance epsilon = {epsilon} must lie in (0, 1)"
            )));
        }
        Self::new((1.0 - epsilon) / (2.0 * epsilon), epsilon.sqrt())
    }

    /// Pure amplification with power gain `gamma > 1`:
    /// `tau = (gamma - 1)/(2 gamma)`, `g = sqrt(gamma)`.
    pub fn amplification(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::domain(format!(
                "amplification power gain gamma = {gamma} must be > 1"
            )));
        }
        Self::new((gamma - 1.0) / (2.0 * gamma), gamma.sqrt())
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `lambda = g^2 (2 tau + 1)`. For any teleportation channel built from
    /// physical resource parameters, `lambda >= 1`, with equality exactly at
    /// `l = 0`, `g = tanh r`.
    pub fn lambda(&self) -> f64 {
        self.g * self.g * (2.0 * self.tau + 1.0)
    }

    /// Sequences `self` (applied first) with `next`:
    /// `tau' = tau_1 + tau_2 / g_1^2`, `g' = g_1 g_2`.
    ///
    /// Composition is closed over arbitrary valid channels, so the result is
    /// exempt from the `[GAIN_MIN, GAIN_MAX]` constructor bound.
    pub fn compose(&self, next: &GaussianChannel) -> GaussianChannel {
        GaussianChannel {
            tau: self.tau + next.tau / (self.g * self.g),
            g: self.g * next.g,
        }
    }

    /// Fieldwise relative comparison; closed forms are exact, so `1e-12` is
    /// the natural "equal" threshold.
    pub fn approx_eq(&self, other: &GaussianChannel, rel_tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rel_tol * f64::max(1.0, a.abs().max(b.abs()));
        close(self.tau, other.tau) && close(self.g, other.g)
    }
}

/// Composes two channels in pipeline order (`first` applied first).
pub fn compose(first: &GaussianChannel, second: &GaussianChannel) -> GaussianChannel {
    first.compose(second)
}

/// `(g_att, g_amp) = (tanh r, 1/tanh r)`: the gains at which the channel with
/// a lossless resource degenerates to pure attenuation / pure amplification.
pub fn canonical_gains(r: f64) -> Result<(f64, f64)> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::domain(format!(
            "canonical gains need r = {r} > 0 (they degenerate at r = 0)"
        )));
    }
    let t = r.tanh();
    Ok((t, 1.0 / t))
}

/// Effective parameters after folding a uniform detector efficiency `eta_d`
/// into the input efficiency, the resource loss, and the feedforward gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldedParams {
    pub eta_eff: f64,
    pub l_eff: f64,
    pub g_eff: f64,
}

/// Folds detector inefficiency into effective experiment parameters:
/// `eta_eff = eta_in * eta_d`, `l_eff = 1 - (1 - l) eta_d`,
/// `g_eff = sqrt(eta_d) * g`.
pub fn fold_detector_efficiency(
    eta_in: f64,
    p: &ResourceParams,
    g: f64,
    eta_d: f64,
) -> Result<FoldedParams> {
    for (name, v) in [("eta_in", eta_in), ("eta_d", eta_d)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("efficiency {name} = {v} must lie in [0, 1]")));
        }
    }
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::domain(format!("gain g = {g} must be > 0")));
    }
    Ok(FoldedParams {
        eta_eff: eta_in * eta_d,
        l_eff: 1.0 - (1.0 - p.l()) * eta_d,
        g_eff: eta_d.sqrt() * g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn variances_vacuum_and_full_loss() {
        let vac = ResourceParams::new(0.0, 0.0).unwrap();
        assert_eq!(vac.variances(), (0.5, 0.5));
        let lost = ResourceParams::new(5.0, 1.0).unwrap();
        let (vs, va) = lost.variances();
        assert_abs_diff_eq!(vs, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(va, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn variances_pure_squeezing() {
        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let (vs, va) = p.variances();
        assert_abs_diff_eq!(vs, 0.067_676_641_618_306_35, epsilon = 1e-15);
        assert_abs_diff_eq!(va, 3.694_528_049_465_325, epsilon = 1e-13);
    }

    #[test]
    fn variance_ordering_and_uncertainty_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let p =
                ResourceParams::new(rng.random_range(0.0..5.0), rng.random_range(0.0..=1.0)).unwrap();
            let (vs, va) = p.variances();
            assert!(vs <= 0.5 + 1e-12 && va >= 0.5 - 1e-12);
            let (r, l) = (p.r(), p.l());
            let bound = (1.0 - l).powi(2) + l * l + 2.0 * l * (1.0 - l) * (2.0 * r).cosh();
            assert_abs_diff_eq!(4.0 * va * vs, bound, epsilon = 1e-9 * bound.abs());
            assert!(bound >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(ResourceParams::new(-0.1, 0.0).is_err());
        assert!(ResourceParams::new(1.0, 1.5).is_err());
        assert!(ResourceParams::new(f64::NAN, 0.0).is_err());
        let p = ResourceParams::new(1.0, 0.0).unwrap();
        assert!(GaussianChannel::teleport(&p, 0.0).is_err());
        assert!(GaussianChannel::teleport(&p, -1.0).is_err());
        assert!(GaussianChannel::attenuation(0.0).is_err());
        assert!(GaussianChannel::attenuation(1.0).is_err());
        assert!(GaussianChannel::amplification(1.0).is_err());
        assert!(GaussianChannel::new(-0.1, 1.0).is_err());
        assert!(GaussianChannel::new(0.1, 2e-4).is_err());
        assert!(GaussianChannel::new(0.1, 11.0).is_err());
        assert!(canonical_gains(0.0).is_err());
    }

    #[test]
    fn teleport_unit_gain_lossless() {
        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let ch = GaussianChannel::teleport(&p, 1.0).unwrap();
        assert_abs_diff_eq!(ch.tau(), (-2.0f64).exp(), epsilon = 1e-15);
        assert_eq!(ch.g(), 1.0);
    }

    #[test]
    fn teleport_tau_saturates_at_loss() {
        let p = ResourceParams::new(20.0, 0.2).unwrap();
        let ch = GaussianChannel::teleport(&p, 1.0).unwrap();
        assert_abs_diff_eq!(ch.tau(), 0.2, epsilon = 1e-6);
    }

    #[test]
    fn teleport_at_attenuation_gain() {
        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let g = 1.0f64.tanh();
        let ch = GaussianChannel::teleport(&p, g).unwrap();
        // tau = 2 e^2 / (e^2 - 1)^2, which also equals (1 - g^2) / (2 g^2).
        let e2 = 2.0f64.exp();
        assert_abs_diff_eq!(ch.tau(), 2.0 * e2 / (e2 - 1.0).powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(ch.tau(), (1.0 - g * g) / (2.0 * g * g), epsilon = 1e-14);
        assert_abs_diff_eq!(ch.tau(), 0.362_030_830_483_155_2, epsilon = 1e-14);
        assert_abs_diff_eq!(ch.lambda(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn attenuation_examples() {
        let near_id = GaussianChannel::attenuation(1.0 - 1e-12).unwrap();
        assert!(near_id.tau() < 1e-11 && (near_id.g() - 1.0).abs() < 1e-12);

        let half = GaussianChannel::attenuation(0.5).unwrap();
        assert_abs_diff_eq!(half.tau(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(half.g(), 0.707_106_781_186_547_6, epsilon = 1e-15);

        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let tele = GaussianChannel::teleport(&p, 1.0f64.tanh()).unwrap();
        let att = GaussianChannel::attenuation(1.0f64.tanh().powi(2)).unwrap();
        assert!(tele.approx_eq(&att, 1e-12));
    }

    #[test]
    fn amplification_examples() {
        let near_id = GaussianChannel::amplification(1.0 + 1e-12).unwrap();
        assert!(near_id.tau() < 1e-11 && (near_id.g() - 1.0).abs() < 1e-12);

        let two = GaussianChannel::amplification(2.0).unwrap();
        assert_abs_diff_eq!(two.tau(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(two.g(), 1.414_213_562_373_095_1, epsilon = 1e-15);

        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let tele = GaussianChannel::teleport(&p, 1.0 / 1.0f64.tanh()).unwrap();
        let amp = GaussianChannel::amplification(1.0f64.tanh().powi(-2)).unwrap();
        assert!(tele.approx_eq(&amp, 1e-12));
    }

    #[test]
    fn compose_identity_and_example() {
        let c = GaussianChannel::new(0.3, 0.8).unwrap();
        assert!(GaussianChannel::identity().compose(&c).approx_eq(&c, 1e-15));
        assert!(c.compose(&GaussianChannel::identity()).approx_eq(&c, 1e-15));

        let att = GaussianChannel::attenuation(0.5).unwrap();
        let amp = GaussianChannel::amplification(2.0).unwrap();
        let seq = att.compose(&amp);
        assert_abs_diff_eq!(seq.tau(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(seq.g(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn below_unit_gain_decomposition() {
        // Teleportation at g < 1 is unit-gain teleportation followed by pure
        // attenuation at epsilon = g^2.
        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let g = 0.5;
        let tele = GaussianChannel::teleport(&p, g).unwrap();
        let tau2 = (1.0 - g * g) / (2.0 * g * g);
        let unit = GaussianChannel::new(tele.tau() - tau2, 1.0).unwrap();
        let att = GaussianChannel::attenuation(g * g).unwrap();
        assert!(unit.compose(&att).approx_eq(&tele, 1e-12));
    }

    #[test]
    fn canonical_gain_values() {
        let (g_att, g_amp) = canonical_gains(1.0).unwrap();
        assert_abs_diff_eq!(g_att, 0.76, epsilon = 5e-3);
        assert_abs_diff_eq!(g_amp, 1.31, epsilon = 5e-3);
        assert_abs_diff_eq!(g_att, 0.761_594_155_955_764_9, epsilon = 1e-15);
        assert_abs_diff_eq!(g_amp, 1.313_035_285_499_331_3, epsilon = 1e-15);

        let (g_att, g_amp) = canonical_gains(30.0).unwrap();
        assert_abs_diff_eq!(g_att, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g_amp, 1.0, epsilon = 1e-12);

        let (g_att, g_amp) = canonical_gains(0.5).unwrap();
        assert_abs_diff_eq!(g_att, 0.462_117_157_260_009_74, epsilon = 1e-15);
        assert_abs_diff_eq!(g_amp, 2.163_953_413_738_653, epsilon = 1e-14);
    }

    #[test]
    fn detector_folding() {
        let p = ResourceParams::new(1.0, 0.0).unwrap();
        let f = fold_detector_efficiency(0.8, &p, 1.0, 1.0).unwrap();
        assert_eq!((f.eta_eff, f.l_eff, f.g_eff), (0.8, 0.0, 1.0));

        let f = fold_detector_efficiency(0.8, &p, 1.0, 0.9).unwrap();
        assert_abs_diff_eq!(f.eta_eff, 0.72, epsilon = 1e-15);
        assert_abs_diff_eq!(f.l_eff, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(f.g_eff, 0.948_683_298_050_513_8, epsilon = 1e-15);

        let full_loss = ResourceParams::new(1.0, 1.0).unwrap();
        let f = fold_detector_efficiency(1.0, &full_loss, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(f.l_eff, 1.0, epsilon = 1e-15);

        assert!(fold_detector_efficiency(1.2, &p, 1.0, 0.5).is_err());
        assert!(fold_detector_efficiency(0.5, &p, 1.0, -0.1).is_err());
    }

    #[test]
    fn composition_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rel = |a: f64, b: f64| (a - b).abs() / f64::max(1.0, a.abs().max(b.abs()));
        for _ in 0..2000 {
            let mk = |rng: &mut ChaCha8Rng| {
                GaussianChannel::new(rng.random_range(0.0..4.0), rng.random_range(0.05..3.0))
                    .unwrap()
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let left = a.compose(&b.compose(&c));
            let right = a.compose(&b).compose(&c);
            assert!(rel(left.tau(), right.tau()) < 1e-12);
            assert!(rel(left.g(), right.g()) < 1e-12);
        }
    }

    #[test]
    fn lambda_lower_bound_with_equality_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10_000 {
            let r = rng.random_range(0.0..5.0);
            let l = rng.random_range(0.0..=1.0);
            let g = rng.random_range(0.05..3.0);
            let p = ResourceParams::new(r, l).unwrap();
            let lambda = GaussianChannel::teleport(&p, g).unwrap().lambda();
            assert!(lambda >= 1.0 - 1e-12, "lambda = {lambda} at (r={r}, l={l}, g={g})");
            if (lambda - 1.0).abs() < 1e-9 {
                assert!(l <= 1e-9 && (g - r.tanh()).abs() <= 1e-9);
            }
        }
        // And the equality point itself.
        let p = ResourceParams::new(1.3, 0.0).unwrap();
        let ch = GaussianChannel::teleport(&p, 1.3f64.tanh()).unwrap();
        assert_abs_diff_eq!(ch.lambda(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_gain_residual_minimized_at_attenuation_gain() {
        // tau_1(g) = tau(g) - (1 - g^2)/(2 g^2) has minimum value l at g = tanh r.
        for &(r, l) in &[(0.7, 0.0), (1.0, 0.2), (1.5, 0.4)] {
            let p = ResourceParams::new(r, l).unwrap();
            let tau1 = |g: f64| {
                GaussianChannel::teleport(&p, g).unwrap().tau() - (1.0 - g * g) / (2.0 * g * g)
            };
            let mut best = (f64::INFINITY, 0.0);
            let mut g = 0.05;
            while g < 1.0 {
                let v = tau1(g);
                if v < best.0 {
                    best = (v, g);
                }
                g += 1e-4;
            }
            assert_abs_diff_eq!(best.1, r.tanh(), epsilon = 2e-4);
            assert_abs_diff_eq!(best.0, l, epsilon = 1e-7);
        }
    }
}
