//! Relaxation dynamics of the collective dressed-state variables of an
//! atom pair inside the band-split fluorescence regime.
//!
//! State vector: x = Σ⟨R_z⟩ (total dressed inversion), y (exchange
//! coherence between the symmetric/antisymmetric pair states) and
//! z = ⟨R_z ⊗ R_z⟩ (inversion correlation). The equations of motion are
//! linear with constant coefficients once the drive and bath are fixed:
//!
//!   ẋ = −2ξ₊ x + 4ζ₋ y + 4ξ₋
//!   ẏ = −ζ₋ x − 2(c₀ + ξ₊) y + 2ζ₊ z
//!   ż =  2ξ₋ x + 4ζ₊ y − 4ξ₊ z

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DressedParams, PerBand, SpectralBand};

/// Collective two-atom state (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TwoAtomState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        TwoAtomState { x, y, z }
    }

    /// Both atoms in the lower dressed level.
    pub const GROUND_DRESSED: TwoAtomState = TwoAtomState::new(-2.0, 0.0, 1.0);

    /// Populations of the collective dressed basis implied by (x, y, z):
    /// [upper-upper, symmetric, antisymmetric, lower-lower].
    pub fn populations(&self) -> [f64; 4] {
        let ee = 0.25 * (1.0 + self.z + self.x);
        let gg = 0.25 * (1.0 + self.z - self.x);
        let ss = 0.25 * (1.0 - self.z) + 0.5 * self.y;
        let aa = 0.25 * (1.0 - self.z) - 0.5 * self.y;
        [ee, ss, aa, gg]
    }

    /// True when the implied populations form a probability vector
    /// (up to `tol` below zero / above one).
    pub fn is_physical(&self, tol: f64) -> bool {
        self.populations()
            .iter()
            .all(|p| (-tol..=1.0 + tol).contains(p))
    }

    /// Inverse of [`TwoAtomState::populations`]; the four entries must be
    /// non-negative and sum to one within 1e-9.
    pub fn from_populations(p: [f64; 4]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if p.iter().any(|v| *v < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Normalization(format!(
                "populations must be non-negative and sum to 1, got {p:?}"
            )));
        }
        let [ee, ss, aa, gg] = p;
        Ok(TwoAtomState::new(
            2.0 * (ee - gg),
            ss - aa,
            ee + gg - ss - aa,
        ))
    }

    fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Constant coefficients of the (x, y, z) relaxation system.
///
/// With γ_∓ = γ(ω_∓), χ_∓ = χ(ω_∓), s = sin θ, c = cos θ:
///
///   ξ± = γ₋ s⁴ ± γ₊ c⁴
///   ζ± = γ₋ χ₋ s⁴ ± γ₊ χ₊ c⁴
///   c₀ = γ_L (1 − χ_L) sin² 2θ
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsCoefficients {
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
    pub c0: f64,
}

impl DynamicsCoefficients {
    /// Builds the coefficient set from drive parameters and the pairwise
    /// cross-damping fraction χ evaluated at each band centre (|χ| ≤ 1).
    pub fn from_params(params: &DressedParams, chi: &PerBand<f64>) -> Result<Self> {
        for (v, name) in chi.as_array().iter().zip(["left", "center", "right"]) {
            if !(v.is_finite() && v.abs() <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "chi.{name} must satisfy |chi| <= 1, got {v}"
                )));
            }
        }
        // Trig of the dressing angle taken algebraically from (Ω, Δ) rather
        // than through θ itself: cos 2θ = (Δ/2)/Ω̃ and sin 2θ = Ω/Ω̃, so
        // resonance gives sin²θ = cos²θ = 1/2 exactly and the fixed point
        // lands on the origin to the last bit.
        let cos_2theta = (params.detuning / 2.0) / params.gen_rabi;
        let s2 = 0.5 * (1.0 - cos_2theta);
        let c2 = 0.5 * (1.0 + cos_2theta);
        let (s4, c4) = (s2 * s2, c2 * c2);
        let gl = params.band_gammas.get(SpectralBand::Left);
        let gc = params.band_gammas.get(SpectralBand::Central);
        let gr = params.band_gammas.get(SpectralBand::Right);
        let sin_2theta_sq = (params.rabi / params.gen_rabi).powi(2);
        Ok(DynamicsCoefficients {
            xi_plus: gl * s4 + gr * c4,
            xi_minus: gl * s4 - gr * c4,
            zeta_plus: gl * chi.left * s4 + gr * chi.right * c4,
            zeta_minus: gl * chi.left * s4 - gr * chi.right * c4,
            c0: gc * (1.0 - chi.center) * sin_2theta_sq,
        })
    }

    /// Right-hand side of the equations of motion at state `s`.
    pub fn derivative(&self, s: TwoAtomState) -> TwoAtomState {
        TwoAtomState::new(
            -2.0 * self.xi_plus * s.x + 4.0 * self.zeta_minus * s.y + 4.0 * self.xi_minus,
            -self.zeta_minus * s.x - 2.0 * (self.c0 + self.xi_plus) * s.y
                + 2.0 * self.zeta_plus * s.z,
            2.0 * self.xi_minus * s.x + 4.0 * self.zeta_plus * s.y - 4.0 * self.xi_plus * s.z,
        )
    }

    /// Largest coefficient magnitude; sets the integrator stability bound.
    pub fn max_rate(&self) -> f64 {
        [
            self.xi_plus,
            self.xi_minus,
            self.zeta_plus,
            self.zeta_minus,
            self.c0,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }

    /// Closed-form fixed point for a flat bath (equal γ and equal χ across
    /// the sidebands): x = 2ξ₋/ξ₊, y = 0, z = (ξ₋/ξ₊)². With a
    /// frequency-dependent χ this is no longer exact — use [`steady_state`].
    pub fn flat_bath_steady_state(&self) -> TwoAtomState {
        let r = self.xi_minus / self.xi_plus;
        TwoAtomState::new(2.0 * r, 0.0, r * r)
    }
}

/// Steady state of the linear system, via a dense 3×3 solve with partial
/// pivoting. Fails with [`Error::SingularSystem`] when |det| < 1e-14·scale³.
pub fn steady_state(coeffs: &DynamicsCoefficients) -> Result<TwoAtomState> {
    let mut a = [
        [-2.0 * coeffs.xi_plus, 4.0 * coeffs.zeta_minus, 0.0],
        [
            -coeffs.zeta_minus,
            -2.0 * (coeffs.c0 + coeffs.xi_plus),
            2.0 * coeffs.zeta_plus,
        ],
        [
            2.0 * coeffs.xi_minus,
            4.0 * coeffs.zeta_plus,
            -4.0 * coeffs.xi_plus,
        ],
    ];
    let mut b = [-4.0 * coeffs.xi_minus, 0.0, 0.0];

    let scale = a
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut det = 1.0;
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
            det = -det;
        }
        det *= a[col][col];
        if a[col][col] == 0.0 {
            break;
        }
        let pivot = a[col];
        for row in col + 1..3 {
            let f = a[row][col] / pivot[col];
            for (entry, &p) in a[row].iter_mut().zip(&pivot).skip(col) {
                *entry -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    if det.abs() < 1e-14 * scale.powi(3) {
        return Err(Error::SingularSystem { det });
    }
    let mut s = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * s[k];
        }
        s[row] = acc / a[row][row];
    }
    Ok(TwoAtomState::new(s[0], s[1], s[2]))
}

/// Residual speed ‖(ẋ, ẏ, ż)‖₂ at a state; zero at a fixed point.
pub fn steady_state_residual(coeffs: &DynamicsCoefficients, state: TwoAtomState) -> f64 {
    coeffs.derivative(state).norm()
}

/// Integrates the equations of motion with classic fixed-step RK4 and
/// returns the sampled trajectory, (t₀ = 0, initial) included.
///
/// The step must respect dt ≤ 0.1 / max_rate; larger steps are rejected
/// rather than silently unstable. A zero-duration run echoes the initial
/// state.
pub fn evolve(
    coeffs: &DynamicsCoefficients,
    initial: TwoAtomState,
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, TwoAtomState)>> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be >= 0, got {t_end}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    let rate = coeffs.max_rate();
    if rate > 0.0 {
        let bound = 0.1 / rate;
        if dt > bound {
            return Err(Error::StepSize { dt, bound });
        }
    }

    let mut out = Vec::new();
    out.push((0.0, initial));
    if t_end == 0.0 {
        return Ok(out);
    }

    let n_steps = (t_end / dt).ceil().max(1.0) as usize;
    let mut state = initial;
    let mut t = 0.0;
    for step in 0..n_steps {
        // final step shrinks so the trajectory ends exactly at t_end
        let h = if step + 1 == n_steps { t_end - t } else { dt };
        state = rk4_step(coeffs, state, h);
        t = if step + 1 == n_steps { t_end } else { t + h };
        out.push((t, state));
    }
    Ok(out)
}

fn rk4_step(coeffs: &DynamicsCoefficients, s: TwoAtomState, h: f64) -> TwoAtomState {
    let add = |a: TwoAtomState, b: TwoAtomState, f: f64| {
        TwoAtomState::new(a.x + f * b.x, a.y + f * b.y, a.z + f * b.z)
    };
    let k1 = coeffs.derivative(s);
    let k2 = coeffs.derivative(add(s, k1, 0.5 * h));
    let k3 = coeffs.derivative(add(s, k2, 0.5 * h));
    let k4 = coeffs.derivative(add(s, k3, h));
    TwoAtomState::new(
        s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PerBand;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn coeffs(theta_params: (f64, f64), gammas: [f64; 3], chi: [f64; 3]) -> DynamicsCoefficients {
        let (rabi, detuning) = theta_params;
        let p = DressedParams::new(
            rabi,
            detuning,
            PerBand {
                left: gammas[0],
                center: gammas[1],
                right: gammas[2],
            },
        )
        .unwrap();
        DynamicsCoefficients::from_params(
            &p,
            &PerBand {
                left: chi[0],
                center: chi[1],
                right: chi[2],
            },
        )
        .unwrap()
    }

    fn coeffs_at_theta(theta: f64, gammas: [f64; 3], chi: [f64; 3]) -> DynamicsCoefficients {
        // choose (Ω, Δ) that reproduce the requested dressing angle
        let delta = 2.0 / (2.0 * theta).tan();
        coeffs((1.0, delta), gammas, chi)
    }

    #[test]
    fn coefficient_spot_values() {
        let c = coeffs_at_theta(PI / 4.0, [1.0; 3], [0.0; 3]);
        assert_relative_eq!(c.xi_plus, 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.xi_minus, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.zeta_plus, 0.0);
        assert_relative_eq!(c.c0, 1.0, epsilon = 1e-12);

        let c = coeffs_at_theta(PI / 4.0, [1.0; 3], [1.0; 3]);
        assert_relative_eq!(c.zeta_plus, 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.zeta_minus, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.c0, 0.0, epsilon = 1e-12);

        let c = coeffs_at_theta(PI / 3.0, [1.0; 3], [0.0; 3]);
        assert_relative_eq!(c.xi_plus, 10.0 / 16.0, epsilon = 1e-12);
        assert_relative_eq!(c.xi_minus, 8.0 / 16.0, epsilon = 1e-12);
        assert_relative_eq!(c.c0, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn chi_magnitude_validated() {
        let p = DressedParams::resonant(1.0).unwrap();
        assert!(DynamicsCoefficients::from_params(&p, &PerBand::uniform(1.5)).is_err());
        assert!(DynamicsCoefficients::from_params(&p, &PerBand::uniform(-1.0)).is_ok());
    }

    #[test]
    fn resonant_fixed_point_is_origin_exactly() {
        // exact resonance (Δ = 0), not a θ = π/4 reconstruction through tan
        let p = DressedParams::resonant(6.0).unwrap();
        let c = DynamicsCoefficients::from_params(&p, &PerBand::uniform(0.3)).unwrap();
        let s = steady_state(&c).unwrap();
        assert_eq!((s.x, s.y, s.z), (0.0, 0.0, 0.0));
        // and the origin does not move under evolution
        let traj = evolve(&c, s, 10.0, 0.01).unwrap();
        let (_, last) = traj[traj.len() - 1];
        assert_eq!((last.x, last.y, last.z), (0.0, 0.0, 0.0));
    }

    #[test]
    fn flat_bath_fixed_point_detuned() {
        let c = coeffs_at_theta(PI / 3.0, [1.0; 3], [0.0; 3]);
        let s = steady_state(&c).unwrap();
        assert_relative_eq!(s.x, 1.6, epsilon = 1e-12);
        assert_relative_eq!(s.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(s.z, 0.64, epsilon = 1e-12);
        let closed = c.flat_bath_steady_state();
        assert_relative_eq!(s.x, closed.x, epsilon = 1e-12);
        assert_relative_eq!(s.z, closed.z, epsilon = 1e-12);
    }

    #[test]
    fn frequency_dependent_chi_shifts_the_fixed_point() {
        // With χ differing between the sidebands the flat-bath closed form
        // stops being a fixed point: the numeric solve must disagree with it.
        let c = coeffs_at_theta(PI / 3.0, [1.0; 3], [0.6, 0.2, -0.4]);
        let numeric = steady_state(&c).unwrap();
        let closed = c.flat_bath_steady_state();
        let residual_closed = steady_state_residual(&c, closed);
        assert!(
            residual_closed > 1e-3,
            "closed form unexpectedly exact: {residual_closed}"
        );
        assert!(steady_state_residual(&c, numeric) < 1e-12);
        assert!(numeric.y.abs() > 1e-4);
    }

    #[test]
    fn decoupled_resonant_decay_matches_exponentials() {
        // θ = π/4, flat bath, χ = 0: x(t) = x₀ e^{-t}, y(t) = y₀ e^{-3t},
        // z(t) = z₀ e^{-2t} (rates 2ξ₊, 2(c₀+ξ₊), 4ξ₊ with ξ₊ = 1/2, c₀ = 1).
        let c = coeffs_at_theta(PI / 4.0, [1.0; 3], [0.0; 3]);
        let traj = evolve(&c, TwoAtomState::new(2.0, 0.5, 1.0), 3.0, 0.002).unwrap();
        for &(t, s) in &traj {
            assert_relative_eq!(s.x, 2.0 * (-t).exp(), epsilon = 1e-9);
            assert_relative_eq!(s.y, 0.5 * (-3.0 * t).exp(), epsilon = 1e-9);
            assert_relative_eq!(s.z, (-2.0 * t).exp(), epsilon = 1e-9);
        }
        let (t_last, _) = traj[traj.len() - 1];
        assert_eq!(t_last, 3.0);
    }

    #[test]
    fn evolve_guards() {
        let c = coeffs_at_theta(PI / 4.0, [1.0; 3], [0.0; 3]);
        // max coefficient is c₀ = 1 → bound 0.1
        assert!(matches!(
            evolve(&c, TwoAtomState::GROUND_DRESSED, 1.0, 0.2),
            Err(Error::StepSize { .. })
        ));
        assert!(evolve(&c, TwoAtomState::GROUND_DRESSED, 1.0, -0.1).is_err());
        let echo = evolve(&c, TwoAtomState::GROUND_DRESSED, 0.0, 0.01).unwrap();
        assert_eq!(echo.len(), 1);
        assert_eq!(echo[0].1, TwoAtomState::GROUND_DRESSED);
    }

    #[test]
    fn populations_round_trip() {
        let s = TwoAtomState::new(-0.6, 0.12, 0.4);
        let p = s.populations();
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        let back = TwoAtomState::from_populations(p).unwrap();
        assert_relative_eq!(back.x, s.x, epsilon = 1e-14);
        assert_relative_eq!(back.y, s.y, epsilon = 1e-14);
        assert_relative_eq!(back.z, s.z, epsilon = 1e-14);
        assert!(s.is_physical(1e-12));
        assert!(!TwoAtomState::new(2.5, 0.0, 1.0).is_physical(1e-9));
        assert!(TwoAtomState::from_populations([0.7, 0.5, -0.1, -0.1]).is_err());
    }

    #[test]
    fn trajectories_stay_physical() {
        let c = coeffs_at_theta(1.1, [1.0, 0.7, 1.3], [0.4, 0.1, -0.2]);
        let traj = evolve(&c, TwoAtomState::GROUND_DRESSED, 30.0, 0.01).unwrap();
        for &(_, s) in &traj {
            assert!(s.is_physical(1e-9), "unphysical state {s:?}");
        }
    }
}
