//! Closed-form spatial correlation functions of the three spectral bands.
//!
//! Detectors are parametrized by their inter-atomic phases δ₁, δ₂ (see
//! [`crate::params::ChainGeometry::detection_phase`]). All band-resolved
//! results hold in the band-split regime on resonance (θ = π/4), where the
//! collective steady state is maximally mixed and every equal-time
//! correlator reduces to interference algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BandPair, SpectralBand};

/// Branch width for the removable singularities of the array factor.
pub const ARRAY_FACTOR_EPS: f64 = 1e-9;

/// N-slit interference array factor φ(δ) = sin²(Nδ/2) / sin²(δ/2).
///
/// The removable singularities at δ = 2πm take their analytic value N²
/// whenever |sin(δ/2)| < 1e-9. Bounded by 0 ≤ φ ≤ N².
pub fn array_factor(n_atoms: usize, delta: f64) -> f64 {
    assert!(n_atoms >= 1, "array_factor needs at least one emitter");
    let n = n_atoms as f64;
    let half_sin = (0.5 * delta).sin();
    if half_sin.abs() < ARRAY_FACTOR_EPS {
        return n * n;
    }
    let num = (0.5 * n * delta).sin();
    (num * num) / (half_sin * half_sin)
}

/// Normalized cross-band correlation g²_mn(δ₁, δ₂) for an atom pair:
///
///   CC: 1 + cos δ₁ cos δ₂        LL, RR: (1 + cos(δ₁ − δ₂)) / 2
///   LR, RL: (3 + cos(δ₁ + δ₂)) / 2       central×sideband: 1
pub fn g2_two_atom(pair: BandPair, delta1: f64, delta2: f64) -> f64 {
    use SpectralBand::*;
    match (pair.0, pair.1) {
        (Central, Central) => 1.0 + delta1.cos() * delta2.cos(),
        (Left, Left) | (Right, Right) => 0.5 * (1.0 + (delta1 - delta2).cos()),
        (Left, Right) | (Right, Left) => 0.5 * (3.0 + (delta1 + delta2).cos()),
        _ => 1.0,
    }
}

/// Same correlations for an N-atom chain (N ≥ 2), via the array factor:
///
///   CC:     1 − 2/N + [φ(δ₁+δ₂) + φ(δ₁−δ₂)] / N²
///   LL, RR: 1 − 2/N + φ(δ₁−δ₂) / N²
///   LR, RL: 1 + φ(δ₁+δ₂) / N²
///   central×sideband: 1
pub fn g2_chain(pair: BandPair, n_atoms: usize, delta1: f64, delta2: f64) -> Result<f64> {
    if n_atoms < 2 {
        return Err(Error::InvalidParameter(format!(
            "g2_chain needs at least 2 atoms, got {n_atoms}"
        )));
    }
    use SpectralBand::*;
    let n = n_atoms as f64;
    let n2 = n * n;
    Ok(match (pair.0, pair.1) {
        (Central, Central) => {
            1.0 - 2.0 / n
                + (array_factor(n_atoms, delta1 + delta2) + array_factor(n_atoms, delta1 - delta2))
                    / n2
        }
        (Left, Left) | (Right, Right) => {
            1.0 - 2.0 / n + array_factor(n_atoms, delta1 - delta2) / n2
        }
        (Left, Right) | (Right, Left) => 1.0 + array_factor(n_atoms, delta1 + delta2) / n2,
        _ => 1.0,
    })
}

/// Sideband Cauchy-Schwarz parameters (χ_L, χ_R); values below one violate
/// the classical bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsiValues {
    pub left: f64,
    pub right: f64,
}

impl CsiValues {
    pub fn violates(&self) -> bool {
        self.left < 1.0 || self.right < 1.0
    }
}

/// χ_L = g²_LL g²_RR / (g²_LR)² and χ_R = g²_LL g²_RR / (g²_RL)² for an
/// N-atom chain. The two coincide here because g²_LR = g²_RL.
pub fn csi(n_atoms: usize, delta1: f64, delta2: f64) -> Result<CsiValues> {
    use SpectralBand::*;
    let ll = g2_chain(BandPair(Left, Left), n_atoms, delta1, delta2)?;
    let rr = g2_chain(BandPair(Right, Right), n_atoms, delta1, delta2)?;
    let lr = g2_chain(BandPair(Left, Right), n_atoms, delta1, delta2)?;
    let rl = g2_chain(BandPair(Right, Left), n_atoms, delta1, delta2)?;
    Ok(CsiValues {
        left: ll * rr / (lr * lr),
        right: ll * rr / (rl * rl),
    })
}

/// Weak-drive total-field interference law for an atom pair,
/// g²(δ) = [s / (s + cos δ)]² with s = 1 + 2(Ω/γ)².
///
/// Stated for saturation parameters below one; the caller is expected to
/// treat Ω/γ ≥ 1 as outside the validity window.
pub fn g2_weak_field(saturation_omega: f64, delta: f64) -> Result<f64> {
    if !(saturation_omega.is_finite() && saturation_omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "saturation_omega must be > 0, got {saturation_omega}"
        )));
    }
    let s = 1.0 + 2.0 * saturation_omega * saturation_omega;
    let denom = s + delta.cos();
    if denom.abs() < 1e-12 {
        return Err(Error::Pole(format!(
            "weak-field g2 pole at delta = {delta}"
        )));
    }
    let r = s / denom;
    Ok(r * r)
}

/// Strong-drive central-band fringe profile for a single two-photon
/// detector on an atom pair: g²(δ) = 1 + cos² δ. Its period in δ is π —
/// half of the weak-field period, i.e. doubled spatial resolution.
pub fn g2_strong_central_single_detector(delta: f64) -> f64 {
    let c = delta.cos();
    1.0 + c * c
}

/// Fundamental δ-periods (weak, strong) of the two fringe laws, measured
/// numerically by locating successive maxima over δ ∈ [−2π, 2π].
pub fn fringe_periods(saturation_omega: f64) -> Result<(f64, f64)> {
    let weak = profile_period(
        |d| g2_weak_field(saturation_omega, d).unwrap_or(f64::NAN),
        "weak-field profile",
    )?;
    let strong = profile_period(g2_strong_central_single_detector, "strong-field profile")?;
    Ok((weak, strong))
}

/// Ratio weak-period / strong-period; 2 exactly, up to extremum-location
/// error, independent of the saturation parameter.
pub fn fringe_period_ratio(saturation_omega: f64) -> Result<f64> {
    if !(saturation_omega.is_finite() && saturation_omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "saturation_omega must be > 0, got {saturation_omega}"
        )));
    }
    let (weak, strong) = fringe_periods(saturation_omega)?;
    Ok(weak / strong)
}

/// Mean spacing between consecutive interior maxima of `f` on [−2π, 2π].
fn profile_period(f: impl Fn(f64) -> f64, label: &str) -> Result<f64> {
    const SAMPLES: usize = 8192;
    let (lo, hi) = (-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI);
    let h = (hi - lo) / SAMPLES as f64;
    let values: Vec<f64> = (0..=SAMPLES).map(|i| f(lo + i as f64 * h)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{label}: non-finite samples"
        )));
    }
    let mut maxima = Vec::new();
    for i in 1..SAMPLES {
        if values[i] > values[i - 1] && values[i] > values[i + 1] {
            let a = lo + (i - 1) as f64 * h;
            let b = lo + (i + 1) as f64 * h;
            maxima.push(golden_section_max(&f, a, b));
        }
    }
    if maxima.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "{label}: need at least two interior maxima to measure a period"
        )));
    }
    let spacings: Vec<f64> = maxima.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(spacings.iter().sum::<f64>() / spacings.len() as f64)
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
