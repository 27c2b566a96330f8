//! Python bindings for the band-filtered correlation library.
//!
//! Flat functions over floats, strings, and tuples: band pairs are two-letter
//! strings like "LL" or "CR", per-band rates are (left, center, right)
//! triples, and every library error surfaces as a `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mollow_g2_core::dynamics::{self, DynamicsCoefficients, TwoAtomState};
use mollow_g2_core::oracle;
use mollow_g2_core::params::{self, BandPair, ChainGeometry, DressedParams, PerBand, SpectralBand};
use mollow_g2_core::{correlations, Error};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_pair(pair: &str) -> PyResult<BandPair> {
    pair.parse().map_err(err)
}

fn parse_band(band: &str) -> PyResult<SpectralBand> {
    band.parse().map_err(err)
}

fn per_band(values: (f64, f64, f64)) -> PerBand<f64> {
    PerBand {
        left: values.0,
        center: values.1,
        right: values.2,
    }
}

fn coefficients(
    rabi: f64,
    detuning: f64,
    gammas: (f64, f64, f64),
    chi: (f64, f64, f64),
) -> PyResult<DynamicsCoefficients> {
    let params = DressedParams::new(rabi, detuning, per_band(gammas)).map_err(err)?;
    DynamicsCoefficients::from_params(&params, &per_band(chi)).map_err(err)
}

/// Dressing angle θ ∈ (0, π/2) for drive strength `rabi` and detuning `detuning`.
#[pyfunction]
fn mixing_angle(rabi: f64, detuning: f64) -> PyResult<f64> {
    params::mixing_angle(rabi, detuning).map_err(err)
}

/// Generalized Rabi frequency √(Ω² + (Δ/2)²).
#[pyfunction]
fn generalized_rabi(rabi: f64, detuning: f64) -> PyResult<f64> {
    params::generalized_rabi(rabi, detuning).map_err(err)
}

/// Detection phase δ = 2π r cos α accumulated between chain neighbours.
#[pyfunction]
fn detection_phase(n_atoms: usize, spacing: f64, alpha: f64) -> PyResult<f64> {
    Ok(ChainGeometry::new(n_atoms, spacing)
        .map_err(err)?
        .detection_phase(alpha))
}

/// Free-space pairwise coupling (χ, shift) at scaled separation `x`.
#[pyfunction]
fn collective_coupling(x: f64) -> PyResult<(f64, f64)> {
    let coupling = params::collective_coupling(x).map_err(err)?;
    Ok((coupling.chi, coupling.shift))
}

/// N-slit array factor sin²(Nδ/2) / sin²(δ/2).
#[pyfunction]
fn array_factor(n_atoms: usize, delta: f64) -> f64 {
    correlations::array_factor(n_atoms, delta)
}

/// Two-atom equal-time g² for an ordered band pair such as "LL" or "CR".
#[pyfunction]
fn g2_two_atom(pair: &str, delta1: f64, delta2: f64) -> PyResult<f64> {
    Ok(correlations::g2_two_atom(parse_pair(pair)?, delta1, delta2))
}

/// N-atom chain equal-time g² for an ordered band pair.
#[pyfunction]
fn g2_chain(pair: &str, n_atoms: usize, delta1: f64, delta2: f64) -> PyResult<f64> {
    correlations::g2_chain(parse_pair(pair)?, n_atoms, delta1, delta2).map_err(err)
}

/// Cauchy-Schwarz parameters (χ_left, χ_right); values below 1 are nonclassical.
#[pyfunction]
fn csi(n_atoms: usize, delta1: f64, delta2: f64) -> PyResult<(f64, f64)> {
    let values = correlations::csi(n_atoms, delta1, delta2).map_err(err)?;
    Ok((values.left, values.right))
}

/// Weak-drive two-atom g² with interference fringes of period 2π in δ.
#[pyfunction]
fn g2_weak_field(saturation_omega: f64, delta: f64) -> PyResult<f64> {
    correlations::g2_weak_field(saturation_omega, delta).map_err(err)
}

/// Strong-drive central-band fringe profile 1 + cos²δ (period π).
#[pyfunction]
fn g2_strong_central(delta: f64) -> f64 {
    correlations::g2_strong_central_single_detector(delta)
}

/// Ratio of weak- to strong-drive fringe periods (the resolution doubling).
#[pyfunction]
fn fringe_period_ratio(saturation_omega: f64) -> PyResult<f64> {
    correlations::fringe_period_ratio(saturation_omega).map_err(err)
}

/// Exact-diagonalization g² for `n_atoms` ≤ 12 under the uniform steady state.
#[pyfunction]
fn oracle_g2(n_atoms: usize, pair: &str, delta1: f64, delta2: f64) -> PyResult<f64> {
    oracle::oracle_g2(n_atoms, parse_pair(pair)?, delta1, delta2).map_err(err)
}

/// First-order band intensity Tr[ρ A†A] under the uniform steady state.
#[pyfunction]
fn first_order_intensity(n_atoms: usize, band: &str, delta: f64) -> PyResult<f64> {
    oracle::first_order_intensity(n_atoms, parse_band(band)?, delta).map_err(err)
}

/// Steady state (x, y, z) of the two-atom dressed-state relaxation.
///
/// `gammas` and `chi` are (left, center, right) triples.
#[pyfunction]
#[pyo3(signature = (rabi, detuning, gammas, chi = (0.0, 0.0, 0.0)))]
fn steady_state(
    rabi: f64,
    detuning: f64,
    gammas: (f64, f64, f64),
    chi: (f64, f64, f64),
) -> PyResult<(f64, f64, f64)> {
    let state = dynamics::steady_state(&coefficients(rabi, detuning, gammas, chi)?).map_err(err)?;
    Ok((state.x, state.y, state.z))
}

/// Fixed-step trajectory of the two-atom relaxation as (t, x, y, z) rows.
#[pyfunction]
#[pyo3(signature = (rabi, detuning, gammas, chi, initial, t_end, dt))]
fn evolve(
    rabi: f64,
    detuning: f64,
    gammas: (f64, f64, f64),
    chi: (f64, f64, f64),
    initial: (f64, f64, f64),
    t_end: f64,
    dt: f64,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let coeffs = coefficients(rabi, detuning, gammas, chi)?;
    let start = TwoAtomState::new(initial.0, initial.1, initial.2);
    let trajectory = dynamics::evolve(&coeffs, start, t_end, dt).map_err(err)?;
    Ok(trajectory
        .into_iter()
        .map(|(t, s)| (t, s.x, s.y, s.z))
        .collect())
}

/// Secular-approximation check: (pass, margin) with margin ≥ 1 meaning pass.
#[pyfunction]
#[pyo3(signature = (rabi, detuning, gammas, n_atoms, threshold = None))]
fn secular_check(
    rabi: f64,
    detuning: f64,
    gammas: (f64, f64, f64),
    n_atoms: usize,
    threshold: Option<f64>,
) -> PyResult<(bool, f64)> {
    let params = DressedParams::new(rabi, detuning, per_band(gammas)).map_err(err)?;
    let check = params::secular_regime_check(&params, n_atoms, threshold);
    Ok((check.pass, check.margin))
}

#[pymodule]
fn mollow_g2(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mixing_angle, m)?)?;
    m.add_function(wrap_pyfunction!(generalized_rabi, m)?)?;
    m.add_function(wrap_pyfunction!(detection_phase, m)?)?;
    m.add_function(wrap_pyfunction!(collective_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(array_factor, m)?)?;
    m.add_function(wrap_pyfunction!(g2_two_atom, m)?)?;
    m.add_function(wrap_pyfunction!(g2_chain, m)?)?;
    m.add_function(wrap_pyfunction!(csi, m)?)?;
    m.add_function(wrap_pyfunction!(g2_weak_field, m)?)?;
    m.add_function(wrap_pyfunction!(g2_strong_central, m)?)?;
    m.add_function(wrap_pyfunction!(fringe_period_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_g2, m)?)?;
    m.add_function(wrap_pyfunction!(first_order_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(secular_check, m)?)?;
    m.add("MAX_ORACLE_ATOMS", oracle::MAX_ORACLE_ATOMS)?;
    m.add("ORACLE_TOLERANCE", oracle::ORACLE_TOLERANCE)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
