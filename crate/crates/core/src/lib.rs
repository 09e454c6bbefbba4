//! Wave/particle nonclassicality witnesses for a two-mode interferometer
//! read out by click-counting detectors.
//!
//! The crate covers the full chain: pure-state preparation and a 50:50 beam
//! splitter on a truncated Fock space ([`fock`]), the covariance matrix and
//! the two classical bounds ([`witness`]), the time-multiplexed click
//! detector ([`detector`]), seeded shot samplers including classical
//! reference models ([`samplers`]) and error propagation ([`analysis`]).

pub mod analysis;
pub mod detector;
pub mod error;
pub mod fock;
mod math;
pub mod samplers;
pub mod witness;

pub use analysis::{
    analyze_clicks, analyze_counts, estimate_moments, significance_report, witness_with_errors,
    AnalysisReport, Measured,
};
pub use detector::{
    click_distribution, factorial_moment, moments_from_clicks, occupancy_kernel, systematic_error,
    ClickDistribution, ClickHistogram, FactorialMoments, DEFAULT_D_BINS,
};
pub use error::{Error, Result};
pub use fock::{
    apply_beam_splitter, apply_loss, number_distribution, photon_moments, prepare_two_mode,
    prepare_two_mode_auto, JointNumberDistribution, ModePreparation, MomentSet, TwoModeState,
};
pub use math::binomial;
pub use num_complex::Complex64;
pub use samplers::{
    sample_classical_particles, sample_classical_waves, sample_quantum_shots, ClassicalEnsemble,
    CountHistogram, RunConfig,
};
pub use witness::{
    analytic_coherent, analytic_fock, analytic_tmsv, witness_pair, SymMatrix2, WitnessResult,
};

/// Squeezed pair that a 50:50 splitter at `theta = 0` turns into a
/// two-mode squeezed vacuum with `q = tanh^2 r`.
pub fn tmsv_inputs(q: f64) -> Result<(ModePreparation, ModePreparation)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0,1), got {q}"
        )));
    }
    let r = q.sqrt().atanh();
    Ok((
        ModePreparation::Squeezed { r, phi: 0.0 },
        ModePreparation::Squeezed {
            r,
            phi: std::f64::consts::PI,
        },
    ))
}

/// Prepare, interfere and attenuate: the photon-number statistics that
/// reach the detectors.
pub fn detected_statistics(
    prep_a: ModePreparation,
    prep_b: ModePreparation,
    theta: f64,
    eta: f64,
    tau: f64,
) -> Result<JointNumberDistribution> {
    let state = prepare_two_mode_auto(prep_a, prep_b, tau)?;
    let out = apply_beam_splitter(&state, theta);
    apply_loss(&number_distribution(&out), eta, eta)
}
