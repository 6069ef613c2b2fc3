//! Toeplitz operators T_psi f(z) = int K(z,w) psi(w) f(w) dV(w): discretizations, exact
//! radial spectra, norm and essential-norm brackets, Berezin transforms and Schatten
//! diagnostics.

mod berezin;
mod criteria;
mod essnorm;
mod galerkin;
mod norms;
mod nystrom;
mod report;
mod schatten;
mod spectrum;
mod symbol;
mod trace;

pub use berezin::{berezin, berezin_bracket, berezin_on_grid, weak_null_pairings, Pairing};
pub use criteria::{
    boundary_exponent, boundedness_criterion, compactness_criterion, limsup_m, m_at_distance,
    m_profile, m_value, require_bounded, BoundaryLimit, BoundednessReport, CompactnessReport,
    MProfile, CRITICAL_BAND,
};
pub use essnorm::{
    essential_norm, essential_norm_with, exhaustion_disagreement, extrapolate_decreasing,
    EssentialNormReport,
};
pub use galerkin::{
    degree_for_cut, exact_l2_norm, galerkin_radial, l2_singular_values, multiplicity, RadialOracle,
};
pub use norms::{
    boyd_modulus_norm, global_bound_check, op_norm, quick_options, BoydEstimate, GlobalBound,
    NormBracket, NormContext, NormOptions, BRACKET_SLACK,
};
pub use nystrom::{DiscreteOperator, DENSE_NODE_CAP};
pub use report::{EssSummary, GridSummary, NormSummary, SchattenSummary, SpectrumReport};
pub use schatten::{
    schatten_criterion, schatten_from_oracle, schatten_norm_estimate, spectral_decay, DecayReport,
    SchattenCriterion, SchattenEstimate, Verdict, NOISE_BAND, SCHATTEN_CRITICAL,
};
pub use spectrum::{SingularSpectrum, SpectrumSource};
pub use symbol::{ExhaustionSpec, RadialSymbol, SampledSymbol, SymbolSpec, Window};
pub use trace::{trace_identity_check, trace_integral, TraceReport};
