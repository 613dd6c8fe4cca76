//! Space-time fault models and the decoders that run on them.

mod fault_model;
mod mwe;
mod two_step;

pub use fault_model::{build_fault_model, Fault, FaultKind, FaultModel, NoiseKind, Site, SiteClass};
pub use mwe::{default_wcap, mwe_decode, weak_ft_certificate, DecodeStatus, DecodeVerdict, MweConfig, MweDecoder, WeakFtReport};
pub use two_step::{
    quantum_lookup_decode, two_step_certificate, two_step_decode, LookupResult, QuantumLookup, TwoStepCase, TwoStepDecoder,
    TwoStepReport,
};
