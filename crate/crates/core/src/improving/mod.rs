//! Measured versions of the analytic hypotheses: atoms, the two-part improving
//! property, Dini norms, Fourier decay, continuity and the converse bound.

mod atom;
mod check;
mod converse;
mod decay;
mod modulus;

pub use atom::{make_atom, Atom};
pub use check::{
    check_improving_a, check_improving_b, continuity_fit, dual_exponent, translate, ImprovingA, ImprovingConfig,
    ModulusTable,
};
pub use converse::{converse_extract, ConverseReport};
pub use decay::{fourier_decay_fit, DecayFit, ShellSampling};
pub use modulus::{dini_norm, DiniNorm, Modulus, ModulusForm, DINI_FLOOR};
