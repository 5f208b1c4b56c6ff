//! Numerical toolkit for finite-dimensional symmetric Banach sequence spaces.
//!
//! The crate evaluates norms of the classical catalog (`ℓ_p`, Lorentz `ℓ_{p,q}` and
//! `d(w,p)`, Orlicz, Marcinkiewicz) together with the derived constructions
//! (Köthe duals, powers, multiplier spaces), and builds on them estimators for
//! K-functionals, `(E,p)`-summing norms and approximation numbers of identity and
//! diagonal operators.
//!
//! Every numerical answer is tagged: [`NormResult`] carries an exact/numerical
//! certification and [`BoundPair`] a lower/upper bracket for quantities without a
//! closed form.

pub mod cli;
pub mod duality;
pub mod error;
pub mod interpolation;
pub mod numerics;
pub mod snumbers;
pub mod spaces;
pub mod summing;
pub mod verification;

pub use duality::{
    identity_norm, kothe_dual_norm, m2e_norm, multiplier_norm, power_norm, BoundPair,
    Certification, NormResult,
};
pub use error::{Error, Result};
pub use numerics::SolverConfig;
pub use spaces::{
    cesaro_mean, fundamental, norm, rearrange, FundamentalRule, OrliczFunction, Scalar,
    SpaceDescriptor, Vector, WeightRule,
};
