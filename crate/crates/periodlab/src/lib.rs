//! Verification kernels for period relations of GL(n)×GL(n) Rankin–Selberg
//! convolutions over CM fields.

pub mod cmfield;
pub mod cyclo;
pub mod finfield;
pub mod intertwine;
pub mod lfactors;
pub mod mp;
pub mod roots;
pub mod surd;
pub mod oracle;
pub mod quad;
pub mod weights;
pub mod weylkostant;
