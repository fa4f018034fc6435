//! Exact computer algebra on the free algebra `Q<e0,e1>`: the harmonic
//! coproduct and its module version, the Ihara-type bracket, the
//! decomposition of the action on `Δ^W`, and graded stabilizer Lie algebras.

pub mod coproducts;
pub mod decomposition;
pub mod derivations;
pub mod error;
pub mod freealg;
pub mod linalg;
pub mod lincomb;
pub mod random;
pub mod rational;
pub mod stabilizers;
pub mod suites;
pub mod walgebra;

pub use error::{AlgebraError, Result};
pub use freealg::{LyndonElement, NCPoly, Word};
pub use lincomb::LinComb;
pub use rational::Rational;
pub use walgebra::{Composition, MElem, Tensor2, WPoly};
