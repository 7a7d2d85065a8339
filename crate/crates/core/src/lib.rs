//! Reshetikhin–Turaev invariants of Seifert fibered spaces and lens spaces
//! for simply-laced Lie algebras.
//!
//! Everything numeric is generic over [`Real`]; the aliases below fix the
//! scalar for the common backends.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod asymptotics;
pub mod gauss;
pub mod invariants;
pub mod lie;
pub mod modular;
pub mod rep;
pub mod scalar;
pub mod seifert;

pub use arith::{CfStrategy, ContinuedFraction, SL2Z};
pub use asymptotics::{cs_phase_set, lens_expansion, slope_fit, AsymptoticExpansion};
pub use invariants::{
    tau_closed_form, tau_lens, tau_matrix_form, InvariantError, InvariantResult, LensMethod, SelfDualSignTable,
};
pub use lie::{Family, LieError, RootSystem, WeightVec, WeylElement};
pub use modular::ModularData;
pub use scalar::{cis_pi, ComplexSum, DoubleDouble, Real};
pub use seifert::{Orientation, SeifertPresentation};

/// Exact rational numbers used for every inner product and phase argument.
pub type Rational = num_rational::Ratio<i64>;

pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexHigh = num_complex::Complex<DoubleDouble>;

pub type ModularData32 = ModularData<f32>;
pub type ModularData64 = ModularData<f64>;
pub type ModularDataHigh = ModularData<DoubleDouble>;
