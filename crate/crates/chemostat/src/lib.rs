//! Two-species chemostat competition with interspecific density dependence.
//!
//! The library covers the full analysis pipeline for the model
//!
//! ```text
//! S'  = D(S_in - S) - f1(S, x2) x1 - f2(S, x1) x2
//! x1' = (f1(S, x2) - D1) x1
//! x2' = (f2(S, x1) - D2) x2
//! ```
//!
//! with removal rates `Di = alpha_i D + a_i` and mutually inhibitory growth
//! rates: steady states and their local stability, trajectory integration,
//! operating diagrams over `(S_in, D)`, and one-parameter bifurcation scans.
//!
//! All numerics are generic over the scalar type through [`Scalar`]; the
//! `*64` aliases at the crate root pin the common `f64` instantiations.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub mod diagram;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod growth;
pub mod roots;
pub mod stability;

pub use error::{Error, Result};

/// Scalar type the whole crate is generic over.
///
/// Implemented for `f32` and `f64` via the blanket impl.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` literal into `Self`.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

pub type BioParams64 = growth::BioParams<f64>;
pub type MonodInhibition64 = growth::MonodInhibition<f64>;
pub type OperatingPoint64 = equilibria::OperatingPoint<f64>;
pub type SteadyState64 = equilibria::SteadyState<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type IntegratorConfig64 = dynamics::IntegratorConfig<f64>;
