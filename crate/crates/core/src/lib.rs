//! Numerical laboratory for positive radial solutions of
//! `Δv + λv + v^p = 0` on balls and annuli.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod linear_modes;
pub mod numerics;
pub mod radial_ode;
pub mod regions;
pub mod shooting;
pub mod transforms;

pub use error::{Error, Result};
