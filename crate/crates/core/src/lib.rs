//! Exact computations around coarse geometry and arithmetic groups:
//! root systems and Chevalley groups, quadratic rings, four-point
//! hyperbolicity of finite graphs, combinatorial horoballs, and isometric
//! actions with their pseudocharacters.

pub mod error;
pub mod halfint;
pub mod matrix;
pub mod rootsys;
pub mod chevalley;
pub mod numring;
pub mod budget;
pub mod group;
pub mod coarse;
pub mod horoball;
pub mod action;
pub(crate) mod serde_util;

pub use error::{Error, Result};
pub use halfint::HalfInt;
pub use matrix::IntMatrix;
