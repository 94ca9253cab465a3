#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fermi;
pub mod fredholm;
pub mod painleve;
pub mod precise;
pub mod quadrature;
pub mod validation;

pub use error::{Error, Result};
