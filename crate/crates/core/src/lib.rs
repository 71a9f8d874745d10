pub mod amalgam;
pub mod bits;
pub mod catalog;
pub mod compiler;
pub mod error;
pub mod expr;
pub mod gsm;
pub mod io;
pub mod language;
pub mod lattice;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod render;
pub mod search;
pub mod tessellate;
mod mwis;

pub use error::{Error, Result};
