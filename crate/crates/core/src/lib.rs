pub mod analytic;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod params;
pub mod phonon;
pub mod quadrature;
pub mod runner;
pub mod scenario;
pub mod steady_state;
pub mod transport;

pub use error::{Error, Result};
