//! Littlewood-Paley and Bony paraproduct machinery on the periodic 3-torus,
//! with numerical certification of the frequency-localization identities
//! that drive Liouville-type arguments for stationary Navier-Stokes.

pub mod dealias;
pub mod decay;
pub mod diagnostics;
pub mod dyadic;
pub mod error;
pub mod fft;
pub mod field;
pub mod forge;
pub mod grid;
pub mod harness;
pub mod ledger;
pub mod norms;
pub mod output;
pub mod paraproduct;
pub mod snapshot;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{SpectralField, VectorField};
pub use grid::TorusGrid;
