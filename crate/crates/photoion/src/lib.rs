//! Physics toolkit for a two-color photoionization ion-loading system:
//! single-pass second harmonic generation in a periodically poled crystal,
//! the LED collection/imaging power budget, neutral-atom excitation and
//! Rydberg ionization, and quantum-jump telegraph statistics of the
//! trapped ion.
//!
//! All operations are pure functions over validated value types and are
//! safe for concurrent use; the only randomness is the seeded telegraph
//! Monte Carlo in [`jumps`].

pub mod dispersion;
pub mod error;
pub mod ion;
pub mod jumps;
pub mod led;
pub mod numeric;
pub mod optics;
pub mod shg;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use units::{Energy, Intensity, Length, Power, Temperature, Wavelength};
