//! Stroboscopic quantum-nondemolition monitoring of one quadrature of a
//! macroscopic oscillator coupled to a thermal bath.
//!
//! The oscillator state is a Gaussian in the rotating-frame quadratures
//! `(X1, X2)`. [`dynamics`] relaxes it toward the bath, [`measurement`]
//! applies meter readouts, and [`stats`] tests whether the monitored
//! quadrature follows a Boltzmann law at the bath temperature.
//! [`noise_budget`] holds the feasibility arithmetic and [`harness`] runs
//! seeded ensembles.

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod measurement;
pub mod noise_budget;
pub mod observables;
pub mod seeding;
pub mod stats;

pub use error::{Error, Result};
