//! Numerical toolkit for dividing quantum channels: representations,
//! determinants, Markovian approximation and the qubit divisibility
//! classification.

pub mod basis;
pub mod channel;
pub mod error;
pub mod json;
pub mod linalg;
pub mod markov;
pub mod qubit;
pub mod sampling;

pub use basis::Basis;
pub use channel::{Channel, LinearMap, Representation, RepresentationKind, Tolerances};
pub use error::{ChannelError, Result};
pub use linalg::{ComplexMatrix, C64};
pub use markov::{Dissipator, GksForm, LindbladGenerator};
