//! Simulation of a prepare-and-send key distribution protocol under
//! eavesdropping, together with numerical checks of the algorithmic
//! information-disturbance trade-off.
//!
//! The pipeline runs bottom-up:
//!
//! * [`linalg`] provides dense complex matrices, a Jacobi eigensolver and
//!   subsystem bookkeeping.
//! * [`channel`] and [`attacks`] build Kraus-form channels whose output is
//!   split between Bob and Eve.
//! * [`protocol`] encodes messages, forms receiver states and the
//!   entanglement-based global state.
//! * [`distinguish`] and [`complexity`] turn receiver states into a
//!   prefix-free decoder catalogue and per-message proxy complexities.
//! * [`tradeoff`] checks the counting bound, the uncertainty relation and
//!   the Shannon-information version; [`experiment`] drives batch runs.

pub mod attacks;
pub mod channel;
pub mod complexity;
pub mod distinguish;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod protocol;
pub mod random;
pub mod state;
pub mod tolerance;
pub mod tradeoff;

pub use attacks::{make_attack, AttackSpec};
pub use channel::{apply_channel, validate_channel, QuantumChannel};
pub use complexity::{proxy_complexity, ComplexityProfile, DecoderCatalogue};
pub use distinguish::{distinguishable_partition, perfectly_distinguishable, DistinguishableClass};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig};
pub use linalg::{ComplexMatrix, C64};
pub use protocol::{Basis, Message, ProtocolInstance, Side};
pub use state::{DensityOperator, Projector};
pub use tolerance::Tolerances;
pub use tradeoff::{verify_tradeoff, TradeoffReport, VerifyOptions};
