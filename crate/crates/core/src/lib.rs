//! Multi-armed bandits whose feedback is a random-walk trajectory over an
//! absorbing Markov chain.
//!
//! Arms are the transient nodes of a chain. Playing a node starts a walk that
//! ends at the absorbing node; the reward is the total edge length travelled.
//! The crate provides exact chain analytics ([`markov`]), trajectory
//! simulation ([`walk`]), per-node sample extraction ([`feedback`]), the
//! trajectory-aware UCB and EXP3 policies ([`ucb`], [`exp3`]), the
//! lower-bound instance constructions ([`lower_bounds`]) and a seeded
//! experiment harness ([`harness`]).

pub mod builtin;
pub mod error;
pub mod exp3;
pub mod feedback;
pub mod harness;
pub mod lower_bounds;
pub mod markov;
pub mod policy;
pub mod stats;
pub mod ucb;
pub mod walk;

pub use error::{Error, Result};
pub use feedback::FeedbackLedger;
pub use markov::{ChainInstance, EdgeLengths, ValidationReport};
pub use policy::Policy;
pub use walk::{LengthProcess, SimRng, Trajectory};
