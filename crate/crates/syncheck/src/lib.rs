//! Analysis of networks of communicating finite-state automata.
//!
//! The crate models a network of participants exchanging messages over
//! synchronous, peer-to-peer, or mailbox FIFO semantics, decides
//! synchronisability for tree topologies via influenced-language
//! computation, and compiles Post Correspondence Problem instances into
//! mailbox networks for bounded reproduction of their (non-)behaviour.

pub mod automata;
pub mod format;
pub mod network;
pub mod pcp;
pub mod semantics;
pub mod tree;

pub use automata::{Fsa, FsaError, InclusionResult, WordSet};
pub use network::{
    Action, CommunicatingAutomaton, Direction, FinalMode, Message, Network, Topology, TreeInfo,
};
pub use semantics::{Bounds, Configuration, Execution, Semantics, TraceSet};
pub use tree::{FailureKind, Verdict, VerdictResult};
