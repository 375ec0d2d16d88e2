//! Two-player tree exploration game: k agents explore a tree that an
//! adversary keeps growing at unvisited vertices.

pub mod error;
pub mod exact;
pub mod explorers;
pub mod game;
pub mod gen;
pub mod offline;
pub mod params;
pub mod revealer;
pub mod sweep;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use explorers::ExplorerKind;
pub use game::{play, replay, GameState, PlayConfig, Transcript, ViewMode};
pub use revealer::{derive_params, GadgetMode, LemmaParams, LemmaRevealer};
pub use tree::{RootedTree, VertexId};
pub use verify::{verify_lemma_run, VerificationReport};
