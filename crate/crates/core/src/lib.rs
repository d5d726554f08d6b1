//! Model checking for public announcement logic with fixpoints, assignments and
//! iterated announcements, with generators for the muddy-children and hat puzzles.

pub mod checker;
pub mod error;
pub mod kripke;
pub mod lang;
pub mod puzzles;
pub mod rewrite;
pub mod rounds;
pub mod worldset;

pub use checker::{apply_assignment, eval, extension, update, Checker};
pub use error::{Error, Result};
pub use kripke::{Agent, Atom, EpistemicModel, Frame, Partition, PointedModel};
pub use lang::{parse, parse_with, Announcement, Formula, Macros};
pub use worldset::{WorldId, WorldSet};
