pub mod algebra;
pub mod comment;
pub mod convert;
pub mod diff;
pub mod error;
pub mod import;
pub mod inast;
pub mod matchreplace;
pub mod model;
pub mod patch;
pub mod preprocessor;
pub mod profile;
pub mod project;
pub mod repr;
pub mod runner;
pub mod timing;

pub use error::{Error, Result};
pub use model::{MutationBlock, MutationDocument, Segment, Trivia, Variant};
pub use profile::{CommentStyle, SyntaxProfile, WrapStyle};
