//! In-AST representation: every block is embedded as a runtime dispatch:
//!
//! ```text
//! match () {
//!   _ if mutation_active("<variant>") => {
//!     <variant body>
//!   }
//!   _ => { // base
//!     <base>
//!   }
//! }
//! ```
//!
//! with one guarded arm per variant, in order, and the base in the final
//! default arm. Which arm runs is decided at runtime, so the rendered source
//! never changes when mutants are activated.

mod lex;
pub mod mini;
pub mod oracle;
pub mod runtime;
pub mod rust;

pub use mini::MiniOracle;
pub use oracle::{Category, NodeSpan, ParseOracle};
pub use rust::RustOracle;
mod marker;
mod normalize;

pub use marker::{
    block_meta, extract_inast, parse_meta, render_inast, render_inast_files, render_inast_with_anchors, BlockMeta, VariantMeta, GUARD,
    HELPER_FILE, HELPER_SOURCE, META_FILE,
};
pub use normalize::{normalize_block, normalize_document};
