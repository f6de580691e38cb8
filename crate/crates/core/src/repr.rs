//! The five on-disk representations behind one interface over an in-memory
//! map from relative path to file content.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::comment::{self, parse_comment, render_comment};
use crate::error::{Error, Result};
use crate::inast::{self, MiniOracle, ParseOracle, RustOracle};
use crate::matchreplace::{self, parse_mr_files, render_mr};
use crate::model::MutationDocument;
use crate::patch::{self, parse_patch_files, render_patch_bundle};
use crate::preprocessor::{self, check_flags, parse_preprocessor, render_preprocessor};
use crate::profile::SyntaxProfile;

pub type FileMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Comment,
    Preprocessor,
    Patch,
    Matchreplace,
    Inast,
}

impl Representation {
    pub const ALL: [Representation; 5] = [
        Representation::Comment,
        Representation::Preprocessor,
        Representation::Patch,
        Representation::Matchreplace,
        Representation::Inast,
    ];

    /// The four representations that keep every text byte-for-byte.
    pub const TEXTUAL: [Representation; 4] = [
        Representation::Comment,
        Representation::Preprocessor,
        Representation::Patch,
        Representation::Matchreplace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Comment => "comment",
            Representation::Preprocessor => "preprocessor",
            Representation::Patch => "patch",
            Representation::Matchreplace => "matchreplace",
            Representation::Inast => "inast",
        }
    }

    /// Whether activation rewrites source files (as opposed to only the
    /// state file).
    pub fn rewrites_sources(self) -> bool {
        !matches!(self, Representation::Preprocessor | Representation::Inast)
    }

    /// Whether `path` is a file this representation owns besides sources.
    pub fn is_artifact(self, path: &str) -> bool {
        match self {
            Representation::Patch => path.starts_with(&format!("{}/", patch::PATCH_DIR)),
            Representation::Matchreplace => path == matchreplace::SIDECAR,
            Representation::Inast => path == inast::HELPER_FILE || path == inast::META_FILE,
            _ => false,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Representation::ALL
            .into_iter()
            .find(|r| r.name() == s || (s == "match-replace" && *r == Representation::Matchreplace))
            .ok_or_else(|| Error::Domain(format!("unknown representation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Mini,
    Rust,
}

impl OracleKind {
    pub fn oracle(self) -> &'static dyn ParseOracle {
        match self {
            OracleKind::Mini => &MiniOracle,
            OracleKind::Rust => &RustOracle,
        }
    }

    /// Source file extension handled by this oracle.
    pub fn extension(self) -> &'static str {
        match self {
            OracleKind::Mini => "mini",
            OracleKind::Rust => "rs",
        }
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mini" => Ok(OracleKind::Mini),
            "rust" => Ok(OracleKind::Rust),
            _ => Err(Error::Domain(format!("unknown oracle `{s}`"))),
        }
    }
}

/// Per-project knobs the representations need.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    /// Comment syntax for every file; by default chosen per file extension.
    pub profile: Option<SyntaxProfile>,
    /// Grammar for the in-AST representation; by default Rust.
    pub oracle: Option<OracleKind>,
}

impl Settings {
    pub fn profile_for(&self, path: &str) -> Option<SyntaxProfile> {
        self.profile
            .clone()
            .or_else(|| path.rsplit_once('.').and_then(|(_, ext)| SyntaxProfile::by_name(ext)))
    }

    pub fn oracle_kind(&self) -> OracleKind {
        self.oracle.unwrap_or(OracleKind::Rust)
    }
}

fn is_reserved(path: &str) -> bool {
    Representation::ALL.iter().any(|r| r.is_artifact(path))
}

/// Parses every document with at least one block, ordered by path. For
/// preprocessor and in-AST projects the result has no active variants;
/// their activation lives in the project state.
pub fn parse_files(repr: Representation, files: &FileMap, settings: &Settings) -> Result<Vec<MutationDocument>> {
    let mut docs = Vec::new();
    match repr {
        Representation::Comment => {
            for (path, text) in files {
                if is_reserved(path) {
                    continue;
                }
                let Some(profile) = settings.profile_for(path) else { continue };
                if !text.contains(&profile.open()) {
                    continue;
                }
                docs.push(parse_comment(path, text, &profile)?);
            }
        }
        Representation::Preprocessor => {
            for (path, text) in files {
                if is_reserved(path) || !text.contains("defined(M_") {
                    continue;
                }
                docs.push(parse_preprocessor(path, text)?);
            }
            check_flags(docs.iter().flat_map(|d| d.blocks()))?;
        }
        Representation::Patch => docs = parse_patch_files(files)?,
        Representation::Matchreplace => {
            if let Some(sidecar) = files.get(matchreplace::SIDECAR) {
                docs = parse_mr_files(sidecar, files)?;
            }
        }
        Representation::Inast => {
            let kind = settings.oracle_kind();
            let meta = match files.get(inast::META_FILE) {
                Some(text) => inast::parse_meta(text)?,
                None => Vec::new(),
            };
            for (path, text) in files {
                let listed = meta.iter().any(|m| &m.file == path);
                let source = [OracleKind::Rust, OracleKind::Mini]
                    .iter()
                    .any(|k| path.ends_with(&format!(".{}", k.extension())));
                if is_reserved(path) || !(listed || source && text.contains(inast::GUARD)) {
                    continue;
                }
                docs.push(inast::extract_inast(path, text, kind.oracle(), &meta)?);
            }
        }
    }
    docs.retain(|d| d.has_blocks());
    docs.sort_by(|a, b| a.path.cmp(&b.path));
    check_unique_names(&docs)?;
    Ok(docs)
}

/// Block names and variant names are unique across the project.
pub fn check_unique_names(docs: &[MutationDocument]) -> Result<()> {
    let mut blocks = std::collections::BTreeSet::new();
    let mut variants = std::collections::BTreeSet::new();
    for doc in docs {
        doc.validate()?;
        for b in doc.blocks() {
            if !blocks.insert(b.name.as_str()) {
                return Err(Error::DuplicateName(b.name.clone()));
            }
            for v in &b.variants {
                if !variants.insert(v.name.as_str()) {
                    return Err(Error::DuplicateName(v.name.clone()));
                }
            }
        }
    }
    Ok(())
}

/// Renders documents to the files this representation writes.
pub fn render_files(repr: Representation, docs: &[MutationDocument], settings: &Settings) -> Result<FileMap> {
    check_unique_names(docs)?;
    match repr {
        Representation::Comment => {
            let mut files = FileMap::new();
            for doc in docs {
                let profile = settings
                    .profile_for(&doc.path)
                    .ok_or_else(|| Error::Domain(format!("{}: no comment syntax known for this file", doc.path)))?;
                files.insert(doc.path.clone(), render_comment(doc, &profile)?);
            }
            Ok(files)
        }
        Representation::Preprocessor => {
            check_flags(docs.iter().flat_map(|d| d.blocks()))?;
            docs.iter()
                .map(|d| Ok((d.path.clone(), render_preprocessor(d)?)))
                .collect()
        }
        Representation::Patch => render_patch_bundle(docs),
        Representation::Matchreplace => render_mr(docs),
        Representation::Inast => inast::render_inast_files(docs, settings.oracle_kind().oracle()),
    }
}

/// Line of each block's start in the rendering with every block reset.
pub fn anchors(repr: Representation, doc: &MutationDocument, settings: &Settings) -> Result<Vec<usize>> {
    let mut reset = doc.clone();
    reset.reset();
    match repr {
        Representation::Comment => {
            let profile = settings
                .profile_for(&doc.path)
                .ok_or_else(|| Error::Domain(format!("{}: no comment syntax known for this file", doc.path)))?;
            Ok(comment::render_with_anchors(&reset, &profile)?.1)
        }
        Representation::Preprocessor => Ok(preprocessor::render_with_anchors(&reset)?.1),
        Representation::Patch => Ok(reset.line_aligned()?.base_lines()),
        Representation::Matchreplace => Ok(reset.base_lines()),
        Representation::Inast => Ok(inast::render_inast_with_anchors(&reset, settings.oracle_kind().oracle())?.1),
    }
}
