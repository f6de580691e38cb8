//! A project on disk: its representation, activation state and documents.
//!
//! The state file `.mutforge/state` is TOML:
//!
//! ```toml
//! representation = "comment"
//! oracle = "mini"            # in-AST only, optional
//! active = ["insert_1"]
//!
//! [profile]                  # optional; otherwise chosen per extension
//! comment_begin = "/*"
//! comment_end = "*/"
//! mutation_marker = "|"
//! style = "block"
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::algebra::Catalog;
use crate::error::{Error, Result};
use crate::model::{normalize_newlines, MutationDocument};
use crate::profile::SyntaxProfile;
use crate::repr::{self, FileMap, OracleKind, Representation, Settings};

pub const STATE_DIR: &str = ".mutforge";
pub const STATE_FILE: &str = ".mutforge/state";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleKind>,
    #[serde(default)]
    pub active: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<SyntaxProfile>,
}

impl State {
    pub fn new(representation: Representation) -> Self {
        State {
            representation,
            oracle: None,
            active: Vec::new(),
            profile: None,
        }
    }

    pub fn settings(&self) -> Settings {
        Settings {
            profile: self.profile.clone(),
            oracle: self.oracle,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::State {
            path: STATE_FILE.into(),
            message: e.to_string(),
        })
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("state serializes")
    }
}

/// One row of `list`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockEntry {
    pub name: String,
    pub tags: Vec<String>,
    pub file: String,
    pub line: usize,
    pub variants: Vec<VariantEntry>,
    pub active: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantEntry {
    pub name: String,
    pub tags: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Project {
    pub root: PathBuf,
    pub state: State,
    pub docs: Vec<MutationDocument>,
    /// Every readable text file under the root, as last seen or written.
    files: FileMap,
}

fn skipped(entry: &walkdir::DirEntry) -> bool {
    entry.depth() > 0
        && entry.file_type().is_dir()
        && entry
            .file_name()
            .to_str()
            .is_some_and(|n| n.starts_with('.') || n == "target")
}

/// Reads every UTF-8 file below `root`, skipping hidden directories and
/// `target`, with line endings normalized.
pub fn read_tree(root: &Path) -> Result<FileMap> {
    let mut files = FileMap::new();
    for entry in WalkDir::new(root).into_iter().filter_entry(|e| !skipped(e)) {
        let entry = entry.map_err(|e| Error::io(root.display().to_string(), e.into()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("walk stays below root");
        let Some(rel) = rel.to_str() else { continue };
        let rel = rel.replace('\\', "/");
        let bytes = fs::read(entry.path()).map_err(|e| Error::io(&rel, e))?;
        if let Ok(text) = String::from_utf8(bytes) {
            files.insert(rel, normalize_newlines(&text));
        }
    }
    Ok(files)
}

impl Project {
    /// Creates `.mutforge/state` for `root` and opens the project.
    pub fn init(root: &Path, state: State) -> Result<Self> {
        write_file(root, STATE_FILE, &state.render())?;
        Project::open(root)
    }

    /// Opens a project; without a state file it is a comment project.
    pub fn open(root: &Path) -> Result<Self> {
        let state_path = root.join(STATE_FILE);
        let state = if state_path.exists() {
            let text = fs::read_to_string(&state_path).map_err(|e| Error::io(STATE_FILE, e))?;
            State::parse(&text)?
        } else {
            State::new(Representation::Comment)
        };
        let files = read_tree(root)?;
        Project::from_files(root, state, files)
    }

    /// Builds a project from an in-memory tree without touching the disk.
    pub fn from_files(root: &Path, state: State, files: FileMap) -> Result<Self> {
        let mut docs = repr::parse_files(state.representation, &files, &state.settings())?;
        if !state.representation.rewrites_sources() {
            for name in &state.active {
                let block = docs
                    .iter_mut()
                    .flat_map(|d| d.blocks_mut())
                    .find(|b| b.variant(name).is_some())
                    .ok_or_else(|| Error::State {
                        path: STATE_FILE.into(),
                        message: format!("active mutant `{name}` does not exist"),
                    })?;
                if let Some(other) = &block.active {
                    return Err(Error::State {
                        path: STATE_FILE.into(),
                        message: format!("`{other}` and `{name}` are both active in block `{}`", block.name),
                    });
                }
                block.active = Some(name.clone());
            }
        }
        let mut project = Project {
            root: root.to_path_buf(),
            state,
            docs,
            files,
        };
        project.state.active = project.active_set().into_iter().collect();
        Ok(project)
    }

    pub fn representation(&self) -> Representation {
        self.state.representation
    }

    pub fn settings(&self) -> Settings {
        self.state.settings()
    }

    pub fn files(&self) -> &FileMap {
        &self.files
    }

    pub fn active_set(&self) -> BTreeSet<String> {
        self.docs
            .iter()
            .flat_map(|d| d.blocks())
            .filter_map(|b| b.active.clone())
            .collect()
    }

    pub fn catalog(&self) -> Catalog {
        Catalog::from_documents(&self.docs)
    }

    pub fn list(&self) -> Result<Vec<BlockEntry>> {
        let settings = self.settings();
        let mut out = Vec::new();
        for doc in &self.docs {
            let lines = repr::anchors(self.representation(), doc, &settings)?;
            for (block, line) in doc.blocks().zip(lines) {
                out.push(BlockEntry {
                    name: block.name.clone(),
                    tags: block.tags.clone(),
                    file: doc.path.clone(),
                    line,
                    variants: block
                        .variants
                        .iter()
                        .map(|v| VariantEntry {
                            name: v.name.clone(),
                            tags: v.tags.clone(),
                        })
                        .collect(),
                    active: block.active.clone(),
                });
            }
        }
        Ok(out)
    }

    fn ensure_known(&self, mutant: &str) -> Result<()> {
        if self.docs.iter().flat_map(|d| d.blocks()).any(|b| b.variant(mutant).is_some()) {
            Ok(())
        } else {
            Err(Error::UnknownMutant(mutant.to_string()))
        }
    }

    /// Applies `change` to the documents and writes the result; on failure
    /// the in-memory project is left as it was.
    fn update(&mut self, change: impl FnOnce(&mut Vec<MutationDocument>)) -> Result<()> {
        let before = self.docs.clone();
        change(&mut self.docs);
        let result = self.store();
        if result.is_err() {
            self.docs = before;
        }
        result
    }

    pub fn set_active(&mut self, mutant: &str) -> Result<()> {
        self.ensure_known(mutant)?;
        self.update(|docs| {
            for b in docs.iter_mut().flat_map(|d| d.blocks_mut()) {
                if b.variant(mutant).is_some() {
                    b.active = Some(mutant.to_string());
                }
            }
        })
    }

    pub fn unset_active(&mut self, mutant: &str) -> Result<()> {
        self.ensure_known(mutant)?;
        self.update(|docs| {
            for b in docs.iter_mut().flat_map(|d| d.blocks_mut()) {
                if b.active.as_deref() == Some(mutant) {
                    b.active = None;
                }
            }
        })
    }

    pub fn reset(&mut self) -> Result<()> {
        self.update(|docs| docs.iter_mut().for_each(MutationDocument::reset))
    }

    /// Makes exactly `set` active, resetting everything else.
    pub fn activate_only(&mut self, set: &BTreeSet<String>) -> Result<()> {
        for m in set {
            self.ensure_known(m)?;
        }
        self.update(|docs| {
            for b in docs.iter_mut().flat_map(|d| d.blocks_mut()) {
                b.active = b.variants.iter().find(|v| set.contains(&v.name)).map(|v| v.name.clone());
            }
        })
    }

    /// Renders the documents and state and writes whatever changed. Stale
    /// artifacts of the current representation are removed.
    pub fn store(&mut self) -> Result<()> {
        let rendered = repr::render_files(self.representation(), &self.docs, &self.settings())?;
        self.state.active = self.active_set().into_iter().collect();
        let stale: Vec<String> = self
            .files
            .keys()
            .filter(|p| self.representation().is_artifact(p) && !rendered.contains_key(*p))
            .cloned()
            .collect();
        self.write_all(rendered, &stale)
    }

    pub(crate) fn write_all(&mut self, rendered: FileMap, remove: &[String]) -> Result<()> {
        for (path, text) in rendered {
            if self.files.get(&path) != Some(&text) {
                write_file(&self.root, &path, &text)?;
                self.files.insert(path, text);
            }
        }
        for path in remove {
            let full = self.root.join(path);
            if full.exists() {
                fs::remove_file(&full).map_err(|e| Error::io(path, e))?;
            }
            self.files.remove(path);
            remove_empty_parents(&self.root, path);
        }
        write_file(&self.root, STATE_FILE, &self.state.render())
    }
}

pub(crate) fn write_file(root: &Path, rel: &str, text: &str) -> Result<()> {
    let full = root.join(rel);
    if let Some(dir) = full.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    fs::write(&full, text).map_err(|e| Error::io(rel, e))
}

fn remove_empty_parents(root: &Path, rel: &str) {
    let mut dir = Path::new(rel).parent();
    while let Some(d) = dir.filter(|d| !d.as_os_str().is_empty()) {
        if fs::remove_dir(root.join(d)).is_err() {
            break;
        }
        dir = d.parent();
    }
}
