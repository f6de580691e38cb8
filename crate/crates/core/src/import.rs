//! Importing mutants found by an automated tool as match-and-replace blocks.
//!
//! The records file is a JSON array of objects:
//!
//! | field         | type            | meaning                                       |
//! |---------------|-----------------|-----------------------------------------------|
//! | `file`        | string          | source path relative to the project root      |
//! | `line`        | integer ≥ 1     | line on which `original` begins               |
//! | `original`    | string          | text replaced by the mutant                   |
//! | `replacement` | string          | mutated text                                  |
//! | `name`        | string, opt.    | mutant name; generated when absent            |
//! | `tags`        | string[], opt.  | tags of the mutant                            |
//!
//! Records with the same `(file, line, original)` become one block with one
//! variant per record, in file order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matchreplace::{parse_sidecar, render_sidecar, MatchBlock, MatchVariant, SIDECAR};
use crate::model::{derive_block_name, is_identifier, normalize_newlines};
use crate::project::{write_file, Project, State, STATE_FILE};
use crate::repr::Representation;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub file: String,
    pub line: usize,
    pub original: String,
    pub replacement: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub tags: Vec<String>,
}

pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    let values: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| Error::Record {
        index: 0,
        message: format!("records file must be a JSON array: {e}"),
    })?;
    values
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            serde_json::from_value(v).map_err(|e| Error::Record {
                index,
                message: e.to_string(),
            })
        })
        .collect()
}

fn file_stem(path: &str) -> String {
    let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("m");
    let mut s: String = stem.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        s.insert(0, '_');
    }
    s
}

/// (file, line, original)
type GroupKey = (String, usize, String);

/// Groups records into match-and-replace blocks, checking each against the
/// sources it names. `taken` holds names already in use.
pub fn records_to_blocks(
    records: &[Record],
    sources: &BTreeMap<String, String>,
    taken: &BTreeSet<String>,
) -> Result<Vec<MatchBlock>> {
    let mut groups: Vec<(GroupKey, Vec<(usize, &Record)>)> = Vec::new();
    for (index, r) in records.iter().enumerate() {
        let bad = |message: String| Error::Record { index, message };
        if r.line == 0 {
            return Err(bad("line numbers start at 1".into()));
        }
        if r.original.is_empty() {
            return Err(bad("`original` is empty".into()));
        }
        let text = sources
            .get(&r.file)
            .ok_or_else(|| bad(format!("{}: no such file", r.file)))?;
        let found = text
            .split_inclusive('\n')
            .scan(0, |offset, line| {
                let start = *offset;
                *offset += line.len();
                Some((start, line))
            })
            .nth(r.line - 1)
            .is_some_and(|(start, line)| {
                line.char_indices().any(|(i, _)| text[start + i..].starts_with(&r.original))
            });
        if !found {
            return Err(bad(format!("{}:{}: `{}` not found on this line", r.file, r.line, r.original)));
        }
        let key = (r.file.clone(), r.line, r.original.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push((index, r)),
            None => groups.push((key, vec![(index, r)])),
        }
    }
    groups.sort_by(|a, b| (&a.0 .0, a.0 .1).cmp(&(&b.0 .0, b.0 .1)));

    let mut used = taken.clone();
    let mut claim = |name: String, index: usize| -> Result<String> {
        if !is_identifier(&name) {
            return Err(Error::Record {
                index,
                message: format!("`{name}` is not an identifier"),
            });
        }
        if !used.insert(name.clone()) {
            return Err(Error::NameCollision(name));
        }
        Ok(name)
    };

    let mut blocks = Vec::new();
    for ((file, line, original), members) in groups {
        let given: Vec<&str> = members.iter().filter_map(|(_, r)| r.name.as_deref()).collect();
        let fallback = format!("{}_l{line}", file_stem(&file));
        let block = if given.len() == members.len() {
            derive_block_name(given.iter().copied(), &fallback)
        } else {
            fallback
        };
        let block = claim(block, members[0].0)?;
        let mut variants = Vec::new();
        for (k, (index, r)) in members.iter().enumerate() {
            let name = r.name.clone().unwrap_or_else(|| format!("{block}_{}", k + 1));
            variants.push(MatchVariant {
                name: claim(name, *index)?,
                replacement: r.replacement.clone(),
                tags: r.tags.clone(),
            });
        }
        blocks.push(MatchBlock {
            name: block,
            scope: format!("{file}:{line}"),
            pattern: original,
            variants,
            tags: Vec::new(),
            active: None,
            indent: None,
        });
    }
    Ok(blocks)
}

/// Adds the records as blocks of the match-and-replace project at `root`,
/// creating it when the tree has no state file yet.
pub fn cmd_import(records: &[Record], root: &Path) -> Result<Project> {
    if root.join(STATE_FILE).exists() {
        let project = Project::open(root)?;
        if project.representation() != Representation::Matchreplace {
            return Err(Error::State {
                path: STATE_FILE.into(),
                message: format!(
                    "import needs a match-and-replace project, found {}",
                    project.representation()
                ),
            });
        }
    }
    let sidecar = root.join(SIDECAR);
    let mut existing = if sidecar.exists() {
        parse_sidecar(&std::fs::read_to_string(&sidecar).map_err(|e| Error::io(SIDECAR, e))?)?
    } else {
        Vec::new()
    };
    let taken: BTreeSet<String> = existing
        .iter()
        .flat_map(|b| std::iter::once(b.name.clone()).chain(b.variants.iter().map(|v| v.name.clone())))
        .collect();
    let mut sources = BTreeMap::new();
    for r in records {
        if !sources.contains_key(&r.file) {
            if let Ok(text) = std::fs::read_to_string(root.join(&r.file)) {
                sources.insert(r.file.clone(), normalize_newlines(&text));
            }
        }
    }
    existing.extend(records_to_blocks(records, &sources, &taken)?);
    write_file(root, SIDECAR, &render_sidecar(&existing))?;
    if !root.join(STATE_FILE).exists() {
        write_file(root, STATE_FILE, &State::new(Representation::Matchreplace).render())?;
    }
    Project::open(root)
}
