//! Patch representation: sources hold the working text, and each block has a
//! directory `patches/<block>/` with a `manifest` and one `<variant>.diff`
//! per variant whose text differs from the base.
//!
//! Every diff is taken against the reset file and only touches the lines of
//! its own block.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diff::{apply_unified_diff, region_diff, Direction, Hunk, UnifiedDiff};
use crate::error::{Error, Result};
use crate::model::{count_newlines, normalize_newlines, MutationBlock, MutationDocument, Segment, Variant};

pub const PATCH_DIR: &str = "patches";
pub const MANIFEST: &str = "manifest";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub block: String,
    pub source: String,
    /// 1-based first line of the block in the reset source.
    pub anchor: usize,
    /// Number of lines the base occupies.
    pub lines: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub indent: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<String>,
    pub variants: Vec<ManifestVariant>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestVariant {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    /// Diff file beside the manifest; absent when the variant equals the base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff: Option<String>,
}

pub fn manifest_path(block: &str) -> String {
    format!("{PATCH_DIR}/{block}/{MANIFEST}")
}

pub fn diff_path(block: &str, variant: &str) -> String {
    format!("{PATCH_DIR}/{block}/{variant}.diff")
}

pub(crate) fn line_count(s: &str) -> usize {
    count_newlines(s) + usize::from(!s.is_empty() && !s.ends_with('\n'))
}

fn split_lines(s: &str) -> Vec<&str> {
    s.split_inclusive('\n').collect()
}

/// Renders documents to a map from relative path to file content: each
/// source with its active variants applied, plus every manifest and diff.
pub fn render_patch_bundle(docs: &[MutationDocument]) -> Result<BTreeMap<String, String>> {
    let mut files = BTreeMap::new();
    for doc in docs {
        let doc = doc.line_aligned()?;
        files.insert(doc.path.clone(), doc.active_text());
        let reset = doc.reset_text();
        let total = line_count(&reset);
        let anchors = doc.base_lines();
        for (b, anchor) in doc.blocks().zip(anchors) {
            let lines = line_count(&b.base);
            let at_eof = anchor - 1 + lines == total && !reset.ends_with('\n');
            let mut variants = Vec::new();
            for v in &b.variants {
                if !at_eof && !v.body.is_empty() && !v.body.ends_with('\n') && anchor - 1 + lines < total {
                    return Err(Error::WrapFailure {
                        block: b.name.clone(),
                        reason: format!("variant `{}` does not end with a newline", v.name),
                    });
                }
                let diff = region_diff(&doc.path, &b.base, &v.body, anchor - 1).map(|d| {
                    files.insert(diff_path(&b.name, &v.name), d.render());
                    format!("{}.diff", v.name)
                });
                variants.push(ManifestVariant {
                    name: v.name.clone(),
                    tags: v.tags.clone(),
                    diff,
                });
            }
            let manifest = Manifest {
                block: b.name.clone(),
                source: doc.path.clone(),
                anchor,
                lines,
                indent: b.indent.clone(),
                tags: b.tags.clone(),
                active: b.active.clone(),
                variants,
            };
            let text = toml::to_string(&manifest).map_err(|e| Error::Manifest {
                path: manifest_path(&b.name).into(),
                message: e.to_string(),
            })?;
            files.insert(manifest_path(&b.name), text);
        }
    }
    Ok(files)
}

struct Loaded {
    manifest: Manifest,
    path: PathBuf,
    diffs: BTreeMap<String, Vec<Hunk>>,
}

impl Loaded {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Manifest {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    /// Net change in line count when the given variant is applied.
    fn delta(&self, variant: &str) -> isize {
        self.diffs.get(variant).map_or(0, |hunks| {
            hunks.iter().map(|h| h.new_count as isize - h.old_count as isize).sum()
        })
    }
}

fn shift(hunks: &[Hunk], by: isize) -> Vec<Hunk> {
    hunks
        .iter()
        .cloned()
        .map(|mut h| {
            h.old_start = (h.old_start as isize + by).max(0) as usize;
            h.new_start = (h.new_start as isize + by).max(0) as usize;
            h
        })
        .collect()
}

/// Parses a bundle from an in-memory file map holding the `patches/` tree
/// and the source files it refers to.
pub fn parse_patch_files(files: &BTreeMap<String, String>) -> Result<Vec<MutationDocument>> {
    let prefix = format!("{PATCH_DIR}/");
    let mut per_block: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for path in files.keys() {
        if let Some(rest) = path.strip_prefix(&prefix) {
            match rest.split_once('/') {
                Some((block, file)) if !file.contains('/') => per_block.entry(block).or_default().push(file),
                _ => {
                    return Err(Error::Manifest {
                        path: path.into(),
                        message: "unexpected file in the patch directory".into(),
                    })
                }
            }
        }
    }

    let mut by_source: BTreeMap<String, Vec<Loaded>> = BTreeMap::new();
    for (dir, entries) in per_block {
        let path = PathBuf::from(manifest_path(dir));
        let text = files.get(&manifest_path(dir)).ok_or_else(|| Error::Manifest {
            path: path.clone(),
            message: "missing manifest".into(),
        })?;
        let manifest: Manifest = toml::from_str(text).map_err(|e| Error::Manifest {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let mut loaded = Loaded {
            manifest,
            path,
            diffs: BTreeMap::new(),
        };
        let m = &loaded.manifest;
        if m.block != dir {
            return Err(loaded.err(format!("block `{}` stored in directory `{dir}`", m.block)));
        }
        if m.anchor == 0 {
            return Err(loaded.err("anchor lines start at 1"));
        }
        if let Some(active) = &m.active {
            if !m.variants.iter().any(|v| &v.name == active) {
                return Err(loaded.err(format!("active variant `{active}` is not listed")));
            }
        }
        let mut referenced = Vec::new();
        let mut diffs = BTreeMap::new();
        for v in &m.variants {
            if let Some(file) = &v.diff {
                let full = format!("{PATCH_DIR}/{dir}/{file}");
                let text = files
                    .get(&full)
                    .ok_or_else(|| loaded.err(format!("diff `{file}` of variant `{}` is missing", v.name)))?;
                let diff = UnifiedDiff::parse(text).map_err(|e| loaded.err(format!("{file}: {e}")))?;
                if diff.path() != m.source {
                    return Err(loaded.err(format!("{file} targets `{}`, not `{}`", diff.path(), m.source)));
                }
                referenced.push(file.as_str());
                diffs.insert(v.name.clone(), diff.hunks);
            }
        }
        for file in entries {
            if file != MANIFEST && !referenced.contains(&file) {
                return Err(loaded.err(format!("`{file}` is not referenced by the manifest")));
            }
        }
        loaded.diffs = diffs;
        by_source.entry(loaded.manifest.source.clone()).or_default().push(loaded);
    }

    let mut docs = Vec::new();
    for (source, mut blocks) in by_source {
        blocks.sort_by_key(|l| l.manifest.anchor);
        for pair in blocks.windows(2) {
            let (a, b) = (&pair[0].manifest, &pair[1].manifest);
            if a.anchor == b.anchor || a.anchor + a.lines > b.anchor {
                return Err(pair[1].err(format!("block overlaps block `{}`", a.block)));
            }
        }
        let working = files.get(&source).ok_or_else(|| Error::Manifest {
            path: blocks[0].path.clone(),
            message: format!("source `{source}` not found"),
        })?;
        docs.push(rebuild(&source, &normalize_newlines(working), &blocks)?);
    }
    Ok(docs)
}

fn rebuild(source: &str, working: &str, blocks: &[Loaded]) -> Result<MutationDocument> {
    // Undo active variants from the bottom up; blocks above are still
    // active, so shift each diff by their line deltas.
    let mut reset = working.to_string();
    for (i, l) in blocks.iter().enumerate().rev() {
        let Some(active) = &l.manifest.active else { continue };
        let Some(hunks) = l.diffs.get(active) else { continue };
        let above: isize = blocks[..i]
            .iter()
            .filter_map(|b| b.manifest.active.as_deref().map(|a| b.delta(a)))
            .sum();
        reset = apply_unified_diff(&reset, &shift(hunks, above), Direction::Reverse)
            .map_err(|e| l.err(format!("cannot undo active `{active}` in `{source}`: {e}")))?;
    }

    let reset_lines = split_lines(&reset);
    let mut segments = Vec::new();
    let mut cursor = 0;
    for l in blocks {
        let m = &l.manifest;
        let start = m.anchor - 1;
        let end = start + m.lines;
        if end > reset_lines.len() {
            return Err(l.err(format!("block lines {}..{} exceed `{source}`", m.anchor, end)));
        }
        segments.push(Segment::Code(reset_lines[cursor..start].concat()));
        let base = reset_lines[start..end].concat();
        let mut variants = Vec::new();
        for v in &m.variants {
            let body = match l.diffs.get(&v.name) {
                None => base.clone(),
                Some(hunks) => {
                    let applied = apply_unified_diff(&reset, hunks, Direction::Forward)
                        .map_err(|e| l.err(format!("variant `{}`: {e}", v.name)))?;
                    let new_lines = split_lines(&applied);
                    let new_end = (end as isize + l.delta(&v.name)) as usize;
                    if new_lines.len() < new_end
                        || new_lines[..start] != reset_lines[..start]
                        || new_lines[new_end..] != reset_lines[end..]
                    {
                        return Err(l.err(format!("diff of `{}` changes lines outside the block", v.name)));
                    }
                    new_lines[start..new_end].concat()
                }
            };
            variants.push(Variant {
                name: v.name.clone(),
                tags: v.tags.clone(),
                body,
            });
        }
        let mut block = MutationBlock::new(m.block.clone(), base, variants);
        block.indent = m.indent.clone();
        block.tags = m.tags.clone();
        block.active = m.active.clone();
        segments.push(Segment::Block(block));
        cursor = end;
    }
    segments.push(Segment::Code(reset_lines[cursor..].concat()));
    let doc = MutationDocument::new(source, segments);
    doc.validate()?;
    Ok(doc)
}

/// Reads `<root>/patches/**` and the sources the manifests name.
pub fn parse_patch_bundle(root: &Path) -> Result<Vec<MutationDocument>> {
    let dir = root.join(PATCH_DIR);
    let mut files = BTreeMap::new();
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p.display().to_string(), e));
    let mut blocks: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| Error::io(dir.display().to_string(), e))?
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(dir.display().to_string(), e))?;
    blocks.sort_by_key(|e| e.file_name());
    for entry in blocks {
        let block = entry.file_name().to_string_lossy().into_owned();
        if !entry.path().is_dir() {
            return Err(Error::Manifest {
                path: entry.path(),
                message: "expected a block directory".into(),
            });
        }
        for f in std::fs::read_dir(entry.path()).map_err(|e| Error::io(block.clone(), e))? {
            let f = f.map_err(|e| Error::io(block.clone(), e))?;
            let name = f.file_name().to_string_lossy().into_owned();
            files.insert(format!("{PATCH_DIR}/{block}/{name}"), read(&f.path())?);
        }
        let manifest = files.get(&manifest_path(&block)).cloned().unwrap_or_default();
        if let Ok(m) = toml::from_str::<Manifest>(&manifest) {
            if !files.contains_key(&m.source) {
                let src = root.join(&m.source);
                if src.is_file() {
                    files.insert(m.source.clone(), read(&src)?);
                }
            }
        }
    }
    parse_patch_files(&files)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CALC: &str = "fn add(a: i32, b: i32) -> i32 {\n    a + b\n}\n";
    const LISTING: &str = "diff --git a/calc.rs b/calc.rs
--- a/calc.rs
+++ b/calc.rs
@@ -2,1 +2,1 @@
-    a + b
+    a - b
";

    fn calc_doc() -> MutationDocument {
        MutationDocument::new(
            "calc.rs",
            vec![
                Segment::Code("fn add(a: i32, b: i32) -> i32 {\n".into()),
                Segment::Block(MutationBlock::new(
                    "add",
                    "    a + b\n",
                    vec![Variant::new("add_1", "    a - b\n")],
                )),
                Segment::Code("}\n".into()),
            ],
        )
    }

    #[test]
    fn renders_the_listing() {
        let files = render_patch_bundle(&[calc_doc()]).unwrap();
        assert_eq!(files["calc.rs"], CALC);
        assert_eq!(files["patches/add/add_1.diff"], LISTING);
        let m: Manifest = toml::from_str(&files["patches/add/manifest"]).unwrap();
        assert_eq!((m.anchor, m.lines), (2, 1));
        assert_eq!(parse_patch_files(&files).unwrap(), vec![calc_doc()]);
    }

    #[test]
    fn active_variant_round_trips() {
        let mut doc = calc_doc();
        doc.blocks_mut().next().unwrap().active = Some("add_1".into());
        let files = render_patch_bundle(std::slice::from_ref(&doc)).unwrap();
        assert!(files["calc.rs"].contains("a - b"));
        assert_eq!(parse_patch_files(&files).unwrap(), vec![doc]);
    }

    #[test]
    fn several_active_blocks_with_line_deltas() {
        let mk = |name: &str, base: &str, body: &str| {
            Segment::Block(MutationBlock::new(name, base, vec![Variant::new(format!("{name}_1"), body)]))
        };
        let mut doc = MutationDocument::new(
            "f.txt",
            vec![
                Segment::Code("head\n".into()),
                mk("grow", "a\n", "a\nb\nc\n"),
                Segment::Code("mid\n".into()),
                mk("shrink", "x\ny\nz\n", "x\n"),
                Segment::Code("tail\n".into()),
                mk("drop", "last", ""),
            ],
        );
        for b in doc.blocks_mut() {
            b.active = Some(format!("{}_1", b.name));
        }
        let files = render_patch_bundle(std::slice::from_ref(&doc)).unwrap();
        assert_eq!(files["f.txt"], "head\na\nb\nc\nmid\nx\ntail\n");
        assert_eq!(parse_patch_files(&files).unwrap(), vec![doc]);
    }

    #[test]
    fn unreferenced_diff_is_rejected() {
        let mut files = render_patch_bundle(&[calc_doc()]).unwrap();
        files.insert("patches/add/stray.diff".into(), LISTING.into());
        assert!(matches!(parse_patch_files(&files), Err(Error::Manifest { .. })));
    }

    #[test]
    fn drifted_source_is_reported() {
        let mut doc = calc_doc();
        doc.blocks_mut().next().unwrap().active = Some("add_1".into());
        let mut files = render_patch_bundle(&[doc]).unwrap();
        files.insert("calc.rs".into(), CALC.replace("a - b", "a * b"));
        assert!(parse_patch_files(&files).is_err());
    }

    #[test]
    fn identical_variant_has_no_diff() {
        let doc = MutationDocument::new(
            "x",
            vec![Segment::Block(MutationBlock::new("same", "k\n", vec![Variant::new("same_1", "k\n")]))],
        );
        let files = render_patch_bundle(std::slice::from_ref(&doc)).unwrap();
        assert!(!files.keys().any(|k| k.ends_with(".diff")));
        assert_eq!(parse_patch_files(&files).unwrap(), vec![doc]);
    }
}
