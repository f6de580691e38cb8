//! Match-and-replace representation: sources hold the working text and a
//! single `mutations.json` at the project root lists every block as an
//! exact substring anchored at a line of the reset file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{count_newlines, leading_whitespace, MutationBlock, MutationDocument, Segment, Variant};

pub const SIDECAR: &str = "mutations.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchVariant {
    pub name: String,
    pub replacement: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchBlock {
    pub name: String,
    /// `path:line`, the line where the match begins in the reset file.
    pub scope: String,
    #[serde(rename = "match")]
    pub pattern: String,
    pub variants: Vec<MatchVariant>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<String>,
    /// Only written when it differs from the scope line's indentation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indent: Option<String>,
}

impl MatchBlock {
    pub fn scope(&self) -> Result<(&str, usize)> {
        let miss = || Error::ScopeMiss {
            block: self.name.clone(),
            scope: self.scope.clone(),
        };
        let (path, line) = self.scope.rsplit_once(':').ok_or_else(miss)?;
        let line: usize = line.parse().map_err(|_| miss())?;
        if line == 0 || path.is_empty() {
            return Err(miss());
        }
        Ok((path, line))
    }

    /// Text currently expected at the scope: the active replacement or the
    /// match.
    pub fn current(&self) -> Option<&str> {
        match &self.active {
            None => Some(&self.pattern),
            Some(a) => self.variants.iter().find(|v| &v.name == a).map(|v| v.replacement.as_str()),
        }
    }

    fn body_for(&self, target: Option<&str>) -> Option<&str> {
        match target {
            None => Some(&self.pattern),
            Some(t) => self.variants.iter().find(|v| v.name == t).map(|v| v.replacement.as_str()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SidecarShape {
    Many(Vec<MatchBlock>),
    One(MatchBlock),
}

pub fn parse_sidecar(text: &str) -> Result<Vec<MatchBlock>> {
    let shape: SidecarShape = serde_json::from_str(text).map_err(|e| Error::parse(SIDECAR, e.line(), e.to_string()))?;
    Ok(match shape {
        SidecarShape::Many(v) => v,
        SidecarShape::One(b) => vec![b],
    })
}

pub fn render_sidecar(blocks: &[MatchBlock]) -> String {
    let mut s = serde_json::to_string_pretty(blocks).expect("sidecar serializes");
    s.push('\n');
    s
}

/// Byte offset of the start of 1-based `line`, and of its end (the newline
/// or end of text).
fn line_bounds(text: &str, line: usize) -> Option<(usize, usize)> {
    let mut start = 0;
    for _ in 1..line {
        start += text[start..].find('\n')? + 1;
    }
    let end = text[start..].find('\n').map_or(text.len(), |e| start + e);
    Some((start, end))
}

/// First occurrence of `needle` at or after `from` that starts on or before
/// `line_end`.
fn find_anchored(text: &str, needle: &str, from: usize, line_end: usize) -> Option<usize> {
    let pos = from + text[from..].find(needle)?;
    (pos <= line_end).then_some(pos)
}

/// Replaces the block's current text at its scope line with the text of
/// `target` (`None` = the match). The scope line is taken in `text`'s own
/// coordinates.
pub fn apply_mr(text: &str, block: &MatchBlock, target: Option<&str>) -> Result<String> {
    let (_, line) = block.scope()?;
    let miss = || Error::ScopeMiss {
        block: block.name.clone(),
        scope: block.scope.clone(),
    };
    let current = block.current().ok_or_else(|| Error::UnknownMutant(block.active.clone().unwrap_or_default()))?;
    let new = block
        .body_for(target)
        .ok_or_else(|| Error::UnknownMutant(target.unwrap_or_default().to_string()))?;
    let (start, end) = line_bounds(text, line).ok_or_else(miss)?;
    let pos = find_anchored(text, current, start, end).ok_or_else(miss)?;
    Ok(format!("{}{}{}", &text[..pos], new, &text[pos + current.len()..]))
}

/// Parses the sidecar against the working sources.
pub fn parse_mr_files(sidecar: &str, sources: &BTreeMap<String, String>) -> Result<Vec<MutationDocument>> {
    let blocks = parse_sidecar(sidecar)?;
    let mut by_path: BTreeMap<String, Vec<(usize, MatchBlock)>> = BTreeMap::new();
    for b in blocks {
        let (path, line) = b.scope()?;
        by_path.entry(path.to_string()).or_default().push((line, b));
    }
    let mut docs = Vec::new();
    for (path, mut blocks) in by_path {
        blocks.sort_by_key(|(line, _)| *line);
        let text = sources.get(&path).ok_or_else(|| Error::ScopeMiss {
            block: blocks[0].1.name.clone(),
            scope: blocks[0].1.scope.clone(),
        })?;
        docs.push(materialize(&path, text, blocks)?);
    }
    Ok(docs)
}

fn materialize(path: &str, text: &str, blocks: Vec<(usize, MatchBlock)>) -> Result<MutationDocument> {
    let mut segments = Vec::new();
    let mut cursor = 0;
    let mut delta: isize = 0;
    for (line, mb) in blocks {
        let working_line = (line as isize + delta) as usize;
        let miss = || Error::ScopeMiss {
            block: mb.name.clone(),
            scope: mb.scope.clone(),
        };
        let (start, end) = line_bounds(text, working_line).ok_or_else(miss)?;
        if cursor > end + 1 {
            return Err(miss());
        }
        let from = start.max(cursor);
        let (needle, pos) = match &mb.active {
            None => {
                let pos = find_anchored(text, &mb.pattern, from, end).ok_or_else(miss)?;
                (mb.pattern.as_str(), pos)
            }
            Some(_) => {
                let ambiguous = || Error::AmbiguousState {
                    block: mb.name.clone(),
                    scope: mb.scope.clone(),
                };
                let current = mb.current().ok_or_else(ambiguous)?;
                let pos = find_anchored(text, current, from, end).ok_or_else(ambiguous)?;
                (current, pos)
            }
        };
        delta += count_newlines(needle) as isize - count_newlines(&mb.pattern) as isize;
        segments.push(Segment::Code(text[cursor..pos].to_string()));
        let variants = mb
            .variants
            .iter()
            .map(|v| Variant {
                name: v.name.clone(),
                tags: v.tags.clone(),
                body: v.replacement.clone(),
            })
            .collect();
        let mut block = MutationBlock::new(mb.name.clone(), mb.pattern.clone(), variants);
        // The default indent is that of the scope line with the block reset.
        let reset_line = format!("{}{}", &text[start..pos], mb.pattern);
        block.indent = mb
            .indent
            .clone()
            .unwrap_or_else(|| leading_whitespace(&reset_line).to_string());
        block.tags = mb.tags.clone();
        block.active = mb.active.clone();
        block.validate().map_err(|e| e.in_block(&mb.name))?;
        segments.push(Segment::Block(block));
        cursor = pos + needle.len();
    }
    segments.push(Segment::Code(text[cursor..].to_string()));
    let doc = MutationDocument::new(path, segments);
    doc.validate()?;
    Ok(doc)
}

pub fn parse_mr(root: &Path) -> Result<Vec<MutationDocument>> {
    let side = root.join(SIDECAR);
    if !side.is_file() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(side.display().to_string(), e))?;
    let mut sources = BTreeMap::new();
    for b in parse_sidecar(&text)? {
        let (path, _) = b.scope()?;
        if !sources.contains_key(path) {
            let p = root.join(path);
            if let Ok(src) = std::fs::read_to_string(&p) {
                sources.insert(path.to_string(), crate::model::normalize_newlines(&src));
            }
        }
    }
    parse_mr_files(&text, &sources)
}

/// Moves whitespace shared by the base and every variant out of each block:
/// common indentation when the block starts a line, and a common trailing
/// newline.
pub fn minimize(doc: &MutationDocument) -> MutationDocument {
    let mut out: Vec<Segment> = Vec::new();
    let mut carry = String::new();
    for seg in &doc.segments {
        let b = match seg {
            Segment::Code(c) => {
                out.push(Segment::Code(std::mem::take(&mut carry) + c));
                continue;
            }
            Segment::Block(b) => b,
        };
        if !carry.is_empty() {
            out.push(Segment::Code(std::mem::take(&mut carry)));
        }
        let starts_line = match out.last() {
            None => true,
            Some(Segment::Code(c)) => c.is_empty() || c.ends_with('\n'),
            Some(Segment::Block(_)) => false,
        };
        let mut b = b.clone();
        let mut lead = 0;
        if starts_line {
            lead = b
                .bodies()
                .map(|s| s.len() - s.trim_start_matches([' ', '\t']).len())
                .min()
                .unwrap_or(0);
            let first = &b.base[..lead];
            if !b.bodies().all(|s| s.starts_with(first)) {
                lead = 0;
            }
        }
        let trail = usize::from(b.bodies().all(|s| s.ends_with('\n')));
        if b.base.len() > lead + trail {
            if lead > 0 {
                out.push(Segment::Code(b.base[..lead].to_string()));
            }
            map_bodies(&mut b, |s| s[lead..s.len() - trail].to_string());
            if trail > 0 {
                carry.push('\n');
            }
        }
        out.push(Segment::Block(b));
    }
    if !carry.is_empty() {
        out.push(Segment::Code(carry));
    }
    MutationDocument::new(doc.path.clone(), out)
}

fn map_bodies(b: &mut MutationBlock, f: impl Fn(&str) -> String) {
    b.base = f(&b.base);
    for v in &mut b.variants {
        v.body = f(&v.body);
    }
}

/// Whether some body would be found by the anchored search inside `prefix`,
/// before its real position.
fn shadowed(prefix: &str, bodies: &[&str], following: &str, complete: bool) -> bool {
    bodies.iter().any(|body| {
        let s = format!("{prefix}{body}{following}");
        prefix.char_indices().any(|(i, _)| {
            if i + body.len() <= s.len() {
                s[i..].starts_with(body)
            } else {
                !complete
            }
        })
    })
}

/// Widens blocks just enough that every base is nonempty and every body is
/// found by the anchored search at its own position.
fn anchored(doc: &MutationDocument) -> Result<MutationDocument> {
    let mut segs = doc.segments.clone();
    for i in 0..segs.len() {
        let Segment::Block(b) = &segs[i] else { continue };
        let name = b.name.clone();
        if b.base.is_empty() {
            let after = match segs.get(i + 1) {
                Some(Segment::Code(c)) if !c.is_empty() => Some(c.find('\n').map_or(c.len(), |p| p + 1)),
                _ => None,
            };
            if let Some(cut) = after {
                let Segment::Code(c) = &mut segs[i + 1] else { unreachable!() };
                let taken: String = c.drain(..cut).collect();
                let Segment::Block(b) = &mut segs[i] else { unreachable!() };
                map_bodies(b, |s| format!("{s}{taken}"));
            } else {
                let Some(Segment::Code(c)) = i.checked_sub(1).map(|p| &mut segs[p]) else {
                    return Err(Error::WrapFailure {
                        block: name,
                        reason: "empty match with no surrounding text to anchor it".into(),
                    });
                };
                if c.is_empty() {
                    return Err(Error::WrapFailure {
                        block: name,
                        reason: "empty match with no surrounding text to anchor it".into(),
                    });
                }
                let body = c.strip_suffix('\n').unwrap_or(c);
                let from = body.rfind('\n').map_or(0, |p| p + 1);
                let taken = c.split_off(from);
                let Segment::Block(b) = &mut segs[i] else { unreachable!() };
                map_bodies(b, |s| format!("{taken}{s}"));
            }
        }

        let prefix = match i.checked_sub(1).map(|p| &segs[p]) {
            Some(Segment::Code(c)) => c.rfind('\n').map_or(c.as_str(), |p| &c[p + 1..]).to_string(),
            _ => String::new(),
        };
        let (following, complete) = match segs.get(i + 1) {
            Some(Segment::Code(c)) => (c.clone(), i + 2 >= segs.len()),
            None => (String::new(), true),
            Some(Segment::Block(_)) => (String::new(), false),
        };
        let Segment::Block(b) = &segs[i] else { unreachable!() };
        if !prefix.is_empty() && shadowed(&prefix, &b.bodies().collect::<Vec<_>>(), &following, complete) {
            let Segment::Code(c) = &mut segs[i - 1] else { unreachable!() };
            c.truncate(c.len() - prefix.len());
            let Segment::Block(b) = &mut segs[i] else { unreachable!() };
            map_bodies(b, |s| format!("{prefix}{s}"));
        }
    }
    Ok(MutationDocument::new(doc.path.clone(), segs))
}

/// Renders documents to a map from relative path to content: the working
/// sources and the sidecar.
pub fn render_mr(docs: &[MutationDocument]) -> Result<BTreeMap<String, String>> {
    let mut files = BTreeMap::new();
    let mut entries = Vec::new();
    for doc in docs {
        let doc = anchored(doc)?;
        files.insert(doc.path.clone(), doc.active_text());
        let reset = doc.reset_text();
        for (b, line) in doc.blocks().zip(doc.base_lines()) {
            let (start, end) = line_bounds(&reset, line).expect("block line exists");
            let default_indent = leading_whitespace(&reset[start..end]);
            entries.push(MatchBlock {
                name: b.name.clone(),
                scope: format!("{}:{line}", doc.path),
                pattern: b.base.clone(),
                variants: b
                    .variants
                    .iter()
                    .map(|v| MatchVariant {
                        name: v.name.clone(),
                        replacement: v.body.clone(),
                        tags: v.tags.clone(),
                    })
                    .collect(),
                tags: b.tags.clone(),
                active: b.active.clone(),
                indent: (b.indent != default_indent).then(|| b.indent.clone()),
            });
        }
    }
    files.insert(SIDECAR.to_string(), render_sidecar(&entries));
    Ok(files)
}
