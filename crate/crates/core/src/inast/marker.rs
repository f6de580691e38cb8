//! Rendering and extraction of the dispatch construct.
//!
//! A block that can occupy whole lines is written in line form: the
//! construct starts its own line at the block's indentation and ends with a
//! newline. Any other block is written inline, starting where the block
//! starts. Arms are indented two spaces past the construct and bodies four,
//! so a body line `L` appears as `    L` (line form) or `<indent>    L`
//! (inline form, where `<indent>` is the indentation of the line holding
//! `match`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lex::{find_ident, matching_brace, skip_ws, string_literal};
use super::oracle::ParseOracle;
use crate::error::{Error, Result};
use crate::model::{count_newlines, derive_block_name, leading_whitespace, MutationBlock, MutationDocument, Segment, Variant};

pub const GUARD: &str = "mutation_active";
const BODY_PAD: &str = "    ";

/// Block names and tags, which the construct has no room for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMeta {
    pub block: String,
    pub file: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    pub variants: Vec<VariantMeta>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantMeta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

pub fn block_meta(doc: &MutationDocument) -> Vec<BlockMeta> {
    doc.blocks()
        .map(|b| BlockMeta {
            block: b.name.clone(),
            file: doc.path.clone(),
            tags: b.tags.clone(),
            variants: b
                .variants
                .iter()
                .map(|v| VariantMeta {
                    name: v.name.clone(),
                    tags: v.tags.clone(),
                })
                .collect(),
        })
        .collect()
}

/// Moves whitespace before a block and a newline after it into the block
/// wherever that lets the block be written in line form.
pub(crate) fn canonical(doc: &MutationDocument) -> MutationDocument {
    let mut segs = doc.segments.clone();
    for i in 0..segs.len() {
        if !matches!(segs[i], Segment::Block(_)) {
            continue;
        }
        let prefix_len = match i.checked_sub(1).map(|p| &segs[p]) {
            None => Some(0),
            Some(Segment::Code(c)) => match c.rfind('\n') {
                Some(nl) => Some(c.len() - nl - 1),
                None if i == 1 => Some(c.len()),
                None => None,
            },
            Some(Segment::Block(_)) => None,
        };
        let Some(prefix_len) = prefix_len else { continue };
        let prefix = match i.checked_sub(1).map(|p| &segs[p]) {
            Some(Segment::Code(c)) => c[c.len() - prefix_len..].to_string(),
            _ => String::new(),
        };
        if !prefix.chars().all(|c| c == ' ' || c == '\t') {
            continue;
        }
        let Segment::Block(b) = &segs[i] else { unreachable!() };
        let terminated = b.bodies().all(|s| s.is_empty() || s.ends_with('\n'));
        let newline_follows = matches!(segs.get(i + 1), Some(Segment::Code(c)) if c.starts_with('\n'));
        if !terminated && !newline_follows {
            continue;
        }
        let suffix = if terminated { "" } else { "\n" };
        let f = |s: &str| format!("{prefix}{s}{suffix}");
        if !b.bodies().all(|s| f(s).ends_with('\n')) {
            continue;
        }
        if let Some(Segment::Code(c)) = i.checked_sub(1).map(|p| &mut segs[p]) {
            c.truncate(c.len() - prefix_len);
        }
        if !terminated {
            if let Some(Segment::Code(c)) = segs.get_mut(i + 1) {
                c.remove(0);
            }
        }
        let Segment::Block(b) = &mut segs[i] else { unreachable!() };
        b.base = f(&b.base);
        for v in &mut b.variants {
            v.body = f(&v.body);
        }
    }
    MutationDocument::new(doc.path.clone(), segs)
}

fn push_body(out: &mut String, body: &str, pad: &str) {
    for line in body.split_inclusive('\n') {
        if line != "\n" {
            out.push_str(pad);
        }
        out.push_str(line);
    }
}

/// Renders a document with every block as a dispatch construct. The result
/// does not depend on which variants are active.
pub fn render_inast(doc: &MutationDocument, oracle: &dyn ParseOracle) -> Result<String> {
    render_inast_with_anchors(doc, oracle).map(|(text, _)| text)
}

/// Like [`render_inast`], also returning the line on which each construct
/// starts.
pub fn render_inast_with_anchors(doc: &MutationDocument, oracle: &dyn ParseOracle) -> Result<(String, Vec<usize>)> {
    let doc = canonical(doc);
    let mut out = String::new();
    let mut anchors = Vec::new();
    for seg in &doc.segments {
        let b = match seg {
            Segment::Code(c) => {
                out.push_str(c);
                continue;
            }
            Segment::Block(b) => b,
        };
        let bodies: Vec<&str> = b.bodies().collect();
        if oracle.common_unit(&bodies).is_none() {
            return Err(Error::NotNormalized {
                block: b.name.clone(),
                reason: "base and variants do not share a syntactic category".into(),
            });
        }
        let line_start = out.rfind('\n').map_or(0, |p| p + 1);
        let line_form = line_start == out.len() && b.bodies().all(|s| s.is_empty() || s.ends_with('\n'));
        let indent = leading_whitespace(&out[line_start..]).to_string();
        anchors.push(count_newlines(&out) + 1);
        render_block(&mut out, b, line_form, &indent);
    }
    Ok((out, anchors))
}

fn render_block(out: &mut String, b: &MutationBlock, line_form: bool, line_indent: &str) {
    let (ind, pad) = if line_form {
        (b.indent.clone(), BODY_PAD.to_string())
    } else {
        (line_indent.to_string(), format!("{line_indent}{BODY_PAD}"))
    };
    let body = |s: &str| -> String {
        if line_form || s.is_empty() {
            s.to_string()
        } else {
            format!("{s}\n")
        }
    };
    if line_form {
        out.push_str(&ind);
    }
    out.push_str("match () {\n");
    for v in &b.variants {
        out.push_str(&format!("{ind}  _ if {GUARD}(\"{}\") => {{\n", v.name));
        push_body(out, &body(&v.body), &pad);
        out.push_str(&format!("{ind}  }}\n"));
    }
    out.push_str(&format!("{ind}  _ => {{ // base\n"));
    push_body(out, &body(&b.base), &pad);
    out.push_str(&format!("{ind}  }}\n{ind}}}"));
    if line_form {
        out.push('\n');
    }
}

/// Renders one block alone in place of `text[start..end]`.
pub(crate) fn splice_marker(text: &str, start: usize, end: usize, b: &MutationBlock) -> String {
    let mut out = text[..start].to_string();
    render_block(&mut out, b, false, "");
    out.push_str(&text[end..]);
    out
}

struct Arm {
    name: Option<String>,
    body: (usize, usize),
}

fn line_of(text: &str, pos: usize) -> usize {
    text[..pos].matches('\n').count() + 1
}

/// Extracts every dispatch construct in `text` as a block. Names and tags
/// come from `meta` when an entry lists the same variants; otherwise the
/// name is derived from the variant names.
pub fn extract_inast(path: &str, text: &str, oracle: &dyn ParseOracle, meta: &[BlockMeta]) -> Result<MutationDocument> {
    if !oracle.parse_file(text) {
        return Err(Error::parse(path, 0, "file does not parse"));
    }
    let malformed = |pos: usize, message: &str| Error::MalformedMarker {
        path: path.to_string(),
        line: line_of(text, pos),
        message: message.to_string(),
    };
    let mut segments = Vec::new();
    let mut cursor = 0;
    let mut ordinal = 0;
    for m in find_ident(text, "match") {
        if m < cursor {
            continue;
        }
        let Some(open) = after_tokens(text, m + "match".len(), &["(", ")", "{"]) else { continue };
        let open = open - 1;
        let first = skip_ws(text, open + 1);
        let Some(guard) = after_tokens(text, first, &["_", "if"]) else { continue };
        let guard = skip_ws(text, guard);
        if !text[guard..].starts_with(GUARD) {
            continue;
        }
        let close = matching_brace(text, open).ok_or_else(|| malformed(m, "unbalanced braces"))?;

        let mut arms = Vec::new();
        let mut i = first;
        loop {
            i = skip_ws(text, i);
            if i >= close {
                return Err(malformed(m, "missing default arm"));
            }
            let arm_at = i;
            let Some(next) = after_tokens(text, i, &["_"]) else {
                return Err(malformed(arm_at, "expected `_` arm"));
            };
            let name = if let Some(g) = after_tokens(text, next, &["if"]) {
                let g = skip_ws(text, g);
                let lit = after_tokens(text, g, &[GUARD, "("])
                    .and_then(|p| string_literal(text, skip_ws(text, p)))
                    .ok_or_else(|| malformed(arm_at, "guard is not `mutation_active` with a string literal"))?;
                i = after_tokens(text, lit.1, &[")", "=>"]).ok_or_else(|| malformed(arm_at, "expected `) =>`"))?;
                Some(lit.0)
            } else {
                i = after_tokens(text, next, &["=>"]).ok_or_else(|| malformed(arm_at, "expected `=>`"))?;
                None
            };
            let bo = skip_ws(text, i);
            if text.as_bytes().get(bo) != Some(&b'{') {
                return Err(malformed(arm_at, "arm body must be a block"));
            }
            let bc = matching_brace(text, bo).ok_or_else(|| malformed(arm_at, "unbalanced arm body"))?;
            let default = name.is_none();
            arms.push(Arm { name, body: (bo, bc) });
            i = bc + 1;
            i = skip_ws(text, i);
            if text.as_bytes().get(i) == Some(&b',') {
                i += 1;
            }
            if default {
                if skip_ws(text, i) != close {
                    return Err(malformed(arm_at, "default arm must be the last arm"));
                }
                break;
            }
        }

        let line_start = text[..m].rfind('\n').map_or(0, |p| p + 1);
        let line_indent = leading_whitespace(&text[line_start..]).to_string();
        let line_form = text[line_start..m].chars().all(|c| c == ' ' || c == '\t')
            && text.as_bytes().get(close + 1) == Some(&b'\n');
        let (start, end) = if line_form { (line_start, close + 2) } else { (m, close + 1) };
        let pad = if line_form { BODY_PAD.to_string() } else { format!("{line_indent}{BODY_PAD}") };
        let body_of = |arm: &Arm| arm_body(text, arm.body, &pad, line_form);

        let (base_arm, variant_arms) = arms.split_last().expect("default arm present");
        let mut variants: Vec<Variant> = variant_arms
            .iter()
            .map(|a| Variant::new(a.name.clone().unwrap_or_default(), body_of(a)))
            .collect();
        let names: Vec<&str> = variants.iter().map(|v| v.name.as_str()).collect();
        let entry = meta
            .iter()
            .find(|e| e.file == path && e.variants.iter().map(|v| v.name.as_str()).eq(names.iter().copied()));
        let name = match entry {
            Some(e) => e.block.clone(),
            None => derive_block_name(names.iter().copied(), &format!("m{ordinal}")),
        };
        if let Some(e) = entry {
            for (v, vm) in variants.iter_mut().zip(&e.variants) {
                v.tags = vm.tags.clone();
            }
        }
        let mut block = MutationBlock::new(name, body_of(base_arm), variants);
        block.indent = line_indent;
        if let Some(e) = entry {
            block.tags = e.tags.clone();
        }
        segments.push(Segment::Code(text[cursor..start].to_string()));
        segments.push(Segment::Block(block));
        cursor = end;
        ordinal += 1;
    }
    segments.push(Segment::Code(text[cursor..].to_string()));
    let doc = MutationDocument::new(path, segments);
    doc.validate()?;
    Ok(doc)
}

/// Skips whitespace, then each token in turn; returns the offset after the
/// last one.
fn after_tokens(text: &str, mut i: usize, tokens: &[&str]) -> Option<usize> {
    for tok in tokens {
        i = skip_ws(text, i);
        if !text[i..].starts_with(tok) {
            return None;
        }
        let end = i + tok.len();
        let word = tok.bytes().all(super::lex::is_ident_byte);
        if word && text.as_bytes().get(end).is_some_and(|&c| super::lex::is_ident_byte(c)) {
            return None;
        }
        i = end;
    }
    Some(i)
}

fn arm_body(text: &str, (bo, bc): (usize, usize), pad: &str, line_form: bool) -> String {
    let inner = &text[bo + 1..bc];
    let first_nl = inner.find('\n');
    let last_nl = inner.rfind('\n');
    let laid_out = match (first_nl, last_nl) {
        (Some(f), Some(l)) => {
            let head = inner[..f].trim();
            (head.is_empty() || head.starts_with("//")) && inner[l + 1..].trim().is_empty()
        }
        _ => false,
    };
    if !laid_out {
        let t = inner.trim();
        return if line_form && !t.is_empty() { format!("{t}\n") } else { t.to_string() };
    }
    let region = &inner[first_nl.unwrap() + 1..last_nl.unwrap() + 1];
    let mut body = String::new();
    for line in region.split_inclusive('\n') {
        if let Some(rest) = line.strip_prefix(pad) {
            body.push_str(rest);
        } else if line.trim().is_empty() {
            body.push('\n');
        } else {
            body.push_str(line.trim_start());
        }
    }
    if !line_form && body.ends_with('\n') {
        body.pop();
    }
    body
}

/// Files of an in-AST project: rendered sources, the runtime helper and the
/// metadata sidecar.
pub fn render_inast_files(docs: &[MutationDocument], oracle: &dyn ParseOracle) -> Result<BTreeMap<String, String>> {
    let mut files = BTreeMap::new();
    let mut meta = Vec::new();
    for doc in docs {
        files.insert(doc.path.clone(), render_inast(doc, oracle)?);
        meta.extend(block_meta(doc));
    }
    files.insert(HELPER_FILE.to_string(), HELPER_SOURCE.to_string());
    let mut json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    json.push('\n');
    files.insert(META_FILE.to_string(), json);
    Ok(files)
}

pub const HELPER_FILE: &str = "mutforge_runtime.rs";
pub const HELPER_SOURCE: &str = include_str!("runtime.rs");
pub const META_FILE: &str = "mutforge-inast.json";

pub fn parse_meta(text: &str) -> Result<Vec<BlockMeta>> {
    serde_json::from_str(text).map_err(|e| Error::parse(META_FILE, e.line(), e.to_string()))
}
