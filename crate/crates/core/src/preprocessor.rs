//! C-preprocessor conditional representation.
//!
//! ```text
//! #if defined(M_INSERT_1) /* variation=insert tags=[t] mutant_tags=[easy] */
//! ...variant insert_1
//! #elif defined(M_INSERT_2) /* mutant_tags=[hard] */
//! ...variant insert_2
//! #else
//! ...base
//! #endif
//! ```
//!
//! Sources never change on activation; the active set lives in the project
//! state and reaches the build as `-DM_<NAME>` flags.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{is_identifier, normalize_newlines, MutationBlock, MutationDocument, Segment, Variant};

/// Flag guarding a variant: `M_` followed by the upper-cased name.
pub fn flag_for(variant: &str) -> String {
    format!("M_{}", variant.to_ascii_uppercase())
}

fn name_from_flag(flag: &str) -> Option<String> {
    let rest = flag.strip_prefix("M_")?;
    let valid = !rest.is_empty()
        && rest
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_');
    valid.then(|| rest.to_ascii_lowercase()).filter(|n| is_identifier(n))
}

/// Sorted define flags for a set of active variant names.
pub fn emit_defines<'a>(active: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut flags: Vec<String> = active.into_iter().map(flag_for).collect();
    flags.sort();
    flags.dedup();
    flags
}

#[derive(Debug, PartialEq, Eq)]
enum Directive<'a> {
    If(&'a str),
    Elif(&'a str),
    Else,
    Endif,
    /// `#ifdef`, `#ifndef`: only matter for nesting.
    OtherIf,
    Other,
}

fn directive(line: &str) -> Option<Directive<'_>> {
    let t = line.trim_start().strip_prefix('#')?.trim_start();
    let word_end = t
        .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .unwrap_or(t.len());
    let (word, rest) = t.split_at(word_end);
    let rest = rest.trim();
    Some(match word {
        "if" => Directive::If(rest),
        "elif" => Directive::Elif(rest),
        "else" => Directive::Else,
        "endif" => Directive::Endif,
        "ifdef" | "ifndef" => Directive::OtherIf,
        _ => Directive::Other,
    })
}

#[derive(Debug, Default)]
struct Trailer {
    variation: Option<String>,
    tags: Vec<String>,
    mutant_tags: Vec<String>,
}

/// Splits `defined(M_X) /* ... */` into the flag and the trailer fields.
fn split_condition(cond: &str) -> std::result::Result<(Option<&str>, Option<Trailer>), String> {
    let (expr, comment) = match cond.find("/*") {
        Some(at) => {
            let comment = cond[at + 2..]
                .trim_end()
                .strip_suffix("*/")
                .ok_or("unterminated trailer comment")?;
            (cond[..at].trim(), Some(comment.trim()))
        }
        None => (cond.trim(), None),
    };
    let flag = expr
        .strip_prefix("defined(")
        .and_then(|s| s.strip_suffix(')'))
        .map(str::trim);
    let trailer = match comment {
        Some(c) => Some(parse_trailer(c)?),
        None => None,
    };
    Ok((flag, trailer))
}

fn parse_trailer(text: &str) -> std::result::Result<Trailer, String> {
    let mut trailer = Trailer::default();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| format!("expected `key=value` in `{rest}`"))?;
        let key = rest[..eq].trim();
        let after = rest[eq + 1..].trim_start();
        let (value, tail) = if let Some(list) = after.strip_prefix('[') {
            let close = list.find(']').ok_or("unclosed tag list")?;
            (&list[..close], &list[close + 1..])
        } else {
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        let list = || -> std::result::Result<Vec<String>, String> {
            let tags: Vec<String> = value
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            match tags.iter().find(|t| !is_identifier(t)) {
                Some(bad) => Err(format!("`{bad}` is not a valid tag")),
                None => Ok(tags),
            }
        };
        match key {
            "variation" => {
                if !is_identifier(value) {
                    return Err(format!("`{value}` is not a valid mutation name"));
                }
                trailer.variation = Some(value.to_string());
            }
            "tags" => trailer.tags = list()?,
            "mutant_tags" => trailer.mutant_tags = list()?,
            other => return Err(format!("unknown trailer key `{other}`")),
        }
        rest = tail.trim_start();
    }
    Ok(trailer)
}

/// Parses a file in the preprocessor representation. `active` is left
/// unset: it comes from the project state, never from the text.
pub fn parse_preprocessor(path: &str, text: &str) -> Result<MutationDocument> {
    let text = normalize_newlines(text);
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    let mut segments = Vec::new();
    let mut code = String::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if let Some(Directive::If(cond)) = directive(line) {
            let (flag, trailer) = split_condition(cond).map_err(|m| Error::parse(path, i + 1, m))?;
            if let Some(trailer) = trailer.filter(|t| t.variation.is_some()) {
                let flag = flag.ok_or_else(|| {
                    Error::parse(path, i + 1, "mutation conditional must test `defined(M_<NAME>)`")
                })?;
                segments.push(Segment::Code(std::mem::take(&mut code)));
                let (block, next) = parse_block(path, &lines, i, flag, trailer)?;
                segments.push(Segment::Block(block));
                i = next;
                continue;
            }
        }
        code.push_str(line);
        i += 1;
    }
    segments.push(Segment::Code(code));
    let doc = MutationDocument::new(path, segments);
    doc.validate()?;
    Ok(doc)
}

fn parse_block(
    path: &str,
    lines: &[&str],
    start: usize,
    first_flag: &str,
    trailer: Trailer,
) -> Result<(MutationBlock, usize)> {
    let err = |line: usize, msg: &str| Error::parse(path, line + 1, msg);
    let flag_name = |line: usize, flag: &str| {
        name_from_flag(flag).ok_or_else(|| {
            err(line, &format!("flag `{flag}` does not have the form M_<NAME>"))
        })
    };
    let indent = {
        let l = lines[start];
        l[..l.len() - l.trim_start().len()].to_string()
    };
    let mut variants = vec![Variant {
        name: flag_name(start, first_flag)?,
        tags: trailer.mutant_tags,
        body: String::new(),
    }];
    let mut base: Option<String> = None;
    let mut depth = 0usize;
    let mut i = start + 1;
    loop {
        let Some(line) = lines.get(i) else {
            return Err(err(start, "unbalanced directives: missing #endif"));
        };
        let dir = directive(line);
        match dir {
            Some(Directive::If(cond)) if depth == 0 => {
                if let Ok((_, Some(t))) = split_condition(cond) {
                    if t.variation.is_some() {
                        return Err(err(i, "mutation conditionals cannot be nested"));
                    }
                }
                depth += 1;
            }
            Some(Directive::If(_)) | Some(Directive::OtherIf) => depth += 1,
            Some(Directive::Endif) if depth > 0 => depth -= 1,
            Some(Directive::Elif(cond)) if depth == 0 => {
                if base.is_some() {
                    return Err(err(i, "#elif after #else"));
                }
                let (flag, t) = split_condition(cond).map_err(|m| err(i, &m))?;
                let flag = flag.ok_or_else(|| err(i, "mutation branch must test `defined(M_<NAME>)`"))?;
                let t = t.unwrap_or_default();
                if t.variation.is_some() {
                    return Err(err(i, "variation trailer belongs on the #if line"));
                }
                variants.push(Variant {
                    name: flag_name(i, flag)?,
                    tags: t.mutant_tags,
                    body: String::new(),
                });
                i += 1;
                continue;
            }
            Some(Directive::Else) if depth == 0 => {
                if base.is_some() {
                    return Err(err(i, "duplicate #else"));
                }
                base = Some(String::new());
                i += 1;
                continue;
            }
            Some(Directive::Endif) => {
                let base = base.ok_or_else(|| err(start, "mutation conditional is missing #else"))?;
                let block = MutationBlock {
                    name: trailer.variation.expect("checked by caller"),
                    tags: trailer.tags,
                    indent,
                    base,
                    variants,
                    active: None,
                    trivia: Default::default(),
                };
                return Ok((block, i + 1));
            }
            _ => {}
        }
        match base.as_mut() {
            Some(b) => b.push_str(line),
            None => variants.last_mut().unwrap().body.push_str(line),
        }
        i += 1;
    }
}

/// Renders a document; output does not depend on which variant is active.
pub fn render_preprocessor(doc: &MutationDocument) -> Result<String> {
    Ok(render_with_anchors(doc)?.0)
}

pub fn render_with_anchors(doc: &MutationDocument) -> Result<(String, Vec<usize>)> {
    check_flags(doc.blocks())?;
    let aligned;
    let doc = if doc.is_line_aligned() {
        doc
    } else {
        aligned = doc.line_aligned()?;
        &aligned
    };
    let mut out = String::new();
    let mut anchors = Vec::new();
    for seg in &doc.segments {
        match seg {
            Segment::Code(text) => out.push_str(text),
            Segment::Block(b) => {
                if !out.is_empty() && !out.ends_with('\n') {
                    out.push('\n');
                }
                anchors.push(crate::model::count_newlines(&out) + 1);
                render_block(&mut out, b);
            }
        }
    }
    Ok((out, anchors))
}

fn tag_field(key: &str, tags: &[String]) -> String {
    if tags.is_empty() {
        String::new()
    } else {
        format!(" {key}=[{}]", tags.join(", "))
    }
}

fn render_block(out: &mut String, b: &MutationBlock) {
    let indent = &b.indent;
    let push_body = |out: &mut String, body: &str| {
        out.push_str(body);
        if !body.is_empty() && !body.ends_with('\n') {
            out.push('\n');
        }
    };
    for (k, v) in b.variants.iter().enumerate() {
        let flag = flag_for(&v.name);
        if k == 0 {
            out.push_str(&format!(
                "{indent}#if defined({flag}) /* variation={}{}{} */\n",
                b.name,
                tag_field("tags", &b.tags),
                tag_field("mutant_tags", &v.tags)
            ));
        } else if v.tags.is_empty() {
            out.push_str(&format!("{indent}#elif defined({flag})\n"));
        } else {
            out.push_str(&format!(
                "{indent}#elif defined({flag}) /*{} */\n",
                tag_field("mutant_tags", &v.tags)
            ));
        }
        push_body(out, &v.body);
    }
    out.push_str(&format!("{indent}#else\n"));
    push_body(out, &b.base);
    out.push_str(&format!("{indent}#endif\n"));
}

/// Every variant must map to a distinct flag that maps back to its name.
pub fn check_flags<'a>(blocks: impl IntoIterator<Item = &'a MutationBlock>) -> Result<()> {
    let mut seen: BTreeMap<String, &str> = BTreeMap::new();
    for b in blocks {
        for v in &b.variants {
            let flag = flag_for(&v.name);
            if name_from_flag(&flag).as_deref() != Some(v.name.as_str()) {
                return Err(Error::FlagCollision {
                    first: v.name.clone(),
                    second: v.name.to_ascii_lowercase(),
                    flag,
                });
            }
            if let Some(prev) = seen.insert(flag.clone(), &v.name) {
                return Err(Error::FlagCollision {
                    first: prev.to_string(),
                    second: v.name.clone(),
                    flag,
                });
            }
        }
    }
    Ok(())
}
