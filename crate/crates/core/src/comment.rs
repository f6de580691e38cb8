//! Comment-based representation.
//!
//! A block in block-comment style (Rust profile shown):
//!
//! ```text
//! /*| name [tag, ...] */      opening marker
//! base lines                 plain while the base is active
//! /*|| variant [tag] */       variant header
//! /*| one-line body */        inactive body, or
//! /*|
//! several lines
//! */
//! /* |*/                     end marker
//! ```
//!
//! Exactly one region of a block is plain code; every other region is
//! wrapped in a comment. The plain region determines the active variant.
//! Line-comment profiles use `#| name`, `#|| variant`, `# |`, and prefix each
//! inactive line with `#| `.

use crate::error::{Error, Result};
use crate::model::{is_identifier, normalize_newlines, MutationBlock, MutationDocument, Segment, Trivia, Variant};
use crate::profile::{CommentStyle, SyntaxProfile, WrapStyle};

struct Line<'a> {
    number: usize,
    /// Full text including the trailing newline, if any.
    raw: &'a str,
}

impl<'a> Line<'a> {
    fn content(&self) -> &'a str {
        self.raw.strip_suffix('\n').unwrap_or(self.raw)
    }

    fn indent(&self) -> &'a str {
        let c = self.content();
        &c[..c.len() - c.trim_start().len()]
    }

    fn trimmed(&self) -> &'a str {
        self.content().trim_start()
    }

    fn newline(&self) -> &'static str {
        if self.raw.ends_with('\n') {
            "\n"
        } else {
            ""
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Marker<'a> {
    Header(&'a str),
    End,
    /// Starts with `<cb><mm>`; payload is the text after it (and before
    /// `<ce>` when the comment closes on the same line).
    Open { inner: &'a str, closed: bool },
    None,
}

fn classify<'a>(line: &Line<'a>, p: &SyntaxProfile) -> Marker<'a> {
    let t = line.trimmed();
    let open = p.open();
    let header = p.header();
    match p.style {
        CommentStyle::Block => {
            let ce = p.comment_end.as_str();
            if t.trim_end() == p.end_marker() {
                return Marker::End;
            }
            if let Some(rest) = t.strip_prefix(&header) {
                if let Some(inner) = rest.trim_end().strip_suffix(ce) {
                    return Marker::Header(inner);
                }
            }
            if let Some(rest) = t.strip_prefix(&open) {
                if let Some(inner) = rest.strip_suffix(ce) {
                    return Marker::Open { inner, closed: true };
                }
                return Marker::Open {
                    inner: rest,
                    closed: false,
                };
            }
            Marker::None
        }
        CommentStyle::Line => {
            if t.trim_end() == p.end_marker() {
                return Marker::End;
            }
            if let Some(rest) = t.strip_prefix(&header) {
                return Marker::Header(rest);
            }
            if let Some(rest) = t.strip_prefix(&open) {
                return Marker::Open {
                    inner: rest,
                    closed: true,
                };
            }
            Marker::None
        }
    }
}

/// Parses `name [t1, t2]`. Returns `None` for the empty (unnamed) form.
fn parse_name_tags(text: &str) -> std::result::Result<Option<(String, Vec<String>)>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(None);
    }
    let (name, tags) = match text.find('[') {
        Some(open) => {
            let close = text
                .rfind(']')
                .filter(|&c| c > open && text[c + 1..].trim().is_empty())
                .ok_or_else(|| format!("unclosed tag list in `{text}`"))?;
            let tags: Vec<String> = text[open + 1..close]
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            (text[..open].trim(), tags)
        }
        None => (text, Vec::new()),
    };
    if !is_identifier(name) {
        return Err(format!("`{name}` is not a valid name"));
    }
    if let Some(bad) = tags.iter().find(|t| !is_identifier(t)) {
        return Err(format!("`{bad}` is not a valid tag"));
    }
    Ok(Some((name.to_string(), tags)))
}

fn format_name_tags(name: &str, tags: &[String]) -> String {
    if tags.is_empty() {
        name.to_string()
    } else {
        format!("{name} [{}]", tags.join(", "))
    }
}

struct Region<'a> {
    header: Option<(String, Vec<String>)>,
    lines: Vec<Line<'a>>,
}

/// The unwrapped text of a region, or `None` if the region is plain code.
fn unwrap_region(lines: &[Line<'_>], p: &SyntaxProfile) -> Option<String> {
    let first = lines.first()?;
    match p.style {
        CommentStyle::Block => {
            let ce = p.comment_end.as_str();
            let open = p.open();
            if lines.len() == 1 {
                if let Marker::Open { inner, closed: true } = classify(first, p) {
                    if inner.trim().is_empty() {
                        return None;
                    }
                    let inner = inner.strip_prefix(' ').unwrap_or(inner);
                    let inner = inner.strip_suffix(' ').unwrap_or(inner);
                    return Some(format!("{}{}{}", first.indent(), inner, first.newline()));
                }
                return None;
            }
            let last = lines.last()?;
            if first.trimmed().trim_end() == open && last.trimmed().trim_end() == ce {
                let inner = &lines[1..lines.len() - 1];
                Some(inner.iter().map(|l| l.raw).collect())
            } else {
                None
            }
        }
        CommentStyle::Line => {
            let mut out = String::new();
            for line in lines {
                match classify(line, p) {
                    Marker::Open { inner, .. } => {
                        if inner.is_empty() {
                            out.push_str(line.newline());
                        } else {
                            let rest = inner.strip_prefix(' ').unwrap_or(inner);
                            out.push_str(line.indent());
                            out.push_str(rest);
                            out.push_str(line.newline());
                        }
                    }
                    _ => return None,
                }
            }
            Some(out)
        }
    }
}

/// Whether `lines` is exactly one complete wrapped comment (block style).
fn is_complete_wrap(lines: &[Line<'_>], p: &SyntaxProfile) -> bool {
    p.style == CommentStyle::Block && !lines.is_empty() && unwrap_region(lines, p).is_some()
}

fn auto_name(ordinal: usize) -> String {
    format!("m{ordinal}")
}

/// Parses a file in the comment representation.
pub fn parse_comment(path: &str, text: &str, profile: &SyntaxProfile) -> Result<MutationDocument> {
    let text = normalize_newlines(text);
    let lines: Vec<Line<'_>> = text
        .split_inclusive('\n')
        .enumerate()
        .map(|(i, raw)| Line { number: i + 1, raw })
        .collect();

    let mut segments = Vec::new();
    let mut code = String::new();
    let mut i = 0;
    let mut ordinal = 0;
    while i < lines.len() {
        let line = &lines[i];
        match classify(line, profile) {
            Marker::None => {
                code.push_str(line.raw);
                i += 1;
            }
            Marker::Header(_) => {
                return Err(Error::parse(path, line.number, "variant header outside a block"));
            }
            Marker::End => {
                return Err(Error::parse(path, line.number, "end marker outside a block"));
            }
            Marker::Open { inner, closed } => {
                if !closed {
                    return Err(Error::parse(path, line.number, "wrapped region outside a block"));
                }
                let opener = parse_name_tags(inner).map_err(|m| Error::parse(path, line.number, m))?;
                if opener.is_none() && profile.style == CommentStyle::Line {
                    return Err(Error::parse(path, line.number, "opening marker without a name"));
                }
                segments.push(Segment::Code(std::mem::take(&mut code)));
                let (block, next) = parse_block(path, &lines, i, opener, ordinal, profile)?;
                segments.push(Segment::Block(block));
                ordinal += 1;
                i = next;
            }
        }
    }
    segments.push(Segment::Code(code));
    let doc = MutationDocument::new(path, segments);
    doc.validate()?;
    Ok(doc)
}

/// Parses one block whose opening marker is `lines[start]`; returns the
/// block and the index of the first line after it.
fn parse_block(
    path: &str,
    lines: &[Line<'_>],
    start: usize,
    opener: Option<(String, Vec<String>)>,
    ordinal: usize,
    profile: &SyntaxProfile,
) -> Result<(MutationBlock, usize)> {
    let open_line = &lines[start];
    let mut regions: Vec<Region<'_>> = vec![Region {
        header: None,
        lines: Vec::new(),
    }];
    let mut i = start + 1;
    let mut terminated = true;
    loop {
        let current = regions.last().expect("at least the base region");
        let in_variant = current.header.is_some();
        let complete_wrap = in_variant && is_complete_wrap(&current.lines, profile);
        let Some(line) = lines.get(i) else {
            if complete_wrap {
                terminated = false;
                break;
            }
            return Err(Error::parse(path, open_line.number, "block is missing its end marker"));
        };
        match classify(line, profile) {
            Marker::End => {
                i += 1;
                break;
            }
            Marker::Header(inner) => {
                let header = parse_name_tags(inner)
                    .map_err(|m| Error::parse(path, line.number, m))?
                    .ok_or_else(|| Error::parse(path, line.number, "variant header without a name"))?;
                regions.push(Region {
                    header: Some(header),
                    lines: Vec::new(),
                });
            }
            _ if complete_wrap => {
                // Legacy block without an end marker: it ends right after the
                // last variant's wrapped body.
                terminated = false;
                break;
            }
            _ => {
                regions.last_mut().unwrap().lines.push(Line {
                    number: line.number,
                    raw: line.raw,
                });
            }
        }
        i += 1;
    }

    if regions.len() < 2 {
        return Err(Error::parse(path, open_line.number, "block has no variants"));
    }

    let mut plain = Vec::new();
    let mut texts = Vec::with_capacity(regions.len());
    for (k, region) in regions.iter().enumerate() {
        match unwrap_region(&region.lines, profile) {
            Some(text) => texts.push(text),
            None => {
                plain.push(k);
                texts.push(region.lines.iter().map(|l| l.raw).collect());
            }
        }
    }
    if plain.len() != 1 {
        return Err(Error::parse(
            path,
            open_line.number,
            format!("block must have exactly one plain region, found {}", plain.len()),
        ));
    }

    let named = opener.is_some();
    let (name, tags) = opener.unwrap_or_else(|| (auto_name(ordinal), Vec::new()));
    let mut texts = texts.into_iter();
    let base = texts.next().unwrap();
    let variants: Vec<Variant> = regions
        .into_iter()
        .skip(1)
        .zip(texts)
        .map(|(region, body)| {
            let (name, tags) = region.header.unwrap();
            Variant { name, tags, body }
        })
        .collect();
    let active = match plain[0] {
        0 => None,
        k => Some(variants[k - 1].name.clone()),
    };
    let block = MutationBlock {
        name,
        tags,
        indent: open_line.indent().to_string(),
        base,
        variants,
        active,
        trivia: Trivia { named, terminated },
    };
    Ok((block, i))
}

/// Renders a document in the comment representation.
pub fn render_comment(doc: &MutationDocument, profile: &SyntaxProfile) -> Result<String> {
    Ok(render_with_anchors(doc, profile)?.0)
}

/// Renders and reports the 1-based line of each block's opening marker.
pub fn render_with_anchors(doc: &MutationDocument, profile: &SyntaxProfile) -> Result<(String, Vec<usize>)> {
    let aligned;
    let doc = if doc.is_line_aligned() {
        doc
    } else {
        aligned = doc.line_aligned()?;
        &aligned
    };
    let mut out = String::new();
    let mut anchors = Vec::new();
    let mut ordinal = 0;
    for seg in &doc.segments {
        match seg {
            Segment::Code(text) => out.push_str(text),
            Segment::Block(block) => {
                if !out.is_empty() && !out.ends_with('\n') {
                    out.push('\n');
                }
                anchors.push(crate::model::count_newlines(&out) + 1);
                render_block(&mut out, block, ordinal, profile)?;
                ordinal += 1;
            }
        }
    }
    Ok((out, anchors))
}

fn render_block(out: &mut String, b: &MutationBlock, ordinal: usize, p: &SyntaxProfile) -> Result<()> {
    let indent = &b.indent;
    let close = match p.style {
        CommentStyle::Block => format!(" {}", p.comment_end),
        CommentStyle::Line => String::new(),
    };
    if !b.trivia.named && b.name == auto_name(ordinal) && b.tags.is_empty() && p.style == CommentStyle::Block {
        out.push_str(&format!("{indent}{}{close}\n", p.open()));
    } else {
        out.push_str(&format!("{indent}{} {}{close}\n", p.open(), format_name_tags(&b.name, &b.tags)));
    }
    render_region(out, &b.base, b.active.is_none(), b, p)?;
    for v in &b.variants {
        out.push_str(&format!("{indent}{} {}{close}\n", p.header(), format_name_tags(&v.name, &v.tags)));
        render_region(out, &v.body, b.active.as_deref() == Some(&v.name), b, p)?;
    }
    if b.trivia.terminated || b.active.is_some() {
        out.push_str(&format!("{indent}{}\n", p.end_marker()));
    }
    Ok(())
}

fn render_region(out: &mut String, text: &str, plain: bool, b: &MutationBlock, p: &SyntaxProfile) -> Result<()> {
    let with_newline = |s: &str| {
        if s.is_empty() || s.ends_with('\n') {
            s.to_string()
        } else {
            format!("{s}\n")
        }
    };
    if plain {
        out.push_str(&with_newline(text));
        return Ok(());
    }
    let text = with_newline(text);
    out.push_str(&wrap_region(&text, b, p)?);
    Ok(())
}

fn wrap_region(text: &str, b: &MutationBlock, p: &SyntaxProfile) -> Result<String> {
    let indent = b.indent.as_str();
    let fail = |reason: String| Error::WrapFailure {
        block: b.name.clone(),
        reason,
    };
    match p.style {
        CommentStyle::Block => {
            let ce = p.comment_end.as_str();
            if text.contains(ce) {
                return Err(fail(format!("region contains the closing delimiter `{ce}`")));
            }
            let single = text.strip_suffix('\n').filter(|l| !l.contains('\n'));
            if let (WrapStyle::Inline, Some(line)) = (p.wrap, single) {
                if let Some(rest) = line.strip_prefix(indent) {
                    if !rest.trim().is_empty() {
                        return Ok(format!("{indent}{} {rest} {ce}\n", p.open()));
                    }
                }
            }
            Ok(format!("{indent}{}\n{text}{indent}{ce}\n", p.open()))
        }
        CommentStyle::Line => {
            if text.is_empty() {
                return Err(fail("an empty region cannot be wrapped in line comments".into()));
            }
            let mut out = String::new();
            for line in text.split_inclusive('\n') {
                let content = line.strip_suffix('\n').unwrap_or(line);
                if content.is_empty() {
                    out.push_str(&format!("{indent}{}\n", p.open()));
                } else if let Some(rest) = content.strip_prefix(indent) {
                    out.push_str(&format!("{indent}{} {rest}\n", p.open()));
                } else {
                    return Err(fail(format!("line `{content}` is indented less than the block markers")));
                }
            }
            Ok(out)
        }
    }
}
