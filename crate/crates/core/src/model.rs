//! The representation-independent document model.
//!
//! Every backend parses into and renders from [`MutationDocument`]: a file
//! seen as an ordered interleaving of plain code and mutation blocks. Texts
//! are stored verbatim, with LF line endings.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// One alternative body of a mutation block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub name: String,
    pub tags: Vec<String>,
    pub body: String,
}

impl Variant {
    pub fn new(name: impl Into<String>, body: impl Into<String>) -> Self {
        Variant {
            name: name.into(),
            tags: Vec::new(),
            body: body.into(),
        }
    }

    pub fn with_tags(mut self, tags: &[&str]) -> Self {
        self.tags = tags.iter().map(|t| t.to_string()).collect();
        self
    }
}

/// Presentation details of the comment syntax that carry no meaning.
///
/// Two blocks differing only in trivia are equal.
#[derive(Debug, Clone, Copy)]
pub struct Trivia {
    /// The opening marker spells out the block name. Legacy unnamed markers
    /// (`{-! -}`) clear this and get an auto-generated name.
    pub named: bool,
    /// The block is closed by an end marker. Legacy blocks without one are
    /// upgraded as soon as any variant is activated.
    pub terminated: bool,
}

impl Default for Trivia {
    fn default() -> Self {
        Trivia {
            named: true,
            terminated: true,
        }
    }
}

impl PartialEq for Trivia {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Trivia {}

/// A named mutation: a base region plus mutually exclusive variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationBlock {
    pub name: String,
    pub tags: Vec<String>,
    /// Indentation of the marker lines surrounding the block.
    pub indent: String,
    pub base: String,
    pub variants: Vec<Variant>,
    pub active: Option<String>,
    pub trivia: Trivia,
}

impl MutationBlock {
    pub fn new(name: impl Into<String>, base: impl Into<String>, variants: Vec<Variant>) -> Self {
        let base = base.into();
        let indent = leading_whitespace(&base).to_string();
        MutationBlock {
            name: name.into(),
            tags: Vec::new(),
            indent,
            base,
            variants,
            active: None,
            trivia: Trivia::default(),
        }
    }

    pub fn variant(&self, name: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.name == name)
    }

    /// Text of the region for the given selection; `None` selects the base.
    pub fn body_for(&self, selected: Option<&str>) -> &str {
        match selected.and_then(|name| self.variant(name)) {
            Some(v) => &v.body,
            None => &self.base,
        }
    }

    pub fn active_body(&self) -> &str {
        self.body_for(self.active.as_deref())
    }

    /// Base followed by every variant body.
    pub fn bodies(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.base.as_str()).chain(self.variants.iter().map(|v| v.body.as_str()))
    }

    /// Tags of a variant including the tags inherited from its block.
    pub fn effective_tags<'a>(&'a self, variant: &'a Variant) -> impl Iterator<Item = &'a str> {
        variant
            .tags
            .iter()
            .chain(self.tags.iter().filter(move |t| !variant.tags.contains(t)))
            .map(String::as_str)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_identifier(&self.name) {
            return Err(Error::parse("", 0, format!("invalid block name `{}`", self.name)));
        }
        if self.variants.is_empty() {
            return Err(Error::parse("", 0, format!("block `{}` has no variants", self.name)));
        }
        check_tags(&self.tags)?;
        let mut seen = BTreeSet::new();
        for v in &self.variants {
            if !is_identifier(&v.name) {
                return Err(Error::parse("", 0, format!("invalid variant name `{}`", v.name)));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::DuplicateName(v.name.clone()));
            }
            check_tags(&v.tags)?;
        }
        if let Some(active) = &self.active {
            if self.variant(active).is_none() {
                return Err(Error::UnknownMutant(active.clone()));
            }
        }
        Ok(())
    }
}

fn check_tags(tags: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for t in tags {
        if !is_identifier(t) {
            return Err(Error::parse("", 0, format!("invalid tag `{t}`")));
        }
        if !seen.insert(t.as_str()) {
            return Err(Error::parse("", 0, format!("duplicate tag `{t}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Code(String),
    Block(MutationBlock),
}

/// One source file as code interleaved with mutation blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationDocument {
    /// Path relative to the project root, `/`-separated.
    pub path: String,
    pub segments: Vec<Segment>,
}

impl MutationDocument {
    /// Builds a document, merging adjacent code segments and dropping empty ones.
    pub fn new(path: impl Into<String>, segments: Vec<Segment>) -> Self {
        let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            match seg {
                Segment::Code(text) if text.is_empty() => {}
                Segment::Code(text) => match out.last_mut() {
                    Some(Segment::Code(prev)) => prev.push_str(&text),
                    _ => out.push(Segment::Code(text)),
                },
                block => out.push(block),
            }
        }
        MutationDocument {
            path: path.into(),
            segments: out,
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = &MutationBlock> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Block(b) => Some(b),
            Segment::Code(_) => None,
        })
    }

    pub fn blocks_mut(&mut self) -> impl Iterator<Item = &mut MutationBlock> {
        self.segments.iter_mut().filter_map(|s| match s {
            Segment::Block(b) => Some(b),
            Segment::Code(_) => None,
        })
    }

    pub fn has_blocks(&self) -> bool {
        self.blocks().next().is_some()
    }

    /// Plain program text with each block showing the body chosen by `pick`.
    pub fn text_with<'a>(&'a self, pick: impl Fn(&'a MutationBlock) -> &'a str) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Code(text) => out.push_str(text),
                Segment::Block(b) => out.push_str(pick(b)),
            }
        }
        out
    }

    /// The base program: every block showing its base.
    pub fn reset_text(&self) -> String {
        self.text_with(|b| &b.base)
    }

    /// The program with every block's currently active body.
    pub fn active_text(&self) -> String {
        self.text_with(|b| b.active_body())
    }

    /// The program with the given variants active; blocks without a
    /// selected variant show their base.
    pub fn text_with_active(&self, active: &BTreeSet<String>) -> String {
        self.text_with(|b| {
            b.variants
                .iter()
                .find(|v| active.contains(&v.name))
                .map(|v| v.body.as_str())
                .unwrap_or(&b.base)
        })
    }

    /// Byte ranges of each block within [`reset_text`](Self::reset_text).
    pub fn block_spans(&self) -> Vec<std::ops::Range<usize>> {
        let mut spans = Vec::new();
        let mut offset = 0;
        for seg in &self.segments {
            match seg {
                Segment::Code(text) => offset += text.len(),
                Segment::Block(b) => {
                    spans.push(offset..offset + b.base.len());
                    offset += b.base.len();
                }
            }
        }
        spans
    }

    /// 1-based line on which each block's base begins in the reset text.
    pub fn base_lines(&self) -> Vec<usize> {
        let mut lines = Vec::new();
        let mut line = 1;
        for seg in &self.segments {
            match seg {
                Segment::Code(text) => line += count_newlines(text),
                Segment::Block(b) => {
                    lines.push(line);
                    line += count_newlines(&b.base);
                }
            }
        }
        lines
    }

    pub fn reset(&mut self) {
        for b in self.blocks_mut() {
            b.active = None;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for b in self.blocks() {
            b.validate().map_err(|e| match e {
                Error::Parse { line, message, .. } => Error::parse(&self.path, line, message),
                other => other,
            })?;
            if !names.insert(b.name.as_str()) {
                return Err(Error::DuplicateName(b.name.clone()));
            }
        }
        Ok(())
    }

    /// Widens every block so that it starts at a line start and ends after a
    /// newline (or at end of file). The absorbed text is added to the base
    /// and to every variant, so each activated program is unchanged.
    pub fn line_aligned(&self) -> Result<MutationDocument> {
        let mut segs: Vec<Segment> = self.segments.clone();
        let mut i = 0;
        while i < segs.len() {
            if let Segment::Block(_) = segs[i] {
                // Leading side.
                let prefix = match i.checked_sub(1).map(|p| &mut segs[p]) {
                    Some(Segment::Code(code)) if !code.is_empty() && !code.ends_with('\n') => {
                        let cut = code.rfind('\n').map_or(0, |p| p + 1);
                        let prefix = code[cut..].to_string();
                        code.truncate(cut);
                        prefix
                    }
                    Some(Segment::Block(prev)) if !ends_at_line_end(prev) => {
                        return Err(Error::parse(
                            &self.path,
                            0,
                            format!("blocks `{}` and the next one share a line", prev.name),
                        ));
                    }
                    _ => String::new(),
                };
                if let Segment::Block(b) = &mut segs[i] {
                    if !prefix.is_empty() {
                        b.base.insert_str(0, &prefix);
                        for v in &mut b.variants {
                            v.body.insert_str(0, &prefix);
                        }
                    }
                }
                // Trailing side.
                let needs_suffix = match &segs[i] {
                    Segment::Block(b) => !ends_at_line_end(b),
                    Segment::Code(_) => false,
                };
                if needs_suffix {
                    let suffix = match segs.get_mut(i + 1) {
                        Some(Segment::Code(code)) => {
                            let cut = code.find('\n').map_or(code.len(), |p| p + 1);
                            let suffix = code[..cut].to_string();
                            code.replace_range(..cut, "");
                            suffix
                        }
                        Some(Segment::Block(next)) => {
                            return Err(Error::parse(
                                &self.path,
                                0,
                                format!("block `{}` shares a line with the previous block", next.name),
                            ));
                        }
                        None => String::new(),
                    };
                    if let Segment::Block(b) = &mut segs[i] {
                        b.base.push_str(&suffix);
                        for v in &mut b.variants {
                            v.body.push_str(&suffix);
                        }
                    }
                }
            }
            i += 1;
        }
        Ok(MutationDocument::new(self.path.clone(), segs))
    }

    /// Whether every block starts at a line start and ends at a line end.
    pub fn is_line_aligned(&self) -> bool {
        let mut at_line_start = true;
        for seg in &self.segments {
            match seg {
                Segment::Code(text) => at_line_start = text.ends_with('\n'),
                Segment::Block(b) => {
                    if !at_line_start || !ends_at_line_end(b) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn ends_at_line_end(b: &MutationBlock) -> bool {
    b.bodies().all(|body| body.is_empty() || body.ends_with('\n'))
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn count_newlines(s: &str) -> usize {
    s.bytes().filter(|&b| b == b'\n').count()
}

pub fn leading_whitespace(s: &str) -> &str {
    let end = s
        .find(|c: char| c != ' ' && c != '\t')
        .unwrap_or(s.len());
    &s[..end]
}

/// Removes every whitespace character; used to compare program texts that
/// may differ only in layout.
pub fn strip_whitespace(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Converts CRLF line endings to LF.
pub fn normalize_newlines(text: &str) -> String {
    if text.contains('\r') {
        text.replace("\r\n", "\n")
    } else {
        text.to_string()
    }
}

/// Derives a block name from its variants' names: the longest common
/// prefix, minus a trailing `_<digits>` tail. Falls back to `fallback`.
pub fn derive_block_name<'a>(variants: impl IntoIterator<Item = &'a str>, fallback: &str) -> String {
    let mut iter = variants.into_iter();
    let Some(first) = iter.next() else {
        return fallback.to_string();
    };
    let mut prefix = first.to_string();
    for name in iter {
        let common = prefix
            .chars()
            .zip(name.chars())
            .take_while(|(a, b)| a == b)
            .count();
        prefix.truncate(prefix.char_indices().nth(common).map_or(prefix.len(), |(i, _)| i));
    }
    let trimmed = prefix.trim_end_matches(|c: char| c.is_ascii_digit());
    let trimmed = trimmed.trim_end_matches('_');
    if is_identifier(trimmed) {
        trimmed.to_string()
    } else {
        fallback.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(segments: Vec<Segment>) -> MutationDocument {
        MutationDocument::new("f.rs", segments)
    }

    #[test]
    fn new_merges_code_segments() {
        let d = doc(vec![
            Segment::Code("a".into()),
            Segment::Code(String::new()),
            Segment::Code("b".into()),
        ]);
        assert_eq!(d.segments, vec![Segment::Code("ab".into())]);
    }

    #[test]
    fn trivia_does_not_affect_equality() {
        let a = MutationBlock::new("m", "x\n", vec![Variant::new("m_1", "y\n")]);
        let mut b = a.clone();
        b.trivia.named = false;
        b.trivia.terminated = false;
        assert_eq!(a, b);
    }

    #[test]
    fn line_alignment_absorbs_partial_lines() {
        let block = MutationBlock::new(
            "add",
            "a + b",
            vec![Variant::new("add_1", "a - b"), Variant::new("add_2", "")],
        );
        let d = doc(vec![
            Segment::Code("fn add() {\n    ".into()),
            Segment::Block(block),
            Segment::Code("\n}\n".into()),
        ]);
        assert!(!d.is_line_aligned());
        let aligned = d.line_aligned().unwrap();
        assert!(aligned.is_line_aligned());
        let b = aligned.blocks().next().unwrap();
        assert_eq!(b.base, "    a + b\n");
        assert_eq!(b.variants[0].body, "    a - b\n");
        assert_eq!(b.variants[1].body, "    \n");
        assert_eq!(aligned.reset_text(), d.reset_text());
        for v in ["add_1", "add_2"] {
            let set: BTreeSet<String> = [v.to_string()].into();
            assert_eq!(aligned.text_with_active(&set), d.text_with_active(&set));
        }
    }

    #[test]
    fn base_lines_are_one_based() {
        let d = doc(vec![
            Segment::Code("a\nb\n".into()),
            Segment::Block(MutationBlock::new("m", "c\n", vec![Variant::new("m_1", "d\n")])),
        ]);
        assert_eq!(d.base_lines(), vec![3]);
        assert_eq!(d.block_spans(), vec![4..6]);
    }

    #[test]
    fn derived_names() {
        assert_eq!(derive_block_name(["insert_1", "insert_2"], "m0"), "insert");
        assert_eq!(derive_block_name(["foo_1"], "m0"), "foo");
        assert_eq!(derive_block_name(["1a"], "m0"), "m0");
        assert_eq!(derive_block_name(Vec::<&str>::new(), "m3"), "m3");
    }

    #[test]
    fn validate_rejects_bad_active() {
        let mut b = MutationBlock::new("m", "x\n", vec![Variant::new("m_1", "y\n")]);
        b.active = Some("m_2".into());
        assert!(matches!(b.validate(), Err(Error::UnknownMutant(_))));
        b.active = None;
        b.variants.push(Variant::new("m_1", "z\n"));
        assert!(matches!(b.validate(), Err(Error::DuplicateName(_))));
    }
}
