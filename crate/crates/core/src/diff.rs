//! Unified diff parsing, generation and zero-fuzz application.
//!
//! Dialect: an optional `diff --git a/<p> b/<p>` line, `--- a/<p>`,
//! `+++ b/<p>`, then hunks `@@ -l,c +l,c @@` whose lines start with ` `,
//! `-` or `+`. A `\ No newline at end of file` line marks the preceding line
//! as unterminated. No timestamps; LF only.

use std::fmt;

use similar::{capture_diff_slices, Algorithm, DiffOp};

use crate::error::{Error, Result};

pub const DEFAULT_CONTEXT: usize = 3;

const NO_NEWLINE: &str = "\\ No newline at end of file";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Context,
    Delete,
    Insert,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HunkLine {
    pub kind: LineKind,
    pub text: String,
    /// False only for a final line without a trailing newline.
    pub newline: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub old_start: usize,
    pub old_count: usize,
    pub new_start: usize,
    pub new_count: usize,
    pub lines: Vec<HunkLine>,
}

impl Hunk {
    /// Lines the hunk expects to find (context and deletions).
    pub fn old_lines(&self) -> impl Iterator<Item = &HunkLine> {
        self.lines.iter().filter(|l| l.kind != LineKind::Insert)
    }

    /// Lines the hunk produces (context and insertions).
    pub fn new_lines(&self) -> impl Iterator<Item = &HunkLine> {
        self.lines.iter().filter(|l| l.kind != LineKind::Delete)
    }

    fn shifted(mut self, by: usize) -> Self {
        self.old_start += by;
        self.new_start += by;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// A single-file unified diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifiedDiff {
    /// The `diff --git ...` line without its newline, when present.
    pub git_header: Option<String>,
    /// Label after `--- `, e.g. `a/calc.rs`.
    pub old_label: String,
    /// Label after `+++ `, e.g. `b/calc.rs`.
    pub new_label: String,
    pub hunks: Vec<Hunk>,
}

impl UnifiedDiff {
    pub fn for_path(path: &str, hunks: Vec<Hunk>) -> Self {
        UnifiedDiff {
            git_header: Some(format!("diff --git a/{path} b/{path}")),
            old_label: format!("a/{path}"),
            new_label: format!("b/{path}"),
            hunks,
        }
    }

    /// The target path with any `b/` prefix removed.
    pub fn path(&self) -> &str {
        self.new_label.strip_prefix("b/").unwrap_or(&self.new_label)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::MalformedDiff(msg);
        let mut lines = text.lines().enumerate().peekable();
        let mut git_header = None;
        if let Some((_, l)) = lines.peek() {
            if l.starts_with("diff ") {
                git_header = Some(l.to_string());
                lines.next();
            }
        }
        let (_, old) = lines.next().ok_or_else(|| bad("missing `---` header".into()))?;
        let old_label = old
            .strip_prefix("--- ")
            .ok_or_else(|| bad(format!("expected `--- <path>`, found `{old}`")))?;
        let (_, new) = lines.next().ok_or_else(|| bad("missing `+++` header".into()))?;
        let new_label = new
            .strip_prefix("+++ ")
            .ok_or_else(|| bad(format!("expected `+++ <path>`, found `{new}`")))?;

        let mut hunks = Vec::new();
        while let Some((n, line)) = lines.next() {
            let (old_start, old_count, new_start, new_count) =
                parse_hunk_header(line).ok_or_else(|| bad(format!("line {}: expected hunk header, found `{line}`", n + 1)))?;
            let mut hunk = Hunk {
                old_start,
                old_count,
                new_start,
                new_count,
                lines: Vec::new(),
            };
            let (mut seen_old, mut seen_new) = (0, 0);
            while seen_old < old_count || seen_new < new_count {
                let Some((n, body)) = lines.next() else {
                    return Err(bad(format!(
                        "hunk at `{line}` ends early: {seen_old}/{old_count} old, {seen_new}/{new_count} new lines"
                    )));
                };
                let (kind, text) = match body.chars().next() {
                    Some(' ') => (LineKind::Context, &body[1..]),
                    None => (LineKind::Context, ""),
                    Some('-') => (LineKind::Delete, &body[1..]),
                    Some('+') => (LineKind::Insert, &body[1..]),
                    Some('\\') => {
                        mark_no_newline(&mut hunk, n)?;
                        continue;
                    }
                    _ => return Err(bad(format!("line {}: unexpected hunk line `{body}`", n + 1))),
                };
                if kind != LineKind::Insert {
                    seen_old += 1;
                }
                if kind != LineKind::Delete {
                    seen_new += 1;
                }
                if seen_old > old_count || seen_new > new_count {
                    return Err(bad(format!("line {}: hunk longer than its header", n + 1)));
                }
                hunk.lines.push(HunkLine {
                    kind,
                    text: text.to_string(),
                    newline: true,
                });
            }
            if let Some((n, l)) = lines.peek() {
                if l.starts_with('\\') {
                    let n = *n;
                    lines.next();
                    mark_no_newline(&mut hunk, n)?;
                }
            }
            hunks.push(hunk);
        }
        Ok(UnifiedDiff {
            git_header,
            old_label: old_label.to_string(),
            new_label: new_label.to_string(),
            hunks,
        })
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn mark_no_newline(hunk: &mut Hunk, n: usize) -> Result<()> {
    match hunk.lines.last_mut() {
        Some(last) => {
            last.newline = false;
            Ok(())
        }
        None => Err(Error::MalformedDiff(format!(
            "line {}: `{NO_NEWLINE}` without a preceding line",
            n + 1
        ))),
    }
}

fn parse_hunk_header(line: &str) -> Option<(usize, usize, usize, usize)> {
    let rest = line.strip_prefix("@@ -")?;
    let end = rest.find(" @@")?;
    let (old, new) = rest[..end].split_once(" +")?;
    let range = |s: &str| -> Option<(usize, usize)> {
        match s.split_once(',') {
            Some((start, count)) => Some((start.parse().ok()?, count.parse().ok()?)),
            None => Some((s.parse().ok()?, 1)),
        }
    };
    let (os, oc) = range(old)?;
    let (ns, nc) = range(new)?;
    Some((os, oc, ns, nc))
}

impl fmt::Display for UnifiedDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.git_header {
            writeln!(f, "{h}")?;
        }
        writeln!(f, "--- {}", self.old_label)?;
        writeln!(f, "+++ {}", self.new_label)?;
        for h in &self.hunks {
            writeln!(
                f,
                "@@ -{},{} +{},{} @@",
                h.old_start, h.old_count, h.new_start, h.new_count
            )?;
            for l in &h.lines {
                let prefix = match l.kind {
                    LineKind::Context => ' ',
                    LineKind::Delete => '-',
                    LineKind::Insert => '+',
                };
                writeln!(f, "{prefix}{}", l.text)?;
                if !l.newline {
                    writeln!(f, "{NO_NEWLINE}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses a diff and returns its hunks; a diff without hunks is malformed.
pub fn parse_unified_diff(text: &str) -> Result<Vec<Hunk>> {
    let diff = UnifiedDiff::parse(text)?;
    if diff.hunks.is_empty() {
        return Err(Error::MalformedDiff("diff has no hunks".into()));
    }
    Ok(diff.hunks)
}

/// Splits text into `(content, has_newline)` pairs.
fn split_lines(text: &str) -> Vec<(&str, bool)> {
    text.split_inclusive('\n')
        .map(|l| match l.strip_suffix('\n') {
            Some(c) => (c, true),
            None => (l, false),
        })
        .collect()
}

fn describe(line: Option<&(&str, bool)>) -> String {
    match line {
        Some((text, true)) => text.to_string(),
        Some((text, false)) => format!("{text} (no newline)"),
        None => "<end of file>".into(),
    }
}

/// Applies hunks with zero fuzz: every context and removed line must match
/// exactly at the stated position.
pub fn apply_unified_diff(text: &str, hunks: &[Hunk], direction: Direction) -> Result<String> {
    let lines = split_lines(text);
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (k, hunk) in hunks.iter().enumerate() {
        let (start, count, expect, produce): (usize, usize, Vec<&HunkLine>, Vec<&HunkLine>) = match direction {
            Direction::Forward => (hunk.old_start, hunk.old_count, hunk.old_lines().collect(), hunk.new_lines().collect()),
            Direction::Reverse => (hunk.new_start, hunk.new_count, hunk.new_lines().collect(), hunk.old_lines().collect()),
        };
        if expect.len() != count {
            return Err(Error::MalformedDiff(format!("hunk {} header does not match its body", k + 1)));
        }
        let pos = if count == 0 { start } else { start.saturating_sub(1) };
        if (count > 0 && start == 0) || pos < cursor || pos > lines.len() {
            return Err(Error::MalformedDiff(format!(
                "hunk {} starts at line {start}, outside the file or before the previous hunk",
                k + 1
            )));
        }
        for (text, nl) in &lines[cursor..pos] {
            out.push_str(text);
            if *nl {
                out.push('\n');
            }
        }
        for (j, want) in expect.iter().enumerate() {
            let found = lines.get(pos + j);
            if found != Some(&(want.text.as_str(), want.newline)) {
                return Err(Error::ContextMismatch {
                    hunk: k + 1,
                    line: pos + j + 1,
                    expected: describe(Some(&(want.text.as_str(), want.newline))),
                    found: describe(found),
                });
            }
        }
        for line in produce {
            out.push_str(&line.text);
            if line.newline {
                out.push('\n');
            }
        }
        cursor = pos + count;
    }
    for (text, nl) in &lines[cursor..] {
        out.push_str(text);
        if *nl {
            out.push('\n');
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Edit {
    Equal(usize, usize),
    Delete(usize, usize),
    Insert(usize, usize),
}

impl Edit {
    fn positions(self) -> (usize, usize) {
        match self {
            Edit::Equal(o, n) | Edit::Delete(o, n) | Edit::Insert(o, n) => (o, n),
        }
    }
}

/// Minimal line-based hunks from `old` to `new` with `context` lines of
/// context; hunks whose contexts touch are merged.
pub fn diff_hunks(old: &str, new: &str, context: usize) -> Vec<Hunk> {
    let old_lines = split_lines(old);
    let new_lines = split_lines(new);
    let ops = capture_diff_slices(Algorithm::Myers, &old_lines, &new_lines);
    // Positions come from running counters: the indices reported on
    // deletions and insertions are not always the current position.
    let (mut o, mut n) = (0, 0);
    let mut edits = Vec::new();
    for op in ops {
        let (old_len, new_len) = match op {
            DiffOp::Equal { len, .. } => (len, len),
            DiffOp::Delete { old_len, .. } => (old_len, 0),
            DiffOp::Insert { new_len, .. } => (0, new_len),
            DiffOp::Replace { old_len, new_len, .. } => (old_len, new_len),
        };
        if matches!(op, DiffOp::Equal { .. }) {
            edits.extend((0..old_len).map(|i| Edit::Equal(o + i, n + i)));
        } else {
            edits.extend((0..old_len).map(|i| Edit::Delete(o + i, n)));
            edits.extend((0..new_len).map(|i| Edit::Insert(o + old_len, n + i)));
        }
        o += old_len;
        n += new_len;
    }

    let changes: Vec<usize> = edits
        .iter()
        .enumerate()
        .filter(|(_, e)| !matches!(e, Edit::Equal(..)))
        .map(|(i, _)| i)
        .collect();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &c in &changes {
        match groups.last_mut() {
            Some((_, last)) if c - *last - 1 <= 2 * context => *last = c,
            _ => groups.push((c, c)),
        }
    }

    groups
        .into_iter()
        .map(|(first, last)| {
            let from = first.saturating_sub(context);
            let to = (last + 1 + context).min(edits.len());
            let (old_pos, new_pos) = edits[from].positions();
            let mut hunk = Hunk {
                old_start: 0,
                old_count: 0,
                new_start: 0,
                new_count: 0,
                lines: Vec::new(),
            };
            for e in &edits[from..to] {
                let (kind, (text, newline)) = match *e {
                    Edit::Equal(o, _) => (LineKind::Context, old_lines[o]),
                    Edit::Delete(o, _) => (LineKind::Delete, old_lines[o]),
                    Edit::Insert(_, n) => (LineKind::Insert, new_lines[n]),
                };
                if kind != LineKind::Insert {
                    hunk.old_count += 1;
                }
                if kind != LineKind::Delete {
                    hunk.new_count += 1;
                }
                hunk.lines.push(HunkLine {
                    kind,
                    text: text.to_string(),
                    newline,
                });
            }
            hunk.old_start = if hunk.old_count == 0 { old_pos } else { old_pos + 1 };
            hunk.new_start = if hunk.new_count == 0 { new_pos } else { new_pos + 1 };
            hunk
        })
        .collect()
}

/// Unified diff text from `old` to `new` with three lines of context, or an
/// empty string when the texts are equal.
pub fn generate_unified_diff(old: &str, new: &str, path: &str) -> String {
    generate_with_context(old, new, path, DEFAULT_CONTEXT)
}

pub fn generate_with_context(old: &str, new: &str, path: &str, context: usize) -> String {
    let hunks = diff_hunks(old, new, context);
    if hunks.is_empty() {
        return String::new();
    }
    UnifiedDiff::for_path(path, hunks).render()
}

/// Diff of a block region, positioned as if taken over the whole file where
/// the region begins after `lines_before` lines.
pub fn region_diff(path: &str, base: &str, body: &str, lines_before: usize) -> Option<UnifiedDiff> {
    let hunks: Vec<Hunk> = diff_hunks(base, body, DEFAULT_CONTEXT)
        .into_iter()
        .map(|h| h.shifted(lines_before))
        .collect();
    (!hunks.is_empty()).then(|| UnifiedDiff::for_path(path, hunks))
}
