use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommentStyle {
    Block,
    Line,
}

/// How an inactive single-line region is wrapped in block-comment style.
///
/// `Inline` writes `/*| body */` on one line; `Multiline` always opens and
/// closes the comment on lines of their own. Multi-line regions always use
/// the multi-line form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WrapStyle {
    Inline,
    #[default]
    Multiline,
}

/// Comment delimiters and mutation marker of one target language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxProfile {
    pub comment_begin: String,
    pub comment_end: String,
    pub mutation_marker: String,
    pub style: CommentStyle,
    #[serde(default)]
    pub wrap: WrapStyle,
}

impl SyntaxProfile {
    pub fn new(
        comment_begin: &str,
        comment_end: &str,
        mutation_marker: &str,
        style: CommentStyle,
        wrap: WrapStyle,
    ) -> Result<Self> {
        let profile = SyntaxProfile {
            comment_begin: comment_begin.to_string(),
            comment_end: comment_end.to_string(),
            mutation_marker: mutation_marker.to_string(),
            style,
            wrap,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::parse("<profile>", 0, msg));
        if self.mutation_marker.is_empty() || self.mutation_marker.chars().any(char::is_whitespace) {
            return bad("mutation marker must be nonempty and contain no whitespace");
        }
        if self.comment_begin.is_empty() || self.comment_begin.chars().any(char::is_whitespace) {
            return bad("comment begin must be nonempty and contain no whitespace");
        }
        match self.style {
            CommentStyle::Block if self.comment_end.is_empty() => {
                bad("block style needs a comment end delimiter")
            }
            CommentStyle::Line if !self.comment_end.is_empty() => {
                bad("line style must not have a comment end delimiter")
            }
            _ => Ok(()),
        }
    }

    pub fn haskell() -> Self {
        Self::builtin("{-", "-}", "!", CommentStyle::Block, WrapStyle::Multiline)
    }

    pub fn rocq() -> Self {
        Self::builtin("(*", "*)", "!", CommentStyle::Block, WrapStyle::Multiline)
    }

    pub fn ocaml() -> Self {
        Self::rocq()
    }

    pub fn racket() -> Self {
        Self::builtin("#|", "|#", "!", CommentStyle::Block, WrapStyle::Multiline)
    }

    /// Rust reserves `/*!` for inner doc comments, hence `|`.
    pub fn rust() -> Self {
        Self::builtin("/*", "*/", "|", CommentStyle::Block, WrapStyle::Inline)
    }

    pub fn python() -> Self {
        Self::builtin("#", "", "|", CommentStyle::Line, WrapStyle::Multiline)
    }

    /// Looks up a built-in profile by language name or file extension.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "haskell" | "hs" => Self::haskell(),
            "rocq" | "coq" | "v" => Self::rocq(),
            "ocaml" | "ml" => Self::ocaml(),
            "racket" | "rkt" => Self::racket(),
            "rust" | "rs" | "mini" => Self::rust(),
            "python" | "py" => Self::python(),
            _ => return None,
        })
    }

    fn builtin(cb: &str, ce: &str, mm: &str, style: CommentStyle, wrap: WrapStyle) -> Self {
        SyntaxProfile {
            comment_begin: cb.into(),
            comment_end: ce.into(),
            mutation_marker: mm.into(),
            style,
            wrap,
        }
    }

    /// `<cb><mm>`: opens a block or a wrapped region.
    pub(crate) fn open(&self) -> String {
        format!("{}{}", self.comment_begin, self.mutation_marker)
    }

    /// `<cb><mm><mm>`: opens a variant header.
    pub(crate) fn header(&self) -> String {
        format!("{}{}{}", self.comment_begin, self.mutation_marker, self.mutation_marker)
    }

    /// `<cb> <mm><ce>`: the end marker.
    pub(crate) fn end_marker(&self) -> String {
        format!("{} {}{}", self.comment_begin, self.mutation_marker, self.comment_end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        for name in ["haskell", "rocq", "ocaml", "racket", "rust", "python"] {
            SyntaxProfile::by_name(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn rejects_inconsistent_profiles() {
        assert!(SyntaxProfile::new("/*", "", "|", CommentStyle::Block, WrapStyle::Inline).is_err());
        assert!(SyntaxProfile::new("#", "x", "|", CommentStyle::Line, WrapStyle::Inline).is_err());
        assert!(SyntaxProfile::new("/*", "*/", "a b", CommentStyle::Block, WrapStyle::Inline).is_err());
        assert!(SyntaxProfile::new("/*", "*/", "", CommentStyle::Block, WrapStyle::Inline).is_err());
    }

    #[test]
    fn marker_strings() {
        let p = SyntaxProfile::rust();
        assert_eq!(p.open(), "/*|");
        assert_eq!(p.header(), "/*||");
        assert_eq!(p.end_marker(), "/* |*/");
        assert_eq!(SyntaxProfile::haskell().end_marker(), "{- !-}");
    }
}
