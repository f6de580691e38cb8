//! Rust grammar oracle backed by `syn`.

use proc_macro2::{LineColumn, Span};
use syn::spanned::Spanned;
use syn::visit::{self, Visit};

use super::oracle::{link_parents, Category, NodeSpan, ParseOracle};

#[derive(Debug, Clone, Copy, Default)]
pub struct RustOracle;

/// Maps `proc_macro2` line/column positions (columns in chars) to byte
/// offsets.
struct Offsets<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> Offsets<'a> {
    fn new(text: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Offsets { text, line_starts }
    }

    fn byte(&self, lc: LineColumn) -> usize {
        let start = self.line_starts[lc.line - 1];
        self.text[start..]
            .char_indices()
            .nth(lc.column)
            .map_or(self.text.len(), |(i, _)| start + i)
    }

    fn range(&self, span: Span) -> (usize, usize) {
        (self.byte(span.start()), self.byte(span.end()))
    }
}

struct Collector<'a> {
    offsets: Offsets<'a>,
    spans: Vec<(usize, usize, &'static str)>,
}

impl Collector<'_> {
    fn push(&mut self, span: Span, kind: &'static str) {
        let (s, e) = self.offsets.range(span);
        if s < e {
            self.spans.push((s, e, kind));
        }
    }
}

impl<'ast> Visit<'ast> for Collector<'_> {
    fn visit_expr(&mut self, e: &'ast syn::Expr) {
        self.push(e.span(), "expr");
        visit::visit_expr(self, e);
    }

    fn visit_stmt(&mut self, s: &'ast syn::Stmt) {
        self.push(s.span(), "stmt");
        visit::visit_stmt(self, s);
    }

    fn visit_item(&mut self, i: &'ast syn::Item) {
        self.push(i.span(), "item");
        visit::visit_item(self, i);
    }

    fn visit_block(&mut self, b: &'ast syn::Block) {
        self.push(b.span(), "block");
        if let (Some(first), Some(last)) = (b.stmts.first(), b.stmts.last()) {
            let (s, _) = self.offsets.range(first.span());
            let (_, e) = self.offsets.range(last.span());
            if s < e {
                self.spans.push((s, e, "stmts"));
            }
        }
        visit::visit_block(self, b);
    }
}

impl ParseOracle for RustOracle {
    fn parse_file(&self, text: &str) -> bool {
        syn::parse_file(text).is_ok()
    }

    fn node_spans(&self, text: &str) -> Option<Vec<NodeSpan>> {
        let file = syn::parse_file(text).ok()?;
        let mut c = Collector {
            offsets: Offsets::new(text),
            spans: vec![(0, text.len(), "file")],
        };
        c.visit_file(&file);
        // Spans that do not nest (rare macro corner cases) are dropped.
        let mut linked = link_parents(c.spans);
        linked.retain(|n| n.parent.is_some() || n.kind == "file");
        Some(link_parents(linked.into_iter().map(|n| (n.start, n.end, n.kind)).collect()))
    }

    fn parses_as(&self, text: &str, category: Category) -> bool {
        match category {
            Category::Expr => syn::parse_str::<syn::Expr>(text).is_ok(),
            Category::Stmts => syn::parse_str::<syn::Block>(&format!("{{\n{text}\n}}")).is_ok(),
            Category::Items => syn::parse_file(text).is_ok(),
        }
    }
}
