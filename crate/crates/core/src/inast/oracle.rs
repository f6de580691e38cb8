use std::cmp::Reverse;

/// Syntactic category of a fragment, from most to least specific.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Expr,
    Stmts,
    Items,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Expr, Category::Stmts, Category::Items];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpan {
    pub start: usize,
    pub end: usize,
    pub kind: &'static str,
    /// Index of the smallest enclosing node.
    pub parent: Option<usize>,
}

impl NodeSpan {
    pub fn contains(&self, start: usize, end: usize) -> bool {
        self.start <= start && end <= self.end
    }
}

/// Grammar knowledge needed by normalization and extraction.
pub trait ParseOracle {
    fn parse_file(&self, text: &str) -> bool;

    /// Every node of the parsed file, outer nodes before inner ones, or
    /// `None` when the file does not parse.
    fn node_spans(&self, text: &str) -> Option<Vec<NodeSpan>>;

    fn parses_as(&self, text: &str, category: Category) -> bool;

    /// The most specific category `text` parses as.
    fn parse_unit(&self, text: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|&c| self.parses_as(text, c))
    }

    /// The most specific category every text parses as.
    fn common_unit(&self, texts: &[&str]) -> Option<Category> {
        Category::ALL
            .into_iter()
            .find(|&c| texts.iter().all(|t| self.parses_as(t, c)))
    }
}

/// Orders raw spans outer-first and links each to its smallest container.
/// Spans must nest; equal spans keep their given order.
pub fn link_parents(mut raw: Vec<(usize, usize, &'static str)>) -> Vec<NodeSpan> {
    // Equal spans nest by kind: a sequence holds its only statement, a
    // statement its expression, an expression its block.
    let rank = |kind: &str| match kind {
        "file" => 0,
        "seq" | "stmts" => 1,
        "item" => 2,
        "stmt" => 3,
        "arm" => 4,
        "expr" => 5,
        _ => 6,
    };
    raw.sort_by_key(|&(s, e, kind)| (s, Reverse(e), rank(kind)));
    let mut out: Vec<NodeSpan> = Vec::with_capacity(raw.len());
    let mut stack: Vec<usize> = Vec::new();
    for (start, end, kind) in raw {
        while let Some(&top) = stack.last() {
            if out[top].contains(start, end) {
                break;
            }
            stack.pop();
        }
        out.push(NodeSpan {
            start,
            end,
            kind,
            parent: stack.last().copied(),
        });
        stack.push(out.len() - 1);
    }
    out
}
