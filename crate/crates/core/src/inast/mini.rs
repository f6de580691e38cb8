//! A miniature expression language for hermetic tests.
//!
//! ```text
//! file  := seq
//! seq   := stmt* expr?
//! stmt  := "let" ident "=" expr ";" | expr ";" | blocklike
//! expr  := unary (binop unary)*          precedence: || && cmp +- */%
//! unary := ("-" | "!") unary | post
//! post  := primary ("(" (expr ("," expr)*)? ")")*
//! primary := int | string | ident | "(" expr? ")" | block
//!          | "if" expr block ("else" (block | if))?
//!          | "match" expr "{" (pat ("if" expr)? "=>" expr ","?)* "}"
//! block := "{" seq "}"
//! pat   := "_" | ident | int
//! ```
//! `//` and `/* */` comments are whitespace.

use super::lex::{is_ident_byte, skip_ws};
use super::oracle::{link_parents, Category, NodeSpan, ParseOracle};

#[derive(Debug, Clone, Copy, Default)]
pub struct MiniOracle;

const KEYWORDS: [&str; 4] = ["let", "if", "else", "match"];

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    last_end: usize,
    spans: Vec<(usize, usize, &'static str)>,
}

type P<T> = Result<T, ()>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            pos: 0,
            last_end: 0,
            spans: Vec::new(),
        }
    }

    fn ws(&mut self) {
        self.pos = skip_ws(self.text, self.pos);
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.text[self.pos..].starts_with(tok) {
            let end = self.pos + tok.len();
            let is_word = tok.bytes().all(is_ident_byte);
            if is_word && self.text.as_bytes().get(end).is_some_and(|&c| is_ident_byte(c)) {
                return false;
            }
            self.pos = end;
            self.last_end = end;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> P<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(())
        }
    }

    fn at_keyword(&mut self, kw: &str) -> bool {
        self.ws();
        let rest = &self.text[self.pos..];
        rest.starts_with(kw) && !rest.as_bytes().get(kw.len()).is_some_and(|&c| is_ident_byte(c))
    }

    fn ident(&mut self) -> P<&'a str> {
        self.ws();
        let s = self.text.as_bytes();
        if self.pos >= s.len() || !(s[self.pos].is_ascii_alphabetic() || s[self.pos] == b'_') {
            return Err(());
        }
        let start = self.pos;
        let end = s[start..].iter().position(|&c| !is_ident_byte(c)).map_or(s.len(), |p| start + p);
        let word = &self.text[start..end];
        if KEYWORDS.contains(&word) {
            return Err(());
        }
        self.pos = end;
        self.last_end = end;
        Ok(word)
    }

    fn node<T>(&mut self, kind: &'static str, f: impl FnOnce(&mut Self) -> P<T>) -> P<T> {
        self.ws();
        let start = self.pos;
        let out = f(self)?;
        self.spans.push((start, self.last_end, kind));
        Ok(out)
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Returns whether a trailing expression was seen.
    fn seq(&mut self) -> P<()> {
        self.ws();
        let start = self.pos;
        let mut any = false;
        loop {
            match self.peek() {
                None | Some(b'}') => break,
                _ => {}
            }
            any = true;
            if self.at_keyword("let") {
                self.node("stmt", |p| {
                    p.expect("let")?;
                    p.ident()?;
                    p.expect("=")?;
                    p.expr()?;
                    p.expect(";")
                })?;
                continue;
            }
            let stmt_start = self.pos;
            let blocklike = self.expr()?;
            if self.eat(";") || (blocklike && !matches!(self.peek(), None | Some(b'}'))) {
                self.spans.push((stmt_start, self.last_end, "stmt"));
            } else {
                break;
            }
        }
        if any {
            self.spans.push((start, self.last_end, "seq"));
        }
        Ok(())
    }

    /// Returns whether the expression ends with a block.
    fn expr(&mut self) -> P<bool> {
        self.binary(0)
    }

    fn binary(&mut self, min: usize) -> P<bool> {
        const LEVELS: [&[&str]; 5] = [&["||"], &["&&"], &["==", "!=", "<=", ">=", "<", ">"], &["+", "-"], &["*", "/", "%"]];
        self.ws();
        let start = self.pos;
        let mut blocklike = self.unary()?;
        'outer: loop {
            for (level, ops) in LEVELS.iter().enumerate().skip(min) {
                for op in *ops {
                    if self.eat(op) {
                        self.binary(level + 1)?;
                        self.spans.push((start, self.last_end, "expr"));
                        blocklike = false;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        Ok(blocklike)
    }

    fn unary(&mut self) -> P<bool> {
        self.ws();
        let start = self.pos;
        if self.eat("-") || self.eat("!") {
            self.unary()?;
            self.spans.push((start, self.last_end, "expr"));
            return Ok(false);
        }
        let mut blocklike = self.primary()?;
        while self.peek() == Some(b'(') {
            self.expect("(")?;
            if !self.eat(")") {
                loop {
                    self.node("expr", |p| p.expr())?;
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            self.spans.push((start, self.last_end, "expr"));
            blocklike = false;
        }
        Ok(blocklike)
    }

    fn primary(&mut self) -> P<bool> {
        self.ws();
        let start = self.pos;
        let s = self.text.as_bytes();
        let c = *s.get(self.pos).ok_or(())?;
        let blocklike = if c.is_ascii_digit() {
            let end = s[start..].iter().position(|c| !c.is_ascii_digit()).map_or(s.len(), |p| start + p);
            self.pos = end;
            self.last_end = end;
            false
        } else if c == b'"' {
            let (_, end) = super::lex::string_literal(self.text, start).ok_or(())?;
            self.pos = end;
            self.last_end = end;
            false
        } else if c == b'(' {
            self.expect("(")?;
            if !self.eat(")") {
                self.expr()?;
                self.expect(")")?;
            }
            false
        } else if c == b'{' {
            self.block()?;
            true
        } else if self.at_keyword("if") {
            self.if_expr()?;
            true
        } else if self.at_keyword("match") {
            self.expect("match")?;
            self.expr()?;
            self.expect("{")?;
            while !self.eat("}") {
                self.node("arm", |p| {
                    if !p.eat("_") {
                        let s = p.text.as_bytes();
                        if p.peek().is_some_and(|c| c.is_ascii_digit()) {
                            let st = p.pos;
                            let end = s[st..].iter().position(|c| !c.is_ascii_digit()).map_or(s.len(), |q| st + q);
                            p.pos = end;
                            p.last_end = end;
                        } else {
                            p.ident()?;
                        }
                    }
                    if p.at_keyword("if") {
                        p.expect("if")?;
                        p.expr()?;
                    }
                    p.expect("=>")?;
                    p.node("expr", |p| p.expr())?;
                    Ok(())
                })?;
                self.eat(",");
            }
            true
        } else {
            self.ident()?;
            false
        };
        self.spans.push((start, self.last_end, "expr"));
        Ok(blocklike)
    }

    fn block(&mut self) -> P<()> {
        self.node("block", |p| {
            p.expect("{")?;
            p.seq()?;
            p.expect("}")
        })
    }

    fn if_expr(&mut self) -> P<()> {
        self.expect("if")?;
        self.expr()?;
        self.block()?;
        if self.eat("else") {
            if self.at_keyword("if") {
                self.node("expr", |p| p.if_expr())?;
            } else {
                self.block()?;
            }
        }
        Ok(())
    }
}

impl ParseOracle for MiniOracle {
    fn parse_file(&self, text: &str) -> bool {
        self.node_spans(text).is_some()
    }

    fn node_spans(&self, text: &str) -> Option<Vec<NodeSpan>> {
        let mut p = Parser::new(text);
        p.seq().ok()?;
        if !p.at_end() {
            return None;
        }
        let mut raw = vec![(0, text.len(), "file")];
        raw.append(&mut p.spans);
        Some(link_parents(raw))
    }

    fn parses_as(&self, text: &str, category: Category) -> bool {
        let mut p = Parser::new(text);
        let ok = match category {
            Category::Expr => p.expr().is_ok(),
            Category::Stmts | Category::Items => p.seq().is_ok(),
        };
        ok && p.at_end() && !(category == Category::Expr && text.trim().is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories() {
        let o = MiniOracle;
        assert_eq!(o.parse_unit("foo(0)"), Some(Category::Expr));
        assert_eq!(o.parse_unit("a + b * c"), Some(Category::Expr));
        assert_eq!(o.parse_unit("let x = 1; x"), Some(Category::Stmts));
        assert_eq!(o.parse_unit(""), Some(Category::Stmts));
        assert_eq!(o.parse_unit("foo("), None);
        assert_eq!(o.parse_unit("0)"), None);
        assert_eq!(o.parse_unit("if a < b { 1 } else if b < a { 2 } else { 3 }"), Some(Category::Expr));
    }

    #[test]
    fn parses_marker_shape() {
        let text = "match () {\n  _ if mutation_active(\"foo_1\") => {\n    foo(1)\n  }\n  _ => { // base\n    foo(0)\n  }\n}\n";
        assert!(MiniOracle.parse_file(text));
    }

    #[test]
    fn spans_nest_with_precedence() {
        let text = "x * (a + b);";
        let spans = MiniOracle.node_spans(text).unwrap();
        let inner = spans.iter().position(|s| &text[s.start..s.end] == "a + b").unwrap();
        let mut chain = vec![];
        let mut cur = Some(inner);
        while let Some(i) = cur {
            chain.push(&text[spans[i].start..spans[i].end]);
            cur = spans[i].parent;
        }
        assert!(chain.contains(&"(a + b)"));
        assert!(chain.contains(&"x * (a + b)"));
        assert_eq!(*chain.last().unwrap(), text);
        assert!(!spans.iter().any(|s| &text[s.start..s.end] == "x * (a"));
    }
}
