//! Mutation expressions: `+` sequences, `*` combines (higher-order mutants),
//! `+tag` / `*tag` expand over tagged mutants and a bare mutation name
//! expands to the sum of its mutants.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := ident | '+' ident | '*' ident | '(' expr ')'
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::MutationDocument;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MutationExpr {
    Seq(Box<MutationExpr>, Box<MutationExpr>),
    Par(Box<MutationExpr>, Box<MutationExpr>),
    TagSum(String),
    TagProd(String),
    /// A bare identifier before resolution.
    Name(String),
    MutantRef(String),
    MutationRef(String),
}

use MutationExpr::*;

impl MutationExpr {
    pub fn seq(l: MutationExpr, r: MutationExpr) -> Self {
        Seq(Box::new(l), Box::new(r))
    }

    pub fn par(l: MutationExpr, r: MutationExpr) -> Self {
        Par(Box::new(l), Box::new(r))
    }

    pub fn mutant(name: &str) -> Self {
        MutantRef(name.to_string())
    }

    /// Number of `+` and `*` nodes.
    pub fn internal_nodes(&self) -> usize {
        match self {
            Seq(l, r) | Par(l, r) => 1 + l.internal_nodes() + r.internal_nodes(),
            _ => 0,
        }
    }
}

/// Fully parenthesized form.
impl fmt::Display for MutationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seq(l, r) => write!(f, "({l} + {r})"),
            Par(l, r) => write!(f, "({l} * {r})"),
            TagSum(t) => write!(f, "+{t}"),
            TagProd(t) => write!(f, "*{t}"),
            Name(n) | MutantRef(n) | MutationRef(n) => f.write_str(n),
        }
    }
}

/// Mutants activated together.
pub type MutantSet = BTreeSet<String>;

/// Mutant sets to try one after another.
pub type MutantPlan = Vec<MutantSet>;

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.text[self.pos..].chars().next()
    }

    fn err(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let rest = &self.text[self.pos..];
        let first = rest.chars().next()?;
        if !(first.is_ascii_alphabetic() || first == '_') {
            return None;
        }
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        self.pos += len;
        Some(rest[..len].to_string())
    }

    fn expr(&mut self) -> Result<MutationExpr> {
        let mut e = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            e = MutationExpr::seq(e, self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<MutationExpr> {
        let mut e = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            e = MutationExpr::par(e, self.factor()?);
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<MutationExpr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("`+`, `*` or `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(op @ ('+' | '*')) => {
                self.pos += 1;
                let tag = self.ident().ok_or_else(|| self.err("tag name"))?;
                Ok(if op == '+' { TagSum(tag) } else { TagProd(tag) })
            }
            _ => self
                .ident()
                .map(Name)
                .ok_or_else(|| self.err("mutant, mutation, `+tag`, `*tag` or `(`")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<MutationExpr> {
    let mut p = Parser { text, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("`+`, `*` or end of input"));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantInfo {
    pub name: String,
    pub block: String,
    /// Variant tags plus tags inherited from the block.
    pub tags: Vec<String>,
}

/// Every mutant of a project in (file, anchor, variant) order.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    pub mutants: Vec<MutantInfo>,
    blocks: BTreeMap<String, Vec<String>>,
}

impl Catalog {
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a MutationDocument>) -> Self {
        let mut docs: Vec<_> = docs.into_iter().collect();
        docs.sort_by(|a, b| a.path.cmp(&b.path));
        let mut cat = Catalog::default();
        for doc in docs {
            for b in doc.blocks() {
                cat.add_block(&b.name, b.variants.iter().map(|v| (v.name.as_str(), b.effective_tags(v).map(str::to_string).collect())));
            }
        }
        cat
    }

    pub fn add_block<'a>(&mut self, block: &str, variants: impl IntoIterator<Item = (&'a str, Vec<String>)>) {
        let names = self.blocks.entry(block.to_string()).or_default();
        for (name, tags) in variants {
            names.push(name.to_string());
            self.mutants.push(MutantInfo {
                name: name.to_string(),
                block: block.to_string(),
                tags,
            });
        }
    }

    pub fn block_of(&self, mutant: &str) -> Option<&str> {
        self.mutants.iter().find(|m| m.name == mutant).map(|m| m.block.as_str())
    }

    pub fn variants_of(&self, block: &str) -> Option<&[String]> {
        self.blocks.get(block).map(Vec::as_slice)
    }

    pub fn tagged(&self, tag: &str) -> Vec<&str> {
        self.mutants
            .iter()
            .filter(|m| m.tags.iter().any(|t| t == tag))
            .map(|m| m.name.as_str())
            .collect()
    }
}

fn fold(names: &[&str], join: fn(MutationExpr, MutationExpr) -> MutationExpr) -> MutationExpr {
    let mut it = names.iter().map(|n| MutationExpr::mutant(n));
    let first = it.next().expect("nonempty");
    it.fold(first, join)
}

/// Replaces tags and mutation names by the mutants they stand for.
pub fn expand(expr: &MutationExpr, cat: &Catalog) -> Result<MutationExpr> {
    Ok(match expr {
        Seq(l, r) => MutationExpr::seq(expand(l, cat)?, expand(r, cat)?),
        Par(l, r) => MutationExpr::par(expand(l, cat)?, expand(r, cat)?),
        TagSum(t) | TagProd(t) => {
            let names = cat.tagged(t);
            if names.is_empty() {
                return Err(Error::EmptyTag(t.clone()));
            }
            fold(&names, if matches!(expr, TagSum(_)) { MutationExpr::seq } else { MutationExpr::par })
        }
        Name(n) => {
            let is_mutant = cat.block_of(n).is_some();
            let is_block = cat.variants_of(n).is_some();
            match (is_mutant, is_block) {
                (true, true) => return Err(Error::AmbiguousName(n.clone())),
                (true, false) => MutationExpr::mutant(n),
                (false, true) => expand(&MutationRef(n.clone()), cat)?,
                (false, false) => return Err(Error::UnknownName(n.clone())),
            }
        }
        MutantRef(n) => {
            if cat.block_of(n).is_none() {
                return Err(Error::UnknownName(n.clone()));
            }
            expr.clone()
        }
        MutationRef(b) => {
            let names = cat.variants_of(b).ok_or_else(|| Error::UnknownName(b.clone()))?;
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            fold(&names, MutationExpr::seq)
        }
    })
}

/// Pushes every `*` below every `+` using the distributive laws.
fn distribute(e: MutationExpr) -> MutationExpr {
    match e {
        Seq(l, r) => MutationExpr::seq(distribute(*l), distribute(*r)),
        Par(l, r) => match (distribute(*l), distribute(*r)) {
            (Seq(a, b), r) => MutationExpr::seq(
                distribute(MutationExpr::par(*a, r.clone())),
                distribute(MutationExpr::par(*b, r)),
            ),
            (l, Seq(a, b)) => MutationExpr::seq(
                distribute(MutationExpr::par(l.clone(), *a)),
                distribute(MutationExpr::par(l, *b)),
            ),
            (l, r) => MutationExpr::par(l, r),
        },
        leaf => leaf,
    }
}

fn products(e: &MutationExpr, out: &mut Vec<MutationExpr>) {
    match e {
        Seq(l, r) => {
            products(l, out);
            products(r, out);
        }
        other => out.push(other.clone()),
    }
}

fn leaves(e: &MutationExpr, out: &mut MutantSet) -> Result<()> {
    match e {
        Par(l, r) => {
            leaves(l, out)?;
            leaves(r, out)
        }
        MutantRef(n) => {
            out.insert(n.clone());
            Ok(())
        }
        other => Err(Error::Domain(format!("`{other}` is not expanded"))),
    }
}

/// Sum-of-products form of an expanded expression. Products keep the order
/// in which the distribution derives them; duplicates are kept.
pub fn to_plan(expr: &MutationExpr, cat: &Catalog) -> Result<MutantPlan> {
    let mut terms = Vec::new();
    products(&distribute(expr.clone()), &mut terms);
    let mut plan = Vec::with_capacity(terms.len());
    for t in terms {
        let mut set = MutantSet::new();
        leaves(&t, &mut set)?;
        check_exclusive(&set, cat)?;
        plan.push(set);
    }
    Ok(plan)
}

/// Rejects a set holding two variants of one block.
pub fn check_exclusive(set: &MutantSet, cat: &Catalog) -> Result<()> {
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for m in set {
        let block = cat.block_of(m).ok_or_else(|| Error::UnknownName(m.clone()))?;
        if let Some(first) = seen.insert(block, m) {
            return Err(Error::MutualExclusion {
                block: block.to_string(),
                first: first.to_string(),
                second: m.clone(),
            });
        }
    }
    Ok(())
}

/// Parses, expands and plans an expression.
pub fn plan(text: &str, cat: &Catalog) -> Result<MutantPlan> {
    to_plan(&expand(&parse_expr(text)?, cat)?, cat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> Catalog {
        let mut c = Catalog::default();
        c.add_block(
            "insert",
            [
                ("insert_1", vec!["easy".to_string(), "small".to_string()]),
                ("insert_2", vec![]),
                ("insert_3", vec!["hard".to_string()]),
            ],
        );
        c.add_block("a_blk", [("a", vec!["easy".to_string()])]);
        c.add_block("b_blk", [("b", vec![])]);
        c.add_block("c_blk", [("c", vec![])]);
        c
    }

    fn set(names: &[&str]) -> MutantSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_expr("a + b * c").unwrap().to_string(), "(a + (b * c))");
        assert_eq!(parse_expr("(a + b) * c").unwrap().to_string(), "((a + b) * c)");
        assert_eq!(parse_expr("a + b + c").unwrap().to_string(), "((a + b) + c)");
        assert_eq!(parse_expr("a * b * c").unwrap().to_string(), "((a * b) * c)");
        assert_eq!(parse_expr("+easy + +hard * *x").unwrap().to_string(), "(+easy + (+hard * *x))");
        assert_eq!(parse_expr("a").unwrap(), Name("a".into()));
        assert_eq!(parse_expr("a ++ b").unwrap().to_string(), "(a + +b)");
        assert_eq!(
            parse_expr("insert_1 + insert_2").unwrap(),
            MutationExpr::seq(Name("insert_1".into()), Name("insert_2".into()))
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        for (text, pos) in [("a +", 3), ("(a", 2), ("a b", 2), ("+", 1), ("", 0), ("a + )", 4), ("+(a)", 1)] {
            match parse_expr(text) {
                Err(Error::Syntax { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn expansions() {
        let c = cat();
        assert_eq!(expand(&parse_expr("insert").unwrap(), &c).unwrap().to_string(), "((insert_1 + insert_2) + insert_3)");
        assert_eq!(expand(&parse_expr("+hard").unwrap(), &c).unwrap(), MutationExpr::mutant("insert_3"));
        assert_eq!(expand(&parse_expr("*easy").unwrap(), &c).unwrap().to_string(), "(insert_1 * a)");
        assert!(matches!(expand(&parse_expr("nope").unwrap(), &c), Err(Error::UnknownName(_))));
        assert!(matches!(expand(&parse_expr("+nope").unwrap(), &c), Err(Error::EmptyTag(_))));
        let mut amb = cat();
        amb.add_block("a", [("a_1", vec![])]);
        assert!(matches!(expand(&parse_expr("a").unwrap(), &amb), Err(Error::AmbiguousName(_))));
    }

    #[test]
    fn plans() {
        let c = cat();
        assert_eq!(plan("(a + b) * c", &c).unwrap(), vec![set(&["a", "c"]), set(&["b", "c"])]);
        assert_eq!(plan("a", &c).unwrap(), vec![set(&["a"])]);
        assert_eq!(plan("insert", &c).unwrap(), vec![set(&["insert_1"]), set(&["insert_2"]), set(&["insert_3"])]);
        assert_eq!(plan("a * a", &c).unwrap(), vec![set(&["a"])]);
        assert_eq!(plan("a + a", &c).unwrap(), vec![set(&["a"]), set(&["a"])]);
        assert_eq!(
            plan("(a + b) * (c + insert_2)", &c).unwrap(),
            vec![set(&["a", "c"]), set(&["a", "insert_2"]), set(&["b", "c"]), set(&["b", "insert_2"])]
        );
        assert!(matches!(plan("insert_1 * insert_2", &c), Err(Error::MutualExclusion { .. })));
        assert!(matches!(plan("insert * a", &c), Ok(p) if p.len() == 3));
    }
}
