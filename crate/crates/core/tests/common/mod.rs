#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use mutforge::repr::FileMap;
use mutforge::{MutationBlock, MutationDocument, Segment, Variant};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use sha2::{Digest, Sha256};

pub const TAGS: [&str; 3] = ["easy", "small", "deep"];

const LINES: [&str; 12] = [
    "let x = 1;",
    "foo(a, b);",
    "if x < y {",
    "}",
    "return acc + 1;",
    "T(l, k2, v2, r)",
    "match t {",
    "E => T(E, k, v, E),",
    "x = x * 2;",
    "// note",
    "y",
    "",
];

fn line() -> impl Strategy<Value = String> {
    (prop::sample::select(&LINES[..]), 0usize..3).prop_map(|(l, depth)| {
        if l.is_empty() {
            "\n".to_string()
        } else {
            format!("{}{l}\n", "  ".repeat(depth))
        }
    })
}

fn lines(range: std::ops::Range<usize>) -> impl Strategy<Value = String> {
    prop::collection::vec(line(), range).prop_map(|v| v.concat())
}

fn tags() -> impl Strategy<Value = Vec<String>> {
    prop::sample::subsequence(&TAGS[..], 0..=2).prop_map(|v| v.into_iter().map(String::from).collect())
}

/// Shape of one block before names are assigned.
#[derive(Debug, Clone)]
struct BlockShape {
    tags: Vec<String>,
    base: String,
    variants: Vec<(Vec<String>, String)>,
    active: Option<usize>,
}

fn block_shape(max_variants: usize) -> impl Strategy<Value = BlockShape> {
    (
        tags(),
        lines(1..4),
        prop::collection::vec((tags(), lines(0..4)), 1..=max_variants),
        any::<prop::sample::Index>(),
        any::<bool>(),
    )
        .prop_map(|(tags, base, variants, pick, on)| {
            let active = on.then(|| pick.index(variants.len()));
            BlockShape {
                tags,
                base,
                variants,
                active,
            }
        })
}

/// Line-aligned documents: `files` files, at most `max_blocks` blocks in
/// total, each with at most `max_variants` variants and random tags. Names
/// are unique across the project.
pub fn project(max_files: usize, max_blocks: usize, max_variants: usize) -> impl Strategy<Value = Vec<MutationDocument>> {
    (1..=max_files)
        .prop_flat_map(move |files| {
            prop::collection::vec(
                (
                    prop::collection::vec((lines(0..3), block_shape(max_variants)), 0..=max_blocks.div_ceil(files)),
                    lines(0..3),
                ),
                files,
            )
        })
        .prop_map(move |files| {
            let mut next = 0;
            let mut docs = Vec::new();
            for (f, (blocks, tail)) in files.into_iter().enumerate() {
                let mut segments = Vec::new();
                for (code, shape) in blocks {
                    if next >= max_blocks {
                        break;
                    }
                    let name = format!("blk{next}");
                    next += 1;
                    segments.push(Segment::Code(code));
                    let variants = shape
                        .variants
                        .iter()
                        .enumerate()
                        .map(|(k, (tags, body))| Variant {
                            name: format!("{name}_{}", k + 1),
                            tags: tags.clone(),
                            body: body.clone(),
                        })
                        .collect();
                    let mut block = MutationBlock::new(name.clone(), shape.base, variants);
                    block.tags = shape.tags;
                    block.active = shape.active.map(|k| format!("{name}_{}", k + 1));
                    segments.push(Segment::Block(block));
                }
                segments.push(Segment::Code(tail));
                docs.push(MutationDocument::new(format!("src/f{f}.rs"), segments));
            }
            docs.retain(MutationDocument::has_blocks);
            docs
        })
}

/// Runs `check` on `cases` generated values; returns the first failure.
pub fn check_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn reset_all(docs: &[MutationDocument]) -> Vec<MutationDocument> {
    docs.iter()
        .cloned()
        .map(|mut d| {
            d.reset();
            d
        })
        .collect()
}

pub fn sha256(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Content hash of every file below `root` (hidden directories included).
pub fn tree_hashes(root: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in walk(root) {
        let rel = entry.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
        let bytes = std::fs::read(&entry).unwrap();
        out.insert(rel, Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect());
    }
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

pub fn without_state(hashes: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    hashes
        .iter()
        .filter(|(k, _)| !k.starts_with(".mutforge/"))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

pub fn write_tree(root: &Path, files: &FileMap) {
    for (path, text) in files {
        let full = root.join(path);
        std::fs::create_dir_all(full.parent().unwrap()).unwrap();
        std::fs::write(full, text).unwrap();
    }
}

pub fn fixture(rel: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// (name, tags)
pub type Mutant = (String, Vec<String>);

/// Random catalog and expression over it, for checking the planner.
#[derive(Debug, Clone)]
pub struct AlgebraCase {
    /// (block, [(mutant, tags)])
    pub blocks: Vec<(String, Vec<Mutant>)>,
    pub expr: Expr,
}

/// Expression tree independent of the library's own.
#[derive(Debug, Clone)]
pub enum Expr {
    Mutant(String),
    Block(String),
    TagSum(String),
    TagProd(String),
    Seq(Box<Expr>, Box<Expr>),
    Par(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn nodes(&self) -> usize {
        match self {
            Expr::Seq(l, r) | Expr::Par(l, r) => 1 + l.nodes() + r.nodes(),
            _ => 1,
        }
    }

    /// Source text with minimal parentheses.
    pub fn text(&self) -> String {
        match self {
            Expr::Mutant(n) | Expr::Block(n) => n.clone(),
            Expr::TagSum(t) => format!("+{t}"),
            Expr::TagProd(t) => format!("*{t}"),
            Expr::Seq(l, r) => {
                let r = match **r {
                    Expr::Seq(..) => format!("({})", r.text()),
                    _ => r.text(),
                };
                format!("{} + {r}", l.text())
            }
            Expr::Par(l, r) => {
                let wrap = |e: &Expr, right: bool| match e {
                    Expr::Seq(..) => format!("({})", e.text()),
                    Expr::Par(..) if right => format!("({})", e.text()),
                    _ => e.text(),
                };
                format!("{} * {}", wrap(l, false), wrap(r, true))
            }
        }
    }
}

pub type Sets = Vec<BTreeSet<String>>;

/// Failures the reference evaluator distinguishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    EmptyTag,
    Exclusion,
}

/// Direct denotation: `+` concatenates plans, `*` takes the ordered cross
/// product of unions, and any product holding two mutants of one block is
/// rejected.
pub fn brute_plan(case: &AlgebraCase) -> Result<Sets, EvalError> {
    let block_of: BTreeMap<&str, &str> = case
        .blocks
        .iter()
        .flat_map(|(b, ms)| ms.iter().map(move |(m, _)| (m.as_str(), b.as_str())))
        .collect();
    let tagged = |t: &str| -> Vec<String> {
        case.blocks
            .iter()
            .flat_map(|(_, ms)| ms.iter())
            .filter(|(_, tags)| tags.iter().any(|x| x == t))
            .map(|(m, _)| m.clone())
            .collect()
    };
    fn eval(e: &Expr, case: &AlgebraCase, tagged: &dyn Fn(&str) -> Vec<String>) -> Result<Sets, EvalError> {
        Ok(match e {
            Expr::Mutant(m) => vec![BTreeSet::from([m.clone()])],
            Expr::Block(b) => case
                .blocks
                .iter()
                .find(|(n, _)| n == b)
                .unwrap()
                .1
                .iter()
                .map(|(m, _)| BTreeSet::from([m.clone()]))
                .collect(),
            Expr::TagSum(t) => {
                let ms = tagged(t);
                if ms.is_empty() {
                    return Err(EvalError::EmptyTag);
                }
                ms.into_iter().map(|m| BTreeSet::from([m])).collect()
            }
            Expr::TagProd(t) => {
                let ms = tagged(t);
                if ms.is_empty() {
                    return Err(EvalError::EmptyTag);
                }
                vec![ms.into_iter().collect()]
            }
            Expr::Seq(l, r) => {
                let (l, r) = (eval(l, case, tagged), eval(r, case, tagged));
                let mut out = l?;
                out.extend(r?);
                out
            }
            Expr::Par(l, r) => {
                let (l, r) = (eval(l, case, tagged), eval(r, case, tagged));
                let (l, r) = (l?, r?);
                let mut out = Vec::new();
                for a in &l {
                    for b in &r {
                        out.push(a.union(b).cloned().collect());
                    }
                }
                out
            }
        })
    }
    let sets = eval(&case.expr, case, &tagged)?;
    for s in &sets {
        let blocks: BTreeSet<&str> = s.iter().map(|m| block_of[m.as_str()]).collect();
        if blocks.len() != s.len() {
            return Err(EvalError::Exclusion);
        }
    }
    Ok(sets)
}

fn expr_tree(mutants: Vec<String>, blocks: Vec<String>, max_nodes: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        4 => prop::sample::select(mutants).prop_map(Expr::Mutant),
        1 => prop::sample::select(blocks).prop_map(Expr::Block),
        1 => prop::sample::select(&TAGS[..]).prop_map(|t| Expr::TagSum(t.into())),
        1 => prop::sample::select(&TAGS[..]).prop_map(|t| Expr::TagProd(t.into())),
    ];
    leaf.prop_recursive(4, max_nodes as u32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Seq(Box::new(l), Box::new(r))),
            (inner.clone(), inner).prop_map(|(l, r)| Expr::Par(Box::new(l), Box::new(r))),
        ]
    })
    .prop_filter("too many nodes", move |e| e.nodes() <= max_nodes)
}

/// At most `max_mutants` mutants in blocks of one to three, tags drawn from
/// three names, expressions of at most `max_nodes` nodes.
pub fn algebra_case(max_mutants: usize, max_nodes: usize) -> impl Strategy<Value = AlgebraCase> {
    prop::collection::vec((1usize..=3, prop::collection::vec(tags(), 3)), 1..=max_mutants)
        .prop_map(move |shapes| {
            let mut blocks = Vec::new();
            let mut m = 0;
            for (b, (size, tags)) in shapes.into_iter().enumerate() {
                let mut ms = Vec::new();
                for t in tags.into_iter().take(size) {
                    if m == max_mutants {
                        break;
                    }
                    ms.push((format!("m{m}"), t));
                    m += 1;
                }
                if !ms.is_empty() {
                    blocks.push((format!("b{b}"), ms));
                }
            }
            blocks
        })
        .prop_flat_map(move |blocks| {
            let mutants: Vec<String> = blocks.iter().flat_map(|(_, ms)| ms.iter().map(|(m, _)| m.clone())).collect();
            let names: Vec<String> = blocks.iter().map(|(b, _)| b.clone()).collect();
            (Just(blocks), expr_tree(mutants, names, max_nodes))
        })
        .prop_map(|(blocks, expr)| AlgebraCase { blocks, expr })
}

pub fn catalog_of(case: &AlgebraCase) -> mutforge::algebra::Catalog {
    let mut cat = mutforge::algebra::Catalog::default();
    for (b, ms) in &case.blocks {
        cat.add_block(b, ms.iter().map(|(m, t)| (m.as_str(), t.clone())));
    }
    cat
}

/// The planner agrees with [`brute_plan`] on `case`.
pub fn planner_agrees(case: &AlgebraCase) -> Result<(), String> {
    let got = mutforge::algebra::plan(&case.expr.text(), &catalog_of(case));
    match (brute_plan(case), got) {
        (Ok(want), Ok(got)) if want == got => Ok(()),
        (Err(EvalError::EmptyTag), Err(mutforge::Error::EmptyTag(_))) => Ok(()),
        (Err(EvalError::Exclusion), Err(mutforge::Error::MutualExclusion { .. })) => Ok(()),
        (want, got) => Err(format!("{}: expected {want:?}, got {got:?}", case.expr.text())),
    }
}

pub const STMTS: [&str; 8] = [
    "let x = 1;",
    "let y = x + 2;",
    "f(x, y);",
    "let w = g(x) * 3;",
    "if x < y { h(x); }",
    "let z = (x - y) % 5;",
    "print(\"done\");",
    "acc(x, -y);",
];

pub fn stmt_lines(range: std::ops::Range<usize>) -> impl Strategy<Value = String> {
    prop::collection::vec((prop::sample::select(&STMTS[..]), 0usize..2), range)
        .prop_map(|v| v.into_iter().map(|(s, d)| format!("{}{s}\n", "  ".repeat(d))).collect())
}

/// Mini-grammar programs whose blocks span whole statements.
pub fn mini_project() -> impl Strategy<Value = Vec<MutationDocument>> {
    prop::collection::vec(
        (
            prop::collection::vec((stmt_lines(0..3), stmt_lines(1..3), prop::collection::vec(stmt_lines(0..3), 1..4)), 1..4),
            stmt_lines(0..3),
        ),
        1..3,
    )
    .prop_map(|files| {
        let mut next = 0;
        files
            .into_iter()
            .enumerate()
            .map(|(f, (blocks, tail))| {
                let mut segments = Vec::new();
                for (code, base, variants) in blocks {
                    let name = format!("m{next}");
                    next += 1;
                    segments.push(Segment::Code(code));
                    let variants = variants
                        .into_iter()
                        .enumerate()
                        .map(|(k, body)| Variant::new(format!("{name}_{}", k + 1), body))
                        .collect();
                    segments.push(Segment::Block(MutationBlock::new(name, base, variants)));
                }
                segments.push(Segment::Code(tail));
                MutationDocument::new(format!("src/p{f}.mini"), segments)
            })
            .collect()
    })
}

/// Reset project with exactly `mutants` mutants spread over one to three
/// files. `mini` selects mini-grammar statements (files `src/p*.mini`),
/// otherwise the generic line pool (files `src/f*.rs`).
pub fn project_with_mutants(mutants: usize, mini: bool) -> BoxedStrategy<Vec<MutationDocument>> {
    let lines_in = move |r: std::ops::Range<usize>| -> BoxedStrategy<String> {
        if mini {
            stmt_lines(r).boxed()
        } else {
            lines(r).boxed()
        }
    };
    let shape = (
        lines_in(0..3),
        tags(),
        lines_in(1..3),
        prop::collection::vec((tags(), lines_in(0..3)), 1..=5),
    );
    (1usize..=3, prop::collection::vec(shape, mutants), lines_in(0..3))
        .prop_map(move |(files, shapes, tail)| {
            let mut blocks = Vec::new();
            let mut left = mutants;
            for (code, tags, base, mut variants) in shapes {
                if left == 0 {
                    break;
                }
                variants.truncate(left);
                left -= variants.len();
                blocks.push((code, tags, base, variants));
            }
            let count = blocks.len();
            let mut segments: Vec<Vec<Segment>> = vec![Vec::new(); files.min(count)];
            let per = segments.len();
            for (i, (code, tags, base, variants)) in blocks.into_iter().enumerate() {
                let name = format!("blk{i}");
                let variants = variants
                    .into_iter()
                    .enumerate()
                    .map(|(k, (tags, body))| Variant {
                        name: format!("{name}_{}", k + 1),
                        tags,
                        body,
                    })
                    .collect();
                let mut block = MutationBlock::new(name, base, variants);
                block.tags = tags;
                let f = i * per / count;
                segments[f].push(Segment::Code(code));
                segments[f].push(Segment::Block(block));
            }
            segments
                .into_iter()
                .enumerate()
                .map(|(f, mut segs)| {
                    segs.push(Segment::Code(tail.clone()));
                    let path = if mini { format!("src/p{f}.mini") } else { format!("src/f{f}.rs") };
                    MutationDocument::new(path, segs)
                })
                .collect()
        })
        .boxed()
}

/// Writes reset `docs` below `root` in `repr` form and opens the project.
/// In-AST projects use the mini oracle.
pub fn materialize(root: &Path, repr: mutforge::repr::Representation, docs: &[MutationDocument]) -> mutforge::project::Project {
    use mutforge::repr::{OracleKind, Representation, Settings};
    let settings = Settings {
        profile: None,
        oracle: (repr == Representation::Inast).then_some(OracleKind::Mini),
    };
    let (_, files) = mutforge::convert::convert_documents(docs, repr, &settings).unwrap();
    write_tree(root, &files);
    let mut state = mutforge::project::State::new(repr);
    state.oracle = settings.oracle;
    mutforge::project::Project::init(root, state).unwrap()
}

/// Set→unset and set→reset restore every byte for each mutant; in-place
/// representations never touch a source byte. Returns the first violation.
pub fn check_activation(root: &Path, repr: mutforge::repr::Representation, docs: &[MutationDocument]) -> Result<(), String> {
    use mutforge::project::Project;
    let mut p = materialize(root, repr, docs);
    let clean = tree_hashes(root);
    let mutants: Vec<String> = p.catalog().mutants.iter().map(|m| m.name.clone()).collect();
    for m in &mutants {
        for undo in ["unset", "reset"] {
            p.set_active(m).map_err(|e| format!("set {m}: {e}"))?;
            let reopened = Project::open(root).map_err(|e| format!("reopen after set {m}: {e}"))?;
            if reopened.active_set() != BTreeSet::from([m.clone()]) {
                return Err(format!("{repr}: after set {m} the active set is {:?}", reopened.active_set()));
            }
            let mutated = tree_hashes(root);
            if !repr.rewrites_sources() && without_state(&mutated) != without_state(&clean) {
                return Err(format!("{repr}: set {m} changed source bytes"));
            }
            if repr.rewrites_sources() && mutated == clean && !same_as_base(&reopened, m) {
                return Err(format!("{repr}: set {m} left the tree untouched"));
            }
            match undo {
                "unset" => p.unset_active(m),
                _ => p.reset(),
            }
            .map_err(|e| format!("{undo} {m}: {e}"))?;
            if tree_hashes(root) != clean {
                return Err(format!("{repr}: set {m} then {undo} did not restore the tree"));
            }
        }
    }
    Ok(())
}

/// The variant's body equals its block's base, so activating it is
/// invisible in the text.
fn same_as_base(p: &mutforge::project::Project, mutant: &str) -> bool {
    p.docs
        .iter()
        .flat_map(|d| d.blocks())
        .find_map(|b| b.variant(mutant).map(|v| v.body == b.base))
        .unwrap_or(false)
}
