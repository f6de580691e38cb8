//! Widening of block regions to the smallest syntactic unit that holds every
//! variant.

use super::marker::splice_marker;
use super::oracle::{NodeSpan, ParseOracle};
use crate::error::{Error, Result};
use crate::model::{MutationBlock, MutationDocument, Segment};

fn trimmed(text: &str, start: usize, end: usize) -> (usize, usize) {
    let region = &text[start..end];
    let lead = region.len() - region.trim_start().len();
    let trail = region.len() - region.trim_end().len();
    if lead == region.len() {
        (start, start)
    } else {
        (start + lead, end - trail)
    }
}

/// Widens block `index` of `doc` to the smallest enclosing node whose
/// spliced base and variant texts all parse as one common category and
/// whose replacement by the dispatch construct leaves the file parseable.
/// Every activated program text is unchanged.
pub fn normalize_block(doc: &MutationDocument, index: usize, oracle: &dyn ParseOracle) -> Result<MutationDocument> {
    let reset = doc.reset_text();
    let spans = oracle
        .node_spans(&reset)
        .ok_or_else(|| Error::parse(&doc.path, 0, "reset file does not parse"))?;
    let regions = doc.block_spans();
    let (s, e) = (regions[index].start, regions[index].end);
    let block = doc.blocks().nth(index).expect("block index in range").clone();
    let (ts, te) = trimmed(&reset, s, e);

    let deepest = spans
        .iter()
        .enumerate()
        .filter(|(_, n)| n.contains(ts, te))
        .min_by_key(|(i, n)| (n.end - n.start, std::cmp::Reverse(*i)))
        .map(|(i, _)| i);
    let mut ranges = Vec::new();
    if let Some(run) = statement_run(&spans, ts, te) {
        ranges.push(run);
    }
    let mut candidate = deepest;
    while let Some(c) = candidate {
        ranges.push((spans[c].start, spans[c].end));
        candidate = spans[c].parent;
    }
    for (ns, ne) in ranges {
        let (ws, we) = (ns.min(s), ne.max(e));
        let splice = |body: &str| format!("{}{body}{}", &reset[ws..s], &reset[e..we]);
        let mut widened = MutationBlock {
            base: splice(&block.base),
            ..block.clone()
        };
        for v in &mut widened.variants {
            v.body = splice(&v.body);
        }
        let bodies: Vec<&str> = widened.bodies().collect();
        if oracle.common_unit(&bodies).is_none() {
            continue;
        }
        if !oracle.parse_file(&splice_marker(&reset, ws, we, &widened)) {
            continue;
        }
        if let Some((j, _)) = regions
            .iter()
            .enumerate()
            .find(|&(j, r)| {
                j != index
                    && if r.start == r.end {
                        ws < r.start && r.start < we
                    } else {
                        r.start < we && ws < r.end
                    }
            })
        {
            let other = doc.blocks().nth(j).map(|b| b.name.clone()).unwrap_or_default();
            return Err(Error::NoValidUnit(format!(
                "block `{}`: smallest valid unit overlaps block `{other}`",
                block.name
            )));
        }
        return Ok(rebuild(doc, index, ws, we, widened, &reset, &regions));
    }
    Err(Error::NoValidUnit(format!(
        "block `{}`: no enclosing syntactic unit holds every variant",
        block.name
    )))
}

/// The span of two or more consecutive statements of one sequence that
/// together cover exactly `[start, end)`.
fn statement_run(spans: &[NodeSpan], start: usize, end: usize) -> Option<(usize, usize)> {
    if start == end {
        return None;
    }
    let first = spans.iter().position(|n| n.start == start && n.kind == "stmt")?;
    let parent = spans[first].parent?;
    if !matches!(spans[parent].kind, "seq" | "stmts") {
        return None;
    }
    let siblings: Vec<&NodeSpan> = spans.iter().filter(|n| n.parent == Some(parent)).collect();
    let at = siblings.iter().position(|n| n.start == start)?;
    let last = siblings[at..].iter().position(|n| n.end == end)?;
    (last > 0).then_some((start, end))
}

fn rebuild(
    doc: &MutationDocument,
    index: usize,
    ws: usize,
    we: usize,
    widened: MutationBlock,
    reset: &str,
    regions: &[std::ops::Range<usize>],
) -> MutationDocument {
    let mut segments = Vec::new();
    let mut cursor = 0;
    for (j, b) in doc.blocks().enumerate() {
        let (start, end, block) = if j == index {
            (ws, we, widened.clone())
        } else {
            (regions[j].start, regions[j].end, b.clone())
        };
        segments.push(Segment::Code(reset[cursor..start].to_string()));
        segments.push(Segment::Block(block));
        cursor = end;
    }
    segments.push(Segment::Code(reset[cursor..].to_string()));
    MutationDocument::new(doc.path.clone(), segments)
}

/// Normalizes every block in turn.
pub fn normalize_document(doc: &MutationDocument, oracle: &dyn ParseOracle) -> Result<MutationDocument> {
    let mut doc = doc.clone();
    for i in 0..doc.blocks().count() {
        doc = normalize_block(&doc, i, oracle)?;
    }
    Ok(doc)
}
