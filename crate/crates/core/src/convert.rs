//! Conversion between representations through the document model.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::inast::normalize_document;
use crate::model::MutationDocument;
use crate::project::Project;
use crate::repr::{self, FileMap, Representation, Settings};

/// Prepares fully reset documents for `target` and renders them. In-AST
/// targets normalize every block with the settings' oracle; every other
/// target keeps the model as it is.
pub fn convert_documents(
    docs: &[MutationDocument],
    target: Representation,
    settings: &Settings,
) -> Result<(Vec<MutationDocument>, FileMap)> {
    let mut out = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut doc = doc.clone();
        doc.reset();
        let doc = match target {
            Representation::Inast => normalize_document(&doc, settings.oracle_kind().oracle())?,
            _ => doc,
        };
        out.push(doc);
    }
    let files = repr::render_files(target, &out, settings)?;
    Ok((out, files))
}

/// Rewrites the project in `target` form and replays its active mutants.
/// Converting to the current representation does nothing.
pub fn convert(project: &mut Project, target: Representation, settings: Settings) -> Result<()> {
    let source = project.representation();
    if source == target && (settings.oracle.is_none() || settings.oracle == project.state.oracle) {
        return Ok(());
    }
    let settings = Settings {
        profile: settings.profile.or_else(|| project.state.profile.clone()),
        oracle: settings.oracle.or(project.state.oracle),
    };
    let active: BTreeSet<String> = project.active_set();
    let (docs, rendered) = convert_documents(&project.docs, target, &settings)?;
    let stale: Vec<String> = project
        .files()
        .keys()
        .filter(|p| (source.is_artifact(p) || target.is_artifact(p)) && !rendered.contains_key(*p))
        .cloned()
        .collect();

    project.docs = docs;
    project.state.representation = target;
    project.state.oracle = if target == Representation::Inast { Some(settings.oracle_kind()) } else { None };
    project.state.profile = settings.profile;
    project.state.active.clear();
    project.write_all(rendered, &stale)?;
    project.activate_only(&active).map_err(|e| match e {
        Error::UnknownMutant(m) => Error::State {
            path: crate::project::STATE_FILE.into(),
            message: format!("mutant `{m}` was lost in conversion"),
        },
        e => e,
    })
}
