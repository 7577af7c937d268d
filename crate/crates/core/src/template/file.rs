//! Tab-separated template files:
//! `<direction> TAB <domain.path> TAB <intent> TAB <pattern>`, `#` comments.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use super::{compile_template, Direction, SlotCatalog, Template, TemplateError, TemplateLabels};
use crate::schema::{join_path, split_path, SchemaRegistry};

#[derive(Debug, Error)]
pub enum TemplateFileError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("line {line}: {source}")]
    Syntax {
        line: usize,
        #[source]
        source: TemplateError,
    },
    #[error("duplicate template id {0:?}")]
    DuplicateId(String),
}

/// Parses template records from `text`. Ids are `<prefix>:<line>` with the
/// line number zero-padded to four digits.
pub fn parse_templates(
    text: &str,
    prefix: &str,
    registry: &SchemaRegistry,
) -> Result<Vec<Template>, TemplateFileError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(TemplateFileError::Record {
                line,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let direction = match fields[0].trim() {
            "nlu" => Direction::Nlu,
            "nlg" => Direction::Nlg,
            other => {
                return Err(TemplateFileError::Record {
                    line,
                    message: format!("unknown direction {other:?}"),
                })
            }
        };
        let domain_path = split_path(fields[1].trim());
        let intent = fields[2].trim();
        match registry.domain_of(intent) {
            None => {
                return Err(TemplateFileError::Record {
                    line,
                    message: format!("unknown intent {intent:?}"),
                })
            }
            Some(owner) if owner != domain_path.as_slice() => {
                return Err(TemplateFileError::Record {
                    line,
                    message: format!(
                        "intent {intent:?} belongs to {}, not {}",
                        join_path(owner),
                        join_path(&domain_path)
                    ),
                })
            }
            Some(_) => {}
        }
        let labels = TemplateLabels::new(
            &format!("{prefix}:{line:04}"),
            direction,
            domain_path,
            intent,
        );
        let template = compile_template(fields[3], labels, registry as &dyn SlotCatalog)
            .map_err(|source| TemplateFileError::Syntax { line, source })?;
        out.push(template);
    }
    Ok(out)
}

pub fn load_template_file(
    path: impl AsRef<Path>,
    registry: &SchemaRegistry,
) -> Result<Vec<Template>, TemplateFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TemplateFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let prefix = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let templates = parse_templates(&text, &prefix, registry)?;
    log::debug!("loaded {} templates from {}", templates.len(), path.display());
    Ok(templates)
}

/// Loads several files, rejecting ids that collide across them.
pub fn load_template_files<P: AsRef<Path>>(
    paths: &[P],
    registry: &SchemaRegistry,
) -> Result<Vec<Template>, TemplateFileError> {
    let mut ids = BTreeSet::new();
    let mut out = Vec::new();
    for path in paths {
        for t in load_template_file(path, registry)? {
            if !ids.insert(t.id.clone()) {
                return Err(TemplateFileError::DuplicateId(t.id));
            }
            out.push(t);
        }
    }
    Ok(out)
}
