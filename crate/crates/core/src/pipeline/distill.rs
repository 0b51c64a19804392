//! Turns a validation error into a reusable negative constraint.

use crate::scene::dsl::{skill, skill_names, BlueprintError};
use crate::scene::{ConnectorKind, ShapeKind};

use super::ledger::ExperienceEntry;

fn norm(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Signature and constraint text for `err`. The signature names the code and
/// the offending construct but never a document-specific element id.
pub fn constraint_for(err: &BlueprintError) -> (String, String) {
    let skill_name = err.skill.as_deref().unwrap_or("");
    let param = err.param.as_deref().unwrap_or("");
    let value = err.value.as_deref().unwrap_or("");
    let construct = match err.code.as_str() {
        "UNKNOWN_PARAM" | "MISSING_PARAM" | "INVALID_VALUE" => format!("{}.{}", norm(skill_name), norm(param)),
        "UNKNOWN_SKILL" => norm(skill_name),
        "INVALID_SHAPE_KIND" | "INVALID_CONNECTOR_KIND" => norm(value),
        "SYNTAX" | "UNKNOWN_FIELD" => norm(param),
        _ => norm(skill_name),
    };
    let signature = format!("{}:{}", err.code, construct);
    let text = match err.code.as_str() {
        "UNKNOWN_PARAM" => {
            let valid = skill(skill_name).map(|s| s.param_list()).unwrap_or_default();
            format!("NEVER pass parameter '{param}' to skill '{skill_name}'; valid parameters are {valid}")
        }
        "MISSING_PARAM" => {
            let required = skill(skill_name).map(|s| s.required.join(", ")).unwrap_or_default();
            format!("NEVER call skill '{skill_name}' without '{param}'; always provide {required}")
        }
        "UNKNOWN_SKILL" => format!("NEVER call skill '{skill_name}'; use one of {} instead", skill_names()),
        "INVALID_SHAPE_KIND" => format!("NEVER use shape_kind '{value}'; use one of {} instead", ShapeKind::valid_list()),
        "INVALID_CONNECTOR_KIND" => {
            let kinds: Vec<&str> = ConnectorKind::ALL.iter().map(|k| k.as_str()).collect();
            format!("NEVER use connector kind '{value}'; use one of {} instead", kinds.join(", "))
        }
        "INVALID_VALUE" => format!("NEVER give '{param}' of '{skill_name}' a value like '{value}'; {}", err.message),
        "DANGLING_ENDPOINT" => "NEVER connect to an element id that was not created earlier in the document".into(),
        "ENDPOINT_NOT_NODE" => "NEVER use a connector id as a connector endpoint; connect shapes only".into(),
        "SELF_LOOP" => "NEVER connect an element to itself".into(),
        "DUPLICATE_ID" => "NEVER reuse an element id; every id must be unique in the document".into(),
        "Z_ORDER" => "NEVER place a container after the elements it encloses; emit containers first".into(),
        "UNRESOLVED_ASSET" => "NEVER reference an asset id that is not declared in 'assets'".into(),
        "EMPTY_TEXT" => "NEVER create a text element with empty text".into(),
        "SYNTAX" => "NEVER emit anything except one valid JSON document; no comments, prose or trailing commas".into(),
        "UNKNOWN_FIELD" => format!("NEVER add the top-level field '{param}'; use only canvas, assets and ops"),
        _ => format!("NEVER repeat this mistake: {}", err.message),
    };
    (signature, text)
}

pub fn distill_experience(err: &BlueprintError, created_at: u64) -> ExperienceEntry {
    let (error_signature, constraint_text) = constraint_for(err);
    ExperienceEntry {
        error_signature,
        constraint_text,
        hit_count: 1,
        created_at,
    }
}
