//! Prompt templates. Placeholders are `{name}` and are replaced verbatim.

use crate::scene::dsl::SKILLS;

pub const PLAN: &str = include_str!("prompts/plan.txt");
pub const BLUEPRINT: &str = include_str!("prompts/blueprint.txt");
pub const ICONS: &str = include_str!("prompts/icons.txt");
pub const GENERATE_SYSTEM: &str = include_str!("prompts/generate_system.txt");
pub const GENERATE: &str = include_str!("prompts/generate.txt");
pub const DEBUG: &str = include_str!("prompts/debug.txt");
pub const CRITIQUE_SYSTEM: &str = include_str!("prompts/critique_system.txt");
pub const CRITIQUE: &str = include_str!("prompts/critique.txt");
pub const REFINE: &str = include_str!("prompts/refine.txt");

pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (k, v) in vars {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    out
}

fn purpose(skill: &str) -> &'static str {
    match skill {
        "add_container" => "a background panel grouping related elements; optional title at the top",
        "add_block" => "a labelled shape; shape_kind is rect, rounded_rect, ellipse, diamond or folded_corner",
        "add_text" => "a free text label; align is left, center or right",
        "add_icon" => "a raster pictogram from a declared asset",
        "add_connector" => "an arrow between two element ids; kind is elbow, straight or curve; arrow_head is none, small, medium or large; line_width in pt",
        _ => "",
    }
}

/// Reference list of skills and their parameters.
pub fn skills_doc() -> String {
    let mut out = String::new();
    for s in SKILLS {
        out.push_str(&format!(
            "- {}: {}. Required: {}. Optional: {}.\n",
            s.name,
            purpose(s.name),
            s.required.join(", "),
            s.optional.join(", ")
        ));
    }
    out.push_str("Colors are six-digit hex strings such as \"1F4E79\"; alpha is between 0 and 1.\n");
    out
}

/// Bulleted constraints, or "(none)".
pub fn constraint_block(constraints: &[&str]) -> String {
    if constraints.is_empty() {
        "(none)".into()
    } else {
        constraints.iter().map(|c| format!("- {c}\n")).collect::<String>().trim_end().to_string()
    }
}
