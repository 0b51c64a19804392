use std::collections::BTreeSet;

use roxmltree::Document;

use super::emit::NS_A;
use super::package::{self, part, resolve_target, ContentTypes, Parts, NS_R};
use super::ArchiveReport;

/// Relationship types a part of the given content type must carry.
const REQUIRED: &[(&str, &str, &str)] = &[
    ("presentationml.slide+xml", package::REL_LAYOUT, "slideLayout"),
    ("presentationml.slideLayout+xml", package::REL_MASTER, "slideMaster"),
    ("presentationml.slideMaster+xml", package::REL_THEME, "theme"),
    ("presentationml.presentation.main+xml", package::REL_SLIDE, "slide"),
];

fn is_xml(name: &str) -> bool {
    name.ends_with(".xml") || name.ends_with(".rels")
}

pub(super) fn validate(bytes: &[u8]) -> ArchiveReport {
    let mut report = ArchiveReport::default();
    let parts: Parts = match package::read_zip(bytes) {
        Ok(p) => p,
        Err(e) => {
            report.well_formed = false;
            report.malformed_parts.push(format!("archive: {e}"));
            return report;
        }
    };
    let names: BTreeSet<&str> = parts.iter().map(|(n, _)| n.as_str()).collect();

    let text_of = |name: &str| part(&parts, name).and_then(|b| std::str::from_utf8(b).ok());
    for (name, data) in &parts {
        if !is_xml(name) {
            continue;
        }
        let ok = std::str::from_utf8(data)
            .map_err(|e| e.to_string())
            .and_then(|t| Document::parse(t).map(|_| ()).map_err(|e| e.to_string()));
        if let Err(e) = ok {
            report.well_formed = false;
            report.malformed_parts.push(format!("{name}: {e}"));
        }
    }

    let content_types = match text_of(package::CONTENT_TYPES).map(ContentTypes::parse) {
        Some(Ok(ct)) => Some(ct),
        Some(Err(_)) => None,
        None => {
            report.missing_content_types.push(package::CONTENT_TYPES.to_string());
            None
        }
    };
    if let Some(ct) = &content_types {
        for name in &names {
            if *name != package::CONTENT_TYPES && ct.type_of(name).is_none() {
                report.missing_content_types.push(name.to_string());
            }
        }
        for over in ct.overrides.keys() {
            if !names.contains(over.as_str()) {
                report.unresolved_rels.push(format!("[Content_Types].xml -> {over} (override for a missing part)"));
            }
        }
    }

    // rels targets, and r:* references against the owning part's rels
    let mut sources: Vec<String> = vec![String::new()];
    sources.extend(names.iter().filter(|n| is_xml(n) && !n.ends_with(".rels")).map(|n| n.to_string()));
    for source in &sources {
        let rels_name = package::rels_path_for(source);
        let rels = text_of(&rels_name).and_then(|t| package::parse_rels(t).ok());
        if let Some(rels) = &rels {
            for r in rels.iter().filter(|r| !r.external) {
                let target = resolve_target(source, &r.target);
                if !names.contains(target.as_str()) {
                    report.unresolved_rels.push(format!("{rels_name}: {} -> {target}", r.id));
                }
            }
        }
        let label = if source.is_empty() { "package" } else { source.as_str() };
        if source.is_empty() {
            let has_doc = rels
                .as_ref()
                .is_some_and(|rs| rs.iter().any(|r| r.rel_type == package::REL_OFFICE_DOC));
            if !has_doc {
                report.unresolved_rels.push(format!("{label}: missing officeDocument relationship"));
            }
            continue;
        }
        if let Some(ct) = &content_types {
            if let Some(ty) = ct.type_of(source) {
                for (suffix, rel_type, what) in REQUIRED {
                    let has = rels.as_ref().is_some_and(|rs| rs.iter().any(|r| &r.rel_type == rel_type));
                    if ty.ends_with(suffix) && !has {
                        report.unresolved_rels.push(format!("{label}: missing {what} relationship"));
                    }
                }
            }
        }
        let Some(text) = text_of(source) else { continue };
        let Ok(doc) = Document::parse(text) else { continue };
        let ids: BTreeSet<&str> = rels.iter().flatten().map(|r| r.id.as_str()).collect();
        let mut seen = BTreeSet::new();
        for node in doc.descendants().filter(|n| n.is_element()) {
            for attr in node.attributes().filter(|a| a.namespace() == Some(NS_R)) {
                if !ids.contains(attr.value()) && seen.insert(attr.value().to_string()) {
                    report.unresolved_rels.push(format!("{label}: r:{} -> {} (no such relationship)", attr.name(), attr.value()));
                }
            }
        }

        // connection references must land on a shape in the same tree
        let shape_ids: BTreeSet<&str> = doc
            .descendants()
            .filter(|n| n.tag_name().name() == "cNvPr")
            .filter_map(|n| n.attribute("id"))
            .map(str::trim)
            .collect();
        for n in doc
            .descendants()
            .filter(|n| n.has_tag_name((NS_A, "stCxn")) || n.has_tag_name((NS_A, "endCxn")))
        {
            let target = n.attribute("id").unwrap_or("").trim();
            if !shape_ids.contains(target) {
                let owner = n
                    .ancestors()
                    .find_map(|a| {
                        a.children()
                            .find(|c| c.tag_name().name() == "cNvPr")
                            .and_then(|c| c.attribute("name"))
                    })
                    .unwrap_or("?");
                report
                    .dangling_connection_refs
                    .push(format!("{label}: connector '{owner}' {} -> shape {target}", n.tag_name().name()));
            }
        }
    }
    report
}
