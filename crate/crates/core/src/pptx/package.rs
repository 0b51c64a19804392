//! OPC package plumbing: deterministic zip I/O, relationships, content types.

use std::collections::BTreeMap;
use std::io::{Cursor, Read, Write};

use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipArchive, ZipWriter};

use super::PptxError;

pub const NS_REL: &str = "http://schemas.openxmlformats.org/package/2006/relationships";
pub const NS_CT: &str = "http://schemas.openxmlformats.org/package/2006/content-types";
pub const NS_R: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships";

pub const REL_OFFICE_DOC: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument";
pub const REL_SLIDE: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide";
pub const REL_LAYOUT: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideLayout";
pub const REL_MASTER: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideMaster";
pub const REL_THEME: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/theme";
pub const REL_PRES_PROPS: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/presProps";
pub const REL_IMAGE: &str = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/image";

pub const CONTENT_TYPES: &str = "[Content_Types].xml";

/// Ordered list of (part name, bytes); names have no leading slash.
pub type Parts = Vec<(String, Vec<u8>)>;

pub fn write_zip(parts: &Parts) -> Result<Vec<u8>, PptxError> {
    let options = SimpleFileOptions::default()
        .compression_method(CompressionMethod::Deflated)
        .compression_level(Some(6))
        .last_modified_time(DateTime::default())
        .unix_permissions(0o644);
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
    for (name, data) in parts {
        zip.start_file(name.as_str(), options)
            .map_err(|e| PptxError::Zip(e.to_string()))?;
        zip.write_all(data).map_err(|e| PptxError::Zip(e.to_string()))?;
    }
    let cursor = zip.finish().map_err(|e| PptxError::Zip(e.to_string()))?;
    Ok(cursor.into_inner())
}

/// Reads every entry; fails closed on any zip error.
pub fn read_zip(bytes: &[u8]) -> Result<Parts, PptxError> {
    let mut archive = ZipArchive::new(Cursor::new(bytes)).map_err(|e| PptxError::NotZip(e.to_string()))?;
    let mut parts = Vec::with_capacity(archive.len());
    for i in 0..archive.len() {
        let mut file = archive.by_index(i).map_err(|e| PptxError::NotZip(e.to_string()))?;
        if file.is_dir() {
            continue;
        }
        let mut data = Vec::with_capacity(file.size() as usize);
        file.read_to_end(&mut data).map_err(|e| PptxError::NotZip(e.to_string()))?;
        parts.push((file.name().trim_start_matches('/').to_string(), data));
    }
    Ok(parts)
}

pub fn part<'a>(parts: &'a Parts, name: &str) -> Option<&'a [u8]> {
    parts.iter().find(|(n, _)| n == name).map(|(_, d)| d.as_slice())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rel {
    pub id: String,
    pub rel_type: String,
    pub target: String,
    pub external: bool,
}

/// `ppt/slides/slide1.xml` -> `ppt/slides/_rels/slide1.xml.rels`; the package rels for "".
pub fn rels_path_for(part: &str) -> String {
    match part.rsplit_once('/') {
        Some((dir, file)) => format!("{dir}/_rels/{file}.rels"),
        None if part.is_empty() => "_rels/.rels".to_string(),
        None => format!("_rels/{part}.rels"),
    }
}

/// Source part a rels part describes; `None` for names that are not rels parts.
pub fn source_of_rels(rels: &str) -> Option<String> {
    let stripped = rels.strip_suffix(".rels")?;
    let (dir, file) = match stripped.rsplit_once("_rels/") {
        Some((dir, file)) => (dir, file),
        None => return None,
    };
    if file.contains('/') {
        return None;
    }
    Some(format!("{dir}{file}"))
}

/// Resolves a relationship target relative to its source part.
pub fn resolve_target(source: &str, target: &str) -> String {
    if let Some(abs) = target.strip_prefix('/') {
        return abs.to_string();
    }
    let mut stack: Vec<&str> = source.split('/').collect();
    stack.pop();
    for seg in target.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                stack.pop();
            }
            s => stack.push(s),
        }
    }
    stack.join("/")
}

pub fn parse_rels(xml: &str) -> Result<Vec<Rel>, roxmltree::Error> {
    let doc = roxmltree::Document::parse(xml)?;
    Ok(doc
        .root_element()
        .children()
        .filter(|n| n.has_tag_name((NS_REL, "Relationship")))
        .map(|n| Rel {
            id: n.attribute("Id").unwrap_or_default().to_string(),
            rel_type: n.attribute("Type").unwrap_or_default().to_string(),
            target: n.attribute("Target").unwrap_or_default().to_string(),
            external: n.attribute("TargetMode") == Some("External"),
        })
        .collect())
}

pub fn write_rels(rels: &[(&str, &str, String)]) -> String {
    let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n");
    s.push_str(&format!("<Relationships xmlns=\"{NS_REL}\">"));
    for (id, ty, target) in rels {
        s.push_str(&format!(
            "<Relationship Id=\"{id}\" Type=\"{ty}\" Target=\"{}\"/>",
            super::xml::escape(target)
        ));
    }
    s.push_str("</Relationships>");
    s
}

#[derive(Debug, Clone, Default)]
pub struct ContentTypes {
    pub defaults: BTreeMap<String, String>,
    pub overrides: BTreeMap<String, String>,
}

impl ContentTypes {
    pub fn parse(xml: &str) -> Result<ContentTypes, roxmltree::Error> {
        let doc = roxmltree::Document::parse(xml)?;
        let mut ct = ContentTypes::default();
        for n in doc.root_element().children().filter(|n| n.is_element()) {
            let ty = n.attribute("ContentType").unwrap_or_default().to_string();
            if n.has_tag_name((NS_CT, "Default")) {
                if let Some(ext) = n.attribute("Extension") {
                    ct.defaults.insert(ext.to_ascii_lowercase(), ty);
                }
            } else if n.has_tag_name((NS_CT, "Override")) {
                if let Some(p) = n.attribute("PartName") {
                    ct.overrides.insert(p.trim_start_matches('/').to_string(), ty);
                }
            }
        }
        Ok(ct)
    }

    pub fn type_of(&self, part: &str) -> Option<&str> {
        if let Some(t) = self.overrides.get(part) {
            return Some(t);
        }
        let ext = part.rsplit_once('.')?.1.to_ascii_lowercase();
        self.defaults.get(&ext).map(String::as_str)
    }
}
