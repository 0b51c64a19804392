//! Direct zip/XML edits on archives, bypassing the crate's own package code.

use std::io::{Cursor, Read, Write};

pub fn entries(bytes: &[u8]) -> Vec<(String, Vec<u8>)> {
    let mut zip = zip::ZipArchive::new(Cursor::new(bytes)).unwrap();
    (0..zip.len())
        .map(|i| {
            let mut f = zip.by_index(i).unwrap();
            let mut data = Vec::new();
            f.read_to_end(&mut data).unwrap();
            (f.name().to_string(), data)
        })
        .collect()
}

pub fn repack(entries: &[(String, Vec<u8>)]) -> Vec<u8> {
    let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
    let opts = zip::write::SimpleFileOptions::default().compression_method(zip::CompressionMethod::Stored);
    for (name, data) in entries {
        w.start_file(name.as_str(), opts).unwrap();
        w.write_all(data).unwrap();
    }
    w.finish().unwrap().into_inner()
}

pub fn read_text(bytes: &[u8], name: &str) -> String {
    let e = entries(bytes);
    let (_, data) = e.iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no part {name}"));
    String::from_utf8(data.clone()).unwrap()
}

pub fn edit_text(bytes: &[u8], name: &str, f: impl FnOnce(String) -> String) -> Vec<u8> {
    let mut e = entries(bytes);
    let slot = e.iter_mut().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no part {name}"));
    let text = String::from_utf8(std::mem::take(&mut slot.1)).unwrap();
    slot.1 = f(text).into_bytes();
    repack(&e)
}

pub fn remove_part(bytes: &[u8], name: &str) -> Vec<u8> {
    let e: Vec<_> = entries(bytes).into_iter().filter(|(n, _)| n != name).collect();
    repack(&e)
}

pub const SLIDE: &str = "ppt/slides/slide1.xml";

/// Inserts raw XML just before the end of the shape tree.
pub fn append_to_tree(bytes: &[u8], fragment: &str) -> Vec<u8> {
    edit_text(bytes, SLIDE, |s| s.replacen("</p:spTree>", &format!("{fragment}</p:spTree>"), 1))
}

/// A plain rectangle as slideware would add it.
pub fn human_shape(id: u32, name: &str, x: i64, color: &str) -> String {
    format!(
        "<p:sp><p:nvSpPr><p:cNvPr id=\"{id}\" name=\"{name}\"/><p:cNvSpPr/><p:nvPr/></p:nvSpPr><p:spPr><a:xfrm><a:off x=\"{x}\" y=\"914400\"/><a:ext cx=\"914400\" cy=\"457200\"/></a:xfrm><a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom><a:solidFill><a:srgbClr val=\"{color}\"/></a:solidFill></p:spPr></p:sp>"
    )
}
