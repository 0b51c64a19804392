use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::scene::ElementId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    Boundaries,
    Connectors,
    Text,
    Alignment,
    Style,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Boundaries,
        Category::Connectors,
        Category::Text,
        Category::Alignment,
        Category::Style,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Boundaries => "BOUNDARIES",
            Category::Connectors => "CONNECTORS",
            Category::Text => "TEXT",
            Category::Alignment => "ALIGNMENT",
            Category::Style => "STYLE",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL.into_iter().find(|c| c.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub category: Category,
    pub description: String,
    pub fix: String,
    /// Elements the issue is about; not part of the line grammar.
    #[serde(default)]
    pub element_ids: Vec<ElementId>,
}

/// Keeps free text inside one grammar line: no newlines, no separator.
pub fn sanitize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ").replace("->", "\u{2192}")
}

impl Issue {
    pub fn new(category: Category, description: impl AsRef<str>, fix: impl AsRef<str>, element_ids: Vec<ElementId>) -> Issue {
        Issue {
            category,
            description: sanitize(description.as_ref()),
            fix: sanitize(fix.as_ref()),
            element_ids,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IssueList(pub Vec<Issue>);

impl IssueList {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Issue> {
        self.0.iter()
    }

    /// `N. [CATEGORY] description -> fix`, one line each, newline-terminated.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, issue) in self.0.iter().enumerate() {
            out.push_str(&format!("{}. [{}] {} -> {}\n", k + 1, issue.category, issue.description, issue.fix));
        }
        out
    }
}

impl fmt::Display for IssueList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueParseCode {
    MissingCategory,
    UnknownCategory,
    MissingSeparator,
    EmptyField,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[error("line {line}: {code:?}: {message}")]
pub struct IssueParseError {
    pub line: usize,
    pub code: IssueParseCode,
    pub message: String,
}

/// The published line grammar.
pub const ISSUE_LINE_PATTERN: &str = r"^\d+\.\s*\[(BOUNDARIES|CONNECTORS|TEXT|ALIGNMENT|STYLE)\]\s*(.+?)\s*->\s*(.+)$";

pub fn issue_line_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(ISSUE_LINE_PATTERN).expect("valid pattern"))
}

fn tag_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?:\d+\s*[.)]\s*|[-*]\s+)?\[([A-Za-z_]+)\]\s*(.*)$").expect("valid pattern"))
}

fn parse_line(line: &str, number: usize) -> Result<Issue, IssueParseError> {
    let err = |code, message: String| IssueParseError {
        line: number,
        code,
        message,
    };
    let caps = tag_regex()
        .captures(line)
        .ok_or_else(|| err(IssueParseCode::MissingCategory, format!("expected '[CATEGORY]' in '{line}'")))?;
    let tag = &caps[1];
    let category: Category = tag
        .parse()
        .map_err(|_| err(IssueParseCode::UnknownCategory, format!("unknown category '{tag}'")))?;
    let rest = caps.get(2).map_or("", |m| m.as_str());
    let (description, fix) = rest
        .split_once("->")
        .ok_or_else(|| err(IssueParseCode::MissingSeparator, "expected 'description -> fix'".into()))?;
    let (description, fix) = (description.trim(), fix.trim());
    if description.is_empty() || fix.is_empty() {
        return Err(err(IssueParseCode::EmptyField, "description and fix must be non-empty".into()));
    }
    Ok(Issue {
        category,
        description: description.to_string(),
        fix: fix.to_string(),
        element_ids: Vec::new(),
    })
}

/// Strict parse: every non-blank line must be an issue.
pub fn parse_issue_list(text: &str) -> Result<IssueList, IssueParseError> {
    let mut issues = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        issues.push(parse_line(line, k + 1)?);
    }
    Ok(IssueList(issues))
}

/// Lenient parse for critic output: lines that are not issues are returned
/// separately instead of failing the whole list. Unknown categories still
/// count as rejections.
pub fn parse_issue_list_lenient(text: &str) -> (IssueList, Vec<IssueParseError>) {
    let mut issues = Vec::new();
    let mut rejected = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim().trim_matches('`').trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line, k + 1) {
            Ok(i) => issues.push(i),
            Err(e) => rejected.push(e),
        }
    }
    (IssueList(issues), rejected)
}
