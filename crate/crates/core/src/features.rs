//! The 21 behavioral features.
//!
//! Indices are 1-based throughout the public API: feature `i` lives at
//! `values[i - 1]` of a full vector. Features 1-6 read only the subject,
//! 7-8 only the priority and content-type headers, 9-21 only the body.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::email_parser::{is_alphabetic_word, tokenize, ParsedEmail, Token};
use crate::error::{Error, Result};

pub const NUM_FEATURES: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Spam,
    Ham,
}

impl Label {
    /// Declaration order used by every classifier: spam first.
    pub const ALL: [Label; 2] = [Label::Spam, Label::Ham];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Spam => "spam",
            Label::Ham => "ham",
        }
    }

    pub fn class_index(self) -> usize {
        match self {
            Label::Spam => 0,
            Label::Ham => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spam" => Ok(Label::Spam),
            "ham" => Ok(Label::Ham),
            other => Err(Error::InvalidDataset(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: Option<Label>,
    pub source_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureCategory {
    Subject,
    Headers,
    Body,
}

impl FeatureCategory {
    pub const ALL: [FeatureCategory; 3] = [
        FeatureCategory::Subject,
        FeatureCategory::Headers,
        FeatureCategory::Body,
    ];

    /// 1 for subject, 2 for headers, 3 for body.
    pub fn number(self) -> usize {
        match self {
            FeatureCategory::Subject => 1,
            FeatureCategory::Headers => 2,
            FeatureCategory::Body => 3,
        }
    }

    pub fn from_number(n: usize) -> Option<Self> {
        match n {
            1 => Some(FeatureCategory::Subject),
            2 => Some(FeatureCategory::Headers),
            3 => Some(FeatureCategory::Body),
            _ => None,
        }
    }

    pub fn of_feature(index: usize) -> Option<Self> {
        match index {
            1..=6 => Some(FeatureCategory::Subject),
            7..=8 => Some(FeatureCategory::Headers),
            9..=21 => Some(FeatureCategory::Body),
            _ => None,
        }
    }
}

pub fn category_indices(category: FeatureCategory) -> Vec<usize> {
    match category {
        FeatureCategory::Subject => (1..=6).collect(),
        FeatureCategory::Headers => vec![7, 8],
        FeatureCategory::Body => (9..=21).collect(),
    }
}

pub fn feature_name(index: usize) -> String {
    format!("f{index}")
}

/// Parse `f<N>` back into `N`.
pub fn parse_feature_name(name: &str) -> Option<usize> {
    name.strip_prefix('f')?.parse().ok()
}

/// Short human-readable description, for explain output.
pub fn feature_description(index: usize) -> &'static str {
    match index {
        1 => "subject has a run of 3+ identical characters",
        2 => "subject words in all capitals",
        3 => "subject words of 15+ characters",
        4 => "subject words with 2+ of J/K/Q/X/Z",
        5 => "subject words without vowels",
        6 => "subject words with non-letters before the last position",
        7 => "priority set above or below normal",
        8 => "content type missing or text/html",
        9 => "share of body words with no vowels and 7+ letters",
        10 => "share of body words with 2+ of J/K/Q/X/Z",
        11 => "share of body words of 15+ letters",
        12 => "body contains both \"From:\" and \"To:\"",
        13 => "HTML comment openers",
        14 => "hyperlinks (href=)",
        15 => "images inside links",
        16 => "white text color",
        17 => "link URLs with digits or &, %, @",
        18 => "color declarations (CSS and HTML)",
        19 => "JavaScript present",
        20 => "CSS present",
        21 => "table opening tag present",
        _ => "unknown feature",
    }
}

/// Check that `subset` is non-empty, distinct and within `1..=n_features`.
pub fn validate_subset(subset: &[usize], n_features: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset("subset is empty".into()));
    }
    let mut seen = vec![false; n_features + 1];
    for &i in subset {
        if i == 0 || i > n_features {
            return Err(Error::InvalidSubset(format!(
                "index {i} outside 1..={n_features}"
            )));
        }
        if seen[i] {
            return Err(Error::InvalidSubset(format!("index {i} repeated")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Restrict a vector to `subset` (1-based indices into `v.values`), in subset order.
pub fn project(v: &FeatureVector, subset: &[usize]) -> Result<FeatureVector> {
    validate_subset(subset, v.values.len())?;
    Ok(FeatureVector {
        values: subset.iter().map(|&i| v.values[i - 1]).collect(),
        label: v.label,
        source_id: v.source_id.clone(),
    })
}

pub fn extract(e: &ParsedEmail) -> FeatureVector {
    let mut values = Vec::with_capacity(NUM_FEATURES);
    values.extend(subject_features(&e.subject));
    values.extend(header_features(
        e.priority_raw.as_deref(),
        e.content_type_raw.as_deref(),
    ));
    values.extend(body_features(&e.body));
    debug_assert_eq!(values.len(), NUM_FEATURES);
    FeatureVector {
        values,
        label: None,
        source_id: e.source_id.clone(),
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u')
}

fn is_rare_letter(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'j' | 'k' | 'q' | 'x' | 'z')
}

fn has_two_rare_letters(s: &str) -> bool {
    s.chars().filter(|&c| is_rare_letter(c)).count() >= 2
}

fn has_letter_without_vowel(s: &str) -> bool {
    s.chars().any(|c| c.is_ascii_alphabetic()) && !s.chars().any(is_vowel)
}

fn has_repeated_run(s: &str, run: usize) -> bool {
    let mut prev = None;
    let mut len = 0;
    for c in s.chars() {
        if Some(c) == prev {
            len += 1;
        } else {
            prev = Some(c);
            len = 1;
        }
        if len >= run {
            return true;
        }
    }
    false
}

/// Features 1-6.
pub fn subject_features(subject: &str) -> [f64; 6] {
    let tokens = tokenize(subject);
    let count = |pred: &dyn Fn(&Token) -> bool| tokens.iter().filter(|t| pred(t)).count() as f64;

    [
        bool_value(has_repeated_run(subject, 3)),
        count(&|t| {
            t.chars().any(|c| c.is_ascii_alphabetic())
                && t.chars().all(|c| !c.is_ascii_lowercase())
        }),
        count(&|t| t.chars().count() >= 15),
        count(&|t| has_two_rare_letters(t)),
        count(&|t| has_letter_without_vowel(t)),
        count(&|t| {
            let n = t.chars().count();
            t.chars()
                .take(n.saturating_sub(1))
                .any(|c| !(c.is_ascii_alphabetic() || c == '\''))
        }),
    ]
}

fn priority_is_unusual(raw: &str) -> bool {
    let v = raw.trim().to_ascii_lowercase();
    if v.is_empty() {
        return false;
    }
    let normal = v.split_whitespace().next() == Some("3")
        || v.contains("normal")
        || v.contains("medium");
    !normal
}

/// Features 7-8.
pub fn header_features(priority_raw: Option<&str>, content_type_raw: Option<&str>) -> [f64; 2] {
    [
        bool_value(priority_raw.is_some_and(priority_is_unusual)),
        bool_value(content_type_raw.map_or(true, |ct| ct == "text/html")),
    ]
}

/// Features 9-21.
pub fn body_features(body: &str) -> [f64; 13] {
    let words: Vec<Token> = tokenize(body)
        .into_iter()
        .filter(|t| is_alphabetic_word(t))
        .collect();
    let proportion = |pred: &dyn Fn(&str) -> bool| {
        if words.is_empty() {
            0.0
        } else {
            words.iter().filter(|w| pred(w)).count() as f64 / words.len() as f64
        }
    };

    let lower = body.to_ascii_lowercase();
    let html = lower.as_bytes();

    [
        proportion(&|w| w.len() >= 7 && !w.chars().any(is_vowel)),
        proportion(&|w| has_two_rare_letters(w)),
        proportion(&|w| w.len() >= 15),
        bool_value(body.contains("From:") && body.contains("To:")),
        lower.matches("<!--").count() as f64,
        lower.matches("href=").count() as f64,
        linked_images(&lower) as f64,
        bool_value(has_white_text(html)),
        suspicious_hrefs(&lower) as f64,
        color_declarations(html) as f64,
        bool_value(lower.contains("<script") || lower.contains("javascript:")),
        bool_value(
            lower.contains("<style") || lower.contains("style=") || has_stylesheet_link(&lower),
        ),
        bool_value(lower.contains("<table")),
    ]
}

/// Position of the next `<a` that opens an anchor tag (followed by whitespace or `>`).
fn next_anchor_open(lower: &str, from: usize) -> Option<usize> {
    let bytes = lower.as_bytes();
    let mut pos = from;
    while let Some(rel) = lower[pos..].find("<a") {
        let at = pos + rel;
        match bytes.get(at + 2) {
            Some(b) if b.is_ascii_whitespace() || *b == b'>' => return Some(at),
            _ => pos = at + 2,
        }
    }
    None
}

/// `<img` occurrences between an anchor opening and the next `</a>`; an
/// unclosed anchor runs to the end of the body. Anchors do not nest.
fn linked_images(lower: &str) -> usize {
    let mut count = 0;
    let mut pos = 0;
    while let Some(open) = next_anchor_open(lower, pos) {
        let region_start = open + 2;
        let end = lower[region_start..]
            .find("</a>")
            .map_or(lower.len(), |rel| region_start + rel);
        count += lower[region_start..end].matches("<img").count();
        pos = (end + 4).min(lower.len());
        if end == lower.len() {
            break;
        }
    }
    count
}

/// The attribute value following `href=`: quoted, or up to whitespace / `>`.
fn href_values(lower: &str) -> impl Iterator<Item = &str> {
    lower.match_indices("href=").map(move |(at, _)| {
        let rest = lower[at + 5..].trim_start_matches([' ', '\t']);
        match rest.chars().next() {
            Some(q @ ('"' | '\'')) => {
                let inner = &rest[1..];
                &inner[..inner.find(q).unwrap_or(inner.len())]
            }
            _ => {
                let end = rest
                    .find(|c: char| c.is_whitespace() || c == '>')
                    .unwrap_or(rest.len());
                &rest[..end]
            }
        }
    })
}

fn suspicious_hrefs(lower: &str) -> usize {
    href_values(lower)
        .filter(|url| {
            url.chars()
                .any(|c| c.is_ascii_digit() || matches!(c, '&' | '%' | '@'))
        })
        .count()
}

fn has_stylesheet_link(lower: &str) -> bool {
    lower.match_indices("rel=").any(|(at, _)| {
        let rest = lower[at + 4..].trim_start_matches(['"', '\'']);
        rest.starts_with("stylesheet")
    })
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'-' || b == b'_'
}

/// The identifier immediately before `pos` (skipping spaces and tabs).
fn ident_before(html: &[u8], pos: usize) -> &str {
    let mut end = pos;
    while end > 0 && matches!(html[end - 1], b' ' | b'\t') {
        end -= 1;
    }
    let mut start = end;
    while start > 0 && is_ident_byte(html[start - 1]) {
        start -= 1;
    }
    // identifier bytes are ASCII, so this slice is valid UTF-8
    std::str::from_utf8(&html[start..end]).unwrap_or("")
}

const HTML_COLOR_ATTRS: [&str; 6] = ["color", "bgcolor", "text", "link", "vlink", "alink"];

fn is_css_color_property(ident: &str) -> bool {
    ident == "color" || ident == "bgcolor" || ident.ends_with("-color")
}

/// Every `(ident, separator position)` pair for `ident=` and `ident:` assignments.
fn assignments(html: &[u8]) -> impl Iterator<Item = (&str, u8, usize)> {
    html.iter().enumerate().filter_map(move |(i, &b)| {
        if b == b'=' || b == b':' {
            let ident = ident_before(html, i);
            if !ident.is_empty() {
                return Some((ident, b, i));
            }
        }
        None
    })
}

fn color_declarations(html: &[u8]) -> usize {
    assignments(html)
        .filter(|&(ident, sep, _)| match sep {
            b'=' => HTML_COLOR_ATTRS.contains(&ident),
            _ => is_css_color_property(ident),
        })
        .count()
}

/// The raw value after an `=` or `:` at `sep`.
fn assigned_value(html: &[u8], sep: usize) -> &[u8] {
    let mut i = sep + 1;
    while i < html.len() && matches!(html[i], b' ' | b'\t') {
        i += 1;
    }
    match html.get(i) {
        Some(&q @ (b'"' | b'\'')) => {
            let start = i + 1;
            let len = html[start..]
                .iter()
                .position(|&b| b == q)
                .unwrap_or(html.len() - start);
            &html[start..start + len]
        }
        _ => {
            let start = i;
            let mut depth = 0usize;
            let mut j = start;
            while j < html.len() {
                match html[j] {
                    b'(' => depth += 1,
                    b')' => depth = depth.saturating_sub(1),
                    b';' | b'>' | b'<' | b'}' | b'"' | b'\'' if depth == 0 => break,
                    b if b.is_ascii_whitespace() && depth == 0 => break,
                    _ => {}
                }
                j += 1;
            }
            &html[start..j]
        }
    }
}

fn is_white(value: &[u8]) -> bool {
    let mut v: String = value
        .iter()
        .filter(|b| !b.is_ascii_whitespace() && !matches!(b, b'"' | b'\''))
        .map(|&b| b.to_ascii_lowercase() as char)
        .collect();
    if let Some(stripped) = v.strip_suffix("!important") {
        v = stripped.to_string();
    }
    matches!(
        v.as_str(),
        "white" | "#fff" | "#ffffff" | "rgb(255,255,255)"
    )
}

fn has_white_text(html: &[u8]) -> bool {
    assignments(html).any(|(ident, sep, at)| {
        let text_color = match sep {
            b'=' => ident == "color" || ident == "text",
            _ => ident == "color",
        };
        text_color && is_white(assigned_value(html, at))
    })
}
