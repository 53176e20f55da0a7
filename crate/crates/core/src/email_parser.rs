//! Raw message parsing and the token / alphabetic-word primitives.
//!
//! Messages are treated as plain text. Headers are the lines before the first
//! blank line; everything after it is the body, kept verbatim (MIME boundaries
//! and HTML markup included).

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undecoded message as read from disk or an mbox.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEmail {
    bytes: Vec<u8>,
    source_id: String,
}

impl RawEmail {
    /// Fails with `MalformedMessage` when `bytes` is empty.
    pub fn new(bytes: impl Into<Vec<u8>>, source_id: impl Into<String>) -> Result<Self> {
        let bytes = bytes.into();
        let source_id = source_id.into();
        if bytes.is_empty() {
            return Err(Error::MalformedMessage {
                source_id,
                reason: "empty input".into(),
            });
        }
        Ok(RawEmail { bytes, source_id })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedEmail {
    pub source_id: String,
    /// Unfolded `Subject` value; empty when the header is absent.
    pub subject: String,
    /// First of `X-Priority`, `Priority`, `Importance`, in that preference.
    pub priority_raw: Option<String>,
    /// Lower-cased media type of the top-level `Content-Type`, parameters stripped.
    pub content_type_raw: Option<String>,
    pub body: String,
    /// Lower-cased names of all header fields, in order of appearance.
    pub header_names: Vec<String>,
}

const PRIORITY_HEADERS: [&str; 3] = ["x-priority", "priority", "importance"];

pub fn parse_email(raw: &RawEmail) -> Result<ParsedEmail> {
    let text = String::from_utf8_lossy(raw.bytes());

    // (name, value) pairs with continuation lines already unfolded
    let mut headers: Vec<(String, String)> = Vec::new();
    let mut body_start = text.len();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        offset += line.len();
        let content = line.trim_end_matches(['\n', '\r']);
        if content.is_empty() {
            body_start = offset;
            break;
        }
        if content.starts_with([' ', '\t']) {
            if let Some((_, value)) = headers.last_mut() {
                let cont = content.trim_start_matches([' ', '\t']);
                if !cont.is_empty() {
                    if !value.is_empty() {
                        value.push(' ');
                    }
                    value.push_str(cont);
                }
            }
            continue;
        }
        // lines without a colon are skipped; the header section continues
        if let Some((name, value)) = content.split_once(':') {
            headers.push((
                name.trim().to_ascii_lowercase(),
                value.trim_start_matches([' ', '\t']).to_string(),
            ));
        }
    }

    if headers.is_empty() {
        return Err(Error::MalformedMessage {
            source_id: raw.source_id().to_string(),
            reason: "no header line found before the first blank line".into(),
        });
    }

    let first = |name: &str| {
        headers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.trim().to_string())
    };

    let subject = first("subject").unwrap_or_default();
    let priority_raw = PRIORITY_HEADERS.iter().find_map(|h| first(h));
    let content_type_raw = first("content-type").map(|v| {
        let media = v.split(';').next().unwrap_or_default();
        media.trim().to_ascii_lowercase()
    });

    Ok(ParsedEmail {
        source_id: raw.source_id().to_string(),
        subject,
        priority_raw,
        content_type_raw,
        body: text[body_start..].to_string(),
        header_names: headers.into_iter().map(|(n, _)| n).collect(),
    })
}

/// A maximal run of non-whitespace characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token<'a>(&'a str);

impl<'a> Token<'a> {
    pub fn as_str(&self) -> &'a str {
        self.0
    }
}

impl Deref for Token<'_> {
    type Target = str;

    fn deref(&self) -> &str {
        self.0
    }
}

impl PartialEq<&str> for Token<'_> {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    text.split_whitespace().map(Token).collect()
}

/// True iff every character is an ASCII letter or an ASCII apostrophe.
pub fn is_alphabetic_word(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_alphabetic() || c == '\'')
}

/// Split an mbox stream on lines starting with `From ` at column 0.
///
/// The separator lines are dropped; each message gets the id
/// `<prefix>#<n>` with `n` counting from 1.
pub fn split_mbox(bytes: &[u8], prefix: &str) -> Vec<(String, Vec<u8>)> {
    let mut messages = Vec::new();
    let mut current: Option<Vec<u8>> = None;
    let mut at_line_start = true;
    let mut i = 0;
    while i < bytes.len() {
        if at_line_start && bytes[i..].starts_with(b"From ") {
            if let Some(msg) = current.take() {
                messages.push(msg);
            }
            current = Some(Vec::new());
            // skip the separator line
            match bytes[i..].iter().position(|&b| b == b'\n') {
                Some(nl) => i += nl + 1,
                None => i = bytes.len(),
            }
            at_line_start = true;
            continue;
        }
        let b = bytes[i];
        current.get_or_insert_with(Vec::new).push(b);
        at_line_start = b == b'\n';
        i += 1;
    }
    if let Some(msg) = current {
        messages.push(msg);
    }
    messages
        .into_iter()
        .filter(|m| m.iter().any(|b| !b.is_ascii_whitespace()))
        .enumerate()
        .map(|(n, m)| (format!("{prefix}#{}", n + 1), m))
        .collect()
}
