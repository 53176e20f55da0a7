//! Seeded synthetic corpus generator.
//!
//! Spam messages plant the behavioral patterns the features look for
//! (shouting subjects, HTML with links and images, white text, vowel-less
//! gibberish, scripts) at configurable rates. Ham is mostly plain prose with
//! some HTML newsletters, so no single pattern separates the classes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::Label;

/// Probability of each planted pattern for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternRates {
    pub html: f64,
    pub missing_content_type: f64,
    pub unusual_priority: f64,
    pub shouting_subject: f64,
    pub repeated_chars: f64,
    pub subject_digits: f64,
    pub subject_gibberish: f64,
    pub gibberish_words: f64,
    pub long_words: f64,
    pub links: f64,
    pub obfuscated_links: f64,
    pub linked_images: f64,
    pub html_comments: f64,
    pub white_text: f64,
    pub colors: f64,
    pub script: f64,
    pub css: f64,
    pub table: f64,
    pub quoted_headers: f64,
}

impl PatternRates {
    pub fn spam() -> Self {
        PatternRates {
            html: 0.8,
            missing_content_type: 0.1,
            unusual_priority: 0.35,
            shouting_subject: 0.35,
            repeated_chars: 0.25,
            subject_digits: 0.35,
            subject_gibberish: 0.15,
            gibberish_words: 0.55,
            long_words: 0.3,
            links: 0.85,
            obfuscated_links: 0.7,
            linked_images: 0.5,
            html_comments: 0.45,
            white_text: 0.35,
            colors: 0.6,
            script: 0.15,
            css: 0.55,
            table: 0.5,
            quoted_headers: 0.1,
        }
    }

    pub fn ham() -> Self {
        PatternRates {
            html: 0.25,
            missing_content_type: 0.05,
            unusual_priority: 0.08,
            shouting_subject: 0.2,
            repeated_chars: 0.1,
            subject_digits: 0.3,
            subject_gibberish: 0.05,
            gibberish_words: 0.05,
            long_words: 0.05,
            links: 0.3,
            obfuscated_links: 0.25,
            linked_images: 0.05,
            html_comments: 0.1,
            white_text: 0.0,
            colors: 0.2,
            script: 0.02,
            css: 0.25,
            table: 0.2,
            quoted_headers: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub spam: PatternRates,
    pub ham: PatternRates,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            spam: PatternRates::spam(),
            ham: PatternRates::ham(),
        }
    }
}

const SPAM_SUBJECT: &[&str] = &[
    "exclusive", "offer", "deal", "free", "winner", "cheap", "save", "now", "limited", "bonus",
    "claim", "your", "prize", "discount", "today", "act", "fast", "reward", "credit", "approved",
];
const HAM_SUBJECT: &[&str] = &[
    "meeting", "notes", "project", "lunch", "update", "review", "schedule", "draft", "report",
    "question", "about", "the", "budget", "plan", "weekend", "call", "agenda", "minutes", "re:",
];
const SPAM_PROSE: &[&str] = &[
    "dear", "friend", "you", "have", "been", "selected", "to", "receive", "an", "exclusive",
    "offer", "click", "below", "claim", "your", "reward", "today", "limited", "time", "only",
    "don't", "miss", "out", "on", "this", "amazing", "opportunity", "guaranteed", "results",
    "order", "now", "and", "save", "big", "money", "back",
];
const HAM_PROSE: &[&str] = &[
    "hi", "thanks", "for", "the", "notes", "from", "yesterday", "i", "think", "we", "should",
    "move", "meeting", "to", "thursday", "afternoon", "let", "me", "know", "if", "that", "works",
    "attached", "is", "draft", "of", "report", "please", "review", "it", "before", "friday",
    "cheers", "best", "regards", "see", "you", "soon", "we'll", "discuss", "budget",
];
const SHOUTS: &[&str] = &["FREE", "URGENT", "WINNER", "FYI", "ASAP", "NOW", "IMPORTANT"];
const BANGS: &[&str] = &["!!!", "$$$", "???", "!!!!"];
const DIGIT_WORDS: &[&str] = &["50%", "2day", "$99", "4you", "100%", "24h", "v2", "2024"];
const CONSONANTS: &[u8] = b"bcdfghjklmnpqrstvwxz";
const RARE: &[u8] = b"jkqxz";
const WHITE: &[&str] = &[
    r##"<font color="#FFFFFF">"##,
    r#"<span style="color: white">"#,
    r#"<p style="color:rgb(255, 255, 255)">"#,
    "<font color=white>",
];
const COLORS: &[&str] = &["#ff0000", "blue", "#333333", "green", "rgb(10,20,30)"];

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    fn pick<'a>(&mut self, items: &[&'a str]) -> &'a str {
        items.choose(&mut self.rng).copied().unwrap_or("")
    }

    fn words(&mut self, vocab: &[&str], n: usize) -> Vec<String> {
        (0..n).map(|_| self.pick(vocab).to_string()).collect()
    }

    fn consonant_run(&mut self, len: usize) -> String {
        (0..len)
            .map(|_| *CONSONANTS.choose(&mut self.rng).unwrap() as char)
            .collect()
    }

    /// A word with two or more of j, k, q, x, z.
    fn rare_letter_word(&mut self) -> String {
        let a = *RARE.choose(&mut self.rng).unwrap() as char;
        let b = *RARE.choose(&mut self.rng).unwrap() as char;
        format!("{a}a{b}o{}", self.consonant_run(2))
    }

    fn long_word(&mut self) -> String {
        let mut w = String::new();
        while w.len() < 16 {
            w.push_str(self.pick(SPAM_PROSE).trim_matches('\''));
        }
        w
    }

    fn subject(&mut self, label: Label, r: &PatternRates) -> String {
        let vocab = match label {
            Label::Spam => SPAM_SUBJECT,
            Label::Ham => HAM_SUBJECT,
        };
        let n = self.rng.gen_range(2..=6);
        let mut words = self.words(vocab, n);
        if let Some(first) = words.first_mut() {
            if let Some(c) = first.get(..1) {
                *first = c.to_ascii_uppercase() + &first[1..];
            }
        }
        if self.chance(r.shouting_subject) {
            let at = self.rng.gen_range(0..=words.len());
            words.insert(at, self.pick(SHOUTS).to_string());
        }
        if self.chance(r.subject_digits) {
            let at = self.rng.gen_range(0..=words.len());
            words.insert(at, self.pick(DIGIT_WORDS).to_string());
        }
        if self.chance(r.subject_gibberish) {
            words.push(self.rare_letter_word());
        }
        let mut s = words.join(" ");
        if self.chance(r.repeated_chars) {
            s.push_str(self.pick(BANGS));
        }
        s
    }

    fn prose(&mut self, label: Label, r: &PatternRates) -> String {
        let vocab = match label {
            Label::Spam => SPAM_PROSE,
            Label::Ham => HAM_PROSE,
        };
        let n = self.rng.gen_range(25..80);
        let mut words = self.words(vocab, n);
        if self.chance(r.gibberish_words) {
            for _ in 0..self.rng.gen_range(2..8) {
                let w = if self.chance(0.5) {
                    let len = self.rng.gen_range(7..11);
                    self.consonant_run(len)
                } else {
                    self.rare_letter_word()
                };
                let at = self.rng.gen_range(0..=words.len());
                words.insert(at, w);
            }
        }
        if self.chance(r.long_words) {
            for _ in 0..self.rng.gen_range(1..4) {
                let w = self.long_word();
                let at = self.rng.gen_range(0..=words.len());
                words.insert(at, w);
            }
        }
        words.join(" ")
    }

    fn url(&mut self, obfuscated: bool) -> String {
        if obfuscated {
            let n: u32 = self.rng.gen_range(1..999);
            match self.rng.gen_range(0..3) {
                0 => format!("http://{}.{}.{}.{}/c?id={n}", n % 256, n % 97, n % 13, n % 7),
                1 => format!("http://track.example.biz/r?u=abc&t={n}"),
                _ => format!("http://user@promo.example.info/%7E{n}"),
            }
        } else {
            let page = self.pick(&["news", "docs", "about", "team", "events"]);
            format!("https://www.example.org/{page}")
        }
    }

    fn html_body(&mut self, text: &str, r: &PatternRates) -> String {
        let mut parts: Vec<String> = Vec::new();
        parts.push("<html><head>".into());
        if self.chance(r.css) {
            parts.push("<style>p { margin: 0 }</style>".into());
        }
        if self.chance(r.script) {
            parts.push("<script>var t = 1;</script>".into());
        }
        parts.push("</head><body>".into());
        if self.chance(r.html_comments) {
            for _ in 0..self.rng.gen_range(1..5) {
                let filler = self.consonant_run(6);
                parts.push(format!("<!-- {filler} -->"));
            }
        }
        let table = self.chance(r.table);
        if table {
            parts.push(r#"<table width="600"><tr><td>"#.into());
        }
        if self.chance(r.colors) {
            for _ in 0..self.rng.gen_range(1..4) {
                let c = self.pick(COLORS);
                if self.chance(0.5) {
                    parts.push(format!(r#"<font color="{c}">"#));
                } else {
                    parts.push(format!(r#"<div style="background-color: {c}">"#));
                }
            }
        }
        parts.push(format!("<p>{text}</p>"));
        if self.chance(r.white_text) {
            let opener = self.pick(WHITE);
            let hidden = self.words(HAM_PROSE, 12).join(" ");
            parts.push(format!("{opener}{hidden}</font>"));
        }
        if self.chance(r.links) {
            for _ in 0..self.rng.gen_range(1..5) {
                let obf = self.chance(r.obfuscated_links);
                let url = self.url(obf);
                if self.chance(r.linked_images) {
                    parts.push(format!(r#"<a href="{url}"><img src="http://img.example.com/b.gif"></a>"#));
                } else {
                    parts.push(format!(r#"<a href="{url}">click here</a>"#));
                }
            }
        }
        if table {
            parts.push("</td></tr></table>".into());
        }
        parts.push("</body></html>".into());
        parts.join("\n")
    }

    fn message(&mut self, label: Label, r: &PatternRates, n: usize) -> String {
        let mut headers = vec![
            format!("From: sender{n}@example.com"),
            "To: reader@example.net".to_string(),
            format!("Subject: {}", self.subject(label, r)),
            format!("Message-ID: <{n}.{}@example.com>", label.as_str()),
        ];
        if self.chance(r.unusual_priority) {
            headers.push(self.pick(&["X-Priority: 1 (Highest)", "X-Priority: 2", "Importance: high"]).to_string());
        } else if self.chance(0.2) {
            headers.push("X-Priority: 3 (Normal)".to_string());
        }
        let html = self.chance(r.html);
        if !self.chance(r.missing_content_type) {
            headers.push(if html {
                "Content-Type: text/html; charset=utf-8".to_string()
            } else {
                "Content-Type: text/plain; charset=utf-8".to_string()
            });
        }

        let text = self.prose(label, r);
        let mut body = if html {
            self.html_body(&text, r)
        } else {
            let mut b = text;
            if self.chance(r.links) {
                let obf = self.chance(r.obfuscated_links);
                b.push_str(&format!("\n\n{}", self.url(obf)));
            }
            b
        };
        if self.chance(r.quoted_headers) {
            body.push_str("\n\n-----Original Message-----\nFrom: someone@example.com\nTo: reader@example.net\n> earlier text");
        }
        format!("{}\n\n{}\n", headers.join("\n"), body)
    }
}

/// `n` messages, `round(n * spam_rate)` of them spam, deterministic in `seed`.
pub fn synth_corpus(n: usize, spam_rate: f64, seed: u64, config: &SynthConfig) -> Result<Corpus> {
    if n < 2 {
        return Err(Error::InvalidConfig("synthetic corpus needs n >= 2".into()));
    }
    if !(spam_rate > 0.0 && spam_rate < 1.0) {
        return Err(Error::InvalidConfig("spam_rate must be in (0, 1)".into()));
    }
    let n_spam = ((n as f64 * spam_rate).round() as usize).clamp(1, n - 1);
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let (label, rates, k) = if i < n_spam {
            (Label::Spam, &config.spam, i + 1)
        } else {
            (Label::Ham, &config.ham, i - n_spam + 1)
        };
        let text = gen.message(label, rates, i);
        candidates.push((format!("{label}/{k:04}.eml"), text.into_bytes(), Some(label)));
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    Corpus::from_candidates(
        candidates,
        format!("synthetic n={n} spam_rate={spam_rate} seed={seed}"),
    )
}
