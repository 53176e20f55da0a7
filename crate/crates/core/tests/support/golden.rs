//! Hand-written emails covering each feature's zero case, positive case and
//! boundary, plus a regex-based reference implementation of the 21 features
//! used to check the frozen expectations.

use regex::Regex;

/// `(name, raw message, nonzero features as (1-based index, value))`.
pub type Golden = (&'static str, &'static str, &'static [(usize, f64)]);

pub const GOLDEN: &[Golden] = &[
    ("empty", "Subject:\n\n", &[(8, 1.0)]),
    ("plain_zero", "Subject: lunch tomorrow\nContent-Type: text/plain\n\nsee you there\n", &[]),
    ("f1_run_of_three", "Subject: wow!!!\nContent-Type: text/plain\n\nok\n", &[(1, 1.0), (6, 1.0)]),
    ("f1_run_of_two", "Subject: wow!!\nContent-Type: text/plain\n\nok\n", &[(6, 1.0)]),
    ("f1_spaces_run", "Subject: a   b\nContent-Type: text/plain\n\nok\n", &[(1, 1.0), (5, 1.0)]),
    ("f1_letters", "Subject: zzzap\nContent-Type: text/plain\n\nok\n", &[(1, 1.0), (4, 1.0)]),
    ("f2_caps", "Subject: FREE money NOW\nContent-Type: text/plain\n\nok\n", &[(2, 2.0)]),
    ("f2_mixed_case", "Subject: Free Money\nContent-Type: text/plain\n\nok\n", &[]),
    ("f2_digits_only", "Subject: 2024 A1\nContent-Type: text/plain\n\nok\n", &[(2, 1.0), (6, 1.0)]),
    ("f3_fifteen", "Subject: abcdefghilmnopr abcdefghilmnop\nContent-Type: text/plain\n\nok\n", &[(3, 1.0)]),
    ("f3_long_mixed", "Subject: congratulations!! pleased\nContent-Type: text/plain\n\nok\n", &[(3, 1.0), (6, 1.0)]),
    ("f4_two_rare", "Subject: jazz quiz\nContent-Type: text/plain\n\nok\n", &[(4, 2.0)]),
    ("f4_one_rare", "Subject: joke box\nContent-Type: text/plain\n\nok\n", &[(4, 1.0)]),
    ("f5_no_vowels", "Subject: hmm rhythm try\nContent-Type: text/plain\n\nok\n", &[(5, 3.0)]),
    ("f5_no_letters", "Subject: 42 ??\nContent-Type: text/plain\n\nok\n", &[(6, 2.0)]),
    ("f6_trailing_ok", "Subject: free! now.\nContent-Type: text/plain\n\nok\n", &[]),
    ("f6_leading_digit", "Subject: 4you don't\nContent-Type: text/plain\n\nok\n", &[(6, 1.0)]),
    ("f6_middle", "Subject: v1agra c-a-s-h\nContent-Type: text/plain\n\nok\n", &[(6, 2.0)]),
    (
        "subject_example",
        "Subject: FREE!!! kqz OFFER\nContent-Type: text/plain\n\n",
        &[(1, 1.0), (2, 2.0), (4, 1.0), (5, 1.0), (6, 1.0)],
    ),
    ("folded_subject", "Subject: BIG\n  DEAL\nContent-Type: text/plain\n\nok\n", &[(2, 2.0)]),
    ("f7_high", "Subject: hi\nX-Priority: 1 (Highest)\nContent-Type: text/plain\n\nok\n", &[(7, 1.0)]),
    ("f7_normal_number", "Subject: hi\nX-Priority: 3\nContent-Type: text/plain\n\nok\n", &[]),
    ("f7_normal_word", "Subject: hi\nImportance: Normal\nContent-Type: text/plain\n\nok\n", &[]),
    ("f7_low", "Subject: hi\nImportance: low\nContent-Type: text/plain\n\nok\n", &[(7, 1.0)]),
    ("f7_medium", "Subject: hi\nPriority: Medium\nContent-Type: text/plain\n\nok\n", &[]),
    ("f8_html", "Subject: hi\nContent-Type: TEXT/HTML; charset=utf-8\n\nok\n", &[(8, 1.0)]),
    ("f8_absent", "Subject: hi\nFrom: a@b.c\n\nok\n", &[(8, 1.0)]),
    ("f8_multipart", "Subject: hi\nContent-Type: multipart/alternative; boundary=x\n\nok\n", &[]),
    (
        "f9_gibberish",
        "Subject: hi\nContent-Type: text/plain\n\nbrwqmtn hello xyzzvbr dog\n",
        &[(9, 0.5), (10, 0.25)],
    ),
    ("f9_six_letters", "Subject: hi\nContent-Type: text/plain\n\nrhythm rhythms\n", &[(9, 0.5)]),
    (
        "f10_rare_letters",
        "Subject: hi\nContent-Type: text/plain\n\njazz quiz fox box don't 42\n",
        &[(10, 0.4)],
    ),
    (
        "f11_long_words",
        "Subject: hi\nContent-Type: text/plain\n\nincomprehensibilities are common\n",
        &[(11, 1.0 / 3.0)],
    ),
    (
        "f11_fourteen",
        "Subject: hi\nContent-Type: text/plain\n\nabcdefghilmnop abcdefghilmnopr! words\n",
        &[],
    ),
    ("f9_no_words", "Subject: hi\nContent-Type: text/plain\n\n123 !!! $$$\n", &[]),
    (
        "f12_quoted_headers",
        "Subject: hi\nContent-Type: text/plain\n\n> From: bob\n> To: alice\n",
        &[(12, 1.0)],
    ),
    ("f12_lowercase", "Subject: hi\nContent-Type: text/plain\n\nfrom: bob\nto: alice\n", &[]),
    ("f12_only_from", "Subject: hi\nContent-Type: text/plain\n\nFrom: bob\n", &[]),
    (
        "f13_comments",
        "Subject: hi\nContent-Type: text/html\n\n<!-- a --> text <!--b--> <!-- c\n",
        &[(8, 1.0), (13, 3.0)],
    ),
    ("f13_not_comment", "Subject: hi\nContent-Type: text/html\n\n<! -- <!- -->\n", &[(8, 1.0)]),
    (
        "links_example",
        "Subject: hi\nContent-Type: text/html\n\n<a href=\"http://x.com/a1?b=2\"><img src=\"i.gif\"></a>",
        &[(8, 1.0), (14, 1.0), (15, 1.0), (17, 1.0)],
    ),
    (
        "f14_f17_mixed",
        "Subject: hi\nContent-Type: text/html\n\n<a href=\"http://example.com/\">a</a> <A HREF=http://x.io/?a&b>b</A> <a href='mailto:me@host'>c</a>\n",
        &[(8, 1.0), (14, 3.0), (17, 2.0)],
    ),
    (
        "f15_outside_anchor",
        "Subject: hi\nContent-Type: text/html\n\n<img src=a.gif><a href=x>text</a><img src=b.gif>\n",
        &[(8, 1.0), (14, 1.0)],
    ),
    (
        "f15_unclosed",
        "Subject: hi\nContent-Type: text/html\n\n<a href=x><img src=1><IMG src=2>\n",
        &[(8, 1.0), (14, 1.0), (15, 2.0)],
    ),
    (
        "f15_abbr_not_anchor",
        "Subject: hi\nContent-Type: text/html\n\n<abbr><img src=q></abbr>\n",
        &[(8, 1.0)],
    ),
    (
        "f16_white_font",
        "Subject: hi\nContent-Type: text/html\n\n<font color=\"#FFFFFF\">hidden</font>\n",
        &[(8, 1.0), (16, 1.0), (18, 1.0)],
    ),
    (
        "f16_css_rgb",
        "Subject: hi\nContent-Type: text/html\n\n<p style=\"color: rgb(255, 255, 255)\">x</p>\n",
        &[(8, 1.0), (16, 1.0), (18, 1.0), (20, 1.0)],
    ),
    (
        "f16_bgcolor_only",
        "Subject: hi\nContent-Type: text/html\n\n<td bgcolor=\"white\">x</td>\n",
        &[(8, 1.0), (18, 1.0)],
    ),
    (
        "f16_near_white",
        "Subject: hi\nContent-Type: text/html\n\n<font color=#fffffe>x</font>\n",
        &[(8, 1.0), (18, 1.0)],
    ),
    (
        "f18_colors",
        "Subject: hi\nContent-Type: text/html\n\n<body bgcolor=red text=black link=blue><p style=\"background-color:#000; color:#333\">\n",
        &[(8, 1.0), (18, 5.0), (20, 1.0)],
    ),
    (
        "f19_script",
        "Subject: hi\nContent-Type: text/html\n\n<SCRIPT>alert(1)</SCRIPT>\n",
        &[(8, 1.0), (19, 1.0)],
    ),
    (
        "f19_javascript_link",
        "Subject: hi\nContent-Type: text/html\n\n<a href=\"javascript:go()\">x</a>\n",
        &[(8, 1.0), (14, 1.0), (19, 1.0)],
    ),
    ("f19_word_only", "Subject: hi\nContent-Type: text/plain\n\nI like javascript a lot\n", &[]),
    (
        "f20_stylesheet",
        "Subject: hi\nContent-Type: text/html\n\n<link rel=stylesheet href=s.css>\n",
        &[(8, 1.0), (14, 1.0), (20, 1.0)],
    ),
    ("f20_style_block", "Subject: hi\nContent-Type: text/html\n\n<STYLE>p{}</STYLE>\n", &[(8, 1.0), (20, 1.0)]),
    ("f20_word_only", "Subject: hi\nContent-Type: text/plain\n\nnice style overall\n", &[]),
    ("f21_table", "Subject: hi\nContent-Type: text/html\n\n<TABLE border=0>\n", &[(8, 1.0), (21, 1.0)]),
    ("f21_tablet", "Subject: hi\nContent-Type: text/plain\n\nmy tablet\n", &[]),
];

pub fn dense(sparse: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; 21];
    for &(i, x) in sparse {
        v[i - 1] = x;
    }
    v
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn header(headers: &str, name: &str) -> Option<String> {
    let re = Regex::new(&format!(r"(?im)^{name}:[ \t]*(.*)$")).unwrap();
    re.captures(headers).map(|c| c[1].trim().to_string())
}

fn normalized_white(value: &str) -> bool {
    let v: String = value
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '"' && *c != '\'')
        .collect::<String>()
        .to_lowercase();
    let v = v.strip_suffix("!important").unwrap_or(&v);
    ["white", "#fff", "#ffffff", "rgb(255,255,255)"].contains(&v)
}

/// Reference feature vector for a raw message.
pub fn oracle(raw: &str) -> Vec<f64> {
    let raw = raw.replace("\r\n", "\n");
    let (head, body) = match raw.find("\n\n") {
        Some(i) => (&raw[..i], &raw[i + 2..]),
        None => (raw.as_str(), ""),
    };
    let head = Regex::new(r"\n[ \t]+").unwrap().replace_all(head, " ").into_owned();

    let subject = header(&head, "subject").unwrap_or_default();
    let priority = header(&head, "x-priority")
        .or_else(|| header(&head, "priority"))
        .or_else(|| header(&head, "importance"));
    let content_type = header(&head, "content-type")
        .map(|v| v.split(';').next().unwrap().trim().to_lowercase());

    let upper = Regex::new(r"^[^a-z]*[A-Z][^a-z]*$").unwrap();
    let rare = Regex::new(r"(?i)[jkqxz]").unwrap();
    let vowel = Regex::new(r"(?i)[aeiou]").unwrap();
    let letter = Regex::new(r"[A-Za-z]").unwrap();
    let odd = Regex::new(r"[^A-Za-z']").unwrap();
    let word = Regex::new(r"^[A-Za-z']+$").unwrap();

    let s: Vec<&str> = subject.split_whitespace().collect();
    let chars: Vec<char> = subject.chars().collect();
    let count = |f: &dyn Fn(&str) -> bool| s.iter().filter(|t| f(t)).count() as f64;

    let mut v = vec![
        flag(chars.windows(3).any(|w| w[0] == w[1] && w[1] == w[2])),
        count(&|t| upper.is_match(t)),
        count(&|t| t.chars().count() >= 15),
        count(&|t| rare.find_iter(t).count() >= 2),
        count(&|t| letter.is_match(t) && !vowel.is_match(t)),
        count(&|t| {
            let n = t.chars().count();
            let prefix: String = t.chars().take(n - 1).collect();
            odd.is_match(&prefix)
        }),
    ];

    let priority_flag = priority.is_some_and(|p| {
        let p = p.to_lowercase();
        !p.is_empty() && !Regex::new(r"^3(\s|$)|normal|medium").unwrap().is_match(&p)
    });
    v.push(flag(priority_flag));
    v.push(flag(content_type.map_or(true, |c| c == "text/html")));

    let aw: Vec<&str> = body.split_whitespace().filter(|t| word.is_match(t)).collect();
    let share = |f: &dyn Fn(&str) -> bool| {
        if aw.is_empty() {
            0.0
        } else {
            aw.iter().filter(|w| f(w)).count() as f64 / aw.len() as f64
        }
    };
    v.push(share(&|w| w.len() >= 7 && !vowel.is_match(w)));
    v.push(share(&|w| rare.find_iter(w).count() >= 2));
    v.push(share(&|w| w.len() >= 15));
    v.push(flag(body.contains("From:") && body.contains("To:")));

    let lower = body.to_lowercase();
    let occurrences = |pat: &str| Regex::new(&regex::escape(pat)).unwrap().find_iter(&lower).count() as f64;
    v.push(occurrences("<!--"));
    v.push(occurrences("href="));

    // images inside anchor regions
    let anchor = Regex::new(r"<a[\s>]").unwrap();
    let mut images = 0;
    let mut pos = 0;
    while let Some(m) = anchor.find_at(&lower, pos) {
        let start = m.start() + 2;
        let end = lower[start..].find("</a>").map_or(lower.len(), |e| start + e);
        images += lower[start..end].matches("<img").count();
        if end >= lower.len() {
            break;
        }
        pos = end + 4;
    }
    v.push(images as f64);

    let html_text = Regex::new(r#"(?:^|[^a-z0-9_-])(?:color|text)[ \t]*=[ \t]*("[^"]*"|'[^']*'|[^\s>;]+)"#).unwrap();
    let css_text = Regex::new(r#"(?:^|[^a-z0-9_-])color[ \t]*:[ \t]*([^;}"'<>]+)"#).unwrap();
    let white = html_text.captures_iter(&lower).any(|c| normalized_white(&c[1]))
        || css_text.captures_iter(&lower).any(|c| normalized_white(&c[1]));
    v.push(flag(white));

    let href = Regex::new(r#"href=[ \t]*(?:"([^"]*)"|'([^']*)'|([^\s>]*))"#).unwrap();
    let suspicious = Regex::new(r"[0-9&%@]").unwrap();
    v.push(
        href.captures_iter(&lower)
            .filter(|c| {
                let url = c.get(1).or(c.get(2)).or(c.get(3)).map_or("", |m| m.as_str());
                suspicious.is_match(url)
            })
            .count() as f64,
    );

    let html_attr = Regex::new(r"(?:^|[^a-z0-9_-])(?:color|bgcolor|text|link|vlink|alink)[ \t]*=").unwrap();
    let css_prop = Regex::new(r"(?:^|[^a-z0-9_-])(?:color|bgcolor|[a-z0-9_-]*-color)[ \t]*:").unwrap();
    v.push((html_attr.find_iter(&lower).count() + css_prop.find_iter(&lower).count()) as f64);

    v.push(flag(lower.contains("<script") || lower.contains("javascript:")));
    let stylesheet = Regex::new(r#"rel=["']?stylesheet"#).unwrap();
    v.push(flag(lower.contains("<style") || lower.contains("style=") || stylesheet.is_match(&lower)));
    v.push(flag(lower.contains("<table")));
    v
}
