//! N-Triples ingestion.
//!
//! Lines are parsed independently, so a malformed statement never poisons the
//! rest of the file. In lenient mode such lines are counted and skipped; in
//! strict mode the first one aborts the parse.
//!
//! Blank nodes become URI terms with a `_:<label>.<name>` lexical, where
//! `<label>` is the source label of the file. This keeps blank node labels
//! file-local while letting the canonical writer emit them as ordinary IRIs.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Uri,
    Literal,
}

/// A node or predicate of an RDF dataset.
///
/// For URIs `lexical` is the IRI without angle brackets. For literals it is
/// the literal token exactly as written, quotes and any `@lang` or
/// `^^<datatype>` suffix included, so `"1"` and `"1"^^<xsd:int>` stay distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub kind: TermKind,
    pub lexical: String,
}

impl Term {
    pub fn uri(lexical: impl Into<String>) -> Self {
        let lexical = lexical.into();
        debug_assert!(!lexical.is_empty());
        Term { kind: TermKind::Uri, lexical }
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        let lexical = lexical.into();
        debug_assert!(!lexical.is_empty());
        Term { kind: TermKind::Literal, lexical }
    }

    pub fn is_uri(&self) -> bool {
        self.kind == TermKind::Uri
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TermKind::Uri => write!(f, "<{}>", self.lexical),
            TermKind::Literal => f.write_str(&self.lexical),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Panics if `subject` or `predicate` is a literal.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        assert!(subject.is_uri(), "triple subject must be a URI");
        assert!(predicate.is_uri(), "triple predicate must be a URI");
        Triple { subject, predicate, object }
    }
}

/// A deduplicated set of triples with the label of the dataset it came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleSet {
    pub label: String,
    pub triples: BTreeSet<Triple>,
}

impl TripleSet {
    pub fn new(label: impl Into<String>) -> Self {
        TripleSet { label: label.into(), triples: BTreeSet::new() }
    }

    pub fn from_triples(label: impl Into<String>, triples: impl IntoIterator<Item = Triple>) -> Self {
        TripleSet { label: label.into(), triples: triples.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub strict: bool,
}

/// Line accounting of a parse. `statements + skipped` equals the number of
/// non-blank, non-comment lines.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub lines: usize,
    pub statements: usize,
    pub skipped: usize,
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Parses N-Triples (optionally gzip-compressed) into a [`TripleSet`].
pub fn parse_ntriples<R: Read>(
    input: R,
    label: &str,
    options: ParseOptions,
) -> Result<(TripleSet, ParseStats)> {
    let mut reader = BufReader::new(input);
    let is_gzip = reader.fill_buf()?.starts_with(&GZIP_MAGIC);
    if is_gzip {
        parse_lines(BufReader::new(MultiGzDecoder::new(reader)), label, options)
    } else {
        parse_lines(reader, label, options)
    }
}

/// Parses a file; I/O errors carry the path.
pub fn read_ntriples_file(path: &Path, label: &str, options: ParseOptions) -> Result<(TripleSet, ParseStats)> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    parse_ntriples(file, label, options).map_err(|e| match e {
        Error::Io(io) => Error::file(path, io),
        other => other,
    })
}

/// Convenience wrapper over [`parse_ntriples`] for in-memory text.
pub fn parse_ntriples_str(text: &str, label: &str, options: ParseOptions) -> Result<(TripleSet, ParseStats)> {
    parse_ntriples(text.as_bytes(), label, options)
}

fn parse_lines<R: BufRead>(mut reader: R, label: &str, options: ParseOptions) -> Result<(TripleSet, ParseStats)> {
    let blank_scope = blank_scope(label);
    let mut set = TripleSet::new(label);
    let mut stats = ParseStats::default();
    let mut buf = Vec::new();
    let mut line_number = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_number += 1;
        stats.lines += 1;
        let parsed = match std::str::from_utf8(&buf) {
            Ok(line) => parse_line(line, &blank_scope),
            Err(_) => Err("invalid UTF-8"),
        };
        match parsed {
            Ok(None) => {}
            Ok(Some(triple)) => {
                stats.statements += 1;
                set.triples.insert(triple);
            }
            Err(reason) => {
                if options.strict {
                    return Err(Error::MalformedLine {
                        line: line_number,
                        excerpt: excerpt(&buf, reason),
                    });
                }
                log::debug!("skipping malformed line {line_number}: {reason}");
                stats.skipped += 1;
            }
        }
    }
    Ok((set, stats))
}

fn excerpt(raw: &[u8], reason: &str) -> String {
    let text = String::from_utf8_lossy(raw);
    let text = text.trim_end();
    let short: String = text.chars().take(80).collect();
    format!("{reason}: {short}")
}

fn blank_scope(label: &str) -> String {
    let cleaned: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    if cleaned.is_empty() {
        "b".to_string()
    } else {
        cleaned
    }
}

type LineResult = std::result::Result<Option<Triple>, &'static str>;

fn parse_line(line: &str, blank_scope: &str) -> LineResult {
    let mut cur = Cursor { rest: line };
    cur.skip_ws();
    if cur.rest.is_empty() || cur.rest.starts_with('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank(blank_scope)?,
        _ => return Err("subject must be an IRI or blank node"),
    };
    cur.require_ws()?;
    let predicate = match cur.peek() {
        Some('<') => cur.iri()?,
        _ => return Err("predicate must be an IRI"),
    };
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank(blank_scope)?,
        Some('"') => cur.literal()?,
        _ => return Err("missing or invalid object"),
    };
    cur.skip_ws();
    if !cur.eat('.') {
        return Err("expected '.' terminating the statement");
    }
    cur.skip_ws();
    if !(cur.rest.is_empty() || cur.rest.starts_with('#')) {
        return Err("trailing content after '.'");
    }
    Ok(Some(Triple { subject, predicate, object }))
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.rest.starts_with(c) {
            self.rest = &self.rest[c.len_utf8()..];
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t', '\r', '\n']);
    }

    fn require_ws(&mut self) -> std::result::Result<(), &'static str> {
        let before = self.rest.len();
        self.skip_ws();
        if self.rest.len() == before && !self.rest.starts_with(['<', '"']) {
            return Err("expected whitespace between terms");
        }
        Ok(())
    }

    fn iri(&mut self) -> std::result::Result<Term, &'static str> {
        debug_assert!(self.rest.starts_with('<'));
        let body = &self.rest[1..];
        let end = body.find('>').ok_or("unterminated IRI")?;
        let iri = &body[..end];
        if iri.is_empty() {
            return Err("empty IRI");
        }
        if iri.chars().any(|c| c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`')) {
            return Err("illegal character in IRI");
        }
        self.rest = &body[end + 1..];
        Ok(Term::uri(iri))
    }

    fn blank(&mut self, scope: &str) -> std::result::Result<Term, &'static str> {
        let body = self.rest.strip_prefix("_:").ok_or("malformed blank node")?;
        let mut end = body
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')))
            .unwrap_or(body.len());
        // A label may not end with '.', which belongs to the statement terminator.
        while end > 0 && body[..end].ends_with('.') {
            end -= 1;
        }
        if end == 0 {
            return Err("empty blank node label");
        }
        let name = &body[..end];
        self.rest = &body[end..];
        Ok(Term::uri(format!("_:{scope}.{name}")))
    }

    fn literal(&mut self) -> std::result::Result<Term, &'static str> {
        let start = self.rest;
        let mut chars = self.rest.char_indices().skip(1);
        let mut close = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => match chars.next() {
                    Some((_, 't' | 'b' | 'n' | 'r' | 'f' | '"' | '\'' | '\\')) => {}
                    Some((_, 'u')) => skip_hex(&mut chars, 4)?,
                    Some((_, 'U')) => skip_hex(&mut chars, 8)?,
                    _ => return Err("invalid escape in literal"),
                },
                '"' => {
                    close = Some(i);
                    break;
                }
                '\n' | '\r' => return Err("raw newline in literal"),
                _ => {}
            }
        }
        let close = close.ok_or("unterminated literal")?;
        self.rest = &start[close + 1..];
        if self.rest.starts_with('@') {
            let tag = &self.rest[1..];
            let len = tag
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(tag.len());
            if len == 0 || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return Err("malformed language tag");
            }
            self.rest = &tag[len..];
        } else if let Some(after) = self.rest.strip_prefix("^^") {
            if !after.starts_with('<') {
                return Err("datatype must be an IRI");
            }
            self.rest = after;
            self.iri()?;
        }
        let consumed = start.len() - self.rest.len();
        Ok(Term::literal(&start[..consumed]))
    }
}

fn skip_hex(chars: &mut impl Iterator<Item = (usize, char)>, n: usize) -> std::result::Result<(), &'static str> {
    for _ in 0..n {
        match chars.next() {
            Some((_, c)) if c.is_ascii_hexdigit() => {}
            _ => return Err("invalid unicode escape"),
        }
    }
    Ok(())
}

/// Set union of several datasets. Identical terms unify into one node.
pub fn merge_datasets(parts: &[TripleSet], label: &str) -> TripleSet {
    let mut merged = TripleSet::new(label);
    for part in parts {
        merged.triples.extend(part.triples.iter().cloned());
    }
    merged
}

/// Writes the canonical (sorted) N-Triples form of `set`.
pub fn write_ntriples<W: Write>(set: &TripleSet, mut out: W) -> std::io::Result<()> {
    for t in &set.triples {
        writeln!(out, "{} {} {} .", t.subject, t.predicate, t.object)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strict() -> ParseOptions {
        ParseOptions { strict: true }
    }

    #[test]
    fn minimal_line() {
        let (set, stats) = parse_ntriples_str("<urn:A> <urn:r> <urn:B> .\n", "t", strict()).unwrap();
        assert_eq!(set.len(), 1);
        let t = set.iter().next().unwrap();
        assert_eq!(t.subject, Term::uri("urn:A"));
        assert_eq!(t.predicate, Term::uri("urn:r"));
        assert_eq!(t.object, Term::uri("urn:B"));
        assert_eq!(stats.statements, 1);
    }

    #[test]
    fn missing_object_strict_and_lenient() {
        let text = "<urn:A> <urn:r> .\n";
        match parse_ntriples_str(text, "t", strict()) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected MalformedLine, got {other:?}"),
        }
        let (set, stats) = parse_ntriples_str(text, "t", ParseOptions::default()).unwrap();
        assert!(set.is_empty());
        assert_eq!(stats.skipped, 1);
    }

    #[test]
    fn comments_blank_lines_and_duplicates() {
        let text = "# header\n\n<urn:a> <urn:p> \"x\"@en . # trailing\n<urn:a> <urn:p> \"x\"@en .\n";
        let (set, stats) = parse_ntriples_str(text, "t", strict()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(stats.statements, 2);
        assert_eq!(stats.lines, 4);
        let obj = &set.iter().next().unwrap().object;
        assert_eq!(obj, &Term::literal("\"x\"@en"));
    }

    #[test]
    fn literal_forms_are_distinct_nodes() {
        let text = r#"<urn:a> <urn:p> "1" .
<urn:a> <urn:p> "1"^^<http://www.w3.org/2001/XMLSchema#integer> .
<urn:a> <urn:p> "1"@en .
<urn:a> <urn:p> "say \"hi\"é" .
"#;
        let (set, _) = parse_ntriples_str(text, "t", strict()).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.iter().any(|t| t.object.lexical == r#""say \"hi\"é""#));
    }

    #[test]
    fn blank_nodes_are_scoped_by_label() {
        let text = "_:b0 <urn:p> _:b1 .\n";
        let (a, _) = parse_ntriples_str(text, "one", strict()).unwrap();
        let (b, _) = parse_ntriples_str(text, "two", strict()).unwrap();
        let ta = a.iter().next().unwrap();
        assert_eq!(ta.subject, Term::uri("_:one.b0"));
        assert_eq!(ta.object, Term::uri("_:one.b1"));
        let merged = merge_datasets(&[a, b], "all");
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn blank_label_before_terminator() {
        let (set, _) = parse_ntriples_str("<urn:a> <urn:p> _:x.\n", "f", strict()).unwrap();
        assert_eq!(set.iter().next().unwrap().object, Term::uri("_:f.x"));
    }

    #[test]
    fn rejects_literal_subject_and_garbage() {
        for bad in [
            "\"x\" <urn:p> <urn:o> .",
            "<urn:s> \"p\" <urn:o> .",
            "<urn:s> <urn:p> <urn:o>",
            "<urn:s> <urn:p> <urn:o> . extra",
            "<urn:s> <urn:p> \"open .",
            "<> <urn:p> <urn:o> .",
            "<urn:s> <urn:p> \"x\"@ .",
        ] {
            assert!(parse_ntriples_str(bad, "t", strict()).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn gzip_input_is_detected() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(b"<urn:A> <urn:r> <urn:B> .\n<urn:B> <urn:r> <urn:C> .\n").unwrap();
        let bytes = enc.finish().unwrap();
        let (set, _) = parse_ntriples(&bytes[..], "gz", strict()).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn merge_examples() {
        let t = |s: &str, o: &str| Triple::new(Term::uri(s), Term::uri("urn:p"), Term::uri(o));
        let x = TripleSet::from_triples("x", [t("a", "b")]);
        assert_eq!(merge_datasets(std::slice::from_ref(&x), "x"), x);

        let y = TripleSet::from_triples("y", [t("c", "d")]);
        assert_eq!(merge_datasets(&[x.clone(), y], "xy").len(), 2);

        // Set-union oracle: 3 + 3 sharing one triple.
        let left = TripleSet::from_triples("l", [t("a", "b"), t("b", "c"), t("c", "d")]);
        let right = TripleSet::from_triples("r", [t("c", "d"), t("d", "e"), t("e", "f")]);
        let mut oracle: Vec<_> = left.iter().chain(right.iter()).cloned().collect();
        oracle.sort();
        oracle.dedup();
        assert_eq!(oracle.len(), 5);
        let merged = merge_datasets(&[left, right], "lr");
        assert_eq!(merged.triples.into_iter().collect::<Vec<_>>(), oracle);
    }
}
