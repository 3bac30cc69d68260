//! Check reports and their two renderings.
//!
//! Both renderings carry the same key/value content. The machine rendering
//! is one record per line: a tag followed by `key=value` fields, where a
//! value is written bare unless it is empty or contains whitespace, `"`,
//! `\`, `=` or a control character, in which case it is double-quoted with
//! backslash escapes.

use std::fmt::{self, Write as _};
use std::time::Duration;

use thiserror::Error;

/// One line of the machine format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub tag: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(tag: impl Into<String>) -> Self {
        Record {
            tag: tag.into(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)?;
        for (k, v) in &self.fields {
            write!(f, " {k}=")?;
            write_value(f, v)?;
        }
        Ok(())
    }
}

fn needs_quotes(v: &str) -> bool {
    v.is_empty()
        || v.chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '"' | '\\' | '='))
}

fn write_value(out: &mut impl fmt::Write, v: &str) -> fmt::Result {
    if !needs_quotes(v) {
        return out.write_str(v);
    }
    out.write_char('"')?;
    for c in v.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\t' => out.write_str("\\t")?,
            '\r' => out.write_str("\\r")?,
            c if c.is_control() => write!(out, "\\u{{{:x}}}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('"')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("column {col}: {reason}")]
    Syntax { col: usize, reason: &'static str },
}

/// Parse one machine-format line.
pub fn parse_record(line: &str) -> Result<Record, RecordError> {
    let chars: Vec<char> = line.chars().collect();
    let err = |pos: usize, reason| RecordError::Syntax {
        col: pos + 1,
        reason,
    };
    let mut pos = 0;
    let key_char = |c: char| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-');
    let take_key = |pos: &mut usize| {
        let start = *pos;
        while *pos < chars.len() && key_char(chars[*pos]) {
            *pos += 1;
        }
        chars[start..*pos].iter().collect::<String>()
    };
    let tag = take_key(&mut pos);
    if tag.is_empty() {
        return Err(err(pos, "expected a record tag"));
    }
    let mut record = Record::new(tag);
    while pos < chars.len() {
        if chars[pos] != ' ' {
            return Err(err(pos, "expected a space before the next field"));
        }
        pos += 1;
        let key = take_key(&mut pos);
        if key.is_empty() {
            return Err(err(pos, "expected a field key"));
        }
        if chars.get(pos) != Some(&'=') {
            return Err(err(pos, "expected '=' after the key"));
        }
        pos += 1;
        let value = if chars.get(pos) == Some(&'"') {
            pos += 1;
            let mut value = String::new();
            loop {
                match chars.get(pos) {
                    None => return Err(err(pos, "unterminated quoted value")),
                    Some('"') => {
                        pos += 1;
                        break;
                    }
                    Some('\\') => {
                        pos += 1;
                        match chars.get(pos) {
                            Some('"') => value.push('"'),
                            Some('\\') => value.push('\\'),
                            Some('n') => value.push('\n'),
                            Some('t') => value.push('\t'),
                            Some('r') => value.push('\r'),
                            Some('u') => {
                                if chars.get(pos + 1) != Some(&'{') {
                                    return Err(err(pos, "expected '{' after \\u"));
                                }
                                let start = pos + 2;
                                let end = (start..chars.len())
                                    .find(|&i| chars[i] == '}')
                                    .ok_or_else(|| err(pos, "unterminated \\u escape"))?;
                                let hex: String = chars[start..end].iter().collect();
                                let c = u32::from_str_radix(&hex, 16)
                                    .ok()
                                    .and_then(char::from_u32)
                                    .ok_or_else(|| err(start, "invalid \\u escape"))?;
                                value.push(c);
                                pos = end;
                            }
                            _ => return Err(err(pos, "unknown escape")),
                        }
                        pos += 1;
                    }
                    Some(&c) => {
                        value.push(c);
                        pos += 1;
                    }
                }
            }
            value
        } else {
            let start = pos;
            while pos < chars.len() && chars[pos] != ' ' {
                if matches!(chars[pos], '"' | '\\' | '=') || chars[pos].is_control() {
                    return Err(err(pos, "character must be quoted"));
                }
                pos += 1;
            }
            if start == pos {
                return Err(err(pos, "empty values must be quoted"));
            }
            chars[start..pos].iter().collect()
        };
        record.fields.push((key, value));
    }
    Ok(record)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A measurement with no pass/fail meaning.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// The outcome of one named check.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub fields: Vec<(String, String)>,
    pub witnesses: Vec<Record>,
    pub elapsed: Option<Duration>,
}

impl Check {
    fn with_status(id: impl Into<String>, status: Status) -> Self {
        Check {
            id: id.into(),
            status,
            fields: Vec::new(),
            witnesses: Vec::new(),
            elapsed: None,
        }
    }

    pub fn pass(id: impl Into<String>) -> Self {
        Self::with_status(id, Status::Pass)
    }

    pub fn fail(id: impl Into<String>) -> Self {
        Self::with_status(id, Status::Fail)
    }

    pub fn info(id: impl Into<String>) -> Self {
        Self::with_status(id, Status::Info)
    }

    /// Pass or fail depending on `ok`.
    pub fn status_of(id: impl Into<String>, ok: bool) -> Self {
        Self::with_status(id, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn field(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    /// The same check, marked failed.
    pub fn failing(mut self) -> Self {
        self.status = Status::Fail;
        self
    }

    pub fn witness(mut self, w: Record) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn records(&self, timings: bool) -> Vec<Record> {
        let mut head = Record::new("check")
            .field("id", &self.id)
            .field("status", self.status.as_str());
        head.fields.extend(self.fields.iter().cloned());
        if let (true, Some(t)) = (timings, self.elapsed) {
            head = head.field("elapsed_ms", format!("{:.3}", t.as_secs_f64() * 1e3));
        }
        let mut out = vec![head];
        for w in &self.witnesses {
            let mut rec = Record::new("witness").field("check", &self.id);
            rec.fields.push(("kind".into(), w.tag.clone()));
            rec.fields.extend(w.fields.iter().cloned());
            out.push(rec);
        }
        out
    }
}

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    fn summary(&self) -> Record {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        Record::new("summary")
            .field("checks", self.checks.len())
            .field("passed", count(Status::Pass))
            .field("failed", count(Status::Fail))
            .field("info", count(Status::Info))
    }

    pub fn render(&self, format: Format, timings: bool) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match format {
                Format::Machine => {
                    for r in c.records(timings) {
                        writeln!(out, "{r}").unwrap();
                    }
                }
                Format::Text => render_text(&mut out, c, timings),
            }
        }
        let summary = self.summary();
        match format {
            Format::Machine => writeln!(out, "{summary}").unwrap(),
            Format::Text => {
                let fields = fields_text(&summary.fields);
                writeln!(out, "summary:{fields}").unwrap();
            }
        }
        out
    }
}

fn fields_text(fields: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in fields {
        write!(out, " {k}=").unwrap();
        write_value(&mut out, v).unwrap();
    }
    out
}

fn render_text(out: &mut String, c: &Check, timings: bool) {
    let status = c.status.as_str().to_uppercase();
    write!(out, "{status:<4} {}", c.id).unwrap();
    if let (true, Some(t)) = (timings, c.elapsed) {
        write!(out, " ({:.3} ms)", t.as_secs_f64() * 1e3).unwrap();
    }
    writeln!(out, "{}", fields_text(&c.fields)).unwrap();
    for w in &c.witnesses {
        writeln!(out, "     witness {}:{}", w.tag, fields_text(&w.fields)).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_and_quoted_values() {
        let r = Record::new("check")
            .field("id", "fock.R1")
            .field("note", "two words")
            .field("empty", "")
            .field("eq", "a=b");
        let line = r.to_string();
        assert_eq!(
            line,
            r#"check id=fock.R1 note="two words" empty="" eq="a=b""#
        );
        assert_eq!(parse_record(&line).unwrap(), r);
    }

    #[test]
    fn escapes_round_trip() {
        let r = Record::new("w").field("v", "quote \" slash \\ nl \n tab \t bell \u{7}");
        assert_eq!(parse_record(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn syntax_errors_carry_columns() {
        assert_eq!(
            parse_record("check id").unwrap_err(),
            RecordError::Syntax {
                col: 9,
                reason: "expected '=' after the key"
            }
        );
        assert!(parse_record("check v=\"open").is_err());
        assert!(parse_record("check v=a\"b").is_err());
        assert!(parse_record("").is_err());
    }

    #[test]
    fn timings_only_when_asked() {
        let mut c = Check::pass("x");
        c.elapsed = Some(Duration::from_millis(3));
        assert!(c.records(false)[0].get("elapsed_ms").is_none());
        assert_eq!(c.records(true)[0].get("elapsed_ms"), Some("3.000"));
    }
}
