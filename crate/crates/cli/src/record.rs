//! Line-oriented `key=value` records, the output format of every command.

use std::fmt::Display;
use std::io::Write;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    /// A record of the given kind, starting with its format version.
    pub fn new(kind: &str) -> Self {
        let mut r = Record::default();
        r.push("format_version", FORMAT_VERSION);
        r.push("record", kind);
        r
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn render(&self) -> String {
        self.fields
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Parses rendered text; lines without `=` are ignored.
    pub fn parse(text: &str) -> Self {
        let fields = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Record { fields }
    }

    /// Writes the whole record to stdout in one call.
    pub fn print(&self) {
        let text = self.render();
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(text.as_bytes());
        let _ = out.flush();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let mut r = Record::new("detect");
        r.push("statistic", 1.25)
            .push("reject", true)
            .push("weight", "loglog:1");
        let text = r.render();
        assert!(text.starts_with("format_version=1\nrecord=detect\n"));
        let back = Record::parse(&text);
        assert_eq!(back, r);
        assert_eq!(back.get("weight"), Some("loglog:1"));
        assert_eq!(back.get("missing"), None);
    }
}
