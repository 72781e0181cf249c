//! Rendering of command results in the three output formats.

use std::io::{self, Write};

use clap::ValueEnum;
use tower_primes::Record;

pub const CSV_VERSION_LINE: &str = "#v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One record per line, tab-separated `key=value` fields.
    Rows,
    /// `#v1`, then a header and one line per record; a new header starts whenever the
    /// field set changes.
    Csv,
    /// The natural text form of each command (bare numbers, two-column traces,
    /// `key=value` blocks for reports).
    Plain,
}

pub type Fields = Vec<(&'static str, String)>;

/// What a command produced: structured records plus their plain-text rendering.
#[derive(Debug, Default)]
pub struct Output {
    pub records: Vec<Fields>,
    pub plain: String,
}

impl Output {
    pub fn new() -> Self {
        Output::default()
    }

    /// Adds a record whose plain form is its `key=value` block.
    pub fn record(&mut self, r: &dyn Record) {
        if !self.plain.is_empty() {
            self.plain.push('\n');
        }
        self.plain.push_str(&r.to_key_values());
        self.records.push(r.fields());
    }

    /// Adds a record with an explicit plain line.
    pub fn row(&mut self, fields: Fields, plain_line: impl AsRef<str>) {
        self.plain.push_str(plain_line.as_ref());
        self.plain.push('\n');
        self.records.push(fields);
    }

    /// Adds a record that only appears in the structured formats.
    pub fn structured(&mut self, fields: Fields) {
        self.records.push(fields);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Plain => out.write_all(self.plain.as_bytes()),
            Format::Rows => {
                for r in &self.records {
                    let line: Vec<String> = r.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    writeln!(out, "{}", line.join("\t"))?;
                }
                Ok(())
            }
            Format::Csv => {
                writeln!(out, "{CSV_VERSION_LINE}")?;
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
                let mut header: Option<Vec<&str>> = None;
                for r in &self.records {
                    let keys: Vec<&str> = r.iter().map(|(k, _)| *k).collect();
                    if header.as_ref() != Some(&keys) {
                        w.write_record(&keys)?;
                        header = Some(keys);
                    }
                    w.write_record(r.iter().map(|(_, v)| v.as_str()))?;
                }
                w.flush()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Output {
        let mut o = Output::new();
        o.row(vec![("n", "1".into()), ("value", "2".into())], "2");
        o.row(vec![("n", "2".into()), ("value", "3".into())], "3");
        o.structured(vec![("range", "a,b".into())]);
        o
    }

    fn render(o: &Output, f: Format) -> String {
        let mut buf = Vec::new();
        o.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn formats() {
        let o = sample();
        assert_eq!(render(&o, Format::Plain), "2\n3\n");
        assert_eq!(render(&o, Format::Rows), "n=1\tvalue=2\nn=2\tvalue=3\nrange=a,b\n");
        assert_eq!(render(&o, Format::Csv), "#v1\nn,value\n1,2\n2,3\nrange\n\"a,b\"\n");
    }
}
