//! Reading observations from disk, in file order.

use std::path::Path;

use ucpd_core::uprocess::{Sample, MIN_SAMPLE};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One number per line.
    Csv,
    /// One JSON object per line with a numeric field.
    Jsonl,
}

fn parse_number(line: usize, raw: &str) -> CliResult<f64> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Parse {
            line,
            content: raw.to_string(),
        }),
    }
}

fn parse_json_line(line: usize, raw: &str, field: &str) -> CliResult<f64> {
    let bad = || CliError::Parse {
        line,
        content: raw.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(raw).map_err(|_| bad())?;
    let v = value
        .get(field)
        .and_then(serde_json::Value::as_f64)
        .ok_or_else(bad)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Parses file contents. Blank lines are skipped; line numbers are 1-based.
pub fn parse(text: &str, format: Format, field: &str) -> CliResult<Sample> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let v = match format {
            Format::Csv => parse_number(i + 1, raw)?,
            Format::Jsonl => parse_json_line(i + 1, raw.trim(), field)?,
        };
        values.push(v);
    }
    if values.len() < MIN_SAMPLE {
        return Err(CliError::TooFewObservations(values.len()));
    }
    Ok(Sample::new(values)?)
}

pub fn ingest(path: &Path, format: Format, field: &str) -> CliResult<Sample> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, format, field)
}

/// Single-column CSV whose values parse back bit-exactly.
pub fn to_csv(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_in_file_order() {
        let s = parse("1\n2\n3\n4\n", Format::Csv, "x").unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0, 4.0]);
        let s = parse("4\n\n  3 \r\n2\n1", Format::Csv, "x").unwrap();
        assert_eq!(s.values(), &[4.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        match parse("1\n2\nabc\n4\n5\n", Format::Csv, "x") {
            Err(CliError::Parse { line, content }) => {
                assert_eq!(line, 3);
                assert_eq!(content, "abc");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("1\n\n2\nNaN\n", Format::Csv, "x"),
            Err(CliError::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse("1\n2\n3\n", Format::Csv, "x"),
            Err(CliError::TooFewObservations(3))
        ));
    }

    #[test]
    fn jsonl_field() {
        let text = "{\"x\":1.5}\n{\"x\":2}\n\n{\"x\":-3e2,\"y\":1}\n{\"x\":0.25}\n";
        assert_eq!(
            parse(text, Format::Jsonl, "x").unwrap().values(),
            &[1.5, 2.0, -300.0, 0.25]
        );
        let err = parse("{\"x\":1}\n{\"y\":2}\n", Format::Jsonl, "x").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }));
        let err = parse("{\"x\":\"1\"}\n", Format::Jsonl, "x").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 1, .. }));
        let s = parse(
            "{\"v\":1}\n{\"v\":2}\n{\"v\":3}\n{\"v\":4}\n",
            Format::Jsonl,
            "v",
        )
        .unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let v = vec![
            0.1,
            -1.0 / 3.0,
            1e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            -0.0,
            123456789.12345679,
        ];
        let back = parse(&to_csv(&v), Format::Csv, "x").unwrap();
        assert!(v
            .iter()
            .zip(back.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
