//! Reading series from CSV files.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Which column holds the values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ColumnSelector {
    /// `value` if present, otherwise the second column (or the only one).
    #[default]
    Auto,
    Name(String),
    /// 1-based position.
    Position(usize),
}

impl ColumnSelector {
    /// Digits select a 1-based position, anything else a header name.
    pub fn parse(text: &str) -> Self {
        match text.parse::<usize>() {
            Ok(p) => ColumnSelector::Position(p),
            Err(_) => ColumnSelector::Name(text.to_string()),
        }
    }

    fn resolve(&self, headers: &csv::StringRecord) -> Result<usize> {
        let bad = |message: String| Error::Input { line: 1, message };
        match self {
            ColumnSelector::Auto => Ok(headers
                .iter()
                .position(|h| h.trim() == "value")
                .unwrap_or(if headers.len() >= 2 { 1 } else { 0 })),
            ColumnSelector::Name(name) => headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| bad(format!("no column named '{name}'"))),
            ColumnSelector::Position(p) if *p >= 1 && *p <= headers.len() => Ok(p - 1),
            ColumnSelector::Position(p) => Err(bad(format!(
                "column {p} requested but the header has {} columns",
                headers.len()
            ))),
        }
    }
}

/// Reads one numeric column from CSV text with a header row.
pub fn read_series<R: Read>(reader: R, column: &ColumnSelector) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() {
        return Err(Error::Input {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let col = column.resolve(&headers)?;
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Input {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = record.get(col).ok_or_else(|| Error::Input {
            line,
            message: format!("row has no column {}", col + 1),
        })?;
        let value: f64 = field.parse().map_err(|_| Error::Input {
            line,
            message: format!("'{field}' is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Input {
                line,
                message: format!("'{field}' is not finite"),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Input {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Ok(values)
}

pub fn read_series_file(path: &Path, column: &ColumnSelector) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_series(file, column)
}

/// Writes `index,value` CSV text.
pub fn series_csv(values: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", i + 1));
    }
    out
}

/// Parses a lag list such as `"1,12"` or `"1;12"`.
pub fn parse_lags(text: &str) -> Result<Vec<usize>> {
    let lags: Vec<usize> = text
        .split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Specification(format!("invalid lag '{s}'")))
        })
        .collect::<Result<_>>()?;
    if lags.is_empty() {
        return Err(Error::Specification("empty lag list".into()));
    }
    Ok(lags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_value_column() {
        let text = "index,value\n1,2.5\n2,3\n3,-1e2\n";
        assert_eq!(
            read_series(text.as_bytes(), &ColumnSelector::Auto).unwrap(),
            vec![2.5, 3.0, -100.0]
        );
    }

    #[test]
    fn selects_by_name_and_position() {
        let text = "t,a,b\n1,10,20\n2,11,21\n";
        let by_name = read_series(text.as_bytes(), &ColumnSelector::parse("b")).unwrap();
        assert_eq!(by_name, vec![20.0, 21.0]);
        let by_pos = read_series(text.as_bytes(), &ColumnSelector::parse("2")).unwrap();
        assert_eq!(by_pos, vec![10.0, 11.0]);
        assert!(read_series(text.as_bytes(), &ColumnSelector::parse("9")).is_err());
        assert!(read_series(text.as_bytes(), &ColumnSelector::parse("zz")).is_err());
    }

    #[test]
    fn reports_line_of_bad_value() {
        let text = "index,value\n1,2\n2,abc\n";
        match read_series(text.as_bytes(), &ColumnSelector::Auto) {
            Err(Error::Input { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_and_lags() {
        let v = vec![1.5, 2.25, 3.0];
        assert_eq!(read_series(series_csv(&v).as_bytes(), &ColumnSelector::Auto).unwrap(), v);
        assert_eq!(parse_lags("1, 12").unwrap(), vec![1, 12]);
        assert_eq!(parse_lags("1;4").unwrap(), vec![1, 4]);
        assert!(parse_lags("1,x").is_err());
    }
}
