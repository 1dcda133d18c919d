//! CSV result tables: header row, data rows, trailing `#` comment block.
//! Numbers carry 12 significant digits so a written table re-parses to the
//! same values.

use std::io::{self, Write};

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    pub fn push_footer(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn write(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.headers.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        for line in &self.footer {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut buffer = Vec::new();
        self.write(&mut buffer).expect("write to Vec cannot fail");
        String::from_utf8(buffer).expect("tables are ASCII")
    }
}

/// 12-significant-digit scientific notation; round-trips through `f64`.
pub fn num(value: f64) -> String {
    if value.is_nan() {
        "NaN".into()
    } else {
        format!("{value:.11e}")
    }
}

pub fn int(value: usize) -> String {
    value.to_string()
}

/// Parses a rendered table back into (headers, numeric rows), skipping the
/// comment block. Non-numeric cells come back as NaN.
pub fn parse(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
    let headers: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    Some((headers, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_at_twelve_significant_digits() {
        for value in [
            4_109_362.9604099984,
            -0.000123456789012345,
            1.0,
            0.0,
            9.99999999999e99,
        ] {
            let text = num(value);
            let parsed: f64 = text.parse().unwrap();
            assert_eq!(num(parsed), text, "{value} -> {text}");
            assert!((parsed - value).abs() <= value.abs() * 1e-11);
        }
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn rendered_tables_parse_back() {
        let mut table = Table::new(vec!["a".into(), "b".into()]);
        table.push_row(vec![num(1.5), num(-2.25e6)]);
        table.push_footer("peaks: 0");
        let rendered = table.render();
        let (headers, rows) = parse(&rendered).unwrap();
        assert_eq!(headers, vec!["a", "b"]);
        assert_eq!(rows, vec![vec![1.5, -2.25e6]]);
    }
}
