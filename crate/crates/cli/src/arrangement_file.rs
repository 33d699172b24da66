//! Plain-text arrangements: one hyperplane `a_1 ... a_m | b` per line,
//! `#` starts a comment, blank lines are ignored.

use std::fmt;

use onebit_mimo::geometry::HyperplaneArrangement;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn numbers(text: &str, line: usize) -> Result<Vec<f64>, ParseError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ParseError {
                    line,
                    message: format!("'{t}' is not a finite number"),
                })
        })
        .collect()
}

/// Parses one `a_1 ... a_m | b` row.
pub fn parse_row(text: &str, line: usize) -> Result<(Vec<f64>, f64), ParseError> {
    let Some((lhs, rhs)) = text.split_once('|') else {
        return Err(ParseError {
            line,
            message: "expected 'a_1 ... a_m | b'".into(),
        });
    };
    let normal = numbers(lhs, line)?;
    let offset = numbers(rhs, line)?;
    if normal.is_empty() {
        return Err(ParseError {
            line,
            message: "missing normal coefficients".into(),
        });
    }
    if offset.len() != 1 {
        return Err(ParseError {
            line,
            message: "expected exactly one offset after '|'".into(),
        });
    }
    if normal.iter().all(|v| *v == 0.0) {
        return Err(ParseError {
            line,
            message: "normal vector is zero".into(),
        });
    }
    Ok((normal, offset[0]))
}

pub fn parse_arrangement(text: &str) -> Result<HyperplaneArrangement, ParseError> {
    let mut rows = Vec::new();
    let mut dim = None;
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = parse_row(content, line)?;
        match dim {
            None => dim = Some(row.0.len()),
            Some(d) if d != row.0.len() => {
                return Err(ParseError {
                    line,
                    message: format!("expected {d} coefficients, found {}", row.0.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    let Some(dim) = dim else {
        return Err(ParseError {
            line: last_line.max(1),
            message: "no hyperplanes found".into(),
        });
    };
    HyperplaneArrangement::from_rows(dim, &rows).map_err(|e| ParseError {
        line: last_line,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# four slabs\n1 0 | -3\n\n1 0 | -1  # left\n1,0 | 1\n1 0 | 3\n";
        let arr = parse_arrangement(text).unwrap();
        assert_eq!(arr.count(), 4);
        assert_eq!(arr.dim(), 2);
        assert_eq!(arr.offsets()[3], 3.0);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_arrangement("1 0 | 1\n\n1 0 0 | 2\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_arrangement("1 0 | 1\n1 x | 2\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.to_string().starts_with("line 2:"));
        assert_eq!(parse_arrangement("1 0 1\n").unwrap_err().line, 1);
        assert_eq!(parse_arrangement("0 0 | 1\n").unwrap_err().line, 1);
        assert!(parse_arrangement("# nothing\n").is_err());
    }
}
