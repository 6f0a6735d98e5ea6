//! Plain-text family files.
//!
//! One row per line over `{+, -}` or `{0, 1}` (`0` is `+1`, `1` is `-1`),
//! optionally preceded by a header `# N=<n> S=<s>`. Other lines starting
//! with `#` and blank lines are ignored. Output always uses `+`/`-` and
//! carries the header.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sequence::{BinarySequence, Family};

pub fn parse_family(text: &str) -> Result<Family> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(dims) = parse_header(comment, line_no)? {
                if header.is_some() || !rows.is_empty() {
                    return Err(parse_error(
                        line_no,
                        "header must precede all rows and appear once",
                    ));
                }
                header = Some((dims.0, dims.1, line_no));
            }
            continue;
        }
        rows.push(parse_row(line, line_no)?);
    }
    let Some(first) = rows.first() else {
        return Err(parse_error(text.lines().count().max(1), "no rows"));
    };
    let len = first.len();
    if let Some(pos) = rows.iter().position(|r| r.len() != len) {
        return Err(parse_error(
            row_line(text, pos),
            format!("row has length {}, expected {len}", rows[pos].len()),
        ));
    }
    if let Some((n, s, line_no)) = header {
        if n != len || s != rows.len() {
            return Err(parse_error(
                line_no,
                format!("header says N={n} S={s}, file has N={len} S={}", rows.len()),
            ));
        }
    }
    Family::new(rows)
}

/// `None` for an ordinary comment.
fn parse_header(comment: &str, line_no: usize) -> Result<Option<(usize, usize)>> {
    let words: Vec<&str> = comment.split_whitespace().collect();
    let field = |w: &str, key: &str| w.strip_prefix(key).map(str::parse::<usize>);
    match words.as_slice() {
        [a, b] if a.starts_with("N=") && b.starts_with("S=") => {
            let n = field(a, "N=").expect("prefix checked");
            let s = field(b, "S=").expect("prefix checked");
            match (n, s) {
                (Ok(n), Ok(s)) => Ok(Some((n, s))),
                _ => Err(parse_error(
                    line_no,
                    format!("malformed header '#{comment}'"),
                )),
            }
        }
        _ => Ok(None),
    }
}

fn parse_row(line: &str, line_no: usize) -> Result<BinarySequence> {
    let bits = line
        .chars()
        .enumerate()
        .map(|(col, c)| match c {
            '+' | '0' => Ok(false),
            '-' | '1' => Ok(true),
            other => Err(parse_error(
                line_no,
                format!("unexpected character {other:?} at column {}", col + 1),
            )),
        })
        .collect::<Result<Vec<bool>>>()?;
    BinarySequence::from_fn(bits.len(), |n| bits[n - 1])
}

/// Line number of the `index`-th row.
fn row_line(text: &str, index: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .nth(index)
        .map_or(0, |(i, _)| i + 1)
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn write_family(family: &Family) -> String {
    let mut out = format!("# N={} S={}\n", family.seq_len(), family.count());
    for row in family.rows() {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    out
}

pub fn read_family_file(path: &Path) -> Result<Family> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_family(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn write_family_file(path: &Path, family: &Family) -> Result<()> {
    fs::write(path, write_family(family)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_alphabets() {
        let a = parse_family("++-\n+-+\n").unwrap();
        let b = parse_family("# N=3 S=2\n001\n010\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.row(1).signs(), vec![1, 1, -1]);
        assert_eq!(write_family(&a), "# N=3 S=2\n++-\n+-+\n");
    }

    #[test]
    fn comments_and_blank_lines() {
        let f = parse_family("# generated\n\n  +-  \n# trailing note\n-+\n").unwrap();
        assert_eq!((f.seq_len(), f.count()), (2, 2));
    }

    #[test]
    fn malformed_input() {
        let line = |text: &str| match parse_family(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line("++\n+x\n"), 2);
        assert_eq!(line("++\n\n+++\n"), 3);
        assert_eq!(line("# N=3 S=1\n++\n"), 1);
        assert_eq!(line("# N=2 S=x\n++\n"), 1);
        assert_eq!(line("++\n# N=2 S=1\n"), 2);
        assert_eq!(line(""), 1);
        assert_eq!(line("# only a comment\n"), 1);
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = read_family_file(Path::new("/nonexistent/famcorr.txt")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/famcorr.txt"));
    }
}
