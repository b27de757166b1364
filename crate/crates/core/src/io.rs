//! Instance text format.
//!
//! ```text
//! n m
//! p_1   (one-line notation, 1-based, n integers)
//! ...
//! p_m
//! w w_1 ... w_n   (optional element weights)
//! ```
//!
//! Blank lines are ignored.  Parse errors carry the 1-based line and column
//! of the offending token.

use crate::error::{Error, Result};
use crate::perm::{Instance, Permutation, WeightVector};
use std::path::Path;

struct Line<'a> {
    no: usize,
    text: &'a str,
}

/// Tokens of one line with their 1-based starting columns.
fn tokens<'a>(line: &Line<'a>) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut col = 0usize;
    for piece in line.text.split_inclusive(char::is_whitespace) {
        let tok = piece.trim_end_matches(char::is_whitespace);
        if !tok.is_empty() {
            out.push((col + 1, tok));
        }
        col += piece.chars().count();
    }
    out
}

fn parse_count(line: &Line<'_>, col: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line: line.no,
        col,
        msg: format!("expected {what} (a positive integer), got {tok:?}"),
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line { no: i + 1, text: l })
        .filter(|l| !l.text.trim().is_empty());

    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty file; expected an 'n m' header".into(),
    })?;
    let head_toks = tokens(&header);
    if head_toks.len() != 2 {
        return Err(Error::Parse {
            line: header.no,
            col: 1,
            msg: format!("header must be 'n m', found {} token(s)", head_toks.len()),
        });
    }
    let n = parse_count(&header, head_toks[0].0, head_toks[0].1, "n")?;
    let m = parse_count(&header, head_toks[1].0, head_toks[1].1, "m")?;
    if n == 0 || m == 0 {
        return Err(Error::Parse {
            line: header.no,
            col: 1,
            msg: "n and m must both be at least 1".into(),
        });
    }

    let mut perms = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or(Error::Parse {
            line: header.no,
            col: 1,
            msg: format!("expected {m} permutation lines, found {}", perms.len()),
        })?;
        let toks = tokens(&line);
        if toks.len() != n {
            return Err(Error::Parse {
                line: line.no,
                col: toks.get(n).map_or(1, |t| t.0),
                msg: format!("expected {n} elements, found {}", toks.len()),
            });
        }
        let mut vals = Vec::with_capacity(n);
        for (col, tok) in &toks {
            vals.push(parse_count(&line, *col, tok, "an element")?);
        }
        let p = Permutation::from_one_based(&vals).map_err(|e| Error::Parse {
            line: line.no,
            col: toks[0].0,
            msg: e.to_string(),
        })?;
        perms.push(p);
    }

    let mut weights = None;
    if let Some(line) = lines.next() {
        let toks = tokens(&line);
        if toks[0].1 != "w" {
            return Err(Error::Parse {
                line: line.no,
                col: toks[0].0,
                msg: format!("unexpected line; only a weight line 'w ...' may follow the permutations, got {:?}", toks[0].1),
            });
        }
        if toks.len() != n + 1 {
            return Err(Error::Parse {
                line: line.no,
                col: toks.last().map_or(1, |t| t.0),
                msg: format!("expected {n} weights after 'w', found {}", toks.len() - 1),
            });
        }
        let mut w = Vec::with_capacity(n);
        for (col, tok) in &toks[1..] {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line.no,
                col: *col,
                msg: format!("expected a weight, got {tok:?}"),
            })?;
            w.push(v);
        }
        weights = Some(WeightVector::new(w).map_err(|e| Error::Parse {
            line: line.no,
            col: toks[1].0,
            msg: e.to_string(),
        })?);
    }

    if let Some(extra) = lines.next() {
        return Err(Error::Parse {
            line: extra.no,
            col: 1,
            msg: "trailing content after the instance".into(),
        });
    }

    Instance::new(perms, weights)
}

pub fn format_instance(inst: &Instance) -> String {
    let mut out = format!("{} {}\n", inst.n(), inst.m());
    for p in &inst.perms {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    if let Some(w) = &inst.weights {
        out.push('w');
        for v in &w.0 {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    std::fs::write(path, format_instance(inst))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_weights() {
        let text = "3 2\n1 2 3\n3 2 1\nw 1 0.5 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.weights.as_ref().unwrap().of(1), 0.5);
        let again = parse_instance(&format_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn diagnostics_carry_line_and_column() {
        let err = parse_instance("3 2\n1 2 3\n3 x 1\n").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 3);
                assert_eq!(col, 3);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_arity_is_reported() {
        let err = parse_instance("3 2\n1 2\n3 2 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_elements_are_reported_with_location() {
        let err = parse_instance("3 1\n1 1 2\n").unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("twice"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
