//! Plain-text interchange format for finite metric measure spaces.
//!
//! ```text
//! # optional comments run to end of line
//! points 3
//! distances
//! 1
//! 2 1
//! weights
//! 0.5 0.25 0.25
//! ```
//!
//! The `distances` section lists the strict lower triangle row by row
//! (row `i` carries `d(i,0) … d(i,i-1)`, so a one-point space has an
//! empty section); whitespace is free-form. The reader reports malformed
//! input with the byte offset of the offending token and hands the
//! reconstructed matrix to [`FiniteMetricMeasureSpace::new`], so every
//! structural invariant (symmetry comes free, triangle inequality and
//! weight positivity do not) is enforced on the way in.

use crate::finite::{FiniteMetricMeasureSpace, MAX_POINTS};
use crate::{Error, Result};

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { text, pos: 0 }
    }

    /// Next whitespace-delimited token outside comments, with its byte
    /// offset.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        let bytes = self.text.as_bytes();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < bytes.len() && bytes[self.pos] == b'#' {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < bytes.len()
            && !bytes[self.pos].is_ascii_whitespace()
            && bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        Some((start, &self.text[start..self.pos]))
    }
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

fn expect_keyword(tokens: &mut Tokens<'_>, keyword: &str) -> Result<()> {
    match tokens.next() {
        Some((_, tok)) if tok == keyword => Ok(()),
        Some((off, tok)) => Err(parse_err(off, format!("expected '{keyword}', found '{tok}'"))),
        None => Err(parse_err(
            tokens.text.len(),
            format!("unexpected end of input, expected '{keyword}'"),
        )),
    }
}

fn parse_number(tokens: &mut Tokens<'_>, what: &str) -> Result<f64> {
    match tokens.next() {
        Some((off, tok)) => {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(off, format!("invalid {what} '{tok}'")))?;
            if !v.is_finite() {
                return Err(parse_err(off, format!("{what} '{tok}' is not finite")));
            }
            Ok(v)
        }
        None => Err(parse_err(
            tokens.text.len(),
            format!("unexpected end of input, expected a {what}"),
        )),
    }
}

/// Parses the text format into a fully validated space.
pub fn parse_space(text: &str) -> Result<FiniteMetricMeasureSpace> {
    let mut tokens = Tokens::new(text);
    expect_keyword(&mut tokens, "points")?;
    let points = match tokens.next() {
        Some((off, tok)) => {
            let p: usize =
                tok.parse().map_err(|_| parse_err(off, format!("invalid point count '{tok}'")))?;
            if p == 0 || p > MAX_POINTS {
                return Err(parse_err(
                    off,
                    format!("point count {p} outside 1..={MAX_POINTS}"),
                ));
            }
            p
        }
        None => {
            return Err(parse_err(text.len(), "unexpected end of input, expected a point count"))
        }
    };

    expect_keyword(&mut tokens, "distances")?;
    let mut dist = vec![0.0f64; points * points];
    for i in 1..points {
        for j in 0..i {
            let d = parse_number(&mut tokens, "distance")?;
            dist[i * points + j] = d;
            dist[j * points + i] = d;
        }
    }

    expect_keyword(&mut tokens, "weights")?;
    let mut weights = Vec::with_capacity(points);
    for _ in 0..points {
        weights.push(parse_number(&mut tokens, "weight")?);
    }

    if let Some((off, tok)) = tokens.next() {
        return Err(parse_err(off, format!("unexpected trailing token '{tok}'")));
    }

    FiniteMetricMeasureSpace::new(points, dist, weights)
}

/// Writes a space in the text format; floating-point values round-trip
/// bitwise through [`parse_space`].
pub fn write_space(space: &FiniteMetricMeasureSpace) -> String {
    let p = space.point_count();
    let mut out = String::new();
    out.push_str(&format!("points {p}\n"));
    out.push_str("distances\n");
    for i in 1..p {
        let row: Vec<String> = (0..i).map(|j| format!("{}", space.distance(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("weights\n");
    let row: Vec<String> = (0..p).map(|i| format!("{}", space.weight(i))).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
    out
}
