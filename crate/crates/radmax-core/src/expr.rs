//! Density expression language.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' signed-number)?
//! base   := 't' | number | preset '(' signed-number ')'
//!         | func '(' expr ')' | '(' expr ')'
//! func   := 'abs' | 'exp'
//! preset := 'power' | 'shell' | 'power_family'
//! ```
//!
//! Standalone numbers are positive literals; signs appear only after `^`
//! and inside preset arguments. The presets expand to `t^α` (`power`),
//! `|1 − t|^{−α}` (`shell`, `α ∈ (0,1)`), and the dimension-coupled
//! `t^{−αn}` (`power_family`, `α < 1`, bound to `n` when the expression
//! is compiled). Parsing reports syntax and preset-domain problems with
//! the byte offset of the offending token; printing emits a canonical
//! form that re-parses to the identical tree.
//!
//! Evaluation works on `(0, ∞)`. Products, quotients, and powers are
//! evaluated in log space (so `t^-200 * t^150` is finite wherever the
//! mathematical value is); sums, differences, `abs`, and `exp` fall back
//! to direct arithmetic on their subtrees.

use std::sync::Arc;

use crate::density::{fmt_num, RadialDensity};
use crate::{Error, Result};

/// Abstract syntax tree of a radial density expression in the variable
/// `t` (the distance from the origin).
#[derive(Debug, Clone, PartialEq)]
pub enum DensityExpression {
    /// The variable `t`.
    Var,
    /// A positive literal.
    Number(f64),
    Add(Box<DensityExpression>, Box<DensityExpression>),
    Sub(Box<DensityExpression>, Box<DensityExpression>),
    Mul(Box<DensityExpression>, Box<DensityExpression>),
    Div(Box<DensityExpression>, Box<DensityExpression>),
    /// `base ^ exponent` with a literal exponent.
    Pow(Box<DensityExpression>, f64),
    Abs(Box<DensityExpression>),
    Exp(Box<DensityExpression>),
    /// `power(α)` = `t^α`.
    Power { alpha: f64 },
    /// `shell(α)` = `|1 − t|^{−α}`, `α ∈ (0, 1)`.
    Shell { alpha: f64 },
    /// `power_family(α)` = `t^{−αn}`, `α < 1`, with `n` bound at
    /// compilation.
    PowerFamily { alpha: f64 },
}

// ---------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    peeked: Option<(usize, Tok)>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0, peeked: None }
    }

    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse { offset, message: message.into() }
    }

    fn lex(&mut self) -> Result<Option<(usize, Tok)>> {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = bytes[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && (bytes[self.pos] | 0x20) == b'e' {
                    self.pos += 1;
                    if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-')
                    {
                        self.pos += 1;
                    }
                    while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
                let s = &self.text[start..self.pos];
                let v: f64 = s
                    .parse()
                    .map_err(|_| self.err(start, format!("invalid number '{s}'")))?;
                if !v.is_finite() {
                    return Err(self.err(start, format!("number '{s}' is not finite")));
                }
                return Ok(Some((start, Tok::Number(v))));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                return Ok(Some((start, Tok::Ident(self.text[start..self.pos].to_string()))));
            }
            other => {
                return Err(self.err(start, format!("unexpected character '{}'", other as char)))
            }
        };
        self.pos += 1;
        Ok(Some((start, tok)))
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        self.lex()
    }

    fn peek(&mut self) -> Result<Option<&(usize, Tok)>> {
        if self.peeked.is_none() {
            self.peeked = self.lex()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<usize> {
        match self.next()? {
            Some((off, tok)) if tok == *want => Ok(off),
            Some((off, tok)) => Err(self.err(off, format!("expected {what}, found {tok:?}"))),
            None => Err(self.err(self.text.len(), format!("expected {what}, found end of input"))),
        }
    }
}

// ---------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------

/// Parses the expression grammar; errors carry the byte offset of the
/// offending token.
pub fn parse_density(text: &str) -> Result<DensityExpression> {
    let mut lx = Lexer::new(text);
    if lx.peek()?.is_none() {
        return Err(Error::Parse { offset: 0, message: "empty density expression".to_string() });
    }
    let expr = parse_expr(&mut lx)?;
    if let Some((off, tok)) = lx.next()? {
        return Err(Error::Parse {
            offset: off,
            message: format!("unexpected trailing token {tok:?}"),
        });
    }
    Ok(expr)
}

fn parse_expr(lx: &mut Lexer<'_>) -> Result<DensityExpression> {
    let mut acc = parse_term(lx)?;
    while let Some((_, tok)) = lx.peek()? {
        let add = match tok {
            Tok::Plus => true,
            Tok::Minus => false,
            _ => break,
        };
        lx.next()?;
        let rhs = parse_term(lx)?;
        acc = if add {
            DensityExpression::Add(Box::new(acc), Box::new(rhs))
        } else {
            DensityExpression::Sub(Box::new(acc), Box::new(rhs))
        };
    }
    Ok(acc)
}

fn parse_term(lx: &mut Lexer<'_>) -> Result<DensityExpression> {
    let mut acc = parse_factor(lx)?;
    while let Some((_, tok)) = lx.peek()? {
        let mul = match tok {
            Tok::Star => true,
            Tok::Slash => false,
            _ => break,
        };
        lx.next()?;
        let rhs = parse_factor(lx)?;
        acc = if mul {
            DensityExpression::Mul(Box::new(acc), Box::new(rhs))
        } else {
            DensityExpression::Div(Box::new(acc), Box::new(rhs))
        };
    }
    Ok(acc)
}

fn parse_factor(lx: &mut Lexer<'_>) -> Result<DensityExpression> {
    let base = parse_base(lx)?;
    if let Some((_, Tok::Caret)) = lx.peek()? {
        lx.next()?;
        let (_, q) = parse_signed_number(lx, "an exponent")?;
        return Ok(DensityExpression::Pow(Box::new(base), q));
    }
    Ok(base)
}

fn parse_signed_number(lx: &mut Lexer<'_>, what: &str) -> Result<(usize, f64)> {
    let negative = matches!(lx.peek()?, Some((_, Tok::Minus)));
    if negative {
        lx.next()?;
    }
    match lx.next()? {
        Some((off, Tok::Number(v))) => Ok((off, if negative { -v } else { v })),
        Some((off, tok)) => Err(lx.err(off, format!("expected {what}, found {tok:?}"))),
        None => Err(lx.err(lx.text.len(), format!("expected {what}, found end of input"))),
    }
}

fn parse_base(lx: &mut Lexer<'_>) -> Result<DensityExpression> {
    match lx.next()? {
        Some((_, Tok::Number(v))) => Ok(DensityExpression::Number(v)),
        Some((_, Tok::LParen)) => {
            let inner = parse_expr(lx)?;
            lx.expect(&Tok::RParen, "')'")?;
            Ok(inner)
        }
        Some((off, Tok::Ident(name))) => match name.as_str() {
            "t" => Ok(DensityExpression::Var),
            "abs" | "exp" => {
                lx.expect(&Tok::LParen, "'('")?;
                let inner = parse_expr(lx)?;
                lx.expect(&Tok::RParen, "')'")?;
                Ok(if name == "abs" {
                    DensityExpression::Abs(Box::new(inner))
                } else {
                    DensityExpression::Exp(Box::new(inner))
                })
            }
            "power" | "shell" | "power_family" => {
                lx.expect(&Tok::LParen, "'('")?;
                let (aoff, alpha) = parse_signed_number(lx, "a preset argument")?;
                lx.expect(&Tok::RParen, "')'")?;
                match name.as_str() {
                    "power" => Ok(DensityExpression::Power { alpha }),
                    "shell" => {
                        if !(alpha > 0.0 && alpha < 1.0) {
                            return Err(lx.err(
                                aoff,
                                format!("shell exponent must lie in (0,1), got {alpha}"),
                            ));
                        }
                        Ok(DensityExpression::Shell { alpha })
                    }
                    _ => {
                        if alpha >= 1.0 {
                            return Err(lx.err(
                                aoff,
                                format!(
                                    "power_family exponent must be < 1 so origin balls keep \
                                     finite measure, got {alpha}"
                                ),
                            ));
                        }
                        Ok(DensityExpression::PowerFamily { alpha })
                    }
                }
            }
            other => Err(lx.err(
                off,
                format!(
                    "unknown name '{other}' (expected t, abs, exp, power, shell, power_family)"
                ),
            )),
        },
        Some((off, tok)) => Err(lx.err(off, format!("expected a value, found {tok:?}"))),
        None => Err(lx.err(lx.text.len(), "expected a value, found end of input".to_string())),
    }
}

// ---------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------

fn precedence(e: &DensityExpression) -> u8 {
    use DensityExpression::*;
    match e {
        Add(..) | Sub(..) => 1,
        Mul(..) | Div(..) => 2,
        Pow(..) => 3,
        _ => 4,
    }
}

fn print_child(e: &DensityExpression, out: &mut String, min_prec: u8) {
    if precedence(e) < min_prec {
        out.push('(');
        print_into(e, out);
        out.push(')');
    } else {
        print_into(e, out);
    }
}

fn print_into(e: &DensityExpression, out: &mut String) {
    use DensityExpression::*;
    match e {
        Var => out.push('t'),
        Number(v) => out.push_str(&fmt_num(*v)),
        Add(a, b) => {
            print_child(a, out, 1);
            out.push_str(" + ");
            print_child(b, out, 2);
        }
        Sub(a, b) => {
            print_child(a, out, 1);
            out.push_str(" - ");
            print_child(b, out, 2);
        }
        Mul(a, b) => {
            print_child(a, out, 2);
            out.push_str(" * ");
            print_child(b, out, 3);
        }
        Div(a, b) => {
            print_child(a, out, 2);
            out.push_str(" / ");
            print_child(b, out, 3);
        }
        Pow(a, q) => {
            print_child(a, out, 4);
            out.push('^');
            out.push_str(&fmt_num(*q));
        }
        Abs(a) => {
            out.push_str("abs(");
            print_into(a, out);
            out.push(')');
        }
        Exp(a) => {
            out.push_str("exp(");
            print_into(a, out);
            out.push(')');
        }
        Power { alpha } => {
            out.push_str("power(");
            out.push_str(&fmt_num(*alpha));
            out.push(')');
        }
        Shell { alpha } => {
            out.push_str("shell(");
            out.push_str(&fmt_num(*alpha));
            out.push(')');
        }
        PowerFamily { alpha } => {
            out.push_str("power_family(");
            out.push_str(&fmt_num(*alpha));
            out.push(')');
        }
    }
}

impl DensityExpression {
    /// Canonical form: parses back to the identical tree.
    pub fn print(&self) -> String {
        let mut out = String::new();
        print_into(self, &mut out);
        out
    }
}

impl std::fmt::Display for DensityExpression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.print())
    }
}

// ---------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------

/// Value as `(sign, ln |value|)`: the only representation that survives
/// exponents far outside f64 range. `sign` is −1, 0, or +1 (NaN marks an
/// invalid evaluation such as a fractional power of a negative value).
fn signed_log_eval(e: &DensityExpression, ln_t: f64, n: u32) -> (f64, f64) {
    use DensityExpression::*;
    match e {
        Var => (1.0, ln_t),
        Number(v) => (1.0, v.ln()),
        Power { alpha } => (1.0, alpha * ln_t),
        PowerFamily { alpha } => (1.0, -alpha * f64::from(n) * ln_t),
        Shell { alpha } => {
            let t = ln_t.exp();
            (1.0, -alpha * (1.0 - t).abs().ln())
        }
        Mul(a, b) => {
            let (sa, la) = signed_log_eval(a, ln_t, n);
            let (sb, lb) = signed_log_eval(b, ln_t, n);
            (sa * sb, la + lb)
        }
        Div(a, b) => {
            let (sa, la) = signed_log_eval(a, ln_t, n);
            let (sb, lb) = signed_log_eval(b, ln_t, n);
            (sa * sb, la - lb)
        }
        Pow(a, q) => {
            let (sa, la) = signed_log_eval(a, ln_t, n);
            if sa > 0.0 {
                (1.0, q * la)
            } else if sa == 0.0 {
                // 0^q: zero for q > 0, one for q = 0, infinite for q < 0.
                (1.0, if *q == 0.0 { 0.0 } else { q * la })
            } else if *q == q.trunc() {
                (if (*q as i64) % 2 == 0 { 1.0 } else { -1.0 }, q * la)
            } else {
                (f64::NAN, f64::NAN)
            }
        }
        Abs(a) => {
            let (sa, la) = signed_log_eval(a, ln_t, n);
            (sa.abs(), la)
        }
        Exp(a) => {
            let (sa, la) = signed_log_eval(a, ln_t, n);
            // ln exp(v) = v, computed without forming exp(v).
            (1.0, sa * la.exp())
        }
        Add(a, b) | Sub(a, b) => {
            let (sa, la) = signed_log_eval(a, ln_t, n);
            let (sb, lb) = signed_log_eval(b, ln_t, n);
            let flip = if matches!(e, Sub(..)) { -1.0 } else { 1.0 };
            // Direct fallback, stabilized by factoring out the larger
            // magnitude: sa e^{la} ± sb e^{lb} = e^{m}(sa e^{la-m} ± …).
            let m = la.max(lb);
            if m == f64::NEG_INFINITY {
                return (0.0, f64::NEG_INFINITY);
            }
            let v = sa * (la - m).exp() + flip * sb * (lb - m).exp();
            if v == 0.0 {
                (0.0, f64::NEG_INFINITY)
            } else {
                (v.signum(), m + v.abs().ln())
            }
        }
    }
}

impl DensityExpression {
    /// Direct evaluation at `t > 0` with the ambient dimension `n` bound
    /// (only `power_family` reads it).
    pub fn evaluate(&self, t: f64, n: u32) -> f64 {
        let (s, l) = signed_log_eval(self, t.ln(), n);
        s * l.exp()
    }

    /// `ln` of the value at `t = e^{ln_t}`; `NaN` when the expression is
    /// negative or invalid there.
    pub fn log_evaluate(&self, ln_t: f64, n: u32) -> f64 {
        let (s, l) = signed_log_eval(self, ln_t, n);
        if s > 0.0 {
            l
        } else if s == 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        }
    }

    /// True when the tree is a pure product/quotient/power of `t`,
    /// literals, and power presets — exactly the shapes whose log
    /// evaluation never leaves log space.
    pub fn is_log_exact(&self) -> bool {
        use DensityExpression::*;
        match self {
            Var | Number(_) | Power { .. } | PowerFamily { .. } => true,
            Mul(a, b) | Div(a, b) => a.is_log_exact() && b.is_log_exact(),
            Pow(a, _) => a.is_log_exact(),
            _ => false,
        }
    }

    /// Singular or fractional-power points that radial integrators must
    /// split at.
    fn singular_points(&self) -> Vec<f64> {
        use DensityExpression::*;
        let mut pts = Vec::new();
        self.walk(&mut |e| match e {
            Var | Power { .. } | PowerFamily { .. } => pts.push(0.0),
            Shell { .. } => pts.push(1.0),
            _ => {}
        });
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup();
        pts
    }

    fn walk(&self, visit: &mut impl FnMut(&DensityExpression)) {
        use DensityExpression::*;
        visit(self);
        match self {
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Pow(a, _) | Abs(a) | Exp(a) => a.walk(visit),
            _ => {}
        }
    }

    /// Conservative monotonicity detection (false negatives allowed).
    fn is_nonincreasing(&self, n: u32) -> bool {
        use DensityExpression::*;
        match self {
            Number(_) => true,
            Var => false,
            Power { alpha } => *alpha <= 0.0,
            PowerFamily { alpha } => *alpha >= 0.0,
            Shell { .. } => false,
            Add(a, b) => a.is_nonincreasing(n) && b.is_nonincreasing(n),
            Sub(a, b) => a.is_nonincreasing(n) && b.is_nondecreasing(n),
            Mul(a, b) => a.is_nonincreasing(n) && b.is_nonincreasing(n),
            Div(a, b) => a.is_nonincreasing(n) && b.is_nondecreasing(n),
            Pow(a, q) => {
                if *q >= 0.0 {
                    a.is_nonincreasing(n)
                } else {
                    a.is_nondecreasing(n)
                }
            }
            Abs(_) => false,
            Exp(a) => a.is_nonincreasing(n),
        }
    }

    fn is_nondecreasing(&self, n: u32) -> bool {
        use DensityExpression::*;
        match self {
            Number(_) => true,
            Var => true,
            Power { alpha } => *alpha >= 0.0,
            PowerFamily { alpha } => *alpha <= 0.0,
            Shell { .. } => false,
            Add(a, b) => a.is_nondecreasing(n) && b.is_nondecreasing(n),
            Sub(a, b) => a.is_nondecreasing(n) && b.is_nonincreasing(n),
            Mul(a, b) => a.is_nondecreasing(n) && b.is_nondecreasing(n),
            Div(a, b) => a.is_nondecreasing(n) && b.is_nonincreasing(n),
            Pow(a, q) => {
                if *q >= 0.0 {
                    a.is_nondecreasing(n)
                } else {
                    a.is_nonincreasing(n)
                }
            }
            Abs(_) => false,
            Exp(a) => a.is_nondecreasing(n),
        }
    }

    /// `Some(γ)` when the expression satisfies `w(ct) = c^γ w(t)`.
    fn homogeneity(&self, n: u32) -> Option<f64> {
        use DensityExpression::*;
        match self {
            Number(_) => Some(0.0),
            Var => Some(1.0),
            Power { alpha } => Some(*alpha),
            PowerFamily { alpha } => Some(-alpha * f64::from(n)),
            Shell { .. } => None,
            Mul(a, b) => Some(a.homogeneity(n)? + b.homogeneity(n)?),
            Div(a, b) => Some(a.homogeneity(n)? - b.homogeneity(n)?),
            Pow(a, q) => Some(a.homogeneity(n)? * q),
            Add(a, b) | Sub(a, b) => {
                let (ga, gb) = (a.homogeneity(n)?, b.homogeneity(n)?);
                (ga == gb).then_some(ga)
            }
            Abs(a) => a.homogeneity(n),
            Exp(a) => (a.homogeneity(n) == Some(0.0)).then_some(0.0),
        }
    }

    /// Leading exponent near the origin: `w(t) ~ t^e` as `t → 0⁺`
    /// (conservatively the smallest branch exponent for sums).
    fn zero_exponent(&self, n: u32) -> f64 {
        use DensityExpression::*;
        match self {
            Number(_) => 0.0,
            Var => 1.0,
            Power { alpha } => *alpha,
            PowerFamily { alpha } => -alpha * f64::from(n),
            Shell { .. } => 0.0,
            Mul(a, b) => a.zero_exponent(n) + b.zero_exponent(n),
            Div(a, b) => a.zero_exponent(n) - b.zero_exponent(n),
            Pow(a, q) => a.zero_exponent(n) * q,
            Add(a, b) | Sub(a, b) => a.zero_exponent(n).min(b.zero_exponent(n)),
            Abs(a) => a.zero_exponent(n),
            Exp(a) => {
                if a.zero_exponent(n) >= 0.0 {
                    0.0
                } else {
                    // exp of a pole: no polynomial exponent exists; return
                    // an infinite floor so integrability is never claimed.
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Compiles the expression to a [`RadialDensity`] with the ambient
    /// dimension `n` bound. The profile evaluates through
    /// [`DensityExpression::log_evaluate`]; singular points get stable
    /// edge evaluation in terms of the log-distance to the singularity.
    pub fn to_density(&self, n: u32) -> Result<RadialDensity> {
        let probe = self.log_evaluate(0.0, n); // t = 1
        if probe.is_nan() && !matches!(self, DensityExpression::Shell { .. }) {
            return Err(Error::Domain(format!(
                "density expression '{}' is negative or undefined at t = 1",
                self.print()
            )));
        }
        let name = self.print();
        let log_expr = self.clone();
        let edge_expr = self.clone();
        let log_w = Arc::new(move |t: f64| log_expr.log_evaluate(t.ln(), n));
        let edge = Arc::new(move |sing: f64, side: f64, ln_d: f64| {
            edge_log_eval(&edge_expr, sing, side, ln_d, n)
        });
        Ok(RadialDensity::from_parts(
            name,
            log_w,
            Some(edge),
            self.singular_points(),
            self.is_nonincreasing(n),
            self.homogeneity(n),
            -self.zero_exponent(n),
            false,
        ))
    }
}

/// Stable `(sign, ln|value|)` at `t = sing + side·e^{ln_d}`: the factors
/// that are singular exactly at `sing` are rewritten in terms of `ln_d`,
/// everything else evaluates at the shifted point.
fn edge_signed_eval(
    e: &DensityExpression,
    sing: f64,
    side: f64,
    ln_d: f64,
    n: u32,
) -> (f64, f64) {
    use DensityExpression::*;
    let ln_t = || (sing + side * ln_d.exp()).ln();
    match e {
        Var => {
            if sing == 0.0 && side > 0.0 {
                (1.0, ln_d)
            } else {
                (1.0, ln_t())
            }
        }
        Power { alpha } => {
            if sing == 0.0 && side > 0.0 {
                (1.0, alpha * ln_d)
            } else {
                (1.0, alpha * ln_t())
            }
        }
        PowerFamily { alpha } => {
            if sing == 0.0 && side > 0.0 {
                (1.0, -alpha * f64::from(n) * ln_d)
            } else {
                (1.0, -alpha * f64::from(n) * ln_t())
            }
        }
        Shell { alpha } => {
            if sing == 1.0 {
                (1.0, -alpha * ln_d)
            } else {
                let t = sing + side * ln_d.exp();
                (1.0, -alpha * (1.0 - t).abs().ln())
            }
        }
        Number(v) => (1.0, v.ln()),
        Mul(a, b) => {
            let (sa, la) = edge_signed_eval(a, sing, side, ln_d, n);
            let (sb, lb) = edge_signed_eval(b, sing, side, ln_d, n);
            (sa * sb, la + lb)
        }
        Div(a, b) => {
            let (sa, la) = edge_signed_eval(a, sing, side, ln_d, n);
            let (sb, lb) = edge_signed_eval(b, sing, side, ln_d, n);
            (sa * sb, la - lb)
        }
        Pow(a, q) => {
            let (sa, la) = edge_signed_eval(a, sing, side, ln_d, n);
            if sa > 0.0 {
                (1.0, q * la)
            } else if sa == 0.0 {
                (1.0, if *q == 0.0 { 0.0 } else { q * la })
            } else if *q == q.trunc() {
                (if (*q as i64) % 2 == 0 { 1.0 } else { -1.0 }, q * la)
            } else {
                (f64::NAN, f64::NAN)
            }
        }
        Abs(a) => {
            let (sa, la) = edge_signed_eval(a, sing, side, ln_d, n);
            (sa.abs(), la)
        }
        Exp(a) => {
            let (sa, la) = edge_signed_eval(a, sing, side, ln_d, n);
            (1.0, sa * la.exp())
        }
        Add(a, b) | Sub(a, b) => {
            let (sa, la) = edge_signed_eval(a, sing, side, ln_d, n);
            let (sb, lb) = edge_signed_eval(b, sing, side, ln_d, n);
            let flip = if matches!(e, Sub(..)) { -1.0 } else { 1.0 };
            let m = la.max(lb);
            if m == f64::NEG_INFINITY {
                return (0.0, f64::NEG_INFINITY);
            }
            let v = sa * (la - m).exp() + flip * sb * (lb - m).exp();
            if v == 0.0 {
                (0.0, f64::NEG_INFINITY)
            } else {
                (v.signum(), m + v.abs().ln())
            }
        }
    }
}

fn edge_log_eval(e: &DensityExpression, sing: f64, side: f64, ln_d: f64, n: u32) -> f64 {
    let (s, l) = edge_signed_eval(e, sing, side, ln_d, n);
    if s > 0.0 {
        l
    } else if s == 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> DensityExpression {
        parse_density(s).unwrap()
    }

    #[test]
    fn parses_the_contract_examples() {
        assert_eq!(parse("1"), DensityExpression::Number(1.0));
        assert_eq!(parse("shell(0.5)"), DensityExpression::Shell { alpha: 0.5 });
        // |1 - t|^{-1/2} at t = 0.5 is sqrt(2).
        let shell = parse("shell(0.5)");
        assert!((shell.evaluate(0.5, 3) - 2.0f64.sqrt()).abs() < 1e-15);
        let poly = parse("t^2 + 1");
        assert_eq!(poly.evaluate(2.0, 3), 5.0);
    }

    #[test]
    fn precedence_and_signs() {
        let e = parse("2 * t^-0.5 + 1 / (t + 3)");
        let t: f64 = 4.0;
        let expected = 2.0 * t.powf(-0.5) + 1.0 / (t + 3.0);
        assert!((e.evaluate(t, 1) - expected).abs() < 1e-15);
        // '-' binds as binary only; exponent signs live after '^'.
        let e = parse("t^2 - t");
        assert_eq!(e.evaluate(3.0, 1), 6.0);
        assert_eq!(parse("power(-0.5)"), DensityExpression::Power { alpha: -0.5 });
    }

    #[test]
    fn byte_offsets_locate_errors() {
        match parse_density("t ^").unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_density("foo(1)").unwrap_err() {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 0);
                assert!(message.contains("unknown name"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_density("t + shell(1.5)").unwrap_err() {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 10);
                assert!(message.contains("(0,1)"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_density("(t + 1").unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_density("").unwrap_err(), Error::Parse { offset: 0, .. }));
        assert!(matches!(parse_density("t t").unwrap_err(), Error::Parse { offset: 2, .. }));
    }

    #[test]
    fn printing_is_a_parse_fixed_point() {
        for src in [
            "1",
            "t^2 + 1",
            "2 * t^-0.5 + 1 / (t + 3)",
            "t - (t - 1)",
            "(t + 1) * (t + 2)",
            "abs(1 - t)^-0.25",
            "exp(0 - t) * shell(0.5)",
            "power_family(0.7) / abs(t - 2)",
            "t / (t * t)",
            "1 - t + t",
        ] {
            let ast = parse(src);
            let printed = ast.print();
            assert_eq!(parse(&printed), ast, "src: {src}, printed: {printed}");
            assert_eq!(parse(&printed).print(), printed, "src: {src}");
        }
    }

    #[test]
    fn log_evaluation_survives_extreme_exponents() {
        // Direct arithmetic overflows: t^-200 alone is 1e600 at t = 1e-3.
        let e = parse("t^-200 * t^100");
        let lw = e.log_evaluate((1e-3f64).ln(), 1);
        assert!((lw - 100.0 * 1e3f64.ln()).abs() < 1e-9);
        assert!(e.is_log_exact());
        assert!(!parse("t + 1").is_log_exact());
        // The fallback still factors out the larger magnitude.
        let f = parse("t^-100 + t^-90");
        let lw = f.log_evaluate((1e-4f64).ln(), 1);
        assert!((lw - (100.0 * 1e4f64.ln() + (1.0f64 + 1e-40).ln_1p() * 0.0)).abs() < 1e-6);
    }

    #[test]
    fn compiled_densities_match_presets() {
        let leb = parse("1").to_density(10).unwrap();
        assert_eq!(leb.log_w(5.0), 0.0);
        assert_eq!(leb.homogeneity, Some(0.0));
        assert!(leb.is_decreasing);

        let pw = parse("t^2").to_density(10).unwrap();
        assert_eq!(pw.homogeneity, Some(2.0));
        assert_eq!(pw.integrability_floor, -2.0);
        assert!((pw.log_w(3.0) - 2.0 * 3.0f64.ln()).abs() < 1e-15);

        let sh = parse("shell(0.5)").to_density(10).unwrap();
        assert_eq!(sh.singularities(), &[1.0]);
        // Stable edge evaluation at distance e^{-800} from the shell:
        // direct evaluation underflows to +inf, the edge form is exact.
        assert_eq!(sh.log_w_edge(1.0, 1.0, -800.0), 400.0);
        assert!(!sh.is_decreasing);

        let pf = parse("power_family(0.5)").to_density(8).unwrap();
        assert_eq!(pf.homogeneity, Some(-4.0));
        assert_eq!(pf.integrability_floor, 4.0);
        assert!(pf.is_decreasing);

        let ed = parse("exp(0 - t)").to_density(3).unwrap();
        assert_eq!(ed.log_w(3.0), -3.0);
        assert!(ed.is_decreasing);

        // Negative densities are rejected at compile time.
        assert!(parse("0 - t").to_density(3).is_err());
    }

    #[test]
    fn zero_crossings_evaluate_honestly() {
        let e = parse("abs(t - 1)");
        assert_eq!(e.evaluate(1.0, 1), 0.0);
        assert_eq!(e.log_evaluate(0.0, 1), f64::NEG_INFINITY);
        // A signed difference is NaN where negative.
        let d = parse("t - 1");
        assert!(d.log_evaluate((0.5f64).ln(), 1).is_nan());
        assert!((d.evaluate(0.5, 1) + 0.5).abs() < 1e-15);
    }
}
