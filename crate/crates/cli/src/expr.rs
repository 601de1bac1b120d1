//! Recursive-descent parser for kernel expressions over the variables
//! `x` and `t`, supporting `+ - * / ^`, parentheses, decimal literals and
//! the functions `exp`, `log`, `sqrt`, `pow`.
//!
//! Grammar (|| = alternation):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary || power
//! power  := atom ('^' unary)?          (right-associative)
//! atom   := number || 'x' || 't' || func '(' expr (',' expr)? ')' || '(' expr ')'
//! ```

use std::fmt;

use volterra_core::Kernel;

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    T,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::T => t,
            Expr::Add(a, b) => a.eval(x, t) + b.eval(x, t),
            Expr::Sub(a, b) => a.eval(x, t) - b.eval(x, t),
            Expr::Mul(a, b) => a.eval(x, t) * b.eval(x, t),
            Expr::Div(a, b) => a.eval(x, t) / b.eval(x, t),
            Expr::Pow(a, b) => a.eval(x, t).powf(b.eval(x, t)),
            Expr::Neg(a) => -a.eval(x, t),
            Expr::Exp(a) => a.eval(x, t).exp(),
            Expr::Log(a) => a.eval(x, t).ln(),
            Expr::Sqrt(a) => a.eval(x, t).sqrt(),
        }
    }

    /// Constant value of a variable-free expression, if it is one.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::X | Expr::T => None,
            Expr::Add(a, b) => Some(a.as_constant()? + b.as_constant()?),
            Expr::Sub(a, b) => Some(a.as_constant()? - b.as_constant()?),
            Expr::Mul(a, b) => Some(a.as_constant()? * b.as_constant()?),
            Expr::Div(a, b) => Some(a.as_constant()? / b.as_constant()?),
            Expr::Pow(a, b) => Some(a.as_constant()?.powf(b.as_constant()?)),
            Expr::Neg(a) => Some(-a.as_constant()?),
            Expr::Exp(a) => Some(a.as_constant()?.exp()),
            Expr::Log(a) => Some(a.as_constant()?.ln()),
            Expr::Sqrt(a) => Some(a.as_constant()?.sqrt()),
        }
    }
}

/// Syntax error with the byte position it occurred at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.term()?;
        loop {
            if self.eat(b'+') {
                node = Expr::Add(Box::new(node), Box::new(self.term()?));
            } else if self.eat(b'-') {
                node = Expr::Sub(Box::new(node), Box::new(self.term()?));
            } else {
                return Ok(node);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.unary()?;
        loop {
            if self.eat(b'*') {
                node = Expr::Mul(Box::new(node), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                node = Expr::Div(Box::new(node), Box::new(self.unary()?));
            } else {
                return Ok(node);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // right-associative: the exponent may itself carry '^' or '-'
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of expression"),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // exponent suffix like 1e-3
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // 'e' was not an exponent
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        match text.parse::<f64>() {
            Ok(v) => Ok(Expr::Num(v)),
            Err(_) => {
                self.pos = start;
                self.err(format!("malformed number '{text}'"))
            }
        }
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        match name {
            "x" => Ok(Expr::X),
            "t" => Ok(Expr::T),
            "exp" | "log" | "sqrt" => {
                self.expect(b'(')?;
                let arg = Box::new(self.expr()?);
                self.expect(b')')?;
                Ok(match name {
                    "exp" => Expr::Exp(arg),
                    "log" => Expr::Log(arg),
                    _ => Expr::Sqrt(arg),
                })
            }
            "pow" => {
                self.expect(b'(')?;
                let base = Box::new(self.expr()?);
                self.expect(b',')?;
                let exponent = Box::new(self.expr()?);
                self.expect(b')')?;
                Ok(Expr::Pow(base, exponent))
            }
            _ => {
                self.pos = start;
                self.err(format!("unknown identifier '{name}'"))
            }
        }
    }
}

/// Parses an expression string into a tree.
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    if !src.is_ascii() {
        return Err(ParseError {
            position: 0,
            message: "expression must be ASCII".into(),
        });
    }
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let node = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input after expression");
    }
    Ok(node)
}

/// Parses a kernel source string — a builtin name or an expression — into
/// a [`Kernel`]. Constant expressions fold to the constant kernel and
/// `exp(x-t)` (structurally) to the convolution kernel, both of which
/// carry analytic bounds; anything else becomes a sampled custom kernel.
pub fn parse_kernel(src: &str) -> Result<Kernel, ParseError> {
    let tree = parse_expression(src)?;
    if let Some(c) = tree.as_constant() {
        return Ok(Kernel::Constant(c));
    }
    if let Expr::Exp(arg) = &tree {
        if **arg == Expr::Sub(Box::new(Expr::X), Box::new(Expr::T)) {
            return Ok(Kernel::ExpConvolution);
        }
    }
    let name = src.trim().to_string();
    Ok(Kernel::custom(name, move |x, t| tree.eval(x, t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_constant() {
        let k = parse_kernel("1").unwrap();
        assert!(matches!(k, Kernel::Constant(c) if c == 1.0));
        assert_eq!(k.bounds(1.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn constant_folding() {
        for (src, v) in [
            ("2*3 - 4/2", 4.0),
            ("exp(0)", 1.0),
            ("sqrt(9)", 3.0),
            ("pow(2, 10)", 1024.0),
            ("2^-1", 0.5),
            ("1e-3 * 1e3", 1.0),
        ] {
            let k = parse_kernel(src).unwrap();
            match k {
                Kernel::Constant(c) => assert!((c - v).abs() < 1e-15, "{src}: {c}"),
                other => panic!("{src} did not fold: {other:?}"),
            }
        }
    }

    #[test]
    fn convolution_kernel_detected() {
        for src in ["exp(x-t)", "exp( x - t )"] {
            let k = parse_kernel(src).unwrap();
            assert!(matches!(k, Kernel::ExpConvolution), "{src}: {k:?}");
            assert!((k.eval(1.0, 0.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        }
    }

    #[test]
    fn custom_kernel_evaluates() {
        let k = parse_kernel("1 + x*t").unwrap();
        assert!(matches!(k, Kernel::Custom { .. }));
        assert!((k.eval(0.5, 0.4).unwrap() - 1.2).abs() < 1e-15);
        // precedence and associativity
        let e = parse_expression("2 + 3 * 2 ^ 2 ^ 3").unwrap();
        assert_eq!(e.eval(0.0, 0.0), 2.0 + 3.0 * 256.0);
        let e = parse_expression("-x^2").unwrap();
        assert_eq!(e.eval(3.0, 0.0), -9.0); // unary minus binds looser than ^
    }

    #[test]
    fn nonpositive_kernel_rejected_by_bounds() {
        let k = parse_kernel("x - t - 1").unwrap();
        assert!(k.bounds(1.0).is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_expression("1 + ").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_expression("1 + y").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(e.message.contains("unknown identifier"));
        assert!(parse_expression("exp(x").is_err());
        assert!(parse_expression("1 2").is_err());
        assert!(parse_expression("pow(2)").is_err());
        assert!(parse_expression("").is_err());
    }
}
