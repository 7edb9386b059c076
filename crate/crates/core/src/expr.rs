//! A minimal recursive-descent parser and evaluator for expressions in one
//! real variable, used by the CLI and the test corpus.
//!
//! Grammar (whitespace ignored, `^` right-associative, unary minus binds
//! looser than `^` so `-x^2` parses as `-(x^2)`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'x' | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are decimal with an optional exponent. The recognized functions
//! are `exp`, `ln`, `sin`, `cos` and `sqrt`.

use crate::error::EvalError;
use std::fmt;

/// Unary functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

/// Expression AST over one real variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates at a point. Domain violations (ln/sqrt out of range,
    /// division by zero, non-real powers) are errors, never silent NaNs.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Constant(c) => *c,
            Expr::Variable => x,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval(x)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval(x)?;
                let exponent = b.eval(x)?;
                let v = base.powf(exponent);
                if v.is_nan() {
                    return Err(EvalError::PowUndefined { base, exponent });
                }
                v
            }
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Call(f, a) => {
                let arg = a.eval(x)?;
                match f {
                    Func::Exp => arg.exp(),
                    Func::Ln => {
                        if arg <= 0.0 {
                            return Err(EvalError::LogNonPositive(arg));
                        }
                        arg.ln()
                    }
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Sqrt => {
                        if arg < 0.0 {
                            return Err(EvalError::SqrtNegative(arg));
                        }
                        arg.sqrt()
                    }
                }
            }
        };
        if v.is_nan() {
            return Err(EvalError::NotANumber);
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Constant(_) | Expr::Variable | Expr::Call(..) => 5,
        }
    }

}

fn fmt_child(child: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Variable => write!(f, "x"),
            Expr::Add(a, b) => {
                fmt_child(a, 1, f)?;
                write!(f, "+")?;
                fmt_child(b, 2, f)
            }
            Expr::Sub(a, b) => {
                fmt_child(a, 1, f)?;
                write!(f, "-")?;
                fmt_child(b, 2, f)
            }
            Expr::Mul(a, b) => {
                fmt_child(a, 2, f)?;
                write!(f, "*")?;
                fmt_child(b, 3, f)
            }
            Expr::Div(a, b) => {
                fmt_child(a, 2, f)?;
                write!(f, "/")?;
                fmt_child(b, 3, f)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                fmt_child(a, 3, f)
            }
            // '^' is right-associative and binds tighter than unary minus,
            // so the base needs parens unless it is an atom
            Expr::Pow(a, b) => {
                fmt_child(a, 5, f)?;
                write!(f, "^")?;
                fmt_child(b, 3, f)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Parse failure with the byte offset and the token set that was expected.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.offset,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("'{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                tokens.push((i, Token::Star));
                i += 1;
            }
            b'/' => {
                tokens.push((i, Token::Slash));
                i += 1;
            }
            b'^' => {
                tokens.push((i, Token::Caret));
                i += 1;
            }
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("'{slice}'"),
                })?;
                tokens.push((start, Token::Number(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    offset: i,
                    expected: vec!["number", "'x'", "function", "operator", "'('", "')'"],
                    found: format!("'{}'", &text[i..i + 1]),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end_offset: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.end_offset)
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        let found = match self.tokens.get(self.pos) {
            Some((_, t)) => t.describe(),
            None => "end of input".into(),
        };
        ParseError {
            offset: self.offset(),
            expected,
            found,
        }
    }

    fn expect(&mut self, token: Token, label: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(vec![label]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    node = Expr::Add(Box::new(node), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    node = Expr::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    node = Expr::Mul(Box::new(node), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    node = Expr::Div(Box::new(node), Box::new(self.factor()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let err = self.error(vec!["number", "'x'", "function", "'('"]);
        match self.advance() {
            Some(Token::Number(v)) => Ok(Expr::Constant(*v)),
            Some(Token::Ident(name)) => {
                if name == "x" {
                    return Ok(Expr::Variable);
                }
                let name = name.clone();
                match Func::from_name(&name) {
                    Some(func) => {
                        self.expect(Token::LParen, "'('")?;
                        let arg = self.expr()?;
                        self.expect(Token::RParen, "')'")?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                    None => Err(err),
                }
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(err),
        }
    }
}

/// Parses an expression over the variable `x`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end_offset: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(parser.error(vec!["operator", "end of input"]));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(text: &str, x: f64) -> f64 {
        parse(text).unwrap().eval(x).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(eval("x^2 + 1", 3.0), 10.0);
        assert_eq!(eval("exp(-x)", 0.0), 1.0);
        assert_eq!(eval("1/(1+x)", 1.0), 0.5);
        assert_eq!(eval("ln(x)", 1.0), 0.0);
        assert_eq!(eval("x", std::f64::consts::PI), std::f64::consts::PI);
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("2+3*4", 0.0), 14.0);
        // right-associative exponent
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        // unary minus binds looser than the exponent
        assert_eq!(eval("-x^2", 3.0), -9.0);
        assert_eq!(eval("(-x)^2", 3.0), 9.0);
        assert_eq!(eval("2^-2", 0.0), 0.25);
        assert_eq!(eval("6/3/2", 0.0), 1.0);
    }

    #[test]
    fn number_literals() {
        assert_eq!(eval("1.5e2", 0.0), 150.0);
        assert_eq!(eval("2.5E-1", 0.0), 0.25);
        assert_eq!(eval(".5", 0.0), 0.5);
        assert_eq!(eval("3.", 0.0), 3.0);
    }

    #[test]
    fn eval_domain_errors() {
        assert_eq!(
            parse("sqrt(x)").unwrap().eval(-1.0),
            Err(EvalError::SqrtNegative(-1.0))
        );
        assert_eq!(
            parse("ln(x)").unwrap().eval(0.0),
            Err(EvalError::LogNonPositive(0.0))
        );
        assert_eq!(parse("1/x").unwrap().eval(0.0), Err(EvalError::DivisionByZero));
        assert!(matches!(
            parse("x^0.5").unwrap().eval(-2.0),
            Err(EvalError::PowUndefined { .. })
        ));
    }

    #[test]
    fn parse_errors_carry_offset_and_expectation() {
        let err = parse("1 + ").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.expected.contains(&"number"));

        let err = parse("2 * foo(3)").unwrap_err();
        assert_eq!(err.offset, 4);

        let err = parse("(1+2").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.expected, vec!["')'"]);

        let err = parse("1 ? 2").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn parser_is_deterministic() {
        let a = parse("sin(x)*x^2 - 1/(1+x)").unwrap();
        let b = parse("sin(x)*x^2 - 1/(1+x)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_round_trips_corpus() {
        let corpus = [
            "x^2+1",
            "-x^2",
            "(-x)^2",
            "2^3^2",
            "exp(-x)*sin(x)",
            "1/(1+x)-x/2",
            "sqrt(1+x^2)",
            "x*(x+1)*(x+2)",
            "2*x^2-3*x+0.5",
        ];
        for text in corpus {
            let ast = parse(text).unwrap();
            let reparsed = parse(&ast.to_string()).unwrap();
            for i in 0..100 {
                let x = -2.0 + 0.04 * i as f64;
                match (ast.eval(x), reparsed.eval(x)) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b, "{text} at {x}"),
                    (Err(a), Err(b)) => assert_eq!(a, b),
                    other => panic!("{text} at {x}: mismatch {other:?}"),
                }
            }
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Constant),
            Just(Expr::Variable),
        ];
        leaf.prop_recursive(5, 64, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Pow(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (prop_oneof![
                    Just(Func::Exp), Just(Func::Ln), Just(Func::Sin),
                    Just(Func::Cos), Just(Func::Sqrt)
                ], inner.clone())
                    .prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
            ]
        })
    }

    proptest! {
        /// Pretty-printing then re-parsing reproduces the AST exactly
        /// (constants are generated non-negative so `-c` stays a Neg node).
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(reparsed, e);
        }
    }
}
