//! Scalar coefficient expressions over a single variable `x`.
//!
//! Custom market models supply `b`, `sigma`, `r` and `v` as text; this module
//! parses them into an [`Expr`] tree and evaluates them as IEEE doubles.
//! The grammar covers numeric literals, `x`, the constants `pi` and `e`,
//! binary `+ - * / ^`, unary minus, parentheses and the functions
//! `exp`, `log`, `sqrt`, `abs`, `pow`, `min`, `max`.
//!
//! Precedence, tightest first: `^` (right-associative), unary minus,
//! `* /`, `+ -`. So `-x^2` is `-(x^2)` and `-x*y` is `(-x)*y`.
//!
//! Evaluation reports domain faults (log of a non-positive value, square
//! root of a negative, division by zero, fractional powers of negative
//! bases) and never returns a non-finite number silently.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
    Pow,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Func::Exp | Func::Log | Func::Sqrt | Func::Abs => 1,
            Func::Pow | Func::Min | Func::Max => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

/// Abstract syntax tree of a coefficient expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Const(NamedConst),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Syntax error with the byte offset of the offending token and a
/// description of what was expected there.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {expected}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultKind {
    LogNonPositive,
    SqrtNegative,
    DivisionByZero,
    PowDomain,
    NonFinite,
}

impl FaultKind {
    fn describe(&self) -> &'static str {
        match self {
            FaultKind::LogNonPositive => "log of a non-positive value",
            FaultKind::SqrtNegative => "square root of a negative value",
            FaultKind::DivisionByZero => "division by zero",
            FaultKind::PowDomain => "power outside the real domain",
            FaultKind::NonFinite => "non-finite result",
        }
    }
}

/// Domain fault carrying the offending subexpression and the evaluation
/// point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} in `{subexpr}` at x = {x}", kind.describe())]
pub struct EvalError {
    pub kind: FaultKind,
    pub subexpr: String,
    pub x: f64,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Token { tok: Tok::Plus, offset: start });
                i += 1;
            }
            '-' => {
                out.push(Token { tok: Tok::Minus, offset: start });
                i += 1;
            }
            '*' => {
                out.push(Token { tok: Tok::Star, offset: start });
                i += 1;
            }
            '/' => {
                out.push(Token { tok: Tok::Slash, offset: start });
                i += 1;
            }
            '^' => {
                out.push(Token { tok: Tok::Caret, offset: start });
                i += 1;
            }
            '(' => {
                out.push(Token { tok: Tok::LParen, offset: start });
                i += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::RParen, offset: start });
                i += 1;
            }
            ',' => {
                out.push(Token { tok: Tok::Comma, offset: start });
                i += 1;
            }
            '0'..='9' | '.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                // Exponent part: e/E followed by optional sign and digits.
                if j < bytes.len()
                    && (bytes[j] == b'e' || bytes[j] == b'E')
                    && (j + 1 < bytes.len()
                        && (bytes[j + 1].is_ascii_digit()
                            || ((bytes[j + 1] == b'+' || bytes[j + 1] == b'-')
                                && j + 2 < bytes.len()
                                && bytes[j + 2].is_ascii_digit())))
                {
                    j += 2;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: format!("a valid number, got `{text}`"),
                })?;
                out.push(Token { tok: Tok::Num(value), offset: start });
                i = j;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[i..j].to_string()),
                    offset: start,
                });
                i = j;
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    expected: format!("a token, got unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, offset: src.len() });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pratt parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const BP_ADD: (u8, u8) = (10, 11);
const BP_MUL: (u8, u8) = (20, 21);
const BP_NEG: u8 = 25;
// Right-associative: the right operand binds at one less than the left.
const BP_POW: (u8, u8) = (41, 40);

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(ParseError {
                offset: self.peek().offset,
                expected: what.to_string(),
            })
        }
    }

    fn parse_expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let (op, (l_bp, r_bp)) = match self.peek().tok {
                Tok::Plus => (BinOp::Add, BP_ADD),
                Tok::Minus => (BinOp::Sub, BP_ADD),
                Tok::Star => (BinOp::Mul, BP_MUL),
                Tok::Slash => (BinOp::Div, BP_MUL),
                Tok::Caret => (BinOp::Pow, BP_POW),
                _ => break,
            };
            if l_bp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.parse_expr(r_bp)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<Expr, ParseError> {
        let token = self.bump();
        match token.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Minus => {
                let operand = self.parse_expr(BP_NEG)?;
                Ok(Expr::Neg(Box::new(operand)))
            }
            Tok::LParen => {
                let inner = self.parse_expr(0)?;
                self.expect(Tok::RParen, "expected closing `)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or_else(|| ParseError {
                        offset: token.offset,
                        expected: format!("a known function, got `{name}`"),
                    })?;
                    self.bump(); // consume '('
                    let mut args = vec![self.parse_expr(0)?];
                    while self.peek().tok == Tok::Comma {
                        self.bump();
                        args.push(self.parse_expr(0)?);
                    }
                    self.expect(Tok::RParen, "expected `,` or closing `)`")?;
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            offset: token.offset,
                            expected: format!(
                                "{} argument(s) for `{}`, got {}",
                                func.arity(),
                                func.name(),
                                args.len()
                            ),
                        });
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    match name.as_str() {
                        "x" => Ok(Expr::Var),
                        "pi" => Ok(Expr::Const(NamedConst::Pi)),
                        "e" => Ok(Expr::Const(NamedConst::E)),
                        _ => Err(ParseError {
                            offset: token.offset,
                            expected: format!("`x`, `pi`, `e` or a function, got `{name}`"),
                        }),
                    }
                }
            }
            _ => Err(ParseError {
                offset: token.offset,
                expected: "expected operand".to_string(),
            }),
        }
    }
}

/// Parse an expression from source text.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            expected: "a non-empty expression".to_string(),
        });
    }
    let tokens = lex(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.parse_expr(0)?;
    if parser.peek().tok != Tok::Eof {
        return Err(ParseError {
            offset: parser.peek().offset,
            expected: "expected operator or end of input".to_string(),
        });
    }
    Ok(expr)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

impl Expr {
    /// Evaluate at the given point. Domain faults and non-finite results are
    /// errors, never NaN or infinity.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let fault = |kind: FaultKind, node: &Expr| EvalError {
            kind,
            subexpr: node.to_string(),
            x,
        };
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Const(NamedConst::Pi) => std::f64::consts::PI,
            Expr::Const(NamedConst::E) => std::f64::consts::E,
            Expr::Neg(inner) => -inner.eval(x)?,
            Expr::Bin(op, a, b) => {
                let lhs = a.eval(x)?;
                let rhs = b.eval(x)?;
                match op {
                    BinOp::Add => lhs + rhs,
                    BinOp::Sub => lhs - rhs,
                    BinOp::Mul => lhs * rhs,
                    BinOp::Div => {
                        if rhs == 0.0 {
                            return Err(fault(FaultKind::DivisionByZero, self));
                        }
                        lhs / rhs
                    }
                    BinOp::Pow => real_pow(lhs, rhs).map_err(|k| fault(k, self))?,
                }
            }
            Expr::Call(func, args) => {
                let a0 = args[0].eval(x)?;
                match func {
                    Func::Exp => a0.exp(),
                    Func::Log => {
                        if a0 <= 0.0 {
                            return Err(fault(FaultKind::LogNonPositive, self));
                        }
                        a0.ln()
                    }
                    Func::Sqrt => {
                        if a0 < 0.0 {
                            return Err(fault(FaultKind::SqrtNegative, self));
                        }
                        a0.sqrt()
                    }
                    Func::Abs => a0.abs(),
                    Func::Pow => {
                        let a1 = args[1].eval(x)?;
                        real_pow(a0, a1).map_err(|k| fault(k, self))?
                    }
                    Func::Min => a0.min(args[1].eval(x)?),
                    Func::Max => a0.max(args[1].eval(x)?),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fault(FaultKind::NonFinite, self))
        }
    }
}

/// Real-valued power: a fractional exponent on a negative base is a domain
/// fault, as is 0 raised to a negative power.
fn real_pow(base: f64, exponent: f64) -> Result<f64, FaultKind> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(FaultKind::PowDomain);
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(FaultKind::DivisionByZero);
    }
    Ok(base.powf(exponent))
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, _, _) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, _, _) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, _, _) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_child(
            f: &mut fmt::Formatter<'_>,
            child: &Expr,
            parent_prec: u8,
            strict: bool,
        ) -> fmt::Result {
            let need = if strict {
                child.precedence() <= parent_prec
            } else {
                child.precedence() < parent_prec
            };
            if need {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        match self {
            Expr::Num(v) => {
                if *v < 0.0 {
                    // A negative literal prints with parentheses so the text
                    // re-parses to the same tree shape.
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var => write!(f, "x"),
            Expr::Const(NamedConst::Pi) => write!(f, "pi"),
            Expr::Const(NamedConst::E) => write!(f, "e"),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                write_child(f, inner, self.precedence(), false)
            }
            Expr::Bin(op, a, b) => {
                let op_str = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                let prec = self.precedence();
                match op {
                    // Left-associative: parenthesize right child at equal
                    // precedence.
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                        write_child(f, a, prec, false)?;
                        write!(f, "{op_str}")?;
                        write_child(f, b, prec, true)
                    }
                    // Right-associative.
                    BinOp::Pow => {
                        write_child(f, a, prec, true)?;
                        write!(f, "{op_str}")?;
                        write_child(f, b, prec, false)
                    }
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    #[test]
    fn parses_simple_product() {
        let e = parse("0.2*x").unwrap();
        assert_eq!(e, Expr::Bin(BinOp::Mul, Box::new(num(0.2)), Box::new(Expr::Var)));
    }

    #[test]
    fn malformed_input_reports_offset() {
        let err = parse("x +* 2").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(err.expected.contains("operand"), "{}", err.expected);
    }

    #[test]
    fn unary_minus_binds_below_pow() {
        let e = parse("-x^2").unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Bin(
                BinOp::Pow,
                Box::new(Expr::Var),
                Box::new(num(2.0))
            )))
        );
        assert_eq!(e.eval(3.0).unwrap(), -9.0);
    }

    #[test]
    fn pow_is_right_associative() {
        let e = parse("2^3^2").unwrap();
        assert_eq!(e.eval(1.0).unwrap(), 512.0);
    }

    #[test]
    fn unary_minus_vs_product() {
        let e = parse("-x*x").unwrap();
        // (-x)*x, not -(x*x); same value but the tree shape matters.
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Mul,
                Box::new(Expr::Neg(Box::new(Expr::Var))),
                Box::new(Expr::Var)
            )
        );
    }

    #[test]
    fn exponent_may_start_with_minus() {
        let e = parse("2^-2").unwrap();
        assert_eq!(e.eval(0.5).unwrap(), 0.25);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("0.2*y").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.expected.contains('y'));
    }

    #[test]
    fn unknown_function_and_arity() {
        let err = parse("sin(x)").unwrap_err();
        assert!(err.expected.contains("sin"));
        let err = parse("min(x)").unwrap_err();
        assert!(err.expected.contains("2 argument"));
        let err = parse("exp(x, 1)").unwrap_err();
        assert!(err.expected.contains("1 argument"));
    }

    #[test]
    fn eval_inverse_pair() {
        let e = parse("exp(log(x))").unwrap();
        let v = e.eval(5.0).unwrap();
        assert!((v - 5.0).abs() <= 1e-15 * 5.0);
    }

    #[test]
    fn eval_half_square() {
        let e = parse("x^2/2").unwrap();
        assert_eq!(e.eval(4.0).unwrap(), 8.0);
    }

    #[test]
    fn eval_log_domain_fault() {
        let e = parse("log(x-3)").unwrap();
        let err = e.eval(2.0).unwrap_err();
        assert_eq!(err.kind, FaultKind::LogNonPositive);
        assert_eq!(err.x, 2.0);
        assert!(err.subexpr.contains("log"));
    }

    #[test]
    fn eval_div_by_zero_and_pow_domain() {
        assert_eq!(
            parse("1/(x-1)").unwrap().eval(1.0).unwrap_err().kind,
            FaultKind::DivisionByZero
        );
        assert_eq!(
            parse("(-2)^0.5").unwrap().eval(1.0).unwrap_err().kind,
            FaultKind::PowDomain
        );
        // Integer exponents on negative bases stay real.
        assert_eq!(parse("(-2)^3").unwrap().eval(1.0).unwrap(), -8.0);
    }

    #[test]
    fn eval_overflow_is_error() {
        let err = parse("exp(x)").unwrap().eval(1000.0).unwrap_err();
        assert_eq!(err.kind, FaultKind::NonFinite);
    }

    #[test]
    fn constants() {
        assert!((parse("pi").unwrap().eval(1.0).unwrap() - std::f64::consts::PI).abs() < 1e-16);
        assert!((parse("e^2").unwrap().eval(1.0).unwrap() - std::f64::consts::E.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn print_reparse_examples() {
        for src in [
            "0.2*x",
            "-x^2",
            "x^2/2 - min(x, 3)",
            "max(abs(-x), sqrt(x))*pi",
            "(x+1)*(x-2)^(x/4)",
            "2^-x",
            "-(x+1)",
            "1 - -x",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed)
                .unwrap_or_else(|err| panic!("reparse of `{printed}` failed: {err}"));
            assert_eq!(e, reparsed, "round trip of `{src}` via `{printed}`");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_expr() -> impl Strategy<Value = Expr> {
            let leaf = prop_oneof![
                (0.0..100.0f64).prop_map(Expr::Num),
                Just(Expr::Var),
                Just(Expr::Const(NamedConst::Pi)),
                Just(Expr::Const(NamedConst::E)),
            ];
            leaf.prop_recursive(5, 64, 4, |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(
                        BinOp::Add,
                        Box::new(a),
                        Box::new(b)
                    )),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(
                        BinOp::Sub,
                        Box::new(a),
                        Box::new(b)
                    )),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(
                        BinOp::Mul,
                        Box::new(a),
                        Box::new(b)
                    )),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(
                        BinOp::Div,
                        Box::new(a),
                        Box::new(b)
                    )),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(
                        BinOp::Pow,
                        Box::new(a),
                        Box::new(b)
                    )),
                    inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                    inner.clone().prop_map(|a| Expr::Call(Func::Exp, vec![a])),
                    inner.clone().prop_map(|a| Expr::Call(Func::Log, vec![a])),
                    inner.clone().prop_map(|a| Expr::Call(Func::Sqrt, vec![a])),
                    inner.clone().prop_map(|a| Expr::Call(Func::Abs, vec![a])),
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| Expr::Call(Func::Pow, vec![a, b])),
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| Expr::Call(Func::Min, vec![a, b])),
                    (inner.clone(), inner)
                        .prop_map(|(a, b)| Expr::Call(Func::Max, vec![a, b])),
                ]
            })
        }

        proptest! {
            #[test]
            fn print_parse_roundtrip(e in arb_expr()) {
                let printed = e.to_string();
                let reparsed = parse(&printed).expect("printed expression parses");
                prop_assert_eq!(e, reparsed);
            }

            #[test]
            fn eval_total_or_fault(e in arb_expr(), x in 1e-3..1e3f64) {
                match e.eval(x) {
                    Ok(v) => prop_assert!(v.is_finite()),
                    Err(_) => {}
                }
            }
        }
    }
}
