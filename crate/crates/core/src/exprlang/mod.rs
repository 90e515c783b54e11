//! A small expression language for extended-real scalar functions of n
//! variables.
//!
//! Values live in `]-∞, +∞]`: `+∞` encodes "outside the domain" and `-∞` is
//! rejected everywhere. Evaluation is plain IEEE double arithmetic with one
//! extra rule applied at every node: a NaN or `-∞` intermediate collapses to
//! `+∞` (NaN collapses are counted, see [`Expr::eval_counting`]). This keeps
//! `log`/`sqrt` of negative arguments and division by zero inside the
//! extended-real model instead of poisoning downstream comparisons.
//!
//! Grammar (see [`parser::parse`]):
//!
//! ```text
//! expr     := term (("+"|"-") term)* ;
//! term     := factor (("*"|"/") factor)* ;
//! factor   := unary ("^" factor)? ;
//! unary    := ("-")? atom ;
//! atom     := number | "inf" | var | call | "(" expr ")" | piecewise ;
//! var      := "x" digits ;
//! call     := ident "(" expr ("," expr)* ")" ;
//! piecewise:= "piecewise" "(" (cond ":" expr ";")+ expr ")" ;
//! cond     := expr ("<="|"<"|">="|">") expr ;
//! ```
//!
//! Identifiers: `abs sqrt sin cos exp log` (one argument), `min max` (two or
//! more). Piecewise branches are tried in order; the trailing unconditional
//! branch makes every piecewise total.

mod parser;

pub use parser::{parse, ParseError};

use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// A value in `]-∞, +∞]`. Never NaN, never `-∞`, and `-0.0` is normalized
/// to `+0.0`, so ordering and equality are total and consistent.
#[derive(Clone, Copy, Debug)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INF: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a finite value; `None` for NaN and infinities.
    pub fn finite(v: f64) -> Option<ExtReal> {
        v.is_finite().then_some(ExtReal(v + 0.0))
    }

    /// The evaluation convention: NaN and `-∞` collapse to `+∞`.
    pub fn from_eval(v: f64) -> ExtReal {
        if v.is_nan() || v == f64::NEG_INFINITY {
            ExtReal::INF
        } else {
            ExtReal(v + 0.0)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Raw value; `f64::INFINITY` for the infinite element.
    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    // total_cmp agrees with == here: the invariant rules out NaN and -0.0.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<std::cmp::Ordering> {
        self.0.partial_cmp(other)
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "inf")
        }
    }
}

// JSON has no Infinity literal; the infinite element serializes as "inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            serializer.serialize_str("inf")
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => ExtReal::finite(v)
                .ok_or_else(|| serde::de::Error::custom("non-finite numeric ExtReal")),
            Raw::Str(s) if s == "inf" => Ok(ExtReal::INF),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad ExtReal: {s:?}"))),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("expression over {expected} variables evaluated at a point of dimension {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Func {
    Abs,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    Min,
    Max,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    fn holds(&self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cond {
    pub lhs: ExprNode,
    pub op: CmpOp,
    pub rhs: ExprNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExprNode {
    Literal(f64),
    Inf,
    /// 1-based variable index (`x1` is index 1).
    Var(usize),
    Neg(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Call(Func, Vec<ExprNode>),
    Piecewise {
        branches: Vec<(Cond, ExprNode)>,
        default: Box<ExprNode>,
    },
}

/// A parsed expression together with its declared dimension.
///
/// Immutable and pure: safe to share across threads and evaluate concurrently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    dim: usize,
    node: ExprNode,
}

impl Expr {
    pub(crate) fn from_parts(dim: usize, node: ExprNode) -> Expr {
        Expr { dim, node }
    }

    /// Wraps a programmatically built AST, checking that every variable
    /// index fits the declared dimension.
    pub fn new(dim: usize, node: ExprNode) -> Result<Expr, ParseError> {
        assert!(dim >= 1, "dimension must be positive");
        fn walk(node: &ExprNode, dim: usize) -> Result<(), ParseError> {
            match node {
                ExprNode::Var(i) => {
                    if *i == 0 || *i > dim {
                        return Err(ParseError::Dimension {
                            position: 0,
                            index: *i,
                            dim,
                        });
                    }
                }
                ExprNode::Neg(e) => walk(e, dim)?,
                ExprNode::Binary(_, a, b) => {
                    walk(a, dim)?;
                    walk(b, dim)?;
                }
                ExprNode::Call(_, args) => {
                    for a in args {
                        walk(a, dim)?;
                    }
                }
                ExprNode::Piecewise { branches, default } => {
                    for (cond, value) in branches {
                        walk(&cond.lhs, dim)?;
                        walk(&cond.rhs, dim)?;
                        walk(value, dim)?;
                    }
                    walk(default, dim)?;
                }
                ExprNode::Literal(_) | ExprNode::Inf => {}
            }
            Ok(())
        }
        walk(&node, dim)?;
        Ok(Expr { dim, node })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &ExprNode {
        &self.node
    }

    /// IEEE-double evaluation under the extended-real convention.
    pub fn eval(&self, x: &[f64]) -> Result<ExtReal, EvalError> {
        self.eval_counting(x).map(|(v, _)| v)
    }

    /// Like [`Expr::eval`] but also reports how many NaN intermediates were
    /// collapsed to `+∞`, for scan statistics.
    pub fn eval_counting(&self, x: &[f64]) -> Result<(ExtReal, u64), EvalError> {
        if x.len() != self.dim {
            return Err(EvalError::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut nan_hits = 0u64;
        let v = eval_node(&self.node, x, &mut nan_hits);
        Ok((ExtReal::from_eval(v), nan_hits))
    }

    /// `print`: the textual form; `parse(print(e))` evaluates identically.
    pub fn print(&self) -> String {
        self.to_string()
    }
}

/// Collapse NaN / `-∞` at a node boundary so they never propagate.
fn clamp(v: f64, nan_hits: &mut u64) -> f64 {
    if v.is_nan() {
        *nan_hits += 1;
        f64::INFINITY
    } else if v == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        v
    }
}

fn eval_node(node: &ExprNode, x: &[f64], nan_hits: &mut u64) -> f64 {
    let raw = match node {
        ExprNode::Literal(v) => *v,
        ExprNode::Inf => f64::INFINITY,
        ExprNode::Var(i) => x[*i - 1],
        ExprNode::Neg(e) => -eval_node(e, x, nan_hits),
        ExprNode::Binary(op, a, b) => {
            let a = eval_node(a, x, nan_hits);
            let b = eval_node(b, x, nan_hits);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        ExprNode::Call(f, args) => {
            let vals: Vec<f64> = args.iter().map(|a| eval_node(a, x, nan_hits)).collect();
            match f {
                Func::Abs => vals[0].abs(),
                Func::Sqrt => vals[0].sqrt(),
                Func::Sin => vals[0].sin(),
                Func::Cos => vals[0].cos(),
                Func::Exp => vals[0].exp(),
                Func::Log => vals[0].ln(),
                Func::Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
                Func::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        }
        ExprNode::Piecewise { branches, default } => {
            let mut chosen: Option<&ExprNode> = None;
            for (cond, value) in branches {
                let lhs = clamp(eval_node(&cond.lhs, x, nan_hits), nan_hits);
                let rhs = clamp(eval_node(&cond.rhs, x, nan_hits), nan_hits);
                if cond.op.holds(lhs, rhs) {
                    chosen = Some(value);
                    break;
                }
            }
            eval_node(chosen.unwrap_or(default), x, nan_hits)
        }
    };
    clamp(raw, nan_hits)
}

// Printing follows the grammar's precedence so that parse(print(e)) holds:
// additive 1, multiplicative 2, power 3, atoms above. Unary minus applies to
// atoms only, so a negated non-atom prints with parentheses.
fn prec(node: &ExprNode) -> u8 {
    match node {
        ExprNode::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        ExprNode::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        ExprNode::Binary(BinOp::Pow, ..) => 3,
        ExprNode::Neg(_) => 4,
        _ => 5,
    }
}

fn fmt_at(node: &ExprNode, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(node) < min_prec {
        write!(f, "(")?;
        fmt_node(node, f)?;
        return write!(f, ")");
    }
    fmt_node(node, f)
}

fn fmt_node(node: &ExprNode, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        ExprNode::Literal(v) => {
            if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                // Negative literals only arise from hand-built ASTs; keep them
                // parseable as a negated atom.
                write!(f, "(-{})", -v)
            } else {
                write!(f, "{v}")
            }
        }
        ExprNode::Inf => write!(f, "inf"),
        ExprNode::Var(i) => write!(f, "x{i}"),
        ExprNode::Neg(e) => {
            if prec(e) == 5 {
                write!(f, "-")?;
                fmt_node(e, f)
            } else {
                write!(f, "-(")?;
                fmt_node(e, f)?;
                write!(f, ")")
            }
        }
        ExprNode::Binary(op, a, b) => {
            let (sym, lp, rp) = match op {
                BinOp::Add => (" + ", 1, 2),
                BinOp::Sub => (" - ", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                // Base of ^ must be a unary (atom or negated atom).
                BinOp::Pow => ("^", 4, 3),
            };
            fmt_at(a, lp, f)?;
            write!(f, "{sym}")?;
            fmt_at(b, rp, f)
        }
        ExprNode::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                fmt_node(a, f)?;
            }
            write!(f, ")")
        }
        ExprNode::Piecewise { branches, default } => {
            write!(f, "piecewise(")?;
            for (cond, value) in branches {
                fmt_node(&cond.lhs, f)?;
                write!(f, " {} ", cond.op.symbol())?;
                fmt_node(&cond.rhs, f)?;
                write!(f, ": ")?;
                fmt_node(value, f)?;
                write!(f, "; ")?;
            }
            fmt_node(default, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.node, f)
    }
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval1(text: &str, x: f64) -> ExtReal {
        parse(text, 1).unwrap().eval(&[x]).unwrap()
    }

    #[test]
    fn eval_simple_cases() {
        assert_eq!(eval1("x1^2", 3.0), ExtReal::finite(9.0).unwrap());
        assert_eq!(eval1("2*x1 + sin(x1)", 0.0), ExtReal::finite(0.0).unwrap());
        let v = eval1("2*x1 + sin(x1)", std::f64::consts::FRAC_PI_2);
        assert!((v.value() - (std::f64::consts::PI + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn outside_domain_becomes_inf() {
        assert_eq!(eval1("log(x1)", -1.0), ExtReal::INF);
        assert_eq!(eval1("sqrt(x1)", -4.0), ExtReal::INF);
        assert_eq!(eval1("1/x1", 0.0), ExtReal::INF);
        // -inf from the raw arithmetic is also outside ]-inf, inf].
        assert_eq!(eval1("log(x1)", 0.0), ExtReal::INF);
        assert_eq!(eval1("-exp(x1)*inf", 1.0), ExtReal::INF);
    }

    #[test]
    fn nan_never_escapes_and_is_counted() {
        let e = parse("inf - inf", 1).unwrap();
        let (v, nan_hits) = e.eval_counting(&[0.0]).unwrap();
        assert_eq!(v, ExtReal::INF);
        assert_eq!(nan_hits, 1);
        // 0/0 at the point itself
        let e = parse("x1/x1", 1).unwrap();
        let (v, nan_hits) = e.eval_counting(&[0.0]).unwrap();
        assert_eq!(v, ExtReal::INF);
        assert_eq!(nan_hits, 1);
    }

    #[test]
    fn piecewise_step_function() {
        let e = parse("piecewise(x1 <= 0: 0; 1)", 1).unwrap();
        assert_eq!(e.eval(&[-0.5]).unwrap(), 0.0);
        assert_eq!(e.eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(e.eval(&[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let e = parse("x1 + x2", 2).unwrap();
        assert_eq!(
            e.eval(&[1.0]),
            Err(EvalError::Dimension { expected: 2, got: 1 })
        );
    }

    #[test]
    fn eval_is_deterministic() {
        let e = parse("sin(x1)*cos(x2) + x1^3/(1 + abs(x2))", 2).unwrap();
        let p = [0.7321, -1.25];
        assert_eq!(e.eval(&p).unwrap(), e.eval(&p).unwrap());
    }

    #[test]
    fn printing_respects_grammar_precedence() {
        let cases = [
            ("x1 - (x1 - 1)", 1.0),
            ("-x1^2", 2.0), // grammar: (-x1)^2
            ("-(x1^2)", 2.0),
            ("2*(x1 + 1)", 3.0),
            ("x1^2^3", 2.0), // right-assoc
            ("min(x1, 2, 3)", 5.0),
        ];
        for (text, x) in cases {
            let e = parse(text, 1).unwrap();
            let printed = e.print();
            let reparsed = parse(&printed, 1).unwrap();
            assert_eq!(
                e.eval(&[x]).unwrap(),
                reparsed.eval(&[x]).unwrap(),
                "{text} printed as {printed}"
            );
        }
        // The grammar binds unary minus before ^.
        assert_eq!(eval1("-x1^2", 2.0), ExtReal::finite(4.0).unwrap());
        assert_eq!(eval1("-(x1^2)", 2.0), ExtReal::finite(-4.0).unwrap());
    }
}
