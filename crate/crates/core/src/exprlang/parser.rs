//! Recursive-descent parser for the expression grammar.

use super::{BinOp, CmpOp, Cond, Expr, ExprNode, Func};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier {name:?} at byte {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("{name} expects {expected} argument(s), got {got} (at byte {position})")]
    Arity {
        position: usize,
        name: String,
        expected: &'static str,
        got: usize,
    },
    #[error("variable x{index} out of range: expression is declared over x1..x{dim}")]
    Dimension {
        position: usize,
        index: usize,
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Semicolon,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Cmp(CmpOp),
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::Eof));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b':' => Some(Tok::Colon),
            b';' => Some(Tok::Semicolon),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = simple {
            self.pos += 1;
            return Ok((start, tok));
        }
        if c == b'<' || c == b'>' {
            self.pos += 1;
            let eq = self.pos < self.src.len() && self.src[self.pos] == b'=';
            if eq {
                self.pos += 1;
            }
            let op = match (c, eq) {
                (b'<', true) => CmpOp::Le,
                (b'<', false) => CmpOp::Lt,
                (b'>', true) => CmpOp::Ge,
                (b'>', false) => CmpOp::Gt,
                _ => unreachable!(),
            };
            return Ok((start, Tok::Cmp(op)));
        }
        if c.is_ascii_digit() || c == b'.' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
            {
                self.pos += 1;
            }
            // Optional exponent.
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
                let mut look = self.pos + 1;
                if look < self.src.len() && matches!(self.src[look], b'+' | b'-') {
                    look += 1;
                }
                if look < self.src.len() && self.src[look].is_ascii_digit() {
                    self.pos = look;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                position: start,
                message: format!("bad number literal {text:?}"),
            })?;
            return Ok((start, Tok::Number(value)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok((start, Tok::Ident(text.to_string())));
        }
        Err(ParseError::Syntax {
            position: start,
            message: format!("unexpected character {:?}", c as char),
        })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    cursor: usize,
    dim: usize,
}

/// Parses `text` as an expression over the variables `x1..x<dim>`.
pub fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            position: 0,
            message: "empty expression".into(),
        });
    }
    assert!(dim >= 1, "dimension must be positive");
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let t = lexer.next()?;
        let eof = t.1 == Tok::Eof;
        toks.push(t);
        if eof {
            break;
        }
    }
    let mut p = Parser {
        toks,
        cursor: 0,
        dim,
    };
    let node = p.expr()?;
    p.expect_eof()?;
    Ok(Expr::from_parts(dim, node))
}

impl Parser {
    fn peek(&self) -> &(usize, Tok) {
        &self.toks[self.cursor]
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.cursor].clone();
        if self.cursor + 1 < self.toks.len() {
            self.cursor += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().1 == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let (position, got) = self.bump();
        if got == tok {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                position,
                message: format!("expected {what}, found {got:?}"),
            })
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let (position, tok) = self.peek().clone();
        if tok == Tok::Eof {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                position,
                message: format!("trailing input starting with {tok:?}"),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().1 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().1 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // factor := unary ("^" factor)?   — right-associative power.
    fn factor(&mut self) -> Result<ExprNode, ParseError> {
        let base = self.unary()?;
        if self.eat(&Tok::Caret) {
            let exp = self.factor()?;
            return Ok(ExprNode::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exp),
            ));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<ExprNode, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(ExprNode::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ExprNode, ParseError> {
        let (position, tok) = self.bump();
        match tok {
            Tok::Number(v) => Ok(ExprNode::Literal(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(position, name),
            other => Err(ParseError::Syntax {
                position,
                message: format!("expected a value, found {other:?}"),
            }),
        }
    }

    fn ident(&mut self, position: usize, name: String) -> Result<ExprNode, ParseError> {
        if name == "inf" {
            return Ok(ExprNode::Inf);
        }
        if name == "piecewise" {
            return self.piecewise(position);
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| ParseError::Syntax {
                    position,
                    message: format!("variable index too large in {name:?}"),
                })?;
                if index == 0 || index > self.dim {
                    return Err(ParseError::Dimension {
                        position,
                        index,
                        dim: self.dim,
                    });
                }
                return Ok(ExprNode::Var(index));
            }
        }
        let func = match name.as_str() {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return Err(ParseError::UnknownIdentifier { position, name }),
        };
        self.expect(Tok::LParen, "`(` after function name")?;
        let mut args = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "closing `)` of argument list")?;
        let ok = match func {
            Func::Min | Func::Max => args.len() >= 2,
            _ => args.len() == 1,
        };
        if !ok {
            return Err(ParseError::Arity {
                position,
                name,
                expected: match func {
                    Func::Min | Func::Max => "at least 2",
                    _ => "exactly 1",
                },
                got: args.len(),
            });
        }
        Ok(ExprNode::Call(func, args))
    }

    // piecewise := "piecewise" "(" (cond ":" expr ";")+ expr ")"
    fn piecewise(&mut self, position: usize) -> Result<ExprNode, ParseError> {
        self.expect(Tok::LParen, "`(` after piecewise")?;
        let mut branches = Vec::new();
        let default;
        loop {
            let first = self.expr()?;
            if let Tok::Cmp(op) = self.peek().1 {
                self.bump();
                let rhs = self.expr()?;
                self.expect(Tok::Colon, "`:` after piecewise condition")?;
                let value = self.expr()?;
                self.expect(Tok::Semicolon, "`;` after piecewise branch")?;
                branches.push((
                    Cond {
                        lhs: first,
                        op,
                        rhs,
                    },
                    value,
                ));
            } else {
                // No comparator: this is the trailing unconditional branch.
                default = first;
                break;
            }
        }
        if branches.is_empty() {
            return Err(ParseError::Syntax {
                position,
                message: "piecewise needs at least one conditional branch before the default"
                    .into(),
            });
        }
        self.expect(Tok::RParen, "closing `)` of piecewise")?;
        Ok(ExprNode::Piecewise {
            branches,
            default: Box::new(default),
        })
    }
}
