use super::{BinaryOp, ExprAst, ParseError, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    /// Next token and its starting position.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            let int = self.digits();
            let mut frac = 0;
            if self.src.get(self.pos) == Some(&b'.') {
                self.pos += 1;
                frac = self.digits();
            }
            if int + frac == 0 {
                return Err(syntax(start, "expected digits"));
            }
            if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
                let save = self.pos;
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                    self.pos += 1;
                }
                if self.digits() == 0 {
                    self.pos = save;
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
            let v: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
            if !v.is_finite() {
                return Err(syntax(start, format!("number `{text}` is out of range")));
            }
            return Ok((Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
            return Ok((Tok::Ident(text.to_string()), start));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Sym(c as char), start));
        }
        Err(syntax(
            start,
            format!("unexpected character `{}`", char_at(self.src, start)),
        ))
    }
}

fn char_at(src: &[u8], pos: usize) -> char {
    std::str::from_utf8(&src[pos..])
        .ok()
        .and_then(|s| s.chars().next())
        .unwrap_or('\u{fffd}')
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
    declared: Option<&'a [&'a str]>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, declared: Option<&'a [&'a str]>) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_pos) = lexer.next()?;
        Ok(Self {
            lexer,
            tok,
            tok_pos,
            declared,
        })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.lexer.next()?;
        self.tok = tok;
        self.tok_pos = pos;
        Ok(())
    }

    fn eat(&mut self, c: char) -> Result<bool, ParseError> {
        if self.tok == Tok::Sym(c) {
            self.bump()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Sym('+') => BinaryOp::Add,
                Tok::Sym('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Sym('*') => BinaryOp::Mul,
                Tok::Sym('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.eat('-')? {
            return Ok(ExprAst::unary(UnaryOp::Neg, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.eat('^')? {
            let exponent = self.unary()?;
            return Ok(ExprAst::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let pos = self.tok_pos;
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(ExprAst::Const(v))
            }
            Tok::Sym('(') => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect_close(pos)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::Sym('(') {
                    let op = UnaryOp::from_name(&name).ok_or(ParseError::UnknownFunction {
                        name: name.clone(),
                        position: pos,
                    })?;
                    let open = self.tok_pos;
                    self.bump()?;
                    let arg = self.expr()?;
                    self.expect_close(open)?;
                    return Ok(ExprAst::unary(op, arg));
                }
                match name.as_str() {
                    "t" => Ok(ExprAst::Var(Var::T)),
                    "x" => Ok(ExprAst::Var(Var::X)),
                    _ => {
                        if let Some(declared) = self.declared {
                            if !declared.contains(&name.as_str()) {
                                return Err(ParseError::UnknownIdentifier { name, position: pos });
                            }
                        }
                        Ok(ExprAst::Param(name))
                    }
                }
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            Tok::Sym(c) => Err(syntax(pos, format!("unexpected `{c}`"))),
        }
    }

    fn expect_close(&mut self, open: usize) -> Result<(), ParseError> {
        if self.eat(')')? {
            Ok(())
        } else {
            Err(syntax(
                self.tok_pos,
                format!("expected `)` to close `(` at position {open}"),
            ))
        }
    }
}

fn parse_inner(src: &str, declared: Option<&[&str]>) -> Result<ExprAst, ParseError> {
    let mut p = Parser::new(src, declared)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(syntax(p.tok_pos, "unexpected trailing input"));
    }
    Ok(e)
}

/// Parses `src`; any identifier other than `t`, `x` becomes a parameter.
pub fn parse(src: &str) -> Result<ExprAst, ParseError> {
    parse_inner(src, None)
}

/// Parses `src`, rejecting identifiers that are neither `t`, `x` nor listed in
/// `declared`.
pub fn parse_with_params(src: &str, declared: &[&str]) -> Result<ExprAst, ParseError> {
    parse_inner(src, Some(declared))
}
