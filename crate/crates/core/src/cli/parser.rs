//! Lexer and recursive-descent parser for `.gx` scripts.
//!
//! ```text
//! script    := statement*
//! statement := "ring" INT "[" ident ("," ident)* "]" ";"
//!            | "quotient" "(" expr ("," expr)* ")" ";"
//!            | "let" ident "=" expr ";"
//!            | "print" expr ";"
//! expr      := term (("+" | "-") term)*
//! term      := unary ("*" unary)*
//! unary     := "-" unary | power
//! power     := atom ("^" INT)?
//! atom      := INT | ident | ident "(" args ")" | "matrix" "[" rows "]" | "(" expr ")"
//! args      := (expr ("," expr)*)? (";" ident "=" expr ("," ident "=" expr)*)?
//! ```
//! `#` and `--` start comments that run to the end of the line.

use thiserror::Error;

use super::ast::{Expr, Pos, Script, Statement};

#[derive(Debug, Error, PartialEq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' || (c == '-' && text_at(&chars, "--")) {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                col += 1;
            }
            let n = s.parse().map_err(|_| ParseError { pos, msg: format!("number {s} is too large") })?;
            out.push((Tok::Int(n), pos));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_' || **d == '\'') {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push((Tok::Ident(s), pos));
        } else if "[](),;=+-*^".contains(c) {
            chars.next();
            col += 1;
            out.push((Tok::Sym(c), pos));
        } else {
            return Err(ParseError { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

fn text_at(chars: &std::iter::Peekable<std::str::Chars<'_>>, s: &str) -> bool {
    chars.clone().take(s.len()).eq(s.chars())
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), msg: format!("expected {expected}, found {}", self.peek().describe()) })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(&format!("`{c}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().1)),
            _ => self.error("an identifier"),
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error("a number"),
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let (kw, pos) = self.ident()?;
        let s = match kw.as_str() {
            "ring" => {
                let prime = self.int()?;
                self.expect('[')?;
                let mut vars = vec![self.ident()?.0];
                while self.eat(',') {
                    vars.push(self.ident()?.0);
                }
                self.expect(']')?;
                Statement::Ring { prime, vars, pos }
            }
            "quotient" => {
                self.expect('(')?;
                let mut gens = vec![self.expr()?];
                while self.eat(',') {
                    gens.push(self.expr()?);
                }
                self.expect(')')?;
                Statement::Quotient { gens, pos }
            }
            "let" => {
                let (name, _) = self.ident()?;
                self.expect('=')?;
                Statement::Let { name, expr: self.expr()?, pos }
            }
            "print" => Statement::Print { expr: self.expr()?, pos },
            _ => {
                return Err(ParseError {
                    pos,
                    msg: format!("expected `ring`, `quotient`, `let` or `print`, found `{kw}`"),
                })
            }
        };
        self.expect(';')?;
        Ok(s)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        while self.eat('*') {
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let pos = self.pos();
            let e = self.int()?;
            let e = u32::try_from(e).map_err(|_| ParseError { pos, msg: format!("exponent {e} is too large") })?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "matrix" => {
                self.bump();
                self.matrix()
            }
            Tok::Ident(name) => {
                let pos = self.bump().1;
                if self.eat('(') {
                    self.call(name, pos)
                } else {
                    Ok(Expr::Ident(name, pos))
                }
            }
            _ => self.error("an expression"),
        }
    }

    fn matrix(&mut self) -> Result<Expr, ParseError> {
        self.expect('[')?;
        let mut rows = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = vec![self.expr()?];
            while self.eat(',') {
                row.push(self.expr()?);
            }
            self.expect(']')?;
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        Ok(Expr::Matrix(rows))
    }

    fn call(&mut self, name: String, pos: Pos) -> Result<Expr, ParseError> {
        let mut args = Vec::new();
        let mut named = Vec::new();
        if !matches!(self.peek(), Tok::Sym(')') | Tok::Sym(';')) {
            args.push(self.expr()?);
            while self.eat(',') {
                args.push(self.expr()?);
            }
        }
        if self.eat(';') {
            loop {
                let (key, _) = self.ident()?;
                self.expect('=')?;
                named.push((key, self.expr()?));
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(')')?;
        Ok(Expr::Call { name, args, named, pos })
    }
}

pub fn parse(text: &str) -> Result<Script, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut statements = Vec::new();
    while *p.peek() != Tok::Eof {
        statements.push(p.statement()?);
    }
    Ok(Script { statements })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_comments() {
        assert_eq!(parse("").unwrap(), Script::default());
        assert_eq!(parse("  # nothing\n-- here either\n").unwrap(), Script::default());
    }

    #[test]
    fn statements() {
        let s = parse("ring 32003 [x0, x1, x2];\nlet K = koszul(x0^2, x0*x1);\nprint rhom(O(0), K, -3, 3);").unwrap();
        assert_eq!(s.statements.len(), 3);
        assert!(matches!(&s.statements[0], Statement::Ring { prime: 32003, vars, .. } if vars.len() == 3));
        let Statement::Let { expr: Expr::Call { name, args, .. }, .. } = &s.statements[1] else { panic!() };
        assert_eq!(name, "koszul");
        assert_eq!(args[0], Expr::Pow(Box::new(Expr::Ident("x0".into(), Pos::default())), 2));
    }

    #[test]
    fn named_arguments_and_matrices() {
        let s = parse("let C = complex(map(O(0), free(-1,-1), matrix [[x, y]]); top=2);").unwrap();
        let Statement::Let { expr: Expr::Call { named, .. }, .. } = &s.statements[0] else { panic!() };
        assert_eq!(named[0].0, "top");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("ring 7 [x];\nlet = 3;").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 5));
        assert!(e.msg.contains("identifier"));
        let e = parse("print 1 $ 2;").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (1, 9));
        let e = parse("print koszul(x;").unwrap_err();
        assert!(e.msg.contains("identifier"), "{}", e.msg);
        assert!(parse("frobnicate x;").unwrap_err().msg.contains("frobnicate"));
    }

    #[test]
    fn precedence() {
        let s = parse("print -x^2 + y*z - 3;").unwrap();
        let Statement::Print { expr, .. } = &s.statements[0] else { panic!() };
        assert_eq!(expr.to_string(), "-x^2 + y*z - 3");
        assert!(matches!(expr, Expr::Sub(..)));
    }
}
