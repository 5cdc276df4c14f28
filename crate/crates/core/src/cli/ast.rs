//! Syntax tree of `.gx` scripts and its pretty-printer.

use std::fmt;

/// Source position, 1-based. Ignored by equality so that re-parsed scripts
/// compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(u64),
    Ident(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `matrix [[..], ..]`, rows first.
    Matrix(Vec<Vec<Expr>>),
    /// `name(args; key=value, ..)`.
    Call {
        name: String,
        args: Vec<Expr>,
        named: Vec<(String, Expr)>,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Ring { prime: u64, vars: Vec<String>, pos: Pos },
    Quotient { gens: Vec<Expr>, pos: Pos },
    Let { name: String, expr: Expr, pos: Pos },
    Print { expr: Expr, pos: Pos },
}

impl Statement {
    pub fn pos(&self) -> Pos {
        match self {
            Statement::Ring { pos, .. }
            | Statement::Quotient { pos, .. }
            | Statement::Let { pos, .. }
            | Statement::Print { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Script {
    pub statements: Vec<Statement>,
}

// binding strength: sums 1, products 2, unary minus 3, powers 4, atoms 5
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Expr]) -> fmt::Result {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Ident(name, _) => write!(f, "{name}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                write_operand(f, e, 4)
            }
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "*")?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, e) => {
                write_operand(f, a, 5)?;
                write!(f, "^{e}")
            }
            Expr::Matrix(rows) => {
                write!(f, "matrix [")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "[")?;
                    write_list(f, row)?;
                    write!(f, "]")?;
                }
                write!(f, "]")
            }
            Expr::Call { name, args, named, .. } => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                for (i, (k, v)) in named.iter().enumerate() {
                    write!(f, "{}{k}={v}", if i == 0 { "; " } else { ", " })?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Ring { prime, vars, .. } => write!(f, "ring {prime} [{}];", vars.join(", ")),
            Statement::Quotient { gens, .. } => {
                write!(f, "quotient (")?;
                write_list(f, gens)?;
                write!(f, ");")
            }
            Statement::Let { name, expr, .. } => write!(f, "let {name} = {expr};"),
            Statement::Print { expr, .. } => write!(f, "print {expr};"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
