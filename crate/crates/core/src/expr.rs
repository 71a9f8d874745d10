//! Boolean expressions and explicit truth tables.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! eq   := or  ( "==" or )*
//! or   := xor ( ("|" | "nor") xor )*
//! xor  := and ( "^" and )*
//! and  := un  ( ("&" | "nand") un )*
//! un   := "!" un | atom
//! atom := "x" digits | "0" | "1" | "(" eq ")"
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    /// Zero-based variable index; `x1` is `Var(0)`.
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
    Eq(Box<BoolExpr>, Box<BoolExpr>),
    Nor(Box<BoolExpr>, Box<BoolExpr>),
    Nand(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn parse(src: &str) -> Result<BoolExpr> {
        let mut p = Parser { src, pos: 0 };
        let e = p.eq()?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        use BoolExpr::*;
        match self {
            Const(b) => *b,
            Var(i) => x[*i],
            Not(a) => !a.eval(x),
            And(a, b) => a.eval(x) && b.eval(x),
            Or(a, b) => a.eval(x) || b.eval(x),
            Xor(a, b) => a.eval(x) ^ b.eval(x),
            Eq(a, b) => a.eval(x) == b.eval(x),
            Nor(a, b) => !(a.eval(x) || b.eval(x)),
            Nand(a, b) => !(a.eval(x) && b.eval(x)),
        }
    }

    /// One more than the largest variable index, or 0 for constants.
    pub fn arity(&self) -> usize {
        use BoolExpr::*;
        match self {
            Const(_) => 0,
            Var(i) => i + 1,
            Not(a) => a.arity(),
            And(a, b) | Or(a, b) | Xor(a, b) | Eq(a, b) | Nor(a, b) | Nand(a, b) => a.arity().max(b.arity()),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use BoolExpr::*;
        match self {
            Const(b) => write!(f, "{}", *b as u8),
            Var(i) => write!(f, "x{}", i + 1),
            Not(a) => write!(f, "!{a}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Xor(a, b) => write!(f, "({a} ^ {b})"),
            Eq(a, b) => write!(f, "({a} == {b})"),
            Nor(a, b) => write!(f, "({a} nor {b})"),
            Nand(a, b) => write!(f, "({a} nand {b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Expression {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(0, char::len_utf8);
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    /// Consumes `tok` if it comes next; word tokens must end at a word boundary.
    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        let r = self.rest();
        if !r.starts_with(tok) {
            return false;
        }
        let word = tok.chars().all(|c| c.is_ascii_alphabetic());
        if word && r[tok.len()..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            return false;
        }
        self.pos += tok.len();
        true
    }

    fn eq(&mut self) -> Result<BoolExpr> {
        let mut a = self.or()?;
        while self.eat("==") {
            a = BoolExpr::Eq(Box::new(a), Box::new(self.or()?));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<BoolExpr> {
        let mut a = self.xor()?;
        loop {
            if self.eat("|") {
                a = BoolExpr::Or(Box::new(a), Box::new(self.xor()?));
            } else if self.eat("nor") {
                a = BoolExpr::Nor(Box::new(a), Box::new(self.xor()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn xor(&mut self) -> Result<BoolExpr> {
        let mut a = self.and()?;
        while self.eat("^") {
            a = BoolExpr::Xor(Box::new(a), Box::new(self.and()?));
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<BoolExpr> {
        let mut a = self.unary()?;
        loop {
            if self.eat("&") {
                a = BoolExpr::And(Box::new(a), Box::new(self.unary()?));
            } else if self.eat("nand") {
                a = BoolExpr::Nand(Box::new(a), Box::new(self.unary()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn unary(&mut self) -> Result<BoolExpr> {
        if self.eat("!") {
            return Ok(BoolExpr::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<BoolExpr> {
        self.skip_ws();
        if self.eat("(") {
            let e = self.eq()?;
            if !self.eat(")") {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        let r = self.rest();
        if let Some(d) = r.strip_prefix('x') {
            let digits: String = d.chars().take_while(|c| c.is_ascii_digit()).collect();
            let idx: usize = digits.parse().map_err(|_| self.err("expected a variable index after `x`"))?;
            if idx == 0 {
                return Err(self.err("variables are numbered from x1"));
            }
            self.pos += 1 + digits.len();
            return Ok(BoolExpr::Var(idx - 1));
        }
        if r.starts_with('0') || r.starts_with('1') {
            let b = r.starts_with('1');
            self.pos += 1;
            if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
                return Err(self.err("constants are 0 or 1"));
            }
            return Ok(BoolExpr::Const(b));
        }
        if r.is_empty() {
            Err(self.err("unexpected end of expression"))
        } else {
            Err(self.err("expected a variable, constant or `(`"))
        }
    }
}

/// Largest input count for an explicit truth table.
pub const MAX_INPUTS: usize = 24;

/// A Boolean function given by its full truth table. Row `r` assigns
/// `x_{i+1} = (r >> i) & 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BooleanFunction {
    n_inputs: usize,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn from_table(n_inputs: usize, table: Vec<bool>) -> Result<Self> {
        if n_inputs > MAX_INPUTS {
            return Err(Error::Resource(format!("{n_inputs} inputs exceed {MAX_INPUTS}")));
        }
        if table.len() != 1 << n_inputs {
            return Err(Error::Dimension {
                expected: 1 << n_inputs,
                found: table.len(),
            });
        }
        Ok(BooleanFunction { n_inputs, table })
    }

    pub fn from_fn(n_inputs: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        if n_inputs > MAX_INPUTS {
            return Err(Error::Resource(format!("{n_inputs} inputs exceed {MAX_INPUTS}")));
        }
        let mut x = vec![false; n_inputs];
        let table = (0..1usize << n_inputs)
            .map(|r| {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi = (r >> i) & 1 == 1;
                }
                f(&x)
            })
            .collect();
        Ok(BooleanFunction { n_inputs, table })
    }

    /// Function of `expr` on `n_inputs` variables (at least its arity).
    pub fn from_expr(expr: &BoolExpr, n_inputs: usize) -> Result<Self> {
        if expr.arity() > n_inputs {
            return Err(Error::Dimension {
                expected: n_inputs,
                found: expr.arity(),
            });
        }
        Self::from_fn(n_inputs, |x| expr.eval(x))
    }

    /// Parses an expression; the input count is its highest variable index.
    pub fn parse(src: &str) -> Result<Self> {
        let e = BoolExpr::parse(src)?;
        Self::from_expr(&e, e.arity())
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn row(&self, r: usize) -> bool {
        self.table[r]
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        let r = x.iter().enumerate().fold(0usize, |r, (i, &b)| r | (b as usize) << i);
        self.table[r]
    }

    pub fn is_constant(&self) -> Option<bool> {
        let first = self.table[0];
        self.table.iter().all(|&b| b == first).then_some(first)
    }

    /// True if the output never depends on input `i`.
    pub fn ignores(&self, i: usize) -> bool {
        (0..self.table.len()).all(|r| self.table[r] == self.table[r ^ (1 << i)])
    }

    pub fn satisfying_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.table.len()).filter(|&r| self.table[r])
    }

    /// Every function on `n` inputs, indexed by the table read as a binary number.
    pub fn all(n: usize) -> impl Iterator<Item = BooleanFunction> {
        let rows = 1usize << n;
        (0..1u64 << rows).map(move |code| BooleanFunction {
            n_inputs: n,
            table: (0..rows).map(|r| (code >> r) & 1 == 1).collect(),
        })
    }
}

/// Even parity of all inputs: 1 ⊕ x1 ⊕ … ⊕ xg.
pub fn f_z2(g: usize) -> BooleanFunction {
    BooleanFunction::from_fn(g, |x| x.iter().filter(|&&b| b).count() % 2 == 0).expect("small arity")
}

/// Fibonacci branching rule on a trivalent site: no single string end.
pub fn f_fib() -> BooleanFunction {
    BooleanFunction::from_fn(3, |x| x.iter().filter(|&&b| b).count() != 1).expect("small arity")
}
