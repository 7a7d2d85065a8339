//! Seifert fibered spaces `(ε; g | b; (α₁,β₁), …, (α_n,β_n))`.
//!
//! Text grammar (whitespace is ignored):
//!
//! ```text
//! spec   := eps ';' genus [ '|' int ] [ ';' pair { ',' pair } ]
//! eps    := 'o' | 'n'
//! pair   := '(' int ',' int ')'
//! ```
//!
//! Omitting `| b` gives non-normalized data, e.g. `o;0;(2,-1),(3,1),(5,1)`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Orientable base, `a_o = 2`.
    O,
    /// Non-orientable base, `a_n = 1`.
    N,
}

impl Orientation {
    pub fn a(self) -> i64 {
        match self {
            Orientation::O => 2,
            Orientation::N => 1,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::O => "o",
            Orientation::N => "n",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeifertError {
    #[error("fiber ({0},{1}): α must be positive")]
    NonPositiveAlpha(i64, i64),
    #[error("fiber ({0},{1}): α and β are not coprime")]
    NotCoprime(i64, i64),
    #[error("fiber ({0},{1}): β = 0 has no continued fraction expansion of α/β")]
    ZeroBeta(i64, i64),
    #[error("fiber ({0},{1}) is not normalized (need 0 < β < α)")]
    NotNormalized(i64, i64),
    #[error("a non-orientable base needs genus g > 0")]
    ZeroGenusNonOrientable,
    #[error("lens space L({0},{1}): p and q are not coprime")]
    LensNotCoprime(i64, i64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Seifert invariants; `b = None` marks non-normalized data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeifertPresentation {
    pub epsilon: Orientation,
    pub genus: u32,
    pub b: Option<i64>,
    pub fibers: Vec<(i64, i64)>,
}

impl SeifertPresentation {
    pub fn new(
        epsilon: Orientation,
        genus: u32,
        b: Option<i64>,
        fibers: Vec<(i64, i64)>,
    ) -> Result<Self, SeifertError> {
        if epsilon == Orientation::N && genus == 0 {
            return Err(SeifertError::ZeroGenusNonOrientable);
        }
        for &(a, be) in &fibers {
            if a <= 0 {
                return Err(SeifertError::NonPositiveAlpha(a, be));
            }
            if be == 0 {
                return Err(SeifertError::ZeroBeta(a, be));
            }
            if a.gcd(&be) != 1 {
                return Err(SeifertError::NotCoprime(a, be));
            }
        }
        Ok(Self {
            epsilon,
            genus,
            b,
            fibers,
        })
    }

    /// As [`new`](Self::new), additionally enforcing `0 < β < α` and a present `b`.
    pub fn new_normalized(
        epsilon: Orientation,
        genus: u32,
        b: i64,
        fibers: Vec<(i64, i64)>,
    ) -> Result<Self, SeifertError> {
        if let Some(&(a, be)) = fibers.iter().find(|&&(a, be)| !(0 < be && be < a)) {
            return Err(SeifertError::NotNormalized(a, be));
        }
        Self::new(epsilon, genus, Some(b), fibers)
    }

    /// `L(p, q)` as a Seifert space over `S²`.
    ///
    /// `L(1, 0) = (o;0|−1)`, `L(0, ±1) = (o;0|0)`, otherwise the
    /// non-normalized single-fiber space `{o;0;(q,p)}` (with `(−q,−p)` for `q < 0`).
    pub fn lens(p: i64, q: i64) -> Result<Self, SeifertError> {
        if p.gcd(&q) != 1 {
            return Err(SeifertError::LensNotCoprime(p, q));
        }
        if q == 0 {
            return Self::new(Orientation::O, 0, Some(-1), vec![]);
        }
        if p == 0 {
            return Self::new(Orientation::O, 0, Some(0), vec![]);
        }
        let (a, b) = if q > 0 { (q, p) } else { (-q, -p) };
        Self::new(Orientation::O, 0, None, vec![(a, b)])
    }

    pub fn n(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.b.is_some() && self.fibers.iter().all(|&(a, b)| 0 < b && b < a)
    }

    /// `E = −(b + Σ β_j/α_j)`, with `b` omitted for non-normalized data.
    pub fn euler(&self) -> Rational {
        let s: Rational = self.fibers.iter().map(|&(a, b)| Rational::new(b, a)).sum();
        -(s + Rational::from_integer(self.b.unwrap_or(0)))
    }

    /// `a_ε · g`.
    pub fn a_eps_g(&self) -> i64 {
        self.epsilon.a() * self.genus as i64
    }
}

impl fmt::Display for SeifertPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.epsilon, self.genus)?;
        if let Some(b) = self.b {
            write!(f, "|{b}")?;
        }
        if !self.fibers.is_empty() {
            write!(f, ";")?;
            for (i, (a, b)) in self.fibers.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "({a},{b})")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    at: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.src.len(), |c| c.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SeifertError> {
        Err(SeifertError::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self, what: &str) -> Result<i64, SeifertError> {
        let start = self.at;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.at += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.at += 1;
        }
        let text: String = self.chars[start..self.at].iter().map(|c| c.1).collect();
        match text.parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.at = start;
                self.err(format!("expected integer {what}"))
            }
        }
    }

    fn pair(&mut self) -> Result<(i64, i64), SeifertError> {
        let open = self.pos();
        if !self.eat('(') {
            return self.err("expected '(' to open a fiber pair");
        }
        let a = self.int("α")?;
        if !self.eat(',') {
            if self.peek().is_none() {
                return Err(SeifertError::Parse {
                    pos: open,
                    msg: "unclosed pair".into(),
                });
            }
            return self.err("expected ',' between α and β");
        }
        let b = self.int("β")?;
        if !self.eat(')') {
            return Err(SeifertError::Parse {
                pos: open,
                msg: "unclosed pair".into(),
            });
        }
        Ok((a, b))
    }
}

impl FromStr for SeifertPresentation {
    type Err = SeifertError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            chars: s.char_indices().filter(|c| !c.1.is_whitespace()).collect(),
            at: 0,
            src: s,
        };
        let eps = match p.peek() {
            Some('o') => Orientation::O,
            Some('n') => Orientation::N,
            _ => return p.err("expected 'o' or 'n'"),
        };
        p.at += 1;
        if !p.eat(';') {
            return p.err("expected ';' after ε");
        }
        let g = p.int("genus")?;
        if g < 0 {
            return p.err("genus must be non-negative");
        }
        let b = if p.eat('|') { Some(p.int("b")?) } else { None };
        let mut fibers = Vec::new();
        if p.eat(';') {
            fibers.push(p.pair()?);
            while p.eat(',') {
                fibers.push(p.pair()?);
            }
        }
        if p.peek().is_some() {
            return p.err("unexpected trailing input");
        }
        SeifertPresentation::new(eps, g as u32, b, fibers)
    }
}
