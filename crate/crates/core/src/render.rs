//! Canonical textual rendering of rational functions and difference
//! operators, plus a small expression parser so that rendered output
//! round-trips to the identical element.

use crate::diffop::{AlgebraCtx, DiffOpElement};
use crate::field::Field;
use crate::poly::MultiPoly;
use crate::quiver::InvolutiveQuiver;
use crate::ratfunc::RatFunc;
use crate::vars::{spectral_by_name, Var, VarNames, HBAR};
use std::sync::Arc;
use thiserror::Error;

/// Rendering tables for a quiver: node variables by positive ordinal,
/// framing variables by full node ordinal.
pub fn var_names(q: &InvolutiveQuiver) -> VarNames {
    VarNames {
        positive: q
            .positive_nodes
            .iter()
            .map(|&i| q.nodes[i].clone())
            .collect(),
        all: q.nodes.clone(),
    }
}

fn render_coef<F: Field>(c: &F) -> String {
    c.to_string()
}

/// A polynomial as an explicit sum of monomials in canonical term order.
pub fn render_poly<F: Field>(p: &MultiPoly<F>, names: &VarNames) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (mono, coef) in &p.terms {
        let mut factors = Vec::new();
        let c = render_coef(coef);
        if c != "1" || mono.0.is_empty() {
            factors.push(c);
        }
        for (v, e) in &mono.0 {
            let name = names.render(*v);
            if *e == 1 {
                factors.push(name);
            } else {
                factors.push(format!("{name}^{e}"));
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join(" + ")
}

/// A rational function as `(numer)/(denom)`, both expanded.
pub fn render_ratfunc<F: Field>(f: &RatFunc<F>, names: &VarNames) -> String {
    let (num, den) = f.numer_denom();
    if den.is_constant() && den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
        format!("({})", render_poly(&num, names))
    } else {
        format!(
            "({})/({})",
            render_poly(&num, names),
            render_poly(&den, names)
        )
    }
}

/// A difference operator as a sum of `(coefficient)*shift` terms in
/// canonical shift-monomial order.
pub fn render_element<F: Field>(
    e: &DiffOpElement<F>,
    q: &InvolutiveQuiver,
    names: &VarNames,
) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (mono, coef) in &e.terms {
        let mut s = render_ratfunc(coef, names);
        for &((node, idx), exp) in &mono.0 {
            let id = &names.positive[node as usize];
            if exp == 1 {
                s.push_str(&format!("*d[{id},{idx}]"));
            } else {
                s.push_str(&format!("*d[{id},{idx}]^{exp}"));
            }
        }
        parts.push(s);
    }
    let _ = q;
    parts.join(" + ")
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Var(Var),
    /// A shift generator with its canonical node ordinal and sign
    /// (negative-half ids resolve to the inverse of the positive generator).
    D(u16, u16, i64),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn lex(
    s: &str,
    q: &InvolutiveQuiver,
    names: &VarNames,
) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(s[start..i].to_string())));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                let mut word = s[start..i].to_string();
                if i < b.len() && b[i] == b'[' {
                    let close = s[i..].find(']').ok_or(ParseError {
                        pos: i,
                        msg: "unclosed '['".into(),
                    })?;
                    word.push_str(&s[i..i + close + 1]);
                    i += close + 1;
                }
                let tok = if let Some(rest) =
                    word.strip_prefix("d[").and_then(|r| r.strip_suffix(']'))
                {
                    let (id, idx) = rest.rsplit_once(',').ok_or(ParseError {
                        pos: start,
                        msg: format!("malformed shift generator '{word}'"),
                    })?;
                    let node = q.node_index(id.trim()).map_err(|_| ParseError {
                        pos: start,
                        msg: format!("unknown node '{id}'"),
                    })?;
                    let idx: u16 = idx.trim().parse().map_err(|_| ParseError {
                        pos: start,
                        msg: format!("bad index in '{word}'"),
                    })?;
                    let p = q.positive_ordinal[node] as u16;
                    let sign = if q.is_positive(node) { 1 } else { -1 };
                    Tok::D(p, idx, sign)
                } else if let Some(v) = names.parse(&word) {
                    Tok::Var(v)
                } else if let Some(v) = spectral_by_name(&word) {
                    Tok::Var(v)
                } else if word == "h" {
                    Tok::Var(HBAR)
                } else {
                    return Err(ParseError {
                        pos: start,
                        msg: format!("unknown symbol '{word}'"),
                    });
                };
                out.push((start, tok));
            }
            _ => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a, F: Field> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a Arc<AlgebraCtx<F>>,
}

impl<'a, F: Field> Parser<'a, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> ParseError {
        let pos = self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(0);
        ParseError {
            pos,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<DiffOpElement<F>, ParseError> {
        let mut acc = self.prod()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.prod()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.prod()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self) -> Result<DiffOpElement<F>, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    let scalar = rhs.as_scalar().ok_or_else(|| {
                        self.err("division is only defined by scalar expressions")
                    })?;
                    let inv = scalar
                        .inv()
                        .map_err(|_| self.err("division by zero"))?;
                    acc = acc.scale_rat(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<DiffOpElement<F>, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<DiffOpElement<F>, ParseError> {
        // shift generators take their exponent directly so inverses parse
        if let Some(Tok::D(node, idx, sign)) = self.peek().cloned() {
            self.bump();
            let exp = if matches!(self.peek(), Some(Tok::Caret)) {
                self.bump();
                self.exponent()?
            } else {
                1
            };
            return Ok(DiffOpElement::d_op(self.ctx, node, idx, sign * exp));
        }
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let exp = self.exponent()?;
        if let Some(scalar) = base.as_scalar() {
            let powed = scalar
                .pow(exp)
                .map_err(|_| self.err("zero raised to a negative power"))?;
            return Ok(DiffOpElement::scalar(self.ctx, powed));
        }
        if exp < 0 {
            return Err(self.err("negative powers of non-scalar expressions"));
        }
        let mut acc = DiffOpElement::one(self.ctx);
        for _ in 0..exp {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let neg = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(n)) => {
                let v: i64 = n
                    .parse()
                    .map_err(|_| self.err("exponent out of range"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err("expected an integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<DiffOpElement<F>, ParseError> {
        match self.bump() {
            Some(Tok::Num(n)) => {
                // digit-by-digit accumulation keeps arbitrary precision
                let mut acc = F::zero();
                let ten = F::from_i64(10);
                for d in n.bytes() {
                    acc = acc.mul(&ten).add(&F::from_i64((d - b'0') as i64));
                }
                Ok(DiffOpElement::scalar(self.ctx, RatFunc::constant(acc)))
            }
            Some(Tok::Var(v)) => Ok(DiffOpElement::scalar(self.ctx, RatFunc::var(v))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(self.err("expected ')'")),
                }
            }
            _ => Err(self.err("expected a number, variable, or '('")),
        }
    }
}

/// Parse an operator expression; node ids in `d[id,r]` resolve through the
/// quiver (negative-half ids become inverse shifts).
pub fn parse_element<F: Field>(
    s: &str,
    q: &InvolutiveQuiver,
    names: &VarNames,
    ctx: &Arc<AlgebraCtx<F>>,
) -> Result<DiffOpElement<F>, ParseError> {
    let toks = lex(s, q, names)?;
    let mut p = Parser { toks, pos: 0, ctx };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parse a scalar (shift-free) expression into a rational function.
pub fn parse_ratfunc<F: Field>(
    s: &str,
    q: &InvolutiveQuiver,
    names: &VarNames,
    ctx: &Arc<AlgebraCtx<F>>,
) -> Result<RatFunc<F>, ParseError> {
    let e = parse_element(s, q, names, ctx)?;
    e.as_scalar().ok_or(ParseError {
        pos: 0,
        msg: "expression contains shift operators".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Q;
    use crate::gklo::GkloContext;
    use crate::quiver::{families, validate_quiver};

    fn ctx(v: u32, w: u32) -> GkloContext<Q> {
        let raw = families::aiii(1);
        let quiver = validate_quiver(&raw).unwrap();
        let dims = families::uniform_dims(&raw, v, w).resolve(&quiver).unwrap();
        GkloContext::exact(quiver, dims)
    }

    #[test]
    fn roundtrip_operators() {
        let c = ctx(2, 1);
        let names = var_names(&c.quiver);
        for e in [
            c.build_b(0),
            c.build_b(1),
            c.b_coeff(0, 2),
            c.build_y(0, 1).unwrap().mul(&c.build_y(1, 2).unwrap()),
        ] {
            let text = render_element(&e, &c.quiver, &names);
            let back = parse_element(&text, &c.quiver, &names, &c.algebra).unwrap();
            assert_eq!(back, e, "failed roundtrip of: {text}");
        }
    }

    #[test]
    fn roundtrip_ratfuncs() {
        let c = ctx(2, 2);
        let names = var_names(&c.quiver);
        for f in [c.build_h(0), c.build_h(1), c.h_coeff(0, 1)] {
            let text = render_ratfunc(&f, &names);
            let back = parse_ratfunc(&text, &c.quiver, &names, &c.algebra).unwrap();
            assert!(back.sub(&f).is_zero(), "failed roundtrip of: {text}");
        }
    }

    #[test]
    fn parses_handwritten_forms() {
        let c = ctx(1, 0);
        let names = var_names(&c.quiver);
        // negative-half shift resolves to an inverse positive shift
        let e = parse_element("3*d[2,1]", &c.quiver, &names, &c.algebra).unwrap();
        let expected =
            DiffOpElement::d_op(&c.algebra, 0, 1, -1).scale(&crate::field::q(3, 1));
        assert_eq!(e, expected);
        // fractions, unary minus, powers
        let f = parse_ratfunc(
            "-(x[1,1]+h/2)^2/(x[1,1]-h)",
            &c.quiver,
            &names,
            &c.algebra,
        )
        .unwrap();
        assert!(!f.is_zero());
        let text = render_ratfunc(&f, &names);
        let back = parse_ratfunc(&text, &c.quiver, &names, &c.algebra).unwrap();
        assert!(back.sub(&f).is_zero());
    }

    #[test]
    fn parse_errors_carry_position() {
        let c = ctx(1, 0);
        let names = var_names(&c.quiver);
        assert!(parse_element("x[1,1] + ?", &c.quiver, &names, &c.algebra).is_err());
        assert!(parse_element("d[9,1]", &c.quiver, &names, &c.algebra).is_err());
        assert!(parse_ratfunc("d[1,1]", &c.quiver, &names, &c.algebra).is_err());
    }
}
