//! Sparse multivariate polynomials with graded-lexicographic monomial order.

use crate::field::Field;
use crate::vars::Var;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// A monomial: sorted list of (variable, positive exponent).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(pub Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Mono(vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// self / other if other divides self.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut i = 0;
        for &(v, e) in &other.0 {
            loop {
                if i >= self.0.len() {
                    return None;
                }
                let (w, f) = self.0[i];
                match w.cmp(&v) {
                    Ordering::Less => {
                        out.push((w, f));
                        i += 1;
                    }
                    Ordering::Equal => {
                        if f < e {
                            return None;
                        }
                        if f > e {
                            out.push((w, f - e));
                        }
                        i += 1;
                        break;
                    }
                    Ordering::Greater => return None,
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        Some(Mono(out))
    }

    /// Drop a single variable from the monomial, returning its exponent.
    pub fn without(&self, v: Var) -> (Mono, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|&&(w, f)| {
                if w == v {
                    e = f;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Mono(rest), e)
    }
}

/// Graded lex: higher total degree first; ties broken by the earliest
/// variable with differing exponent, larger exponent winning.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                // The side that still has variables has positive exponent on a
                // later variable, hence smaller exponent (0 vs >0) earlier is
                // impossible here: exhausted side has exponent 0 on the other's
                // variable, so exhausted side is smaller on that variable.
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater, // a has exponent on earlier var
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse multivariate polynomial over `F`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiPoly<F: Field> {
    /// Monomial → nonzero coefficient.
    pub terms: BTreeMap<Mono, F>,
}

impl<F: Field> Default for MultiPoly<F> {
    fn default() -> Self {
        Self::zero()
    }
}

/// Structural order (used only as a map key for factored rational functions).
impl<F: Field> Ord for MultiPoly<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter();
        let mut b = other.terms.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb).then_with(|| ca.cmp(cb)) {
                    Ordering::Equal => {}
                    ord => return ord,
                },
            }
        }
    }
}

impl<F: Field> PartialOrd for MultiPoly<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> MultiPoly<F> {
    pub fn zero() -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: F) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::var(v), F::one());
        MultiPoly { terms }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::constant(F::from_i64(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.0.is_empty())
    }

    /// The constant value, if this polynomial is constant.
    pub fn as_constant(&self) -> Option<F> {
        if self.terms.is_empty() {
            return Some(F::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.0.is_empty() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn leading(&self) -> Option<(&Mono, &F)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    fn add_term(&mut self, m: Mono, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        // Iterate the smaller operand outermost.
        let (a, b) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (dm, dc) = d.leading()?;
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc.mul(&dc_inv);
            // rem -= (qc * qm) * d
            for (m, c) in &d.terms {
                rem.add_term(qm.mul(m), c.mul(&qc).neg());
            }
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    /// Substitute `v ↦ repl` (a polynomial).
    pub fn subst(&self, v: Var, repl: &Self) -> Self {
        let max = self.degree_in(v);
        if max == 0 {
            return self.clone();
        }
        // Horner over the coefficients of v.
        let coeffs = self.coeffs_in(v);
        let mut acc = Self::zero();
        for c in coeffs.into_iter().rev() {
            acc = acc.mul(repl).add(&c);
        }
        acc
    }

    /// Dense coefficient list in `v`, ascending degree; coefficients are
    /// polynomials free of `v`.
    pub fn coeffs_in(&self, v: Var) -> Vec<Self> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn evaluate(&self, point: &BTreeMap<Var, F>) -> F {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = point
                    .get(&v)
                    .unwrap_or_else(|| panic!("no value for variable {v}"));
                t = t.mul(&x.pow(e));
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// (unit, monic): `self = unit * monic` with the leading graded-lex
    /// coefficient of `monic` equal to one. Zero maps to (0, 0).
    pub fn monic(&self) -> (F, Self) {
        match self.leading() {
            None => (F::zero(), Self::zero()),
            Some((_, c)) => {
                let c = c.clone();
                let inv = c.inv().expect("leading coefficient not invertible");
                (c, self.scale(&inv))
            }
        }
    }
}

/// Maps a polynomial into another coefficient field, optionally specializing
/// some variables to constants of the target field.
pub fn map_poly<F: Field, G: Field>(
    p: &MultiPoly<F>,
    conv: &impl Fn(&F) -> G,
    assign: &BTreeMap<Var, G>,
) -> MultiPoly<G> {
    let mut out = MultiPoly::<G>::zero();
    for (m, c) in &p.terms {
        let mut coef = conv(c);
        let mut rest = Vec::new();
        for &(v, e) in &m.0 {
            match assign.get(&v) {
                Some(val) => coef = coef.mul(&val.pow(e)),
                None => rest.push((v, e)),
            }
        }
        if !coef.is_zero() {
            out.add_term(Mono(rest), coef);
        }
    }
    out
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.0.is_empty() {
                write!(f, "{c}")?;
            } else {
                if !c.is_one() {
                    write!(f, "{c}*")?;
                }
                for (j, &(v, e)) in m.0.iter().enumerate() {
                    if j > 0 {
                        write!(f, "*")?;
                    }
                    if e == 1 {
                        write!(f, "{v}")?;
                    } else {
                        write!(f, "{v}^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
