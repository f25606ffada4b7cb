//! The difference algebra: finite sums Σ_μ f_μ·d_μ with rational-function
//! coefficients, where the product shifts node variables,
//! (f d_λ)(g d_μ) = f · g(x + λℏ) · d_{λ+μ}.

use crate::field::{Field, Fp};
use crate::quiver::InvolutiveQuiver;
use crate::ratfunc::{RatFunc, RatFuncError};
use crate::vars::Var;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DiffOpError {
    #[error("operands belong to different algebra contexts")]
    ContextMismatch,
    #[error("node is not in the negative half of the involution")]
    NotNegativeNode,
    #[error(transparent)]
    Rat(#[from] RatFuncError),
}

/// d_μ = ∏ d_{i,r}^{e}: sparse exponent vector over pairs (positive node
/// ordinal, index r with 1 ≤ r ≤ v_i), sorted, zero exponents omitted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftMonomial(pub Vec<((u16, u16), i64)>);

impl ShiftMonomial {
    pub fn identity() -> Self {
        ShiftMonomial(Vec::new())
    }

    pub fn d(node: u16, idx: u16, exp: i64) -> Self {
        if exp == 0 {
            Self::identity()
        } else {
            ShiftMonomial(vec![((node, idx), exp)])
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, node: u16, idx: u16) -> i64 {
        self.0
            .iter()
            .find(|(k, _)| *k == (node, idx))
            .map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map: BTreeMap<(u16, u16), i64> = self.0.iter().copied().collect();
        for &(k, e) in &other.0 {
            *map.entry(k).or_insert(0) += e;
        }
        ShiftMonomial(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn inverse(&self) -> Self {
        ShiftMonomial(self.0.iter().map(|&(k, e)| (k, -e)).collect())
    }

    /// The substitution map x_{i,r} ↦ x_{i,r} + e·ℏ this monomial induces.
    fn shifts(&self) -> BTreeMap<Var, i64> {
        self.0
            .iter()
            .map(|&((node, idx), e)| (Var::Node { node, idx }, e))
            .collect()
    }
}

impl fmt::Display for ShiftMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        for (n, &((node, idx), e)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            write!(f, "d[{node},{idx}]")?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Shared data for one algebra instance: the value substituted for ℏ in
/// shifts. Symbolic mode keeps ℏ as a variable; randomized mode pins it to
/// a scalar, so shifted coefficients stay in the same specialization.
#[derive(Debug, PartialEq, Eq)]
pub struct AlgebraCtx<F: Field> {
    pub hbar: crate::poly::MultiPoly<F>,
}

impl<F: Field> AlgebraCtx<F> {
    pub fn symbolic() -> Arc<Self> {
        Arc::new(AlgebraCtx {
            hbar: crate::poly::MultiPoly::var(crate::vars::HBAR),
        })
    }

    pub fn specialized(hbar: F) -> Arc<Self> {
        Arc::new(AlgebraCtx {
            hbar: crate::poly::MultiPoly::constant(hbar),
        })
    }
}

/// An element Σ_μ f_μ·d_μ; coefficients are stored left of the shift
/// monomial and zero coefficients are pruned eagerly.
#[derive(Clone, Debug)]
pub struct DiffOpElement<F: Field> {
    pub terms: BTreeMap<ShiftMonomial, RatFunc<F>>,
    pub ctx: Arc<AlgebraCtx<F>>,
}

impl<F: Field> DiffOpElement<F> {
    pub fn zero(ctx: &Arc<AlgebraCtx<F>>) -> Self {
        DiffOpElement {
            terms: BTreeMap::new(),
            ctx: ctx.clone(),
        }
    }

    pub fn one(ctx: &Arc<AlgebraCtx<F>>) -> Self {
        Self::scalar(ctx, RatFunc::one())
    }

    /// f·d_∅ — the embedding of the coefficient field.
    pub fn scalar(ctx: &Arc<AlgebraCtx<F>>, f: RatFunc<F>) -> Self {
        Self::from_term(ctx, ShiftMonomial::identity(), f)
    }

    pub fn d_op(ctx: &Arc<AlgebraCtx<F>>, node: u16, idx: u16, exp: i64) -> Self {
        Self::from_term(ctx, ShiftMonomial::d(node, idx, exp), RatFunc::one())
    }

    pub fn from_term(ctx: &Arc<AlgebraCtx<F>>, mono: ShiftMonomial, f: RatFunc<F>) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(mono, f);
        }
        DiffOpElement {
            terms,
            ctx: ctx.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the identity shift, if no other shift appears.
    pub fn as_scalar(&self) -> Option<RatFunc<F>> {
        match self.terms.len() {
            0 => Some(RatFunc::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_identity() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn check_ctx(&self, other: &Self) -> Result<(), DiffOpError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.hbar == other.ctx.hbar {
            Ok(())
        } else {
            Err(DiffOpError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, DiffOpError> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for (m, f) in &other.terms {
            match terms.entry(m.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(f.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(f);
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
        Ok(DiffOpElement {
            terms,
            ctx: self.ctx.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("context mismatch in add")
    }

    pub fn neg(&self) -> Self {
        DiffOpElement {
            terms: self.terms.iter().map(|(m, f)| (m.clone(), f.neg())).collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        DiffOpElement {
            terms: self
                .terms
                .iter()
                .map(|(m, f)| (m.clone(), f.scale(c)))
                .collect(),
            ctx: self.ctx.clone(),
        }
    }

    /// Left multiplication by a scalar rational function (spectral and
    /// coefficient variables commute with everything, so side is moot).
    pub fn scale_rat(&self, c: &RatFunc<F>) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        DiffOpElement {
            terms: self
                .terms
                .iter()
                .map(|(m, f)| (m.clone(), f.mul(c)))
                .collect(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, DiffOpError> {
        self.check_ctx(other)?;
        let mut out = Self::zero(&self.ctx);
        for (lam, f) in &self.terms {
            let shifts = lam.shifts();
            for (mu, g) in &other.terms {
                let shifted = g.shift_nodes(&shifts, &self.ctx.hbar);
                let term = Self::from_term(&self.ctx, lam.mul(mu), f.mul(&shifted));
                out = out.add(&term);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("context mismatch in mul")
    }

    pub fn try_bracket(&self, other: &Self, kind: BracketKind) -> Result<Self, DiffOpError> {
        let ab = self.try_mul(other)?;
        let ba = other.try_mul(self)?;
        Ok(match kind {
            BracketKind::Commutator => ab.sub(&ba),
            BracketKind::Anticommutator => ab.add(&ba),
        })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.try_bracket(other, BracketKind::Commutator)
            .expect("context mismatch in bracket")
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.try_bracket(other, BracketKind::Anticommutator)
            .expect("context mismatch in bracket")
    }

    /// Apply `f` to every coefficient, pruning zeros.
    pub fn map_coeffs<E>(
        &self,
        mut f: impl FnMut(&RatFunc<F>) -> Result<RatFunc<F>, E>,
    ) -> Result<Self, E> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let c2 = f(c)?;
            if !c2.is_zero() {
                terms.insert(m.clone(), c2);
            }
        }
        Ok(DiffOpElement {
            terms,
            ctx: self.ctx.clone(),
        })
    }

    /// Coefficient-wise substitution of a spectral variable.
    pub fn subst_var(&self, v: Var, val: &RatFunc<F>) -> Result<Self, RatFuncError> {
        self.map_coeffs(|c| c.subst_var(v, val))
    }

    /// Coefficient-wise proper truncation in a spectral variable.
    pub fn truncate_proper(&self, v: Var) -> Result<Self, RatFuncError> {
        self.map_coeffs(|c| c.truncate_proper(v))
    }

    /// Coefficients of v^k for k in lo..=hi, coefficient-wise Laurent
    /// expansion at infinity; returned ascending in k.
    pub fn laurent_coefficients(&self, v: Var, lo: i64, hi: i64) -> Vec<Self> {
        let n = (hi - lo + 1) as usize;
        let mut out = vec![Self::zero(&self.ctx); n];
        for (m, c) in &self.terms {
            let coeffs = c.laurent_coefficients(v, lo..=hi);
            for (k, cf) in coeffs.into_iter().enumerate() {
                if !cf.is_zero() {
                    out[k] = out[k].add(&Self::from_term(&self.ctx, m.clone(), cf));
                }
            }
        }
        out
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.values().any(|c| c.contains_var(v))
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut s = std::collections::BTreeSet::new();
        for c in self.terms.values() {
            s.extend(c.vars());
        }
        s
    }
}

impl<F: Field> PartialEq for DiffOpElement<F> {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    Commutator,
    Anticommutator,
}

/// Outcome of a randomized zero test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroCheck {
    Zero,
    NonzeroWitness {
        monomial: ShiftMonomial,
        point: BTreeMap<Var, u64>,
    },
    Inconclusive,
}

const POLE_RETRIES: usize = 32;

impl DiffOpElement<Fp> {
    /// Randomized zero test over 𝔽_p: shift monomials are linearly
    /// independent, so the element vanishes iff every coefficient does.
    /// Each coefficient is evaluated at `trials` random points; a pole hit
    /// re-draws the point up to 32 times before giving up.
    pub fn randomized_is_zero(&self, trials: u32, seed: u64) -> ZeroCheck {
        let vars: Vec<Var> = self.vars().into_iter().collect();
        let p = crate::field::active_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let mut attempts = 0;
            'point: loop {
                let point: BTreeMap<Var, Fp> = vars
                    .iter()
                    .map(|&v| (v, Fp(rng.gen_range(1..p))))
                    .collect();
                for (m, c) in &self.terms {
                    match c.evaluate(&point) {
                        Ok(val) if val.is_zero() => {}
                        Ok(_) => {
                            return ZeroCheck::NonzeroWitness {
                                monomial: m.clone(),
                                point: point.into_iter().map(|(v, x)| (v, x.0)).collect(),
                            };
                        }
                        Err(_) => {
                            attempts += 1;
                            if attempts >= POLE_RETRIES {
                                return ZeroCheck::Inconclusive;
                            }
                            continue 'point;
                        }
                    }
                }
                break;
            }
        }
        ZeroCheck::Zero
    }
}

/// The rewriting used for nodes in the negative half: x_{i,r} ↦ −x_{τi,r}
/// and d_{i,r} ↦ d_{τi,r}^{−1}. Returns the canonical variable, the sign it
/// carries, and the exponent sign for the shift operator.
pub fn canonicalize_negative(
    q: &InvolutiveQuiver,
    i: usize,
    r: u16,
) -> Result<(Var, i8, i64), DiffOpError> {
    if q.is_positive(i) {
        return Err(DiffOpError::NotNegativeNode);
    }
    Ok((
        Var::Node {
            node: q.positive_ordinal[i] as u16,
            idx: r,
        },
        -1,
        -1,
    ))
}

/// The canonical symbol for any node: positive nodes map to themselves with
/// positive sign, negative nodes via `canonicalize_negative`.
pub fn canonical_symbol(q: &InvolutiveQuiver, i: usize, r: u16) -> (Var, i8, i64) {
    if q.is_positive(i) {
        (
            Var::Node {
                node: q.positive_ordinal[i] as u16,
                idx: r,
            },
            1,
            1,
        )
    } else {
        canonicalize_negative(q, i, r).expect("node is negative")
    }
}

impl<F: Field> fmt::Display for DiffOpElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{m}")?;
        }
        Ok(())
    }
}
