//! Exact multivariate rational functions.
//!
//! Internally a `RatFunc` is kept in *factored* form: a unit coefficient
//! times a product of monic polynomial factors with integer (possibly
//! negative) exponents. Multiplication and inversion never expand anything;
//! addition extracts the factors shared by both operands first and only
//! expands the small residual parts. Because all denominators in this domain
//! arise as products of linear forms, cancellation by exact division of the
//! residual against denominator factors keeps results fully reduced, and a
//! sum is recognized as zero exactly when its residual expands to the zero
//! polynomial. The canonical numerator/denominator pair of the public
//! contract is produced on demand by `numer_denom`.

use crate::field::{Field, Q};
use crate::poly::{map_poly, MultiPoly};
use crate::vars::Var;
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RatFuncError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    PoleHit,
    #[error("repeated pole in the truncation variable")]
    RepeatedPole,
    #[error("denominator factor of degree ≥ 2 in the truncation variable")]
    NonLinearFactor,
    #[error("shift applied to a non-node variable")]
    ShiftOnNonNodeVar,
}

/// An exact rational function `coef · ∏ fᵢ^{eᵢ}` with monic non-constant
/// factors `fᵢ` and nonzero exponents. Zero is `coef = 0` with no factors.
#[derive(Clone, Debug)]
pub struct RatFunc<F: Field> {
    coef: F,
    factors: BTreeMap<MultiPoly<F>, i64>,
}

impl<F: Field> RatFunc<F> {
    pub fn zero() -> Self {
        RatFunc {
            coef: F::zero(),
            factors: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        RatFunc {
            coef: c,
            factors: BTreeMap::new(),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::constant(F::from_i64(n))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(&MultiPoly::var(v))
    }

    pub fn from_poly(p: &MultiPoly<F>) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        let (unit, monic) = p.monic();
        let mut factors = BTreeMap::new();
        if !monic.is_constant() {
            factors.insert(monic, 1);
        }
        RatFunc {
            coef: unit,
            factors,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn coef(&self) -> &F {
        &self.coef
    }

    pub fn factors(&self) -> impl Iterator<Item = (&MultiPoly<F>, i64)> {
        self.factors.iter().map(|(f, &e)| (f, e))
    }

    /// Canonical (numerator, denominator): gcd-reduced, denominator monic
    /// under the graded-lex order.
    pub fn numer_denom(&self) -> (MultiPoly<F>, MultiPoly<F>) {
        let mut num = MultiPoly::constant(self.coef.clone());
        let mut den = MultiPoly::one();
        for (f, &e) in &self.factors {
            if e > 0 {
                num = num.mul(&f.pow(e as u32));
            } else {
                den = den.mul(&f.pow((-e) as u32));
            }
        }
        (num, den)
    }

    /// The expanded polynomial, if there is no denominator.
    pub fn as_poly(&self) -> Option<MultiPoly<F>> {
        if self.factors.values().any(|&e| e < 0) {
            return None;
        }
        Some(self.numer_denom().0)
    }

    pub fn as_constant(&self) -> Option<F> {
        if self.factors.is_empty() {
            Some(self.coef.clone())
        } else {
            None
        }
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.factors.keys().flat_map(|f| f.vars()).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.factors.keys().any(|f| f.contains_var(v))
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            coef: self.coef.neg(),
            factors: self.factors.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut factors = self.factors.clone();
        for (f, &e) in &other.factors {
            let slot = factors.entry(f.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                factors.remove(f);
            }
        }
        Self::reduce_cross(&mut factors);
        RatFunc {
            coef: self.coef.mul(&other.coef),
            factors,
        }
    }

    /// Cancel denominator factors that exactly divide (non-identical)
    /// numerator factors, refining the factorization. Distinct monic factors
    /// of equal degree never divide each other, so the all-linear fast path
    /// costs nothing.
    fn reduce_cross(factors: &mut BTreeMap<MultiPoly<F>, i64>) {
        loop {
            let mut found: Option<(MultiPoly<F>, MultiPoly<F>, MultiPoly<F>)> = None;
            'outer: for (f, &e) in factors.iter() {
                if e >= 0 {
                    continue;
                }
                for (g, &k) in factors.iter() {
                    if k <= 0 || g.degree() <= f.degree() {
                        continue;
                    }
                    if let Some(quo) = g.exact_div(f) {
                        found = Some((f.clone(), g.clone(), quo));
                        break 'outer;
                    }
                }
            }
            let Some((f, g, quo)) = found else { break };
            *factors.get_mut(&f).unwrap() += 1;
            *factors.get_mut(&g).unwrap() -= 1;
            factors.retain(|_, e| *e != 0);
            debug_assert!(quo.leading().map(|(_, c)| c.is_one()).unwrap_or(true));
            if !quo.is_constant() {
                *factors.entry(quo).or_insert(0) += 1;
                factors.retain(|_, e| *e != 0);
            }
        }
    }

    pub fn inv(&self) -> Result<Self, RatFuncError> {
        let coef = self.coef.inv().ok_or(RatFuncError::DivisionByZero)?;
        Ok(RatFunc {
            coef,
            factors: self.factors.iter().map(|(f, &e)| (f.clone(), -e)).collect(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, RatFuncError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            coef: self.coef.mul(c),
            factors: self.factors.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self, RatFuncError> {
        if e == 0 {
            return Ok(Self::one());
        }
        if self.is_zero() {
            return if e > 0 {
                Ok(Self::zero())
            } else {
                Err(RatFuncError::DivisionByZero)
            };
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut coef = F::one();
        for _ in 0..e.unsigned_abs() {
            coef = coef.mul(&base.coef);
        }
        Ok(RatFunc {
            coef,
            factors: base
                .factors
                .iter()
                .map(|(f, &k)| (f.clone(), k * e.abs()))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Shared part: each factor to the minimum of its two exponents
        // (missing = 0). Both residuals then carry only nonnegative
        // exponents, so they expand to polynomials.
        let mut common: BTreeMap<MultiPoly<F>, i64> = BTreeMap::new();
        for (f, &e) in &self.factors {
            let eo = other.factors.get(f).copied().unwrap_or(0);
            let m = e.min(eo);
            if m != 0 {
                common.insert(f.clone(), m);
            }
        }
        for (f, &e) in &other.factors {
            if !self.factors.contains_key(f) {
                let m = e.min(0);
                if m != 0 {
                    common.insert(f.clone(), m);
                }
            }
        }
        let residual = |r: &Self| -> MultiPoly<F> {
            let mut p = MultiPoly::constant(r.coef.clone());
            let keys: std::collections::BTreeSet<&MultiPoly<F>> =
                r.factors.keys().chain(common.keys()).collect();
            for f in keys {
                let e = r.factors.get(f).copied().unwrap_or(0);
                let c = common.get(f).copied().unwrap_or(0);
                let k = e - c;
                debug_assert!(k >= 0, "residual exponent must be nonnegative");
                if k > 0 {
                    p = p.mul(&f.pow(k as u32));
                }
            }
            p
        };
        let sum = residual(self).add(&residual(other));
        if sum.is_zero() {
            return Self::zero();
        }
        let (unit, mut monic) = sum.monic();
        // Cancel the summed residual against shared denominator factors.
        let mut factors = BTreeMap::new();
        for (f, e) in common {
            let mut e = e;
            while e < 0 {
                match monic.exact_div(&f) {
                    Some(q) => {
                        monic = q;
                        e += 1;
                    }
                    None => break,
                }
            }
            if e != 0 {
                factors.insert(f, e);
            }
        }
        if !monic.is_constant() {
            *factors.entry(monic).or_insert(0) += 1;
        }
        factors.retain(|_, e| *e != 0);
        RatFunc {
            coef: unit,
            factors,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Substitute node variables x ↦ x + k·ℏ (the difference-operator shift).
    /// `hbar` is the context's image of ℏ (a variable, or a constant in
    /// randomized mode). Factors stay factored: a shifted monic factor is
    /// still monic because the substitution only adds lex-smaller monomials.
    pub fn shift_nodes(&self, shifts: &BTreeMap<Var, i64>, hbar: &MultiPoly<F>) -> Self {
        if self.is_zero() || shifts.is_empty() {
            return self.clone();
        }
        let mut coef = self.coef.clone();
        let mut factors = BTreeMap::new();
        for (f, &e) in &self.factors {
            let mut g = f.clone();
            for (&v, &k) in shifts {
                debug_assert!(v.is_node());
                if k != 0 && g.contains_var(v) {
                    let repl = MultiPoly::var(v).add(&hbar.scale(&F::from_i64(k)));
                    g = g.subst(v, &repl);
                }
            }
            let (unit, monic) = g.monic();
            if !unit.is_one() {
                let mut u = F::one();
                // unit^e with e possibly negative
                let inv;
                let base = if e < 0 {
                    inv = unit.inv().expect("unit invertible");
                    &inv
                } else {
                    &unit
                };
                for _ in 0..e.unsigned_abs() {
                    u = u.mul(base);
                }
                coef = coef.mul(&u);
            }
            if !monic.is_constant() {
                *factors.entry(monic).or_insert(0) += e;
            }
        }
        factors.retain(|_, e| *e != 0);
        RatFunc { coef, factors }
    }

    /// Substitute one variable by a rational function. Fails if a denominator
    /// factor becomes zero under the substitution.
    pub fn subst_var(&self, v: Var, val: &Self) -> Result<Self, RatFuncError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = Self::constant(self.coef.clone());
        for (f, &e) in &self.factors {
            let image = if f.contains_var(v) {
                let mut acc = Self::zero();
                for c in f.coeffs_in(v).into_iter().rev() {
                    acc = acc.mul(val).add(&Self::from_poly(&c));
                }
                acc
            } else {
                Self::from_poly(f)
            };
            if image.is_zero() && e < 0 {
                return Err(RatFuncError::DivisionByZero);
            }
            out = out.mul(&image.pow(e)?);
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &BTreeMap<Var, F>) -> Result<F, RatFuncError> {
        if self.is_zero() {
            return Ok(F::zero());
        }
        let mut acc = self.coef.clone();
        let mut num_zero = false;
        for (f, &e) in &self.factors {
            let x = f.evaluate(point);
            if x.is_zero() {
                if e < 0 {
                    return Err(RatFuncError::PoleHit);
                }
                num_zero = true;
                continue;
            }
            let x = if e < 0 { x.inv().unwrap() } else { x };
            for _ in 0..e.unsigned_abs() {
                acc = acc.mul(&x);
            }
        }
        Ok(if num_zero { F::zero() } else { acc })
    }

    /// Laurent coefficients at `var = ∞` for each degree in `degrees`
    /// (inclusive range), by exact long division of the reversed series.
    pub fn laurent_coefficients(
        &self,
        var: Var,
        degrees: std::ops::RangeInclusive<i64>,
    ) -> Vec<Self> {
        let lo = *degrees.start();
        let hi = *degrees.end();
        if self.is_zero() || lo > hi {
            return vec![Self::zero(); (hi - lo + 1).max(0) as usize];
        }
        let (num, den) = self.numer_denom();
        let p: Vec<MultiPoly<F>> = num.coeffs_in(var);
        let q: Vec<MultiPoly<F>> = den.coeffs_in(var);
        let deg_p = (p.len() - 1) as i64;
        let deg_q = (q.len() - 1) as i64;
        let top = deg_p - deg_q;
        // f = var^top · P̃(t)/Q̃(t) with t = 1/var and reversed coefficient
        // lists; c_n is the t^n series coefficient, i.e. the coefficient of
        // var^(top − n).
        let n_max = top - lo;
        if n_max < 0 {
            return vec![Self::zero(); (hi - lo + 1) as usize];
        }
        let q0 = Self::from_poly(&q[deg_q as usize]);
        let q0_inv = q0.inv().expect("leading denominator coefficient is nonzero");
        let p_rev = |n: i64| -> Self {
            let k = deg_p - n;
            if k < 0 {
                Self::zero()
            } else {
                Self::from_poly(&p[k as usize])
            }
        };
        let q_rev = |n: i64| -> Self {
            let k = deg_q - n;
            if k < 0 {
                Self::zero()
            } else {
                Self::from_poly(&q[k as usize])
            }
        };
        let mut c: Vec<Self> = Vec::with_capacity((n_max + 1) as usize);
        for n in 0..=n_max {
            let mut acc = p_rev(n);
            for j in 1..=n {
                acc = acc.sub(&q_rev(j).mul(&c[(n - j) as usize]));
            }
            c.push(acc.mul(&q0_inv));
        }
        (lo..=hi)
            .map(|k| {
                let n = top - k;
                if (0..=n_max).contains(&n) {
                    c[n as usize].clone()
                } else {
                    Self::zero()
                }
            })
            .collect()
    }

    /// The truncation (f)°: the strictly proper part of `self` in `var`,
    /// computed by partial fractions over the symbolically distinct simple
    /// poles. Denominator factors must be linear in `var` and simple.
    pub fn truncate_proper(&self, var: Var) -> Result<Self, RatFuncError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut rest = Self::constant(self.coef.clone());
        let mut numerator = MultiPoly::one();
        // (A, B) per pole factor A·var + B.
        let mut poles: Vec<(MultiPoly<F>, MultiPoly<F>, MultiPoly<F>)> = Vec::new();
        for (f, &e) in &self.factors {
            if !f.contains_var(var) {
                rest = rest.mul(&RatFunc {
                    coef: F::one(),
                    factors: BTreeMap::from([(f.clone(), e)]),
                });
                continue;
            }
            if e > 0 {
                numerator = numerator.mul(&f.pow(e as u32));
                continue;
            }
            if f.degree_in(var) > 1 {
                return Err(RatFuncError::NonLinearFactor);
            }
            if e < -1 {
                return Err(RatFuncError::RepeatedPole);
            }
            let mut cs = f.coeffs_in(var);
            let a = cs.pop().unwrap();
            let b = cs.pop().unwrap_or_default();
            poles.push((f.clone(), a, b));
        }
        if poles.is_empty() {
            return Ok(Self::zero());
        }
        let roots: Vec<Self> = poles
            .iter()
            .map(|(_, a, b)| {
                Self::from_poly(b)
                    .neg()
                    .div(&Self::from_poly(a))
                    .expect("linear pole has nonzero leading coefficient")
            })
            .collect();
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if roots[i].sub(&roots[j]).is_zero() {
                    return Err(RatFuncError::RepeatedPole);
                }
            }
        }
        // f = rest · (∏ 1/A_k) · numerator(var) / ∏ (var − z_k); apply the
        // residue formula pole by pole.
        let num_coeffs = numerator.coeffs_in(var);
        let g_at = |z: &Self| -> Self {
            let mut acc = Self::zero();
            for c in num_coeffs.iter().rev() {
                acc = acc.mul(z).add(&Self::from_poly(c));
            }
            acc
        };
        let mut out = Self::zero();
        for (i, (f_i, _, _)) in poles.iter().enumerate() {
            let mut term = g_at(&roots[i]);
            for (j, root_j) in roots.iter().enumerate() {
                if j != i {
                    term = term
                        .div(&roots[i].sub(root_j))
                        .expect("roots are pairwise distinct");
                    term = term
                        .div(&Self::from_poly(&poles[j].1))
                        .expect("pole leading coefficient nonzero");
                }
            }
            // 1/(var − z_i) = A_i/(A_i·var + B_i); the A_i cancels against
            // the global (∏ A_k)^{-1}, leaving the ∏_{j≠i} A_j^{-1} above.
            term = term.mul(&RatFunc {
                coef: F::one(),
                factors: BTreeMap::from([(f_i.clone(), -1)]),
            });
            out = out.add(&term);
        }
        Ok(rest.mul(&out))
    }
}

/// Semantic equality as rational functions.
impl<F: Field> PartialEq for RatFunc<F> {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}
impl<F: Field> Eq for RatFunc<F> {}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.numer_denom();
        if den.is_constant() {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/({den})")
        }
    }
}

/// Map a rational function into another coefficient field, specializing the
/// assigned variables; used to move exact operators into 𝔽_p.
pub fn map_ratfunc<F: Field, G: Field>(
    r: &RatFunc<F>,
    conv: &impl Fn(&F) -> G,
    assign: &BTreeMap<Var, G>,
) -> Result<RatFunc<G>, RatFuncError> {
    if r.is_zero() {
        return Ok(RatFunc::zero());
    }
    let mut out = RatFunc::constant(conv(&r.coef));
    for (f, e) in r.factors() {
        let g = map_poly(f, conv, assign);
        if g.is_zero() && e < 0 {
            return Err(RatFuncError::PoleHit);
        }
        out = out.mul(&RatFunc::from_poly(&g).pow(e)?);
    }
    Ok(out)
}

/// Bernoulli numbers B_0..B_n (with B_1 = −1/2).
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b: Vec<Q> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(<BigRational as One>::one());
            continue;
        }
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = <BigRational as Zero>::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            if j > 0 {
                binom = &binom * BigInt::from(m + 2 - j) / BigInt::from(j);
            }
            acc += BigRational::from_integer(binom.clone()) * bj;
        }
        let lead = BigRational::from_integer(BigInt::from(m + 1));
        b.push(-acc / lead);
    }
    b
}

/// Coefficients (ascending) of the Bernoulli polynomial Ber_n(x), defined by
/// t·e^{tx}/(e^t − 1) = Σ_n Ber_n(x) t^n/n!; satisfies
/// Ber_n(x+1) − Ber_n(x) = n·x^{n−1}.
pub fn bernoulli_polynomial(n: usize) -> Vec<Q> {
    let nums = bernoulli_numbers(n);
    let mut out = vec![<BigRational as Zero>::zero(); n + 1];
    let mut binom = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            binom = &binom * BigInt::from(n + 1 - k) / BigInt::from(k);
        }
        // coefficient of x^{n−k} is C(n,k) B_k
        out[n - k] = BigRational::from_integer(binom.clone()) * &nums[k];
    }
    out
}
