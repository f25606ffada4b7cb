//! Minuscule monopole operators assembled from Euler-class contribution
//! rules, and the cross-check that they reproduce the B-coefficients of the
//! difference-operator construction.

use crate::diffop::{DiffOpElement, ShiftMonomial};
use crate::field::Field;
use crate::gklo::GkloContext;
use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;
use crate::vars::{Var, Z};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MonopoleError {
    #[error("node {0} has v = 0; the monopole sum is empty")]
    EmptyNode(String),
    #[error("weight pairs with the cocharacter to {m}, outside the minuscule range")]
    NotMinusculeContext { m: i64 },
    #[error("monopole operators are assembled at positive nodes; {0} is in the negative half")]
    NotPositiveNode(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SummandKind {
    /// Hom(V_{s(h)}, V_{t(h)}) for a non-fixed arrow orbit representative.
    ArrowHom { arrow: usize, a: u16, b: u16 },
    /// ∧²V_{t(h)} for a τ-fixed arrow; a < b.
    AltWedge { arrow: usize, a: u16, b: u16 },
    /// Hom(W_j, V_j) for a node j.
    FramingHom { node: usize, a: u16, b: u16 },
}

/// One 1-dimensional torus-invariant summand of the matter representation,
/// with its torus weight expressed through the canonical coordinates (the
/// ℏ-weight is ℏ/2 throughout and enters only the contribution rule).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSummand<F: Field> {
    pub kind: SummandKind,
    pub weight: MultiPoly<F>,
}

/// Enumerate the torus-weight decomposition of the matter space: Hom-spaces
/// over non-fixed arrow orbits, alternating squares over τ-fixed arrows,
/// and framing Hom-spaces over all nodes.
pub fn weight_summands<F: Field>(ctx: &GkloContext<F>) -> Vec<WeightSummand<F>> {
    let q = &ctx.quiver;
    let mut out = Vec::new();
    for &ai in &q.positive_arrows {
        let h = &q.arrows[ai];
        for a in 1..=ctx.v(h.source) as u16 {
            for b in 1..=ctx.v(h.target) as u16 {
                out.push(WeightSummand {
                    kind: SummandKind::ArrowHom { arrow: ai, a, b },
                    weight: ctx.xi(h.target, b).sub(&ctx.xi(h.source, a)),
                });
            }
        }
    }
    for &ai in &q.tau_fixed_arrows {
        let h = &q.arrows[ai];
        let v = ctx.v(h.target) as u16;
        for a in 1..=v {
            for b in (a + 1)..=v {
                out.push(WeightSummand {
                    kind: SummandKind::AltWedge { arrow: ai, a, b },
                    weight: ctx.xi(h.target, a).add(&ctx.xi(h.target, b)),
                });
            }
        }
    }
    for j in 0..q.n_nodes() {
        for a in 1..=ctx.w(j) as u16 {
            for b in 1..=ctx.v(j) as u16 {
                let w = ctx.pvar(Var::Framing {
                    node: j as u16,
                    idx: a,
                });
                out.push(WeightSummand {
                    kind: SummandKind::FramingHom { node: j, a, b },
                    weight: ctx.xi(j, b).sub(&w),
                });
            }
        }
    }
    out
}

/// ⟨λ, α⟩ for λ = sign·ε_{i,r} (i a positive node, coordinate variable
/// x_{p,r}): the integer coefficient of that variable in the weight.
fn pairing<F: Field>(
    ctx: &GkloContext<F>,
    weight: &MultiPoly<F>,
    i: usize,
    r: u16,
    sign: i64,
) -> Result<i64, MonopoleError> {
    let p = ctx.quiver.positive_ordinal[i] as u16;
    let var = Var::Node { node: p, idx: r };
    let coeffs = weight.coeffs_in(var);
    let c = match coeffs.get(1) {
        Some(c) => c.clone(),
        None => return Ok(0),
    };
    if c.is_zero() {
        return Ok(0);
    }
    for m in [1i64, -1, 2, -2] {
        if c == MultiPoly::constant(F::from_i64(m)) {
            let paired = sign * m;
            if paired.abs() > 1 {
                return Err(MonopoleError::NotMinusculeContext { m: paired });
            }
            return Ok(paired);
        }
    }
    Err(MonopoleError::NotMinusculeContext { m: i64::MAX })
}

/// The Euler-class contribution of one summand for the cocharacter
/// λ = sign·ε_{i,r}: trivial when ⟨λ,α⟩ ≥ 0, else ∏_{k=1}^{|m|}(α − (2k−1)ℏ/2).
pub fn euler_contribution<F: Field>(
    ctx: &GkloContext<F>,
    summand: &WeightSummand<F>,
    i: usize,
    r: u16,
    sign: i64,
) -> Result<RatFunc<F>, MonopoleError> {
    let m = pairing(ctx, &summand.weight, i, r, sign)?;
    if m >= 0 {
        return Ok(RatFunc::one());
    }
    let mut out = RatFunc::one();
    for k in 1..=(-m) {
        let shift = ctx.hbar().scale(&F::from_ratio(2 * k - 1, 2));
        out = out.mul(&RatFunc::from_poly(&summand.weight.sub(&shift)));
    }
    Ok(out)
}

/// The minuscule monopole operator for λ = ε_{i,1} (plus) or λ = −ε_{i,v_i}
/// (minus) at a positive node i, capped with the univariate polynomial `f`
/// (in the spectral variable `Z`): the Weyl-orbit sum over r = 1..v_i of
/// f(x_{i,r}) (plus) or f(x_{i,r}−ℏ) (minus), times the product of Euler
/// contributions, divided by the tangent Euler class V_{i,r}(x_{i,r}) —
/// with the extra (−1)^{v_i−1} in the minus direction — times d_{i,r}^{±1}.
pub fn minuscule_monopole<F: Field>(
    ctx: &GkloContext<F>,
    i: usize,
    f: &MultiPoly<F>,
    direction: Direction,
) -> Result<DiffOpElement<F>, MonopoleError> {
    if !ctx.quiver.is_positive(i) {
        return Err(MonopoleError::NotPositiveNode(ctx.quiver.nodes[i].clone()));
    }
    let v = ctx.v(i);
    if v == 0 {
        return Err(MonopoleError::EmptyNode(ctx.quiver.nodes[i].clone()));
    }
    let summands = weight_summands(ctx);
    let p = ctx.quiver.positive_ordinal[i] as u16;
    let sign = match direction {
        Direction::Plus => 1,
        Direction::Minus => -1,
    };
    let mut out = DiffOpElement::zero(&ctx.algebra);
    for r in 1..=v as u16 {
        let x = ctx.xi(i, r);
        let arg = match direction {
            Direction::Plus => x.clone(),
            Direction::Minus => x.sub(&ctx.hbar()),
        };
        let mut coef = RatFunc::from_poly(&f.subst(Z, &arg));
        for s in &summands {
            coef = coef.mul(&euler_contribution(ctx, s, i, r, sign)?);
        }
        let mut eu = ctx.v_poly_omit(i, r, &x);
        if direction == Direction::Minus && (v - 1) % 2 == 1 {
            eu = eu.neg();
        }
        coef = coef.div(&eu).expect("distinct coordinates");
        out = out.add(&DiffOpElement::from_term(
            &ctx.algebra,
            ShiftMonomial::d(p, r, sign),
            coef,
        ));
    }
    Ok(out)
}

/// Result of one cross-check instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiEntry {
    pub r: i64,
    pub ok: bool,
    /// On mismatch: a nonzero term of (monopole side) − B_{i,r}.
    pub mismatch: Option<String>,
}

/// Verify, exactly, that the monopole operator with the appropriate
/// polynomial cap and sign prefactor reproduces B_{i,r} for 0 ≤ r ≤ r_max.
/// Positive nodes go through the plus direction with f(x) = (−x−ℏ/2)^r;
/// negative nodes through the minus direction at the τ-partner with
/// f(x) = (x+ℏ/2)^r (so that the evaluation at x−ℏ yields (x−ℏ/2)^r).
pub fn psi_crosscheck<F: Field>(
    ctx: &GkloContext<F>,
    i: usize,
    r_max: i64,
) -> Result<Vec<PsiEntry>, MonopoleError> {
    let positive = ctx.quiver.is_positive(i);
    let site = if positive { i } else { ctx.quiver.tau(i) };
    if ctx.v(i) == 0 {
        return Err(MonopoleError::EmptyNode(ctx.quiver.nodes[i].clone()));
    }
    // (−1)^{1 + Σ_{h∉Q1^τ, s(h)=i} v_{t(h)} + Σ_{h∈Q1^τ, s(h)=i}(v_i−1)}
    let mut exp: i64 = 1;
    for (ai, h) in ctx.quiver.arrows.iter().enumerate() {
        if h.source != i {
            continue;
        }
        if ctx.quiver.tau_fixed_arrows.contains(&ai) {
            exp += ctx.v(i) as i64 - 1;
        } else {
            exp += ctx.v(h.target) as i64;
        }
    }
    let prefactor = if exp.rem_euclid(2) == 0 {
        F::one()
    } else {
        F::from_i64(-1)
    };

    let z = MultiPoly::<F>::var(Z);
    let half = ctx.hbar().scale(&F::from_ratio(1, 2));
    let mut entries = Vec::new();
    for r in 0..=r_max {
        let (f, dir) = if positive {
            (z.neg().sub(&half).pow(r as u32), Direction::Plus)
        } else {
            (z.add(&half).pow(r as u32), Direction::Minus)
        };
        let mono = minuscule_monopole(ctx, site, &f, dir)?.scale(&prefactor);
        let defect = mono.sub(&ctx.b_coeff(i, r));
        let ok = defect.is_zero();
        entries.push(PsiEntry {
            r,
            ok,
            mismatch: if ok {
                None
            } else {
                defect
                    .terms
                    .iter()
                    .next()
                    .map(|(m, c)| format!("{m}: {c}"))
            },
        });
    }
    Ok(entries)
}
