//! Property-based invariants for the arithmetic layers: polynomial ring
//! axioms, factored rational-function arithmetic, truncation idempotence,
//! and the shift-algebra product laws.

use proptest::prelude::*;

use gklo::diffop::{AlgebraCtx, DiffOpElement, ShiftMonomial};
use gklo::field::{Field, Q};
use gklo::poly::MultiPoly;
use gklo::ratfunc::RatFunc;
use gklo::vars::{Var, U};

const X1: Var = Var::Node { node: 0, idx: 1 };
const X2: Var = Var::Node { node: 0, idx: 2 };
const H: Var = Var::Hbar;

/// A small random polynomial in x[1,1], x[1,2], ℏ and u.
fn poly_strategy() -> impl Strategy<Value = MultiPoly<Q>> {
    let term = (0u32..3, 0u32..2, 0u32..2, 0u32..2, -4i64..=4).prop_map(
        |(eu, e1, e2, eh, c)| {
            MultiPoly::var(U)
                .pow(eu)
                .mul(&MultiPoly::var(X1).pow(e1))
                .mul(&MultiPoly::var(X2).pow(e2))
                .mul(&MultiPoly::var(H).pow(eh))
                .scale(&Q::from_i64(c))
        },
    );
    prop::collection::vec(term, 0..4)
        .prop_map(|ts| ts.iter().fold(MultiPoly::zero(), |a, t| a.add(t)))
}

/// A random rational function: polynomial numerator over a product of
/// distinct linear factors in u.
fn ratfunc_strategy() -> impl Strategy<Value = RatFunc<Q>> {
    (
        poly_strategy(),
        prop::collection::btree_set(-6i64..=6, 0..3),
    )
        .prop_map(|(n, roots)| {
            let mut den = RatFunc::<Q>::one();
            for r in roots {
                den = den.mul(&RatFunc::from_poly(
                    &MultiPoly::var(U).sub(&MultiPoly::from_i64(r)),
                ));
            }
            RatFunc::from_poly(&n).div(&den).unwrap()
        })
}

/// A small element of the shift algebra on a rank-2 coordinate block.
fn element_strategy() -> impl Strategy<Value = DiffOpElement<Q>> {
    let term = (ratfunc_strategy(), -1i64..=1, -1i64..=1).prop_map(|(f, e1, e2)| {
        let ctx = AlgebraCtx::<Q>::symbolic();
        let m = ShiftMonomial::d(0, 1, e1).mul(&ShiftMonomial::d(0, 2, e2));
        DiffOpElement::from_term(&ctx, m, f)
    });
    prop::collection::vec(term, 0..3).prop_map(|ts| {
        let ctx = AlgebraCtx::<Q>::symbolic();
        ts.iter().fold(DiffOpElement::zero(&ctx), |a, t| a.add(t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn poly_exact_division_roundtrip(a in poly_strategy(), b in poly_strategy()) {
        prop_assume!(!b.is_zero());
        let p = a.mul(&b);
        let q = p.exact_div(&b);
        prop_assert!(q.is_some());
        prop_assert_eq!(q.unwrap(), a);
    }

    #[test]
    fn ratfunc_field_axioms(a in ratfunc_strategy(), b in ratfunc_strategy(), c in ratfunc_strategy()) {
        prop_assert!(a.add(&b).sub(&b.add(&a)).is_zero());
        prop_assert!(a.add(&b).add(&c).sub(&a.add(&b.add(&c))).is_zero());
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).is_zero());
        prop_assert!(a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c))).is_zero());
        if !b.is_zero() {
            prop_assert!(a.div(&b).unwrap().mul(&b).sub(&a).is_zero());
        }
    }

    #[test]
    fn truncation_is_idempotent_projection(a in ratfunc_strategy(), b in ratfunc_strategy()) {
        // (f)° is linear and idempotent, and kills polynomial parts.
        let ta = a.truncate_proper(U).unwrap();
        prop_assert!(ta.truncate_proper(U).unwrap().sub(&ta).is_zero());
        let tb = b.truncate_proper(U).unwrap();
        let tsum = a.add(&b).truncate_proper(U).unwrap();
        prop_assert!(tsum.sub(&ta.add(&tb)).is_zero());
        // The residue f − (f)° is polynomial in u.
        let (num, den) = a.sub(&ta).numer_denom();
        prop_assert!(!den.contains_var(U), "num {num:?} den {den:?}");
    }

    #[test]
    fn series_coefficients_are_linear(a in ratfunc_strategy(), b in ratfunc_strategy()) {
        let ca = a.laurent_coefficients(U, -5..=-1);
        let cb = b.laurent_coefficients(U, -5..=-1);
        let cs = a.add(&b).laurent_coefficients(U, -5..=-1);
        for k in 0..ca.len() {
            prop_assert!(cs[k].sub(&ca[k].add(&cb[k])).is_zero());
        }
    }

    #[test]
    fn shift_algebra_is_associative(a in element_strategy(), b in element_strategy(), c in element_strategy()) {
        let lhs = a.mul(&b).mul(&c);
        let rhs = a.mul(&b.mul(&c));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn shift_commutation_rule(f in ratfunc_strategy(), e in -2i64..=2) {
        // d^e · f = f(x + eℏ) · d^e on the coordinate the shift touches.
        let ctx = AlgebraCtx::<Q>::symbolic();
        let d = DiffOpElement::d_op(&ctx, 0, 1, e);
        let s = DiffOpElement::scalar(&ctx, f.clone());
        let lhs = d.mul(&s);
        let shifted = f.shift_nodes(
            &std::collections::BTreeMap::from([(X1, e)]),
            &MultiPoly::var(H),
        );
        let rhs = DiffOpElement::scalar(&ctx, shifted).mul(&d);
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn jacobi_identity(a in element_strategy(), b in element_strategy(), c in element_strategy()) {
        let j = a
            .commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(j.is_zero());
    }
}
