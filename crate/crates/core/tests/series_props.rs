use proptest::prelude::*;

use fractal_core::params::{
    classify_regime, diagnose, growth_ratios, ClassTag, ParamPoint, Regime,
};
use fractal_core::series::{
    area_at_additive, area_at_subtractive, area_limit, perimeter_at, AdditiveAreaBasis, AreaLimit,
};
use fractal_core::{QuadExt, Rat};
use num_bigint::BigInt;

fn scale() -> impl Strategy<Value = Rat> {
    (2i64..=30, 1i64..=6)
        .prop_map(|(n, d)| Rat::new(n, d))
        .prop_filter("r > 1", |r| *r > Rat::one())
}

fn positive_quad() -> impl Strategy<Value = QuadExt> {
    (1i64..=20, 1i64..=9, 0i64..=5, 1i64..=9)
        .prop_map(|(a, ad, b, bd)| QuadExt::new(Rat::new(a, ad), Rat::new(b, bd)))
}

fn params() -> impl Strategy<Value = ParamPoint> {
    (
        1u64..=200,
        scale(),
        prop_oneof![Just(ClassTag::Additive), Just(ClassTag::Subtractive)],
    )
        .prop_map(|(n, r, c)| ParamPoint::new(n, r, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn recurrences(p in params(), p0 in positive_quad(), n in 0u32..12) {
        let g = growth_ratios(&p);
        prop_assert_eq!(&g.beta * p.scale(), g.alpha.clone());
        prop_assert_eq!(perimeter_at(&p, &p0, n + 1), perimeter_at(&p, &p0, n).scale(&g.alpha));
        prop_assert_eq!(
            area_at_subtractive(&p0, &g.beta, n + 1),
            area_at_subtractive(&p0, &g.beta, n).scale(&g.beta)
        );
    }

    #[test]
    fn additive_partial_sums(a0 in positive_quad(), c in positive_quad(), p in params(), n in 0u32..12) {
        let beta = growth_ratios(&p).beta;
        let basis = AdditiveAreaBasis::new(a0.clone(), c.clone(), beta.clone()).unwrap();
        let step = &area_at_additive(&basis, n + 1) - &area_at_additive(&basis, n);
        prop_assert_eq!(step, c.scale(&beta.pow(n)));

        // Term-by-term sum.
        let mut sum = a0.clone();
        let mut term = c.clone();
        for _ in 0..n {
            sum += &term;
            term = term.scale(&beta);
        }
        prop_assert_eq!(area_at_additive(&basis, n), sum);

        if beta < Rat::one() {
            let p = p.with_class(ClassTag::Additive);
            let AreaLimit::Finite(Some(limit)) = area_limit(&p, Some(&basis)) else {
                return Err(TestCaseError::fail("expected a finite limit"));
            };
            let gap = |k| &limit - &area_at_additive(&basis, k);
            let expected = c.scale(&(&beta.pow(n) / &(&Rat::one() - &beta)));
            prop_assert_eq!(gap(n), expected);
            prop_assert!(gap(n + 1) < gap(n));
        }
    }

    #[test]
    fn class_changes_only_the_area(p in params()) {
        let a = diagnose(&p.with_class(ClassTag::Additive), None);
        let s = diagnose(&p.with_class(ClassTag::Subtractive), None);
        prop_assert_eq!(&a.ratios, &s.ratios);
        prop_assert_eq!(a.dimension.to_bits(), s.dimension.to_bits());
        prop_assert_eq!(a.regime, s.regime);
        prop_assert_eq!(a.perimeter, s.perimeter);
    }

    #[test]
    fn scale_representation_is_irrelevant(n in 1u64..100, num in 2i64..40, den in 1i64..7, k in 2i64..9) {
        prop_assume!(num > den);
        let canonical = Rat::new(num, den);
        let inflated = Rat::from_bigints(BigInt::from(num * k), BigInt::from(den * k)).unwrap();
        let a = diagnose(&ParamPoint::new(n, canonical, ClassTag::Additive).unwrap(), None);
        let b = diagnose(&ParamPoint::new(n, inflated, ClassTag::Additive).unwrap(), None);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn regime_matches_dimension(p in params()) {
        // Boundaries are exact; away from them the float agrees.
        let d = fractal_core::params::similarity_dimension(&p);
        let regime = classify_regime(&p);
        let n = Rat::from(BigInt::from(p.n_pieces()));
        let r = p.scale().clone();
        if n != r && n != &r * &r {
            let expected = if d < 1.0 {
                Regime::Subcritical
            } else if d < 2.0 {
                Regime::Intermediate
            } else {
                Regime::Supercritical
            };
            prop_assert_eq!(regime, expected);
        }
    }
}

#[test]
fn integer_grid_regimes() {
    for r in 2..=12i64 {
        for n in 1..=150u64 {
            let p = ParamPoint::new(n, Rat::from_integer(r), ClassTag::Additive).unwrap();
            let intermediate = (n as i64) > r && (n as i64) < r * r;
            assert_eq!(
                classify_regime(&p) == Regime::Intermediate,
                intermediate,
                "({n},{r})"
            );
        }
    }
}
