mod common;

use proptest::prelude::*;

use common::{big, exact_sign, interval_sign};

use fractal_core::{QuadExt, Rat};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rat::new(n, d))
}

/// Numerators and denominators big enough to force the arbitrary-precision path.
fn wide_rat() -> impl Strategy<Value = Rat> {
    (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rat::new(n, d))
}

fn any_rat() -> impl Strategy<Value = Rat> {
    prop_oneof![small_rat(), wide_rat()]
}

fn quad() -> impl Strategy<Value = QuadExt> {
    (any_rat(), any_rat()).prop_map(|(a, b)| QuadExt::new(a, b))
}

fn small_quad() -> impl Strategy<Value = QuadExt> {
    (small_rat(), small_rat()).prop_map(|(a, b)| QuadExt::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rat_matches_bigrational(x in any_rat(), y in any_rat()) {
        prop_assert_eq!(big(&(&x + &y)), big(&x) + big(&y));
        prop_assert_eq!(big(&(&x - &y)), big(&x) - big(&y));
        prop_assert_eq!(big(&(&x * &y)), big(&x) * big(&y));
        if !y.is_zero() {
            prop_assert_eq!(big(&(&x / &y)), big(&x) / big(&y));
        }
        prop_assert_eq!(x.cmp(&y), big(&x).cmp(&big(&y)));
    }

    #[test]
    fn rat_text_round_trip(x in any_rat()) {
        let back: Rat = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn field_axioms(x in quad(), y in quad(), z in quad()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &QuadExt::zero(), x.clone());
        prop_assert_eq!(&x * &QuadExt::one(), x.clone());
        prop_assert_eq!(&x + &(-&x), QuadExt::zero());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inverse().unwrap(), QuadExt::one());
        } else {
            prop_assert!(x.inverse().is_err());
        }
    }

    #[test]
    fn quad_text_round_trip(x in quad()) {
        let back: QuadExt = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn order_is_compatible_with_addition(x in small_quad(), y in small_quad(), z in small_quad()) {
        prop_assert_eq!(x.cmp(&y), (&x + &z).cmp(&(&y + &z)));
        prop_assert_eq!(x.cmp(&y) == std::cmp::Ordering::Less, (&y - &x).sign() > 0);
    }

    #[test]
    fn floor_brackets_value(x in quad()) {
        let f = QuadExt::from(Rat::from(x.floor()));
        prop_assert!(f <= x);
        prop_assert!(x < &f + &QuadExt::one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sign_agrees_with_interval_oracle(x in quad()) {
        let expected = interval_sign(&x).unwrap_or_else(|| exact_sign(&x));
        prop_assert_eq!(x.sign(), expected);
    }
}

#[test]
fn convergents_of_sqrt3() {
    // 97/56 overshoots √3 by about 1e-4; 1351/780 by about 5e-7.
    let x = QuadExt::new(Rat::new(97, 56), Rat::from_integer(-1));
    assert_eq!(x.sign(), 1);
    assert_eq!(interval_sign(&x), Some(1));
    let y = QuadExt::new(Rat::new(-1351, 780), Rat::one());
    assert_eq!(y.sign(), -1);
    assert_eq!(exact_sign(&y), -1);
}
