//! Field laws of `Rational` and reproducibility of `RngStream`.

use learnaug_core::{Rational, RngStream};
use proptest::prelude::*;

fn small() -> impl Strategy<Value = Rational> {
    (-1000i128..1000, 1i128..200).prop_map(|(n, d)| Rational::frac(n, d))
}

proptest! {
    #[test]
    fn field_laws(a in small(), b in small(), c in small()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, Rational::ZERO);
        if !b.is_zero() {
            prop_assert_eq!(a / b * b, a);
        }
    }

    #[test]
    fn order_matches_cross_multiplication(a in small(), b in small()) {
        let lhs = a.numer() * b.denom();
        let rhs = b.numer() * a.denom();
        prop_assert_eq!(a.cmp(&b), lhs.cmp(&rhs));
        prop_assert!(Rational::from(a.floor() as i64) <= a);
        prop_assert!(a < Rational::from(a.floor() as i64 + 1));
    }

    #[test]
    fn text_round_trip(a in small()) {
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), a);
    }

    #[test]
    fn streams_replay(seed in any::<u64>(), stream in 0u64..64) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        for n in 1..50usize {
            prop_assert_eq!(a.uniform_index(n).unwrap(), b.uniform_index(n).unwrap());
        }
        let mut v: Vec<u32> = (0..20).collect();
        RngStream::new(seed, stream).shuffle(&mut v);
        v.sort_unstable();
        prop_assert_eq!(v, (0..20).collect::<Vec<_>>());
    }
}

#[test]
fn overflow_is_reported() {
    let big = Rational::from(i64::MAX);
    let huge = big.checked_mul(big).unwrap().checked_mul(big);
    assert!(huge.is_err());
    assert!(Rational::ZERO.recip().is_err());
}

#[test]
fn distinct_streams_diverge() {
    let draw = |s| {
        let mut r = RngStream::new(1, s);
        (0..16).map(|_| r.uniform_index(1 << 20).unwrap()).collect::<Vec<_>>()
    };
    assert_ne!(draw(0), draw(1));
}
