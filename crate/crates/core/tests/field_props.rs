mod common;

use common::{close, complex_value, cyclo, field};
use fermat_core::field::CycloNum;
use proptest::prelude::*;

fn check_axioms(a: &CycloNum, b: &CycloNum, c: &CycloNum) {
    assert_eq!(a + b, b + a);
    assert_eq!(a * b, b * a);
    assert_eq!(&(a + b) + c, a + &(b + c));
    assert_eq!(&(a * b) * c, a * &(b * c));
    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    assert_eq!(&(a - b) + b, a.clone());
    if !a.is_zero() {
        assert!((a * &a.inv().unwrap()).is_one());
        assert_eq!((b * a).checked_div(a).unwrap(), b.clone());
    }
}

fn check_against_complex(a: &CycloNum, b: &CycloNum) {
    let (va, vb) = (complex_value(a), complex_value(b));
    let prod = (va.0 * vb.0 - va.1 * vb.1, va.0 * vb.1 + va.1 * vb.0);
    assert!(close(complex_value(&(a * b)), prod));
    assert!(close(complex_value(&(a + b)), (va.0 + vb.0, va.1 + vb.1)));
}

macro_rules! field_suite {
    ($name:ident, $k:expr) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn $name((a, b, c) in (cyclo(field($k)), cyclo(field($k)), cyclo(field($k)))) {
                check_axioms(&a, &b, &c);
                check_against_complex(&a, &b);
            }
        }
    };
}

field_suite!(axioms_rationals, 1);
field_suite!(axioms_gaussian, 4);
field_suite!(axioms_conductor_12, 12);

#[test]
fn zeta_order_matches_conductor() {
    for k in [1u32, 2, 3, 4, 5, 6, 8, 12] {
        let f = field(k);
        let z = CycloNum::zeta(&f);
        assert!(z.pow(u64::from(k)).is_one());
        for d in 1..k {
            assert!(!z.pow(u64::from(d)).is_one(), "k={k} d={d}");
        }
    }
}
