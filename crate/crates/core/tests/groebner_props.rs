mod common;

use common::*;
use pathmoment::{kernel_groebner, left_divides, right_groebner, Element, RightGroebnerBasis, Scalar};
use proptest::prelude::*;

fn assert_reduced(gb: &RightGroebnerBasis) {
    let order = gb.order();
    let tips: Vec<_> = gb.tips().into_iter().cloned().collect();
    for (i, g) in gb.elements().iter().enumerate() {
        let (tip, c) = g.tip(order).unwrap();
        assert!(c.is_one());
        for (j, t) in tips.iter().enumerate() {
            if i != j {
                assert!(left_divides(t, tip).is_none(), "tips overlap");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn groebner_of_random_generators(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alg = loop1();
        let gens: Vec<Element> = (0..3).map(|_| random_element(&alg.double, &mut r, 3, 3, true)).collect();
        let gb = right_groebner(&gens, &alg.order);
        assert_reduced(&gb);
        prop_assert_eq!(right_groebner(&gens, &alg.order), gb.clone());
        // generators reduce to zero
        for g in &gens {
            prop_assert!(gb.normal_form(g).is_zero());
        }
        let f = random_element(&alg.double, &mut r, 5, 4, true);
        let h = random_element(&alg.double, &mut r, 5, 4, true);
        let c = random_scalar(&mut r, true, 3);
        let nf = gb.normal_form(&f);
        prop_assert_eq!(gb.normal_form(&nf), nf.clone());
        prop_assert!(nf.support().all(|p| !gb.is_reducible(p)));
        prop_assert_eq!(
            gb.normal_form(&(&f.scale(&c) + &h)),
            &gb.normal_form(&f).scale(&c) + &gb.normal_form(&h)
        );
        // random members of the right ideal reduce to zero
        let mut member = Element::zero();
        for g in &gens {
            member = &member + &(g * &random_element(&alg.double, &mut r, 3, 2, true));
        }
        prop_assert!(gb.normal_form(&member).is_zero());
    }

    #[test]
    fn kernel_groebner_is_sound(seed in any::<u64>(), trivial in any::<bool>()) {
        let mut r = rng(seed);
        for (alg, k) in [(a2(), 2), (loop1(), 2)] {
            for (_, l) in flat_homs(&alg, k, trivial, 2, &mut r, 2) {
                let gb = kernel_groebner(&l).unwrap();
                assert_reduced(&gb);
                let window = l.basis(k);
                for g in gb.elements() {
                    prop_assert!(g.degree().unwrap() <= k);
                    for q in &window {
                        prop_assert_eq!(l.riesz_eval(&g.mul_path(&q.star())).unwrap(), Scalar::zero());
                    }
                }
                for g in l.kernel_basis().unwrap() {
                    prop_assert!(gb.normal_form(&g).is_zero());
                }
                // flatness: every window path reduces below the top degree
                for p in &window {
                    let d = gb.normal_form(&Element::from_path(p.clone())).degree();
                    prop_assert!(d.is_none_or(|d| d < k));
                }
            }
        }
    }
}

#[test]
fn proper_prefix_reduction() {
    let alg = loop1();
    let gens = [el(&alg, &[("x x", 1), ("x*", -1)]), el(&alg, &[("x x x", 1)])];
    let gb = right_groebner(&gens, &alg.order);
    assert_reduced(&gb);
    let names: Vec<String> = gb.elements().iter().map(|g| g.format(&alg.double, &alg.order)).collect();
    assert_eq!(names, ["x x - x*", "x* x"]);
}
