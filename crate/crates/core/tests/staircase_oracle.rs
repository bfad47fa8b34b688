//! Monomial ideals checked against an integer staircase model that never touches
//! linear algebra.

use std::collections::BTreeSet;

mod common;

use bigrade::algebra::{LocalIdeal, TruncatedAlgebra};
use bigrade::filtration::BiFiltration;
use bigrade::linalg::PrimeField;
use common::Staircase;
use proptest::prelude::*;

fn algebra() -> TruncatedAlgebra {
    TruncatedAlgebra::new(PrimeField::default(), 120)
}

fn engine(s: &Staircase) -> LocalIdeal {
    LocalIdeal::from_generators(&algebra().parse_generators(&s.text()).unwrap()).unwrap()
}

fn assert_same(k: &LocalIdeal, s: &Staircase, what: &str) {
    assert_eq!(k.colength().unwrap(), s.colength(), "{what}: colength of {}", s.text());
    let std: BTreeSet<(u32, u32)> = k.standard_monomials().into_iter().collect();
    assert_eq!(std, s.standard(), "{what}: staircase of {}", s.text());
    assert!(k.ideal_eq(&engine(s)).unwrap(), "{what}: ideal differs from {}", s.text());
}

fn staircase() -> impl Strategy<Value = Staircase> {
    (1u32..=6, 1u32..=6, proptest::collection::vec((0u32..6, 0u32..6), 0..4)).prop_map(|(a, b, inner)| {
        let mut gens = vec![(a, 0), (0, b)];
        gens.extend(inner.into_iter().filter(|&(i, j)| i + j > 0));
        Staircase::new(gens)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn colength_matches(s in staircase()) {
        assert_same(&engine(&s), &s, "input");
        prop_assert_eq!(engine(&s).minimal_number_of_generators(), s.0.len());
    }

    #[test]
    fn binary_operations_match(s in staircase(), t in staircase()) {
        let (k, l) = (engine(&s), engine(&t));
        assert_same(&k.product(&l).unwrap(), &s.product(&t), "product");
        assert_same(&k.intersect(&l).unwrap(), &s.intersect(&t), "intersection");
        assert_same(&k.sum(&l).unwrap(), &s.sum(&t), "sum");
        assert_same(&k.colon_ideal(&l).unwrap(), &s.colon(&t), "ideal colon");
    }

    #[test]
    fn monomial_colon_matches(s in staircase(), a in 0u32..5, b in 0u32..5) {
        let f = algebra().monomial(a, b);
        assert_same(&engine(&s).colon_element(&f).unwrap(), &s.colon_monomial((a, b)), "element colon");
    }

    #[test]
    fn powers_match(s in staircase(), n in 0u32..4) {
        assert_same(&engine(&s).power(n).unwrap(), &s.power(n), "power");
    }
}

#[test]
fn filtration_table_matches_staircase_products() {
    let pairs = [
        ("x^2, x*y, y^2", "x^2, y^2"),
        ("x^4, x^3*y, x*y^3, y^4", "x, y"),
        ("x^3, x*y, y^2", "x^2, y^5"),
    ];
    for (i, j) in pairs {
        let (si, sj) = (Staircase::parse(i), Staircase::parse(j));
        let f = BiFiltration::new(engine(&si), engine(&sj));
        let table = f.length_table(5, 5).unwrap();
        for r in 0..=5 {
            for s in 0..=5 {
                let want = si.power(r).product(&sj.power(s)).colength();
                assert_eq!(table.get(r, s), want, "({r},{s}) for {i} | {j}");
            }
        }
    }
}

#[test]
fn oracle_sanity() {
    let m = Staircase::new([(1, 0), (0, 1)]);
    assert_eq!(m.power(3).colength(), 6);
    let k = Staircase::new([(4, 0), (3, 1), (1, 3), (0, 4)]);
    assert_eq!(k.colength(), 11);
    assert!(!k.contains((2, 2)));
    assert!(k.power(2).colon(&Staircase::new([(4, 0), (0, 4)])).contains((2, 2)));
}
