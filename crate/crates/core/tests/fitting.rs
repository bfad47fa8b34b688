use bigrade::filtration::{BigradedLengthTable, Provenance};
use bigrade::polyfit::{binom2, fit_bhattacharya, fit_univariate, BhattacharyaCoeffs};
use bigrade::Error;
use proptest::prelude::*;

fn provenance() -> Provenance {
    Provenance {
        prime: 32003,
        order: 0,
        first: vec![],
        second: vec![],
    }
}

proptest! {
    #[test]
    fn univariate_fit_recovers_eventual_polynomial(
        e0 in 1i64..50, e1 in -20i64..40, e2 in -20i64..20,
        onset in 0usize..5, noise in proptest::collection::vec(-5i64..5, 5),
    ) {
        let p = |n: i64| e0 * binom2(n + 1) - e1 * n + e2;
        let values: Vec<i64> = (0..10)
            .map(|n| if n < onset { p(n as i64) + noise[n] } else { p(n as i64) })
            .collect();
        let fit = fit_univariate(&values).unwrap();
        prop_assert_eq!((fit.e0, fit.e1, fit.e2), (e0, e1, e2));
        prop_assert!(fit.onset as usize <= onset);
        for (n, &v) in values.iter().enumerate().skip(fit.onset as usize) {
            prop_assert_eq!(fit.eval(n as i64), v);
        }
    }

    #[test]
    fn bivariate_fit_recovers_coefficients(
        e20 in 1i64..20, e11 in 0i64..20, e02 in 1i64..20,
        e10 in -5i64..10, e01 in -5i64..10, e00 in -5i64..5, d in 0u32..3,
    ) {
        let c = BhattacharyaCoeffs { e20, e11, e02, e10, e01, e00, onset: (0, 0) };
        let values = (0..=8i64)
            .map(|r| (0..=8i64).map(|s| {
                let bump = if (r as u32) < d && (s as u32) < d { 7 } else { 0 };
                (c.eval(r, s) + bump + 1000) as u64
            }).collect())
            .collect();
        let t = BigradedLengthTable::from_values(values, provenance());
        let fit = fit_bhattacharya(&t).unwrap();
        prop_assert_eq!(
            (fit.e20, fit.e11, fit.e02, fit.e10, fit.e01, fit.e00),
            (e20, e11, e02, e10, e01, e00 + 1000)
        );
        prop_assert!(fit.onset.0 <= d);
    }
}

#[test]
fn short_or_broken_sequences_are_unstable() {
    assert!(matches!(fit_univariate(&[0, 1, 3, 6]), Err(Error::FitUnstable(_))));
    // quadratic tail broken two places before the end
    let mut v: Vec<i64> = (0..8).map(|n| binom2(n + 1)).collect();
    v[4] += 1;
    assert!(matches!(fit_univariate(&v), Err(Error::FitUnstable(_))));
}

#[test]
fn bivariate_fit_rejects_non_polynomial_tail() {
    let values = (0..=6u64).map(|r| (0..=6u64).map(|s| r * r * r + s).collect()).collect();
    let t = BigradedLengthTable::from_values(values, provenance());
    assert!(matches!(fit_bhattacharya(&t), Err(Error::FitUnstable(_))));
}
