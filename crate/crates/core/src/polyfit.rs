//! Exact fitting of eventually-polynomial length functions in the binomial basis.
//!
//! In the basis `C(n+1,2), n, 1` (and its bivariate analogue) a polynomial that
//! takes integer values on the integers has integer coefficients, so every fit
//! through integer data is solved exactly with finite differences in `i64`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::LocalIdeal;
use crate::error::{Error, Result};
use crate::filtration::{BiFiltration, BigradedLengthTable};

/// Points beyond the interpolation nodes that must agree before a fit is accepted.
pub const VERIFICATION_BAND: usize = 2;

pub fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// `P(n) = e0·C(n+1,2) − e1·n + e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnivariateFit {
    pub e0: i64,
    pub e1: i64,
    pub e2: i64,
    /// Least index from which the sequence agrees with the polynomial inside the window.
    pub onset: u32,
}

impl UnivariateFit {
    pub fn eval(&self, n: i64) -> i64 {
        self.e0 * binom2(n + 1) - self.e1 * n + self.e2
    }
}

/// Interpolates the last three values and scans backwards for the onset.
pub fn fit_univariate(values: &[i64]) -> Result<UnivariateFit> {
    let len = values.len();
    if len < 3 + VERIFICATION_BAND {
        return Err(Error::FitUnstable(format!(
            "need at least {} values, got {len}",
            3 + VERIFICATION_BAND
        )));
    }
    let n = (len - 3) as i64;
    let (p0, p1, p2) = (values[len - 3], values[len - 2], values[len - 1]);
    let e0 = p2 - 2 * p1 + p0;
    // P(n+1) − P(n) = e0·(n+1) − e1
    let e1 = e0 * (n + 1) - (p1 - p0);
    let e2 = p0 - e0 * binom2(n + 1) + e1 * n;
    let mut fit = UnivariateFit { e0, e1, e2, onset: 0 };
    let agrees = |i: usize| fit.eval(i as i64) == values[i];
    for i in (len - 3 - VERIFICATION_BAND)..(len - 3) {
        if !agrees(i) {
            return Err(Error::FitUnstable(format!(
                "value at index {i} disagrees with the tail polynomial"
            )));
        }
    }
    let mut onset = len - 3 - VERIFICATION_BAND;
    while onset > 0 && agrees(onset - 1) {
        onset -= 1;
    }
    fit.onset = onset as u32;
    Ok(fit)
}

/// Hilbert coefficients of an m-primary ideal: `λ(R/K^n) = e0·C(n+1,2) − e1·n + e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HilbertCoeffs {
    pub e0: i64,
    pub e1: i64,
    pub e2: i64,
    pub onset: u32,
}

impl From<UnivariateFit> for HilbertCoeffs {
    fn from(f: UnivariateFit) -> Self {
        HilbertCoeffs {
            e0: f.e0,
            e1: f.e1,
            e2: f.e2,
            onset: f.onset,
        }
    }
}

/// Colengths of `K^0, ..., K^n_max`.
pub fn power_lengths(k: &LocalIdeal, n_max: u32) -> Result<Vec<i64>> {
    let mut out = vec![0i64];
    let mut acc = LocalIdeal::unit(&k.algebra());
    for _ in 0..n_max {
        acc = acc.product(k)?;
        out.push(acc.colength()? as i64);
    }
    Ok(out)
}

pub fn fit_hilbert(k: &LocalIdeal, n_max: u32) -> Result<HilbertCoeffs> {
    let fit = fit_univariate(&power_lengths(k, n_max)?)?;
    if fit.e0 < 1 {
        return Err(Error::FitUnstable(format!("non-positive multiplicity {}", fit.e0)));
    }
    Ok(fit.into())
}

/// `P(r,s) = e20·C(r+1,2) + e11·r·s + e02·C(s+1,2) − e10·r − e01·s + e00`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BhattacharyaCoeffs {
    pub e20: i64,
    pub e11: i64,
    pub e02: i64,
    pub e10: i64,
    pub e01: i64,
    pub e00: i64,
    /// Corner `(d, d)` from which `T(r,s) = P(r,s)` on the rest of the window.
    pub onset: (u32, u32),
}

impl BhattacharyaCoeffs {
    pub fn eval(&self, r: i64, s: i64) -> i64 {
        self.e20 * binom2(r + 1) + self.e11 * r * s + self.e02 * binom2(s + 1) - self.e10 * r - self.e01 * s + self.e00
    }
}

/// Solves the six coefficients from the 3×3 corner at `(r_max, s_max)` and verifies
/// them on the tail rectangle widened by the verification band.
pub fn fit_bhattacharya(t: &BigradedLengthTable) -> Result<BhattacharyaCoeffs> {
    let (rm, sm) = (t.r_max() as i64, t.s_max() as i64);
    let need = (2 + VERIFICATION_BAND) as i64;
    if rm < need || sm < need {
        return Err(Error::FitUnstable(format!(
            "window {rm}x{sm} too small for a bivariate fit"
        )));
    }
    let v = |r: i64, s: i64| t.get(r as u32, s as u32) as i64;
    let (r, s) = (rm - 1, sm - 1);
    let e20 = v(r + 1, s) - 2 * v(r, s) + v(r - 1, s);
    let e02 = v(r, s + 1) - 2 * v(r, s) + v(r, s - 1);
    let e11 = v(r + 1, s + 1) - v(r, s + 1) - v(r + 1, s) + v(r, s);
    // forward differences at (r, s): ΔrP = e20(r+1) + e11 s − e10
    let e10 = e20 * (r + 1) + e11 * s - (v(r + 1, s) - v(r, s));
    let e01 = e02 * (s + 1) + e11 * r - (v(r, s + 1) - v(r, s));
    let e00 = v(r, s) - e20 * binom2(r + 1) - e11 * r * s - e02 * binom2(s + 1) + e10 * r + e01 * s;
    let mut c = BhattacharyaCoeffs {
        e20,
        e11,
        e02,
        e10,
        e01,
        e00,
        onset: (0, 0),
    };
    let agrees_on = |r0: i64, s0: i64| (r0..=rm).all(|r| (s0..=sm).all(|s| c.eval(r, s) == v(r, s)));
    if !agrees_on(rm - need, sm - need) {
        return Err(Error::FitUnstable("bivariate tail disagrees with the corner fit".into()));
    }
    // smallest diagonal corner (d, d) with agreement on the whole quadrant;
    // falls back to the verified tail corner when no diagonal corner works
    c.onset = match (0..=(rm.min(sm) - need)).find(|&d| agrees_on(d, d)) {
        Some(d) => (d as u32, d as u32),
        None => ((rm - need) as u32, (sm - need) as u32),
    };
    Ok(c)
}

/// One fixed-index row: `T = e0·C(n+1,2) − first·n + second` for large `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowFit {
    pub first: i64,
    pub second: i64,
    pub onset: u32,
}

/// `g1, g2` (fits in s for fixed r) and `h1, h2` (fits in r for fixed s).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowFits {
    pub g: Vec<RowFit>,
    pub h: Vec<RowFit>,
}

impl RowFits {
    pub fn g1(&self, r: u32) -> i64 {
        self.g[r as usize].first
    }
    pub fn g2(&self, r: u32) -> i64 {
        self.g[r as usize].second
    }
    pub fn h1(&self, s: u32) -> i64 {
        self.h[s as usize].first
    }
    pub fn h2(&self, s: u32) -> i64 {
        self.h[s as usize].second
    }
}

pub fn fit_rows(t: &BigradedLengthTable, e_first: i64, e_second: i64) -> Result<RowFits> {
    let one = |values: Vec<i64>, lead: i64, what: &str| -> Result<RowFit> {
        let f = fit_univariate(&values).map_err(|e| Error::FitUnstable(format!("{what}: {e}")))?;
        if f.e0 != lead {
            return Err(Error::FitUnstable(format!(
                "{what}: leading coefficient {} differs from multiplicity {lead}",
                f.e0
            )));
        }
        Ok(RowFit {
            first: f.e1,
            second: f.e2,
            onset: f.onset,
        })
    };
    let g = (0..=t.r_max())
        .map(|r| one(t.row(r), e_second, &format!("row r={r}")))
        .collect::<Result<_>>()?;
    let h = (0..=t.s_max())
        .map(|s| one(t.column(s), e_first, &format!("column s={s}")))
        .collect::<Result<_>>()?;
    Ok(RowFits { g, h })
}

/// Every coefficient the engine reports for a pair, with the identities linking them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientReport {
    pub bhattacharya: BhattacharyaCoeffs,
    pub hilbert_i: HilbertCoeffs,
    pub hilbert_j: HilbertCoeffs,
    pub hilbert_ij: HilbertCoeffs,
    pub rows: RowFits,
    pub checks: BTreeMap<String, bool>,
}

impl CoefficientReport {
    /// Fits everything from the table and from separately computed powers of
    /// `I`, `J` and `IJ`; fails with `ConsistencyFailure` naming any violated identity.
    pub fn compute(f: &BiFiltration, t: &BigradedLengthTable, n_max: u32) -> Result<Self> {
        let b = fit_bhattacharya(t)?;
        let hi = fit_hilbert(f.first(), n_max)?;
        let hj = fit_hilbert(f.second(), n_max)?;
        let ij = f.first().product(f.second())?;
        let hij = fit_hilbert(&ij, n_max)?;
        let rows = fit_rows(t, hi.e0, hj.e0)?;
        let report = Self::assemble(b, hi, hj, hij, rows);
        if let Some((name, _)) = report.checks.iter().find(|(_, ok)| !**ok) {
            return Err(Error::ConsistencyFailure(name.clone()));
        }
        Ok(report)
    }

    pub fn assemble(
        b: BhattacharyaCoeffs,
        hi: HilbertCoeffs,
        hj: HilbertCoeffs,
        hij: HilbertCoeffs,
        rows: RowFits,
    ) -> Self {
        let mut checks = BTreeMap::new();
        let mut check = |name: &str, ok: bool| {
            checks.insert(name.to_string(), ok);
        };
        check("e20 = e(I)", b.e20 == hi.e0);
        check("e02 = e(J)", b.e02 == hj.e0);
        check("2 e11 = e(IJ) - e(I) - e(J)", 2 * b.e11 == hij.e0 - hi.e0 - hj.e0);
        check("e00 = e2(IJ)", b.e00 == hij.e2);
        check("g1(0) = e1(J)", rows.g1(0) == hj.e1);
        check("h1(0) = e1(I)", rows.h1(0) == hi.e1);
        check("g2(0) = e2(J)", rows.g2(0) == hj.e2);
        check("h2(0) = e2(I)", rows.h2(0) == hi.e2);
        let r_last = rows.g.len() as u32 - 1;
        let s_last = rows.h.len() as u32 - 1;
        check(
            "g1(r) = e01 - e11 r at window end",
            rows.g1(r_last) == b.e01 - b.e11 * r_last as i64,
        );
        check(
            "h1(s) = e10 - e11 s at window end",
            rows.h1(s_last) == b.e10 - b.e11 * s_last as i64,
        );
        CoefficientReport {
            bhattacharya: b,
            hilbert_i: hi,
            hilbert_j: hj,
            hilbert_ij: hij,
            rows,
            checks,
        }
    }

    /// `e01 − g1(r) − r·e11`, non-negative for every r.
    pub fn slope_part_first(&self, r: u32) -> i64 {
        self.bhattacharya.e01 - self.rows.g1(r) - r as i64 * self.bhattacharya.e11
    }

    /// `e10 − h1(s) − s·e11`, non-negative for every s.
    pub fn slope_part_second(&self, s: u32) -> i64 {
        self.bhattacharya.e10 - self.rows.h1(s) - s as i64 * self.bhattacharya.e11
    }

    /// `α(i) = g1(i+1) − g1(i) + e11`.
    pub fn alpha_from_fits(&self, i: u32) -> Option<i64> {
        let g = &self.rows.g;
        ((i as usize + 1) < g.len()).then(|| g[i as usize + 1].first - g[i as usize].first + self.bhattacharya.e11)
    }

    /// `β(j) = h1(j+1) − h1(j) + e11`.
    pub fn beta_from_fits(&self, j: u32) -> Option<i64> {
        let h = &self.rows.h;
        ((j as usize + 1) < h.len()).then(|| h[j as usize + 1].first - h[j as usize].first + self.bhattacharya.e11)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let b = &self.bhattacharya;
        let hilbert = |h: &HilbertCoeffs| serde_json::json!({"e0": h.e0, "e1": h.e1, "e2": h.e2, "onset": h.onset});
        let rows = |v: &[RowFit], a: &str, c: &str| -> serde_json::Value {
            v.iter()
                .enumerate()
                .map(|(n, f)| serde_json::json!({"index": n, a: f.first, c: f.second, "onset": f.onset}))
                .collect()
        };
        serde_json::json!({
            "bhattacharya": {
                "e20": b.e20, "e11": b.e11, "e02": b.e02,
                "e10": b.e10, "e01": b.e01, "e00": b.e00,
                "onset": [b.onset.0, b.onset.1],
            },
            "hilbert": {
                "I": hilbert(&self.hilbert_i),
                "J": hilbert(&self.hilbert_j),
                "IJ": hilbert(&self.hilbert_ij),
            },
            "row_functions": {
                "g": rows(&self.rows.g, "g1", "g2"),
                "h": rows(&self.rows.h, "h1", "h2"),
            },
            "checks": self.checks,
            "onsets_note": "onsets are observed within the window, not certified bounds",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_examples() {
        let m: Vec<i64> = (0..8).map(|n| binom2(n + 1)).collect();
        let f = fit_univariate(&m).unwrap();
        assert_eq!((f.e0, f.e1, f.e2, f.onset), (1, 0, 0, 0));
        let m2: Vec<i64> = (0..8).map(|n| binom2(2 * n + 1)).collect();
        let f = fit_univariate(&m2).unwrap();
        assert_eq!((f.e0, f.e1, f.e2), (4, 1, 0));
        let ci: Vec<i64> = (0..8).map(|n| 4 * binom2(n + 1)).collect();
        assert_eq!(fit_univariate(&ci).unwrap().e1, 0);
    }

    #[test]
    fn onset_and_instability() {
        // polynomial from n = 3 on
        let mut v: Vec<i64> = (0..9).map(|n| 3 * binom2(n + 1) - 2 * n + 5).collect();
        v[0] = 0;
        v[2] = 11;
        let f = fit_univariate(&v).unwrap();
        assert_eq!((f.e0, f.e1, f.e2, f.onset), (3, 2, 5, 3));
        let cubic: Vec<i64> = (0..8).map(|n| n * n * n).collect();
        assert!(matches!(fit_univariate(&cubic), Err(Error::FitUnstable(_))));
        assert!(fit_univariate(&[0, 1, 3, 6]).is_err());
    }
}
