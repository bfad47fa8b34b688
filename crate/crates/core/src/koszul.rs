//! Lengths attached to the modified Koszul complex on `(a^k, b^k)`: its homology,
//! the quotients `L(r,s;k)`, Ratliff–Rush closures along a pair, and the
//! finite/infinite classification of the graded pieces of `H²`.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::algebra::LocalIdeal;
use crate::error::{Error, Result};
use crate::filtration::{BiFiltration, BigradedLengthTable};
use crate::joint_reduction::Pair;
use crate::polyfit::CoefficientReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HomologyLengths {
    pub r: u32,
    pub s: u32,
    pub k: u32,
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
    pub l_length: u64,
    /// `λ(R/(a^k, b^k))`.
    pub colength_pair: u64,
}

/// `(I^{r+k} J^s : a^k) ∩ (I^r J^{s+k} : b^k)`.
pub fn colon_chain_member(pair: &Pair, f: &BiFiltration, r: u32, s: u32, k: u32) -> Result<LocalIdeal> {
    let p = pair.power(k)?;
    let ca = f.power_product(r + k, s)?.colon_element(&p.a)?;
    let cb = f.power_product(r, s + k)?.colon_element(&p.b)?;
    ca.intersect(&cb)
}

/// Homology lengths of the complex at `(r, s; k)` from the closed-form quotients,
/// checked against the alternating-sum identity `h0 − h1 = k² e11 − λ(L)`.
pub fn homology_lengths(pair: &Pair, f: &BiFiltration, r: u32, s: u32, k: u32, e11: i64) -> Result<HomologyLengths> {
    let p = pair.power(k)?;
    let top = f.power_product(r + k, s + k)?;
    let q = &p.ideal;
    let h0 = top.sum(q)?.colength()?;
    let d = pair.denominator(f, r, s, k)?;
    let (ld, lt) = (d.colength()?, top.colength()?);
    let lq_cap = q.intersect(&top)?.colength()?;
    let h1 = ld
        .checked_sub(lq_cap)
        .ok_or_else(|| Error::InternalIdentityFailure(format!("H1 numerator smaller than denominator at ({r},{s};{k})")))?;
    let base = f.power_product(r, s)?;
    let h2 = base.colength()? - colon_chain_member(pair, f, r, s, k)?.colength()?;
    let l_length = ld - lt;
    let colength_pair = q.colength()?;
    let lhs = h0 as i64 - h1 as i64;
    let rhs = (k * k) as i64 * e11 - l_length as i64;
    if lhs != rhs {
        return Err(Error::InternalIdentityFailure(format!(
            "alternating sum at ({r},{s};{k}): h0 - h1 = {lhs}, k^2 e11 - λ(L) = {rhs}"
        )));
    }
    Ok(HomologyLengths {
        r,
        s,
        k,
        h0,
        h1,
        h2,
        l_length,
        colength_pair,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatliffRush {
    pub r: u32,
    pub s: u32,
    /// `λ(rr/I^r J^s)`.
    pub length: u64,
    /// First `k` from which the chain was constant through `k + 2`.
    pub stable_from: u32,
    /// `λ(member_k / I^r J^s)` for `k = 1, 2, ...` as computed.
    pub chain: Vec<u64>,
    pub generators: Vec<String>,
}

/// The Ratliff–Rush closure of `(I^r, J^s)` along the pair.
pub fn ratliff_rush(pair: &Pair, f: &BiFiltration, r: u32, s: u32, k_max: u32) -> Result<(LocalIdeal, RatliffRush)> {
    let base = f.power_product(r, s)?.colength()?;
    let mut members: Vec<LocalIdeal> = Vec::new();
    let mut chain = Vec::new();
    let limit = 2 * k_max.max(3);
    for k in 1..=limit {
        let m = colon_chain_member(pair, f, r, s, k)?;
        chain.push(base - m.colength()?);
        members.push(m);
        let n = members.len();
        if n >= 3 && members[n - 3] == members[n - 2] && members[n - 2] == members[n - 1] {
            let ideal = members.swap_remove(n - 3);
            let info = RatliffRush {
                r,
                s,
                length: chain[n - 3],
                stable_from: (n - 2) as u32,
                chain,
                generators: ideal.generators().iter().map(|g| g.to_string()).collect(),
            };
            return Ok((ideal, info));
        }
    }
    Err(Error::StabilizationNotReached { k_max: limit })
}

/// `λ(L(i,s;1))` over a band of `s`, required to be constant (the s-independence
/// of the first Koszul quotient along a row).
pub fn row_band_length(pair: &Pair, f: &BiFiltration, i: u32, band: RangeInclusive<u32>, by_row: bool) -> Result<(u64, bool)> {
    let vals = band
        .map(|t| if by_row { pair.l_length(f, i, t, 1) } else { pair.l_length(f, t, i, 1) })
        .collect::<Result<Vec<_>>>()?;
    let constant = vals.windows(2).all(|w| w[0] == w[1]);
    Ok((*vals.last().unwrap(), constant))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlphaValue {
    pub index: u32,
    pub from_fits: i64,
    pub from_lengths: i64,
    pub band_constant: bool,
}

fn alpha_beta(
    pair: &Pair,
    f: &BiFiltration,
    report: &CoefficientReport,
    i: u32,
    band: RangeInclusive<u32>,
    first: bool,
) -> Result<AlphaValue> {
    let from_fits = if first { report.alpha_from_fits(i) } else { report.beta_from_fits(i) }
        .ok_or_else(|| Error::FitUnstable(format!("row functions do not reach index {}", i + 1)))?;
    let (len, band_constant) = row_band_length(pair, f, i, band, first)?;
    let from_lengths = len as i64;
    if from_fits != from_lengths {
        return Err(Error::AlphaMismatch {
            index: i,
            from_fits,
            from_lengths,
        });
    }
    Ok(AlphaValue {
        index: i,
        from_fits,
        from_lengths,
        band_constant,
    })
}

/// `α(i)`, from the row functions and from `λ(L(i,s;1))` over a band of large `s`.
pub fn alpha(pair: &Pair, f: &BiFiltration, report: &CoefficientReport, i: u32, band: RangeInclusive<u32>) -> Result<AlphaValue> {
    alpha_beta(pair, f, report, i, band, true)
}

/// `β(j)`, symmetric to [`alpha`].
pub fn beta(pair: &Pair, f: &BiFiltration, report: &CoefficientReport, j: u32, band: RangeInclusive<u32>) -> Result<AlphaValue> {
    alpha_beta(pair, f, report, j, band, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Verdict {
    Finite(u64),
    InfiniteDetected(u64),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H2Classification {
    pub r: u32,
    pub s: u32,
    pub verdict: Verdict,
    pub fit_band: (u32, u32),
    pub verify_band: (u32, u32),
    /// `(k, λ(L(r,s;k)))` over both bands.
    pub lengths: Vec<(u32, u64)>,
    /// `λ(L) = slope·k + intercept` on the bands.
    pub slope: Option<i64>,
    pub intercept: Option<i64>,
    /// `(e01 − g1(r) − r e11) + (e10 − h1(s) − s e11)`.
    pub predicted_slope: i64,
    /// `A s + B r + C` from the coefficient closed form.
    pub predicted_intercept: i64,
    /// `−e2(IJ) + g2(r) + h2(s) − λ(R/I^rJ^s) + rs e11 + λ(rr/I^rJ^s)`.
    pub closed_form: i64,
    pub ratliff_rush_length: u64,
    pub slope_agrees: Option<bool>,
    pub intercept_agrees: Option<bool>,
}

/// Parameters of the closed form for `λ(L(r,s;k))`, `k ≫ 0`.
pub struct ClosedForm {
    pub first: i64,
    pub second: i64,
    pub constant: i64,
}

impl ClosedForm {
    pub fn new(report: &CoefficientReport, table: &BigradedLengthTable, r: u32, s: u32, rr_length: u64) -> Self {
        let b = &report.bhattacharya;
        let constant = -report.hilbert_ij.e2 + report.rows.g2(r) + report.rows.h2(s) - table.get(r, s) as i64
            + (r * s) as i64 * b.e11
            + rr_length as i64;
        ClosedForm {
            first: report.slope_part_first(r),
            second: report.slope_part_second(s),
            constant,
        }
    }

    pub fn slope(&self) -> i64 {
        self.first + self.second
    }

    pub fn at(&self, r: u32, s: u32, k: u32) -> i64 {
        self.first * (s + k) as i64 + self.second * (r + k) as i64 + self.constant
    }
}

/// Fits `λ(L(r,s;k))` on the k-band exactly to a line and classifies the limit.
/// Agreement with the coefficient formulas is recorded; see [`H2Classification::checked`].
#[allow(clippy::too_many_arguments)]
pub fn classify_h2(
    pair: &Pair,
    f: &BiFiltration,
    report: &CoefficientReport,
    table: &BigradedLengthTable,
    r: u32,
    s: u32,
    fit_band: (u32, u32),
    verify_band: (u32, u32),
    rr_k_max: u32,
) -> Result<H2Classification> {
    let ks: Vec<u32> = (fit_band.0..=fit_band.1).chain(verify_band.0..=verify_band.1).collect();
    let lengths = ks
        .iter()
        .map(|&k| Ok((k, pair.l_length(f, r, s, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let (k0, v0) = lengths[0];
    let (k1, v1) = lengths[1];
    let slope = (v1 as i64 - v0 as i64) / (k1 - k0) as i64;
    let intercept = v0 as i64 - slope * k0 as i64;
    let linear = lengths.iter().all(|&(k, v)| slope * k as i64 + intercept == v as i64);
    let (_, rr) = ratliff_rush(pair, f, r, s, rr_k_max)?;
    let cf = ClosedForm::new(report, table, r, s, rr.length);
    let predicted_intercept = cf.at(r, s, 0);
    let mut out = H2Classification {
        r,
        s,
        verdict: Verdict::Inconclusive,
        fit_band,
        verify_band,
        lengths,
        slope: None,
        intercept: None,
        predicted_slope: cf.slope(),
        predicted_intercept,
        closed_form: cf.constant,
        ratliff_rush_length: rr.length,
        slope_agrees: None,
        intercept_agrees: None,
    };
    if !linear {
        return Ok(out);
    }
    out.slope = Some(slope);
    out.intercept = Some(intercept);
    out.slope_agrees = Some(slope == cf.slope());
    out.intercept_agrees = Some(intercept == predicted_intercept);
    out.verdict = match slope {
        0 => Verdict::Finite(intercept as u64),
        d if d > 0 => Verdict::InfiniteDetected(d as u64),
        _ => Verdict::Inconclusive,
    };
    Ok(out)
}

impl H2Classification {
    /// Fails with `CrossCheckFailure` unless the fitted line matches the coefficient formulas.
    pub fn checked(self) -> Result<Self> {
        let (r, s) = (self.r, self.s);
        if self.slope_agrees == Some(false) {
            return Err(Error::CrossCheckFailure(format!(
                "slope of λ(L({r},{s};k)) is {}, coefficient formula gives {}",
                self.slope.unwrap(),
                self.predicted_slope
            )));
        }
        if self.intercept_agrees == Some(false) {
            return Err(Error::CrossCheckFailure(format!(
                "λ(L({r},{s};k)) has intercept {}, coefficient formula gives {}",
                self.intercept.unwrap(),
                self.predicted_intercept
            )));
        }
        Ok(self)
    }
}

/// Grid export `{(r,s,k) → λL, h0, h1, h2}`.
pub fn grid_json(cells: &[HomologyLengths]) -> serde_json::Value {
    cells
        .iter()
        .map(|c| {
            serde_json::json!({
                "r": c.r, "s": c.s, "k": c.k,
                "L": c.l_length, "h0": c.h0, "h1": c.h1, "h2": c.h2,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TruncatedAlgebra;
    use crate::linalg::PrimeField;

    fn setup(i: &str, j: &str, a: &str, b: &str) -> (BiFiltration, Pair) {
        let alg = TruncatedAlgebra::new(PrimeField::default(), 150);
        let i = LocalIdeal::from_generators(&alg.parse_generators(i).unwrap()).unwrap();
        let j = LocalIdeal::from_generators(&alg.parse_generators(j).unwrap()).unwrap();
        let pair = Pair::new(alg.parse_poly(a).unwrap(), alg.parse_poly(b).unwrap()).unwrap();
        (BiFiltration::new(i, j), pair)
    }

    #[test]
    fn maximal_ideal_homology() {
        let (f, pair) = setup("x, y", "x, y", "x", "y");
        let h = homology_lengths(&pair, &f, 0, 0, 1, 1).unwrap();
        assert_eq!((h.h0, h.h1, h.h2), (1, 0, 0));
        for (r, s, k) in [(1, 2, 1), (2, 0, 3), (0, 1, 2)] {
            assert_eq!(pair.l_length(&f, r, s, k).unwrap(), 0);
        }
        let (_, rr) = ratliff_rush(&pair, &f, 2, 1, 6).unwrap();
        assert_eq!(rr.length, 0);
    }

    #[test]
    fn example_pair_lengths_grow() {
        let (f, pair) = setup("x^2, x*y, y^2", "x^2, y^2", "x^2", "y^2");
        for k in 3..7 {
            assert_eq!(pair.l_length(&f, 0, 0, k).unwrap(), k as u64);
        }
        let h = homology_lengths(&pair, &f, 0, 0, 1, 4).unwrap();
        assert_eq!(h.h0 as i64 - h.h1 as i64, 4 - h.l_length as i64);
    }
}
