use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::monomial::index;
use crate::algebra::{LocalIdeal, PolyElement};
use crate::error::{Error, Result};
use crate::filtration::BiFiltration;

/// Powers `a^k`, `b^k` and the ideal `(a^k, b^k)`.
pub struct PairPower {
    pub a: PolyElement,
    pub b: PolyElement,
    pub ideal: LocalIdeal,
}

/// A candidate pair `a ∈ I`, `b ∈ J` together with cached powers.
pub struct Pair {
    a: PolyElement,
    b: PolyElement,
    powers: Mutex<HashMap<u32, Arc<PairPower>>>,
}

impl Pair {
    /// Fails with `NotRegularSequence` unless `(a, b)` is m-primary, which in the
    /// Cohen–Macaulay ring k[[x,y]] is the same as `a, b` being a regular sequence.
    pub fn new(a: PolyElement, b: PolyElement) -> Result<Self> {
        let pair = Pair {
            a,
            b,
            powers: Mutex::new(HashMap::new()),
        };
        pair.power(1)?;
        Ok(pair)
    }

    pub fn first(&self) -> &PolyElement {
        &self.a
    }

    pub fn second(&self) -> &PolyElement {
        &self.b
    }

    pub fn power(&self, k: u32) -> Result<Arc<PairPower>> {
        if let Some(p) = self.powers.lock().unwrap().get(&k) {
            return Ok(p.clone());
        }
        let ak = self.a.pow(k);
        let bk = self.b.pow(k);
        if ak.is_zero() || bk.is_zero() {
            return Err(Error::NotRegularSequence);
        }
        let start = ak.order().unwrap_or(0) + bk.order().unwrap_or(0) + 1;
        let ideal = LocalIdeal::from_polys_escalating(&ak.algebra(), &[ak.terms().clone(), bk.terms().clone()], start)
            .map_err(|e| match e {
                Error::NotMPrimary { .. } => Error::NotRegularSequence,
                other => other,
            })?;
        let p = Arc::new(PairPower { a: ak, b: bk, ideal });
        Ok(self.powers.lock().unwrap().entry(k).or_insert(p).clone())
    }

    /// `a^k X + b^k Y`, where X and Y are m-primary.
    pub fn combination(&self, k: u32, x: &LocalIdeal, y: &LocalIdeal) -> Result<LocalIdeal> {
        let p = self.power(k)?;
        // m^M ⊆ X ∩ Y gives m^{t(a^k,b^k) + M} ⊆ (a^k, b^k) m^M ⊆ a^k X + b^k Y
        let floor = p.ideal.adequacy_order()? + x.adequacy_order()?.max(y.adequacy_order()?);
        LocalIdeal::combination(&[(&p.a, x), (&p.b, y)], floor)
    }

    /// `D(r,s;k) = a^k I^r J^{s+k} + b^k I^{r+k} J^s`.
    pub fn denominator(&self, f: &BiFiltration, r: u32, s: u32, k: u32) -> Result<LocalIdeal> {
        let x = f.power_product(r, s + k)?;
        let y = f.power_product(r + k, s)?;
        self.combination(k, &x, &y)
    }

    /// `λ(L(r,s;k)) = λ(I^{r+k} J^{s+k} / D(r,s;k))`.
    pub fn l_length(&self, f: &BiFiltration, r: u32, s: u32, k: u32) -> Result<u64> {
        let d = self.denominator(f, r, s, k)?;
        let top = f.power_product(r + k, s + k)?;
        let (ld, lt) = (d.colength()?, top.colength()?);
        if ld < lt {
            return Err(Error::InternalIdentityFailure(format!(
                "denominator at ({r},{s};{k}) is not contained in I^{}J^{}",
                r + k,
                s + k
            )));
        }
        Ok(ld - lt)
    }

    /// Whether `I^{r+1} J^{s+1} = a I^r J^{s+1} + b I^{r+1} J^s`.
    pub fn joint_identity(&self, f: &BiFiltration, r: u32, s: u32) -> Result<bool> {
        Ok(self.l_length(f, r, s, 1)? == 0)
    }
}

fn pure_power(k: &LocalIdeal, in_y: bool) -> Option<PolyElement> {
    k.generators()
        .iter()
        .find(|g| {
            g.is_monomial() && {
                let (c, v) = g.terms()[0];
                let d = crate::algebra::monomial::degree_of(c);
                v == 1 && c == if in_y { index(0, d) } else { index(d, 0) }
            }
        })
        .cloned()
}

fn random_combination(k: &LocalIdeal, rng: &mut ChaCha8Rng) -> PolyElement {
    let alg = k.algebra();
    let p = alg.field().modulus();
    k.generators()
        .iter()
        .fold(alg.zero(), |acc, g| acc.add(&g.scale(rng.gen_range(1..p))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperficialThresholds {
    /// Least `r0(s)` with `(I^r J^s : a) = I^{r-1} J^s` for `r0(s) <= r <= r_max`.
    pub first_by_s: Vec<u32>,
    /// Least `s0(r)` with `(I^r J^s : b) = I^r J^{s-1}` for `s0(r) <= s <= s_max`.
    pub second_by_r: Vec<u32>,
    pub first: u32,
    pub second: u32,
    pub window: (u32, u32),
}

/// A certified joint reduction with the windows over which it was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointReductionCert {
    pub a: String,
    pub b: String,
    pub origin: String,
    pub seed: Option<u64>,
    pub attempts: u32,
    /// The identity holds at `(d, d)` and therefore at every `(r, s) >= (d, d)`.
    pub joint_from: u32,
    /// Cells `[0, w]²` on which the identity was evaluated.
    pub jr_window: u32,
    pub holds_at: Vec<(u32, u32)>,
    pub mprimary_ab: bool,
    pub colength_ab: u64,
    pub superficial: Option<SuperficialThresholds>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Largest diagonal index tried for the joint-reduction identity.
    pub jr_window: u32,
    /// Window `(r_max, s_max)` for the superficial conditions.
    pub superficial_window: (u32, u32),
    pub max_attempts: u32,
    pub monomial_first: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            jr_window: 4,
            superficial_window: (6, 6),
            max_attempts: 8,
            monomial_first: true,
        }
    }
}

/// Checks the joint-reduction identity on `[0, w]²` and finds the least diagonal
/// corner from which it holds.
pub fn certify_pair(f: &BiFiltration, pair: &Pair, jr_window: u32) -> Result<Option<JointReductionCert>> {
    let mut holds_at = Vec::new();
    let mut joint_from = None;
    for d in 0..=jr_window {
        for r in 0..=d {
            for s in 0..=d {
                if (r == d || s == d) && pair.joint_identity(f, r, s)? {
                    holds_at.push((r, s));
                }
            }
        }
        if joint_from.is_none() && holds_at.contains(&(d, d)) {
            joint_from = Some(d);
        }
    }
    let Some(joint_from) = joint_from else {
        return Ok(None);
    };
    holds_at.sort_unstable();
    let ab = pair.power(1)?;
    Ok(Some(JointReductionCert {
        a: pair.a.to_string(),
        b: pair.b.to_string(),
        origin: "given".into(),
        seed: None,
        attempts: 1,
        joint_from,
        jr_window,
        holds_at,
        mprimary_ab: true,
        colength_ab: ab.ideal.colength()?,
        superficial: None,
    }))
}

fn threshold(holds: impl Iterator<Item = bool>, lo: u32, hi: u32) -> Option<u32> {
    // holds is indexed lo..=hi; least t such that all of t..=hi hold
    let v: Vec<bool> = holds.collect();
    if !*v.last()? {
        return None;
    }
    let mut t = hi;
    while t > lo && v[(t - 1 - lo) as usize] {
        t -= 1;
    }
    Some(t)
}

/// Finds the thresholds of the two superficial conditions within `window`.
pub fn verify_superficial(
    cert: &mut JointReductionCert,
    f: &BiFiltration,
    pair: &Pair,
    window: (u32, u32),
) -> Result<()> {
    let (r_max, s_max) = window;
    let mut first_by_s = Vec::new();
    for s in 0..=s_max {
        let holds = (1..=r_max)
            .map(|r| -> Result<bool> {
                let c = f.power_product(r, s)?.colon_element(&pair.a)?;
                let prev = f.power_product(r - 1, s)?;
                c.ideal_eq(&prev)
            })
            .collect::<Result<Vec<_>>>()?;
        let t = threshold(holds.into_iter(), 1, r_max)
            .ok_or_else(|| Error::SuperficialityNotObserved(format!("first element, s = {s}, r <= {r_max}")))?;
        first_by_s.push(t);
    }
    let mut second_by_r = Vec::new();
    for r in 0..=r_max {
        let holds = (1..=s_max)
            .map(|s| -> Result<bool> {
                let c = f.power_product(r, s)?.colon_element(&pair.b)?;
                let prev = f.power_product(r, s - 1)?;
                c.ideal_eq(&prev)
            })
            .collect::<Result<Vec<_>>>()?;
        let t = threshold(holds.into_iter(), 1, s_max)
            .ok_or_else(|| Error::SuperficialityNotObserved(format!("second element, r = {r}, s <= {s_max}")))?;
        second_by_r.push(t);
    }
    cert.superficial = Some(SuperficialThresholds {
        first: *first_by_s.iter().max().unwrap(),
        second: *second_by_r.iter().max().unwrap(),
        first_by_s,
        second_by_r,
        window,
    });
    Ok(())
}

/// Monomial candidates `(x^p ∈ I, y^q ∈ J)` and `(y^p ∈ I, x^q ∈ J)`.
pub fn monomial_candidates(i: &LocalIdeal, j: &LocalIdeal) -> Vec<(PolyElement, PolyElement)> {
    let mut out = Vec::new();
    for flip in [false, true] {
        if let (Some(a), Some(b)) = (pure_power(i, flip), pure_power(j, !flip)) {
            out.push((a, b));
        }
    }
    out
}

/// Searches for a joint reduction satisfying the superficial conditions: monomial
/// pairs first (when available), then random combinations of minimal generators.
pub fn sample_joint_reduction(f: &BiFiltration, seed: u64, cfg: &SamplerConfig) -> Result<(Pair, JointReductionCert)> {
    let mut attempts = 0;
    let try_pair = |a: PolyElement, b: PolyElement| -> Result<Option<(Pair, JointReductionCert)>> {
        let pair = match Pair::new(a, b) {
            Ok(p) => p,
            Err(Error::NotRegularSequence) => return Ok(None),
            Err(e) => return Err(e),
        };
        let Some(mut cert) = certify_pair(f, &pair, cfg.jr_window)? else {
            return Ok(None);
        };
        match verify_superficial(&mut cert, f, &pair, cfg.superficial_window) {
            Ok(()) => Ok(Some((pair, cert))),
            Err(Error::SuperficialityNotObserved(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    if cfg.monomial_first {
        for (a, b) in monomial_candidates(f.first(), f.second()) {
            attempts += 1;
            if let Some((pair, mut cert)) = try_pair(a, b)? {
                cert.origin = "monomial".into();
                cert.attempts = attempts;
                return Ok((pair, cert));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.max_attempts {
        attempts += 1;
        let a = random_combination(f.first(), &mut rng);
        let b = random_combination(f.second(), &mut rng);
        if let Some((pair, mut cert)) = try_pair(a, b)? {
            cert.origin = "random".into();
            cert.seed = Some(seed);
            cert.attempts = attempts;
            return Ok((pair, cert));
        }
    }
    Err(Error::SamplingExhausted { attempts })
}

/// Random pairs only, for pair-independence checks.
pub fn sample_random_pair(f: &BiFiltration, seed: u64, cfg: &SamplerConfig) -> Result<(Pair, JointReductionCert)> {
    let cfg = SamplerConfig {
        monomial_first: false,
        ..*cfg
    };
    sample_joint_reduction(f, seed, &cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JrZero {
    pub holds: bool,
    pub a: String,
    pub b: String,
    /// A minimal generator of `IJ` outside `aJ + bI` when the identity fails.
    pub witness: Option<String>,
}

/// Whether `IJ = aJ + bI`.
pub fn jr_number_zero(i: &LocalIdeal, j: &LocalIdeal, a: &PolyElement, b: &PolyElement) -> Result<JrZero> {
    let pair = Pair::new(a.clone(), b.clone())?;
    let sum = pair.combination(1, j, i)?;
    let ij = i.product(j)?;
    let holds = sum.ideal_eq(&ij)?;
    let mut witness = None;
    if !holds {
        for g in ij.generators() {
            if !sum.contains(g)? {
                witness = Some(g.to_string());
                break;
            }
        }
    }
    Ok(JrZero {
        holds,
        a: a.to_string(),
        b: b.to_string(),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthCheck {
    /// `true` when some candidate passed the whole window; `false` means "not observed".
    pub positive: bool,
    pub witness: Option<String>,
    pub window: u32,
    pub candidates_tried: u32,
}

/// Looks for `c ∈ K \ mK` with `(K^n : c) = K^{n-1}` for `1 <= n <= window`.
pub fn depth_g_positive(k: &LocalIdeal, seed: u64, window: u32, random_candidates: u32) -> Result<DepthCheck> {
    let mut powers = vec![LocalIdeal::unit(&k.algebra())];
    for n in 1..=window as usize {
        let next = powers[n - 1].product(k)?;
        powers.push(next);
    }
    let mut candidates: Vec<PolyElement> = k.generators().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_candidates {
        candidates.push(random_combination(k, &mut rng));
    }
    let mut tried = 0;
    for c in candidates {
        tried += 1;
        let mut ok = true;
        for n in 1..=window as usize {
            if !powers[n].colon_element(&c)?.ideal_eq(&powers[n - 1])? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(DepthCheck {
                positive: true,
                witness: Some(c.to_string()),
                window,
                candidates_tried: tried,
            });
        }
    }
    Ok(DepthCheck {
        positive: false,
        witness: None,
        window,
        candidates_tried: tried,
    })
}

/// The membership facts `w ∈ (K^2 : L)` and `w ∉ K` used to exhibit depth G(K) = 0
/// through a reduction `L` of `K`.
pub fn reduction_colon_witness(k: &LocalIdeal, reduction: &LocalIdeal, w: &PolyElement) -> Result<(bool, bool)> {
    let k2 = k.product(k)?;
    let in_colon = k2.colon_ideal(reduction)?.contains(w)?;
    let in_k = k.contains(w)?;
    Ok((in_colon, in_k))
}
