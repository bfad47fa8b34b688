use std::fmt;
use std::sync::OnceLock;

use crate::algebra::monomial::{self, degree_of, dim_below, exponents, index, shift};
use crate::algebra::poly::{PolyElement, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{combine, kernel_combinations, Echelon, SparseVec, Subspace};

/// Smallest `t` with `m^t ⊆ K`, or the marker that it was not observed below N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adequacy {
    Order(u32),
    ExceedsN,
}

/// An ideal of R = k[[x,y]].
///
/// A certified ideal `K` with adequacy `t` is stored as the subspace `K/m^t` of
/// `k[x,y]/m^t`; everything of degree `>= t` is implicitly contained. Since `m^t ⊆ K`
/// this determines `K` exactly, and the stored data does not depend on the
/// session truncation order N. Uncertified ideals keep their image in `A_N`.
#[derive(Clone)]
pub struct LocalIdeal {
    algebra: TruncatedAlgebra,
    adequacy: Adequacy,
    explicit: Subspace,
    given: Vec<PolyElement>,
    min_gens: OnceLock<Vec<PolyElement>>,
}

impl fmt::Debug for LocalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalIdeal")
            .field("adequacy", &self.adequacy)
            .field("colength", &self.colength().ok())
            .field("generators", &self.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for LocalIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.field() == other.algebra.field()
            && self.adequacy == other.adequacy
            && self.explicit == other.explicit
    }
}

/// Span of all monomial multiples of `polys` inside `k[x,y]/m^order`.
pub(crate) fn closure_image(alg: &TruncatedAlgebra, polys: &[SparseVec], order: u32) -> Subspace {
    let dim = dim_below(order);
    let limit = dim as u32;
    let mut ech = Echelon::new(alg.field(), dim);
    let mut queue = Vec::new();
    for p in polys {
        let t: SparseVec = p.iter().copied().take_while(|&(c, _)| c < limit).collect();
        if let Some(i) = ech.insert(&t) {
            queue.push(i);
        }
    }
    while let Some(i) = queue.pop() {
        let row = ech.row(i).clone();
        for by_y in [false, true] {
            let s = shift(&row, by_y, order);
            if s.is_empty() {
                continue;
            }
            if let Some(j) = ech.insert(&s) {
                queue.push(j);
            }
        }
    }
    ech.into_subspace()
}

/// If the image in `A_order` contains every monomial of degree `order-1`, returns the
/// adequacy (1 + the largest degree of a standard monomial).
fn certified_adequacy(image: &Subspace, order: u32) -> Option<u32> {
    if order == 0 {
        return Some(0);
    }
    let top = dim_below(order - 1) as u32;
    let full_top = (top..dim_below(order) as u32).all(|c| image.is_pivot(c));
    if !full_top {
        return None;
    }
    Some(
        image
            .non_pivot_columns()
            .last()
            .map(|&c| degree_of(c) + 1)
            .unwrap_or(0),
    )
}

impl LocalIdeal {
    /// Builds the ideal from a certified image: `image ⊆ A_floor` with `m^floor ⊆ K`.
    pub(crate) fn from_certified_image(algebra: TruncatedAlgebra, image: Subspace, floor: u32) -> Self {
        debug_assert_eq!(image.ambient_dim(), dim_below(floor));
        let t = image
            .non_pivot_columns()
            .last()
            .map(|&c| degree_of(c) + 1)
            .unwrap_or(0);
        let explicit = if t < floor { image.truncate(dim_below(t)) } else { image };
        LocalIdeal {
            algebra,
            adequacy: Adequacy::Order(t),
            explicit,
            given: Vec::new(),
            min_gens: OnceLock::new(),
        }
    }

    fn check_capacity(alg: &TruncatedAlgebra, order: u32) -> Result<()> {
        if order > alg.order() {
            return Err(Error::TruncationInsufficient {
                needed: order,
                available: alg.order(),
            });
        }
        Ok(())
    }

    /// The ideal generated by `polys`, whose adequacy is known to be at most `floor`.
    /// The bound is re-checked one degree higher.
    pub fn from_polys_with_floor(alg: &TruncatedAlgebra, polys: &[SparseVec], floor: u32) -> Result<Self> {
        let order = floor + 1;
        Self::check_capacity(alg, order)?;
        let image = closure_image(alg, polys, order);
        match certified_adequacy(&image, order) {
            Some(_) => Ok(Self::from_certified_image(*alg, image, order)),
            None => Err(Error::InternalIdentityFailure(format!(
                "claimed containment m^{floor} ⊆ K does not hold"
            ))),
        }
    }

    /// The ideal generated by `polys`, escalating the working order from `start`
    /// by factors of 1.5 until m-primariness is certified or N is reached.
    pub fn from_polys_escalating(alg: &TruncatedAlgebra, polys: &[SparseVec], start: u32) -> Result<Self> {
        let mut order = start.clamp(1, alg.order());
        loop {
            let image = closure_image(alg, polys, order);
            if certified_adequacy(&image, order).is_some() {
                return Ok(Self::from_certified_image(*alg, image, order));
            }
            if order >= alg.order() {
                return Err(Error::NotMPrimary { order: alg.order() });
            }
            order = (order * 3).div_ceil(2).min(alg.order());
        }
    }

    /// `ideal_from_gens`: the ideal of R generated by `gens`.
    pub fn from_generators(gens: &[PolyElement]) -> Result<Self> {
        let alg = match gens.first() {
            Some(g) => g.algebra(),
            None => return Err(Error::Config("empty generator list".into())),
        };
        if gens.iter().any(|g| g.algebra() != alg) {
            return Err(Error::AlgebraMismatch);
        }
        let polys: Vec<SparseVec> = gens.iter().map(|g| g.terms().clone()).collect();
        let start = gens.iter().filter_map(|g| g.degree()).max().unwrap_or(0) + 2;
        let mut ideal = Self::from_polys_escalating(&alg, &polys, start)?;
        ideal.given = gens.to_vec();
        Ok(ideal)
    }

    /// Like [`Self::from_generators`] but keeps a non-m-primary result as an
    /// uncertified ideal instead of failing.
    pub fn from_generators_unchecked(gens: &[PolyElement]) -> Result<Self> {
        match Self::from_generators(gens) {
            Err(Error::NotMPrimary { .. }) => {
                let alg = gens[0].algebra();
                let polys: Vec<SparseVec> = gens.iter().map(|g| g.terms().clone()).collect();
                let image = closure_image(&alg, &polys, alg.order());
                Ok(LocalIdeal {
                    algebra: alg,
                    adequacy: Adequacy::ExceedsN,
                    explicit: image,
                    given: gens.to_vec(),
                    min_gens: OnceLock::new(),
                })
            }
            other => other,
        }
    }

    pub fn unit(alg: &TruncatedAlgebra) -> Self {
        Self::from_certified_image(*alg, Subspace::zero(alg.field(), 0), 0)
    }

    /// `m^k`.
    pub fn maximal_power(alg: &TruncatedAlgebra, k: u32) -> Self {
        Self::from_certified_image(*alg, Subspace::zero(alg.field(), dim_below(k)), k)
    }

    pub fn algebra(&self) -> TruncatedAlgebra {
        self.algebra
    }

    pub fn adequacy(&self) -> Adequacy {
        self.adequacy
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.adequacy, Adequacy::Order(_))
    }

    pub fn is_unit(&self) -> bool {
        self.adequacy == Adequacy::Order(0)
    }

    fn certified_order(&self) -> Result<u32> {
        match self.adequacy {
            Adequacy::Order(t) => Ok(t),
            Adequacy::ExceedsN => Err(Error::TruncationInsufficient {
                needed: self.algebra.order() + 1,
                available: self.algebra.order(),
            }),
        }
    }

    /// Adequacy order `t`; errors for uncertified ideals.
    pub fn adequacy_order(&self) -> Result<u32> {
        self.certified_order()
    }

    /// `K/m^t` inside `k[x,y]/m^t`.
    pub fn explicit(&self) -> &Subspace {
        &self.explicit
    }

    /// Image of `K` in the session truncation `A_N`.
    pub fn image(&self) -> Result<Subspace> {
        match self.adequacy {
            Adequacy::Order(t) => {
                Self::check_capacity(&self.algebra, t)?;
                Ok(self.explicit.extend_full(self.algebra.ambient_dim()))
            }
            Adequacy::ExceedsN => Ok(self.explicit.clone()),
        }
    }

    /// `λ(R/K)`.
    pub fn colength(&self) -> Result<u64> {
        self.certified_order()?;
        Ok(self.explicit.codim() as u64)
    }

    /// Monomials outside the leading-term ideal; a vector-space basis of R/K.
    pub fn standard_monomials(&self) -> Vec<(u32, u32)> {
        self.explicit.non_pivot_columns().into_iter().map(exponents).collect()
    }

    /// Whether every stored generator is a monomial (then K is a monomial ideal).
    pub fn is_monomial(&self) -> bool {
        self.explicit.rows().iter().all(|r| r.len() == 1)
    }

    pub fn given_generators(&self) -> &[PolyElement] {
        &self.given
    }

    /// A minimal generating set, i.e. lifts of a basis of K/mK.
    pub fn generators(&self) -> &[PolyElement] {
        self.min_gens.get_or_init(|| self.compute_min_gens())
    }

    /// μ(K) = dim K/mK.
    pub fn minimal_number_of_generators(&self) -> usize {
        self.generators().len()
    }

    fn compute_min_gens(&self) -> Vec<PolyElement> {
        let t = match self.adequacy {
            Adequacy::Order(t) => t,
            Adequacy::ExceedsN => return self.given.clone(),
        };
        let f = self.algebra.field();
        let dim1 = dim_below(t + 1);
        let lifted = self.explicit.extend_full(dim1);
        let mut mk = Echelon::new(f, dim1);
        for row in self.explicit.rows() {
            for by_y in [false, true] {
                let s = shift(row, by_y, t + 1);
                if !s.is_empty() {
                    mk.insert(&s);
                }
            }
        }
        let is_lead = |i: u32, j: u32| lifted.is_pivot(index(i, j));
        let mut gens = Vec::new();
        for row in lifted.rows() {
            let (i, j) = exponents(row[0].0);
            let divisible = (i > 0 && is_lead(i - 1, j)) || (j > 0 && is_lead(i, j - 1));
            if divisible {
                continue;
            }
            if mk.insert(row).is_some() {
                gens.push(self.algebra.from_terms(row.clone()));
            }
        }
        gens
    }

    fn same_algebra(&self, other: &LocalIdeal) -> Result<()> {
        if self.algebra.field() != other.algebra.field() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    /// Whether `f ∈ K`.
    pub fn contains(&self, f: &PolyElement) -> Result<bool> {
        let t = self.certified_order()?;
        Ok(self.explicit.contains_sparse(&f.truncated_terms(t)))
    }

    pub fn ideal_eq(&self, other: &LocalIdeal) -> Result<bool> {
        self.same_algebra(other)?;
        self.certified_order()?;
        other.certified_order()?;
        Ok(self == other)
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset(&self, other: &LocalIdeal) -> Result<bool> {
        self.same_algebra(other)?;
        let ts = self.certified_order()?;
        let to = other.certified_order()?;
        if ts < to {
            return Ok(false);
        }
        let lifted = self.explicit.truncate(dim_below(to));
        Ok(lifted.rows().iter().all(|r| other.explicit.contains_sparse(r)))
    }

    pub fn sum(&self, other: &LocalIdeal) -> Result<LocalIdeal> {
        self.same_algebra(other)?;
        let c = self.certified_order()?.min(other.certified_order()?);
        let a = self.explicit.truncate(dim_below(c));
        let b = other.explicit.truncate(dim_below(c));
        Ok(Self::from_certified_image(self.algebra, a.sum(&b)?, c))
    }

    pub fn product(&self, other: &LocalIdeal) -> Result<LocalIdeal> {
        self.same_algebra(other)?;
        let t1 = self.certified_order()?;
        let t2 = other.certified_order()?;
        if t1 == 0 {
            return Ok(other.clone());
        }
        if t2 == 0 {
            return Ok(self.clone());
        }
        let c = t1 + t2;
        Self::check_capacity(&self.algebra, c)?;
        let mut polys = Vec::new();
        for g in self.generators() {
            for h in other.generators() {
                let p = g.mul_trunc(h, c);
                if !p.is_zero() {
                    polys.push(p.terms().clone());
                }
            }
        }
        let image = closure_image(&self.algebra, &polys, c);
        Ok(Self::from_certified_image(self.algebra, image, c))
    }

    /// `K^r` by binary powering; `K^0 = R`.
    pub fn power(&self, r: u32) -> Result<LocalIdeal> {
        let mut acc = Self::unit(&self.algebra);
        let mut base = self.clone();
        let mut e = r;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.product(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.product(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn intersect(&self, other: &LocalIdeal) -> Result<LocalIdeal> {
        self.same_algebra(other)?;
        let ts = self.certified_order()?;
        let to = other.certified_order()?;
        // `hi` carries the larger adequacy; the intersection lives in A_{t_hi}.
        let (lo, hi) = if ts <= to { (self, other) } else { (other, self) };
        let t_lo = lo.certified_order()?;
        let t_hi = hi.certified_order()?;
        let f = self.algebra.field();
        let dim_lo = dim_below(t_lo);
        let residues: Vec<SparseVec> = hi
            .explicit
            .rows()
            .iter()
            .map(|r| {
                let proj: SparseVec = r.iter().copied().take_while(|&(c, _)| (c as usize) < dim_lo).collect();
                lo.explicit.reduce(&proj)
            })
            .collect();
        let kernel = kernel_combinations(f, residues, dim_lo);
        let dim_hi = dim_below(t_hi);
        let rows: Vec<SparseVec> = kernel
            .iter()
            .map(|combo| combine(&f, dim_hi, combo.iter().map(|&(i, c)| (c, &hi.explicit.rows()[i as usize]))))
            .collect();
        // rows with pivot at or beyond t_lo already belong to `lo`
        let image = Subspace::from_sparse_rows(f, dim_hi, rows);
        Ok(Self::from_certified_image(self.algebra, image, t_hi))
    }

    /// `(K : f) = { g : f g ∈ K }`.
    pub fn colon_element(&self, f: &PolyElement) -> Result<LocalIdeal> {
        let t = self.certified_order()?;
        let o = f.order().ok_or(Error::ZeroDivisorInput)?;
        if o >= t {
            return Ok(Self::unit(&self.algebra));
        }
        let c = t - o;
        let field = self.algebra.field();
        let base = self.explicit.truncate(dim_below(c));
        let std = base.non_pivot_columns();
        let fterms = f.truncated_terms(t);
        let dim_t = dim_below(t);
        let limit = dim_t as u32;
        let images: Vec<SparseVec> = std
            .iter()
            .map(|&m| {
                let (i, j) = exponents(m);
                let mut prod: SparseVec = fterms
                    .iter()
                    .map(|&(c, v)| (monomial::times(c, i, j), v))
                    .filter(|&(c, _)| c < limit)
                    .collect();
                prod.sort_unstable_by_key(|e| e.0);
                self.explicit.reduce(&prod)
            })
            .collect();
        let kernel = kernel_combinations(field, images, dim_t);
        let dim_c = dim_below(c);
        let mut ech = Echelon::from_subspace(&base);
        for combo in kernel {
            let mut v: SparseVec = combo.iter().map(|&(k, val)| (std[k as usize], val)).collect();
            v.sort_unstable_by_key(|e| e.0);
            ech.insert(&v);
        }
        debug_assert_eq!(ech.dim(), dim_c);
        Ok(Self::from_certified_image(self.algebra, ech.into_subspace(), c))
    }

    /// `(K : L) = ∩_g (K : g)` over generators of `L`.
    pub fn colon_ideal(&self, other: &LocalIdeal) -> Result<LocalIdeal> {
        self.same_algebra(other)?;
        other.certified_order()?;
        let mut acc: Option<LocalIdeal> = None;
        for g in other.generators() {
            let c = self.colon_element(g)?;
            acc = Some(match acc {
                None => c,
                Some(a) => a.intersect(&c)?,
            });
        }
        acc.ok_or(Error::ZeroDivisorInput)
    }

    /// `f K` is not m-primary in general; this returns its image generators for use
    /// in sums that are.
    pub fn scaled_generators(&self, f: &PolyElement, order: u32) -> Vec<SparseVec> {
        self.generators()
            .iter()
            .map(|g| f.mul_trunc(g, order).terms().clone())
            .filter(|t| !t.is_empty())
            .collect()
    }

    /// `Σ f_i K_i`, given that the sum contains `m^floor`.
    pub fn combination(terms: &[(&PolyElement, &LocalIdeal)], floor: u32) -> Result<LocalIdeal> {
        let alg = terms.first().map(|t| t.1.algebra).ok_or(Error::Config("empty combination".into()))?;
        let mut polys = Vec::new();
        for (f, k) in terms {
            k.certified_order()?;
            polys.extend(k.scaled_generators(f, floor + 1));
        }
        Self::from_polys_with_floor(&alg, &polys, floor)
    }
}

impl fmt::Display for LocalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        write!(f, "({})", gens.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PrimeField;

    fn alg() -> TruncatedAlgebra {
        TruncatedAlgebra::new(PrimeField::default(), 40)
    }

    fn ideal(text: &str) -> LocalIdeal {
        let a = alg();
        LocalIdeal::from_generators(&a.parse_generators(text).unwrap()).unwrap()
    }

    fn poly(text: &str) -> PolyElement {
        alg().parse_poly(text).unwrap()
    }

    #[test]
    fn maximal_ideal() {
        let m = ideal("x, y");
        assert_eq!(m.colength().unwrap(), 1);
        assert_eq!(m.adequacy(), Adequacy::Order(1));
        assert_eq!(m.minimal_number_of_generators(), 2);
    }

    #[test]
    fn complete_intersection() {
        let k = ideal("x^2, y^2");
        assert_eq!(k.colength().unwrap(), 4);
        assert_eq!(k.adequacy(), Adequacy::Order(3));
    }

    #[test]
    fn depth_zero_ideal() {
        let k = ideal("x^4, x^3*y, x*y^3, y^4");
        assert_eq!(k.colength().unwrap(), 11);
        assert_eq!(k.adequacy(), Adequacy::Order(5));
        assert_eq!(k.minimal_number_of_generators(), 4);
    }

    #[test]
    fn products_and_powers() {
        let m = ideal("x, y");
        let m2 = m.product(&m).unwrap();
        assert_eq!(m2.colength().unwrap(), 3);
        assert_eq!(m2, ideal("x^2, x*y, y^2"));
        assert_eq!(m.power(0).unwrap().colength().unwrap(), 0);
        let p = m2.product(&ideal("x^2, y^2")).unwrap();
        assert_eq!(p.colength().unwrap(), 10);
        for k in 1..7 {
            assert_eq!(m.power(k).unwrap().colength().unwrap() as u32, k * (k + 1) / 2);
        }
    }

    #[test]
    fn colon_examples() {
        let k = ideal("x^2, y^2");
        let c = k.colon_element(&poly("x")).unwrap();
        assert_eq!(c, ideal("x, y^2"));
        assert_eq!(c.colength().unwrap(), 2);
        assert_eq!(k.colon_element(&poly("1")).unwrap(), k);
        assert_eq!(k.colon_element(&poly("0")).unwrap_err(), Error::ZeroDivisorInput);
        let m = ideal("x, y");
        for (r, kk) in [(1u32, 2u32), (2, 1), (3, 3)] {
            let big = m.power(r + kk).unwrap();
            assert_eq!(big.colon_element(&poly(&format!("x^{kk}"))).unwrap(), m.power(r).unwrap());
        }
        assert_eq!(m.power(2).unwrap().colon_ideal(&m).unwrap(), m);
        assert_eq!(k.colon_ideal(&LocalIdeal::unit(&alg())).unwrap(), k);
    }

    #[test]
    fn paper_witness_membership() {
        let i = ideal("x^4, x^3*y, x*y^3, y^4");
        let kk = ideal("x^4, y^4");
        let i2 = i.power(2).unwrap();
        let w = poly("x^2*y^2");
        assert!(i2.colon_ideal(&kk).unwrap().contains(&w).unwrap());
        assert!(!i.contains(&w).unwrap());
    }

    #[test]
    fn intersections_and_membership() {
        let a = ideal("x^2, y");
        let b = ideal("x, y^2");
        assert_eq!(a.intersect(&b).unwrap(), ideal("x^2, x*y, y^2"));
        let m2 = ideal("x^2, x*y, y^2");
        assert!(m2.contains(&poly("x*y")).unwrap());
        assert!(!ideal("x^2, y^2").contains(&poly("x*y")).unwrap());
    }

    #[test]
    fn non_primary_is_rejected() {
        let a = alg();
        let gens = a.parse_generators("x").unwrap();
        assert!(matches!(LocalIdeal::from_generators(&gens), Err(Error::NotMPrimary { .. })));
        let x = LocalIdeal::from_generators_unchecked(&gens).unwrap();
        assert!(!x.is_certified());
        let m3 = ideal("x^3, x^2*y, x*y^2, y^3");
        assert!(matches!(x.intersect(&m3), Err(Error::TruncationInsufficient { .. })));
        assert!(matches!(x.colength(), Err(Error::TruncationInsufficient { .. })));
    }

    #[test]
    fn non_monomial_ideal() {
        // (x + y^2, y^3): colength 3 with standard monomials 1, y, y^2
        let k = ideal("x + y^2, y^3");
        assert_eq!(k.colength().unwrap(), 3);
        assert!(k.contains(&poly("x*y + y^3")).unwrap());
        assert!(k.contains(&poly("x^2")).unwrap());
        assert!(!k.contains(&poly("x")).unwrap());
        let sq = k.power(2).unwrap();
        // (x+y^2, y^3)^2 colength = 3 * 3 = 9 for a parameter ideal of colength 3
        assert_eq!(sq.colength().unwrap(), 9);
    }

    #[test]
    fn sums() {
        let s = ideal("x^2, y^3").sum(&ideal("x*y, x^5, y^5")).unwrap();
        assert_eq!(s, ideal("x^2, x*y, y^3"));
        assert_eq!(s.colength().unwrap(), 4);
        assert_eq!(s.sum(&LocalIdeal::unit(&alg())).unwrap().colength().unwrap(), 0);
    }
}
