//! Integer staircase model of monomial ideals, independent of the linear algebra.
#![allow(dead_code)]

use std::collections::BTreeSet;

/// A monomial ideal of k[x,y] as its set of minimal exponent pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staircase(pub Vec<(u32, u32)>);

impl Staircase {
    /// Reads comma-separated monomials such as `x^2*y, y^3`.
    pub fn parse(text: &str) -> Self {
        Staircase::new(text.split(',').map(|g| {
            let g = g.trim();
            let exp = |v: char| -> u32 {
                g.split('*')
                    .find(|p| p.starts_with(v))
                    .map(|p| p[1..].trim_start_matches('^').parse().unwrap_or(1))
                    .unwrap_or(0)
            };
            (exp('x'), exp('y'))
        }))
    }

    pub fn new(gens: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let all: Vec<(u32, u32)> = gens.into_iter().collect();
        let mut min: Vec<(u32, u32)> = all
            .iter()
            .copied()
            .filter(|&(i, j)| !all.iter().any(|&(p, q)| p <= i && q <= j && (p, q) != (i, j)))
            .collect();
        min.sort_unstable();
        min.dedup();
        Staircase(min)
    }

    pub fn contains(&self, (i, j): (u32, u32)) -> bool {
        self.0.iter().any(|&(p, q)| p <= i && q <= j)
    }

    pub fn x_bound(&self) -> u32 {
        self.0.iter().filter(|g| g.1 == 0).map(|g| g.0).min().expect("m-primary")
    }

    pub fn y_bound(&self) -> u32 {
        self.0.iter().filter(|g| g.0 == 0).map(|g| g.1).min().expect("m-primary")
    }

    pub fn standard(&self) -> BTreeSet<(u32, u32)> {
        let (a, b) = (self.x_bound(), self.y_bound());
        (0..a)
            .flat_map(|i| (0..b).map(move |j| (i, j)))
            .filter(|&m| !self.contains(m))
            .collect()
    }

    pub fn colength(&self) -> u64 {
        self.standard().len() as u64
    }

    pub fn sum(&self, o: &Self) -> Self {
        Self::new(self.0.iter().chain(&o.0).copied())
    }

    pub fn product(&self, o: &Self) -> Self {
        Self::new(self.0.iter().flat_map(|&(i, j)| o.0.iter().map(move |&(p, q)| (i + p, j + q))))
    }

    pub fn power(&self, n: u32) -> Self {
        (0..n).fold(Staircase(vec![(0, 0)]), |acc, _| acc.product(self))
    }

    pub fn intersect(&self, o: &Self) -> Self {
        Self::new(self.0.iter().flat_map(|&(i, j)| o.0.iter().map(move |&(p, q)| (i.max(p), j.max(q)))))
    }

    pub fn colon_monomial(&self, (a, b): (u32, u32)) -> Self {
        Self::new(self.0.iter().map(|&(i, j)| (i.saturating_sub(a), j.saturating_sub(b))))
    }

    pub fn colon(&self, o: &Self) -> Self {
        o.0.iter()
            .map(|&m| self.colon_monomial(m))
            .reduce(|acc, c| acc.intersect(&c))
            .unwrap()
    }

    pub fn text(&self) -> String {
        self.0.iter().map(|&(i, j)| format!("x^{i}*y^{j}")).collect::<Vec<_>>().join(", ")
    }
}

