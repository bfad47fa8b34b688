use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::LocalIdeal;
use crate::error::Result;

/// The filtration `{I^r J^s}` for `r, s >= 0` with cached powers and products.
pub struct BiFiltration {
    i: LocalIdeal,
    j: LocalIdeal,
    i_powers: Mutex<Vec<Arc<LocalIdeal>>>,
    j_powers: Mutex<Vec<Arc<LocalIdeal>>>,
    cache: Mutex<HashMap<(u32, u32), Arc<LocalIdeal>>>,
}

fn power_from(cache: &Mutex<Vec<Arc<LocalIdeal>>>, base: &LocalIdeal, n: u32) -> Result<Arc<LocalIdeal>> {
    let n = n as usize;
    let (mut acc, mut have) = {
        let powers = cache.lock().unwrap();
        if let Some(p) = powers.get(n) {
            return Ok(p.clone());
        }
        (powers.last().unwrap().clone(), powers.len())
    };
    // extend one power at a time so every intermediate power is cached too
    while have <= n {
        let next = Arc::new(acc.product(base)?);
        let mut powers = cache.lock().unwrap();
        if powers.len() == have {
            powers.push(next.clone());
        }
        acc = powers[have].clone();
        have += 1;
    }
    Ok(acc)
}

impl BiFiltration {
    pub fn new(i: LocalIdeal, j: LocalIdeal) -> Self {
        let unit = Arc::new(LocalIdeal::unit(&i.algebra()));
        BiFiltration {
            i,
            j,
            i_powers: Mutex::new(vec![unit.clone()]),
            j_powers: Mutex::new(vec![unit]),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn first(&self) -> &LocalIdeal {
        &self.i
    }

    pub fn second(&self) -> &LocalIdeal {
        &self.j
    }

    pub fn first_power(&self, r: u32) -> Result<Arc<LocalIdeal>> {
        power_from(&self.i_powers, &self.i, r)
    }

    pub fn second_power(&self, s: u32) -> Result<Arc<LocalIdeal>> {
        power_from(&self.j_powers, &self.j, s)
    }

    /// `I^r J^s`, cached. Concurrent callers may compute the same entry twice; the
    /// results are identical and the first insertion wins.
    pub fn power_product(&self, r: u32, s: u32) -> Result<Arc<LocalIdeal>> {
        if let Some(k) = self.cache.lock().unwrap().get(&(r, s)) {
            return Ok(k.clone());
        }
        let ir = self.first_power(r)?;
        let js = self.second_power(s)?;
        let k = Arc::new(ir.product(&js)?);
        let mut cache = self.cache.lock().unwrap();
        Ok(cache.entry((r, s)).or_insert(k).clone())
    }

    /// `λ(R / I^r J^s)`.
    pub fn length(&self, r: u32, s: u32) -> Result<u64> {
        self.power_product(r, s)?.colength()
    }

    pub fn length_table(&self, r_max: u32, s_max: u32) -> Result<BigradedLengthTable> {
        // powers first, sequentially; then the products fan out by cell
        self.first_power(r_max)?;
        self.second_power(s_max)?;
        let cells: Vec<(u32, u32)> = (0..=r_max).flat_map(|r| (0..=s_max).map(move |s| (r, s))).collect();
        let values: Vec<u64> = cells
            .par_iter()
            .map(|&(r, s)| self.length(r, s))
            .collect::<Result<_>>()?;
        let rows = values.chunks(s_max as usize + 1).map(|c| c.to_vec()).collect();
        let alg = self.i.algebra();
        Ok(BigradedLengthTable {
            values: rows,
            provenance: Provenance {
                prime: alg.field().modulus(),
                order: alg.order(),
                first: generator_texts(&self.i),
                second: generator_texts(&self.j),
            },
        })
    }
}

pub(crate) fn generator_texts(k: &LocalIdeal) -> Vec<String> {
    let given = k.given_generators();
    if given.is_empty() {
        k.generators().iter().map(|g| g.to_string()).collect()
    } else {
        given
            .iter()
            .map(|g| g.source_text().map(str::to_string).unwrap_or_else(|| g.to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub prime: u32,
    pub order: u32,
    #[serde(rename = "I")]
    pub first: Vec<String>,
    #[serde(rename = "J")]
    pub second: Vec<String>,
}

/// `T(r,s) = λ(R/I^r J^s)` on `[0, r_max] × [0, s_max]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedLengthTable {
    values: Vec<Vec<u64>>,
    pub provenance: Provenance,
}

impl BigradedLengthTable {
    pub fn from_values(values: Vec<Vec<u64>>, provenance: Provenance) -> Self {
        BigradedLengthTable { values, provenance }
    }

    pub fn get(&self, r: u32, s: u32) -> u64 {
        self.values[r as usize][s as usize]
    }

    pub fn r_max(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn s_max(&self) -> u32 {
        self.values[0].len() as u32 - 1
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.values
    }

    pub fn row(&self, r: u32) -> Vec<i64> {
        self.values[r as usize].iter().map(|&v| v as i64).collect()
    }

    pub fn column(&self, s: u32) -> Vec<i64> {
        self.values.iter().map(|row| row[s as usize] as i64).collect()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..=self.r_max().min(self.s_max())).map(|n| self.get(n, n) as i64).collect()
    }

    /// CSV with a header row of s-indices and the r-index in the first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r\\s");
        for s in 0..=self.s_max() {
            write!(out, ",{s}").unwrap();
        }
        out.push('\n');
        for (r, row) in self.values.iter().enumerate() {
            write!(out, "{r}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = BTreeMap::new();
        obj.insert("report_version", serde_json::json!(1));
        obj.insert("kind", serde_json::json!("length_table"));
        obj.insert("provenance", serde_json::to_value(&self.provenance).unwrap());
        obj.insert("r_max", serde_json::json!(self.r_max()));
        obj.insert("s_max", serde_json::json!(self.s_max()));
        obj.insert("values", serde_json::json!(self.values));
        serde_json::to_value(obj).unwrap()
    }

    pub fn to_text(&self) -> String {
        let width = self.values.iter().flatten().map(|v| v.to_string().len()).max().unwrap_or(1).max(3);
        let mut out = format!("{:>4} |", "r\\s");
        for s in 0..=self.s_max() {
            write!(out, " {s:>width$}").unwrap();
        }
        out.push('\n');
        out.push_str(&"-".repeat(6 + (width + 1) * (self.s_max() as usize + 1)));
        out.push('\n');
        for (r, row) in self.values.iter().enumerate() {
            write!(out, "{r:>4} |").unwrap();
            for v in row {
                write!(out, " {v:>width$}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TruncatedAlgebra;
    use crate::linalg::PrimeField;

    fn filtration(i: &str, j: &str) -> BiFiltration {
        let alg = TruncatedAlgebra::new(PrimeField::default(), 80);
        let i = LocalIdeal::from_generators(&alg.parse_generators(i).unwrap()).unwrap();
        let j = LocalIdeal::from_generators(&alg.parse_generators(j).unwrap()).unwrap();
        BiFiltration::new(i, j)
    }

    fn binom2(n: u64) -> u64 {
        n * (n.saturating_sub(1)) / 2
    }

    #[test]
    fn maximal_ideal_table() {
        let f = filtration("x, y", "x, y");
        assert!(f.power_product(0, 0).unwrap().is_unit());
        let t = f.length_table(3, 3).unwrap();
        for r in 0..=3 {
            for s in 0..=3 {
                assert_eq!(t.get(r, s), binom2(r as u64 + s as u64 + 1));
            }
        }
    }

    #[test]
    fn example_pair_table() {
        let f = filtration("x^2, x*y, y^2", "x^2, y^2");
        assert_eq!(f.length(2, 1).unwrap(), 21);
        let t = f.length_table(4, 4).unwrap();
        for r in 1..=4u64 {
            for s in 1..=4u64 {
                assert_eq!(t.get(r as u32, s as u32), binom2(2 * (r + s) + 1));
            }
        }
        assert_eq!(t.get(0, 1), 4);
    }

    #[test]
    fn csv_layout() {
        let f = filtration("x, y", "x, y");
        let csv = f.length_table(1, 2).unwrap().to_csv();
        assert_eq!(csv, "r\\s,0,1,2\n0,0,1,3\n1,1,3,6\n");
    }
}
