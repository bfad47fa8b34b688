//! Bundled input pairs and the seeded corpus of random monomial pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::monomial::{format_monomial, index};
use crate::error::Result;
use crate::joint_reduction::{monomial_candidates, sample_joint_reduction, SamplerConfig};
use crate::session::{Session, SessionConfig};

fn mono(i: u32, j: u32) -> String {
    format_monomial(index(i, j))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub first: String,
    pub second: String,
    pub description: String,
}

impl Preset {
    fn new(name: &str, first: &str, second: &str, description: &str) -> Self {
        Preset {
            name: name.into(),
            first: first.into(),
            second: second.into(),
            description: description.into(),
        }
    }

    pub fn config(&self) -> SessionConfig {
        SessionConfig::new(&self.first, &self.second)
    }
}

/// `I = m^l`, `J = (x^l, y^l)`.
pub fn power_versus_parameters(l: u32) -> Preset {
    let first = (0..=l)
        .map(|j| mono(l - j, j))
        .collect::<Vec<_>>()
        .join(", ");
    let second = format!("x^{l}, y^{l}");
    Preset::new(
        &format!("bhatt_l{l}"),
        &first,
        &second,
        &format!("maximal ideal power {l} against the parameter ideal (x^{l}, y^{l})"),
    )
}

/// The presets reachable by name from the command line.
pub fn named() -> Vec<Preset> {
    vec![
        Preset::new("maximal", "x, y", "x, y", "the maximal ideal against itself"),
        power_versus_parameters(2),
        power_versus_parameters(3),
        Preset::new(
            "depth_zero",
            "x^4, x^3*y, x*y^3, y^4",
            "x, y",
            "an ideal whose associated graded ring has depth zero, against the maximal ideal",
        ),
    ]
}

pub fn by_name(name: &str) -> Option<Preset> {
    named().into_iter().find(|p| p.name == name)
}

/// A random monomial ideal with pure powers of degree between 2 and `max_degree`
/// and mixed generators below them.
pub fn random_monomial_ideal(rng: &mut ChaCha8Rng, max_degree: u32) -> String {
    let a = rng.gen_range(2..=max_degree);
    let b = rng.gen_range(2..=max_degree);
    let mut gens = vec![mono(a, 0)];
    for i in 1..a {
        for j in 1..b {
            if i + j <= max_degree && rng.gen_bool(0.5) {
                gens.push(mono(i, j));
            }
        }
    }
    gens.push(mono(0, b));
    gens.join(", ")
}

/// `count` random monomial pairs, keeping only those whose monomial candidate pair
/// certifies as a joint reduction satisfying the superficial conditions.
pub fn random_monomial_pairs(seed: u64, count: usize, max_degree: u32) -> Result<Vec<Preset>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let sampler = SamplerConfig {
        max_attempts: 0,
        ..SamplerConfig::default()
    };
    let mut rejected = 0;
    while out.len() < count {
        let first = random_monomial_ideal(&mut rng, max_degree);
        let second = random_monomial_ideal(&mut rng, max_degree);
        let session = Session::new(&SessionConfig::new(&first, &second))?;
        let f = &session.filtration;
        if monomial_candidates(f.first(), f.second()).is_empty() || sample_joint_reduction(f, 0, &sampler).is_err() {
            rejected += 1;
            continue;
        }
        let n = out.len();
        out.push(Preset::new(
            &format!("random_{n}"),
            &first,
            &second,
            &format!("random monomial pair {n} from seed {seed} ({rejected} rejected so far)"),
        ));
    }
    Ok(out)
}

pub const CORPUS_SEED: u64 = 20240611;

/// Named presets, further monomial pairs, and five seeded random monomial pairs.
pub fn corpus() -> Result<Vec<Preset>> {
    let mut out = named();
    out.push(Preset::new("square_max", "x^2, x*y, y^2", "x^2, x*y, y^2", "the square of the maximal ideal twice"));
    out.push(Preset::new("parameters_2", "x^2, y^2", "x^2, y^2", "a parameter ideal twice"));
    out.push(Preset::new("mixed_parameters", "x^2, y^3", "x^3, y^2", "two different parameter ideals"));
    out.extend(random_monomial_pairs(CORPUS_SEED, 5, 5)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_strings() {
        let p = power_versus_parameters(3);
        assert_eq!(p.first, "x^3, x^2*y, x*y^2, y^3");
        assert_eq!(p.second, "x^3, y^3");
        assert!(by_name("depth_zero").is_some());
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn random_pairs_are_reproducible() {
        let a = random_monomial_pairs(7, 2, 5).unwrap();
        let b = random_monomial_pairs(7, 2, 5).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(p.first.starts_with('x') && p.first.ends_with(|c: char| c.is_ascii_digit() || c == 'y'));
        }
    }
}
