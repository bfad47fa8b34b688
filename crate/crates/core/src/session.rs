use std::path::PathBuf;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{LocalIdeal, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::filtration::{BiFiltration, BigradedLengthTable, Provenance};
use crate::joint_reduction::{sample_joint_reduction, JointReductionCert, Pair, SamplerConfig};
use crate::linalg::{PrimeField, DEFAULT_PRIME};
use crate::polyfit::CoefficientReport;

/// Extra degrees added to the computed truncation order.
pub const SAFETY_MARGIN: u32 = 8;
const MAX_ESCALATIONS: u32 = 6;
/// Capacity used only to measure the adequacy of the input ideals.
const PROBE_ORDER: u32 = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub prime: u32,
    /// Truncation order override; computed from the inputs when absent.
    pub order: Option<u32>,
    #[serde(rename = "I")]
    pub first: String,
    #[serde(rename = "J")]
    pub second: String,
    pub r_max: u32,
    pub s_max: u32,
    pub k_max: u32,
    /// Smallest k of the band used to fit `λ(L(r,s;k))` in k.
    pub k_min: u32,
    pub seed: Option<u64>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            prime: DEFAULT_PRIME,
            order: None,
            first: String::new(),
            second: String::new(),
            r_max: 8,
            s_max: 8,
            k_max: 10,
            k_min: 4,
            seed: None,
            format: OutputFormat::Json,
            output: None,
        }
    }
}

impl SessionConfig {
    pub fn new(first: &str, second: &str) -> Self {
        SessionConfig {
            first: first.into(),
            second: second.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        PrimeField::new(self.prime as u64)?;
        if self.first.trim().is_empty() || self.second.trim().is_empty() {
            return Err(Error::Config("both I and J must be given".into()));
        }
        if self.r_max < 4 || self.s_max < 4 {
            return Err(Error::Config("windows must be at least 4 in each direction".into()));
        }
        if self.k_min == 0 || self.k_max < self.k_min + 3 {
            return Err(Error::Config("k band needs k_min >= 1 and k_max >= k_min + 3".into()));
        }
        Ok(())
    }

    /// Fitting band for `λ(L(r,s;k))` and its verification band.
    pub fn k_bands(&self) -> ((u32, u32), (u32, u32)) {
        ((self.k_min, self.k_max - 2), (self.k_max - 1, self.k_max))
    }

    /// The seed in force: the configured one, or one derived from the inputs so that
    /// reruns of the same configuration stay reproducible.
    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            // FNV-1a over the defining strings
            let mut h: u64 = 0xcbf2_9ce4_8422_2325;
            for b in format!("{}|{}|{}", self.prime, self.first, self.second).bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
            h
        })
    }
}

/// The truncation order needed for a session: products up to `I^{r+2k} J^{s+2k}` occur
/// in the Koszul denominators `a^k I^r J^{s+k} + b^k I^{r+k} J^s`.
pub fn required_order(cfg: &SessionConfig, t_first: u32, t_second: u32) -> u32 {
    SAFETY_MARGIN + (cfg.r_max + 2 * cfg.k_max) * t_first + (cfg.s_max + 2 * cfg.k_max) * t_second
}

fn parse_ideal(alg: &TruncatedAlgebra, text: &str, name: &str) -> Result<LocalIdeal> {
    let gens = alg.parse_generators(text).map_err(|e| match e {
        Error::Parse { position, message } => Error::Parse {
            position,
            message: format!("in {name}: {message}"),
        },
        other => other,
    })?;
    LocalIdeal::from_generators(&gens)
}

/// One computation context: the ideals, their filtration, and lazily computed
/// table, coefficients and joint reduction.
pub struct Session {
    pub config: SessionConfig,
    pub algebra: TruncatedAlgebra,
    pub filtration: BiFiltration,
    pub escalations: u32,
    table: OnceLock<BigradedLengthTable>,
    coefficients: OnceLock<CoefficientReport>,
    joint: OnceLock<(Pair, JointReductionCert)>,
}

impl Session {
    pub fn with_order(config: &SessionConfig, order: u32) -> Result<Self> {
        config.validate()?;
        let field = PrimeField::new(config.prime as u64)?;
        let algebra = TruncatedAlgebra::new(field, order);
        let i = parse_ideal(&algebra, &config.first, "I")?;
        let j = parse_ideal(&algebra, &config.second, "J")?;
        Ok(Session {
            config: config.clone(),
            algebra,
            filtration: BiFiltration::new(i, j),
            escalations: 0,
            table: OnceLock::new(),
            coefficients: OnceLock::new(),
            joint: OnceLock::new(),
        })
    }

    /// The order from the configuration, or from the adequacy of the inputs.
    pub fn initial_order(config: &SessionConfig) -> Result<u32> {
        config.validate()?;
        if let Some(n) = config.order {
            return Ok(n);
        }
        let field = PrimeField::new(config.prime as u64)?;
        let probe = TruncatedAlgebra::new(field, PROBE_ORDER);
        let ti = parse_ideal(&probe, &config.first, "I")?.adequacy_order()?;
        let tj = parse_ideal(&probe, &config.second, "J")?.adequacy_order()?;
        Ok(required_order(config, ti, tj))
    }

    pub fn new(config: &SessionConfig) -> Result<Self> {
        Self::with_order(config, Self::initial_order(config)?)
    }

    /// Runs `job` in a fresh session, raising the truncation order (`N ← max(⌈1.5N⌉,
    /// needed)`) and starting over whenever it reports insufficient truncation.
    pub fn run<T>(config: &SessionConfig, mut job: impl FnMut(&Session) -> Result<T>) -> Result<T> {
        let mut order = Self::initial_order(config)?;
        for attempt in 0..=MAX_ESCALATIONS {
            let mut session = match Self::with_order(config, order) {
                Err(Error::NotMPrimary { .. }) if config.order.is_some() && attempt < MAX_ESCALATIONS => {
                    order = (order * 3).div_ceil(2);
                    continue;
                }
                other => other?,
            };
            session.escalations = attempt;
            match job(&session) {
                Err(Error::TruncationInsufficient { needed, .. }) if attempt < MAX_ESCALATIONS => {
                    let next = ((order * 3).div_ceil(2)).max(needed);
                    eprintln!("truncation order {order} insufficient, retrying with {next}");
                    order = next;
                }
                other => return other,
            }
        }
        unreachable!("escalation loop always returns")
    }

    /// Runs `job` on this session, replacing it with a higher-order one when the
    /// job reports insufficient truncation. Cached results survive successful calls.
    pub fn run_in_place<T>(&mut self, mut job: impl FnMut(&Session) -> Result<T>) -> Result<T> {
        loop {
            match job(self) {
                Err(Error::TruncationInsufficient { needed, .. }) if self.escalations < MAX_ESCALATIONS => {
                    let order = self.algebra.order();
                    let next = ((order * 3).div_ceil(2)).max(needed);
                    let escalations = self.escalations + 1;
                    *self = Self::with_order(&self.config, next)?;
                    self.escalations = escalations;
                }
                other => return other,
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.algebra.field()
    }

    pub fn seed(&self) -> u64 {
        self.config.effective_seed()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            prime: self.field().modulus(),
            order: self.algebra.order(),
            first: self.config.first.split(',').map(|g| g.trim().to_string()).collect(),
            second: self.config.second.split(',').map(|g| g.trim().to_string()).collect(),
        }
    }

    pub fn table(&self) -> Result<&BigradedLengthTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let mut t = self.filtration.length_table(self.config.r_max, self.config.s_max)?;
        t.provenance = self.provenance();
        Ok(self.table.get_or_init(|| t))
    }

    /// Coefficients; on an unstable fit the window is enlarged by 4 once and refitted.
    pub fn coefficients(&self) -> Result<&CoefficientReport> {
        if let Some(c) = self.coefficients.get() {
            return Ok(c);
        }
        let n_max = self.config.r_max.max(self.config.s_max);
        let report = match CoefficientReport::compute(&self.filtration, self.table()?, n_max) {
            Err(Error::FitUnstable(msg)) => {
                eprintln!("fit unstable ({msg}); enlarging the window by 4 and refitting");
                let wide = self
                    .filtration
                    .length_table(self.config.r_max + 4, self.config.s_max + 4)?;
                CoefficientReport::compute(&self.filtration, &wide, n_max + 4)?
            }
            other => other?,
        };
        Ok(self.coefficients.get_or_init(|| report))
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            superficial_window: (self.config.r_max.min(6), self.config.s_max.min(6)),
            ..SamplerConfig::default()
        }
    }

    pub fn joint_reduction(&self) -> Result<&(Pair, JointReductionCert)> {
        if let Some(j) = self.joint.get() {
            return Ok(j);
        }
        let found = sample_joint_reduction(&self.filtration, self.seed(), &self.sampler_config())?;
        Ok(self.joint.get_or_init(|| found))
    }
}
