//! TOML run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;

use periodlab::cmfield::{Elem, FieldTower};
use periodlab::weights::WeightSystem;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub precision: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub weights: Vec<WeightSpec>,
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub d: u64,
    /// Monic, low to high.
    pub extension_poly: Vec<i64>,
    /// `[a, b]` for `a + b√-d`.
    pub k1_basis: Option<Vec<[i64; 2]>>,
    pub k0_poly: Option<Vec<i64>>,
    pub expect_c: Option<i64>,
}

impl FieldSpec {
    pub fn tower(&self) -> FieldTower {
        let mut t = FieldTower::new(self.d, self.extension_poly.clone());
        t.k1_basis = self.k1_basis.as_ref().map(|b| {
            b.iter().map(|&[a, c]| Elem::k1(BigRational::from_integer(a.into()), BigRational::from_integer(c.into()))).collect()
        });
        t.declared_k0_poly = self.k0_poly.clone();
        t
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub n: usize,
    pub mu: Vec<Vec<i64>>,
    pub nu: Vec<Vec<i64>>,
    pub chi: Vec<i64>,
}

impl WeightSpec {
    pub fn system(&self) -> WeightSystem {
        WeightSystem { n: self.n, mu: self.mu.clone(), nu: self.nu.clone(), chi: self.chi.clone() }
    }
}

/// Single-embedding grid for `balanced`: dominant `μ, ν` with entries in `entries`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub entries: [i64; 2],
    pub chi: [i64; 2],
    pub eta: Vec<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: Option<usize>,
    pub k: Option<usize>,
    /// Random admissible permutations per weight; all of them when absent.
    pub samples: Option<usize>,
    pub perms: Option<Vec<Vec<usize>>>,
    pub measure_scale: Option<f64>,
    pub ord0: Option<u32>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(f) = &self.field {
            let deg = f.tower().degree();
            for (i, w) in self.weights.iter().enumerate() {
                if w.mu.len() != deg || w.nu.len() != deg || w.chi.len() != deg {
                    return Err(CliError::Config(format!("weights[{i}]: expected {deg} embeddings")));
                }
            }
            for p in self.params.perms.iter().flatten() {
                if let Some(&bad) = p.iter().find(|&&i| i >= deg) {
                    return Err(CliError::Config(format!("permutation entry {bad} is not an embedding index")));
                }
            }
        }
        for (i, w) in self.weights.iter().enumerate() {
            if w.mu.iter().chain(&w.nu).any(|v| v.len() != w.n) {
                return Err(CliError::Config(format!("weights[{i}]: every weight needs {} entries", w.n)));
            }
        }
        if let Some(g) = &self.grid {
            if g.entries[0] > g.entries[1] || g.chi[0] > g.chi[1] {
                return Err(CliError::Config("grid ranges must be increasing".into()));
            }
        }
        Ok(())
    }

    /// Scalar settings echoed into the report.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        if let Some(f) = &self.field {
            m.insert("field".into(), format!("d={} extension_poly={:?}", f.d, f.extension_poly));
        }
        if !self.weights.is_empty() {
            m.insert("weights".into(), self.weights.len().to_string());
        }
        if let Some(g) = &self.grid {
            m.insert("grid".into(), format!("n={} entries={:?} chi={:?} eta={:?}", g.n, g.entries, g.chi, g.eta));
        }
        m
    }
}
