//! The `--params` file.

use std::path::Path;

use revsig::grouplight::GroupAction;
use revsig::primitives::{CrhInstance, OwfInstance};
use revsig::rng;
use revsig::ttoss::FamilyParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OwfMode {
    Standard,
    IdealToy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyMode {
    KernelIdeal,
    BlumInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionMode {
    Toy,
    Generated,
}

/// Scheme sizes shared by every subcommand. Missing fields take defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Parallel repetitions in every one-shot and tokenized scheme.
    pub n: usize,
    /// Input width of the one-way function.
    #[serde(alias = "ℓ")]
    pub ell: usize,
    pub owf: OwfMode,
    pub family: FamilyMode,
    pub kernel_width: usize,
    pub modulus_bits: u32,
    /// Explicit Blum primes; override `modulus_bits`.
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub hash_bits: usize,
    pub action: ActionMode,
    pub p_bits: u64,
    pub q_bits: u64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n: 16,
            ell: 128,
            owf: OwfMode::Standard,
            family: FamilyMode::KernelIdeal,
            kernel_width: 16,
            modulus_bits: 32,
            p: None,
            q: None,
            hash_bits: 32,
            action: ActionMode::Generated,
            p_bits: 64,
            q_bits: 32,
        }
    }
}

impl Params {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let p: Self = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if p.n == 0 {
            return Err(CliError::Usage("n must be at least 1".into()));
        }
        Ok(p)
    }

    pub fn owf(&self, seed: u64) -> Result<OwfInstance, CliError> {
        match self.owf {
            OwfMode::Standard => Ok(OwfInstance::standard(self.ell)),
            OwfMode::IdealToy => Ok(OwfInstance::ideal_toy(seed, self.ell, 64)?),
        }
    }

    pub fn crh(&self) -> Result<CrhInstance, CliError> {
        Ok(CrhInstance::new(self.hash_bits)?)
    }

    pub fn family(&self) -> FamilyParams {
        match (self.family, self.p, self.q) {
            (FamilyMode::BlumInteger, Some(p), Some(q)) => FamilyParams::BlumPrimes { p, q },
            (FamilyMode::BlumInteger, _, _) => FamilyParams::BlumInteger { modulus_bits: self.modulus_bits },
            (FamilyMode::KernelIdeal, _, _) => FamilyParams::KernelIdeal { width: self.kernel_width },
        }
    }

    pub fn group_action(&self, seed: u64) -> Result<GroupAction, CliError> {
        match self.action {
            ActionMode::Toy => Ok(GroupAction::toy()),
            ActionMode::Generated => {
                Ok(GroupAction::generate(&mut rng::derived(seed, u64::MAX), self.p_bits, self.q_bits)?)
            }
        }
    }
}
