//! Scheme strategy objects and the name-keyed registry the CLI selects from.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DistanceGenerator, FeasibleSet};
use crate::problem::{Vector, ViProblem};
use crate::rng::Draw;
use crate::solvers::{esa_step, mpsa_step, sa_step};

/// Distance-generator choice carried by a scheme spec; the concrete
/// generator is built once the problem dimension is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Euclidean,
    ShiftedEntropy,
    PowerSum,
}

impl GeneratorSpec {
    pub fn build(&self, dim: usize) -> Result<DistanceGenerator> {
        match self {
            GeneratorSpec::Euclidean => Ok(DistanceGenerator::Euclidean),
            GeneratorSpec::ShiftedEntropy => Ok(DistanceGenerator::shifted_entropy()),
            GeneratorSpec::PowerSum => DistanceGenerator::power_sum(dim),
        }
    }
}

/// Parsed scheme selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeSpec {
    Sa,
    Esa,
    Mpsa(GeneratorSpec),
}

impl SchemeSpec {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "sa" => Ok(SchemeSpec::Sa),
            "esa" => Ok(SchemeSpec::Esa),
            "mpsa-euclidean" | "mpsa" => Ok(SchemeSpec::Mpsa(GeneratorSpec::Euclidean)),
            "mpsa-entropy" | "mpsa-a" => Ok(SchemeSpec::Mpsa(GeneratorSpec::ShiftedEntropy)),
            "mpsa-power" | "mpsa-b" => Ok(SchemeSpec::Mpsa(GeneratorSpec::PowerSum)),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeSpec::Sa => "sa",
            SchemeSpec::Esa => "esa",
            SchemeSpec::Mpsa(GeneratorSpec::Euclidean) => "mpsa-euclidean",
            SchemeSpec::Mpsa(GeneratorSpec::ShiftedEntropy) => "mpsa-entropy",
            SchemeSpec::Mpsa(GeneratorSpec::PowerSum) => "mpsa-power",
        }
    }

    /// Build a step strategy via the default registry.
    pub fn build_scheme(&self, set: &FeasibleSet, dim: usize) -> Result<Box<dyn Scheme>> {
        let _ = set;
        match self {
            SchemeSpec::Sa => Ok(Box::new(SaScheme)),
            SchemeSpec::Esa => Ok(Box::new(EsaScheme)),
            SchemeSpec::Mpsa(gen_spec) => Ok(Box::new(MpsaScheme {
                gen: gen_spec.build(dim)?,
            })),
        }
    }
}

/// Output of one scheme iteration.
#[derive(Debug, Clone)]
pub struct SchemeStep {
    /// Extragradient midpoint, when the scheme has one.
    pub midpoint: Option<Vector>,
    pub next: Vector,
}

/// One iteration of a stochastic approximation scheme. Implementations pull
/// their noise exclusively from the two draws handed in, which is what makes
/// shared-stream comparisons across schemes exact.
pub trait Scheme: Send + Sync {
    fn name(&self) -> &str;

    fn step(
        &self,
        problem: &ViProblem,
        x: &Vector,
        gamma: f64,
        draw_first: &Draw,
        draw_second: &Draw,
    ) -> Result<SchemeStep>;
}

struct SaScheme;

impl Scheme for SaScheme {
    fn name(&self) -> &str {
        "sa"
    }

    fn step(
        &self,
        problem: &ViProblem,
        x: &Vector,
        gamma: f64,
        draw_first: &Draw,
        _draw_second: &Draw,
    ) -> Result<SchemeStep> {
        Ok(SchemeStep {
            midpoint: None,
            next: sa_step(problem, x, gamma, draw_first)?,
        })
    }
}

struct EsaScheme;

impl Scheme for EsaScheme {
    fn name(&self) -> &str {
        "esa"
    }

    fn step(
        &self,
        problem: &ViProblem,
        x: &Vector,
        gamma: f64,
        draw_first: &Draw,
        draw_second: &Draw,
    ) -> Result<SchemeStep> {
        let (midpoint, next) = esa_step(problem, x, gamma, draw_first, draw_second)?;
        Ok(SchemeStep {
            midpoint: Some(midpoint),
            next,
        })
    }
}

struct MpsaScheme {
    gen: DistanceGenerator,
}

impl Scheme for MpsaScheme {
    fn name(&self) -> &str {
        match self.gen {
            DistanceGenerator::Euclidean => "mpsa-euclidean",
            DistanceGenerator::ShiftedEntropy { .. } => "mpsa-entropy",
            DistanceGenerator::PowerSum { .. } => "mpsa-power",
        }
    }

    fn step(
        &self,
        problem: &ViProblem,
        x: &Vector,
        gamma: f64,
        draw_first: &Draw,
        draw_second: &Draw,
    ) -> Result<SchemeStep> {
        let (midpoint, next) = mpsa_step(problem, &self.gen, x, gamma, draw_first, draw_second)?;
        Ok(SchemeStep {
            midpoint: Some(midpoint),
            next,
        })
    }
}

/// Builds a scheme for a concrete feasible set.
pub trait SchemeFactory: Send + Sync {
    fn build(&self, set: &FeasibleSet) -> Result<Box<dyn Scheme>>;
}

struct SpecFactory(SchemeSpec);

impl SchemeFactory for SpecFactory {
    fn build(&self, set: &FeasibleSet) -> Result<Box<dyn Scheme>> {
        self.0.build_scheme(set, set.dim())
    }
}

/// Name-keyed scheme registry. The built-ins cover the three schemes (with
/// one entry per distance generator); callers may register additional
/// strategies under new names.
pub struct SchemeRegistry {
    entries: BTreeMap<String, Arc<dyn SchemeFactory>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        SchemeRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = SchemeRegistry::empty();
        for (names, spec) in [
            (&["sa"][..], SchemeSpec::Sa),
            (&["esa"][..], SchemeSpec::Esa),
            (
                &["mpsa-euclidean", "mpsa"][..],
                SchemeSpec::Mpsa(GeneratorSpec::Euclidean),
            ),
            (
                &["mpsa-entropy", "mpsa-a"][..],
                SchemeSpec::Mpsa(GeneratorSpec::ShiftedEntropy),
            ),
            (
                &["mpsa-power", "mpsa-b"][..],
                SchemeSpec::Mpsa(GeneratorSpec::PowerSum),
            ),
        ] {
            let factory: Arc<dyn SchemeFactory> = Arc::new(SpecFactory(spec));
            for name in names {
                reg.entries.insert((*name).to_string(), factory.clone());
            }
        }
        reg
    }

    pub fn register(&mut self, name: impl Into<String>, factory: Arc<dyn SchemeFactory>) {
        self.entries.insert(name.into(), factory);
    }

    pub fn build(&self, name: &str, set: &FeasibleSet) -> Result<Box<dyn Scheme>> {
        match self.entries.get(&name.trim().to_ascii_lowercase()) {
            Some(factory) => factory.build(set),
            None => Err(Error::UnknownScheme(name.to_string())),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        SchemeRegistry::with_builtins()
    }
}
