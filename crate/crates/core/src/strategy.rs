//! Name-keyed registry of chain-cover and ranking strategies, plus the named
//! index variants built from them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chains::{CoverStrategy, DegreeRank, GreedyCover, RandomRank, RankStrategy, TemporalCover};

/// Parameters handed to strategy factories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StrategyParams {
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{name}` (known: {known})")]
pub struct UnknownStrategy {
    pub kind: &'static str,
    pub name: String,
    pub known: String,
}

type CoverFactory = Box<dyn Fn(&StrategyParams) -> Box<dyn CoverStrategy> + Send + Sync>;
type RankFactory = Box<dyn Fn(&StrategyParams) -> Box<dyn RankStrategy> + Send + Sync>;

/// A named pairing of a cover strategy and a rank strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub name: &'static str,
    pub cover: &'static str,
    pub rank: &'static str,
}

pub const VARIANTS: &[Variant] = &[
    Variant {
        name: "topchain",
        cover: "temporal",
        rank: "degree",
    },
    Variant {
        name: "tc1",
        cover: "greedy",
        rank: "degree",
    },
    Variant {
        name: "tc2",
        cover: "temporal",
        rank: "random",
    },
];

pub fn variant(name: &str) -> Result<Variant, UnknownStrategy> {
    VARIANTS.iter().copied().find(|v| v.name == name).ok_or_else(|| UnknownStrategy {
        kind: "variant",
        name: name.to_string(),
        known: VARIANTS.iter().map(|v| v.name).collect::<Vec<_>>().join(", "),
    })
}

pub struct Registry {
    covers: BTreeMap<&'static str, CoverFactory>,
    ranks: BTreeMap<&'static str, RankFactory>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register_cover("temporal", |_| Box::new(TemporalCover));
        r.register_cover("greedy", |_| Box::new(GreedyCover));
        r.register_rank("degree", |_| Box::new(DegreeRank));
        r.register_rank("random", |p| Box::new(RandomRank { seed: p.seed }));
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            covers: BTreeMap::new(),
            ranks: BTreeMap::new(),
        }
    }

    pub fn register_cover<F>(&mut self, name: &'static str, factory: F)
    where
        F: Fn(&StrategyParams) -> Box<dyn CoverStrategy> + Send + Sync + 'static,
    {
        self.covers.insert(name, Box::new(factory));
    }

    pub fn register_rank<F>(&mut self, name: &'static str, factory: F)
    where
        F: Fn(&StrategyParams) -> Box<dyn RankStrategy> + Send + Sync + 'static,
    {
        self.ranks.insert(name, Box::new(factory));
    }

    pub fn cover(&self, name: &str, params: &StrategyParams) -> Result<Box<dyn CoverStrategy>, UnknownStrategy> {
        match self.covers.get(name) {
            Some(f) => Ok(f(params)),
            None => Err(UnknownStrategy {
                kind: "cover strategy",
                name: name.to_string(),
                known: self.cover_names().join(", "),
            }),
        }
    }

    pub fn rank(&self, name: &str, params: &StrategyParams) -> Result<Box<dyn RankStrategy>, UnknownStrategy> {
        match self.ranks.get(name) {
            Some(f) => Ok(f(params)),
            None => Err(UnknownStrategy {
                kind: "rank strategy",
                name: name.to_string(),
                known: self.rank_names().join(", "),
            }),
        }
    }

    pub fn cover_names(&self) -> Vec<&'static str> {
        self.covers.keys().copied().collect()
    }

    pub fn rank_names(&self) -> Vec<&'static str> {
        self.ranks.keys().copied().collect()
    }
}
