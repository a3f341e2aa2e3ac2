//! Weighted cover of version spaces: the shared state of the cover-based
//! learners. Each entry pairs a non-empty version space (a mask over the
//! class) with a positive rational weight; entries predict through a
//! per-entry online predictor (SOA by default), and the cover aggregates
//! those predictions as an exact weighted vote.
//!
//! Entries with identical version spaces are deliberately kept separate: the
//! mistake-bound arguments count entries as nodes of a branching tree, and
//! merging would distort that bookkeeping.

use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::concepts::{ConceptClass, Instance, LabeledExample};
use crate::dims::LdimCache;
use crate::{rat_int, Error, Rat, Result};

/// Hard cap on live entries; branching multiplies entry counts, and a run
/// that reaches this is degenerate enough to abort honestly.
pub const MAX_ENTRIES: usize = 4_000_000;

/// Per-entry online predictor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredictorKind {
    /// Standard optimal algorithm: label whose restriction keeps the larger
    /// Littlestone dimension, ties toward 1. Mistake budget `ldim`.
    Soa,
    /// Majority of the surviving version space, ties toward 1. Mistake
    /// budget `floor(log2 |C|)`. Exists to exercise the conversion that
    /// swaps the optimal predictor for any mistake-bounded one.
    Halving,
}

#[derive(Clone, Debug)]
pub struct CoverEntry {
    pub mask: Bits,
    pub weight: Rat,
}

/// Snapshot of cover bookkeeping after a round, for invariant checking.
#[derive(Clone, Debug)]
pub struct RoundStats {
    pub weight_before: Rat,
    pub weight_after: Rat,
    pub entries_after: usize,
    pub min_weight_after: Option<Rat>,
    /// Concepts present in at least one entry.
    pub mask_union_after: Bits,
    /// Number of entries containing each concept.
    pub containing_counts_after: Vec<u64>,
}

pub struct WeightedCover<'a> {
    class: &'a ConceptClass,
    cache: LdimCache<'a>,
    predictor: PredictorKind,
    pub eta: Rat,
    pub entries: Vec<CoverEntry>,
    /// Test hook: when set, mistake updates skip the weight decay. Used only
    /// by the negative-control path of the verification suite.
    pub disable_weight_decay: bool,
}

impl<'a> WeightedCover<'a> {
    pub fn new(class: &'a ConceptClass, eta: Rat, predictor: PredictorKind) -> Result<Self> {
        if class.is_empty() {
            return Err(Error::EmptyClass);
        }
        if eta <= Rat::zero() || eta >= Rat::one() {
            return Err(Error::InvalidParameter("eta must be in (0, 1)".into()));
        }
        Ok(WeightedCover {
            class,
            cache: LdimCache::new(class),
            predictor,
            eta,
            entries: vec![CoverEntry {
                mask: class.full_mask(),
                weight: rat_int(1),
            }],
            disable_weight_decay: false,
        })
    }

    pub fn class(&self) -> &'a ConceptClass {
        self.class
    }

    pub fn cache(&self) -> &LdimCache<'a> {
        &self.cache
    }

    /// Mistake budget of the per-entry predictor on realizable paths; entry
    /// weights never fall below `eta^budget`.
    pub fn predictor_budget(&self) -> i64 {
        match self.predictor {
            PredictorKind::Soa => self.cache.ldim_mask(&self.class.full_mask()).max(0),
            PredictorKind::Halving => (usize::BITS - 1 - self.class.len().leading_zeros()) as i64,
        }
    }

    pub fn entry_predict(&self, mask: &Bits, x: Instance) -> bool {
        match self.predictor {
            PredictorKind::Soa => self.cache.soa_mask(mask, x),
            PredictorKind::Halving => {
                let ones = mask.and(self.class.mask_one(x)).count_ones();
                2 * ones >= mask.count_ones()
            }
        }
    }

    pub fn total_weight(&self) -> Rat {
        self.entries.iter().map(|e| e.weight.clone()).sum()
    }

    pub fn is_exhausted(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact weighted average of per-entry predictions at `x`.
    pub fn vote(&self, x: Instance) -> Result<Rat> {
        if self.entries.is_empty() {
            return Err(Error::EmptyClass);
        }
        let mut num = Rat::zero();
        let mut den = Rat::zero();
        for e in &self.entries {
            if self.entry_predict(&e.mask, x) {
                num += &e.weight;
            }
            den += &e.weight;
        }
        Ok(num / den)
    }

    pub fn maj(&self, x: Instance) -> Result<bool> {
        Ok(self.vote(x)? >= Rat::new(1.into(), 2.into()))
    }

    /// Instances whose vote is within `eps` of 0 or 1, labeled by the
    /// majority. Empty when the cover has no entries.
    pub fn highvote(&self, eps: &Rat) -> Result<Vec<LabeledExample>> {
        if self.entries.is_empty() {
            return Ok(Vec::new());
        }
        let one = Rat::one();
        let mut out = Vec::new();
        for x in self.class.instances() {
            let v = self.vote(x)?;
            if v <= *eps || v >= &one - eps {
                out.push(LabeledExample { x, y: self.maj(x)? });
            }
        }
        Ok(out)
    }

    /// Mistake update: decay entries whose predictor got `e` wrong, restrict
    /// every entry by `e`, drop the emptied ones.
    pub fn update_mistake(&mut self, e: LabeledExample) {
        let old = std::mem::take(&mut self.entries);
        let mut next = Vec::with_capacity(old.len());
        for entry in old {
            let wrong = self.cache_predict(&entry.mask, e.x) != e.y;
            let mask = self.class.restrict_mask(&entry.mask, e);
            if mask.is_empty() {
                continue;
            }
            let weight = if wrong && !self.disable_weight_decay {
                &entry.weight * &self.eta
            } else {
                entry.weight
            };
            next.push(CoverEntry { mask, weight });
        }
        self.entries = next;
    }

    fn cache_predict(&self, mask: &Bits, x: Instance) -> bool {
        self.entry_predict(mask, x)
    }

    /// Branch update: every entry spawns one child per witness element
    /// `(x_j, y_j)`, decayed when the predictor agreed with `y_j` and
    /// restricted by the flipped label `(x_j, 1 - y_j)`; empty children are
    /// dropped.
    pub fn branch(&mut self, witness: &[LabeledExample]) -> Result<()> {
        if self
            .entries
            .len()
            .checked_mul(witness.len())
            .is_none_or(|v| v > MAX_ENTRIES)
        {
            return Err(Error::CapExceeded {
                what: "cover entries",
                limit: MAX_ENTRIES as u64,
            });
        }
        let old = std::mem::take(&mut self.entries);
        let mut next = Vec::new();
        for entry in old {
            for &e in witness {
                let agreed = self.cache_predict(&entry.mask, e.x) == e.y;
                let flipped = LabeledExample { x: e.x, y: !e.y };
                let mask = self.class.restrict_mask(&entry.mask, flipped);
                if mask.is_empty() {
                    continue;
                }
                let weight = if agreed && !self.disable_weight_decay {
                    &entry.weight * &self.eta
                } else {
                    entry.weight.clone()
                };
                next.push(CoverEntry { mask, weight });
            }
        }
        self.entries = next;
        Ok(())
    }

    pub fn stats(&self, weight_before: Rat) -> RoundStats {
        let mut union = Bits::zeros(self.class.len());
        let mut counts = vec![0u64; self.class.len()];
        let mut min_w: Option<Rat> = None;
        for e in &self.entries {
            union.or_in_place(&e.mask);
            for i in e.mask.iter_ones() {
                counts[i] += 1;
            }
            if min_w.as_ref().is_none_or(|m| e.weight < *m) {
                min_w = Some(e.weight.clone());
            }
        }
        RoundStats {
            weight_before,
            weight_after: self.total_weight(),
            entries_after: self.entries.len(),
            min_weight_after: min_w,
            mask_union_after: union,
            containing_counts_after: counts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn initial_cover_votes_like_soa() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let cover = WeightedCover::new(&s3, rat(1, 4), PredictorKind::Soa).unwrap();
        for x in s3.instances() {
            assert_eq!(cover.vote(x).unwrap(), rat_int(0));
        }
        let hv = cover.highvote(&rat(1, 4)).unwrap();
        assert_eq!(hv.len(), 3);
        assert!(hv.iter().all(|e| !e.y));
    }

    #[test]
    fn highvote_eps_zero_is_unanimous_only() {
        let p2 = ConceptClass::powerset(2).unwrap();
        let mut cover = WeightedCover::new(&p2, rat(1, 4), PredictorKind::Soa).unwrap();
        // Two entries that disagree at x0: {10,11} predicts 1, {00,01} predicts 0.
        let one = p2.label_mask(Instance(0), true);
        let zero = p2.label_mask(Instance(0), false);
        cover.entries = vec![
            CoverEntry {
                mask: one,
                weight: rat_int(1),
            },
            CoverEntry {
                mask: zero,
                weight: rat_int(1),
            },
        ];
        let hv = cover.highvote(&rat_int(0)).unwrap();
        assert!(hv.iter().all(|e| e.x.0 != 0));
        // Vote exactly 1/2 at x0 is excluded even at eps = 1/4.
        let hv = cover.highvote(&rat(1, 4)).unwrap();
        assert!(hv.iter().all(|e| e.x.0 != 0));
    }

    #[test]
    fn mistake_update_decays_and_restricts() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let mut cover = WeightedCover::new(&s3, rat(1, 4), PredictorKind::Soa).unwrap();
        // SOA predicts 0 at x0; feeding (x0, 1) is a predictor mistake.
        cover.update_mistake(LabeledExample::new(0, true));
        assert_eq!(cover.entries.len(), 1);
        assert_eq!(cover.entries[0].weight, rat(1, 4));
        assert_eq!(cover.entries[0].mask.count_ones(), 1);
    }

    #[test]
    fn branch_spawns_children_per_witness_element() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let mut cover = WeightedCover::new(&s3, rat(1, 4), PredictorKind::Soa).unwrap();
        let witness = vec![
            LabeledExample::new(0, false),
            LabeledExample::new(1, false),
            LabeledExample::new(2, false),
        ];
        cover.branch(&witness).unwrap();
        // Each child is restricted by the flipped label (x, 1): a singleton.
        assert_eq!(cover.entries.len(), 3);
        for e in &cover.entries {
            assert_eq!(e.mask.count_ones(), 1);
            // SOA predicted 0 = witness label, so every child decayed.
            assert_eq!(e.weight, rat(1, 4));
        }
    }
}
