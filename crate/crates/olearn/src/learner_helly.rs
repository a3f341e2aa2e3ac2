//! Online learner for a class `C` restricted to hypotheses from a class `H`,
//! driven by a weighted cover of version spaces.
//!
//! Each round the cover's extreme-vote set (`HighVote`) is tested for
//! `H`-realizability. When realizable, the learner predicts with the first
//! consistent hypothesis and, on a mistake, decays and restricts the cover
//! by the revealed example. When unrealizable, the dual Helly number
//! guarantees a small `C`-unrealizable witness inside `HighVote`; the cover
//! branches on it and the round is retried. With `eta = 1/(2K)` the total
//! number of mistakes on a realizable stream is at most `4*L*K*ln(2K)`.

use num_traits::ToPrimitive;

use crate::bits::Bits;
use crate::concepts::{ConceptClass, Instance, LabeledExample};
use crate::cover::{PredictorKind, RoundStats, WeightedCover};
use crate::dims::{dual_helly, DualHelly};
use crate::{rat_int, Count, Error, Rat, Result};

pub use crate::cover::WeightedCover as Cover;

#[derive(Clone, Debug)]
pub enum HellyRoundKind {
    Predict {
        t: usize,
        x: Instance,
        hyp_index: usize,
        prediction: bool,
        label: bool,
        mistake: bool,
    },
    Branch {
        witness: Vec<LabeledExample>,
    },
}

#[derive(Clone, Debug)]
pub struct HellyRound {
    pub kind: HellyRoundKind,
    pub stats: RoundStats,
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    pub rounds: Vec<HellyRound>,
    pub mistake_count: u64,
    pub branch_count: u64,
    pub ldim: i64,
    pub k: u64,
    pub eta: Rat,
    /// Concepts consistent with the full observed stream.
    pub final_consistent: Bits,
}

impl RunTrace {
    /// `ceil(4 L K ln(2K))`, the guaranteed mistake bound.
    pub fn mistake_bound(&self) -> u64 {
        let l = self.ldim.max(0) as f64;
        let k = self.k as f64;
        (4.0 * l * k * (2.0 * k).ln()).ceil() as u64
    }

    /// Re-checks every recorded per-round invariant of the analysis:
    /// weight floors, witness survival, and the exact decay factors.
    pub fn check_invariants(&self) -> Result<()> {
        let l = self.ldim.max(0);
        let weight_floor = pow_rat(&self.eta, l as u32);
        let k_rat = rat_int(self.k as i64);
        // 1 - eta(1 - eta) for mistake rounds, 1 - 1/(4K) for branch rounds.
        let mistake_factor = rat_int(1) - &self.eta * (rat_int(1) - &self.eta);
        let branch_factor = rat_int(1) - rat_int(1) / (rat_int(4) * &k_rat);

        if self.final_consistent.is_empty() {
            return Err(Error::Defect(
                "stream left no consistent concept; run was unrealizable".into(),
            ));
        }
        for (i, round) in self.rounds.iter().enumerate() {
            let s = &round.stats;
            if let Some(min_w) = &s.min_weight_after {
                if *min_w < weight_floor {
                    return Err(Error::Defect(format!(
                        "round {i}: entry weight {min_w} below eta^L = {weight_floor}"
                    )));
                }
            }
            if !self.final_consistent.is_subset_of(&s.mask_union_after) {
                return Err(Error::Defect(format!(
                    "round {i}: a stream-consistent concept vanished from the cover"
                )));
            }
            match &round.kind {
                HellyRoundKind::Predict { mistake: true, .. } => {
                    if s.weight_after > &mistake_factor * &s.weight_before {
                        return Err(Error::Defect(format!(
                            "round {i}: mistake decay violated ({} > {} * {})",
                            s.weight_after, mistake_factor, s.weight_before
                        )));
                    }
                }
                HellyRoundKind::Branch { witness } => {
                    if witness.len() as u64 > self.k {
                        return Err(Error::Defect(format!("round {i}: witness larger than K")));
                    }
                    if s.weight_after > &branch_factor * &s.weight_before {
                        return Err(Error::Defect(format!(
                            "round {i}: branch decay violated ({} > {} * {})",
                            s.weight_after, branch_factor, s.weight_before
                        )));
                    }
                }
                _ => {}
            }
        }
        // Final potential inequality M/(4K) + N/(4K) < L ln(2K); on an
        // entirely quiet run both sides are zero and there is nothing to say.
        let m = self.mistake_count as f64;
        let n = self.branch_count as f64;
        if m + n > 0.0 {
            let k = self.k as f64;
            let rhs = (self.ldim.max(0) as f64) * (2.0 * k).ln();
            if (m + n) / (4.0 * k) >= rhs {
                return Err(Error::Defect(format!(
                    "final potential inequality violated: (M+N)/(4K) = {} >= {rhs}",
                    (m + n) / (4.0 * k)
                )));
            }
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "round,kind,t,x,hyp_index,prediction,label,mistake,entries,total_weight,witness_size"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.rounds
            .iter()
            .enumerate()
            .map(|(i, r)| match &r.kind {
                HellyRoundKind::Predict {
                    t,
                    x,
                    hyp_index,
                    prediction,
                    label,
                    mistake,
                } => format!(
                    "{i},predict,{t},{},{hyp_index},{},{},{},{},{:.6},",
                    x.0,
                    u8::from(*prediction),
                    u8::from(*label),
                    u8::from(*mistake),
                    r.stats.entries_after,
                    r.stats.weight_after.to_f64().unwrap_or(f64::NAN)
                ),
                HellyRoundKind::Branch { witness } => format!(
                    "{i},branch,,,,,,,{},{:.6},{}",
                    r.stats.entries_after,
                    r.stats.weight_after.to_f64().unwrap_or(f64::NAN),
                    witness.len()
                ),
            })
            .collect()
    }
}

pub struct HellyLearner<'a> {
    class: &'a ConceptClass,
    hyp: &'a ConceptClass,
    cover: WeightedCover<'a>,
    pub k: u64,
    pub eta: Rat,
    stream_mask: Bits,
    t: usize,
    prepared: Option<usize>,
    rounds: Vec<HellyRound>,
    mistake_count: u64,
    branch_count: u64,
}

impl<'a> HellyLearner<'a> {
    pub fn new(class: &'a ConceptClass, hyp: &'a ConceptClass) -> Result<Self> {
        let DualHelly { value, .. } = dual_helly(class, hyp)?;
        let k = match value {
            Count::Finite(k) => k,
            Count::Infinite => {
                return Err(Error::Precondition(
                    "dual Helly number is infinite; the cover learner does not apply".into(),
                ))
            }
        };
        let eta = Rat::new(1.into(), (2 * k as i64).into());
        Ok(HellyLearner {
            class,
            hyp,
            cover: WeightedCover::new(class, eta.clone(), PredictorKind::Soa)?,
            k,
            eta,
            stream_mask: class.full_mask(),
            t: 1,
            prepared: None,
            rounds: Vec::new(),
            mistake_count: 0,
            branch_count: 0,
        })
    }

    /// Test hook for the verification suite's negative control.
    pub fn corrupt_disable_weight_decay(&mut self) {
        self.cover.disable_weight_decay = true;
    }

    pub fn cover(&self) -> &WeightedCover<'a> {
        &self.cover
    }

    /// Resolve branch rounds until `HighVote` is `H`-realizable and return
    /// the index (in `H`) of the first consistent hypothesis.
    pub fn prepare(&mut self) -> Result<usize> {
        if let Some(h) = self.prepared {
            return Ok(h);
        }
        // The analysis bounds the number of branch rounds; a run exceeding
        // a generous multiple of that bound is broken, not slow.
        let branch_cap = 64
            + 16 * {
                let l = crate::dims::ldim(self.class).max(1) as u64;
                let k = self.k;
                (4.0 * l as f64 * k as f64 * (2.0 * k as f64).ln()).ceil() as u64
            };
        loop {
            let hv = self.cover.highvote(&self.eta)?;
            if let Some(h) = self.first_consistent(&hv) {
                self.prepared = Some(h);
                return Ok(h);
            }
            let witness = self.unrealizable_witness(&hv)?;
            let w_before = self.cover.total_weight();
            self.cover.branch(&witness)?;
            self.branch_count += 1;
            self.rounds.push(HellyRound {
                kind: HellyRoundKind::Branch { witness },
                stats: self.cover.stats(w_before),
            });
            if self.branch_count > branch_cap {
                return Err(Error::Defect(format!(
                    "branch count exceeded {branch_cap}; potential argument violated"
                )));
            }
        }
    }

    fn first_consistent(&self, hv: &[LabeledExample]) -> Option<usize> {
        self.hyp
            .concepts()
            .iter()
            .position(|h| hv.iter().all(|e| h.label(e.x) == e.y))
    }

    /// Smallest `C`-unrealizable subset of `HighVote`, of size at most `K`.
    /// Its absence would contradict the definition of the dual Helly number.
    fn unrealizable_witness(&self, hv: &[LabeledExample]) -> Result<Vec<LabeledExample>> {
        let cap = (self.k as usize).min(hv.len());
        let mut comb: Vec<usize> = Vec::new();
        for size in 1..=cap {
            comb.clear();
            comb.extend(0..size);
            loop {
                let subset: Vec<LabeledExample> = comb.iter().map(|&i| hv[i]).collect();
                if !self.class.is_realizable(&subset) {
                    return Ok(subset);
                }
                // next combination of `size` out of hv.len()
                let mut i = size;
                let mut done = false;
                loop {
                    if i == 0 {
                        done = true;
                        break;
                    }
                    i -= 1;
                    if comb[i] != i + hv.len() - size {
                        comb[i] += 1;
                        for j in i + 1..size {
                            comb[j] = comb[j - 1] + 1;
                        }
                        break;
                    }
                }
                if done {
                    break;
                }
            }
        }
        Err(Error::Defect(
            "no C-unrealizable witness of size <= K inside an H-unrealizable HighVote".into(),
        ))
    }

    /// Predictions of the prepared hypothesis over the whole domain, as 0/1
    /// rationals (the adversary interface).
    pub fn prediction_row(&mut self) -> Result<Vec<Rat>> {
        let h = self.prepare()?;
        Ok(self
            .class
            .instances()
            .map(|x| rat_int(i64::from(self.hyp.concept(h).label(x))))
            .collect())
    }

    /// Consume one adversary example; returns (prediction, mistake).
    pub fn observe(&mut self, e: LabeledExample) -> Result<(bool, bool)> {
        if e.x.0 >= self.class.domain_size() {
            return Err(Error::InstanceOutOfRange {
                x: e.x.0,
                domain: self.class.domain_size(),
            });
        }
        let h = self.prepare()?;
        let next_mask = self.class.restrict_mask(&self.stream_mask, e);
        if next_mask.is_empty() {
            return Err(Error::UnrealizableStream { prefix_len: self.t });
        }
        self.stream_mask = next_mask;
        let prediction = self.hyp.concept(h).label(e.x);
        let mistake = prediction != e.y;
        let w_before = self.cover.total_weight();
        if mistake {
            self.mistake_count += 1;
            self.cover.update_mistake(e);
        }
        self.rounds.push(HellyRound {
            kind: HellyRoundKind::Predict {
                t: self.t,
                x: e.x,
                hyp_index: h,
                prediction,
                label: e.y,
                mistake,
            },
            stats: self.cover.stats(w_before),
        });
        self.t += 1;
        self.prepared = None;
        Ok((prediction, mistake))
    }

    pub fn into_trace(self) -> RunTrace {
        RunTrace {
            rounds: self.rounds,
            mistake_count: self.mistake_count,
            branch_count: self.branch_count,
            ldim: crate::dims::ldim(self.class),
            k: self.k,
            eta: self.eta,
            final_consistent: self.stream_mask,
        }
    }
}

/// One full round against a known example: branch handling, prediction,
/// update. Returns (prediction, mistake).
pub fn lh_step(learner: &mut HellyLearner<'_>, x: Instance, y: bool) -> Result<(bool, bool)> {
    learner.observe(LabeledExample { x, y })
}

/// Drive the learner for `t_max` rounds against an adversary callback, which
/// sees the current hypothesis as a prediction row over the domain.
pub fn lh_run(
    class: &ConceptClass,
    hyp: &ConceptClass,
    mut adversary: impl FnMut(&[Rat]) -> LabeledExample,
    t_max: usize,
) -> Result<RunTrace> {
    let mut learner = HellyLearner::new(class, hyp)?;
    for _ in 0..t_max {
        let row = learner.prediction_row()?;
        let e = adversary(&row);
        learner.observe(e)?;
    }
    Ok(learner.into_trace())
}

fn pow_rat(base: &Rat, exp: u32) -> Rat {
    let mut out = rat_int(1);
    for _ in 0..exp {
        out *= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::ConceptClass;

    /// Hand trace from the singleton example: the first hypothesis is the
    /// all-zero function, the adversary reveals (0, 1), and from then on the
    /// cover pins the target.
    #[test]
    fn singleton_hand_trace() {
        let c = ConceptClass::singletons(3).unwrap();
        let h = c.with_all_zero();
        let mut learner = HellyLearner::new(&c, &h).unwrap();
        assert_eq!(learner.k, 2);
        assert_eq!(learner.eta, crate::rat(1, 4));

        let first = learner.prepare().unwrap();
        // HighVote is the all-zero labeling; the first consistent hypothesis
        // is the all-zero function (index 3 in H).
        assert_eq!(first, 3);
        let (pred, mistake) = learner.observe(LabeledExample::new(0, true)).unwrap();
        assert!(!pred);
        assert!(mistake);
        // The lone entry decayed to eta and restricted to {100}.
        assert_eq!(learner.cover().entries.len(), 1);
        assert_eq!(learner.cover().entries[0].weight, crate::rat(1, 4));

        // Round 2 proposes 100 and never errs again.
        let second = learner.prepare().unwrap();
        assert_eq!(second, 0);
        let (pred, mistake) = learner.observe(LabeledExample::new(1, false)).unwrap();
        assert!(!pred);
        assert!(!mistake);
        let trace = learner.into_trace();
        assert_eq!(trace.mistake_count, 1);
        assert!(trace.mistake_count <= trace.mistake_bound());
        trace.check_invariants().unwrap();
    }

    /// With H equal to the full powerset, HighVote is always realizable, so
    /// no branching ever happens.
    #[test]
    fn powerset_never_branches() {
        let c = ConceptClass::powerset(2).unwrap();
        let stream = [
            LabeledExample::new(0, true),
            LabeledExample::new(1, false),
            LabeledExample::new(0, true),
            LabeledExample::new(1, false),
        ];
        let mut learner = HellyLearner::new(&c, &c).unwrap();
        for &e in &stream {
            learner.observe(e).unwrap();
        }
        let trace = learner.into_trace();
        assert_eq!(trace.branch_count, 0);
        assert!(trace.mistake_count <= trace.mistake_bound());
        trace.check_invariants().unwrap();
    }

    #[test]
    fn unrealizable_stream_is_rejected() {
        let c = ConceptClass::singletons(3).unwrap();
        let h = c.clone();
        let mut learner = HellyLearner::new(&c, &h).unwrap();
        learner.observe(LabeledExample::new(0, true)).unwrap();
        assert!(matches!(
            learner.observe(LabeledExample::new(1, true)),
            Err(Error::UnrealizableStream { .. })
        ));
    }

    #[test]
    fn infinite_helly_pair_is_refused() {
        let c = ConceptClass::new(&[vec![true, false]]).unwrap();
        let h = ConceptClass::new(&[vec![false, true]]).unwrap();
        assert!(HellyLearner::new(&c, &h).is_err());
    }
}
