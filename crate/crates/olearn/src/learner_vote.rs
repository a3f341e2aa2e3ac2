//! Margin-vote online learner: predictors are sparse votes of concepts from
//! the class itself.
//!
//! Each round, the question "is there a sparse vote within `eps` of the
//! extreme-vote set's labels?" is decided exactly by solving the finite
//! error game of the class against the `HighVote` examples. A value at most
//! `eps/2` yields the vote through a verified dual epsilon-approximation of
//! the optimal concept strategy (per-example error below `eps`); a larger
//! value certifies the epsilon-net premise at `eps/2`, and the cover
//! branches on a verified net on which every concept errs at rate above
//! `eps/4`. The number of rounds where the emitted vote misses the label by
//! more than `eps` is at most `(8L / (eps (1 - eps/8))) ln(8/eps)`; with
//! `eps = 1/3` the thresholded majority makes at most `80 L` plain mistakes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::bits::Bits;
use crate::concepts::{Concept, ConceptClass, Instance, LabeledExample};
use crate::cover::{PredictorKind, RoundStats, WeightedCover};
use crate::games::{dual_eps_approx, eps_net, game_value_exact, EpsNetOutcome, GameMatrix};
use crate::{rat, rat_int, Error, Rat, Result};

/// Non-empty multiset of concepts (indices into a class) evaluated as an
/// exact average in [0, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteHypothesis {
    pub members: Vec<usize>,
}

impl VoteHypothesis {
    pub fn eval(&self, class: &ConceptClass, x: Instance) -> Rat {
        let ones = self
            .members
            .iter()
            .filter(|&&i| class.concept(i).label(x))
            .count();
        rat_int(ones as i64) / rat_int(self.members.len() as i64)
    }

    pub fn concepts<'c>(&self, class: &'c ConceptClass) -> Vec<&'c Concept> {
        self.members.iter().map(|&i| class.concept(i)).collect()
    }
}

/// Vote thresholded at 1/2, ties toward 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajHypothesis {
    pub vote: VoteHypothesis,
}

impl MajHypothesis {
    pub fn eval(&self, class: &ConceptClass, x: Instance) -> bool {
        self.vote.eval(class, x) >= rat(1, 2)
    }
}

pub fn vote_eval(class: &ConceptClass, v: &VoteHypothesis, x: Instance) -> Rat {
    v.eval(class, x)
}

pub fn maj_eval(class: &ConceptClass, m: &MajHypothesis, x: Instance) -> bool {
    m.eval(class, x)
}

/// Outcome of one proposal attempt.
#[derive(Clone, Debug)]
pub enum Proposal {
    Vote(VoteHypothesis),
    /// `HighVote` admits no close sparse vote; the returned net (drawn from
    /// it) has every concept erring at rate above `eps/4`.
    Branch {
        net: Vec<LabeledExample>,
        game_value: Rat,
    },
}

#[derive(Clone, Debug)]
#[doc(hidden)]
pub enum Cached {
    Vote(Vec<usize>),
    Net(Vec<LabeledExample>, Rat),
}

/// Proposals depend only on the `HighVote` set (class and `eps` fixed), and
/// those sets recur heavily; sharing this cache across learners of the same
/// class removes almost all exact game solves from hot loops.
pub type ProposeCache = Rc<RefCell<HashMap<Vec<LabeledExample>, Cached>>>;

pub fn new_propose_cache() -> ProposeCache {
    Rc::new(RefCell::new(HashMap::new()))
}

#[derive(Clone, Debug)]
pub enum VoteRoundKind {
    Predict {
        t: usize,
        x: Instance,
        value: Rat,
        label: bool,
        margin_error: bool,
        maj_prediction: bool,
        maj_mistake: bool,
        members: usize,
    },
    Branch {
        net_size: usize,
    },
}

#[derive(Clone, Debug)]
pub struct VoteRound {
    pub kind: VoteRoundKind,
    pub stats: RoundStats,
}

#[derive(Clone, Debug)]
pub struct MarginTrace {
    pub rounds: Vec<VoteRound>,
    pub margin_error_count: u64,
    pub maj_mistake_count: u64,
    pub branch_count: u64,
    pub eps: Rat,
    pub eta: Rat,
    /// Mistake budget of the per-entry predictor (`ldim` for SOA).
    pub budget: i64,
    pub max_members: usize,
    pub dual_vcdim: i64,
    pub final_consistent: Bits,
}

impl MarginTrace {
    /// `(8 B / (eps (1 - eps/8))) ln(8/eps)` with `B` the predictor budget.
    pub fn margin_error_bound(&self) -> f64 {
        let e = self.eps.to_f64().unwrap();
        let b = self.budget.max(0) as f64;
        8.0 * b / (e * (1.0 - e / 8.0)) * (8.0 / e).ln()
    }

    /// Largest proposed vote size relative to `vc*/eps^2`.
    pub fn member_shape_constant(&self) -> f64 {
        let e = self.eps.to_f64().unwrap();
        self.max_members as f64 * e * e / self.dual_vcdim.max(1) as f64
    }

    /// Re-checks the per-round weight decay, witness multiplicity, and the
    /// final potential inequality. Only meaningful for realizable runs.
    pub fn check_invariants(&self) -> Result<()> {
        if self.final_consistent.is_empty() {
            return Err(Error::Defect(
                "stream left no consistent concept; run was unrealizable".into(),
            ));
        }
        let eta = &self.eta;
        let eps8 = &self.eps / rat_int(8);
        let weight_floor = {
            let mut f = rat_int(1);
            for _ in 0..self.budget.max(0) {
                f *= eta;
            }
            f
        };
        let margin_factor = rat_int(1) - &eps8 * (rat_int(1) - &eps8);
        // Running lower bound on the number of entries containing any
        // stream-consistent concept: prod over branches of (eps/4) * m.
        let mut multiplicity = rat_int(1);
        for (i, round) in self.rounds.iter().enumerate() {
            let s = &round.stats;
            if let Some(min_w) = &s.min_weight_after {
                if *min_w < weight_floor {
                    return Err(Error::Defect(format!(
                        "round {i}: entry weight {min_w} below eta^B = {weight_floor}"
                    )));
                }
            }
            match &round.kind {
                VoteRoundKind::Predict {
                    margin_error: true, ..
                } => {
                    if s.weight_after > &margin_factor * &s.weight_before {
                        return Err(Error::Defect(format!(
                            "round {i}: margin-error decay violated"
                        )));
                    }
                }
                VoteRoundKind::Branch { net_size } => {
                    let m = rat_int(*net_size as i64);
                    let factor = &m * ((rat_int(1) - &eps8) * eta + &eps8);
                    if s.weight_after > &factor * &s.weight_before {
                        return Err(Error::Defect(format!(
                            "round {i}: branch growth bound violated"
                        )));
                    }
                    multiplicity *= &self.eps / rat_int(4) * &m;
                }
                _ => {}
            }
            if !self.final_consistent.is_subset_of(&s.mask_union_after) {
                return Err(Error::Defect(format!(
                    "round {i}: a stream-consistent concept vanished from the cover"
                )));
            }
            for h in self.final_consistent.iter_ones() {
                if rat_int(s.containing_counts_after[h] as i64) < multiplicity {
                    return Err(Error::Defect(format!(
                        "round {i}: witness multiplicity below ((eps/4) m)^N"
                    )));
                }
            }
        }
        // Final inequality:
        // M + N * (8 / (eps (1-eps/8))) ln(1/(1-eps/16)) <= margin bound.
        let e = self.eps.to_f64().unwrap();
        let m = self.margin_error_count as f64;
        let n = self.branch_count as f64;
        let lhs = m + n * 8.0 / (e * (1.0 - e / 8.0)) * (1.0 / (1.0 - e / 16.0)).ln();
        if lhs > self.margin_error_bound() + 1e-9 {
            return Err(Error::Defect(format!(
                "final potential inequality violated: {lhs} > {}",
                self.margin_error_bound()
            )));
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "round,kind,t,x,vote,label,margin_error,maj_prediction,maj_mistake,members,entries,total_weight,net_size"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.rounds
            .iter()
            .enumerate()
            .map(|(i, r)| match &r.kind {
                VoteRoundKind::Predict {
                    t,
                    x,
                    value,
                    label,
                    margin_error,
                    maj_prediction,
                    maj_mistake,
                    members,
                } => format!(
                    "{i},predict,{t},{},{:.6},{},{},{},{},{members},{},{:.6},",
                    x.0,
                    value.to_f64().unwrap_or(f64::NAN),
                    u8::from(*label),
                    u8::from(*margin_error),
                    u8::from(*maj_prediction),
                    u8::from(*maj_mistake),
                    r.stats.entries_after,
                    r.stats.weight_after.to_f64().unwrap_or(f64::NAN),
                ),
                VoteRoundKind::Branch { net_size } => format!(
                    "{i},branch,,,,,,,,,{},{:.6},{net_size}",
                    r.stats.entries_after,
                    r.stats.weight_after.to_f64().unwrap_or(f64::NAN),
                ),
            })
            .collect()
    }
}

pub struct VoteLearner<'a> {
    class: &'a ConceptClass,
    cover: WeightedCover<'a>,
    pub eps: Rat,
    pub eta: Rat,
    /// Reject unrealizable streams. Expert simulations run with this off:
    /// they feed self-labeled sequences that need not be realizable, and the
    /// learner must stay total on them.
    strict: bool,
    stream_mask: Bits,
    t: usize,
    current: Option<VoteHypothesis>,
    cache: ProposeCache,
    seed: u64,
    calls: u64,
    rounds: Vec<VoteRound>,
    margin_error_count: u64,
    maj_mistake_count: u64,
    branch_count: u64,
    max_members: usize,
}

impl<'a> VoteLearner<'a> {
    pub fn new(class: &'a ConceptClass, eps: Rat, seed: u64) -> Result<Self> {
        Self::with_options(
            class,
            eps,
            seed,
            PredictorKind::Soa,
            true,
            new_propose_cache(),
        )
    }

    pub fn with_options(
        class: &'a ConceptClass,
        eps: Rat,
        seed: u64,
        predictor: PredictorKind,
        strict: bool,
        cache: ProposeCache,
    ) -> Result<Self> {
        if eps <= Rat::zero() || eps >= rat(1, 2) {
            return Err(Error::InvalidParameter("eps must be in (0, 1/2)".into()));
        }
        let eta = &eps / rat_int(8);
        Ok(VoteLearner {
            class,
            cover: WeightedCover::new(class, eta.clone(), predictor)?,
            eps,
            eta,
            strict,
            stream_mask: class.full_mask(),
            t: 1,
            current: None,
            cache,
            seed,
            calls: 0,
            rounds: Vec::new(),
            margin_error_count: 0,
            maj_mistake_count: 0,
            branch_count: 0,
            max_members: 0,
        })
    }

    pub fn cover(&self) -> &WeightedCover<'a> {
        &self.cover
    }

    /// One proposal attempt against the current cover, without branching.
    pub fn propose(&mut self) -> Result<Proposal> {
        let hv = self.cover.highvote(&self.eta)?;
        if let Some(cached) = self.cache.borrow().get(&hv) {
            return Ok(match cached {
                Cached::Vote(members) => Proposal::Vote(VoteHypothesis {
                    members: members.clone(),
                }),
                Cached::Net(net, v) => Proposal::Branch {
                    net: net.clone(),
                    game_value: v.clone(),
                },
            });
        }
        let proposal = self.propose_uncached(&hv)?;
        self.cache.borrow_mut().insert(
            hv,
            match &proposal {
                Proposal::Vote(v) => Cached::Vote(v.members.clone()),
                Proposal::Branch { net, game_value } => {
                    Cached::Net(net.clone(), game_value.clone())
                }
            },
        );
        Ok(proposal)
    }

    fn propose_uncached(&mut self, hv: &[LabeledExample]) -> Result<Proposal> {
        self.calls += 1;
        let seed = self.seed.wrapping_add(self.calls.wrapping_mul(0x9e37_79b9));
        if hv.is_empty() {
            // Any single concept satisfies the (vacuous) margin condition.
            return Ok(Proposal::Vote(VoteHypothesis { members: vec![0] }));
        }
        let half_eps = &self.eps / rat_int(2);
        let game = GameMatrix::err_game(self.class, hv)?;
        let sol = game_value_exact(&game)?;
        if sol.value <= half_eps {
            let (members, _report) =
                dual_eps_approx(self.class, &sol.row_strategy, &half_eps, hv, seed)?;
            let vote = VoteHypothesis { members };
            // The approximation guarantees error < eps on every HighVote
            // element; re-check the margin condition it implies.
            for e in hv {
                let dev = (vote.eval(self.class, e.x) - rat_int(i64::from(e.y))).abs();
                if dev > self.eps {
                    return Err(Error::Defect(format!(
                        "proposed vote misses HighVote example ({}, {}) by {dev}",
                        e.x.0, e.y
                    )));
                }
            }
            Ok(Proposal::Vote(vote))
        } else {
            match eps_net(self.class, hv, &half_eps, seed)? {
                EpsNetOutcome::Net { sequence, .. } => Ok(Proposal::Branch {
                    net: sequence,
                    game_value: sol.value,
                }),
                EpsNetOutcome::NoNet { .. } => Err(Error::Defect(
                    "game value above eps/2 but net premise rejected".into(),
                )),
            }
        }
    }

    /// Branch until a vote hypothesis is available, then return it.
    pub fn prepare(&mut self) -> Result<&VoteHypothesis> {
        if self.current.is_none() {
            loop {
                match self.propose()? {
                    Proposal::Vote(v) => {
                        self.max_members = self.max_members.max(v.members.len());
                        self.current = Some(v);
                        break;
                    }
                    Proposal::Branch { net, .. } => {
                        let w_before = self.cover.total_weight();
                        self.cover.branch(&net)?;
                        self.branch_count += 1;
                        self.rounds.push(VoteRound {
                            kind: VoteRoundKind::Branch {
                                net_size: net.len(),
                            },
                            stats: self.cover.stats(w_before),
                        });
                        if self.branch_count > 100_000 {
                            return Err(Error::Defect("branch count diverged".into()));
                        }
                    }
                }
            }
        }
        Ok(self.current.as_ref().unwrap())
    }

    /// Current vote values over the whole domain (the adversary interface).
    pub fn prediction_row(&mut self) -> Result<Vec<Rat>> {
        self.prepare()?;
        let v = self.current.as_ref().unwrap();
        Ok(self
            .class
            .instances()
            .map(|x| v.eval(self.class, x))
            .collect())
    }

    /// Consume one example; returns (vote value at x, margin_error flag).
    pub fn observe(&mut self, e: LabeledExample) -> Result<(Rat, bool)> {
        if e.x.0 >= self.class.domain_size() {
            return Err(Error::InstanceOutOfRange {
                x: e.x.0,
                domain: self.class.domain_size(),
            });
        }
        self.prepare()?;
        let vote = self.current.as_ref().unwrap().clone();
        let next_mask = self.class.restrict_mask(&self.stream_mask, e);
        if next_mask.is_empty() && self.strict {
            return Err(Error::UnrealizableStream { prefix_len: self.t });
        }
        self.stream_mask = next_mask;
        let value = vote.eval(self.class, e.x);
        let margin_error = (&value - rat_int(i64::from(e.y))).abs() > self.eps;
        let maj_prediction = value >= rat(1, 2);
        let maj_mistake = maj_prediction != e.y;
        let w_before = self.cover.total_weight();
        if margin_error {
            self.margin_error_count += 1;
            self.cover.update_mistake(e);
            self.current = None;
        }
        if maj_mistake {
            self.maj_mistake_count += 1;
        }
        self.rounds.push(VoteRound {
            kind: VoteRoundKind::Predict {
                t: self.t,
                x: e.x,
                value: value.clone(),
                label: e.y,
                margin_error,
                maj_prediction,
                maj_mistake,
                members: vote.members.len(),
            },
            stats: self.cover.stats(w_before),
        });
        self.t += 1;
        Ok((value, margin_error))
    }

    pub fn into_trace(self) -> MarginTrace {
        let budget = self.cover.predictor_budget();
        MarginTrace {
            rounds: self.rounds,
            margin_error_count: self.margin_error_count,
            maj_mistake_count: self.maj_mistake_count,
            branch_count: self.branch_count,
            eps: self.eps,
            eta: self.eta,
            budget,
            max_members: self.max_members,
            dual_vcdim: crate::dims::dual_vcdim(self.class),
            final_consistent: self.stream_mask,
        }
    }
}

/// Run the margin learner for `t_max` rounds against an adversary callback
/// (which sees the current vote values over the domain).
pub fn lv_run(
    class: &ConceptClass,
    eps: Rat,
    mut adversary: impl FnMut(&[Rat]) -> LabeledExample,
    t_max: usize,
    seed: u64,
) -> Result<MarginTrace> {
    let mut learner = VoteLearner::new(class, eps, seed)?;
    for _ in 0..t_max {
        let row = learner.prediction_row()?;
        let e = adversary(&row);
        learner.observe(e)?;
    }
    Ok(learner.into_trace())
}

/// The plain mistake-bound wrapper: run the margin learner at `eps = 1/3`
/// and predict with the thresholded majority. A majority mistake forces a
/// margin error, so mistakes are bounded by `80 L`.
pub fn lv_as_mistake_learner(
    class: &ConceptClass,
    mut adversary: impl FnMut(&[Rat]) -> LabeledExample,
    t_max: usize,
    seed: u64,
) -> Result<MarginTrace> {
    let mut learner = VoteLearner::new(class, rat(1, 3), seed)?;
    for _ in 0..t_max {
        learner.prepare()?;
        let v = learner.current.as_ref().unwrap();
        let row: Vec<Rat> = class
            .instances()
            .map(|x| rat_int(i64::from(v.eval(class, x) >= rat(1, 2))))
            .collect();
        let e = adversary(&row);
        learner.observe(e)?;
    }
    Ok(learner.into_trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::ConceptClass;

    #[test]
    fn vote_and_maj_eval() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let v = VoteHypothesis {
            members: vec![0, 1, 2],
        };
        for x in s3.instances() {
            assert_eq!(v.eval(&s3, x), rat(1, 3));
        }
        let single = VoteHypothesis { members: vec![1] };
        assert_eq!(single.eval(&s3, Instance(1)), rat_int(1));
        // Multiset semantics: duplicates weigh.
        let dup = VoteHypothesis {
            members: vec![0, 0, 1],
        };
        assert_eq!(dup.eval(&s3, Instance(0)), rat(2, 3));

        let m = MajHypothesis {
            vote: VoteHypothesis {
                members: vec![0, 1, 2],
            },
        };
        assert!(!m.eval(&s3, Instance(0)));
        // Exact tie goes to 1.
        let tie = MajHypothesis {
            vote: VoteHypothesis {
                members: vec![0, 1],
            },
        };
        assert!(tie.eval(&s3, Instance(0)));
        let single_maj = MajHypothesis {
            vote: VoteHypothesis { members: vec![2] },
        };
        assert!(single_maj.eval(&s3, Instance(2)));
    }

    /// At eps = 0.4 the initial proposal for the singletons must branch: the
    /// game of concepts against the all-zero HighVote has value 1/3 > 0.2,
    /// and the returned net consists of the three zero-labeled examples.
    #[test]
    fn initial_singleton_proposal_branches() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let mut learner = VoteLearner::new(&s3, rat(2, 5), 7).unwrap();
        match learner.propose().unwrap() {
            Proposal::Branch { net, game_value } => {
                assert_eq!(game_value, rat(1, 3));
                assert!(!net.is_empty());
                assert!(net.iter().all(|e| !e.y));
                // Every singleton errs at rate > eps/4 = 0.1 on the net.
                let m = rat_int(net.len() as i64);
                for h in s3.concepts() {
                    let errs = net.iter().filter(|e| h.label(e.x) != e.y).count();
                    assert!(rat_int(errs as i64) > rat(1, 10) * &m);
                }
            }
            Proposal::Vote(_) => panic!("expected a branch at eps = 0.4"),
        }
    }

    #[test]
    fn single_concept_class_proposes_exact_vote() {
        let c = ConceptClass::new(&[vec![true, false]]).unwrap();
        let mut learner = VoteLearner::new(&c, rat(1, 4), 7).unwrap();
        match learner.propose().unwrap() {
            Proposal::Vote(v) => {
                assert_eq!(v.eval(&c, Instance(0)), rat_int(1));
                assert_eq!(v.eval(&c, Instance(1)), rat_int(0));
            }
            Proposal::Branch { .. } => panic!("single-concept class cannot branch"),
        }
    }

    #[test]
    fn margin_bound_holds_on_replay() {
        let s3 = ConceptClass::singletons(3).unwrap();
        let stream = vec![
            LabeledExample::new(0, false),
            LabeledExample::new(1, false),
            LabeledExample::new(2, true),
            LabeledExample::new(0, false),
            LabeledExample::new(1, false),
        ];
        let mut it = stream.into_iter();
        let trace = lv_run(&s3, rat(2, 5), |_| it.next().unwrap(), 5, 3).unwrap();
        assert!((trace.margin_error_count as f64) <= trace.margin_error_bound());
        trace.check_invariants().unwrap();
    }

    #[test]
    fn maj_wrapper_counts_mistakes() {
        let p2 = ConceptClass::powerset(2).unwrap();
        let stream = vec![
            LabeledExample::new(0, true),
            LabeledExample::new(1, false),
            LabeledExample::new(0, true),
            LabeledExample::new(1, false),
        ];
        let mut it = stream.into_iter();
        let trace = lv_as_mistake_learner(&p2, |_| it.next().unwrap(), 4, 3).unwrap();
        let l = trace.budget.max(0) as u64;
        assert!(trace.maj_mistake_count <= 80 * l);
        assert!(trace.maj_mistake_count <= trace.margin_error_count);
        trace.check_invariants().unwrap();
    }
}
