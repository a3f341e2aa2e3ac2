//! Adversaries, fixture classes, and experiment orchestration.

pub mod verify;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::Signed;

use crate::bits::Bits;
use crate::concepts::{ConceptClass, Instance, LabeledExample};
use crate::dims::{ldim_mask_memo, MbOracle};
use crate::rng::SplitMix64;
use crate::{rat, rat_int, Count, Error, Rat, Result};

// ---------------------------------------------------------------------------
// Adversaries

/// Value oracle scoring how many future mistakes a version space is worth.
enum ValueOracle {
    /// Exact optimal mistake bound against a fixed hypothesis class.
    Mb(MbOracle),
    /// Littlestone dimension: the optimal bound against unrestricted
    /// hypotheses.
    Ldim {
        class: ConceptClass,
        memo: HashMap<Bits, i64>,
    },
}

impl ValueOracle {
    fn value(&mut self, mask: &Bits) -> Count {
        match self {
            ValueOracle::Mb(oracle) => oracle.value_of(mask),
            ValueOracle::Ldim { class, memo } => {
                Count::Finite(ldim_mask_memo(class, mask, memo).max(0) as u64)
            }
        }
    }
}

/// Worst-case example generator. Given the learner's current predictions
/// over the domain, it emits the realizable example maximizing immediate
/// damage plus the value of the surviving version space; an example the
/// whole version space agrees on but the learner gets wrong is repeated
/// forever (it costs the learner a mistake and concedes nothing).
///
/// In greedy-heuristic mode (the fallback when the exact recursion exceeds
/// its cap) immediate damage is ranked first and the future value only
/// breaks ties, so the version space's difficulty shrinks as little as
/// possible. Heuristic adversaries are flagged and never used by the
/// verification suite.
pub struct WorstCaseAdversary {
    class: ConceptClass,
    oracle: ValueOracle,
    mask: Bits,
    /// A prediction counts as wrong when `|prediction - y|` exceeds this.
    threshold: Rat,
    /// Rank immediate damage first instead of summing it with the value.
    greedy: bool,
}

impl WorstCaseAdversary {
    /// Score moves with the exact mistake-bound recursion for `(c, h)`.
    pub fn against_hypotheses(c: &ConceptClass, h: &ConceptClass) -> Result<Self> {
        Ok(WorstCaseAdversary {
            class: c.clone(),
            mask: c.full_mask(),
            oracle: ValueOracle::Mb(MbOracle::solve(c, h)?),
            threshold: rat(1, 2),
            greedy: false,
        })
    }

    /// Like [`WorstCaseAdversary::against_hypotheses`] but with an explicit
    /// recursion cap; when the cap binds, falls back to the greedy heuristic
    /// and says so in the returned flag.
    pub fn against_hypotheses_capped(
        c: &ConceptClass,
        h: &ConceptClass,
        cap: u64,
    ) -> Result<(Self, bool)> {
        match MbOracle::solve_capped(c, h, cap) {
            Ok(oracle) => Ok((
                WorstCaseAdversary {
                    class: c.clone(),
                    mask: c.full_mask(),
                    oracle: ValueOracle::Mb(oracle),
                    threshold: rat(1, 2),
                    greedy: false,
                },
                false,
            )),
            Err(Error::CapExceeded { .. }) => {
                let mut adv = Self::unrestricted(c);
                adv.greedy = true;
                Ok((adv, true))
            }
            Err(e) => Err(e),
        }
    }

    /// Score moves with the Littlestone dimension (hypotheses unrestricted).
    pub fn unrestricted(c: &ConceptClass) -> Self {
        WorstCaseAdversary {
            class: c.clone(),
            mask: c.full_mask(),
            oracle: ValueOracle::Ldim {
                class: c.clone(),
                memo: HashMap::new(),
            },
            threshold: rat(1, 2),
            greedy: false,
        }
    }

    /// Margin threshold for counting a real-valued prediction as wrong.
    pub fn with_threshold(mut self, threshold: Rat) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn next_example(&mut self, predictions: &[Rat]) -> LabeledExample {
        let gain = |pred: &Rat, y: bool| -> u64 {
            u64::from((pred - rat_int(i64::from(y))).abs() > self.threshold)
        };
        // A unanimously-labeled instance the learner gets wrong can be
        // replayed indefinitely.
        let mut best: Option<((u64, Count), LabeledExample, Bits)> = None;
        for x in self.class.instances() {
            let ones = self.mask.and(self.class.mask_one(x));
            let zeros = self.mask.and_not(self.class.mask_one(x));
            for (y, sub) in [(false, zeros), (true, ones)] {
                if sub.is_empty() {
                    continue;
                }
                let e = LabeledExample { x, y };
                if sub == self.mask {
                    if gain(&predictions[x.0], y) == 1 {
                        return e; // no update needed: mask is unchanged
                    }
                    continue; // no damage, no progress
                }
                let g = gain(&predictions[x.0], y);
                let value = self.oracle.value(&sub);
                let score = if self.greedy {
                    (g, value)
                } else {
                    (0, value.plus(g))
                };
                if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                    best = Some((score, e, sub));
                }
            }
        }
        match best {
            Some((_, e, sub)) => {
                self.mask = sub;
                e
            }
            None => {
                // Nothing left to force: every instance is unanimous and
                // predicted correctly. Emit the consensus label of the first
                // instance; the stream stays realizable and nothing changes.
                let x = Instance(0);
                let y = !self.mask.and(self.class.mask_one(x)).is_empty();
                LabeledExample { x, y }
            }
        }
    }
}

pub struct RandomAdversary {
    class: ConceptClass,
    mask: Bits,
    rng: SplitMix64,
}

impl RandomAdversary {
    pub fn new(class: &ConceptClass, seed: u64) -> Self {
        RandomAdversary {
            class: class.clone(),
            mask: class.full_mask(),
            rng: SplitMix64::new(seed),
        }
    }

    pub fn next_example(&mut self) -> LabeledExample {
        let x = Instance(self.rng.next_below(self.class.domain_size()));
        let ones = self.mask.and(self.class.mask_one(x));
        let zeros = self.mask.and_not(self.class.mask_one(x));
        let y = if ones.is_empty() {
            false
        } else if zeros.is_empty() {
            true
        } else {
            self.rng.next_bool()
        };
        self.mask = if y { ones } else { zeros };
        LabeledExample { x, y }
    }
}

/// The three adversaries behind one interface; every emitted example keeps
/// the stream realizable except for `Replay`, which plays back a recorded
/// stream verbatim.
pub enum Adversary {
    Worst(Box<WorstCaseAdversary>),
    Random(RandomAdversary),
    Replay {
        stream: Vec<LabeledExample>,
        at: usize,
    },
}

impl Adversary {
    pub fn next_example(&mut self, predictions: &[Rat]) -> Result<LabeledExample> {
        match self {
            Adversary::Worst(a) => Ok(a.next_example(predictions)),
            Adversary::Random(a) => Ok(a.next_example()),
            Adversary::Replay { stream, at } => {
                let e = stream
                    .get(*at)
                    .copied()
                    .ok_or_else(|| Error::InvalidParameter("replay stream exhausted".into()))?;
                *at += 1;
                Ok(e)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Fixtures

#[derive(Clone)]
pub struct Fixture {
    pub name: String,
    pub class: ConceptClass,
}

/// The standard verification fixtures: singletons, thresholds, small
/// powersets, and 50 seeded random classes over at most 6 instances.
pub fn fixture_classes() -> Vec<Fixture> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push(Fixture {
            name: format!("singletons({n})"),
            class: ConceptClass::singletons(n).unwrap(),
        });
    }
    for n in 2..=6 {
        out.push(Fixture {
            name: format!("thresholds({n})"),
            class: ConceptClass::thresholds(n).unwrap(),
        });
    }
    for d in 1..=3 {
        out.push(Fixture {
            name: format!("powerset({d})"),
            class: ConceptClass::powerset(d).unwrap(),
        });
    }
    let mut rng = SplitMix64::new(0x5eed_f17e);
    for i in 0..50 {
        let n = 2 + rng.next_below(5); // 2..=6
        let m = 2 + rng.next_below(15); // 2..=16
        let seed = 1000 + i as u64;
        out.push(Fixture {
            name: format!("random(n={n},m={m},seed={seed})"),
            class: ConceptClass::random(n, m, seed).unwrap(),
        });
    }
    out
}

#[derive(Clone)]
pub struct FixturePair {
    pub name: String,
    pub class: ConceptClass,
    pub hyp: ConceptClass,
}

/// Pairs `(C, H)` for the mistake-bound checks: proper (`H = C`) and the
/// all-zero-augmented hypothesis class for every fixture.
pub fn fixture_pairs() -> Vec<FixturePair> {
    let mut out = Vec::new();
    for f in fixture_classes() {
        out.push(FixturePair {
            name: format!("{} | proper", f.name),
            class: f.class.clone(),
            hyp: f.class.clone(),
        });
        let with_zero = f.class.with_all_zero();
        if with_zero.len() != f.class.len() {
            out.push(FixturePair {
                name: format!("{} | +zero", f.name),
                class: f.class.clone(),
                hyp: with_zero,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Experiments

#[derive(Clone, Debug, PartialEq)]
pub enum LearnerKind {
    Soa,
    Helly,
    Vote { eps: Rat },
    Maj,
    Agnostic,
}

impl LearnerKind {
    fn name(&self) -> &'static str {
        match self {
            LearnerKind::Soa => "soa",
            LearnerKind::Helly => "helly",
            LearnerKind::Vote { .. } => "vote",
            LearnerKind::Maj => "maj",
            LearnerKind::Agnostic => "agnostic",
        }
    }
}

#[derive(Clone, PartialEq)]
pub enum AdversarySpec {
    Worst,
    Random,
    Replay(Vec<LabeledExample>),
}

#[derive(Clone)]
pub struct ExperimentConfig {
    pub class_name: String,
    pub class: ConceptClass,
    pub hyp: Option<ConceptClass>,
    pub learner: LearnerKind,
    pub adversary: AdversarySpec,
    pub t: usize,
    pub seed: u64,
    /// Per-round trace destination.
    pub out: Option<PathBuf>,
    /// Append-only results ledger.
    pub ledger: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config_hash: u64,
    pub learner: &'static str,
    pub summary: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub csv_header: &'static str,
    pub csv_rows: Vec<String>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn config_hash(cfg: &ExperimentConfig) -> u64 {
    let mut s = String::new();
    let _ = write!(
        s,
        "{}|{}|{:?}|{}|{}|{}",
        cfg.class_name,
        cfg.learner.name(),
        cfg.adversary,
        cfg.t,
        cfg.seed,
        cfg.class.to_file_string()
    );
    if let Some(h) = &cfg.hyp {
        let _ = write!(s, "|{}", h.to_file_string());
    }
    if let LearnerKind::Vote { eps } = &cfg.learner {
        let _ = write!(s, "|eps={eps}");
    }
    fnv1a(s.as_bytes())
}

fn make_adversary(cfg: &ExperimentConfig) -> Result<Adversary> {
    Ok(match &cfg.adversary {
        AdversarySpec::Worst => match (&cfg.learner, &cfg.hyp) {
            (LearnerKind::Helly, Some(h)) => Adversary::Worst(Box::new(
                WorstCaseAdversary::against_hypotheses(&cfg.class, h)?,
            )),
            (LearnerKind::Vote { eps }, _) => Adversary::Worst(Box::new(
                WorstCaseAdversary::unrestricted(&cfg.class).with_threshold(eps.clone()),
            )),
            _ => Adversary::Worst(Box::new(WorstCaseAdversary::unrestricted(&cfg.class))),
        },
        AdversarySpec::Random => Adversary::Random(RandomAdversary::new(&cfg.class, cfg.seed)),
        AdversarySpec::Replay(stream) => Adversary::Replay {
            stream: stream.clone(),
            at: 0,
        },
    })
}

/// Run one configured experiment, write its trace when requested, and
/// append a summary row to the ledger.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let hash = config_hash(cfg);
    let record = match &cfg.learner {
        LearnerKind::Soa => run_soa(cfg, hash)?,
        LearnerKind::Helly => run_helly(cfg, hash)?,
        LearnerKind::Vote { eps } => run_vote(cfg, hash, eps.clone())?,
        LearnerKind::Maj => run_maj(cfg, hash)?,
        LearnerKind::Agnostic => run_agnostic(cfg, hash)?,
    };
    if let Some(path) = &cfg.out {
        let mut text = String::from(record.csv_header);
        text.push('\n');
        for row in &record.csv_rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    if let Some(path) = &cfg.ledger {
        append_ledger(path, &record)?;
    }
    Ok(record)
}

fn append_ledger(path: &Path, record: &RunRecord) -> Result<()> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    let mut line = String::new();
    if fresh {
        line.push_str("config_hash,learner,measured,bound,pass,summary\n");
    }
    let _ = writeln!(
        line,
        "{:016x},{},{:.6},{:.6},{},{}",
        record.config_hash,
        record.learner,
        record.measured,
        record.bound,
        record.pass,
        record.summary.replace(',', ";")
    );
    f.write_all(line.as_bytes()).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn run_soa(cfg: &ExperimentConfig, hash: u64) -> Result<RunRecord> {
    let mut adversary = make_adversary(cfg)?;
    let mut state = crate::soa::SoaState::new(&cfg.class)?;
    let mut rows = Vec::new();
    for t in 1..=cfg.t {
        let preds: Vec<Rat> = cfg
            .class
            .instances()
            .map(|x| rat_int(i64::from(state.predict(x))))
            .collect();
        let e = adversary.next_example(&preds)?;
        let prediction = state.predict(e.x);
        let mistake = state
            .observe(e)
            .map_err(|_| Error::UnrealizableStream { prefix_len: t })?;
        rows.push(format!(
            "{t},{},{},{},{}",
            e.x.0,
            u8::from(prediction),
            u8::from(e.y),
            u8::from(mistake)
        ));
    }
    let bound = crate::dims::ldim(&cfg.class).max(0) as f64;
    let measured = state.mistake_count as f64;
    Ok(RunRecord {
        config_hash: hash,
        learner: "soa",
        summary: format!("mistakes={measured} ldim={bound}"),
        measured,
        bound,
        pass: measured <= bound,
        csv_header: "t,x,prediction,label,mistake",
        csv_rows: rows,
    })
}

fn run_helly(cfg: &ExperimentConfig, hash: u64) -> Result<RunRecord> {
    let hyp = cfg.hyp.as_ref().ok_or_else(|| {
        Error::InvalidParameter("the cover learner needs a hypothesis class".into())
    })?;
    let mut adversary = make_adversary(cfg)?;
    let mut learner = crate::learner_helly::HellyLearner::new(&cfg.class, hyp)?;
    for _ in 0..cfg.t {
        let row = learner.prediction_row()?;
        let e = adversary.next_example(&row)?;
        learner.observe(e)?;
    }
    let trace = learner.into_trace();
    trace.check_invariants()?;
    let measured = trace.mistake_count as f64;
    let bound = trace.mistake_bound() as f64;
    Ok(RunRecord {
        config_hash: hash,
        learner: "helly",
        summary: format!(
            "mistakes={} branches={} bound={bound}",
            trace.mistake_count, trace.branch_count
        ),
        measured,
        bound,
        pass: measured <= bound,
        csv_header: crate::learner_helly::RunTrace::csv_header(),
        csv_rows: trace.csv_rows(),
    })
}

fn run_vote(cfg: &ExperimentConfig, hash: u64, eps: Rat) -> Result<RunRecord> {
    let mut adversary = make_adversary(cfg)?;
    let mut learner = crate::learner_vote::VoteLearner::new(&cfg.class, eps, cfg.seed)?;
    for _ in 0..cfg.t {
        let row = learner.prediction_row()?;
        let e = adversary.next_example(&row)?;
        learner.observe(e)?;
    }
    let trace = learner.into_trace();
    trace.check_invariants()?;
    let measured = trace.margin_error_count as f64;
    let bound = trace.margin_error_bound();
    Ok(RunRecord {
        config_hash: hash,
        learner: "vote",
        summary: format!(
            "margin_errors={} branches={} max_members={}",
            trace.margin_error_count, trace.branch_count, trace.max_members
        ),
        measured,
        bound,
        pass: measured <= bound,
        csv_header: crate::learner_vote::MarginTrace::csv_header(),
        csv_rows: trace.csv_rows(),
    })
}

fn run_maj(cfg: &ExperimentConfig, hash: u64) -> Result<RunRecord> {
    let mut adversary = make_adversary(cfg)?;
    let trace = crate::learner_vote::lv_as_mistake_learner(
        &cfg.class,
        |row| adversary.next_example(row).expect("adversary failed"),
        cfg.t,
        cfg.seed,
    )?;
    trace.check_invariants()?;
    let measured = trace.maj_mistake_count as f64;
    let bound = 80.0 * trace.budget.max(0) as f64;
    Ok(RunRecord {
        config_hash: hash,
        learner: "maj",
        summary: format!(
            "mistakes={} margin_errors={} branches={}",
            trace.maj_mistake_count, trace.margin_error_count, trace.branch_count
        ),
        measured,
        bound,
        pass: measured <= bound,
        csv_header: crate::learner_vote::MarginTrace::csv_header(),
        csv_rows: trace.csv_rows(),
    })
}

fn run_agnostic(cfg: &ExperimentConfig, hash: u64) -> Result<RunRecord> {
    let stream = match &cfg.adversary {
        AdversarySpec::Replay(stream) => stream.clone(),
        AdversarySpec::Random => {
            let mut rng = SplitMix64::new(cfg.seed);
            (0..cfg.t)
                .map(|_| LabeledExample {
                    x: Instance(rng.next_below(cfg.class.domain_size())),
                    y: rng.next_bool(),
                })
                .collect()
        }
        AdversarySpec::Worst => {
            return Err(Error::InvalidParameter(
                "the agnostic learner takes a replayed or random stream".into(),
            ))
        }
    };
    let report = crate::agnostic::agnostic_run(
        &cfg.class,
        &stream,
        crate::agnostic::DEFAULT_EXPERT_CAP,
        cfg.seed,
    )?;
    let measured = report.regret;
    let bound = report.composite_bound;
    Ok(RunRecord {
        config_hash: hash,
        learner: "agnostic",
        summary: format!(
            "regret={:.4} agg_regret_bound={:.4} experts={} trivial={}",
            report.regret, report.agg_regret_bound, report.n_experts, report.trivial_case
        ),
        measured,
        bound,
        pass: measured <= bound && report.agg_regret_ok_every_round,
        csv_header: crate::agnostic::AgnosticReport::csv_header(),
        csv_rows: report.csv_rows(),
    })
}

/// Parse a stream file: one `x y` pair per line, `#` comments allowed.
pub fn parse_stream(text: &str) -> Result<Vec<LabeledExample>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let x: usize =
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::ParseClass {
                    line: i + 1,
                    message: "stream line must be `x y`".into(),
                })?;
        let y: u8 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .filter(|v| *v <= 1)
            .ok_or_else(|| Error::ParseClass {
                line: i + 1,
                message: "label must be 0 or 1".into(),
            })?;
        out.push(LabeledExample::new(x, y == 1));
    }
    Ok(out)
}

impl std::fmt::Debug for AdversarySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdversarySpec::Worst => write!(f, "worst"),
            AdversarySpec::Random => write!(f, "random"),
            AdversarySpec::Replay(s) => write!(f, "replay[{}]", s.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::mb_exact;

    /// A proper learner following the exact game recursion loses exactly
    /// mb_exact mistakes to the worst-case adversary.
    #[test]
    fn worst_case_forces_mb_on_optimal_proper_learner() {
        let c = ConceptClass::singletons(3).unwrap();
        for (hyp, expected) in [(c.clone(), 2u64), (c.with_all_zero(), 1u64)] {
            let oracle = MbOracle::solve(&c, &hyp).unwrap();
            let mut adversary = WorstCaseAdversary::against_hypotheses(&c, &hyp).unwrap();
            let mut mask = c.full_mask();
            let mut mistakes = 0;
            for _ in 0..12 {
                // The learner plays the minimizing hypothesis at its state.
                let mut best = (Count::Infinite, 0usize);
                for (i, h) in hyp.concepts().iter().enumerate() {
                    let mut worst = Count::Finite(0);
                    for x in c.instances() {
                        let ones = mask.and(c.mask_one(x));
                        let zeros = mask.and_not(c.mask_one(x));
                        for (y, sub) in [(false, &zeros), (true, &ones)] {
                            if sub.is_empty() {
                                continue;
                            }
                            let gain = u64::from(h.label(x) != y);
                            let v = if *sub == mask {
                                if gain == 1 {
                                    Count::Infinite
                                } else {
                                    continue;
                                }
                            } else {
                                oracle.value_of(sub).plus(gain)
                            };
                            if v > worst {
                                worst = v;
                            }
                        }
                    }
                    if worst < best.0 {
                        best = (worst, i);
                    }
                }
                let h = hyp.concept(best.1);
                let preds: Vec<Rat> = c
                    .instances()
                    .map(|x| rat_int(i64::from(h.label(x))))
                    .collect();
                let e = adversary.next_example(&preds);
                if h.label(e.x) != e.y {
                    mistakes += 1;
                }
                mask = c.restrict_mask(&mask, e);
            }
            assert_eq!(mb_exact(&c, &hyp).unwrap().value, Count::Finite(expected));
            assert_eq!(mistakes, expected);
        }
    }

    #[test]
    fn unrestricted_adversary_forces_ldim_on_soa() {
        let c = ConceptClass::powerset(2).unwrap();
        let mut adversary = WorstCaseAdversary::unrestricted(&c);
        let mut state = crate::soa::SoaState::new(&c).unwrap();
        for _ in 0..6 {
            let preds: Vec<Rat> = c
                .instances()
                .map(|x| rat_int(i64::from(state.predict(x))))
                .collect();
            let e = adversary.next_example(&preds);
            state.observe(e).unwrap();
        }
        assert_eq!(state.mistake_count, 2);
    }

    #[test]
    fn random_adversary_stays_realizable() {
        let c = ConceptClass::thresholds(5).unwrap();
        let mut adversary = RandomAdversary::new(&c, 9);
        let mut seq = Vec::new();
        for _ in 0..30 {
            seq.push(adversary.next_example());
            assert!(c.is_realizable(&seq));
        }
    }

    #[test]
    fn capped_construction_falls_back_to_greedy() {
        let c = ConceptClass::powerset(3).unwrap();
        let (_, heuristic) = WorstCaseAdversary::against_hypotheses_capped(&c, &c, 2).unwrap();
        assert!(heuristic);
        let (_, heuristic) =
            WorstCaseAdversary::against_hypotheses_capped(&c, &c, 1_000_000).unwrap();
        assert!(!heuristic);
    }

    #[test]
    fn stream_parsing() {
        let s = parse_stream("# demo\n0 1\n2 0\n").unwrap();
        assert_eq!(
            s,
            vec![LabeledExample::new(0, true), LabeledExample::new(2, false)]
        );
        assert!(parse_stream("0 2\n").is_err());
    }

    #[test]
    fn experiment_round_trip() {
        let c = ConceptClass::singletons(3).unwrap();
        let cfg = ExperimentConfig {
            class_name: "singletons(3)".into(),
            class: c.clone(),
            hyp: Some(c.with_all_zero()),
            learner: LearnerKind::Helly,
            adversary: AdversarySpec::Worst,
            t: 10,
            seed: 1,
            out: None,
            ledger: None,
        };
        let record = run_experiment(&cfg).unwrap();
        assert!(record.pass);
        assert_eq!(record.measured, 1.0);
    }
}
