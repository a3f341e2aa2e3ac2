//! Cross-module learner runs: the optimal-algorithm baseline, the cover
//! learner against its exact adversary, the predictor-swap conversion, and
//! the randomized-proper reading of the agnostic learner.

use olearn::agnostic::agnostic_run;
use olearn::concepts::{ConceptClass, LabeledExample};
use olearn::cover::PredictorKind;
use olearn::dims::ldim;
use olearn::harness::{fixture_classes, WorstCaseAdversary};
use olearn::learner_helly::HellyLearner;
use olearn::learner_vote::{lv_run, new_propose_cache, VoteLearner};
use olearn::rng::SplitMix64;
use olearn::{rat, rat_int, Instance, Rat};

use num_traits::ToPrimitive;

#[test]
fn soa_stays_within_ldim_against_worst_case() {
    for f in fixture_classes().into_iter().take(20) {
        let l = ldim(&f.class).max(0) as u64;
        let mut adversary = WorstCaseAdversary::unrestricted(&f.class);
        let mut state = olearn::soa::SoaState::new(&f.class).unwrap();
        for _ in 0..30 {
            let preds: Vec<Rat> = f
                .class
                .instances()
                .map(|x| rat_int(i64::from(state.predict(x))))
                .collect();
            let e = adversary.next_example(&preds);
            state.observe(e).unwrap();
        }
        assert!(
            state.mistake_count <= l,
            "{}: {} mistakes > ldim {l}",
            f.name,
            state.mistake_count
        );
    }
}

#[test]
fn cover_learner_on_augmented_singletons() {
    // K = 2 with the all-zero hypothesis available, so the bound is
    // ceil(4 * 1 * 2 * ln 4) = 12; the observed count stays tiny.
    let c = ConceptClass::singletons(8).unwrap();
    let h = c.with_all_zero();
    let mut adversary = WorstCaseAdversary::against_hypotheses(&c, &h).unwrap();
    let mut learner = HellyLearner::new(&c, &h).unwrap();
    for _ in 0..30 {
        let row = learner.prediction_row().unwrap();
        let e = adversary.next_example(&row);
        learner.observe(e).unwrap();
    }
    let trace = learner.into_trace();
    assert_eq!(trace.mistake_bound(), 12);
    assert!(trace.mistake_count <= 2);
    trace.check_invariants().unwrap();
}

/// Margin run from the worked singleton example: eps = 0.4 over 20
/// worst-case rounds keeps margin errors under the formula bound (64).
#[test]
fn margin_learner_singletons_worst_case() {
    let c = ConceptClass::singletons(3).unwrap();
    let mut adversary = WorstCaseAdversary::unrestricted(&c).with_threshold(rat(2, 5));
    let trace = lv_run(&c, rat(2, 5), |row| adversary.next_example(row), 20, 5).unwrap();
    assert_eq!(trace.margin_error_bound().ceil() as u64, 64);
    assert!(trace.margin_error_count <= 64);
    assert!(
        trace.margin_error_count <= 4,
        "expected a short trace in practice"
    );
    trace.check_invariants().unwrap();
}

/// The cover machinery accepts any mistake-bounded predictor in place of the
/// optimal one; with halving (budget floor(log2 |C|)) the count bound scales
/// with that budget and every invariant still holds.
#[test]
fn halving_predictor_swap_scales_the_bound() {
    let c = ConceptClass::singletons(8).unwrap();
    let eps = rat(1, 4);
    let mut adversary = WorstCaseAdversary::unrestricted(&c).with_threshold(eps.clone());
    let mut learner = VoteLearner::with_options(
        &c,
        eps,
        3,
        PredictorKind::Halving,
        true,
        new_propose_cache(),
    )
    .unwrap();
    for _ in 0..30 {
        let row = learner.prediction_row().unwrap();
        let e = adversary.next_example(&row);
        learner.observe(e).unwrap();
    }
    let trace = learner.into_trace();
    assert_eq!(trace.budget, 3); // floor(log2 8), not ldim = 1
    assert!((trace.margin_error_count as f64) <= trace.margin_error_bound());
    trace.check_invariants().unwrap();
}

/// Randomized-proper interpretation: drawing one member of the emitted vote
/// uniformly has expected loss equal to the deterministic absolute loss.
/// Monte-Carlo agreement within three standard errors at 10^4 draws.
#[test]
fn agnostic_single_draw_loss_matches_vote_loss() {
    let class = ConceptClass::singletons(3).unwrap();
    let stream: Vec<LabeledExample> = vec![
        LabeledExample::new(0, false),
        LabeledExample::new(1, true),
        LabeledExample::new(2, false),
        LabeledExample::new(0, true),
        LabeledExample::new(1, false),
        LabeledExample::new(2, true),
    ];
    let report = agnostic_run(&class, &stream, 100_000, 77).unwrap();
    let expected: f64 = report.learner_loss.to_f64().unwrap();

    let draws = 10_000usize;
    let mut rng = SplitMix64::new(4242);
    let mut total = 0.0f64;
    let mut total_sq = 0.0f64;
    for _ in 0..draws {
        let mut loss = 0.0;
        for (vote, e) in report.emitted_votes.iter().zip(&stream) {
            let pick = vote.members[rng.next_below(vote.members.len())];
            if class.concept(pick).label(e.x) != e.y {
                loss += 1.0;
            }
        }
        total += loss;
        total_sq += loss * loss;
    }
    let mean = total / draws as f64;
    let var = (total_sq / draws as f64 - mean * mean).max(0.0);
    let se = (var / draws as f64).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * se + 1e-9,
        "MC mean {mean:.4} vs expected {expected:.4} (se {se:.4})"
    );
}

/// Arithmetic from the worked example: T = 4 on a Littlestone-1 class gives
/// 5 experts and aggregation rate sqrt(2 ln 5).
#[test]
fn agnostic_parameters_match_formulas() {
    let class = ConceptClass::singletons(3).unwrap();
    let stream: Vec<LabeledExample> = (0..4).map(|t| LabeledExample::new(t % 3, false)).collect();
    let report = agnostic_run(&class, &stream, 100_000, 1).unwrap();
    assert_eq!(report.n_experts, 5);
    assert!((report.eta - (2.0 * 5.0f64.ln()).sqrt()).abs() < 1e-12);
    // Realizable stream: the best concept is perfect, regret equals the
    // learner's own loss and stays within the composite bound.
    assert_eq!(report.best_concept_loss, 1); // labels all-zero; best singleton errs once
    assert!(report.regret <= report.composite_bound);
}

/// The vote learner size shape: proposed votes use O(vc*/eps^2) members.
#[test]
fn vote_sizes_follow_dual_vc_shape() {
    let c = ConceptClass::powerset(3).unwrap();
    let eps = rat(1, 4);
    let mut adversary = WorstCaseAdversary::unrestricted(&c).with_threshold(eps.clone());
    let trace = lv_run(&c, eps, |row| adversary.next_example(row), 25, 9).unwrap();
    assert!(trace.max_members > 0);
    // Votes come from the dual approximation at eps/2, so the realized
    // constant in front of vc*/eps^2 starts at 32 and at most doubles a few
    // times before verification succeeds.
    assert!(trace.member_shape_constant() <= 128.0);
    let _ = Instance(0);
}
