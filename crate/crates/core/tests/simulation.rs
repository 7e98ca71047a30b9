use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigcode_core::codegen::{ChainConfig, CodeFormat, Wordlist};
use sigcode_core::registrar::{Registrar, SeededNonceSource};
use sigcode_core::simulator::{
    nonce_seed, run_baseline, run_scenario, run_scenario_with_registrar, EnvelopeClass, ScenarioConfig,
};
use sigcode_core::Disposition;

fn base(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        n_voters: 300,
        rng_seed: seed,
        coercion_rate: 0.4,
        impersonation_rate: 0.25,
        ..ScenarioConfig::default()
    }
}

#[test]
fn more_cancellation_never_counts_more_coerced_ballots() {
    let mut last = usize::MAX;
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let out = run_scenario(&ScenarioConfig {
            cancel_probability: p,
            ..base(5)
        })
        .unwrap();
        let counted = out.class_summary(EnvelopeClass::Coerced).count(Disposition::Valid);
        assert!(counted <= last, "p={p}: {counted} > {last}");
        last = counted;
    }
    assert_eq!(last, 0);
}

#[test]
fn seed_changes_outcome_and_is_reproducible() {
    let a = run_scenario(&base(1)).unwrap();
    assert_eq!(a, run_scenario(&base(1)).unwrap());
    let b = run_scenario(&base(2)).unwrap();
    assert_ne!(a.trace, b.trace);
}

#[test]
fn noise_rate_does_not_reshuffle_adversaries() {
    let clean = run_scenario(&base(3)).unwrap();
    let noisy = run_scenario(&ScenarioConfig {
        digit_typo_rate: 0.3,
        ..base(3)
    })
    .unwrap();
    let classes = |o: &sigcode_core::simulator::ScenarioOutcome| o.trace.iter().map(|t| t.class).collect::<Vec<_>>();
    assert_eq!(classes(&clean), classes(&noisy));
    for t in &noisy.trace {
        if t.noised {
            // A single substituted digit is always caught by the check digit.
            assert_eq!(t.status, Disposition::Malformed);
        }
    }
    assert!(noisy.transcription_failure_rate > 0.0);
}

#[test]
fn word_noise_is_mostly_recovered() {
    let out = run_scenario(&ScenarioConfig {
        format: CodeFormat::WORDS_6,
        word_typo_rate: 1.0,
        coercion_rate: 0.0,
        impersonation_rate: 0.0,
        ..base(4)
    })
    .unwrap();
    let valid = out.counts.count(Disposition::Valid);
    // Many list words are one edit apart, so some edits land on another word.
    assert!(valid * 10 >= out.envelopes() * 6, "{valid}/{}", out.envelopes());
    for t in &out.trace {
        assert_ne!(t.status, Disposition::Expired);
        if t.status == Disposition::Valid {
            assert!(t.corrections <= 1);
        }
    }
}

#[test]
fn baseline_draws_are_plain_bernoulli() {
    let cfg = base(6);
    let (fa, fr) = (0.12, 0.07);
    let out = run_baseline(&cfg, fa, fr).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for t in &out.trace {
        let u: f64 = rng.random();
        let accepted = match t.class {
            EnvelopeClass::Honest => u >= fr,
            _ => u < fa,
        };
        assert_eq!(t.status == Disposition::Valid, accepted);
    }
}

#[test]
fn audit_log_replays_to_identical_state() {
    for format in [CodeFormat::NUMERIC_20, CodeFormat::WORDS_6] {
        let cfg = ScenarioConfig {
            format,
            cancel_probability: 0.5,
            digit_typo_rate: 0.05,
            word_typo_rate: 0.05,
            ..base(7)
        };
        let (_, registrar) = run_scenario_with_registrar(&cfg).unwrap();
        let replayed = Registrar::replay(
            registrar.audit(),
            ChainConfig::default(),
            Box::new(SeededNonceSource::new(nonce_seed(&cfg))),
            Wordlist::english(),
        )
        .unwrap();
        assert_eq!(replayed.state(), registrar.state());
    }
}

#[test]
fn store_file_round_trips_a_scenario() {
    let (_, registrar) = run_scenario_with_registrar(&base(8)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("registrar.store");
    registrar.save_store(&path).unwrap();
    let loaded = Registrar::load_store(
        &path,
        Box::new(SeededNonceSource::new(0)),
        registrar.clock().clone(),
        Wordlist::english(),
    )
    .unwrap();
    assert_eq!(loaded.state(), registrar.state());
}
