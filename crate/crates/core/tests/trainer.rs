use burnout_core::corpus::generators::TemplateGenerator;
use burnout_core::corpus::{build_v1, build_v2, demo, split, AugmentOptions, Dataset, DatasetName, Source, TextSample};
use burnout_core::text::{vocabulary_terms, Tokenizer};
use burnout_core::trainer::{
    extend_vocabulary, fine_tune, label_for_score, load_base, ClassifierArtifact, TrainConfig, TrainError,
};
use burnout_core::Label;
use proptest::prelude::*;
use std::sync::OnceLock;

fn demo_v1() -> Dataset {
    build_v1(&demo::demo_expressions()).unwrap()
}

fn demo_v2() -> Dataset {
    build_v2(&demo_v1(), &TemplateGenerator::new(7), &AugmentOptions::default())
        .unwrap()
        .dataset
}

fn train_on(data: &Dataset, seed: u64, epochs: u32) -> ClassifierArtifact {
    let (train, eval) = split(data, 0.8, seed).unwrap();
    let config = TrainConfig {
        epochs,
        ..TrainConfig::with_seed(seed)
    };
    let (mut tok, mut model) = load_base(&config).unwrap();
    let terms = vocabulary_terms(demo_v1().samples().iter().map(|s| s.text.as_str()));
    extend_vocabulary(&mut tok, &mut model, &terms);
    fine_tune(&train, &eval, &config, tok, model).unwrap().0
}

#[test]
fn extension_adds_exactly_the_novel_words() {
    let config = TrainConfig::with_seed(1);
    let (mut tok, mut model) = load_base(&config).unwrap();
    let base = Tokenizer::base_german();
    let terms: Vec<String> = ["ich", "müde", "Erschöpfung", "Nervenkostüm", "Tränen", "und", "Zahnfleisch"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    // oracle: a term is novel iff the untouched tokenizer does not know it as a whole word
    let novel: Vec<&String> = terms.iter().filter(|t| base.token_id(t).is_none()).collect();
    assert!(!novel.is_empty() && novel.len() < terms.len());
    let before: Vec<usize> = novel.iter().map(|t| base.tokenize_ids(t).len()).collect();
    assert!(before.iter().any(|&n| n > 1));

    let added = extend_vocabulary(&mut tok, &mut model, &terms);
    assert_eq!(added, novel.len());
    assert_eq!(tok.vocab_size(), model.config().vocab_size);
    for t in &novel {
        let ids = tok.tokenize_ids(t);
        assert_eq!(ids.len(), 1, "{t}");
        assert_eq!(tok.decode(&ids), **t);
    }
    assert_eq!(extend_vocabulary(&mut tok, &mut model, &terms), 0);
    assert_eq!(extend_vocabulary(&mut tok, &mut model, &[]), 0);
}

#[test]
fn rejects_degenerate_training_sets() {
    let config = TrainConfig::with_seed(1);
    let eval = Dataset::new(
        DatasetName::V1,
        vec![TextSample::new("Ich bin müde.", Label::Burnout, Source::Curated)],
    );
    let single = Dataset::new(
        DatasetName::V1,
        (0..5)
            .map(|i| TextSample::new(format!("Ich bin so müde {i}."), Label::Burnout, Source::Curated))
            .collect(),
    );
    let (tok, model) = load_base(&config).unwrap();
    let err = fine_tune(&single, &eval, &config, tok.clone(), model.clone()).unwrap_err();
    assert!(matches!(err, TrainError::SingleClass { present: Label::Burnout }), "{err}");

    let empty = Dataset::new(DatasetName::V1, vec![]);
    let err = fine_tune(&empty, &eval, &config, tok, model).unwrap_err();
    assert!(matches!(err, TrainError::EmptyTrainSet));
}

#[test]
fn non_finite_loss_aborts_with_diagnostics() {
    let config = TrainConfig::with_seed(2);
    let (train, eval) = split(&demo_v1(), 0.8, 2).unwrap();
    let (tok, mut model) = load_base(&config).unwrap();
    model.params_mut().get_mut("classifier.bias")[[0, 0]] = f64::NAN;
    match fine_tune(&train, &eval, &config, tok, model) {
        Err(TrainError::NonFinite { step: 0, epoch: 0, .. }) => {}
        other => panic!("expected non-finite abort, got {other:?}"),
    }
}

#[test]
fn same_seed_gives_identical_timeline() {
    let v1 = demo_v1();
    let a = train_on(&v1, 9, 3);
    let b = train_on(&v1, 9, 3);
    assert_eq!(a.timeline, b.timeline);
    assert!(a.timeline.len() >= 10, "{} points", a.timeline.len());
    for p in a.timeline.points() {
        assert!((0.0..=1.0).contains(&p.eval_f1) && (0.0..=1.0).contains(&p.eval_accuracy));
        assert!(p.training_loss >= 0.0 && p.eval_loss >= 0.0);
    }
    let c = train_on(&v1, 10, 3);
    assert_ne!(a.timeline, c.timeline);
}

#[test]
fn trained_model_recognises_its_training_texts() {
    let v2 = demo_v2();
    let (train, _) = split(&v2, 0.8, 3).unwrap();
    let artifact = train_on(&v2, 3, 2);
    let probe: Vec<&str> = train
        .samples()
        .iter()
        .filter(|s| s.label == Label::Burnout)
        .take(50)
        .map(|s| s.text.as_str())
        .collect();
    assert_eq!(probe.len(), 50);
    let hits = artifact
        .predict_batch(&probe)
        .unwrap()
        .iter()
        .filter(|p| p.label == Label::Burnout)
        .count();
    assert!(hits >= 45, "{hits}/50");
}

#[test]
fn prediction_contract() {
    let artifact = train_on(&demo_v1(), 4, 2);
    assert_eq!(label_for_score(0.5), Label::Burnout);
    assert_eq!(label_for_score(0.4999999), Label::NoBurnout);

    let text = "Ich fühle mich ausgebrannt und leer.";
    let p = artifact.predict(text).unwrap();
    assert_eq!(p, artifact.predict(text).unwrap());
    assert!((0.0..=1.0).contains(&p.score));
    assert_eq!(p.label, label_for_score(p.score));
    let probs = artifact.model.probabilities(&artifact.encode(text).ids);
    assert!((probs.sum() - 1.0).abs() < 1e-6);

    assert!(matches!(artifact.predict("   "), Err(TrainError::EmptyText)));
    assert!(artifact.predict_batch::<&str>(&[]).unwrap().is_empty());
    match artifact.predict_batch(&["Alles gut.", ""]) {
        Err(TrainError::Batch { index: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn artifact_round_trips_through_a_directory() {
    let artifact = train_on(&demo_v1(), 5, 2);
    let dir = tempfile::tempdir().unwrap();
    artifact.save(dir.path()).unwrap();
    for f in ["config.json", "vocab.txt", "model.safetensors", "timeline.csv", "curves.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let loaded = ClassifierArtifact::load(dir.path()).unwrap();
    assert_eq!(loaded.metadata, artifact.metadata);
    assert_eq!(loaded.timeline, artifact.timeline);
    assert_eq!(loaded.tokenizer.vocab_size(), loaded.model.config().vocab_size);
    let texts = ["Ich kann nicht mehr schlafen.", "Heute war ein schöner Tag."];
    assert_eq!(loaded.predict_batch(&texts).unwrap(), artifact.predict_batch(&texts).unwrap());

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(meta["train_config"]["epochs"], 2);
    assert_eq!(meta["train_config"]["warmup_steps"], 500);
    assert_eq!(meta["train_config"]["optimizer"]["name"], "adamw");

    // a second save of the same artifact is byte-identical
    let again = tempfile::tempdir().unwrap();
    loaded.save(again.path()).unwrap();
    for f in ["config.json", "model.safetensors", "timeline.csv", "curves.svg"] {
        assert_eq!(
            std::fs::read(dir.path().join(f)).unwrap(),
            std::fs::read(again.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn batch_prediction_matches_single(texts in prop::collection::vec("[a-zäöüA-Z ]{1,30}[.!?]", 0..8)) {
        static ARTIFACT: OnceLock<ClassifierArtifact> = OnceLock::new();
        let artifact = ARTIFACT.get_or_init(|| train_on(&demo_v1(), 1, 2));
        let batch = artifact.predict_batch(&texts).unwrap();
        prop_assert_eq!(batch.len(), texts.len());
        for (t, p) in texts.iter().zip(&batch) {
            prop_assert_eq!(*p, artifact.predict(t).unwrap());
        }
    }
}
