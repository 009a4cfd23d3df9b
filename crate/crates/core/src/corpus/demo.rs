//! Bundled stand-in data so the pipeline runs without the private corpora.
//!
//! None of this is real data: the expression table is a small hand-written
//! German sample and the online corpus is assembled from templates.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::augment::AugmentationJob;
use super::expressions::{parse_expression_table_str, ExpressionRecord};
use super::generators::{GenerationError, RecordedCompletion, TextGenerator};
use super::sample::{Dataset, DatasetName, Source, TextSample};
use crate::Label;

pub const DEMO_EXPRESSION_TABLE: &str = include_str!("../../config/demo/expressions.csv");

pub fn demo_expressions() -> Vec<ExpressionRecord> {
    parse_expression_table_str(DEMO_EXPRESSION_TABLE).expect("bundled demo table is valid")
}

const ONLINE_OPENERS: &[&str] = &[
    "Hallo zusammen,",
    "Ich weiß nicht, wo ich sonst schreiben soll.",
    "Kurzes Update von mir:",
    "Vielleicht kennt das jemand:",
    "Ich lese hier schon länger mit.",
    "Mal eine Frage in die Runde:",
];

const ONLINE_BURNOUT: &[&str] = &[
    "ich bin seit Wochen völlig erschöpft und komme morgens kaum aus dem Bett.",
    "die Arbeit frisst mich auf und ich fühle mich nur noch leer.",
    "ich schlafe schlecht und liege nachts stundenlang wach.",
    "alles ist mir zu viel und ich kann mich auf nichts mehr konzentrieren.",
    "ich habe keine Kraft mehr und weine oft ohne Grund.",
    "selbst kleine Aufgaben überfordern mich inzwischen.",
    "mir ist die Arbeit egal geworden und ich mache nur noch Dienst nach Vorschrift.",
    "ich reagiere gereizt auf meine Familie und ziehe mich zurück.",
    "ständig habe ich Kopfschmerzen und einen verspannten Nacken.",
    "der Gedanke an Montag macht mir schon am Sonntag Bauchweh.",
    "ich fühle mich ausgebrannt und sehe keinen Sinn mehr in meinem Job.",
    "ich funktioniere nur noch und spüre keine Freude mehr.",
];

const ONLINE_CONTROL: &[&str] = &[
    "ich habe heute einen schönen Ausflug an den See gemacht.",
    "meine neue Stelle macht mir richtig Spaß und das Team ist toll.",
    "ich schlafe gut und starte ausgeruht in den Tag.",
    "am Wochenende probiere ich ein neues Rezept aus.",
    "ich freue mich auf den Urlaub mit meiner Familie.",
    "die Projekte laufen gut und ich fühle mich motiviert.",
    "seit ich Sport mache, bin ich viel entspannter.",
    "mit meinen Kollegen verstehe ich mich wunderbar.",
    "ich habe endlich Zeit für meine Hobbys gefunden.",
    "der Garten blüht und ich genieße die Sonne.",
    "nach Feierabend treffe ich gerne Freunde.",
    "ich bin zufrieden mit meinem Alltag und voller Energie.",
];

const ONLINE_CLOSERS: &[&str] = &[
    "",
    " Danke fürs Lesen.",
    " Wie geht es euch damit?",
    " Liebe Grüße.",
    " Das wollte ich einfach mal loswerden.",
];

pub const ONLINE_DEMO_BURNOUT: usize = 160;
pub const ONLINE_DEMO_CONTROL: usize = 128;

/// Template-built forum-style posts with roughly the class balance of the
/// original online corpus.
pub fn synthetic_online_corpus(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    for (label, bodies, count) in [
        (Label::Burnout, ONLINE_BURNOUT, ONLINE_DEMO_BURNOUT),
        (Label::NoBurnout, ONLINE_CONTROL, ONLINE_DEMO_CONTROL),
    ] {
        let mut seen = std::collections::HashSet::new();
        while seen.len() < count {
            let opener = ONLINE_OPENERS.choose(&mut rng).expect("non-empty");
            let a = bodies.choose(&mut rng).expect("non-empty");
            let mut text = format!("{opener} {a}");
            if rng.gen_bool(0.6) {
                let b = bodies.choose(&mut rng).expect("non-empty");
                if b != a {
                    let mut chars = b.chars();
                    let first = chars.next().map(|c| c.to_uppercase().collect::<String>()).unwrap_or_default();
                    text.push_str(&format!(" {first}{}", chars.as_str()));
                }
            }
            text.push_str(ONLINE_CLOSERS.choose(&mut rng).expect("non-empty"));
            if seen.insert(text.clone()) {
                samples.push(TextSample::new(text, label, Source::Online));
            }
        }
    }
    Dataset::new(DatasetName::Online, samples)
}

/// Runs every job's prompt through `client` once and keeps the exchanges,
/// for replay with the recorded generator.
pub fn record_completions(
    jobs: &[AugmentationJob],
    client: &dyn TextGenerator,
) -> Result<Vec<RecordedCompletion>, GenerationError> {
    jobs.iter()
        .map(|job| {
            client.complete(&job.prompt).map(|completion| RecordedCompletion {
                prompt: job.prompt.clone(),
                completion,
            })
        })
        .collect()
}
