//! A constructed 17-respondent survey for exercising the evaluation
//! reports. Inventory answers are chosen so that the per-rule label counts
//! are 4/13 (cut-off 1), 2/15 (cut-off 2, working) and 7/10 (cut-off 3);
//! two free-text answers are left empty.

use crate::olbi::{response_from_coded, Gender, InventoryConfig, ITEMS_PER_DIMENSION};

use super::{FreeTextAnswers, SurveyRecord};

type Coded = [u8; ITEMS_PER_DIMENSION];

struct Profile {
    exhaustion: Coded,
    disengagement: Coded,
    answers: [&'static str; 4],
}

// exhaustion 3.0, disengagement 2.75: burnout under cut-offs 1, 2 (working) and 3
const HIGH: [Profile; 2] = [
    Profile {
        exhaustion: [4, 3, 2, 3, 3, 4, 2, 3],
        disengagement: [3, 3, 3, 2, 3, 3, 2, 3],
        answers: [
            "Ich komme morgens kaum aus dem Bett und schleppe mich zur Arbeit.",
            "Nach Feierabend bin ich völlig erschöpft und kann nicht abschalten.",
            "Die Arbeit fühlt sich sinnlos an und ich mache nur noch das Nötigste.",
            "Ich schlafe schlecht und grüble nachts über unerledigte Aufgaben.",
        ],
    },
    Profile {
        exhaustion: [3, 3, 3, 3, 3, 3, 3, 3],
        disengagement: [2, 3, 3, 3, 3, 2, 3, 3],
        answers: [
            "Ich fühle mich ausgebrannt und leer, egal wie viel ich schlafe.",
            "Kleinigkeiten bringen mich zum Weinen und ich bin schnell gereizt.",
            "Mir ist alles zu viel, ich sehe keinen Ausweg mehr.",
            "Ich habe ständig Kopfschmerzen und Magenprobleme vor der Arbeit.",
        ],
    },
];

// exhaustion 2.5, disengagement 2.25: burnout under cut-offs 1 and 3 only
const MODERATE: [Profile; 2] = [
    Profile {
        exhaustion: [3, 2, 3, 2, 3, 2, 3, 2],
        disengagement: [2, 2, 3, 2, 2, 3, 2, 2],
        answers: [
            "Meistens bin ich am Abend ziemlich müde und lustlos.",
            "Die vielen Überstunden zehren an meinen Kräften.",
            "Manchmal frage ich mich, wozu ich mich so anstrenge.",
            "Am Wochenende brauche ich lange, um mich zu erholen.",
        ],
    },
    Profile {
        exhaustion: [2, 3, 2, 3, 2, 3, 3, 2],
        disengagement: [3, 2, 2, 2, 3, 2, 2, 2],
        answers: [
            "Ich bin oft unkonzentriert und vergesse Termine.",
            "Der Zeitdruck im Team macht mich nervös.",
            "Die Arbeit macht mir weniger Freude als früher.",
            "Ich ziehe mich nach der Arbeit eher zurück.",
        ],
    },
];

// exhaustion 2.75, disengagement 1.875: burnout under cut-off 3 only
const TIRED: [Profile; 3] = [
    Profile {
        exhaustion: [3, 3, 2, 3, 3, 3, 2, 3],
        disengagement: [2, 2, 2, 2, 2, 2, 2, 1],
        answers: [
            "Der Job ist anstrengend, aber ich mag meine Aufgaben.",
            "Abends bin ich erschöpft, doch die Arbeit ist mir wichtig.",
            "Ich arbeite gerne mit meinen Kollegen zusammen.",
            "Zu wenig Schlaf ist gerade mein größtes Problem.",
        ],
    },
    Profile {
        exhaustion: [2, 3, 3, 3, 3, 2, 3, 3],
        disengagement: [1, 2, 2, 2, 2, 2, 2, 2],
        answers: [
            "Viel Stress in letzter Zeit, aber die Arbeit erfüllt mich.",
            "Ich fühle mich körperlich oft müde.",
            "Meine Tätigkeit finde ich sinnvoll und spannend.",
            "Ich wünsche mir mehr Pausen im Arbeitsalltag.",
        ],
    },
    Profile {
        exhaustion: [3, 2, 3, 3, 2, 3, 3, 3],
        disengagement: [2, 2, 1, 2, 2, 2, 2, 2],
        answers: [
            "Der Tag ist lang und anstrengend, aber ich schaffe es.",
            "Mein Körper braucht nach der Schicht viel Ruhe.",
            "Ich identifiziere mich stark mit meinem Beruf.",
            "Sport hilft mir beim Abschalten.",
        ],
    },
];

const LOW_ANSWERS: [[&str; 4]; 10] = [
    [
        "Ich starte gut gelaunt in den Tag.",
        "Nach der Arbeit treffe ich gerne Freunde.",
        "Mein Job macht mir viel Spaß.",
        "Ich fühle mich ausgeglichen und zufrieden.",
    ],
    [
        "Meine Arbeit ist abwechslungsreich und spannend.",
        "Ich schlafe gut und wache erholt auf.",
        "Mit meinem Team verstehe ich mich prima.",
        "",
    ],
    [
        "Ich gehe gern zur Arbeit.",
        "Am Abend habe ich noch Energie für Hobbys.",
        "Ich kann gut abschalten.",
        "Insgesamt geht es mir gut.",
    ],
    [
        "Der Alltag ist entspannt und gut organisiert.",
        "Ich freue mich auf neue Projekte.",
        "Meine Vorgesetzte unterstützt mich sehr.",
        "Ich habe genug Zeit für meine Familie.",
    ],
    [
        "Morgens trinke ich in Ruhe Kaffee und starte motiviert.",
        "",
        "Ich finde meine Arbeit sinnvoll.",
        "Stress habe ich kaum.",
    ],
    [
        "Ich bin zufrieden mit meiner Stelle.",
        "Nach Feierabend gehe ich oft spazieren.",
        "Die Kollegen sind hilfsbereit.",
        "Mir geht es körperlich und seelisch gut.",
    ],
    [
        "Die Arbeit läuft rund.",
        "Ich bin abends angenehm müde, aber zufrieden.",
        "Ich lerne ständig etwas Neues.",
        "Urlaub plane ich mit Vorfreude.",
    ],
    [
        "Ich habe einen geregelten Tagesablauf.",
        "Meine Aufgaben schaffe ich gut.",
        "Ich fühle mich wertgeschätzt.",
        "Ich bin gesund und munter.",
    ],
    [
        "Jeder Tag bringt interessante Aufgaben.",
        "Ich erhole mich gut am Wochenende.",
        "Die Arbeit erfüllt mich.",
        "Ich bin gelassen und ruhig.",
    ],
    [
        "Ich arbeite konzentriert und gern.",
        "Mein Privatleben ist ausgeglichen.",
        "Ich mag meine Kunden.",
        "Ich schlafe tief und fest.",
    ],
];

// exhaustion 1.875, disengagement 1.625: no burnout under any rule
const LOW_EXHAUSTION: Coded = [2, 2, 2, 2, 2, 2, 1, 2];
const LOW_DISENGAGEMENT: Coded = [2, 1, 2, 2, 1, 2, 2, 1];

fn rotated(c: &Coded, k: usize) -> Coded {
    let mut out = *c;
    out.rotate_left(k % ITEMS_PER_DIMENSION);
    out
}

/// The 17 records, in submission order, scored against `config`.
pub fn demo_survey(config: &InventoryConfig) -> Vec<SurveyRecord> {
    let mut profiles: Vec<(Coded, Coded, [&str; 4])> = Vec::new();
    for p in HIGH.iter().chain(&MODERATE).chain(&TIRED) {
        profiles.push((p.exhaustion, p.disengagement, p.answers));
    }
    for (i, answers) in LOW_ANSWERS.iter().enumerate() {
        profiles.push((rotated(&LOW_EXHAUSTION, i), rotated(&LOW_DISENGAGEMENT, i * 3), *answers));
    }
    // interleave so that burnout respondents are not all at the front
    let order = [7, 0, 8, 9, 2, 10, 4, 11, 12, 1, 13, 3, 14, 5, 15, 6, 16];
    let genders = [Gender::Female, Gender::Male, Gender::Female, Gender::Diverse, Gender::Unspecified];
    order
        .iter()
        .enumerate()
        .map(|(n, &i)| {
            let (exh, dis, answers) = &profiles[i];
            let id = format!("r{:02}", n + 1);
            let response = response_from_coded(&id, exh, dis, &config.inventory, &config.keying)
                .expect("fixture answers are in range");
            SurveyRecord {
                respondent_id: id,
                free_text: FreeTextAnswers::new(*answers),
                inventory: response.answers,
                age: Some(24 + (n as u16 * 7) % 38),
                gender: (n % 3 != 2).then(|| genders[n % genders.len()]),
            }
        })
        .collect()
}
