//! Character-trigram language identification.
//!
//! Each supported language has a trigram profile built from a short seed
//! text plus a stopword list. A sentence is scored with add-one smoothed
//! trigram log-likelihoods and a bonus per stopword hit; the reported score
//! is the softmax posterior of the winning language, so it lies in `[0, 1]`
//! and grows with how much better the winner fits than the alternatives.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageGuess {
    pub label: String,
    pub score: f64,
}

pub const UNDETERMINED: &str = "und";

const STOPWORD_BONUS: f64 = 2.0;
const SMOOTHING_VOCAB: f64 = 8000.0;

struct Seed {
    code: &'static str,
    stopwords: &'static [&'static str],
    text: &'static str,
}

const SEEDS: &[Seed] = &[
    Seed {
        code: "es",
        stopwords: &[
            "de",
            "la",
            "que",
            "el",
            "en",
            "y",
            "los",
            "se",
            "del",
            "las",
            "un",
            "por",
            "con",
            "una",
            "su",
            "para",
            "es",
            "al",
            "lo",
            "como",
            "más",
            "pero",
            "sus",
            "le",
            "ya",
            "fue",
            "este",
            "ha",
            "porque",
            "esta",
            "son",
            "entre",
            "está",
            "cuando",
            "muy",
            "sin",
            "sobre",
            "también",
            "hasta",
            "hay",
            "donde",
            "han",
            "desde",
            "todo",
            "durante",
            "todos",
            "ni",
            "fueron",
            "había",
            "ellos",
            "esto",
            "antes",
            "qué",
            "otro",
            "otra",
            "él",
            "estos",
            "ella",
            "estaba",
            "tras",
            "mediante",
            "presentó",
            "refiere",
            "años",
            "dicho",
            "cual",
        ],
        text: "El paciente de cincuenta años ingresó en el hospital por un cuadro de fiebre y dolor \
               abdominal. La exploración física mostró una lesión en la región derecha del abdomen. \
               Se le realizó una tomografía que confirmó la presencia de una masa. Tras el \
               tratamiento con antibióticos y analgésicos, la evolución fue favorable y se decidió \
               el alta hospitalaria. Los resultados de los análisis de sangre estaban dentro de los \
               valores normales. La enfermedad se caracteriza por la aparición de síntomas \
               respiratorios, tos seca y cansancio. Es importante que el médico valore cada caso \
               con cuidado, porque también hay pacientes que no presentan ningún síntoma. Durante \
               la consulta, la paciente refiere que el dolor empezó hace tres días y que no mejora \
               con el reposo. Según los datos del estudio, la incidencia de la infección ha \
               aumentado en los últimos años en España. Además, se recomienda realizar controles \
               periódicos para detectar complicaciones. La administración de insulina redujo los \
               niveles de glucosa. Hoy hace buen tiempo y mañana iremos a la ciudad con nuestros \
               amigos, donde comeremos juntos y hablaremos de la vida.",
    },
    Seed {
        code: "en",
        stopwords: &[
            "the", "of", "and", "to", "in", "is", "was", "for", "that", "with", "on", "as", "by", "at", "from", "it",
            "be", "are", "this", "which", "or", "an", "were", "has", "have", "had", "not", "but", "its", "been",
            "their", "they", "he", "she", "we", "after", "who", "there", "these", "than", "into", "also", "can",
            "will", "would", "should", "other", "more", "all", "any", "some", "such", "may", "between", "during",
            "without", "about", "most", "both", "each", "did", "does", "our", "his", "her", "them", "when", "what",
        ],
        text: "The patient was admitted to the hospital with fever and abdominal pain. Physical \
               examination showed a lesion in the right side of the abdomen. A scan was performed \
               which confirmed the presence of a mass. After treatment with antibiotics and pain \
               relief, the patient recovered well and was discharged. The results of the blood tests \
               were within the normal range. The disease is characterized by the onset of \
               respiratory symptoms, dry cough and fatigue. It is important that the physician \
               evaluates each case carefully, because there are also patients who have no symptoms \
               at all. During the visit, she reported that the pain started three days ago and does \
               not improve with rest. According to the study, the incidence of the infection has \
               increased over the last few years. Regular follow up is recommended to detect any \
               complications. The weather is nice today and tomorrow we will go to the city with \
               our friends, where we will have lunch together and talk about life.",
    },
    Seed {
        code: "pt",
        stopwords: &[
            "de", "o", "que", "e", "do", "da", "em", "um", "para", "com", "não", "uma", "os", "no", "se", "na", "por",
            "mais", "as", "dos", "como", "mas", "ao", "ele", "das", "à", "seu", "sua", "ou", "quando", "muito", "nos",
            "já", "também", "só", "pelo", "pela", "até", "isso", "ela", "entre", "depois", "sem", "mesmo", "aos",
            "seus", "quem", "nas", "esse", "eles", "você", "essa", "num", "nem", "suas", "foi", "são", "está", "foram",
            "tem",
        ],
        text: "O paciente de cinquenta anos foi internado no hospital com febre e dor abdominal. O \
               exame físico mostrou uma lesão na região direita do abdômen. Foi realizada uma \
               tomografia que confirmou a presença de uma massa. Após o tratamento com antibióticos \
               e analgésicos, a evolução foi favorável e decidiu-se pela alta hospitalar. Os \
               resultados das análises de sangue estavam dentro dos valores normais. A doença \
               caracteriza-se pelo aparecimento de sintomas respiratórios, tosse seca e cansaço. É \
               importante que o médico avalie cada caso com cuidado, porque também há pacientes que \
               não apresentam nenhum sintoma. Durante a consulta, a paciente refere que a dor \
               começou há três dias e não melhora com o repouso. Segundo os dados do estudo, a \
               incidência da infecção aumentou nos últimos anos no Brasil. Hoje faz bom tempo e \
               amanhã vamos à cidade com os nossos amigos, onde vamos almoçar juntos e conversar \
               sobre a vida.",
    },
    Seed {
        code: "fr",
        stopwords: &[
            "de", "la", "le", "et", "les", "des", "en", "un", "du", "une", "que", "est", "pour", "qui", "dans", "par",
            "plus", "pas", "au", "sur", "ne", "se", "ce", "il", "sont", "avec", "ou", "aux", "elle", "son", "sa",
            "ses", "été", "nous", "vous", "ils", "mais", "leur", "cette", "ces", "était", "sans", "très", "aussi",
            "dont", "après", "avait", "être", "fait", "lors", "peut", "chez", "ont", "avons", "nos",
        ],
        text: "Le patient de cinquante ans a été hospitalisé pour de la fièvre et des douleurs \
               abdominales. L'examen physique a montré une lésion dans la région droite de \
               l'abdomen. Un scanner a été réalisé et a confirmé la présence d'une masse. Après le \
               traitement par antibiotiques et antalgiques, l'évolution a été favorable et la sortie \
               a été décidée. Les résultats des analyses de sang étaient dans les valeurs normales. \
               La maladie se caractérise par l'apparition de symptômes respiratoires, une toux \
               sèche et de la fatigue. Il est important que le médecin évalue chaque cas avec soin, \
               parce qu'il y a aussi des patients qui ne présentent aucun symptôme. Pendant la \
               consultation, la patiente rapporte que la douleur a commencé il y a trois jours et ne \
               s'améliore pas avec le repos. Selon les données de l'étude, l'incidence de \
               l'infection a augmenté ces dernières années en France. Il fait beau aujourd'hui et \
               demain nous irons en ville avec nos amis, où nous déjeunerons ensemble.",
    },
    Seed {
        code: "ca",
        stopwords: &[
            "de", "la", "i", "el", "que", "a", "en", "els", "les", "del", "per", "amb", "un", "una", "es", "va", "no",
            "al", "als", "com", "més", "però", "seu", "seva", "són", "també", "ha", "hi", "ho", "aquest", "aquesta",
            "aquests", "pel", "dels", "quan", "molt", "sobre", "entre", "fins", "durant", "sense", "tot", "perquè",
            "han", "després", "van", "era",
        ],
        text: "El pacient de cinquanta anys va ingressar a l'hospital per un quadre de febre i dolor \
               abdominal. L'exploració física va mostrar una lesió a la regió dreta de l'abdomen. Es \
               va fer una tomografia que va confirmar la presència d'una massa. Després del \
               tractament amb antibiòtics i analgèsics, l'evolució va ser favorable i es va decidir \
               l'alta hospitalària. Els resultats de les anàlisis de sang eren dins dels valors \
               normals. La malaltia es caracteritza per l'aparició de símptomes respiratoris, tos \
               seca i cansament. És important que el metge valori cada cas amb cura, perquè també hi \
               ha pacients que no presenten cap símptoma. Durant la consulta, la pacient explica que \
               el dolor va començar fa tres dies i que no millora amb el repòs. Segons les dades de \
               l'estudi, la incidència de la infecció ha augmentat els darrers anys a Catalunya. \
               Avui fa bon temps i demà anirem a la ciutat amb els nostres amics.",
    },
    Seed {
        code: "it",
        stopwords: &[
            "di", "e", "il", "la", "che", "in", "per", "un", "è", "non", "una", "sono", "del", "della", "le", "con",
            "i", "si", "da", "dei", "al", "gli", "lo", "come", "anche", "più", "ma", "nel", "nella", "alla", "delle",
            "degli", "questo", "questa", "dopo", "stato", "stata", "essere", "suo", "sua", "loro", "quando", "tra",
            "fra", "senza", "molto", "ha", "hanno", "era",
        ],
        text: "Il paziente di cinquanta anni è stato ricoverato in ospedale per febbre e dolore \
               addominale. L'esame obiettivo ha mostrato una lesione nella regione destra \
               dell'addome. È stata eseguita una tomografia che ha confermato la presenza di una \
               massa. Dopo il trattamento con antibiotici e analgesici, l'evoluzione è stata \
               favorevole ed è stata decisa la dimissione. I risultati delle analisi del sangue \
               erano nei valori normali. La malattia è caratterizzata dalla comparsa di sintomi \
               respiratori, tosse secca e stanchezza. È importante che il medico valuti ogni caso \
               con attenzione, perché ci sono anche pazienti che non presentano alcun sintomo. \
               Durante la visita, la paziente riferisce che il dolore è iniziato tre giorni fa e non \
               migliora con il riposo. Secondo i dati dello studio, l'incidenza dell'infezione è \
               aumentata negli ultimi anni in Italia. Oggi fa bel tempo e domani andremo in città \
               con i nostri amici.",
    },
];

struct Profile {
    code: &'static str,
    stopwords: &'static [&'static str],
    trigrams: HashMap<[char; 3], f64>,
    total: f64,
}

fn profiles() -> &'static [Profile] {
    static PROFILES: OnceLock<Vec<Profile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        SEEDS
            .iter()
            .map(|seed| {
                let mut trigrams = HashMap::new();
                let mut total = 0.0;
                let lower = seed.text.to_lowercase();
                for word in words(&lower).chain(seed.stopwords.iter().copied()) {
                    for t in word_trigrams(word) {
                        *trigrams.entry(t).or_insert(0.0) += 1.0;
                        total += 1.0;
                    }
                }
                Profile {
                    code: seed.code,
                    stopwords: seed.stopwords,
                    trigrams,
                    total,
                }
            })
            .collect()
    })
}

fn words(lower: &str) -> impl Iterator<Item = &str> {
    lower.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty())
}

fn word_trigrams(word: &str) -> Vec<[char; 3]> {
    let padded: Vec<char> = std::iter::once(' ')
        .chain(word.chars())
        .chain(std::iter::once(' '))
        .collect();
    padded.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
}

/// Codes of the languages the detector can tell apart.
pub fn supported_languages() -> Vec<&'static str> {
    SEEDS.iter().map(|s| s.code).collect()
}

/// Log-likelihood of `sentence` under every profile.
pub fn language_scores(sentence: &str) -> BTreeMap<&'static str, f64> {
    let lower = sentence.to_lowercase();
    let mut scores = BTreeMap::new();
    for profile in profiles() {
        let denom = (profile.total + SMOOTHING_VOCAB).ln();
        let mut score = 0.0;
        for word in words(&lower) {
            for t in word_trigrams(word) {
                let count = profile.trigrams.get(&t).copied().unwrap_or(0.0);
                score += (count + 1.0).ln() - denom;
            }
            if profile.stopwords.contains(&word) {
                score += STOPWORD_BONUS;
            }
        }
        scores.insert(profile.code, score);
    }
    scores
}

/// Guess the language of `sentence`. Sentences without letters are
/// labeled `und` with score 0.
pub fn detect_language(sentence: &str) -> LanguageGuess {
    if !sentence.chars().any(char::is_alphabetic) {
        return LanguageGuess {
            label: UNDETERMINED.to_string(),
            score: 0.0,
        };
    }
    let scores = language_scores(sentence);
    // Seed order breaks exact ties.
    let (label, best) = SEEDS
        .iter()
        .map(|s| (s.code, scores[s.code]))
        .fold(("", f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let partition: f64 = scores.values().map(|s| (s - best).exp()).sum();
    LanguageGuess {
        label: label.to_string(),
        score: 1.0 / partition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spanish_and_english() {
        assert_eq!(
            detect_language("La paciente presenta fiebre y dolor abdominal.").label,
            "es"
        );
        assert_eq!(detect_language("The patient presents fever.").label, "en");
    }

    #[test]
    fn no_letters() {
        let g = detect_language("12345 !!!");
        assert_eq!(g.label, "und");
        assert_eq!(g.score, 0.0);
    }

    #[test]
    fn deterministic_and_bounded() {
        let s = "El tratamiento con insulina fue efectivo.";
        let a = detect_language(s);
        assert_eq!(a, detect_language(s));
        assert!(a.score > 0.5 && a.score <= 1.0, "{a:?}");
    }
}
