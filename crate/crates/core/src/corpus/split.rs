use std::collections::HashSet;

/// Abbreviations that end in a period but rarely end a sentence.
pub const SPANISH_ABBREVIATIONS: &[&str] = &[
    "dr.", "dra.", "drs.", "sr.", "sra.", "sres.", "srta.", "ud.", "uds.", "dña.", "prof.", "lic.", "ing.", "etc.",
    "fig.", "figs.", "tab.", "pág.", "págs.", "p.", "pp.", "núm.", "nº.", "no.", "vol.", "cap.", "art.", "ed.", "eds.",
    "aprox.", "av.", "avda.", "cf.", "vs.", "ee.uu.", "i.e.", "e.g.", "et al.", "admón.", "hosp.", "dpto.", "depto.",
    "tel.",
];

const TERMINATORS: &[char] = &['.', '?', '!', '…'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '»', '”', '’'];

/// Rule-based sentence splitter.
///
/// A boundary falls after a run of terminators (`. ? ! …`, optionally
/// followed by closing quotes or brackets) when whitespace follows and the
/// next visible character is uppercase, a digit, `¿` or `¡`. A period that
/// ends a listed abbreviation never closes a sentence.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::with_abbreviations(SPANISH_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        SentenceSplitter {
            abbreviations: abbreviations.into_iter().map(|a| a.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut sentences = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            if !TERMINATORS.contains(&chars[i].1) {
                i += 1;
                continue;
            }
            let term_start = i;
            while i < chars.len() && TERMINATORS.contains(&chars[i].1) {
                i += 1;
            }
            let term_end = i;
            while i < chars.len() && CLOSERS.contains(&chars[i].1) {
                i += 1;
            }
            let boundary = chars.get(i).map_or(text.len(), |&(b, _)| b);
            let mut j = i;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j == i || j == chars.len() {
                continue;
            }
            let next = chars[j].1;
            if !(next.is_uppercase() || next.is_ascii_digit() || next == '¿' || next == '¡') {
                continue;
            }
            if chars[term_start].1 == '.'
                && term_end - term_start == 1
                && self.is_abbreviation(&text[start..chars[term_start].0 + 1])
            {
                continue;
            }
            push_trimmed(&mut sentences, &text[start..boundary]);
            start = boundary;
            i = j;
        }
        push_trimmed(&mut sentences, &text[start..]);
        sentences
    }

    fn is_abbreviation(&self, sentence_so_far: &str) -> bool {
        let raw = sentence_so_far.rsplit(char::is_whitespace).next().unwrap_or("");
        let word = raw.to_lowercase();
        if self.abbreviations.contains(&word) {
            return true;
        }
        // two-word entries such as "et al."
        let head = sentence_so_far[..sentence_so_far.len() - raw.len()].trim_end();
        match head.rsplit(char::is_whitespace).next() {
            Some(prev) if !prev.is_empty() => self.abbreviations.contains(&format!("{} {word}", prev.to_lowercase())),
            _ => false,
        }
    }
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

/// Split with the default Spanish abbreviation list.
pub fn split_sentences(text: &str) -> Vec<String> {
    SentenceSplitter::default().split(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_blank() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("  \n ").is_empty());
    }

    #[test]
    fn basic_terminators() {
        assert_eq!(split_sentences("Hola. Adiós."), vec!["Hola.", "Adiós."]);
        assert_eq!(
            split_sentences("¿Duele? ¡Mucho! 3 días así… Luego mejoró"),
            vec!["¿Duele?", "¡Mucho!", "3 días así…", "Luego mejoró"]
        );
    }

    #[test]
    fn abbreviations_suppress_split() {
        assert_eq!(
            split_sentences("El Dr. García llegó. Se fue."),
            vec!["El Dr. García llegó.", "Se fue."]
        );
        assert_eq!(
            split_sentences("Véase Fig. 3 y la Sra. Pérez. Fin."),
            vec!["Véase Fig. 3 y la Sra. Pérez.", "Fin."]
        );
        assert_eq!(
            split_sentences("Según Gómez et al. Los datos."),
            vec!["Según Gómez et al. Los datos."]
        );
    }

    #[test]
    fn lowercase_continuation_is_not_a_boundary() {
        assert_eq!(
            split_sentences("Dosis de 5 mg. cada 8 horas."),
            vec!["Dosis de 5 mg. cada 8 horas."]
        );
        assert_eq!(split_sentences("Valor 3.5 mg/dl."), vec!["Valor 3.5 mg/dl."]);
    }

    #[test]
    fn closing_quotes_stay_with_sentence() {
        assert_eq!(
            split_sentences("Dijo «basta.» Después calló."),
            vec!["Dijo «basta.»", "Después calló."]
        );
    }
}
