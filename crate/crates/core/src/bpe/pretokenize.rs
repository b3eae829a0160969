//! Whitespace pre-tokenization.
//!
//! Text is cut into pieces that merges never cross. A word is a maximal run
//! of non-whitespace characters; when the whitespace before it ends in an
//! ASCII space, that single space is folded into the front of the word
//! (rendered `Ġ` in the vocabulary). Any other whitespace forms its own
//! piece. Concatenating the pieces gives back the input exactly.

use std::ops::Range;

/// Byte ranges of the pre-tokens of `text`, in order, covering it exactly.
pub fn pretokenize(text: &str) -> Vec<Range<usize>> {
    let mut pieces = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            let mut end = start;
            let mut last_space = None;
            while let Some(&(i, c)) = chars.peek() {
                if !c.is_whitespace() {
                    break;
                }
                last_space = (c == ' ').then_some(i);
                end = i + c.len_utf8();
                chars.next();
            }
            match (chars.peek(), last_space) {
                // the trailing space belongs to the next word
                (Some(_), Some(space)) => {
                    if space > start {
                        pieces.push(start..space);
                    }
                    let word_end = consume_word(&mut chars, text.len());
                    pieces.push(space..word_end);
                }
                _ => pieces.push(start..end),
            }
        } else {
            let end = consume_word(&mut chars, text.len());
            pieces.push(start..end);
        }
    }
    pieces
}

fn consume_word(chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>, len: usize) -> usize {
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            return i;
        }
        chars.next();
    }
    len
}
