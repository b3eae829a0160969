//! Printable byte-to-character remapping used by byte-level BPE vocabularies.
//!
//! Every byte gets a visible character so tokens can be stored as ordinary
//! strings in `vocab.json` / `merges.txt`. Printable Latin-1 bytes map to
//! themselves; the remaining 68 bytes are shifted to `U+0100..`. This is the
//! same table the published byte-level BPE vocabularies use, so a space is
//! rendered as `Ġ` and a newline as `Ċ`.

use std::sync::OnceLock;

struct ByteTable {
    to_char: [char; 256],
    from_char: std::collections::HashMap<char, u8>,
}

fn table() -> &'static ByteTable {
    static TABLE: OnceLock<ByteTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let printable = |b: u32| {
            (u32::from(b'!')..=u32::from(b'~')).contains(&b) || (0xA1..=0xAC).contains(&b) || (0xAE..=0xFF).contains(&b)
        };
        let mut to_char = ['\0'; 256];
        let mut shifted = 0u32;
        for b in 0..256u32 {
            let cp = if printable(b) {
                b
            } else {
                shifted += 1;
                255 + shifted
            };
            to_char[b as usize] = char::from_u32(cp).expect("valid code point");
        }
        let from_char = to_char.iter().enumerate().map(|(b, &c)| (c, b as u8)).collect();
        ByteTable { to_char, from_char }
    })
}

/// The printable character standing in for `byte`.
pub fn byte_to_char(byte: u8) -> char {
    table().to_char[byte as usize]
}

/// Inverse of [`byte_to_char`]; `None` for characters outside the table.
pub fn char_to_byte(c: char) -> Option<u8> {
    table().from_char.get(&c).copied()
}

/// Render raw bytes as a token string.
pub fn bytes_to_token(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_char(b)).collect()
}

/// Recover the raw bytes behind a token string.
pub fn token_to_bytes(token: &str) -> Option<Vec<u8>> {
    token.chars().map(char_to_byte).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for b in 0..=255u8 {
            let c = byte_to_char(b);
            assert!(seen.insert(c));
            assert_eq!(char_to_byte(c), Some(b));
        }
    }

    #[test]
    fn well_known_characters() {
        assert_eq!(byte_to_char(b' '), 'Ġ');
        assert_eq!(byte_to_char(b'\n'), 'Ċ');
        assert_eq!(byte_to_char(b'a'), 'a');
        assert_eq!(bytes_to_token("ñ".as_bytes()), "Ã±");
        assert_eq!(token_to_bytes("Ã±").unwrap(), "ñ".as_bytes());
        assert_eq!(token_to_bytes("€uro"), None);
    }
}
