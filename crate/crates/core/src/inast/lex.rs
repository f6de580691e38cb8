//! Just enough lexing to find braces and identifiers outside of strings,
//! character literals and comments in Rust-like source.

/// Byte length of the string, character literal or comment starting at `i`,
/// or `None` if no such token starts there.
pub fn skip_opaque(s: &[u8], i: usize) -> Option<usize> {
    match s[i] {
        b'"' => Some(quoted(s, i, b'"')),
        b'/' if s.get(i + 1) == Some(&b'/') => {
            let end = s[i..].iter().position(|&c| c == b'\n').map_or(s.len(), |p| i + p);
            Some(end - i)
        }
        b'/' if s.get(i + 1) == Some(&b'*') => {
            let mut depth = 0;
            let mut j = i;
            while j < s.len() {
                if s[j..].starts_with(b"/*") {
                    depth += 1;
                    j += 2;
                } else if s[j..].starts_with(b"*/") {
                    depth -= 1;
                    j += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    j += 1;
                }
            }
            Some(j - i)
        }
        b'r' if i == 0 || !is_ident_byte(s[i - 1]) => {
            let hashes = s[i + 1..].iter().take_while(|&&c| c == b'#').count();
            if s.get(i + 1 + hashes) != Some(&b'"') {
                return None;
            }
            let body = i + 2 + hashes;
            let mut close = vec![b'"'];
            close.extend(std::iter::repeat_n(b'#', hashes));
            let end = s[body..]
                .windows(close.len())
                .position(|w| w == close.as_slice())
                .map_or(s.len(), |p| body + p + close.len());
            Some(end - i)
        }
        b'\'' => {
            // A character literal, not a lifetime: 'x' or '\..'.
            if s.get(i + 1) == Some(&b'\\') {
                return Some(quoted(s, i, b'\''));
            }
            let ch_len = std::str::from_utf8(&s[i + 1..(i + 5).min(s.len())])
                .ok()
                .or_else(|| (1..4).rev().find_map(|n| std::str::from_utf8(&s[i + 1..(i + 1 + n).min(s.len())]).ok()))
                .and_then(|t| t.chars().next())
                .map_or(1, char::len_utf8);
            (s.get(i + 1 + ch_len) == Some(&b'\'')).then_some(ch_len + 2)
        }
        _ => None,
    }
}

fn quoted(s: &[u8], i: usize, q: u8) -> usize {
    let mut j = i + 1;
    while j < s.len() {
        match s[j] {
            b'\\' => j += 2,
            c if c == q => return j + 1 - i,
            _ => j += 1,
        }
    }
    s.len() - i
}

pub fn is_ident_byte(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

/// Index of the `}` matching the `{` at `open`.
pub fn matching_brace(text: &str, open: usize) -> Option<usize> {
    let s = text.as_bytes();
    debug_assert_eq!(s[open], b'{');
    let mut depth = 0usize;
    let mut i = open;
    while i < s.len() {
        if let Some(n) = skip_opaque(s, i) {
            i += n;
            continue;
        }
        match s[i] {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}

/// Start offsets of every occurrence of identifier `word` outside strings,
/// character literals and comments.
pub fn find_ident(text: &str, word: &str) -> Vec<usize> {
    let s = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if let Some(n) = skip_opaque(s, i) {
            i += n;
            continue;
        }
        if is_ident_byte(s[i]) && (i == 0 || !is_ident_byte(s[i - 1])) {
            let end = s[i..].iter().position(|&c| !is_ident_byte(c)).map_or(s.len(), |p| i + p);
            if &text[i..end] == word {
                out.push(i);
            }
            i = end;
            continue;
        }
        i += 1;
    }
    out
}

/// Skips whitespace and comments from `i`.
pub fn skip_ws(text: &str, mut i: usize) -> usize {
    let s = text.as_bytes();
    loop {
        while i < s.len() && s[i].is_ascii_whitespace() {
            i += 1;
        }
        if i + 1 < s.len() && s[i] == b'/' && (s[i + 1] == b'/' || s[i + 1] == b'*') {
            i += skip_opaque(s, i).unwrap_or(1);
        } else {
            return i;
        }
    }
}

/// Parses a plain string literal starting at `i`, returning its content and
/// the offset just after it. Escapes other than `\\` and `\"` are rejected.
pub fn string_literal(text: &str, i: usize) -> Option<(String, usize)> {
    let s = text.as_bytes();
    if s.get(i) != Some(&b'"') {
        return None;
    }
    let mut out = String::new();
    let mut chars = text[i + 1..].char_indices();
    while let Some((k, c)) = chars.next() {
        match c {
            '"' => return Some((out, i + 1 + k + 1)),
            '\\' => match chars.next()?.1 {
                c @ ('\\' | '"') => out.push(c),
                _ => return None,
            },
            c => out.push(c),
        }
    }
    None
}
