use unicode_normalization::UnicodeNormalization;

/// Normalises a raw trigger or action name: forward slashes are removed, the
/// text is NFC-normalised, whitespace runs collapse to one space and the
/// result is trimmed. Case is preserved.
pub fn clean_name(raw: &str) -> String {
    let without_slash: String = raw.chars().filter(|&c| c != '/').collect();
    collapse_whitespace(&without_slash.nfc().collect::<String>())
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Inserts spaces at camel-case word boundaries: `DeviceTurnedOff` becomes
/// `Device Turned Off`, `ReceivedFromDIY` becomes `Received From DIY` and
/// `ACTurnedOn` becomes `AC Turned On`. Underscores count as separators.
pub fn split_camel_case(id: &str) -> String {
    let chars: Vec<char> = id.chars().map(|c| if c == '_' { ' ' } else { c }).collect();
    let mut out = String::with_capacity(id.len() + 8);
    for (i, &c) in chars.iter().enumerate() {
        if i > 0 && c.is_uppercase() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                out.push(' ');
            }
        }
        out.push(c);
    }
    collapse_whitespace(&out)
}
