//! Cleanup of raw model responses.

use alloc::string::String;

fn fence_of(line: &str) -> Option<(char, usize)> {
    let ch = line.chars().next()?;
    if ch != '`' && ch != '~' {
        return None;
    }
    let len = line.chars().take_while(|c| *c == ch).count();
    (len >= 3).then_some((ch, len))
}

/// Content of `text` if it is exactly one fenced block, else `None`.
fn unfence(text: &str) -> Option<&str> {
    let (open, rest) = text.split_once('\n')?;
    let (ch, len) = fence_of(open)?;
    let info = &open[len * ch.len_utf8()..];
    if ch == '`' && info.contains('`') {
        return None;
    }
    // The first closing fence must be the last line.
    let mut offset = 0;
    for line in rest.split('\n') {
        let t = line.trim_end();
        if let Some((c, l)) = fence_of(t) {
            if c == ch && l >= len && t.chars().all(|x| x == ch) {
                return (offset + line.len() == rest.len()).then(|| &rest[..offset.saturating_sub(1)]);
            }
        }
        offset += line.len() + 1;
    }
    None
}

/// Normalize line endings to LF, trim, and remove a fence wrapping the whole
/// payload. Nested wrappers are all removed so that the function is
/// idempotent.
pub fn postprocess(raw: &str) -> String {
    let mut text = raw.replace("\r\n", "\n").replace('\r', "\n");
    loop {
        let trimmed = text.trim();
        match unfence(trimmed) {
            Some(inner) => text = String::from(inner),
            None => return String::from(trimmed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(postprocess("```\nfoo bar\n```"), "foo bar");
        assert_eq!(postprocess("  hello \n"), "hello");
        assert_eq!(postprocess("plain text"), "plain text");
        assert_eq!(
            postprocess("```python\ndef f():\n    pass\n```\n"),
            "def f():\n    pass"
        );
        assert_eq!(postprocess("~~~\r\na\r\nb\r\n~~~"), "a\nb");
        assert_eq!(postprocess("a\r\nb\rc"), "a\nb\nc");
    }

    #[test]
    fn partial_fences_are_kept() {
        let s = "```\na\n```\nafter";
        assert_eq!(postprocess(s), s);
        assert_eq!(postprocess("intro\n```\nx\n```"), "intro\n```\nx\n```");
        assert_eq!(postprocess("```\nunclosed"), "```\nunclosed");
        assert_eq!(postprocess("```\nx\n~~~"), "```\nx\n~~~");
        assert_eq!(postprocess("```"), "```");
    }

    #[test]
    fn empty_block() {
        assert_eq!(postprocess("```\n```"), "");
        assert_eq!(postprocess(""), "");
    }

    #[test]
    fn nested_wrappers() {
        assert_eq!(postprocess("````\n```\nx\n```\n````"), "x");
    }

    proptest! {
        #[test]
        fn idempotent(s in "[`~a \n\r]{0,40}") {
            let once = postprocess(&s);
            prop_assert_eq!(postprocess(&once), once.clone());
            prop_assert!(!once.contains('\r'));
        }
    }
}
