use std::collections::BTreeSet;

use super::lexer::{tokenize, Lexed};

/// Physical lines that are neither blank nor comment-only.
///
/// An unterminated block comment cannot be trusted, so every non-blank line
/// from its start to the end of the text is counted as code.
pub fn count_sloc(source: &str) -> u64 {
    count_sloc_lexed(source, &tokenize(source))
}

pub(crate) fn count_sloc_lexed(source: &str, lexed: &Lexed) -> u64 {
    let blank: BTreeSet<u32> = source
        .split('\n')
        .enumerate()
        .filter(|(_, l)| l.trim().is_empty())
        .map(|(i, _)| i as u32 + 1)
        .collect();
    let mut lines: BTreeSet<u32> = BTreeSet::new();
    for t in &lexed.tokens {
        lines.extend(t.line..=t.end_line);
    }
    if let Some(start) = lexed.unterminated_comment {
        let last = source.split('\n').count() as u32;
        lines.extend(start..=last);
    }
    lines.difference(&blank).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_comment_only() {
        assert_eq!(count_sloc(""), 0);
        assert_eq!(count_sloc("\n  \n\t\n// a\n   // b\n"), 0);
        assert_eq!(count_sloc("/*\n * doc\n */\n"), 0);
    }

    #[test]
    fn code_with_trailing_comments() {
        assert_eq!(count_sloc("int a; // x\n/* y */ int b;\n"), 2);
    }

    #[test]
    fn slashes_inside_strings_are_code() {
        assert_eq!(count_sloc("String u = \"http://x\";\n// c\n"), 1);
    }

    #[test]
    fn multiline_string_counts_non_blank_lines() {
        assert_eq!(count_sloc("String s = \"\"\"\n  a\n\n  b\"\"\";"), 3);
    }

    #[test]
    fn unterminated_comment_falls_back_to_code() {
        assert_eq!(count_sloc("int a;\n/* open\n\nstill\n"), 3);
    }
}
