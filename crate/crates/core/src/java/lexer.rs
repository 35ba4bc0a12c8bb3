//! A tolerant Java tokenizer. Comments are dropped; every other lexeme
//! becomes a token tagged with the lines it spans.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Char,
    Str,
    Op,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub end_line: u32,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    /// Identifier that is not a reserved word.
    pub fn is_name(&self) -> bool {
        self.kind == TokenKind::Ident && !is_keyword(&self.text)
    }
}

#[derive(Debug, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    /// Line where an unterminated block comment starts, if any.
    pub unterminated_comment: Option<u32>,
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

pub const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn is_primitive(s: &str) -> bool {
    PRIMITIVES.contains(&s)
}

// Longest first. `>` is never merged with a following `>` so that nested
// generic closers stay separate tokens.
const OPERATORS: &[&str] = &[
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<",
];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(src: &str) -> Lexed {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Lexed::default();
    let mut i = 0;
    let mut line: u32 = 1;
    let n = chars.len();

    while i < n {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && i + 1 < n && chars[i + 1] == '/' {
            while i < n && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && i + 1 < n && chars[i + 1] == '*' {
            let start_line = line;
            i += 2;
            let mut closed = false;
            while i < n {
                if chars[i] == '*' && i + 1 < n && chars[i + 1] == '/' {
                    i += 2;
                    closed = true;
                    break;
                }
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            if !closed {
                out.unterminated_comment = Some(start_line);
            }
            continue;
        }

        let start = i;
        let start_line = line;
        let kind = if is_ident_start(c) {
            while i < n && is_ident_part(chars[i]) {
                i += 1;
            }
            TokenKind::Ident
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < n && chars[i + 1].is_ascii_digit()) {
            i = scan_number(&chars, i);
            TokenKind::Number
        } else if c == '"' {
            if i + 2 < n && chars[i + 1] == '"' && chars[i + 2] == '"' {
                // text block
                i += 3;
                while i < n {
                    if chars[i] == '\\' {
                        i += 2;
                        continue;
                    }
                    if chars[i] == '\n' {
                        line += 1;
                    }
                    if chars[i] == '"' && i + 2 < n && chars[i + 1] == '"' && chars[i + 2] == '"' {
                        i += 3;
                        break;
                    }
                    i += 1;
                }
            } else {
                i = scan_quoted(&chars, i, '"');
            }
            TokenKind::Str
        } else if c == '\'' {
            i = scan_quoted(&chars, i, '\'');
            TokenKind::Char
        } else {
            let rest: String = chars[i..n.min(i + 3)].iter().collect();
            let op = OPERATORS.iter().find(|op| rest.starts_with(*op));
            i += op.map(|op| op.len()).unwrap_or(1);
            TokenKind::Op
        };
        let text: String = chars[start..i.min(n)].iter().collect();
        out.tokens.push(Token {
            kind,
            text,
            line: start_line,
            end_line: line,
        });
    }
    out
}

fn scan_quoted(chars: &[char], mut i: usize, quote: char) -> usize {
    i += 1;
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 2,
            '\n' => return i, // unterminated: stop at end of line
            c if c == quote => return i + 1,
            _ => i += 1,
        }
    }
    chars.len()
}

fn scan_number(chars: &[char], mut i: usize) -> usize {
    let n = chars.len();
    let hex = chars[i] == '0' && i + 1 < n && matches!(chars[i + 1], 'x' | 'X');
    if hex {
        i += 2;
    }
    while i < n {
        let c = chars[i];
        let exp = if hex {
            matches!(c, 'p' | 'P')
        } else {
            matches!(c, 'e' | 'E')
        };
        if exp && i + 1 < n && matches!(chars[i + 1], '+' | '-') {
            i += 2;
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
            // `1.foo()` is not valid Java, so a dot is always part of the literal
            if c == '.' && i + 1 < n && chars[i + 1] == '.' {
                break;
            }
            i += 1;
        } else {
            break;
        }
    }
    i
}

/// Index of the matching closer for every `(`, `[` and `{` (and the opener
/// for every closer). Unbalanced brackets map to `None`.
pub fn match_brackets(tokens: &[Token]) -> Vec<Option<usize>> {
    let mut matching = vec![None; tokens.len()];
    let mut stack: Vec<(usize, &str)> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if t.kind != TokenKind::Op {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => stack.push((i, t.text.as_str())),
            close @ (")" | "]" | "}") => {
                let open = match close {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                // tolerate stray closers: pop until the matching opener kind
                if let Some(pos) = stack.iter().rposition(|(_, o)| *o == open) {
                    let (j, _) = stack[pos];
                    stack.truncate(pos);
                    matching[i] = Some(j);
                    matching[j] = Some(i);
                }
            }
            _ => {}
        }
    }
    matching
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        tokenize(src).tokens.into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn comments_and_strings() {
        let t = texts("a // x\n/* b */ \"c // not a comment\" 'd'");
        assert_eq!(t, vec!["a", "\"c // not a comment\"", "'d'"]);
    }

    #[test]
    fn generic_closers_stay_split() {
        let t = texts("Map<String, List<Integer>> m; a >= b; x >>= 1;");
        assert!(t.windows(2).any(|w| w[0] == ">" && w[1] == ">"));
        assert!(t.contains(&">=".to_string()));
    }

    #[test]
    fn numbers() {
        assert_eq!(
            texts("1.5e-3f 0x1F .5 1_000L"),
            vec!["1.5e-3f", "0x1F", ".5", "1_000L"]
        );
    }

    #[test]
    fn lines_are_tracked() {
        let lexed = tokenize("a\n\n\"\"\"\nx\n\"\"\" b");
        let toks = lexed.tokens;
        assert_eq!(toks[0].line, 1);
        assert_eq!((toks[1].line, toks[1].end_line), (3, 5));
        assert_eq!(toks[2].line, 5);
    }

    #[test]
    fn unterminated_block_comment_is_reported() {
        let lexed = tokenize("int a;\n/* open\nstill");
        assert_eq!(lexed.unterminated_comment, Some(2));
        assert_eq!(lexed.tokens.len(), 3);
    }

    #[test]
    fn brackets_match() {
        let toks = tokenize("f(a[1], {b})").tokens;
        let m = match_brackets(&toks);
        assert_eq!(m[1], Some(toks.len() - 1));
        assert_eq!(m[3], Some(5));
    }
}
