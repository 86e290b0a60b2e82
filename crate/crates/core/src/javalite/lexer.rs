use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Keyword(&'static str),
    Int(String),
    Float(String),
    Str(String),
    Char(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Keyword(k) => format!("`{k}`"),
            Tok::Int(s) | Tok::Float(s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Char(_) => "character literal".into(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "break",
    "class",
    "continue",
    "else",
    "extends",
    "false",
    "final",
    "for",
    "if",
    "implements",
    "import",
    "instanceof",
    "interface",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "static",
    "super",
    "this",
    "throw",
    "throws",
    "true",
    "void",
    "while",
];

// Longest first.
const PUNCT: &[&str] = &[
    "...", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "(", ")",
    "{", "}", "[", "]", ";", ",", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!", "?", ":", "&",
    "|", "^", "~", "@",
];

pub fn tokenize(file: &str, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut column = 1u32;
    let err = |line, column, expected: &str| ParseError {
        file: file.to_owned(),
        line,
        column,
        expected: expected.to_owned(),
    };
    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
                i += 1;
            }
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance!(2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(pos.line, pos.column, "end of block comment `*/`"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance!(2);
                    break;
                }
                advance!(1);
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            let mut n = 0;
            while start + n < chars.len()
                && (chars[start + n].is_alphanumeric() || chars[start + n] == '_' || chars[start + n] == '$')
            {
                n += 1;
            }
            let word: String = chars[start..start + n].iter().collect();
            advance!(n);
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut n = 0;
            let mut float = false;
            while start + n < chars.len() {
                let d = chars[start + n];
                if d.is_ascii_alphanumeric() || d == '_' {
                    n += 1;
                } else if d == '.'
                    && !float
                    && chars.get(start + n + 1).is_some_and(|c| c.is_ascii_digit())
                {
                    float = true;
                    n += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[start..start + n].iter().collect();
            advance!(n);
            let tok = if float || text.ends_with(['f', 'F', 'd', 'D']) && !text.starts_with("0x") {
                Tok::Float(text)
            } else {
                Tok::Int(text)
            };
            out.push(Token { tok, pos });
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = c;
            let mut s = String::new();
            advance!(1);
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(err(pos.line, pos.column, "closing quote"));
                    }
                    Some(&q) if q == quote => {
                        advance!(1);
                        break;
                    }
                    Some('\\') => {
                        if i + 1 >= chars.len() {
                            return Err(err(pos.line, pos.column, "closing quote"));
                        }
                        s.push(chars[i + 1]);
                        advance!(2);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance!(1);
                    }
                }
            }
            let tok = if quote == '"' { Tok::Str(s) } else { Tok::Char(s) };
            out.push(Token { tok, pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                advance!(p.chars().count());
                out.push(Token {
                    tok: Tok::Punct(p),
                    pos,
                });
            }
            None => return Err(err(line, column, "a token")),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column },
    });
    Ok(out)
}
