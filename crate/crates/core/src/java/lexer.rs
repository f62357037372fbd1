//! Tokenizer for the subset of Java found in generated test suites and the
//! classes they exercise.
//!
//! Comments are not emitted as tokens. They are collected on the side with the
//! index of the token that follows them, so catch-block comments can be
//! recovered after parsing.

use crate::error::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword,
    IntLit,
    LongLit,
    FloatLit,
    DoubleLit,
    CharLit,
    StringLit,
    /// Operators and separators, including the `...` ellipsis.
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub col: u32,
    /// True when the next token starts immediately after this one. Used to
    /// glue `>` `>` into a shift operator outside of type arguments.
    pub joined: bool,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        matches!(self.kind, TokenKind::Punct | TokenKind::Keyword) && self.text == text
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    /// Comment body without the `//` or `/* */` delimiters, trimmed.
    pub text: String,
    pub line: u32,
    /// Index of the first token after the comment.
    pub before_token: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

// Longest first so that greedy matching works.
const PUNCT: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";",
    ",", ".", "@", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn tokenize(src: &str) -> Result<Lexed, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Lexed::default();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            if let Some(last) = out.tokens.last_mut() {
                last.joined = false;
            }
            bump!();
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            let mut text = String::new();
            bump!();
            bump!();
            while i < chars.len() && chars[i] != '\n' {
                text.push(chars[i]);
                bump!();
            }
            push_comment(&mut out, text, start_line);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let mut text = String::new();
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(SyntaxError::new(start_line, start_col, "unterminated comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                text.push(chars[i]);
                bump!();
            }
            push_comment(&mut out, text, start_line);
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut text = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                text.push(chars[i]);
                bump!();
            }
            let kind = if is_keyword(&text) { TokenKind::Keyword } else { TokenKind::Ident };
            push_token(&mut out, kind, text, start_line, start_col);
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let (kind, text) = lex_number(&chars, &mut i);
            col += text.chars().count() as u32;
            push_token(&mut out, kind, text, start_line, start_col);
            continue;
        }
        if c == '"' {
            let text_block = chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"');
            let mut text = String::new();
            if text_block {
                for _ in 0..3 {
                    text.push(chars[i]);
                    bump!();
                }
                loop {
                    if i >= chars.len() {
                        return Err(SyntaxError::new(start_line, start_col, "unterminated text block"));
                    }
                    if chars[i] == '"' && chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"') {
                        for _ in 0..3 {
                            text.push(chars[i]);
                            bump!();
                        }
                        break;
                    }
                    if chars[i] == '\\' && i + 1 < chars.len() {
                        text.push(chars[i]);
                        bump!();
                    }
                    text.push(chars[i]);
                    bump!();
                }
            } else {
                text.push(c);
                bump!();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(SyntaxError::new(start_line, start_col, "unterminated string literal"));
                    }
                    let ch = chars[i];
                    text.push(ch);
                    bump!();
                    if ch == '\\' {
                        if i < chars.len() {
                            text.push(chars[i]);
                            bump!();
                        }
                    } else if ch == '"' {
                        break;
                    }
                }
            }
            push_token(&mut out, TokenKind::StringLit, text, start_line, start_col);
            continue;
        }
        if c == '\'' {
            let mut text = String::new();
            text.push(c);
            bump!();
            loop {
                if i >= chars.len() || chars[i] == '\n' {
                    return Err(SyntaxError::new(start_line, start_col, "unterminated character literal"));
                }
                let ch = chars[i];
                text.push(ch);
                bump!();
                if ch == '\\' {
                    if i < chars.len() {
                        text.push(chars[i]);
                        bump!();
                    }
                } else if ch == '\'' {
                    break;
                }
            }
            push_token(&mut out, TokenKind::CharLit, text, start_line, start_col);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                for _ in 0..p.chars().count() {
                    bump!();
                }
                push_token(&mut out, TokenKind::Punct, (*p).to_string(), start_line, start_col);
            }
            None => {
                return Err(SyntaxError::new(
                    start_line,
                    start_col,
                    format!("unexpected character `{c}`"),
                ))
            }
        }
    }
    if let Some(last) = out.tokens.last_mut() {
        last.joined = false;
    }
    Ok(out)
}

fn push_token(out: &mut Lexed, kind: TokenKind, text: String, line: u32, col: u32) {
    out.tokens.push(Token { kind, text, line, col, joined: true });
}

fn push_comment(out: &mut Lexed, text: String, line: u32) {
    if let Some(last) = out.tokens.last_mut() {
        last.joined = false;
    }
    out.comments.push(Comment {
        text: text.trim().to_string(),
        line,
        before_token: out.tokens.len(),
    });
}

fn lex_number(chars: &[char], i: &mut usize) -> (TokenKind, String) {
    let start = *i;
    let mut is_float = false;
    if chars[*i] == '0' && matches!(chars.get(*i + 1), Some('x' | 'X' | 'b' | 'B')) {
        *i += 2;
        while *i < chars.len() && (chars[*i].is_ascii_hexdigit() || chars[*i] == '_') {
            *i += 1;
        }
    } else {
        while *i < chars.len() && (chars[*i].is_ascii_digit() || chars[*i] == '_') {
            *i += 1;
        }
        if *i < chars.len() && chars[*i] == '.' && chars.get(*i + 1).is_some_and(|d| d.is_ascii_digit()) {
            is_float = true;
            *i += 1;
            while *i < chars.len() && (chars[*i].is_ascii_digit() || chars[*i] == '_') {
                *i += 1;
            }
        } else if *i < chars.len()
            && chars[*i] == '.'
            && !chars.get(*i + 1).is_some_and(|d| d.is_alphabetic() || *d == '.')
        {
            // `1.` followed by an operator or separator
            is_float = true;
            *i += 1;
        }
        if *i < chars.len() && matches!(chars[*i], 'e' | 'E') {
            is_float = true;
            *i += 1;
            if *i < chars.len() && matches!(chars[*i], '+' | '-') {
                *i += 1;
            }
            while *i < chars.len() && chars[*i].is_ascii_digit() {
                *i += 1;
            }
        }
    }
    let kind = match chars.get(*i) {
        Some('L' | 'l') => {
            *i += 1;
            TokenKind::LongLit
        }
        Some('F' | 'f') => {
            *i += 1;
            TokenKind::FloatLit
        }
        Some('D' | 'd') => {
            *i += 1;
            TokenKind::DoubleLit
        }
        _ if is_float => TokenKind::DoubleLit,
        _ => TokenKind::IntLit,
    };
    (kind, chars[start..*i].iter().collect())
}
