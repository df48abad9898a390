use super::{Diagnostic, Position};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Numeric literal with its source text (`INT` when all digits).
    Number(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    At,
    FatArrow,
    Arrow,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Number(s) => format!("number {s}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::At => "'@'".into(),
            Tok::FatArrow => "'=>'".into(),
            Tok::Arrow => "'->'".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

/// One non-empty source line.
#[derive(Debug, Clone)]
pub(crate) struct Line {
    pub tokens: Vec<Token>,
    /// Position just past the last character, used for "unexpected end of line".
    pub end: Position,
}

/// Splits `source` into token lines, dropping blanks and comments. A line
/// with a lexical error is reported and left out.
pub(crate) fn lex(source: &str) -> (Vec<Line>, Vec<Diagnostic>) {
    let mut lines = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, text) in source.lines().enumerate() {
        match lex_line(idx + 1, text) {
            Ok(Some(line)) => lines.push(line),
            Ok(None) => {}
            Err(d) => diagnostics.push(d),
        }
    }
    (lines, diagnostics)
}

fn lex_line(line: usize, text: &str) -> Result<Option<Line>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let pos = |col: usize| Position { line, column: col + 1 };
    while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            Tok::Number(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '*' => Tok::Star,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '@' => Tok::At,
                '-' if chars.get(i) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                '-' => Tok::Minus,
                '=' if chars.get(i) == Some(&'>') => {
                    i += 1;
                    Tok::FatArrow
                }
                other => {
                    return Err(Diagnostic::error(
                        pos(start),
                        format!("unexpected character '{other}'"),
                    ))
                }
            }
        };
        tokens.push(Token { tok, pos: pos(start) });
    }
    if tokens.is_empty() {
        return Ok(None);
    }
    Ok(Some(Line {
        tokens,
        end: pos(chars.len()),
    }))
}
