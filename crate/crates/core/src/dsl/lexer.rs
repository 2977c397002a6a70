use crate::error::{ParseError, ParseErrorKind};
use crate::time::Day;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Number(u64),
    Date(Day),
    /// `adjacent` is true when no whitespace precedes the parenthesis.
    LParen { adjacent: bool },
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
}

impl Token {
    /// The word in lower case, if this is a word.
    pub fn keyword(&self) -> Option<String> {
        match &self.tok {
            Tok::Word(w) => Some(w.to_ascii_lowercase()),
            _ => None,
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let c = text[i..].chars().next().expect("in bounds");
        let start = i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen {
                adjacent: start > 0 && !text[..start].ends_with(char::is_whitespace),
            }),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            if is_date_shape(&bytes[i..]) {
                let lit = &text[i..i + 10];
                let day: Day = lit.parse().map_err(|e: crate::error::TimeError| ParseError {
                    kind: ParseErrorKind::Syntax,
                    offset: start,
                    expected: vec!["a valid date".into()],
                    message: e.to_string(),
                })?;
                out.push(Token {
                    tok: Tok::Date(day),
                    offset: start,
                });
                i += 10;
                continue;
            }
            let end = scan(text, i, is_word_char);
            let word = &text[i..end];
            let tok = if word.bytes().all(|b| b.is_ascii_digit()) {
                match word.parse::<u64>() {
                    Ok(n) => Tok::Number(n),
                    Err(_) => {
                        return Err(ParseError {
                            kind: ParseErrorKind::Syntax,
                            offset: start,
                            expected: vec!["a smaller number".into()],
                            message: format!("number {word} is too large"),
                        })
                    }
                }
            } else {
                Tok::Word(word.to_string())
            };
            out.push(Token { tok, offset: start });
            i = end;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let end = scan(text, i, is_word_char);
            out.push(Token {
                tok: Tok::Word(text[i..end].to_string()),
                offset: start,
            });
            i = end;
            continue;
        }
        return Err(ParseError {
            kind: ParseErrorKind::Syntax,
            offset: start,
            expected: vec!["a word, number, date or bracket".into()],
            message: format!("unexpected character {c:?}"),
        });
    }
    Ok(out)
}

fn scan(text: &str, from: usize, pred: fn(char) -> bool) -> usize {
    text[from..]
        .char_indices()
        .find(|(_, c)| !pred(*c))
        .map_or(text.len(), |(j, _)| from + j)
}

fn is_date_shape(b: &[u8]) -> bool {
    b.len() >= 10
        && b[..4].iter().all(u8::is_ascii_digit)
        && b[4] == b'-'
        && b[5..7].iter().all(u8::is_ascii_digit)
        && b[7] == b'-'
        && b[8..10].iter().all(u8::is_ascii_digit)
        && b.get(10).is_none_or(|c| !c.is_ascii_alphanumeric())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_offsets() {
        let t = tokenize("at least 5 days after 2018-06-01").unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t[2].tok, Tok::Number(5));
        assert_eq!(t[5].offset, 22);
        assert!(matches!(t[5].tok, Tok::Date(_)));
    }

    #[test]
    fn adjacency_of_parentheses() {
        let t = tokenize("has_occurred(E) (X or Y)").unwrap();
        assert_eq!(t[1].tok, Tok::LParen { adjacent: true });
        assert_eq!(t[4].tok, Tok::LParen { adjacent: false });
    }

    #[test]
    fn bad_input() {
        let e = tokenize("2018-02-30").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = tokenize("X ; Y").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(tokenize("99999999999999999999999").is_err());
    }
}
