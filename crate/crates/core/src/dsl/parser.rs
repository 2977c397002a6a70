//! Recursive-descent parser for the phrase language.
//!
//! A phrase is either a value (a date, interval, set, bag or count) or a
//! condition. Both are tried; the error that got furthest is reported.

use crate::deontic::PaymentReading;
use crate::dsl::ast::*;
use crate::dsl::lexer::{tokenize, Tok, Token};
use crate::error::{ParseError, ParseErrorKind};
use crate::time::{TimePoint, Weekday};

/// Words that cannot be used as names.
pub const RESERVED: &[&str] = &[
    "a", "action", "after", "all", "an", "and", "any", "applicable", "as", "at", "aware", "be", "been",
    "before", "becoming", "between", "but", "case", "ceased", "clause", "continues", "continuing",
    "current", "date", "day", "days", "deferred", "designated", "determined", "due", "each", "earlier",
    "effect", "end", "event", "every", "exist", "exists", "false", "first", "following", "for", "forall",
    "force", "from", "full", "future", "has", "immediately", "in", "inf", "is", "last", "least", "long",
    "maintain", "month", "more", "next", "no", "not", "notice", "number", "occurred", "occurrence",
    "occurs", "of", "on", "or", "other", "practicable", "precedes", "preceding", "prior", "promptly",
    "rb", "rd", "reasonably", "rt", "same", "satisfied", "so", "soon", "specified", "start", "succeeding",
    "such", "survive", "taken", "than", "that", "the", "there", "time", "timely", "times", "to", "today",
    "true", "until", "upon", "when", "will", "with", "within",
];

pub fn is_reserved(word: &str) -> bool {
    let w = word.to_ascii_lowercase();
    RESERVED.contains(&w.as_str())
}

/// Parses a phrase.
pub fn parse(text: &str) -> Result<Node, ParseError> {
    let toks = tokenize(text)?;
    prescan(&toks)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_offset: text.len(),
        vars: Vec::new(),
        best: None,
    };
    if p.toks.is_empty() {
        return Err(p.error(&["a phrase"]));
    }
    let value = p.attempt(|p| {
        let v = p.value()?;
        p.expect_end()?;
        Ok(v)
    });
    if let Ok(v) = value {
        return Ok(v);
    }
    let cond = p.attempt(|p| {
        let c = p.condition()?;
        p.expect_end()?;
        Ok(c)
    });
    match cond {
        Ok(c) => Ok(c),
        Err(_) => Err(p.best.take().expect("both attempts failed")),
    }
}

/// Phrases recognized only to be turned away with a specific diagnostic.
fn prescan(toks: &[Token]) -> Result<(), ParseError> {
    let words: Vec<(String, usize)> = toks
        .iter()
        .map(|t| (t.keyword().unwrap_or_default(), t.offset))
        .collect();
    let rules: &[(&[&str], ParseErrorKind, &str)] = &[
        (
            &["would"],
            ParseErrorKind::HumanInputRequired,
            "counterfactual \"would\" constructs need a human decision",
        ),
        (
            &["applicable", "law"],
            ParseErrorKind::HumanInputRequired,
            "conditions on applicable law need a human decision",
        ),
        (
            &["policies", "in", "effect"],
            ParseErrorKind::HumanInputRequired,
            "conditions on policies in effect need a human decision",
        ),
        (
            &["in", "the", "event", "of", "any", "inconsistency"],
            ParseErrorKind::DraftingAnnotation,
            "\"in the event of any inconsistency\" orders provisions of the document, not dates",
        ),
        (
            &["so", "long", "as", "that", "is", "the", "case"],
            ParseErrorKind::Unsupported,
            "\"that is the case\" refers to a condition stated elsewhere; model it as an event E and write \"for so long as E\"",
        ),
        (
            &["the", "relevant", "event", "or", "circumstance"],
            ParseErrorKind::Unsupported,
            "\"the relevant event or circumstance\" must be named; model it as an event E and write \"for so long as E\"",
        ),
        (
            &["pursuant", "to"],
            ParseErrorKind::Unsupported,
            "\"pursuant to\" needs legal disambiguation",
        ),
        (
            &["after", "giving", "effect", "to"],
            ParseErrorKind::Unsupported,
            "\"after giving effect to\" needs legal disambiguation",
        ),
        (
            &["in", "such", "event"],
            ParseErrorKind::Unsupported,
            "\"in such event\" refers to the preceding named event; name the event instead",
        ),
        (
            &["upon", "reasonable", "demand"],
            ParseErrorKind::Unsupported,
            "\"upon reasonable demand\" has no fixed temporal reading; model the demand as an event",
        ),
        (
            &["the", "date", "of", "the", "information"],
            ParseErrorKind::Unsupported,
            "\"the date of the information\" may mean sending or receipt; model either as an event",
        ),
        (
            &["otherwise", "agreed"],
            ParseErrorKind::Unsupported,
            "\"otherwise agreed\" dates are set by designation, not by a phrase",
        ),
    ];
    for i in 0..words.len() {
        for (pat, kind, msg) in rules {
            if words[i..].len() >= pat.len() && pat.iter().zip(&words[i..]).all(|(p, (w, _))| p == w) {
                return Err(ParseError {
                    kind: *kind,
                    offset: words[i].1,
                    expected: Vec::new(),
                    message: msg.to_string(),
                });
            }
        }
    }
    Ok(())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end_offset: usize,
    vars: Vec<String>,
    best: Option<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
        let save = self.pos;
        let vars = self.vars.len();
        let r = f(self);
        if let Err(e) = &r {
            self.pos = save;
            self.vars.truncate(vars);
            self.record(e.clone());
        }
        r
    }

    fn record(&mut self, e: ParseError) {
        let replace = match &self.best {
            None => true,
            Some(b) => {
                let special = |k: &ParseErrorKind| *k != ParseErrorKind::Syntax;
                match (special(&e.kind), special(&b.kind)) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => e.offset > b.offset,
                }
            }
        };
        if replace {
            self.best = Some(e);
        } else if let Some(b) = &mut self.best {
            if b.offset == e.offset && b.kind == e.kind && e.kind == ParseErrorKind::Syntax {
                for x in e.expected {
                    if !b.expected.contains(&x) {
                        b.expected.push(x);
                    }
                }
                let found = self.toks.iter().find(|t| t.offset == b.offset);
                b.message = expected_message(&b.expected, found);
            }
        }
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_offset, |t| t.offset)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        ParseError {
            kind: ParseErrorKind::Syntax,
            offset: self.offset(),
            message: expected_message(&expected, self.toks.get(self.pos)),
            expected,
        }
    }

    fn special(&self, kind: ParseErrorKind, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            kind,
            offset,
            expected: Vec::new(),
            message: message.into(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(&["end of phrase"]))
        }
    }

    fn kw(&self, i: usize) -> Option<String> {
        self.toks.get(self.pos + i).and_then(Token::keyword)
    }

    fn is_seq(&self, words: &[&str]) -> bool {
        words
            .iter()
            .enumerate()
            .all(|(i, w)| self.kw(i).as_deref() == Some(*w))
    }

    fn eat_seq(&mut self, words: &[&str]) -> bool {
        if self.is_seq(words) {
            self.pos += words.len();
            true
        } else {
            false
        }
    }

    fn expect_seq(&mut self, words: &[&str]) -> PResult<()> {
        for w in words {
            if self.kw(0).as_deref() == Some(*w) {
                self.pos += 1;
            } else {
                return Err(self.error(&[w]));
            }
        }
        Ok(())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn eat_tok(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_tok(&mut self, tok: Tok, name: &str) -> PResult<()> {
        if self.eat_tok(&tok) {
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn eat_lparen(&mut self) -> bool {
        if matches!(self.peek(), Some(Tok::LParen { .. })) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_lparen(&mut self) -> PResult<()> {
        if self.eat_lparen() {
            Ok(())
        } else {
            Err(self.error(&["\"(\""]))
        }
    }

    fn number(&mut self) -> PResult<u32> {
        match self.peek() {
            Some(Tok::Number(n)) => {
                let n = u32::try_from(*n).map_err(|_| self.error(&["a number below 2^32"]))?;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error(&["a number"])),
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Word(w))
                if !is_reserved(w) && w.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') =>
            {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(&["a name"])),
        }
    }

    /// The plural of a day property: a word ending in "s" whose stem is a name.
    /// The word itself may be reserved ("Is" for a property "I").
    fn plural_property(&mut self) -> PResult<String> {
        let at = self.offset();
        let Some(Tok::Word(w)) = self.peek() else {
            return Err(self.error(&["\"days\"", "a plural day property"]));
        };
        let w = w.clone();
        match w.strip_suffix('s') {
            Some(stem) if !is_reserved(stem) && stem.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') => {
                self.pos += 1;
                Ok(stem.to_string())
            }
            _ => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                offset: at,
                expected: vec!["a plural day property".into()],
                message: format!("expected the plural of a day property, found {w:?}"),
            }),
        }
    }

    /// Any word, used for clause references and free-standing labels.
    fn word(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            Some(Tok::Number(n)) => {
                let w = n.to_string();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(&["a word"])),
        }
    }

    /// An event name, optionally preceded by "event".
    fn event(&mut self) -> PResult<String> {
        self.eat_seq(&["event"]);
        self.ident()
    }

    /// `[ words ]`, returning the lower-cased words joined by spaces.
    fn annotation(&mut self) -> PResult<Option<String>> {
        if !self.eat_tok(&Tok::LBracket) {
            return Ok(None);
        }
        let mut words = Vec::new();
        while let Some(Tok::Word(w)) = self.peek() {
            words.push(w.to_ascii_lowercase());
            self.pos += 1;
        }
        self.expect_tok(Tok::RBracket, "\"]\"")?;
        Ok(Some(words.join(" ")))
    }

    fn direction(&mut self) -> Option<Direction> {
        if self.eat_seq(&["after"]) || self.eat_seq(&["following"]) {
            Some(Direction::After)
        } else if self.eat_seq(&["before"]) || self.eat_seq(&["prior", "to"]) {
            Some(Direction::Before)
        } else {
            None
        }
    }

    fn after_kw(&mut self) -> PResult<()> {
        if self.eat_seq(&["after"]) || self.eat_seq(&["following"]) {
            Ok(())
        } else {
            Err(self.error(&["\"after\"", "\"following\""]))
        }
    }

    fn is_after_kw(&self) -> bool {
        self.is_seq(&["after"]) || self.is_seq(&["following"])
    }

    fn days_unit(&mut self) -> PResult<()> {
        if self.eat_seq(&["days"]) || self.eat_seq(&["day"]) {
            Ok(())
        } else {
            Err(self.error(&["\"days\""]))
        }
    }

    /// A single date: anything of sort day or a name.
    fn anchor(&mut self) -> PResult<Node> {
        let at = self.offset();
        let v = self.value()?;
        match v.sort() {
            Sort::Day | Sort::Named => Ok(v),
            Sort::Bag => Err(self.special(
                ParseErrorKind::NestedAlternative,
                at,
                "a bag of alternative dates cannot be nested inside another phrase",
            )),
            _ => {
                self.pos = self.pos.min(self.toks.len());
                Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    offset: at,
                    expected: vec!["a single date".into()],
                    message: format!("expected a single date, found {}", describe_sort(v.sort())),
                })
            }
        }
    }

    /// A date or a bag of alternative dates.
    fn operand(&mut self) -> PResult<Node> {
        let at = self.offset();
        let v = self.value()?;
        match v.sort() {
            Sort::Day | Sort::Named | Sort::Bag => Ok(v),
            other => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                offset: at,
                expected: vec!["a date".into()],
                message: format!("expected a date, found {}", describe_sort(other)),
            }),
        }
    }

    fn set_value(&mut self) -> PResult<Node> {
        let at = self.offset();
        let v = self.value()?;
        if v.sort() == Sort::Set {
            Ok(v)
        } else {
            Err(ParseError {
                kind: ParseErrorKind::Syntax,
                offset: at,
                expected: vec!["a set of days".into()],
                message: format!("expected a set of days, found {}", describe_sort(v.sort())),
            })
        }
    }

    fn value(&mut self) -> PResult<Node> {
        match self.peek() {
            None => Err(self.error(&["a date or period"])),
            Some(Tok::Date(d)) => {
                let d = *d;
                self.pos += 1;
                self.postfix(Node::DateLiteral(d))
            }
            Some(Tok::Plus) | Some(Tok::Minus) => {
                let p = if self.peek() == Some(&Tok::Plus) {
                    TimePoint::PosInfinity
                } else {
                    TimePoint::NegInfinity
                };
                self.pos += 1;
                self.expect_seq(&["inf"])?;
                Ok(Node::Extreme(p))
            }
            Some(Tok::Number(_)) => self.numeric(),
            Some(Tok::LParen { .. }) => self.alternatives(),
            Some(Tok::Word(_)) => self.worded(),
            Some(_) => Err(self.error(&["a date or period"])),
        }
    }

    fn postfix(&mut self, node: Node) -> PResult<Node> {
        Ok(node)
    }

    fn numeric(&mut self) -> PResult<Node> {
        let n = self.number()?;
        let property = if self.eat_seq(&["days"]) || self.eat_seq(&["day"]) {
            None
        } else if n == 1 {
            Some(self.ident().map_err(|_| self.error(&["\"days\"", "a day property"]))?)
        } else {
            Some(self.plural_property()?)
        };
        match self.direction() {
            Some(direction) => {
                let anchor = self.anchor()?;
                Ok(Node::Offset {
                    n,
                    direction,
                    anchor: Box::new(anchor),
                    property,
                })
            }
            None if property.is_none() => Ok(Node::Days(n)),
            None => Err(self.error(&["\"after\"", "\"before\""])),
        }
    }

    fn alternatives(&mut self) -> PResult<Node> {
        self.expect_lparen()?;
        let mut alts = Vec::new();
        loop {
            let at = self.offset();
            let v = self.value()?;
            match v.sort() {
                Sort::Day | Sort::Named => alts.push(v),
                Sort::Bag => {
                    return Err(self.special(
                        ParseErrorKind::NestedAlternative,
                        at,
                        "alternatives cannot themselves contain alternatives",
                    ))
                }
                other => {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        offset: at,
                        expected: vec!["a single date".into()],
                        message: format!("expected a single date, found {}", describe_sort(other)),
                    })
                }
            }
            if !self.eat_seq(&["or"]) {
                break;
            }
        }
        self.expect_tok(Tok::RParen, "\")\"")?;
        if alts.len() == 1 {
            return Ok(alts.pop().expect("one element"));
        }
        Ok(Node::Alternatives(alts))
    }

    fn worded(&mut self) -> PResult<Node> {
        let k = self.kw(0).unwrap_or_default();
        match k.as_str() {
            "today" => {
                self.pos += 1;
                Ok(Node::Today)
            }
            "at" => self.at_phrase(),
            "no" => self.no_more_than(),
            "the" => self.the_phrase(),
            "that" | "such" => self.context_short(),
            "on" => self.on_phrase(),
            "immediately" => {
                self.pos += 1;
                if self.eat_seq(&["before"]) || self.eat_seq(&["preceding"]) {
                    Ok(Node::ImmediatelyBefore(self.event()?))
                } else if self.eat_seq(&["after"]) || self.eat_seq(&["following"]) {
                    Ok(Node::Immediately(self.event()?))
                } else {
                    Err(self.error(&["\"before\"", "\"after\""]))
                }
            }
            "as" => {
                if self.eat_seq(&["as", "of", "the", "time", "immediately", "preceding"]) {
                    return Ok(Node::ImmediatelyBefore(self.event()?));
                }
                self.expect_seq(&["as", "soon", "as"])?;
                let adverb = if self.eat_seq(&["reasonably"]) {
                    Adverb::AsSoonAsReasonablyPracticable
                } else {
                    Adverb::AsSoonAsPracticable
                };
                self.expect_seq(&["practicable"])?;
                self.adverb_tail(adverb)
            }
            "promptly" => {
                self.pos += 1;
                self.adverb_tail(Adverb::Promptly)
            }
            "timely" => {
                self.pos += 1;
                self.adverb_tail(Adverb::Timely)
            }
            "all" => self.all_days(),
            "every" => self.every(),
            "with" => {
                self.expect_seq(&["with", "effect", "from"])?;
                let anchor = self.anchor()?;
                let ann_at = self.offset();
                let mode = match self.annotation()?.as_deref() {
                    None => None,
                    Some("continuous") => Some(EffectMode::Continuous),
                    Some("discrete") => Some(EffectMode::Discrete),
                    Some(_) => return Err(self.annotation_error(ann_at, &["[continuous]", "[discrete]"])),
                };
                if self.eat_seq(&["at", "all", "times", "until"]) {
                    if mode == Some(EffectMode::Discrete) {
                        return Err(self.special(
                            ParseErrorKind::Syntax,
                            ann_at,
                            "\"at all times\" describes a continuous period, not a discrete one",
                        ));
                    }
                    let until = self.anchor()?;
                    return Ok(Node::WithEffectFrom {
                        anchor: Box::new(anchor),
                        mode: EffectMode::Continuous,
                        until: Some(Box::new(until)),
                    });
                }
                let Some(mode) = mode else {
                    return Err(self.special(
                        ParseErrorKind::MissingAnnotation,
                        ann_at,
                        "\"with effect from\" needs [continuous] or [discrete]",
                    ));
                };
                let until = if self.eat_seq(&["until"]) {
                    Some(Box::new(self.anchor()?))
                } else {
                    None
                };
                Ok(Node::WithEffectFrom {
                    anchor: Box::new(anchor),
                    mode,
                    until,
                })
            }
            "for" | "so" => {
                if !self.eat_seq(&["for", "so", "long", "as"]) {
                    self.expect_seq(&["so", "long", "as"])?;
                }
                let e = self.event()?;
                if self.eat_seq(&["continues"]) {
                    self.eat_seq(&["to", "exist"]);
                }
                Ok(Node::SoLongAs(e))
            }
            "in" => {
                if self.eat_seq(&["in", "the", "future"]) {
                    let at = self.offset();
                    return match self.annotation()?.as_deref() {
                        Some("until agreement end") => Ok(Node::InTheFuture(FutureEnd::AgreementEnd)),
                        Some("without end") => Ok(Node::InTheFuture(FutureEnd::NoEnd)),
                        Some(_) => Err(self.annotation_error(at, &["[until agreement end]", "[without end]"])),
                        None => Err(self.special(
                            ParseErrorKind::MissingAnnotation,
                            at,
                            "\"in the future\" needs [until agreement end] or [without end]",
                        )),
                    };
                }
                self.expect_seq(&["in", "full", "force", "and", "effect"])?;
                self.full_force_tail()
            }
            "to" | "maintain" => {
                self.eat_seq(&["to"]);
                self.expect_seq(&["maintain", "in", "full", "force", "and", "effect"])?;
                self.full_force_tail()
            }
            "will" => {
                self.expect_seq(&["will", "survive"])?;
                let until = if self.eat_seq(&["until"]) {
                    Some(Box::new(self.anchor()?))
                } else {
                    None
                };
                Ok(Node::Survives { until })
            }
            "upon" => {
                if self.eat_seq(&["upon", "becoming", "aware", "of"]) {
                    let e = self.event()?;
                    return Ok(Node::EventBoundary {
                        event: e,
                        boundary: Boundary::Start,
                    });
                }
                self.expect_seq(&["upon", "the", "occurrence", "of"])?;
                self.boundary_by_annotation("the occurrence of")
            }
            "when" => {
                self.pos += 1;
                let o = self.ident()?;
                if self.eat_seq(&["is", "ascertained"]) {
                    return Ok(Node::EventBoundary {
                        event: o,
                        boundary: Boundary::Start,
                    });
                }
                self.expect_seq(&["is", "due"])?;
                Ok(Node::DueDate(o))
            }
            _ => {
                let name = self.ident()?;
                if self.eat_seq(&["will", "be", "deferred", "to"]) {
                    if self.eat_tok(&Tok::Comma) {
                        self.expect_seq(&["and", "will", "not", "be", "due", "until"])?;
                        let date = self.anchor()?;
                        return Ok(Node::DeferredTo {
                            obligation: name,
                            date: Box::new(date),
                        });
                    }
                    let date = self.anchor()?;
                    if self.eat_tok(&Tok::Comma) {
                        self.expect_seq(&["and", "will", "not", "be", "due", "until"])?;
                        let again = self.anchor()?;
                        if again != date {
                            return Err(self.error(&["the same date as the deferral"]));
                        }
                    }
                    return Ok(Node::DeferredTo {
                        obligation: name,
                        date: Box::new(date),
                    });
                }
                if self.vars.contains(&name) {
                    Ok(Node::Var(name))
                } else {
                    Ok(Node::NamedDate(name))
                }
            }
        }
    }

    fn annotation_error(&self, at: usize, expected: &[&str]) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            offset: at,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: format!("unknown annotation, expected one of {}", expected.join(", ")),
        }
    }

    fn full_force_tail(&mut self) -> PResult<Node> {
        if self.eat_seq(&["all"]) {
            Ok(Node::FullForceAndEffect(Some(self.ident()?)))
        } else {
            Ok(Node::FullForceAndEffect(None))
        }
    }

    fn adverb_tail(&mut self, adverb: Adverb) -> PResult<Node> {
        let anchor = if self.eat_seq(&["after"]) || self.eat_seq(&["following"]) {
            Some(Box::new(self.anchor()?))
        } else {
            None
        };
        Ok(Node::Reasonableness { adverb, anchor })
    }

    fn boundary_by_annotation(&mut self, phrase: &str) -> PResult<Node> {
        let e = self.event()?;
        let at = self.offset();
        match self.annotation()?.as_deref() {
            Some("start") => Ok(Node::EventBoundary {
                event: e,
                boundary: Boundary::Start,
            }),
            Some("end") => Ok(Node::EventBoundary {
                event: e,
                boundary: Boundary::End,
            }),
            Some(_) => Err(self.annotation_error(at, &["[start]", "[end]"])),
            None => Err(self.special(
                ParseErrorKind::MissingAnnotation,
                at,
                format!("\"{phrase}\" may mean the start or the end of the event; add [start] or [end]"),
            )),
        }
    }

    fn at_phrase(&mut self) -> PResult<Node> {
        if self.eat_seq(&["at", "least"]) {
            let n = self.number()?;
            if self.eat_seq(&["times"]) {
                let max = if self.eat_seq(&["but", "no", "more", "than"]) {
                    let m = self.number()?;
                    self.expect_seq(&["times"])?;
                    if m < n {
                        return Err(self.error(&["a maximum no smaller than the minimum"]));
                    }
                    Some(m)
                } else {
                    None
                };
                return Ok(Node::Times { min: Some(n), max });
            }
            self.days_unit()?;
            if !self.is_after_kw() {
                let max = if self.eat_seq(&["but", "no", "more", "than"]) {
                    let m = self.number()?;
                    self.days_unit()?;
                    if m < n {
                        return Err(self.error(&["a maximum no smaller than the minimum"]));
                    }
                    Some(m)
                } else {
                    None
                };
                return Ok(Node::DaysBounded { min: Some(n), max });
            }
            self.after_kw()?;
            let anchor = self.anchor()?;
            return Ok(Node::AtLeastOffset {
                n,
                anchor: Box::new(anchor),
            });
        }
        if self.eat_seq(&["at", "all", "times", "until"]) {
            return Ok(Node::AtAllTimesUntil(Box::new(self.anchor()?)));
        }
        if self.eat_seq(&["at", "any", "time"]) {
            return Ok(Node::AtAnyTime);
        }
        if self.eat_seq(&["at", "such", "time", "of", "being"]) {
            return self.boundary_by_annotation("at such time of being");
        }
        self.pos += 1;
        Err(self.error(&["\"least\"", "\"all times until\"", "\"any time\""]))
    }

    fn no_more_than(&mut self) -> PResult<Node> {
        self.expect_seq(&["no", "more", "than"])?;
        let n = self.number()?;
        if self.eat_seq(&["times"]) {
            return Ok(Node::Times { min: None, max: Some(n) });
        }
        self.days_unit()?;
        if self.eat_seq(&["notice"]) {
            self.after_kw()?;
            return Ok(Node::NoticeWindow { n, event: self.event()? });
        }
        if !self.is_after_kw() {
            return Ok(Node::DaysBounded { min: None, max: Some(n) });
        }
        self.after_kw()?;
        let anchor = self.anchor()?;
        Ok(Node::AtMostOffset {
            n,
            anchor: Box::new(anchor),
        })
    }

    fn range(&mut self) -> PResult<(Box<Node>, Box<Node>)> {
        self.expect_seq(&["from"])?;
        let from = self.anchor()?;
        self.expect_seq(&["to"])?;
        let to = self.anchor()?;
        Ok((Box::new(from), Box::new(to)))
    }

    fn the_phrase(&mut self) -> PResult<Node> {
        if self.eat_seq(&["the", "first"]) {
            let property = self.ident()?;
            self.after_kw()?;
            let anchor = self.anchor()?;
            return Ok(Node::FirstWithPropertyAfter {
                property,
                anchor: Box::new(anchor),
            });
        }
        if self.eat_seq(&["the", "next", "succeeding"]) {
            let property = self.ident()?;
            let after = if self.eat_seq(&["after"]) || self.eat_seq(&["following"]) {
                Some(Box::new(self.anchor()?))
            } else {
                None
            };
            return Ok(Node::NextSucceeding { property, after });
        }
        for (words, boundary) in [
            (&["the", "start", "date", "of"][..], Boundary::Start),
            (&["the", "start", "of"][..], Boundary::Start),
            (&["the", "end", "date", "of"][..], Boundary::End),
            (&["the", "end", "of"][..], Boundary::End),
        ] {
            if self.eat_seq(words) {
                return Ok(Node::EventBoundary {
                    event: self.event()?,
                    boundary,
                });
            }
        }
        if self.eat_seq(&["the", "due", "date", "of"]) {
            return Ok(Node::DueDate(self.ident()?));
        }
        if self.eat_seq(&["the", "last"]) {
            let class = self.ident()?;
            self.expect_seq(&["date"])?;
            let at = self.offset();
            return match self.annotation()?.as_deref() {
                Some("most recent") => Ok(Node::LastPaymentDate {
                    class,
                    reading: PaymentReading::MostRecentDischarged,
                }),
                Some("latest due") => Ok(Node::LastPaymentDate {
                    class,
                    reading: PaymentReading::LatestDue,
                }),
                Some(_) => Err(self.annotation_error(at, &["[most recent]", "[latest due]"])),
                None => Err(self.special(
                    ParseErrorKind::MissingAnnotation,
                    at,
                    format!("\"the last {class} date\" needs [most recent] or [latest due]"),
                )),
            };
        }
        if self.eat_seq(&["the", "current", "date"]) {
            return Ok(Node::Today);
        }
        if self.eat_seq(&["the", "date", "so", "designated"]) {
            return Ok(Node::Context(ContextRef::DateSoDesignated));
        }
        if self.eat_seq(&["the", "date", "specified"]) {
            return Ok(Node::Context(ContextRef::DateSpecified));
        }
        if self.eat_seq(&["the", "date", "determined", "under", "clause"]) {
            return Ok(Node::Context(ContextRef::DeterminedUnderClause(self.word()?)));
        }
        if self.eat_seq(&["the", "date", "as", "of"]) {
            return self.boundary_by_annotation("the date as of");
        }
        if self.eat_seq(&["the", "time", "specified"]) {
            return Ok(Node::Context(ContextRef::TimeSpecified));
        }
        if self.eat_seq(&["the", "time", "or", "times", "specified"]) {
            return Ok(Node::Context(ContextRef::TimesSpecified));
        }
        if self.eat_seq(&["the", "occurrence", "of"]) {
            return self.boundary_by_annotation("the occurrence of");
        }
        for (words, kind) in [
            (&["the", "notice", "requirement"][..], PeriodKind::NoticeRequirement),
            (&["the", "applicable", "grace", "period"][..], PeriodKind::GracePeriod),
            (&["the", "applicable", "waiting", "period"][..], PeriodKind::WaitingPeriod),
        ] {
            if self.eat_seq(words) {
                let (from, to) = self.range()?;
                return Ok(Node::Period { kind, from, to });
            }
        }
        if self.eat_seq(&["the", "number", "of"]) {
            let property = if self.eat_seq(&["days"]) {
                None
            } else {
                Some(self.plural_property()?)
            };
            self.expect_seq(&["between"])?;
            let from = self.anchor()?;
            self.expect_seq(&["and"])?;
            let to = self.anchor()?;
            return Ok(Node::DaysBetween {
                from: Box::new(from),
                to: Box::new(to),
                property,
            });
        }
        self.pos += 1;
        Err(self.error(&[
            "\"first\"",
            "\"next succeeding\"",
            "\"start of\"",
            "\"end of\"",
            "\"due date of\"",
            "\"last\"",
            "\"date\"",
            "\"time\"",
            "\"number of\"",
            "a period name",
        ]))
    }

    fn context_short(&mut self) -> PResult<Node> {
        if self.eat_seq(&["that", "date"]) {
            Ok(Node::Context(ContextRef::ThatDate))
        } else if self.eat_seq(&["that", "day"]) {
            Ok(Node::Context(ContextRef::ThatDay))
        } else if self.eat_seq(&["such", "date"]) {
            Ok(Node::Context(ContextRef::SuchDate))
        } else {
            self.pos += 1;
            Err(self.error(&["\"date\"", "\"day\""]))
        }
    }

    fn on_phrase(&mut self) -> PResult<Node> {
        if self.eat_seq(&["on", "or", "as", "soon", "as"]) {
            let reasonably = self.eat_seq(&["reasonably"]);
            self.expect_seq(&["practicable"])?;
            self.after_kw()?;
            let anchor = self.anchor()?;
            return Ok(Node::OnOrAsSoonAsPracticable {
                anchor: Box::new(anchor),
                reasonably,
            });
        }
        if self.eat_seq(&["on", "any"]) {
            let property = if self.eat_seq(&["day"]) {
                None
            } else {
                Some(self.ident()?)
            };
            let (from, to) = self.range()?;
            let mut except = Vec::new();
            let wrapped = if matches!(self.peek(), Some(Tok::LParen { .. })) && self.kw(1).as_deref() == Some("in") {
                self.pos += 1;
                self.expect_seq(&["in", "each", "case"])?;
                self.expect_tok(Tok::Comma, "\",\"")?;
                true
            } else {
                false
            };
            if wrapped || self.is_seq(&["other", "than"]) {
                self.expect_seq(&["other", "than"])?;
                loop {
                    let at = self.offset();
                    let x = self.value()?;
                    if !matches!(x.sort(), Sort::Day | Sort::Named | Sort::Set) {
                        return Err(ParseError {
                            kind: ParseErrorKind::Syntax,
                            offset: at,
                            expected: vec!["a date or set of days".into()],
                            message: format!("cannot exclude {}", describe_sort(x.sort())),
                        });
                    }
                    except.push(x);
                    if !self.eat_tok(&Tok::Comma) {
                        break;
                    }
                }
                if wrapped {
                    self.expect_tok(Tok::RParen, "\")\"")?;
                }
            }
            return Ok(Node::AnyDay {
                property,
                from,
                to,
                except,
            });
        }
        if self.eat_seq(&["on", "that", "date"]) {
            return Ok(Node::Context(ContextRef::ThatDate));
        }
        if self.eat_seq(&["on", "that", "day"]) {
            return Ok(Node::Context(ContextRef::ThatDay));
        }
        if self.eat_seq(&["on", "such", "date"]) {
            return Ok(Node::Context(ContextRef::SuchDate));
        }
        self.pos += 1;
        Err(self.error(&["\"or as soon as\"", "\"any\"", "\"that date\"", "\"such date\""]))
    }

    fn all_days(&mut self) -> PResult<Node> {
        self.expect_seq(&["all", "days"])?;
        if self.eat_seq(&["within"]) {
            let hi = self.number()?;
            self.days_unit()?;
            self.after_kw()?;
            let anchor = self.anchor()?;
            return Ok(Node::Window {
                anchor: Box::new(anchor),
                lo: 1,
                hi,
            });
        }
        if self.eat_seq(&["from"]) {
            let lo = self.number()?;
            self.expect_seq(&["to"])?;
            let hi = self.number()?;
            self.days_unit()?;
            self.after_kw()?;
            let anchor = self.anchor()?;
            return Ok(Node::Window {
                anchor: Box::new(anchor),
                lo,
                hi,
            });
        }
        self.expect_seq(&["after"])?;
        let from = self.event()?;
        self.expect_seq(&["and", "before"])?;
        let to = self.event()?;
        Ok(Node::AllDaysBetween { from, to })
    }

    fn every(&mut self) -> PResult<Node> {
        self.expect_seq(&["every"])?;
        let nth = Nth::ALL
            .into_iter()
            .find(|n| self.kw(0).as_deref() == Some(n.word()));
        if nth.is_some() {
            self.pos += 1;
        }
        let weekday = match self.kw(0).as_deref().and_then(Weekday::parse_name) {
            Some(w) => {
                self.pos += 1;
                w
            }
            None => return Err(self.error(&["a weekday"])),
        };
        if nth.is_some() {
            self.expect_seq(&["of", "every", "month"])?;
        }
        let (from, to) = self.range()?;
        Ok(Node::EveryNthWeekday {
            nth,
            weekday,
            from,
            to,
        })
    }

    // conditions

    fn condition(&mut self) -> PResult<Node> {
        let mut left = self.and_cond()?;
        while self.is_seq(&["or"]) {
            let at = self.offset();
            self.pos += 1;
            let right = self.and_cond()?;
            left = self.combine(left, right, at, Node::Or)?;
        }
        Ok(left)
    }

    fn and_cond(&mut self) -> PResult<Node> {
        let mut left = self.not_cond()?;
        while self.is_seq(&["and"]) {
            let at = self.offset();
            self.pos += 1;
            let right = self.not_cond()?;
            left = self.combine(left, right, at, Node::And)?;
        }
        Ok(left)
    }

    fn combine(
        &self,
        left: Node,
        right: Node,
        at: usize,
        make: fn(Box<Node>, Box<Node>) -> Node,
    ) -> PResult<Node> {
        if left.has_bag_comparison() && right.has_bag_comparison() {
            return Err(self.special(
                ParseErrorKind::NestedAlternative,
                at,
                "combining comparisons against alternative dates is not supported",
            ));
        }
        Ok(make(Box::new(left), Box::new(right)))
    }

    fn not_cond(&mut self) -> PResult<Node> {
        if self.eat_seq(&["not"]) {
            return Ok(Node::Not(Box::new(self.not_cond()?)));
        }
        self.primary_cond()
    }

    fn body(&mut self) -> PResult<Box<Node>> {
        self.expect_lparen()?;
        let c = self.condition()?;
        self.expect_tok(Tok::RParen, "\")\"")?;
        Ok(Box::new(c))
    }

    fn term(&mut self) -> PResult<Node> {
        self.anchor()
    }

    fn primary_cond(&mut self) -> PResult<Node> {
        if matches!(self.peek(), Some(Tok::LParen { .. })) {
            return self.body().map(|b| *b);
        }
        let k = self.kw(0).unwrap_or_default();
        match k.as_str() {
            "true" => {
                self.pos += 1;
                return Ok(Node::Truth(true));
            }
            "false" => {
                self.pos += 1;
                return Ok(Node::Truth(false));
            }
            "rd" | "rt" if self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LBracket) => {
                self.pos += 2;
                let op = if k == "rd" { SpanOp::Rd } else { SpanOp::Rt };
                let begin = self.term()?;
                self.expect_tok(Tok::Comma, "\",\"")?;
                let end = self.term()?;
                self.expect_tok(Tok::RBracket, "\"]\"")?;
                let body = self.body()?;
                return Ok(Node::Span {
                    op,
                    begin: Box::new(begin),
                    end: Box::new(end),
                    body,
                });
            }
            "rb" if self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LBracket) => {
                self.pos += 2;
                let at = self.term()?;
                self.expect_tok(Tok::RBracket, "\"]\"")?;
                let body = self.body()?;
                return Ok(Node::Before {
                    at: Box::new(at),
                    body,
                });
            }
            "at" if !matches!(self.kw(1).as_deref(), Some("least") | Some("all") | Some("any")) => {
                self.pos += 1;
                let at = self.term()?;
                let body = self.body()?;
                return Ok(Node::RealizedAt {
                    at: Box::new(at),
                    body,
                });
            }
            "forall" | "exists" => {
                self.pos += 1;
                let quantifier = if k == "forall" {
                    Quantifier::ForAll
                } else {
                    Quantifier::Exists
                };
                let var = self.ident()?;
                self.expect_seq(&["in"])?;
                let domain = self.set_value()?;
                self.vars.push(var.clone());
                let body = self.body();
                self.vars.pop();
                return Ok(Node::Quantified {
                    quantifier,
                    var,
                    domain: Box::new(domain),
                    body: body?,
                });
            }
            "there" => {
                let at = self.offset();
                self.expect_seq(&["there", "is"])?;
                return match self.annotation()?.as_deref() {
                    Some("temporal") => Ok(Node::ThereIs(self.event()?)),
                    _ => Err(self.special(
                        ParseErrorKind::Unsupported,
                        at,
                        "\"there is\" must be read in context; only \"there is [temporal] E\" is supported",
                    )),
                };
            }
            "has" => {
                if self.eat_seq(&["has", "taken", "action"]) {
                    return Ok(Node::HasTakenAction(self.event()?));
                }
                self.expect_seq(&["has", "satisfied"])?;
                return Ok(Node::HasSatisfied(self.ident()?));
            }
            "an" => {
                self.expect_seq(&["an", "earlier"])?;
                let n = self.ident()?;
                self.expect_seq(&["has", "been", "designated"])?;
                return Ok(Node::EarlierDesignated(n));
            }
            _ => {}
        }
        if let Some(op) = self.compare_op() {
            let operand = self.operand()?;
            return Ok(Node::Compare {
                subject: None,
                op,
                operand: Box::new(operand),
            });
        }
        if let (Some(Tok::Word(name)), Some(Tok::LParen { adjacent: true })) = (
            self.toks.get(self.pos).map(|t| &t.tok),
            self.toks.get(self.pos + 1).map(|t| &t.tok),
        ) {
            let name = name.clone();
            self.pos += 2;
            let mut args = Vec::new();
            if !self.eat_tok(&Tok::RParen) {
                loop {
                    args.push(self.word()?);
                    if self.eat_tok(&Tok::RParen) {
                        break;
                    }
                    self.expect_tok(Tok::Comma, "\",\" or \")\"")?;
                }
            }
            return Ok(Node::Atom { name, args });
        }

        let subject_at = self.offset();
        let subject = self.term()?;
        let name = match &subject {
            Node::NamedDate(n) => Some(n.clone()),
            _ => None,
        };
        let need_name = || -> PResult<String> {
            name.clone().ok_or_else(|| ParseError {
                kind: ParseErrorKind::Syntax,
                offset: subject_at,
                expected: vec!["a name".into()],
                message: "expected a name before this predicate".into(),
            })
        };
        if self.eat_seq(&["has", "occurred"]) {
            let phase = if self.eat_seq(&["and", "is", "continuing"]) {
                Phase::OccurredAndContinuing
            } else {
                Phase::HasOccurred
            };
            return Ok(Node::PhaseCondition {
                subject: Box::new(subject),
                phase,
            });
        }
        if self.eat_seq(&["is", "continuing"]) {
            return Ok(Node::PhaseCondition {
                subject: Box::new(subject),
                phase: Phase::IsContinuing,
            });
        }
        if self.eat_seq(&["has", "ceased"]) {
            return Ok(Node::PhaseCondition {
                subject: Box::new(subject),
                phase: Phase::HasCeased,
            });
        }
        if self.eat_seq(&["occurs", "prior", "to"]) {
            let a = need_name()?;
            return Ok(Node::OccursPriorTo(a, self.event()?));
        }
        if self.eat_seq(&["has", "been", "designated"]) {
            return Ok(Node::Designated(need_name()?));
        }
        if self.eat_seq(&["has", "satisfied"]) {
            return Ok(Node::HasSatisfied(self.ident()?));
        }
        if self.eat_seq(&["has", "been", "satisfied"]) {
            return Ok(Node::HasSatisfied(need_name()?));
        }
        if self.is_seq(&["is", "specified"]) || self.is_seq(&["is", "not", "specified"]) {
            let n = need_name()?;
            self.pos += 1;
            let negated = self.eat_seq(&["not"]);
            self.pos += 1;
            let source = if self.eat_seq(&["in"]) {
                Some(self.ident()?)
            } else {
                None
            };
            return Ok(Node::Specified {
                name: n,
                negated,
                source,
            });
        }
        if self.eat_seq(&["precedes"]) {
            let operand = self.operand()?;
            return Ok(Node::Compare {
                subject: Some(Box::new(subject)),
                op: CompareOp::PriorTo,
                operand: Box::new(operand),
            });
        }
        if self.eat_seq(&["is"]) {
            if let Some(op) = self.compare_op() {
                let operand = self.operand()?;
                return Ok(Node::Compare {
                    subject: Some(Box::new(subject)),
                    op,
                    operand: Box::new(operand),
                });
            }
            return Err(self.error(&["\"prior to\"", "\"after\"", "\"the same day as\"", "\"specified\"", "\"continuing\""]));
        }
        Err(self.error(&[
            "\"has occurred\"",
            "\"is continuing\"",
            "\"has ceased\"",
            "\"occurs prior to\"",
            "\"has been designated\"",
            "\"is specified\"",
            "\"precedes\"",
            "\"is\"",
        ]))
    }

    fn compare_op(&mut self) -> Option<CompareOp> {
        let table: [(&[&str], CompareOp); 8] = [
            (&["prior", "to"], CompareOp::PriorTo),
            (&["before"], CompareOp::PriorTo),
            (&["after"], CompareOp::After),
            (&["following"], CompareOp::After),
            (&["the", "same", "day", "as"], CompareOp::SameDay),
            (&["on", "or", "before"], CompareOp::OnOrBefore),
            (&["on", "or", "after"], CompareOp::OnOrAfter),
            (&["the", "same", "day"], CompareOp::SameDay),
        ];
        table
            .into_iter()
            .find(|(w, _)| self.eat_seq(w))
            .map(|(_, op)| op)
    }
}

fn describe_sort(s: Sort) -> &'static str {
    match s {
        Sort::Day | Sort::Named => "a date",
        Sort::Interval => "a continuous period",
        Sort::Set => "a set of days",
        Sort::Bag => "a bag of alternative dates",
        Sort::Count => "a number",
        Sort::Formula => "a condition",
    }
}

fn expected_message(expected: &[String], found: Option<&Token>) -> String {
    let found = match found.map(|t| &t.tok) {
        None => "end of phrase".to_string(),
        Some(Tok::Word(w)) => format!("{w:?}"),
        Some(Tok::Number(n)) => n.to_string(),
        Some(Tok::Date(d)) => d.to_string(),
        Some(Tok::LParen { .. }) => "\"(\"".into(),
        Some(Tok::RParen) => "\")\"".into(),
        Some(Tok::LBracket) => "\"[\"".into(),
        Some(Tok::RBracket) => "\"]\"".into(),
        Some(Tok::Comma) => "\",\"".into(),
        Some(Tok::Plus) => "\"+\"".into(),
        Some(Tok::Minus) => "\"-\"".into(),
    };
    format!("expected {}, found {found}", expected.join(" or "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(text: &str) -> ParseErrorKind {
        parse(text).unwrap_err().kind
    }

    #[test]
    fn examples() {
        assert_eq!(
            parse("at least 5 days after EffectiveDate").unwrap(),
            Node::AtLeastOffset {
                n: 5,
                anchor: Box::new(Node::NamedDate("EffectiveDate".into())),
            }
        );
        let Node::EveryNthWeekday { nth, weekday, .. } =
            parse("every first Monday of every month from 2018-01-01 to 2018-12-31").unwrap()
        else {
            panic!("expected a recurring set")
        };
        assert_eq!((nth, weekday), (Some(Nth::First), Weekday::Mon));
        assert_eq!(kind("prior to (X or Y) or following (P or Q)"), ParseErrorKind::NestedAlternative);
    }

    #[test]
    fn keywords_are_case_insensitive() {
        assert_eq!(
            parse("AT LEAST 5 Days After X").unwrap(),
            parse("at least 5 days after X").unwrap()
        );
    }

    #[test]
    fn nested_alternatives() {
        assert_eq!(kind("((X or Y) or Z)"), ParseErrorKind::NestedAlternative);
        assert_eq!(kind("5 days after (X or Y)"), ParseErrorKind::NestedAlternative);
        assert_eq!(kind("prior to (X or Y) and after (P or Q)"), ParseErrorKind::NestedAlternative);
        assert!(parse("prior to (X or Y) and E has occurred").is_ok());
    }

    #[test]
    fn special_diagnostics() {
        assert_eq!(kind("if an Event of Default would occur"), ParseErrorKind::HumanInputRequired);
        assert_eq!(kind("any applicable law then in effect"), ParseErrorKind::HumanInputRequired);
        assert_eq!(kind("in the event of any inconsistency"), ParseErrorKind::DraftingAnnotation);
        assert_eq!(kind("pursuant to Section 2"), ParseErrorKind::Unsupported);
        assert_eq!(kind("with effect from X"), ParseErrorKind::MissingAnnotation);
        assert_eq!(kind("in the future"), ParseErrorKind::MissingAnnotation);
        assert_eq!(kind("the occurrence of E"), ParseErrorKind::MissingAnnotation);
        assert_eq!(kind("the last payment date"), ParseErrorKind::MissingAnnotation);
    }

    #[test]
    fn syntax_errors_report_offset_and_expectations() {
        let e = parse("at least 5 days after").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.offset, "at least 5 days after".len());
        assert!(!e.expected.is_empty());
        let e = parse("").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse("5 days after X Y").unwrap_err();
        assert_eq!(e.offset, 15);
    }

    #[test]
    fn reserved_words_are_not_names() {
        assert!(is_reserved("After"));
        assert!(!is_reserved("EffectiveDate"));
        assert!(parse("5 days after days").is_err());
    }

    #[test]
    fn quantifier_binds_variable() {
        let n = parse("forall x in all days within 3 days after X (x is prior to Y)").unwrap();
        let Node::Quantified { body, .. } = n else { panic!() };
        let Node::Compare { subject, .. } = *body else { panic!() };
        assert_eq!(subject.as_deref(), Some(&Node::Var("x".into())));
    }

    #[test]
    fn normalized_print_reparses() {
        for text in [
            "following X",
            "as of the time immediately preceding E",
            "so long as E",
            "no more than 5 days notice following E",
            "Payment1 will be deferred to, and will not be due until 2018-07-01",
        ] {
            let ast = parse(text).unwrap();
            assert_eq!(parse(&ast.print()).unwrap(), ast, "{text}");
        }
    }
}
