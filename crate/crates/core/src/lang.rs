//! The history expression language.
//!
//! Histories are built from event names with two connectives: `&` joins
//! events into a sequence (one transition after another) and `|` groups
//! mutually exclusive alternatives. `⊓` and `⊔` are accepted aliases.
//! `|` binds tighter than `&`, so `a & b1 | b2 & c` reads as
//! `a & (b1 | b2) & c`; parentheses override as usual.
//!
//! Grammar:
//!
//! ```text
//! history := seq ;
//! seq     := alt { "&" alt } ;
//! alt     := atom { "|" atom } ;
//! atom    := IDENT | "(" history ")" ;
//! ```
//!
//! Parsed trees are kept in a flattened normal form: the steps of a
//! sequence are never sequences themselves and the branches of an
//! alternative group are never alternative groups.

use std::fmt;

use crate::error::ParseError;

/// A history proposition: a single event, a sequence of steps, or a
/// group of mutually exclusive alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HistoryExpr {
    Event(String),
    Seq(Vec<HistoryExpr>),
    Alt(Vec<HistoryExpr>),
}

impl HistoryExpr {
    pub fn event(name: impl Into<String>) -> Self {
        HistoryExpr::Event(name.into())
    }

    /// Builds a sequence, flattening nested sequences into the normal
    /// form. A single-element sequence collapses to the element itself.
    pub fn seq(steps: Vec<HistoryExpr>) -> Self {
        assert!(!steps.is_empty(), "a sequence needs at least one step");
        let mut flat = Vec::with_capacity(steps.len());
        for step in steps {
            match step {
                HistoryExpr::Seq(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            HistoryExpr::Seq(flat)
        }
    }

    /// Builds an alternative group, flattening nested groups.
    pub fn alt(branches: Vec<HistoryExpr>) -> Self {
        assert!(
            !branches.is_empty(),
            "an alternative needs at least one branch"
        );
        let mut flat = Vec::with_capacity(branches.len());
        for branch in branches {
            match branch {
                HistoryExpr::Alt(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            HistoryExpr::Alt(flat)
        }
    }

    pub fn is_event(&self) -> bool {
        matches!(self, HistoryExpr::Event(_))
    }

    pub fn event_name(&self) -> Option<&str> {
        match self {
            HistoryExpr::Event(name) => Some(name),
            _ => None,
        }
    }

    /// The top-level slots of the history: the steps of a sequence, or
    /// the expression itself for anything else.
    pub fn slots(&self) -> &[HistoryExpr] {
        match self {
            HistoryExpr::Seq(steps) => steps,
            other => std::slice::from_ref(other),
        }
    }

    /// First and last top-level slot.
    pub fn endpoints(&self) -> (&HistoryExpr, &HistoryExpr) {
        let slots = self.slots();
        (slots.first().unwrap(), slots.last().unwrap())
    }

    /// True when both endpoints are single events.
    pub fn has_elementary_endpoints(&self) -> bool {
        let (first, last) = self.endpoints();
        first.is_event() && last.is_event()
    }

    /// The time-reversed history: sequence order is reversed at every
    /// level, alternative branches stay in place.
    pub fn reversed(&self) -> HistoryExpr {
        match self {
            HistoryExpr::Event(_) => self.clone(),
            HistoryExpr::Seq(steps) => {
                HistoryExpr::Seq(steps.iter().rev().map(HistoryExpr::reversed).collect())
            }
            HistoryExpr::Alt(branches) => {
                HistoryExpr::Alt(branches.iter().map(HistoryExpr::reversed).collect())
            }
        }
    }

    /// Expands every alternative into the list of elementary paths, in
    /// deterministic order: left-to-right slots, declared branch order,
    /// with the leftmost slot varying slowest.
    pub fn expand_paths(&self) -> Vec<ElementaryPath> {
        fn rec(h: &HistoryExpr) -> Vec<Vec<String>> {
            match h {
                HistoryExpr::Event(name) => vec![vec![name.clone()]],
                HistoryExpr::Alt(branches) => branches.iter().flat_map(rec).collect(),
                HistoryExpr::Seq(steps) => {
                    let mut acc: Vec<Vec<String>> = vec![Vec::new()];
                    for step in steps {
                        let parts = rec(step);
                        let mut next = Vec::with_capacity(acc.len() * parts.len());
                        for prefix in &acc {
                            for part in &parts {
                                let mut path = prefix.clone();
                                path.extend_from_slice(part);
                                next.push(path);
                            }
                        }
                        acc = next;
                    }
                    acc
                }
            }
        }
        rec(self).into_iter().map(ElementaryPath::new).collect()
    }

    /// Number of elementary paths without materializing them.
    pub fn path_count(&self) -> usize {
        match self {
            HistoryExpr::Event(_) => 1,
            HistoryExpr::Alt(branches) => branches.iter().map(HistoryExpr::path_count).sum(),
            HistoryExpr::Seq(steps) => steps.iter().map(HistoryExpr::path_count).product(),
        }
    }
}

/// Canonical rendering: steps joined by `" & "`, alternative groups
/// always parenthesized. Parsing the rendered text reproduces the tree.
impl fmt::Display for HistoryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_branch(f: &mut fmt::Formatter<'_>, b: &HistoryExpr) -> fmt::Result {
            // A sequence inside an alternative needs its own parentheses,
            // otherwise "&" would capture the surrounding branches.
            if matches!(b, HistoryExpr::Seq(_)) {
                write!(f, "({b})")
            } else {
                write!(f, "{b}")
            }
        }
        match self {
            HistoryExpr::Event(name) => write!(f, "{name}"),
            HistoryExpr::Seq(steps) => {
                for (i, step) in steps.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    if matches!(step, HistoryExpr::Seq(_)) {
                        write!(f, "({step})")?;
                    } else {
                        write!(f, "{step}")?;
                    }
                }
                Ok(())
            }
            HistoryExpr::Alt(branches) => {
                write!(f, "(")?;
                for (i, branch) in branches.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write_branch(f, branch)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A fully expanded, alternative-free sequence of event names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryPath {
    events: Vec<String>,
}

impl ElementaryPath {
    pub fn new(events: Vec<String>) -> Self {
        assert!(!events.is_empty(), "a path needs at least one event");
        Self { events }
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &str {
        self.events.first().unwrap()
    }

    pub fn last(&self) -> &str {
        self.events.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        Self {
            events: self.events.iter().rev().cloned().collect(),
        }
    }

    /// The path as a plain sequential history.
    pub fn to_history(&self) -> HistoryExpr {
        HistoryExpr::seq(self.events.iter().map(HistoryExpr::event).collect())
    }
}

impl fmt::Display for ElementaryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.events.join(" & "))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    And,
    Or,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("'{name}'"),
            Token::And => "'&'".into(),
            Token::Or => "'|'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().enumerate().peekable();
    while let Some(&(at, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '&' | '\u{2293}' => {
                chars.next();
                tokens.push((Token::And, at));
            }
            '|' | '\u{2294}' => {
                chars.next();
                tokens.push((Token::Or, at));
            }
            '(' => {
                chars.next();
                tokens.push((Token::LParen, at));
            }
            ')' => {
                chars.next();
                tokens.push((Token::RParen, at));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Token::Ident(name), at));
            }
            other => {
                return Err(ParseError::UnknownToken {
                    position: at,
                    found: other,
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, token: &Token) -> bool {
        if matches!(self.peek(), Some((t, _)) if t == token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn seq(&mut self) -> Result<HistoryExpr, ParseError> {
        let mut steps = vec![self.alt()?];
        while self.eat(&Token::And) {
            steps.push(self.alt()?);
        }
        Ok(HistoryExpr::seq(steps))
    }

    fn alt(&mut self) -> Result<HistoryExpr, ParseError> {
        let mut branches = vec![self.atom()?];
        while self.eat(&Token::Or) {
            branches.push(self.atom()?);
        }
        Ok(HistoryExpr::alt(branches))
    }

    fn atom(&mut self) -> Result<HistoryExpr, ParseError> {
        match self.advance() {
            Some((Token::Ident(name), _)) => Ok(HistoryExpr::Event(name)),
            Some((Token::LParen, open_at)) => {
                let inner = self.seq()?;
                match self.advance() {
                    Some((Token::RParen, _)) => Ok(inner),
                    Some((t, at)) => Err(ParseError::Syntax {
                        position: at,
                        expected: "')'",
                        found: t.describe(),
                    }),
                    None => Err(ParseError::Syntax {
                        position: self.end.max(open_at + 1),
                        expected: "')'",
                        found: "end of input".into(),
                    }),
                }
            }
            Some((t, at)) => Err(ParseError::Syntax {
                position: at,
                expected: "event name or '('",
                found: t.describe(),
            }),
            None => Err(ParseError::Syntax {
                position: self.end,
                expected: "event name or '('",
                found: "end of input".into(),
            }),
        }
    }
}

/// Parses history text into its flattened AST. Positions in errors are
/// zero-based character offsets.
pub fn parse(text: &str) -> Result<HistoryExpr, ParseError> {
    let tokens = lex(text)?;
    let end = text.chars().count();
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
    };
    let history = parser.seq()?;
    if let Some((t, at)) = parser.peek() {
        return Err(ParseError::Syntax {
            position: *at,
            expected: "'&', '|' or end of input",
            found: t.describe(),
        });
    }
    Ok(history)
}

/// Canonical text for a history; inverse of [`parse`] on normal-form
/// trees.
pub fn render(h: &HistoryExpr) -> String {
    h.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(name: &str) -> HistoryExpr {
        HistoryExpr::event(name)
    }

    #[test]
    fn parses_flat_sequence() {
        let h = parse("a & b & c").unwrap();
        assert_eq!(h, HistoryExpr::Seq(vec![ev("a"), ev("b"), ev("c")]));
    }

    #[test]
    fn parses_alternative_slot() {
        let h = parse("a & (b1 | b2) & c").unwrap();
        assert_eq!(
            h,
            HistoryExpr::Seq(vec![
                ev("a"),
                HistoryExpr::Alt(vec![ev("b1"), ev("b2")]),
                ev("c"),
            ])
        );
    }

    #[test]
    fn alternative_binds_tighter_than_sequence() {
        assert_eq!(
            parse("a & b1 | b2 & c").unwrap(),
            parse("a & (b1 | b2) & c").unwrap()
        );
    }

    #[test]
    fn unicode_connectives_are_aliases() {
        assert_eq!(parse("a ⊓ b ⊓ c").unwrap(), parse("a & b & c").unwrap());
        assert_eq!(
            parse("a ⊓ (b1 ⊔ b2)").unwrap(),
            parse("a & (b1 | b2)").unwrap()
        );
    }

    #[test]
    fn double_ampersand_is_a_syntax_error() {
        let err = parse("a & & b").unwrap_err();
        match err {
            ParseError::Syntax {
                position,
                ref found,
                ..
            } => {
                assert_eq!(position, 4);
                assert_eq!(found, "'&'");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn stray_character_is_unknown_token() {
        let err = parse("a + b").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownToken {
                position: 2,
                found: '+'
            }
        );
    }

    #[test]
    fn unclosed_parenthesis_reports_position() {
        let err = parse("(a & b").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(parse("").is_err());
        assert!(parse("   ").is_err());
    }

    #[test]
    fn trailing_tokens_are_rejected() {
        assert!(parse("a b").is_err());
        assert!(parse("(a)(b)").is_err());
    }

    #[test]
    fn parenthesized_sequences_flatten() {
        assert_eq!(parse("(a & b) & c").unwrap(), parse("a & b & c").unwrap());
        assert_eq!(parse("a & (b & c)").unwrap(), parse("a & b & c").unwrap());
        assert_eq!(parse("a | (b | c)").unwrap(), parse("a | b | c").unwrap());
    }

    #[test]
    fn renders_canonical_forms() {
        assert_eq!(render(&parse("a&b").unwrap()), "a & b");
        assert_eq!(
            render(&parse("a & b1|b2 & c").unwrap()),
            "a & (b1 | b2) & c"
        );
        assert_eq!(render(&parse("(a & b) | c").unwrap()), "((a & b) | c)");
    }

    #[test]
    fn reverse_examples() {
        let h = parse("a & b & c").unwrap();
        assert_eq!(h.reversed(), parse("c & b & a").unwrap());
        assert_eq!(ev("a").reversed(), ev("a"));
        let h = parse("a & (b1 | b2) & c").unwrap();
        assert_eq!(h.reversed(), parse("c & (b1 | b2) & a").unwrap());
        // Branches that are sequences reverse internally.
        let h = parse("x & ((a & b) | c)").unwrap();
        assert_eq!(h.reversed(), parse("((b & a) | c) & x").unwrap());
    }

    #[test]
    fn expand_double_slit_paths() {
        let h = parse("a & (b1 | b2) & c").unwrap();
        let paths = h.expand_paths();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].events(), ["a", "b1", "c"]);
        assert_eq!(paths[1].events(), ["a", "b2", "c"]);
    }

    #[test]
    fn expand_without_alternatives_is_single_path() {
        let h = parse("a & b").unwrap();
        let paths = h.expand_paths();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].events(), ["a", "b"]);
    }

    #[test]
    fn expand_two_slots_in_branch_order() {
        let h = parse("(a1 | a2) & (b1 | b2 | b3)").unwrap();
        let paths = h.expand_paths();
        let listed: Vec<String> = paths.iter().map(|p| p.to_string()).collect();
        assert_eq!(
            listed,
            vec!["a1 & b1", "a1 & b2", "a1 & b3", "a2 & b1", "a2 & b2", "a2 & b3"]
        );
        assert_eq!(h.path_count(), 6);
    }

    #[test]
    fn endpoints_of_sequences_and_atoms() {
        let h = parse("a & b & c").unwrap();
        let (first, last) = h.endpoints();
        assert_eq!(first, &ev("a"));
        assert_eq!(last, &ev("c"));

        let single = ev("a");
        let (first, last) = single.endpoints();
        assert_eq!(first, last);

        let h = parse("(a1 | a2) & b").unwrap();
        let (first, last) = h.endpoints();
        assert_eq!(first, &HistoryExpr::Alt(vec![ev("a1"), ev("a2")]));
        assert_eq!(last, &ev("b"));
        assert!(!h.has_elementary_endpoints());
    }

    #[test]
    fn path_display_round_trips_through_parse() {
        let p = ElementaryPath::new(vec!["a".into(), "b".into(), "c".into()]);
        assert_eq!(parse(&p.to_string()).unwrap(), p.to_history());
    }
}
