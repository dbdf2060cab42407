//! Readers for ground programs, DIMACS CNF, and query files.
//!
//! ASP text grammar:
//!
//! ```text
//! statement := [atom] [":-" [literal {"," literal}]] "."
//! literal   := atom | "not" atom
//! atom      := name ["(" args ")"]        % args kept as an opaque token
//! ```
//!
//! `%` starts a line comment. Whitespace inside argument lists is dropped, so
//! `p(1, 2)` and `p(1,2)` name the same atom.

use std::fmt;

use thiserror::Error;

use crate::program::{Atom, AtomSet, Program, ProgramError, Rule, FALSE_ATOM_NAME};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    AspText,
    DimacsCnf,
}

impl SourceFormat {
    /// A leading `p cnf` header (after comments) selects DIMACS.
    pub fn detect(text: &str) -> SourceFormat {
        let first = text
            .lines()
            .map(str::trim)
            .find(|line| !line.is_empty() && !is_dimacs_comment(line));
        match first {
            Some(line) if line.split_whitespace().take(2).eq(["p", "cnf"]) => {
                SourceFormat::DimacsCnf
            }
            _ => SourceFormat::AspText,
        }
    }
}

fn is_dimacs_comment(line: &str) -> bool {
    line == "c" || line.starts_with("c ") || line.starts_with("c\t")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl fmt::Display) -> Self {
        ParseError {
            line,
            column,
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(String),
    Not,
    If,
    Comma,
    Dot,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.char_indices().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl fmt::Display) -> ParseError {
        ParseError::new(self.line, self.column, message)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Next token with its starting position.
    fn next_token(&mut self) -> Result<Option<(Token, usize, usize)>, ParseError> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let token = match c {
            ',' => {
                self.bump();
                Token::Comma
            }
            '.' => {
                self.bump();
                Token::Dot
            }
            ':' => {
                self.bump();
                if self.peek() != Some('-') {
                    return Err(self.error("expected `:-`"));
                }
                self.bump();
                Token::If
            }
            c if is_name_start(c) => {
                let name = self.atom()?;
                if name == "not" {
                    Token::Not
                } else {
                    Token::Atom(name)
                }
            }
            other => return Err(self.error(format!("unexpected character `{other}`"))),
        };
        Ok(Some((token, line, column)))
    }

    fn atom(&mut self) -> Result<String, ParseError> {
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() == Some('(') {
            self.arguments(&mut name)?;
        }
        Ok(name)
    }

    fn arguments(&mut self, out: &mut String) -> Result<(), ParseError> {
        let (line, column) = (self.line, self.column);
        let mut depth = 0usize;
        let mut in_string = false;
        let mut empty = true;
        while let Some(c) = self.bump() {
            if in_string {
                out.push(c);
                match c {
                    '\\' => {
                        if let Some(escaped) = self.bump() {
                            out.push(escaped);
                        }
                    }
                    '"' => in_string = false,
                    '\n' => return Err(self.error("unterminated string in atom arguments")),
                    _ => {}
                }
                continue;
            }
            match c {
                '(' => {
                    depth += 1;
                    out.push(c);
                }
                ')' => {
                    if depth == 1 && empty {
                        return Err(ParseError::new(line, column, "empty argument list"));
                    }
                    depth -= 1;
                    out.push(c);
                    if depth == 0 {
                        return Ok(());
                    }
                }
                '"' => {
                    in_string = true;
                    empty = false;
                    out.push(c);
                }
                '%' => return Err(self.error("comment inside atom arguments")),
                c if c.is_whitespace() => {}
                c if c.is_alphanumeric() || "_-+',.*/#".contains(c) => {
                    empty = false;
                    out.push(c);
                }
                other => {
                    return Err(self.error(format!("unexpected character `{other}` in atom arguments")))
                }
            }
        }
        Err(ParseError::new(line, column, "unbalanced parenthesis in atom"))
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Parses ground rules in the text grammar above.
pub fn parse_asp(text: &str) -> Result<Program, ParseError> {
    let mut program = Program::new();
    parse_asp_into(text, &mut program)?;
    Ok(program)
}

fn parse_asp_into(text: &str, program: &mut Program) -> Result<(), ParseError> {
    let mut lexer = Lexer::new(text);
    let mut intern = |name: &str, line: usize, column: usize| -> Result<Atom, ParseError> {
        program
            .intern(name)
            .map_err(|e| ParseError::new(line, column, e))
    };
    let mut rules = Vec::new();

    loop {
        let Some((first, line, column)) = lexer.next_token()? else {
            break;
        };
        let mut head = Atom::FALSE;
        let mut next = Some((first, line, column));
        if let Some((Token::Atom(name), l, c)) = &next {
            head = intern(name, *l, *c)?;
            next = lexer.next_token()?;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        match next {
            Some((Token::Dot, ..)) if !head.is_false() => {}
            Some((Token::If, ..)) => {
                let mut expect_literal = true;
                let mut first_literal = true;
                loop {
                    let Some((token, l, c)) = lexer.next_token()? else {
                        return Err(lexer.error("unexpected end of input, expected `.`"));
                    };
                    match token {
                        Token::Dot if !expect_literal || first_literal => break,
                        Token::Comma if !expect_literal => expect_literal = true,
                        Token::Atom(name) if expect_literal => {
                            pos.push(intern(&name, l, c)?);
                            expect_literal = false;
                        }
                        Token::Not if expect_literal => match lexer.next_token()? {
                            Some((Token::Atom(name), l, c)) => {
                                neg.push(intern(&name, l, c)?);
                                expect_literal = false;
                            }
                            Some((Token::Not, l, c)) => {
                                return Err(ParseError::new(
                                    l,
                                    c,
                                    "nested negation `not not` is not supported",
                                ))
                            }
                            Some((_, l, c)) => {
                                return Err(ParseError::new(l, c, "expected atom after `not`"))
                            }
                            None => return Err(lexer.error("expected atom after `not`")),
                        },
                        _ => {
                            let what = if expect_literal {
                                "expected literal"
                            } else {
                                "expected `,` or `.`"
                            };
                            return Err(ParseError::new(l, c, what));
                        }
                    }
                    first_literal = false;
                }
            }
            Some((_, l, c)) => {
                let what = if head.is_false() {
                    "expected atom or `:-`"
                } else {
                    "expected `:-` or `.`"
                };
                return Err(ParseError::new(l, c, what));
            }
            None => return Err(lexer.error("unexpected end of input, expected `.`")),
        }
        rules.push(Rule::new(head, pos, neg));
    }

    for rule in rules {
        program
            .add_rule(rule)
            .expect("parser only builds rules over interned atoms");
    }
    Ok(())
}

/// Name of the atom standing for variable `i` being true.
pub fn true_atom_name(var: usize) -> String {
    format!("t{var}")
}

/// Name of the atom standing for variable `i` being false.
pub fn false_atom_name(var: usize) -> String {
    format!("f{var}")
}

/// Reads a DIMACS CNF and encodes it as a program whose stable models are the
/// classical models of the formula: `t_i :- not f_i.`, `f_i :- not t_i.` for
/// each variable and one constraint per clause forbidding all of its literals
/// from being false. Tautological clauses are dropped.
pub fn parse_dimacs(text: &str) -> Result<Program, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_pos = (1, 1);

    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || is_dimacs_comment(trimmed.trim_end()) {
            continue;
        }
        if trimmed.starts_with('%') {
            // SATLIB end marker
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::new(line_no, 1, "duplicate `p cnf` header"));
            }
            let words: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match words.as_slice() {
                ["p", "cnf", v, c] => v.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some(h) => header = Some(h),
                None => {
                    return Err(ParseError::new(
                        line_no,
                        1,
                        "malformed header, expected `p cnf <vars> <clauses>`",
                    ))
                }
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(ParseError::new(line_no, 1, "clause before `p cnf` header"));
        };
        let mut column = 1;
        for word in line.split_inclusive(char::is_whitespace) {
            let token = word.trim();
            let token_column = column + (word.len() - word.trim_start().len());
            column += word.chars().count();
            if token.is_empty() {
                continue;
            }
            let lit: i64 = token.parse().map_err(|_| {
                ParseError::new(line_no, token_column, format!("invalid literal `{token}`"))
            })?;
            last_pos = (line_no, token_column);
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(ParseError::new(
                    line_no,
                    token_column,
                    format!("literal {lit} out of range 1..={num_vars}"),
                ));
            } else {
                current.push(lit);
            }
        }
    }

    let Some((num_vars, num_clauses)) = header else {
        return Err(ParseError::new(1, 1, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(ParseError::new(last_pos.0, last_pos.1, "clause not terminated by 0"));
    }
    if clauses.len() != num_clauses {
        return Err(ParseError::new(
            last_pos.0,
            last_pos.1,
            format!(
                "header declares {num_clauses} clauses but {} were found",
                clauses.len()
            ),
        ));
    }

    let mut program = Program::new();
    let mut t = Vec::with_capacity(num_vars + 1);
    let mut f = Vec::with_capacity(num_vars + 1);
    t.push(Atom::FALSE);
    f.push(Atom::FALSE);
    for i in 1..=num_vars {
        t.push(program.intern(&true_atom_name(i)).expect("valid name"));
        f.push(program.intern(&false_atom_name(i)).expect("valid name"));
    }
    for i in 1..=num_vars {
        program.add_rule(Rule::new(t[i], [], [f[i]])).expect("interned");
        program.add_rule(Rule::new(f[i], [], [t[i]])).expect("interned");
    }
    for clause in clauses {
        let tautology = clause.iter().any(|l| clause.contains(&-l));
        if tautology {
            continue;
        }
        let body = clause.iter().map(|&l| {
            let v = l.unsigned_abs() as usize;
            if l > 0 {
                f[v]
            } else {
                t[v]
            }
        });
        program
            .add_rule(Rule::constraint(body, []))
            .expect("interned");
    }
    Ok(program)
}

/// Reads one atom name per line. Names unknown to `program` are interned and
/// end up as atoms without defining rules.
pub fn parse_query(text: &str, program: &mut Program) -> Result<AtomSet, ParseError> {
    let mut query = AtomSet::new();
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let content = line.split('%').next().unwrap_or("");
        let name = content.trim();
        if name.is_empty() {
            continue;
        }
        let column = content.len() - content.trim_start().len() + 1;
        if name == FALSE_ATOM_NAME || name == "⊥" {
            return Err(ParseError::new(
                line_no,
                column,
                ProgramError::ReservedName(name.to_string()),
            ));
        }
        let mut lexer = Lexer::new(name);
        lexer.line = line_no;
        lexer.column = column;
        let atom_name = match lexer.next_token()? {
            Some((Token::Atom(n), ..)) => n,
            _ => return Err(ParseError::new(line_no, column, "expected an atom name")),
        };
        if let Some((_, l, c)) = lexer.next_token()? {
            return Err(ParseError::new(l, c, "expected one atom per line"));
        }
        let atom = program
            .intern(&atom_name)
            .map_err(|e| ParseError::new(line_no, column, e))?;
        query.insert(atom);
    }
    Ok(query)
}
