//! Just enough s-expression reading for `get-value` responses.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

pub fn parse(text: &str) -> Result<Sexp, String> {
    let mut chars = text.chars().peekable();
    let value = parse_one(&mut chars)?;
    skip_ws(&mut chars);
    match chars.next() {
        None => Ok(value),
        Some(c) => Err(format!("trailing input at {c:?}")),
    }
}

type Chars<'a> = std::iter::Peekable<std::str::Chars<'a>>;

fn skip_ws(chars: &mut Chars<'_>) {
    while chars.peek().is_some_and(|c| c.is_whitespace()) {
        chars.next();
    }
}

fn parse_one(chars: &mut Chars<'_>) -> Result<Sexp, String> {
    skip_ws(chars);
    match chars.next() {
        None => Err("unexpected end of input".into()),
        Some(')') => Err("unexpected ')'".into()),
        Some('(') => {
            let mut items = Vec::new();
            loop {
                skip_ws(chars);
                match chars.peek() {
                    None => return Err("unclosed '('".into()),
                    Some(')') => {
                        chars.next();
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_one(chars)?),
                }
            }
        }
        Some('|') => {
            let mut atom = String::new();
            loop {
                match chars.next() {
                    None => return Err("unclosed '|'".into()),
                    Some('|') => return Ok(Sexp::Atom(atom)),
                    Some(c) => atom.push(c),
                }
            }
        }
        Some('"') => {
            let mut atom = String::new();
            loop {
                match chars.next() {
                    None => return Err("unclosed string".into()),
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        atom.push('"');
                    }
                    Some('"') => return Ok(Sexp::Atom(atom)),
                    Some(c) => atom.push(c),
                }
            }
        }
        Some(c) => {
            let mut atom = String::from(c);
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                atom.push(c);
                chars.next();
            }
            Ok(Sexp::Atom(atom))
        }
    }
}

/// Net parenthesis depth of `line`, ignoring quoted symbols and strings.
pub fn depth_change(line: &str) -> i64 {
    let mut depth = 0;
    let mut quote = None;
    for c in line.chars() {
        match (quote, c) {
            (None, '|' | '"') => quote = Some(c),
            (Some(q), c) if c == q => quote = None,
            (None, '(') => depth += 1,
            (None, ')') => depth -= 1,
            _ => {}
        }
    }
    depth
}

/// A bit-vector literal: `#x..`, `#b..` or `(_ bvN w)`.
pub fn bv_value(e: &Sexp) -> Option<u64> {
    match e {
        Sexp::Atom(a) => {
            if let Some(hex) = a.strip_prefix("#x") {
                u64::from_str_radix(hex, 16).ok()
            } else if let Some(bin) = a.strip_prefix("#b") {
                u64::from_str_radix(bin, 2).ok()
            } else {
                None
            }
        }
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(u), Sexp::Atom(n), Sexp::Atom(_)] if u == "_" => n.strip_prefix("bv")?.parse().ok(),
            _ => None,
        },
    }
}
