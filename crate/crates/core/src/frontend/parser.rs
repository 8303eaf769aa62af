//! Recursive-descent parser and elaborator for `.pbs` modules.

use std::collections::HashMap;

use num_complex::Complex64;

use super::lexer::{lex, Tok, Token};
use super::{Binding, FrontendError, SourceModule, KEYWORDS};
use crate::diagram::{Diagram, GateElement, IDENTITY_NAME};
use crate::linalg::CMatrix;

#[derive(Debug, Clone)]
struct Expr {
    kind: ExprKind,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
enum ExprKind {
    Empty,
    Id,
    Neg,
    Swap,
    Pbs,
    Gate(String),
    Trace(Box<Expr>),
    Ref(String),
    Seq(Vec<Expr>),
    Par(Vec<Expr>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, expected: &str) -> FrontendError {
        FrontendError::Syntax {
            line: t.line,
            col: t.col,
            message: format!("expected {expected}, found {}", t.tok.describe()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, FrontendError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.error(&t, what))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == word)
    }

    fn name(&mut self) -> Result<(String, Token), FrontendError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s.clone(), t.clone())),
            _ => Err(self.error(&t, "a name")),
        }
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        let first = self.term()?;
        let (line, col) = (first.line, first.col);
        let mut items = vec![first];
        while self.peek().tok == Tok::Semi {
            self.next();
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr {
                kind: ExprKind::Seq(items),
                line,
                col,
            }
        })
    }

    fn term(&mut self) -> Result<Expr, FrontendError> {
        let first = self.factor()?;
        let (line, col) = (first.line, first.col);
        let mut items = vec![first];
        while self.peek().tok == Tok::Amp {
            self.next();
            items.push(self.factor()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr {
                kind: ExprKind::Par(items),
                line,
                col,
            }
        })
    }

    fn factor(&mut self) -> Result<Expr, FrontendError> {
        let t = self.next();
        let kind = match &t.tok {
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(inner);
            }
            Tok::Ident(s) => match s.as_str() {
                "id" => ExprKind::Id,
                "neg" => ExprKind::Neg,
                "swap" => ExprKind::Swap,
                "pbs" => ExprKind::Pbs,
                "empty" => ExprKind::Empty,
                "gate" => {
                    let nt = self.next();
                    match &nt.tok {
                        Tok::Ident(g) if g == IDENTITY_NAME || !KEYWORDS.contains(&g.as_str()) => {
                            ExprKind::Gate(g.clone())
                        }
                        _ => return Err(self.error(&nt, "a gate name")),
                    }
                }
                "tr" => {
                    self.expect(Tok::LParen, "`(` after `tr`")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    ExprKind::Trace(Box::new(inner))
                }
                k if KEYWORDS.contains(&k) => return Err(self.error(&t, "a diagram expression")),
                name => ExprKind::Ref(name.to_string()),
            },
            _ => return Err(self.error(&t, "a diagram expression")),
        };
        Ok(Expr {
            kind,
            line: t.line,
            col: t.col,
        })
    }

    fn real(&mut self) -> Result<Option<f64>, FrontendError> {
        match self.peek().tok {
            Tok::Number(x) => {
                self.next();
                Ok(Some(x))
            }
            _ => Ok(None),
        }
    }

    fn imaginary_unit(&mut self) -> bool {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "i") {
            self.next();
            true
        } else {
            false
        }
    }

    /// `[sign] FLOAT [(+|-) FLOAT i]`, also accepting a lone imaginary part.
    fn complex(&mut self) -> Result<Complex64, FrontendError> {
        let start = self.peek().clone();
        let sign = self.sign().unwrap_or(1.0);
        let first = self.real()?;
        if self.imaginary_unit() {
            return Ok(Complex64::new(0.0, sign * first.unwrap_or(1.0)));
        }
        let Some(re) = first else {
            return Err(self.error(&start, "a number"));
        };
        let re = sign * re;
        let Some(isign) = self.sign() else {
            return Ok(Complex64::new(re, 0.0));
        };
        let im = self.real()?;
        if !self.imaginary_unit() {
            let t = self.peek().clone();
            return Err(self.error(&t, "`i` after the imaginary part"));
        }
        Ok(Complex64::new(re, isign * im.unwrap_or(1.0)))
    }

    fn sign(&mut self) -> Option<f64> {
        match self.peek().tok {
            Tok::Plus => {
                self.next();
                Some(1.0)
            }
            Tok::Minus => {
                self.next();
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn matrix(&mut self) -> Result<CMatrix, FrontendError> {
        let open = self.expect(Tok::LBracket, "`[`")?;
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        loop {
            self.expect(Tok::LBracket, "`[` starting a row")?;
            let mut row = vec![self.complex()?];
            while self.peek().tok == Tok::Comma {
                self.next();
                row.push(self.complex()?);
            }
            self.expect(Tok::RBracket, "`]` closing a row")?;
            rows.push(row);
            if self.peek().tok != Tok::Comma {
                break;
            }
            self.next();
        }
        self.expect(Tok::RBracket, "`]` closing the matrix")?;
        let bad = |message: String| FrontendError::Matrix {
            line: open.line,
            col: open.col,
            message,
        };
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(bad(format!("{n} rows but a row of length {}", r.len())));
        }
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(bad("non-finite entry".into()));
        }
        CMatrix::from_rows(&rows).map_err(|e| bad(e.to_string()))
    }
}

enum Item {
    Binding(Binding),
    Definition(Expr),
}

/// Parses and elaborates a module. All definitions are checked, so an
/// ill-typed definition fails the whole module even if it is never used.
pub fn parse(text: &str) -> Result<SourceModule, FrontendError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut items: Vec<(String, Token, Item)> = Vec::new();
    let mut dim: Option<usize> = None;
    while p.peek().tok != Tok::Eof {
        let t = p.peek().clone();
        let item = if p.is_keyword("sym") {
            p.next();
            let (name, nt) = p.name()?;
            (name, nt, Item::Binding(Binding::Symbolic))
        } else if p.is_keyword("let") {
            p.next();
            let (name, nt) = p.name()?;
            p.expect(Tok::Eq, "`=`")?;
            let m = p.matrix()?;
            match dim {
                Some(q) if q != m.rows() => {
                    return Err(FrontendError::Matrix {
                        line: nt.line,
                        col: nt.col,
                        message: format!("dimension {} differs from earlier bindings ({q})", m.rows()),
                    })
                }
                _ => dim = Some(m.rows()),
            }
            (name, nt, Item::Binding(Binding::Matrix(m)))
        } else if p.is_keyword("def") {
            p.next();
            let (name, nt) = p.name()?;
            p.expect(Tok::Eq, "`=`")?;
            (name, nt, Item::Definition(p.expr()?))
        } else {
            return Err(p.error(&t, "`let`, `sym` or `def`"));
        };
        if item.0 == IDENTITY_NAME {
            return Err(FrontendError::Syntax {
                line: item.1.line,
                col: item.1.col,
                message: format!("`{IDENTITY_NAME}` is reserved for the identity gate"),
            });
        }
        if items.iter().any(|(n, _, _)| *n == item.0) {
            return Err(FrontendError::Duplicate {
                line: item.1.line,
                col: item.1.col,
                name: item.0,
            });
        }
        items.push(item);
    }
    Elaborator::new(&items).run()
}

struct Elaborator<'a> {
    items: &'a [(String, Token, Item)],
    index: HashMap<&'a str, usize>,
    done: HashMap<usize, (Diagram, usize)>,
    active: Vec<usize>,
}

impl<'a> Elaborator<'a> {
    fn new(items: &'a [(String, Token, Item)]) -> Self {
        let index = items.iter().enumerate().map(|(i, (n, _, _))| (n.as_str(), i)).collect();
        Elaborator {
            items,
            index,
            done: HashMap::new(),
            active: Vec::new(),
        }
    }

    fn run(mut self) -> Result<SourceModule, FrontendError> {
        let mut module = SourceModule::default();
        for (i, (name, _, item)) in self.items.iter().enumerate() {
            match item {
                Item::Binding(b) => module.bindings.push((name.clone(), b.clone())),
                Item::Definition(_) => {
                    let (d, _) = self.definition(i)?;
                    module.definitions.push((name.clone(), d));
                    module.entry = Some(name.clone());
                }
            }
        }
        Ok(module)
    }

    fn definition(&mut self, i: usize) -> Result<(Diagram, usize), FrontendError> {
        if let Some(done) = self.done.get(&i) {
            return Ok(done.clone());
        }
        let (name, tok, item) = &self.items[i];
        let Item::Definition(expr) = item else {
            unreachable!("definition index refers to a binding")
        };
        if self.active.contains(&i) {
            return Err(FrontendError::Recursive {
                line: tok.line,
                col: tok.col,
                name: name.clone(),
            });
        }
        self.active.push(i);
        let result = self.expr(expr);
        self.active.pop();
        let result = result?;
        self.done.insert(i, result.clone());
        Ok(result)
    }

    fn gate(&self, name: &str, e: &Expr) -> Result<GateElement, FrontendError> {
        if name == IDENTITY_NAME {
            return Ok(GateElement::identity_symbol());
        }
        match self.index.get(name).map(|&i| &self.items[i].2) {
            Some(Item::Binding(Binding::Matrix(m))) => Ok(GateElement::annotated(name, m.clone())),
            Some(Item::Binding(Binding::Symbolic)) => Ok(GateElement::symbol(name)),
            Some(Item::Definition(_)) => Err(FrontendError::WrongKind {
                line: e.line,
                col: e.col,
                name: name.to_string(),
                expected: "gate",
                found: "definition",
            }),
            None => Err(FrontendError::Undefined {
                line: e.line,
                col: e.col,
                name: name.to_string(),
            }),
        }
    }

    /// Elaborates `e` to a diagram and its arity.
    fn expr(&mut self, e: &Expr) -> Result<(Diagram, usize), FrontendError> {
        Ok(match &e.kind {
            ExprKind::Empty => (Diagram::Empty, 0),
            ExprKind::Id => (Diagram::Wire, 1),
            ExprKind::Neg => (Diagram::Neg, 1),
            ExprKind::Swap => (Diagram::Swap, 2),
            ExprKind::Pbs => (Diagram::Pbs, 2),
            ExprKind::Gate(name) => (Diagram::Gate(self.gate(name, e)?), 1),
            ExprKind::Trace(inner) => {
                let (d, n) = self.expr(inner)?;
                if n == 0 {
                    return Err(FrontendError::EmptyTrace {
                        line: e.line,
                        col: e.col,
                    });
                }
                (Diagram::trace(d), n - 1)
            }
            ExprKind::Ref(name) => match self.index.get(name.as_str()).copied() {
                Some(i) if matches!(self.items[i].2, Item::Definition(_)) => {
                    self.definition(i).map_err(|err| match err {
                        FrontendError::Recursive { name: n, .. } if n == *name => FrontendError::Recursive {
                            line: e.line,
                            col: e.col,
                            name: n,
                        },
                        other => other,
                    })?
                }
                Some(_) => {
                    return Err(FrontendError::WrongKind {
                        line: e.line,
                        col: e.col,
                        name: name.clone(),
                        expected: "definition",
                        found: "gate",
                    })
                }
                None => {
                    return Err(FrontendError::Undefined {
                        line: e.line,
                        col: e.col,
                        name: name.clone(),
                    })
                }
            },
            ExprKind::Seq(items) => {
                let (mut acc, n) = self.expr(&items[0])?;
                for item in &items[1..] {
                    let (d, m) = self.expr(item)?;
                    if m != n {
                        return Err(FrontendError::Arity {
                            line: item.line,
                            col: item.col,
                            left: n,
                            right: m,
                        });
                    }
                    acc = acc.then(d);
                }
                (acc, n)
            }
            ExprKind::Par(items) => {
                let mut parts = Vec::with_capacity(items.len());
                let mut n = 0;
                for item in items {
                    let (d, m) = self.expr(item)?;
                    parts.push(d);
                    n += m;
                }
                (Diagram::par(parts), n)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{flatten, qs_builder};

    #[test]
    fn quantum_switch_term() {
        let m = parse("sym U sym V def qs = tr( pbs ; (gate U & gate V) ; pbs ; swap )").unwrap();
        let qs = qs_builder(GateElement::symbol("U"), GateElement::symbol("V"));
        assert_eq!(flatten(m.definition("qs").unwrap()), flatten(&qs));
        assert_eq!(m.entry.as_deref(), Some("qs"));
    }

    #[test]
    fn wire_definition() {
        let m = parse("def w = id").unwrap();
        assert_eq!(m.definition("w"), Some(&Diagram::Wire));
    }

    #[test]
    fn arity_mismatch_is_located() {
        let e = parse("def bad = id ; swap").unwrap_err();
        assert_eq!(
            e,
            FrontendError::Arity {
                line: 1,
                col: 16,
                left: 1,
                right: 2
            }
        );
        assert!(e.to_string().contains("1 vs 2"));
    }

    #[test]
    fn semicolon_is_dataflow_order() {
        let m = parse("sym A sym B def d = gate A ; gate B").unwrap();
        let expect = Diagram::compose(Diagram::sym("B"), Diagram::sym("A"));
        assert_eq!(m.definition("d"), Some(&expect));
    }

    #[test]
    fn ampersand_binds_tighter() {
        let m = parse("def d = neg & id ; pbs").unwrap();
        let expect = Diagram::tensor(Diagram::Neg, Diagram::Wire).then(Diagram::Pbs);
        assert_eq!(m.definition("d"), Some(&expect));
    }

    #[test]
    fn references_are_inlined() {
        let m = parse("def n2 = neg ; neg\ndef d = n2 & n2").unwrap();
        let nn = Diagram::seq([Diagram::Neg, Diagram::Neg]);
        assert_eq!(m.definition("d"), Some(&Diagram::tensor(nn.clone(), nn)));
    }

    #[test]
    fn matrix_literals() {
        let m = parse("let X = [[0, 1], [-1.5e-3 + 2i, -i]]").unwrap();
        let Some(Binding::Matrix(x)) = m.binding("X") else {
            panic!("missing binding")
        };
        assert_eq!(x[(1, 0)], Complex64::new(-1.5e-3, 2.0));
        assert_eq!(x[(1, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(x[(0, 1)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn annotated_gates_carry_matrices() {
        let m = parse("let X = [[0, 1], [1, 0]] def d = gate X ; gate I").unwrap();
        let gates = m.definition("d").unwrap().gates();
        assert!(gates[0].1.dim() == Some(2) || gates[1].1.dim() == Some(2));
    }

    #[test]
    fn name_errors() {
        assert!(matches!(
            parse("def a = gate U"),
            Err(FrontendError::Undefined { line: 1, col: 9, .. })
        ));
        assert!(matches!(parse("def a = b"), Err(FrontendError::Undefined { .. })));
        assert!(matches!(
            parse("sym U\ndef U = id"),
            Err(FrontendError::Duplicate { line: 2, col: 5, .. })
        ));
        assert!(matches!(
            parse("def a = b\ndef b = a"),
            Err(FrontendError::Recursive { .. })
        ));
        assert!(matches!(parse("def a = a"), Err(FrontendError::Recursive { .. })));
        assert!(matches!(parse("sym U def a = U"), Err(FrontendError::WrongKind { .. })));
    }

    #[test]
    fn syntax_errors_are_located() {
        let e = parse("def a = id ;\n  ; neg").unwrap_err();
        assert_eq!(e.location(), (2, 3));
        assert!(matches!(
            parse("def a = tr(empty)"),
            Err(FrontendError::EmptyTrace { .. })
        ));
        assert!(matches!(parse("let A = [[1, 2]]"), Err(FrontendError::Matrix { .. })));
        assert!(matches!(
            parse("let A = [[1]] let B = [[1,0],[0,1]]"),
            Err(FrontendError::Matrix { .. })
        ));
    }
}
