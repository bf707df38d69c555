//! The grammar DSL.
//!
//! ```text
//! # comments run to the end of the line
//! logic fo(k=2)                      # or folfp(k=3, k'=1), foterm(k=2, k1=0, k2=1)
//! vars x, y                          # optional; defaults to x, y, z, u, w, v
//! encoding core                      # or full; foterm defaults to full
//! signature { rel E/2; const s, t; fun head/1 }
//! defs { rel P/2; fun g/2 }          # definable symbols
//! start S                            # optional; defaults to the first left-hand side
//! S -> Or(S,S) | Exists[x](S) | Atom[E](x,y)
//!    | Not(S)                        # alternatives may continue on the next line
//! ```

use std::collections::BTreeMap;

use super::{GrammarError, Production, Rtg};
use crate::model::{logic::default_vars, Encoding, Logic, LogicKind, ModelError, Signature};
use crate::syntax::prefix::{tokenize, PatternParser, Tok, Token};
use crate::syntax::{pattern_to_prefix, Pattern, SyntaxError};

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).or_else(|| self.toks.last()).map_or((1, 1), |t| (t.line, t.col))
    }

    fn err(&self, msg: &str) -> GrammarError {
        let (l, c) = self.here();
        GrammarError::Syntax(SyntaxError::new(l, c, msg))
    }

    fn ident(&mut self) -> Result<String, GrammarError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn number(&mut self) -> Result<usize, GrammarError> {
        let at = self.here();
        let s = self.ident()?;
        s.parse().map_err(|_| GrammarError::Syntax(SyntaxError::new(at.0, at.1, "expected a number")))
    }

    fn eat(&mut self, ch: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(c)) if *c == ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<(), GrammarError> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{ch}`")))
        }
    }
}

#[derive(Default)]
struct Header {
    kind: Option<LogicKind>,
    params: BTreeMap<String, usize>,
    vars: Option<Vec<String>>,
    encoding: Option<Encoding>,
    sig: Signature,
    rel_defs: BTreeMap<String, usize>,
    fun_defs: BTreeMap<String, usize>,
    start: Option<String>,
}

pub fn parse_grammar(text: &str) -> Result<Rtg, GrammarError> {
    let toks = tokenize(text, 1).map_err(GrammarError::Syntax)?;
    // Nonterminals are the names directly followed by `->`.
    let nonterminals: Vec<String> = toks
        .windows(2)
        .filter_map(|w| match (&w[0].tok, &w[1].tok) {
            (Tok::Ident(n), Tok::Arrow) => Some(n.clone()),
            _ => None,
        })
        .collect();
    let mut cur = Cursor { toks: &toks, pos: 0 };
    let mut h = Header::default();
    let mut raw: Vec<(String, Pattern, (usize, usize))> = Vec::new();
    let is_hole = |n: &str| nonterminals.iter().any(|x| x == n);
    while cur.pos < toks.len() {
        let is_prod = matches!(toks.get(cur.pos + 1).map(|t| &t.tok), Some(Tok::Arrow));
        if is_prod {
            let lhs = cur.ident()?;
            cur.pos += 1;
            loop {
                let at = cur.here();
                if cur.pos >= toks.len() {
                    return Err(cur.err("empty right-hand side"));
                }
                // Constants must be declared before the productions that use them.
                let sig = h.sig.clone();
                let is_const = |n: &str| sig.is_constant(n);
                let mut p = PatternParser {
                    toks: &toks,
                    pos: cur.pos,
                    end: toks.last().map_or((1, 1), |t| (t.line, t.col + 1)),
                    is_hole: &is_hole,
                    is_constant: &is_const,
                };
                let rhs = p.pattern()?;
                cur.pos = p.pos;
                raw.push((lhs.clone(), rhs, at));
                if !cur.eat('|') {
                    break;
                }
            }
            continue;
        }
        let kw = cur.ident()?;
        match kw.as_str() {
            "logic" => parse_logic(&mut cur, &mut h)?,
            "vars" => {
                let mut vs = vec![cur.ident()?];
                while cur.eat(',') {
                    vs.push(cur.ident()?);
                }
                h.vars = Some(vs);
            }
            "encoding" => {
                let at = cur.here();
                h.encoding = Some(match cur.ident()?.as_str() {
                    "core" => Encoding::Core,
                    "full" => Encoding::Full,
                    other => {
                        return Err(GrammarError::Syntax(SyntaxError::new(
                            at.0,
                            at.1,
                            &format!("unknown encoding `{other}`"),
                        )))
                    }
                });
            }
            "signature" => parse_block(&mut cur, &mut h, false)?,
            "defs" => parse_block(&mut cur, &mut h, true)?,
            "start" => h.start = Some(cur.ident()?),
            other => {
                cur.pos -= 1;
                return Err(cur.err(&format!("unexpected `{other}`; expected a header or `NAME ->`")));
            }
        }
    }
    let kind = h.kind.ok_or_else(|| GrammarError::Syntax(SyntaxError::new(1, 1, "missing `logic` header")))?;
    let logic = build_logic(kind, &h)?;
    let mut sig = h.sig.clone();
    sig.partial_functions_allowed = kind == LogicKind::FoTerm;
    sig.validate().map_err(|e| GrammarError::Invalid { line: 1, col: 1, msg: e.to_string() })?;
    for n in &nonterminals {
        if logic.var_index(n).is_some() || sig.functions.contains_key(n) {
            return Err(GrammarError::Invalid {
                line: 1,
                col: 1,
                msg: format!("nonterminal `{n}` clashes with a variable or constant name"),
            });
        }
    }
    let mut productions = Vec::new();
    for (lhs, rhs, at) in raw {
        check_pattern(&logic, &sig, &rhs, at)?;
        productions.push(Production { lhs, rhs });
    }
    let axiom = match h.start {
        Some(s) => {
            if !nonterminals.contains(&s) {
                return Err(GrammarError::Invalid {
                    line: 1,
                    col: 1,
                    msg: format!("start symbol `{s}` has no productions"),
                });
            }
            s
        }
        None => productions
            .first()
            .map(|p| p.lhs.clone())
            .ok_or_else(|| GrammarError::Syntax(SyntaxError::new(1, 1, "no productions")))?,
    };
    Ok(Rtg { logic, signature: sig, axiom, productions })
}

fn parse_logic(cur: &mut Cursor, h: &mut Header) -> Result<(), GrammarError> {
    let at = cur.here();
    h.kind = Some(match cur.ident()?.as_str() {
        "fo" => LogicKind::Fo,
        "folfp" => LogicKind::FoLfp,
        "foterm" => LogicKind::FoTerm,
        other => return Err(GrammarError::Syntax(SyntaxError::new(at.0, at.1, &format!("unknown logic `{other}`")))),
    });
    if cur.eat('(') {
        loop {
            let key = cur.ident()?;
            cur.expect('=')?;
            let val = cur.number()?;
            h.params.insert(key, val);
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
    }
    Ok(())
}

fn parse_block(cur: &mut Cursor, h: &mut Header, defs: bool) -> Result<(), GrammarError> {
    cur.expect('{')?;
    loop {
        if cur.eat('}') {
            return Ok(());
        }
        let at = cur.here();
        let kind = cur.ident()?;
        loop {
            let name = cur.ident()?;
            let arity = if kind == "const" {
                0
            } else {
                cur.expect('/')?;
                cur.number()?
            };
            let target = match (defs, kind.as_str()) {
                (false, "rel") => &mut h.sig.relations,
                (false, "fun") | (false, "const") => &mut h.sig.functions,
                (true, "rel") => &mut h.rel_defs,
                (true, "fun") => &mut h.fun_defs,
                _ => {
                    return Err(GrammarError::Syntax(SyntaxError::new(
                        at.0,
                        at.1,
                        &format!("unexpected `{kind}` in block"),
                    )))
                }
            };
            if target.insert(name.clone(), arity).is_some() {
                return Err(GrammarError::Invalid { line: at.0, col: at.1, msg: format!("`{name}` declared twice") });
            }
            if !cur.eat(',') {
                break;
            }
        }
        cur.eat(';');
    }
}

fn build_logic(kind: LogicKind, h: &Header) -> Result<Logic, GrammarError> {
    let invalid = |msg: String| GrammarError::Invalid { line: 1, col: 1, msg };
    let known: &[&str] = match kind {
        LogicKind::Fo => &["k"],
        LogicKind::FoLfp => &["k", "k'"],
        LogicKind::FoTerm => &["k", "k'", "k1", "k2"],
    };
    for key in h.params.keys() {
        if !known.contains(&key.as_str()) {
            return Err(invalid(format!("unknown logic parameter `{key}`")));
        }
    }
    let vars = match (&h.vars, h.params.get("k")) {
        (Some(vs), Some(&k)) if vs.len() != k => {
            return Err(invalid(format!("k={k} but {} variables declared", vs.len())))
        }
        (Some(vs), _) => vs.clone(),
        (None, Some(&k)) => default_vars(k),
        (None, None) => return Err(invalid("logic needs k".into())),
    };
    let check_count = |key: &str, n: usize| -> Result<(), GrammarError> {
        match h.params.get(key) {
            Some(&v) if v != n => Err(invalid(format!("{key}={v} but {n} definitions declared"))),
            _ => Ok(()),
        }
    };
    match kind {
        LogicKind::Fo => {
            if !h.rel_defs.is_empty() || !h.fun_defs.is_empty() {
                return Err(invalid("fo has no definable symbols".into()));
            }
        }
        LogicKind::FoLfp => {
            if !h.fun_defs.is_empty() {
                return Err(invalid("folfp has no definable functions".into()));
            }
            check_count("k'", h.rel_defs.len())?;
        }
        LogicKind::FoTerm => {
            check_count("k1", h.rel_defs.len())?;
            check_count("k2", h.fun_defs.len())?;
            check_count("k'", h.rel_defs.len() + h.fun_defs.len())?;
        }
    }
    let encoding = h.encoding.unwrap_or(if kind == LogicKind::FoTerm { Encoding::Full } else { Encoding::Core });
    Ok(Logic { kind, vars, rel_defs: h.rel_defs.clone(), fun_defs: h.fun_defs.clone(), encoding })
}

fn check_pattern(logic: &Logic, sig: &Signature, p: &Pattern, at: (usize, usize)) -> Result<(), GrammarError> {
    if let Pattern::Node(sym, kids) = p {
        logic.check_symbol(sig, sym).map_err(|e| match e {
            ModelError::UnknownSymbol(name) => GrammarError::UnknownSymbol { line: at.0, col: at.1, name },
            ModelError::ArityMismatch { symbol, expected, found } => {
                GrammarError::ArityMismatch { line: at.0, col: at.1, symbol, expected, found }
            }
            other => GrammarError::Invalid { line: at.0, col: at.1, msg: other.to_string() },
        })?;
        for k in kids {
            check_pattern(logic, sig, k, at)?;
        }
    }
    Ok(())
}

/// Canonical text: header lines, then one production per line in order.
pub fn print_grammar(g: &Rtg) -> String {
    let l = &g.logic;
    let mut out = String::new();
    let k = l.k();
    let header = match l.kind {
        LogicKind::Fo => format!("logic fo(k={k})"),
        LogicKind::FoLfp => format!("logic folfp(k={k}, k'={})", l.rel_defs.len()),
        LogicKind::FoTerm => format!("logic foterm(k={k}, k1={}, k2={})", l.rel_defs.len(), l.fun_defs.len()),
    };
    out.push_str(&header);
    out.push('\n');
    out.push_str(&format!("vars {}\n", l.vars.join(", ")));
    out.push_str(match l.encoding {
        Encoding::Core => "encoding core\n",
        Encoding::Full => "encoding full\n",
    });
    let sig = &g.signature;
    let mut items = Vec::new();
    if !sig.relations.is_empty() {
        items.push(format!(
            "rel {}",
            sig.relations.iter().map(|(n, a)| format!("{n}/{a}")).collect::<Vec<_>>().join(", ")
        ));
    }
    let consts: Vec<&str> = sig.constants().collect();
    if !consts.is_empty() {
        items.push(format!("const {}", consts.join(", ")));
    }
    let funs: Vec<String> = sig.functions.iter().filter(|(_, &a)| a > 0).map(|(n, a)| format!("{n}/{a}")).collect();
    if !funs.is_empty() {
        items.push(format!("fun {}", funs.join(", ")));
    }
    out.push_str(&format!("signature {{ {} }}\n", items.join("; ")));
    let mut defs = Vec::new();
    if !l.rel_defs.is_empty() {
        defs.push(format!("rel {}", l.rel_defs.iter().map(|(n, a)| format!("{n}/{a}")).collect::<Vec<_>>().join(", ")));
    }
    if !l.fun_defs.is_empty() {
        defs.push(format!("fun {}", l.fun_defs.iter().map(|(n, a)| format!("{n}/{a}")).collect::<Vec<_>>().join(", ")));
    }
    if !defs.is_empty() {
        out.push_str(&format!("defs {{ {} }}\n", defs.join("; ")));
    }
    out.push_str(&format!("start {}\n", g.axiom));
    for p in &g.productions {
        out.push_str(&format!("{} -> {}\n", p.lhs, pattern_to_prefix(&p.rhs)));
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const FIG4: &str = "\
# Fig 4 style grammar over one binary relation
logic fo(k=2)
signature { rel E/2 }
S -> Or(S,S) | And(S,S) | Not(S)
   | Exists[x](S) | Forall[x](S) | Exists[y](S) | Forall[y](S)
   | Atom[E](x,x) | Atom[E](x,y) | Atom[E](y,x) | Atom[E](y,y)
";

    #[test]
    fn parses_fig4() {
        let g = parse_grammar(FIG4).unwrap();
        assert_eq!(g.nonterminals(), vec!["S".to_string()]);
        assert_eq!(g.productions.len(), 11);
        assert_eq!(g.logic.vars, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn printer_round_trips() {
        let g = parse_grammar(FIG4).unwrap();
        let text = print_grammar(&g);
        assert_eq!(parse_grammar(&text).unwrap(), g);
        assert_eq!(print_grammar(&parse_grammar(&text).unwrap()), text);
    }

    #[test]
    fn rejects_bad_input() {
        let e = parse_grammar("logic fo(k=2)\nsignature { rel E/2 }\nS -> ").unwrap_err();
        assert!(matches!(e, GrammarError::Syntax(_)), "{e:?}");
        let e = parse_grammar("logic fo(k=2)\nsignature { rel E/2 }\nS -> And(S)").unwrap_err();
        assert!(matches!(e, GrammarError::ArityMismatch { line: 3, .. }), "{e:?}");
        let e = parse_grammar("logic fo(k=2)\nsignature { rel E/2 }\nS -> Atom[F](x,y)").unwrap_err();
        assert!(matches!(e, GrammarError::UnknownSymbol { .. }), "{e:?}");
        let e = parse_grammar("logic fo(k=2)\nsignature { rel E/2 }\nS -> Atom[E](x)").unwrap_err();
        assert!(matches!(e, GrammarError::ArityMismatch { .. }), "{e:?}");
        let e = parse_grammar("logic fo(k=2)\nsignature { rel E/2 }\nS -> Exists[z](S) | Atom[E](x,y)").unwrap_err();
        assert!(matches!(e, GrammarError::UnknownSymbol { .. }), "{e:?}");
    }

    #[test]
    fn parses_lfp_and_term_headers() {
        let g = parse_grammar(
            "logic folfp(k=3, k'=1)\nsignature { rel E/2 }\ndefs { rel P/2 }\n\
             S -> LetRel[P](x,y)(B, C)\nB -> Or(B,B) | Atom[E](x,y) | UseRel[P](x,y)\nC -> Forall[x](C) | UseRel[P](x,x)",
        )
        .unwrap();
        assert_eq!(g.nonterminals().len(), 3);
        assert_eq!(g.logic.rel_defs.get("P"), Some(&2));
        assert_eq!(parse_grammar(&print_grammar(&g)).unwrap(), g);

        let t = parse_grammar(
            "logic foterm(k=2, k1=0, k2=1)\nsignature { const nil, in1; fun tail/1; rel lt/2 }\ndefs { fun g/1 }\n\
             T -> LetFun[g](x)(B, UseFun[g](Const[in1]))\n\
             B -> Ite(Eq(Var[x], Const[nil]), Const[nil], UseFun[g](Func[tail](Var[x])))",
        )
        .unwrap();
        assert_eq!(t.logic.encoding, Encoding::Full);
        assert!(t.signature.partial_functions_allowed);
        assert_eq!(parse_grammar(&print_grammar(&t)).unwrap(), t);
    }
}
