//! Reader and writer for the line-oriented KB format.
//!
//! ```text
//! partition physical.
//! type human < physical.
//! equiv on ~ Ely.
//! rule on_rule (en): all B C: [on(B, C)] ... => touching(H, I), located(B, C).
//! word floor (en): type physical, embedding2 orientable.
//! ```
//!
//! A conclusion may hold several `;`-separated groups, each with its own
//! `some` witnesses. `#` starts a comment; a `# plumbing` comment marks the
//! next rule as a support rule.

use std::fmt;

use super::{Consequent, GuardedRule, KbError, KnowledgeBase, RuleKind, RuleLanguage, RuleNode};
use crate::lattice::TypeLattice;
use crate::term::{Literal, ParseError, Term, TermReader};

/// Blank out comments (keeping offsets stable) and return the offsets of
/// `# plumbing` markers.
pub(crate) fn strip_comments(src: &str) -> (String, Vec<usize>) {
    let mut out = String::with_capacity(src.len());
    let mut markers = Vec::new();
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        match line.find('#') {
            Some(i) => {
                if line[i + 1..].trim() == "plumbing" {
                    markers.push(offset + i);
                }
                out.push_str(&line[..i]);
                for c in line[i..].chars() {
                    if c == '\n' {
                        out.push('\n');
                    } else {
                        out.extend(std::iter::repeat_n(' ', c.len_utf8()));
                    }
                }
            }
            None => out.push_str(line),
        }
        offset += line.len();
    }
    (out, markers)
}

pub(crate) fn parse_kb(source: &str) -> Result<KnowledgeBase, KbError> {
    let (clean, markers) = strip_comments(source);
    let mut r = TermReader::new(&clean);
    let mut lattice = TypeLattice::new();
    let mut rules = Vec::new();
    let mut equivalences = Vec::new();
    let mut last_end = 0;
    while !r.at_end() {
        let start = r.position();
        let plumbing = markers.iter().any(|&m| m >= last_end && m < start);
        let keyword = r.ident().ok_or_else(|| r.error("expected a declaration"))?;
        match keyword.as_str() {
            "partition" => {
                let name = name(&mut r)?;
                r.expect('.')?;
                lattice.add_partition(&name).map_err(|e| r.error(e.to_string()))?;
            }
            "type" => {
                let child = name(&mut r)?;
                r.expect('<')?;
                let parent = name(&mut r)?;
                r.expect('.')?;
                lattice.add_subtype(&child, &parent).map_err(|e| r.error(e.to_string()))?;
            }
            "equiv" => {
                let a = name(&mut r)?;
                r.expect('~')?;
                let b = name(&mut r)?;
                r.expect('.')?;
                equivalences.push((a, b));
            }
            "rule" => {
                let rule_name = name(&mut r)?;
                let language = rule_language(&mut r)?;
                r.expect(':')?;
                let body = block(&mut r)?;
                let kind = if plumbing { RuleKind::Plumbing } else { RuleKind::Postulate };
                rules.push(GuardedRule { name: rule_name, language, kind, body });
            }
            "word" => {
                let word = name(&mut r)?;
                let language = rule_language(&mut r)?;
                if language == RuleLanguage::Both {
                    return Err(r.error("word declarations are language specific").into());
                }
                r.expect(':')?;
                let body = word_body(&mut r, &word)?;
                rules.push(GuardedRule { name: format!("word_{word}"), language, kind: RuleKind::Word, body });
            }
            other => return Err(r.error(format!("unknown declaration '{other}'")).into()),
        }
        last_end = r.position();
    }
    KnowledgeBase::assemble(rules, lattice, equivalences)
}

fn name(r: &mut TermReader<'_>) -> Result<String, ParseError> {
    r.ident().ok_or_else(|| r.error("expected a name"))
}

fn rule_language(r: &mut TermReader<'_>) -> Result<RuleLanguage, ParseError> {
    r.expect('(')?;
    let lang = match name(r)?.as_str() {
        "en" => RuleLanguage::En,
        "ar" => RuleLanguage::Ar,
        "both" => RuleLanguage::Both,
        other => return Err(r.error(format!("unknown language '{other}'"))),
    };
    r.expect(')')?;
    Ok(lang)
}

fn literal(r: &mut TermReader<'_>) -> Result<Literal, ParseError> {
    let t = r.term()?;
    match &t {
        Term::Compound(..) | Term::Const(_) => Ok(Literal::from_term(&t).expect("compound")),
        other => Err(r.error(format!("expected a literal, found {other}"))),
    }
}

fn literal_list(r: &mut TermReader<'_>) -> Result<Vec<Literal>, ParseError> {
    let mut out = vec![literal(r)?];
    while r.eat(',') {
        out.push(literal(r)?);
    }
    Ok(out)
}

fn var_list(r: &mut TermReader<'_>) -> Result<Vec<String>, ParseError> {
    let mut vars = Vec::new();
    loop {
        r.eat(',');
        r.skip_ws();
        if r.peek() == Some(':') {
            break;
        }
        let v = name(r)?;
        if !v.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(r.error(format!("'{v}' is not a variable")));
        }
        vars.push(v);
    }
    if vars.is_empty() {
        return Err(r.error("expected at least one variable"));
    }
    r.expect(':')?;
    Ok(vars)
}

fn block(r: &mut TermReader<'_>) -> Result<RuleNode, ParseError> {
    let save = r.position();
    if r.ident().as_deref() == Some("all") {
        let vars = var_list(r)?;
        r.expect('[')?;
        let guard = literal_list(r)?;
        r.expect(']')?;
        let child = block(r)?;
        return Ok(RuleNode::ForAll { vars, guard, child: Box::new(child) });
    }
    r.rewind(save);
    let mut groups = Vec::new();
    loop {
        r.expect('=')?;
        r.expect('>')?;
        let save = r.position();
        let existentials = match r.ident() {
            Some(k) if k == "some" && r.peek() != Some('(') => var_list(r)?,
            _ => {
                r.rewind(save);
                Vec::new()
            }
        };
        let literals = literal_list(r)?;
        groups.push(Consequent { existentials, literals });
        if r.eat(';') {
            continue;
        }
        r.expect('.')?;
        return Ok(RuleNode::Conclude(groups));
    }
}

const WORD_VAR: &str = "B";

fn word_body(r: &mut TermReader<'_>, word: &str) -> Result<RuleNode, ParseError> {
    let b = Term::var(WORD_VAR);
    let mut groups = Vec::new();
    let mut next_witness = b'C';
    loop {
        let save = r.position();
        let item = name(r)?;
        if r.peek() == Some('(') {
            r.rewind(save);
            let l = literal(r)?;
            groups.push(Consequent { existentials: Vec::new(), literals: vec![l] });
        } else if item == "type" {
            let t = name(r)?;
            groups.push(Consequent { existentials: Vec::new(), literals: vec![Literal::new("type", vec![b.clone(), Term::constant(t)])] });
        } else if let Some(n) = item.strip_prefix("embedding").filter(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_digit())) {
            let w = (next_witness as char).to_string();
            next_witness += 1;
            let mut literals = vec![Literal::new("embedding", vec![Term::var(&w), b.clone(), Term::constant(format!("r{n}"))])];
            let save = r.position();
            if r.ident().as_deref() == Some("orientable") {
                literals.push(Literal::new("orientable", vec![Term::var(&w)]));
            } else {
                r.rewind(save);
            }
            groups.push(Consequent { existentials: vec![w], literals });
        } else {
            return Err(r.error(format!("unknown word feature '{item}'")));
        }
        if r.eat(',') {
            continue;
        }
        r.expect('.')?;
        break;
    }
    Ok(RuleNode::ForAll {
        vars: vec![WORD_VAR.to_string()],
        guard: vec![Literal::new(word, vec![b])],
        child: Box::new(RuleNode::Conclude(groups)),
    })
}

fn join(lits: &[Literal]) -> String {
    lits.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Render a word rule back into sugar, if its shape allows.
fn word_sugar(rule: &GuardedRule) -> Option<String> {
    let RuleNode::ForAll { vars, guard, child } = &rule.body else { return None };
    let RuleNode::Conclude(groups) = &**child else { return None };
    if vars.len() != 1 || guard.len() != 1 || guard[0].args != [Term::var(&vars[0])] || vars[0] != WORD_VAR {
        return None;
    }
    let b = Term::var(WORD_VAR);
    let mut items = Vec::new();
    for g in groups {
        match (g.existentials.as_slice(), g.literals.as_slice()) {
            ([], [l]) if l.predicate == "type" && l.args.len() == 2 && l.args[0] == b && matches!(l.args[1], Term::Const(_)) => {
                items.push(format!("type {}", l.args[1]));
            }
            ([], [l]) if l.free_vars().iter().all(|v| v == WORD_VAR) => items.push(l.to_string()),
            ([w], [emb, rest @ ..]) if emb.predicate == "embedding" && emb.args.len() == 3 && emb.args[0] == Term::var(w) && emb.args[1] == b => {
                let Term::Const(space) = &emb.args[2] else { return None };
                let n = space.strip_prefix('r')?;
                match rest {
                    [] => items.push(format!("embedding{n}")),
                    [o] if o.predicate == "orientable" && o.args == [Term::var(w)] => items.push(format!("embedding{n} orientable")),
                    _ => return None,
                }
            }
            _ => return None,
        }
    }
    Some(format!("word {} ({}): {}.", guard[0].predicate, rule.language, items.join(", ")))
}

pub(crate) fn write_kb(f: &mut fmt::Formatter<'_>, kb: &KnowledgeBase) -> fmt::Result {
    for p in kb.lattice().partitions() {
        writeln!(f, "partition {p}.")?;
    }
    for (child, parent) in kb.lattice().subtypes() {
        writeln!(f, "type {child} < {parent}.")?;
    }
    for (a, b) in kb.equivalences() {
        writeln!(f, "equiv {a} ~ {b}.")?;
    }
    for rule in kb.rules() {
        if rule.kind == RuleKind::Word {
            if let Some(s) = word_sugar(rule) {
                writeln!(f, "{s}")?;
                continue;
            }
        }
        if rule.kind == RuleKind::Plumbing {
            writeln!(f, "# plumbing")?;
        }
        write!(f, "rule {} ({}):", rule.name, rule.language)?;
        let (blocks, groups) = rule.body.blocks();
        for (vars, guard) in blocks {
            write!(f, "\n  all {}: [{}]", vars.join(" "), join(guard))?;
        }
        for (i, g) in groups.iter().enumerate() {
            f.write_str(if i == 0 { "\n  => " } else { ";\n  => " })?;
            if !g.existentials.is_empty() {
                write!(f, "some {}: ", g.existentials.join(" "))?;
            }
            f.write_str(&join(&g.literals))?;
        }
        writeln!(f, ".")?;
    }
    Ok(())
}
