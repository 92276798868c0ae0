//! CKY chart with unary closure. The chart is packed: an edge is added at
//! most once per (span, category, semantics).

use std::collections::HashSet;

use crate::term::Term;

use super::{reduce, Category, Grammar, GrammarError, Lexicon, Sign};

struct Edge {
    span: (usize, usize),
    category: Category,
    rule: &'static str,
    semantics: Term,
    word: Option<String>,
    children: Vec<usize>,
}

#[derive(Default)]
struct Chart {
    edges: Vec<Edge>,
    /// cell[i][j] holds the edges spanning tokens i..j.
    cells: Vec<Vec<Vec<usize>>>,
    seen: HashSet<((usize, usize), Category, String)>,
}

impl Chart {
    fn new(n: usize) -> Chart {
        Chart { cells: vec![vec![Vec::new(); n + 1]; n + 1], ..Chart::default() }
    }

    fn add(&mut self, edge: Edge) -> bool {
        let key = (edge.span, edge.category, edge.semantics.to_string());
        if !self.seen.insert(key) {
            return false;
        }
        let (i, j) = edge.span;
        self.cells[i][j].push(self.edges.len());
        self.edges.push(edge);
        true
    }

    fn close_unary(&mut self, grammar: &Grammar, i: usize, j: usize) -> Result<(), GrammarError> {
        let mut k = 0;
        while k < self.cells[i][j].len() {
            let id = self.cells[i][j][k];
            for schema in &grammar.schemas {
                let e = &self.edges[id];
                if let Some((category, sem)) = schema.unary(&grammar.constraints, (&e.category, &e.semantics)) {
                    let semantics = reduce(sem)?;
                    self.add(Edge { span: (i, j), category, rule: schema.name(), semantics, word: None, children: vec![id] });
                }
            }
            k += 1;
        }
        Ok(())
    }

    fn sign(&self, id: usize) -> Sign {
        let e = &self.edges[id];
        Sign {
            span: e.span,
            category: e.category,
            rule: e.rule.to_string(),
            semantics: e.semantics.clone(),
            word: e.word.clone(),
            children: e.children.iter().map(|&c| self.sign(c)).collect(),
        }
    }
}

pub(super) fn parse(grammar: &Grammar, tokens: &[String], lexicon: &Lexicon) -> Result<Vec<Sign>, GrammarError> {
    let n = tokens.len();
    let mut chart = Chart::new(n);
    for (i, token) in tokens.iter().enumerate() {
        let mut found = false;
        for entry in lexicon.lookup(grammar.language, token) {
            found = true;
            chart.add(Edge {
                span: (i, i + 1),
                category: Category::plain(entry.category.into()),
                rule: "lex",
                semantics: entry.semantics.clone(),
                word: Some(token.clone()),
                children: Vec::new(),
            });
        }
        if !found {
            return Err(GrammarError::UnknownWord { token: token.clone(), language: grammar.language });
        }
        chart.close_unary(grammar, i, i + 1)?;
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len;
            for k in i + 1..j {
                let lefts = chart.cells[i][k].clone();
                let rights = chart.cells[k][j].clone();
                for &l in &lefts {
                    for &r in &rights {
                        for schema in &grammar.schemas {
                            let (le, re) = (&chart.edges[l], &chart.edges[r]);
                            let Some((category, sem)) =
                                schema.binary(&grammar.constraints, (&le.category, &le.semantics), (&re.category, &re.semantics))
                            else {
                                continue;
                            };
                            let semantics = reduce(sem)?;
                            chart.add(Edge { span: (i, j), category, rule: schema.name(), semantics, word: None, children: vec![l, r] });
                        }
                    }
                }
            }
            chart.close_unary(grammar, i, j)?;
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(chart.cells[0][n]
        .iter()
        .filter(|&&id| chart.edges[id].category.cat == super::Cat::Utt)
        .map(|&id| chart.sign(id))
        .collect())
}
