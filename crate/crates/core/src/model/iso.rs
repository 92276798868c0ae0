//! Fact-set isomorphism and embedding under entity renaming, by
//! backtracking over candidate entity pairs with signature pruning.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::term::{EntityBijection, EntityId, Literal, Substitution, Term};

/// Predicate/position occurrences of an entity: a renaming invariant.
type Signature = BTreeMap<(String, usize), usize>;

fn signatures(facts: &[Literal]) -> HashMap<EntityId, Signature> {
    let mut out: HashMap<EntityId, Signature> = HashMap::new();
    for f in facts {
        for (pos, a) in f.args.iter().enumerate() {
            a.visit_entities(&mut |e| {
                *out.entry(e).or_default().entry((f.predicate.clone(), pos)).or_default() += 1;
            });
        }
    }
    out
}

fn covers(big: &Signature, small: &Signature) -> bool {
    small.iter().all(|(k, n)| big.get(k).is_some_and(|m| m >= n))
}

struct Search<'a> {
    small: &'a [Literal],
    big: HashSet<Literal>,
    order: Vec<EntityId>,
    candidates: HashMap<EntityId, Vec<EntityId>>,
    /// Facts of `small` indexed by the position in `order` at which all
    /// their entities become assigned.
    ready: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&self, i: usize, map: &mut HashMap<EntityId, EntityId>, used: &mut HashSet<EntityId>) -> bool {
        if i == self.order.len() {
            return true;
        }
        let e = self.order[i];
        for &c in &self.candidates[&e] {
            if used.contains(&c) {
                continue;
            }
            map.insert(e, c);
            used.insert(c);
            let ok = self.ready[i].iter().all(|&fi| self.big.contains(&rename(&self.small[fi], map)));
            if ok && self.run(i + 1, map, used) {
                return true;
            }
            map.remove(&e);
            used.remove(&c);
        }
        false
    }
}

/// Rename binders to `_0`, `_1`, ... in traversal order so that
/// alpha-equivalent property arguments compare equal.
fn normalize_binders(t: &Term, next: &mut usize) -> Term {
    match t {
        Term::Lambda(p, body) | Term::Ref(p, body) => {
            let fresh = format!("_{next}");
            *next += 1;
            let renamed = Substitution::new().bind(p, &Term::var(&fresh)).expect("variable binding").apply(body);
            let body = Box::new(normalize_binders(&renamed, next));
            if matches!(t, Term::Lambda(..)) {
                Term::Lambda(fresh, body)
            } else {
                Term::Ref(fresh, body)
            }
        }
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| normalize_binders(a, next)).collect()),
        Term::App(a, b) => Term::app(normalize_binders(a, next), normalize_binders(b, next)),
        Term::Var(_) | Term::Const(_) | Term::Entity(_) => t.clone(),
    }
}

fn normalize(l: &Literal) -> Literal {
    let mut next = 0;
    Literal { args: l.args.iter().map(|a| normalize_binders(a, &mut next)).collect(), ..l.clone() }
}

fn rename(l: &Literal, map: &HashMap<EntityId, EntityId>) -> Literal {
    l.map_entities(&|e| Term::Entity(map.get(&e).copied().unwrap_or(e)))
}

fn search(small: &[Literal], big: &[Literal], exact: bool) -> Option<HashMap<EntityId, EntityId>> {
    let small_set: BTreeSet<Literal> = small.iter().map(normalize).collect();
    let small: Vec<Literal> = small_set.into_iter().collect();
    let big: Vec<Literal> = big.iter().map(normalize).collect();
    let big_set: HashSet<Literal> = big.iter().cloned().collect();
    if exact && small.len() != big_set.len() {
        return None;
    }
    let ss = signatures(&small);
    let bs = signatures(&big);
    if exact && ss.len() != bs.len() {
        return None;
    }
    // #user is a fixed point
    let mut candidates: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
    let mut big_entities: Vec<EntityId> = bs.keys().copied().collect();
    big_entities.sort();
    for (&e, sig) in &ss {
        let cs: Vec<EntityId> = if e == EntityId::User {
            if bs.get(&EntityId::User).is_some_and(|b| if exact { b == sig } else { covers(b, sig) }) {
                vec![EntityId::User]
            } else {
                vec![]
            }
        } else {
            big_entities
                .iter()
                .copied()
                .filter(|c| *c != EntityId::User)
                .filter(|c| if exact { bs[c] == *sig } else { covers(&bs[c], sig) })
                .collect()
        };
        if cs.is_empty() {
            return None;
        }
        candidates.insert(e, cs);
    }
    // most constrained first, then grow along shared facts
    let mut order: Vec<EntityId> = Vec::new();
    let mut remaining: BTreeSet<EntityId> = ss.keys().copied().collect();
    while !remaining.is_empty() {
        let connected = |e: &EntityId| {
            small.iter().any(|f| {
                let es = f.entities();
                es.contains(e) && es.iter().any(|x| order.contains(x))
            })
        };
        let next = remaining
            .iter()
            .copied()
            .min_by_key(|e| (!connected(e), candidates[e].len(), *e))
            .expect("non-empty");
        remaining.remove(&next);
        order.push(next);
    }
    let position: HashMap<EntityId, usize> = order.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut ready = vec![Vec::new(); order.len()];
    for (fi, f) in small.iter().enumerate() {
        match f.entities().iter().map(|e| position[e]).max() {
            Some(p) => ready[p].push(fi),
            None if !big_set.contains(f) => return None,
            None => {}
        }
    }
    let s = Search { small: &small, big: big_set, order, candidates, ready };
    let mut map = HashMap::new();
    s.run(0, &mut map, &mut HashSet::new()).then_some(map)
}

/// An entity bijection under which `a` and `b` are the same fact set.
pub fn isomorphism(a: &[Literal], b: &[Literal]) -> Option<EntityBijection> {
    let map = search(a, b, true)?;
    let mut bij = EntityBijection::new();
    for (x, y) in map {
        bij.link(x, y);
    }
    Some(bij)
}

/// An injective entity map sending every fact of `small` to a fact of `big`.
pub fn embed(small: &[Literal], big: &[Literal]) -> Option<BTreeMap<EntityId, EntityId>> {
    search(small, big, false).map(|m| m.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_literal;

    fn lits(src: &[&str]) -> Vec<Literal> {
        src.iter().map(|s| parse_literal(s).unwrap()).collect()
    }

    #[test]
    fn renamed_sets_are_isomorphic() {
        let a = lits(&["p(#1, #2)", "q(#2)", "own(#user, #1)"]);
        let b = lits(&["p(#7, #5)", "q(#5)", "own(#user, #7)"]);
        let bij = isomorphism(&a, &b).unwrap();
        assert_eq!(bij.get(EntityId::Fresh(1)), Some(EntityId::Fresh(7)));
    }

    #[test]
    fn structure_differences_are_detected() {
        let a = lits(&["p(#1, #2)", "q(#2)"]);
        let b = lits(&["p(#1, #2)", "q(#1)"]);
        assert!(isomorphism(&a, &b).is_none());
        assert!(isomorphism(&a, &lits(&["p(#1, #2)"])).is_none());
    }

    #[test]
    fn user_is_fixed() {
        let a = lits(&["own(#user, #1)"]);
        let b = lits(&["own(#3, #1)"]);
        assert!(isomorphism(&a, &b).is_none());
    }

    #[test]
    fn symmetric_structures_need_backtracking() {
        let a = lits(&["e(#1, #2)", "e(#2, #3)", "e(#3, #1)", "m(#1)"]);
        let b = lits(&["e(#9, #8)", "e(#8, #7)", "e(#7, #9)", "m(#8)"]);
        let bij = isomorphism(&a, &b).unwrap();
        assert_eq!(bij.get(EntityId::Fresh(1)), Some(EntityId::Fresh(8)));
        assert_eq!(bij.get(EntityId::Fresh(2)), Some(EntityId::Fresh(7)));
    }

    #[test]
    fn embedding_into_a_larger_set() {
        let small = lits(&["p(#1, #2)", "second(#2, lam(B, floor(B)))"]);
        let big = lits(&["p(#4, #5)", "second(#5, lam(X, floor(X)))", "r(#5)", "p(#6, #4)"]);
        let m = embed(&small, &big).unwrap();
        assert_eq!(m[&EntityId::Fresh(2)], EntityId::Fresh(5));
        assert!(embed(&big, &small).is_none());
    }
}
