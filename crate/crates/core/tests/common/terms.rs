//! Term generators, a de Bruijn reference reducer, brute-force ground
//! unifiers, and the term-core properties checked against them.

use std::collections::BTreeSet;

use prepdiag_core::term::{alpha_equal, beta_reduce_with_limit, contract_nth, count_redexes, unify, EntityId, Substitution, Term};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 1000;
pub const FUEL: usize = 200;

pub fn first_order() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
        (1u64..3).prop_map(|n| Term::Entity(EntityId::Fresh(n))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::compound("f", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::compound("g", vec![a, b])),
        ]
    })
}

pub fn lambda_term() -> impl Strategy<Value = Term> {
    let names = || prop::sample::select(vec!["X", "Y", "Z"]);
    let leaf = prop_oneof![names().prop_map(Term::var), Just(Term::constant("c")), Just(Term::Entity(EntityId::User))];
    leaf.prop_recursive(5, 24, 2, move |inner| {
        prop_oneof![
            (names(), inner.clone()).prop_map(|(x, b)| Term::lambda(x, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (names(), inner.clone(), inner.clone()).prop_map(|(x, b, a)| Term::app(Term::lambda(x, b), a)),
            inner.clone().prop_map(|t| Term::compound("p", vec![t])),
            (names(), inner).prop_map(|(x, b)| Term::reference(x, b)),
        ]
    })
}

// ---- reference lambda calculus over de Bruijn indices ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Db {
    Bound(usize),
    Free(String),
    Atom(Term),
    Node(String, Vec<Db>),
    Lam(Box<Db>),
    Ref(Box<Db>),
    App(Box<Db>, Box<Db>),
}

pub fn to_db(t: &Term, env: &mut Vec<String>) -> Db {
    match t {
        Term::Var(x) => match env.iter().rposition(|n| n == x) {
            Some(i) => Db::Bound(env.len() - 1 - i),
            None => Db::Free(x.clone()),
        },
        Term::Const(_) | Term::Entity(_) => Db::Atom(t.clone()),
        Term::Compound(f, args) => Db::Node(f.clone(), args.iter().map(|a| to_db(a, env)).collect()),
        Term::Lambda(x, b) | Term::Ref(x, b) => {
            env.push(x.clone());
            let body = Box::new(to_db(b, env));
            env.pop();
            if matches!(t, Term::Lambda(..)) {
                Db::Lam(body)
            } else {
                Db::Ref(body)
            }
        }
        Term::App(f, a) => Db::App(Box::new(to_db(f, env)), Box::new(to_db(a, env))),
    }
}

fn shift(d: &Db, by: isize, cutoff: usize) -> Db {
    match d {
        Db::Bound(k) if *k >= cutoff => Db::Bound((*k as isize + by) as usize),
        Db::Bound(_) | Db::Free(_) | Db::Atom(_) => d.clone(),
        Db::Node(f, args) => Db::Node(f.clone(), args.iter().map(|a| shift(a, by, cutoff)).collect()),
        Db::Lam(b) => Db::Lam(Box::new(shift(b, by, cutoff + 1))),
        Db::Ref(b) => Db::Ref(Box::new(shift(b, by, cutoff + 1))),
        Db::App(f, a) => Db::App(Box::new(shift(f, by, cutoff)), Box::new(shift(a, by, cutoff))),
    }
}

fn subst(d: &Db, j: usize, s: &Db) -> Db {
    match d {
        Db::Bound(k) if *k == j => s.clone(),
        Db::Bound(_) | Db::Free(_) | Db::Atom(_) => d.clone(),
        Db::Node(f, args) => Db::Node(f.clone(), args.iter().map(|a| subst(a, j, s)).collect()),
        Db::Lam(b) => Db::Lam(Box::new(subst(b, j + 1, &shift(s, 1, 0)))),
        Db::Ref(b) => Db::Ref(Box::new(subst(b, j + 1, &shift(s, 1, 0)))),
        Db::App(f, a) => Db::App(Box::new(subst(f, j, s)), Box::new(subst(a, j, s))),
    }
}

/// One leftmost-outermost step.
fn step(d: &Db) -> Option<Db> {
    match d {
        Db::App(f, a) => {
            if let Db::Lam(b) = &**f {
                return Some(shift(&subst(b, 0, &shift(a, 1, 0)), -1, 0));
            }
            step(f).map(|f| Db::App(Box::new(f), a.clone())).or_else(|| step(a).map(|a| Db::App(f.clone(), Box::new(a))))
        }
        Db::Lam(b) => step(b).map(|b| Db::Lam(Box::new(b))),
        Db::Ref(b) => step(b).map(|b| Db::Ref(Box::new(b))),
        Db::Node(f, args) => {
            for (i, a) in args.iter().enumerate() {
                if let Some(r) = step(a) {
                    let mut args = args.clone();
                    args[i] = r;
                    return Some(Db::Node(f.clone(), args));
                }
            }
            None
        }
        _ => None,
    }
}

pub fn reference_normal_form(t: &Term) -> Option<Db> {
    let mut d = to_db(t, &mut Vec::new());
    for _ in 0..=FUEL {
        match step(&d) {
            Some(next) => d = next,
            None => return Some(d),
        }
    }
    None
}

/// Rename every binder to a name used nowhere else.
pub fn rename_binders(t: &Term, counter: &mut usize) -> Term {
    match t {
        Term::Lambda(x, b) | Term::Ref(x, b) => {
            *counter += 1;
            let fresh = format!("R{counter}");
            let body = rename_binders(&replace_free(b, x, &fresh), counter);
            if matches!(t, Term::Lambda(..)) {
                Term::lambda(fresh, body)
            } else {
                Term::reference(fresh, body)
            }
        }
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| rename_binders(a, counter)).collect()),
        Term::App(f, a) => Term::app(rename_binders(f, counter), rename_binders(a, counter)),
        _ => t.clone(),
    }
}

fn replace_free(t: &Term, x: &str, y: &str) -> Term {
    match t {
        Term::Var(v) if v == x => Term::var(y),
        Term::Lambda(v, _) | Term::Ref(v, _) if v == x => t.clone(),
        Term::Lambda(v, b) => Term::lambda(v.clone(), replace_free(b, x, y)),
        Term::Ref(v, b) => Term::reference(v.clone(), replace_free(b, x, y)),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| replace_free(a, x, y)).collect()),
        Term::App(f, a) => Term::app(replace_free(f, x, y), replace_free(a, x, y)),
        _ => t.clone(),
    }
}

// ---- brute-force ground unifiers ----

pub fn ground_terms() -> Vec<Term> {
    let atoms = vec![Term::constant("a"), Term::constant("b"), Term::Entity(EntityId::Fresh(1))];
    let mut out = atoms.clone();
    out.extend(atoms.iter().map(|x| Term::compound("f", vec![x.clone()])));
    for x in &atoms {
        for y in &atoms {
            out.push(Term::compound("g", vec![x.clone(), y.clone()]));
        }
    }
    out
}

pub fn groundings(vars: &[String], domain: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out.iter().flat_map(|s| domain.iter().map(move |t| s.bind(v, t).unwrap())).collect();
    }
    out
}

// ---- the properties, shared by the proptest suite and the acceptance run ----

pub fn unifiers_equate_and_are_idempotent(a: &Term, b: &Term) -> Result<(), TestCaseError> {
    if let Some(s) = unify(a, b, &Substitution::new()) {
        prop_assert_eq!(s.apply(a), s.apply(b));
        prop_assert_eq!(s.apply(&s.apply(a)), s.apply(a));
    }
    prop_assert_eq!(unify(a, b, &Substitution::new()).is_some(), unify(b, a, &Substitution::new()).is_some());
    Ok(())
}

pub fn unifiers_are_most_general(a: &Term, b: &Term) -> Result<(), TestCaseError> {
    let vars: Vec<String> = a.free_vars().union(&b.free_vars()).cloned().collect();
    let domain = ground_terms();
    let mgu = unify(a, b, &Substitution::new());
    for g in groundings(&vars, &domain) {
        if g.apply(a) == g.apply(b) {
            let Some(s) = mgu.as_ref() else {
                return Err(TestCaseError::fail("a ground unifier exists but unification failed"));
            };
            for v in &vars {
                prop_assert_eq!(g.apply(&s.apply(&Term::var(v.clone()))), g.apply(&Term::var(v.clone())));
            }
        }
    }
    Ok(())
}

pub fn occurs_check_rejects_cyclic_bindings(t: &Term) -> Result<(), TestCaseError> {
    if t.has_free_var("X") && *t != Term::var("X") {
        prop_assert!(unify(&Term::var("X"), t, &Substitution::new()).is_none());
    }
    Ok(())
}

/// Terms whose reduction runs out of fuel on either side are skipped.
pub fn normal_forms_match_the_reference(t: &Term) -> Result<(), TestCaseError> {
    let (Ok(ours), Some(reference)) = (beta_reduce_with_limit(t, FUEL), reference_normal_form(t)) else {
        return Ok(());
    };
    prop_assert_eq!(count_redexes(&ours), 0);
    prop_assert_eq!(to_db(&ours, &mut Vec::new()), reference);
    Ok(())
}

/// Contract any one redex of `(lam x. b) a` first, then normalize.
pub fn reduction_order_does_not_matter(x: &str, b: &Term, a: &Term, pick: usize) -> Result<(), TestCaseError> {
    let t = Term::app(Term::lambda(x, b.clone()), a.clone());
    let n = count_redexes(&t);
    let first = contract_nth(&t, pick % n).ok_or_else(|| TestCaseError::fail("redex vanished"))?;
    if let (Ok(direct), Ok(detour)) = (beta_reduce_with_limit(&t, FUEL), beta_reduce_with_limit(&first, FUEL)) {
        prop_assert!(alpha_equal(&direct, &detour));
    }
    Ok(())
}

pub fn alpha_equivalence_is_an_equivalence(t: &Term, u: &Term) -> Result<(), TestCaseError> {
    let mut counter = 0;
    let t1 = rename_binders(t, &mut counter);
    let t2 = rename_binders(&t1, &mut counter);
    prop_assert!(alpha_equal(t, t));
    prop_assert!(alpha_equal(t, &t1) && alpha_equal(&t1, t));
    prop_assert!(alpha_equal(&t1, &t2) && alpha_equal(t, &t2));
    prop_assert_eq!(alpha_equal(t, u), alpha_equal(u, t));
    prop_assert_eq!(alpha_equal(t, u), to_db(t, &mut Vec::new()) == to_db(u, &mut Vec::new()));
    Ok(())
}

pub fn renaming_binders_keeps_free_variables(t: &Term) -> Result<(), TestCaseError> {
    let renamed = rename_binders(t, &mut 0);
    let free: BTreeSet<String> = t.free_vars();
    prop_assert_eq!(renamed.free_vars(), free);
    Ok(())
}
