use std::collections::BTreeMap;
use std::fmt;

use super::{alpha_equal, fresh_name, Term};

/// Finite map from variable names to terms, kept in solved form: no bound
/// variable occurs in any range term, so applying it once is enough.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    /// Bind `var` to `term`, keeping solved form. Fails the occurs check by
    /// returning `None`.
    pub fn bind(&self, var: &str, term: &Term) -> Option<Substitution> {
        let term = self.apply(term);
        if let Term::Var(v) = &term {
            if v == var {
                return Some(self.clone());
            }
        }
        if term.has_free_var(var) {
            return None;
        }
        let single = Substitution { bindings: BTreeMap::from([(var.to_string(), term.clone())]) };
        let mut bindings: BTreeMap<String, Term> = self.bindings.iter().map(|(k, v)| (k.clone(), single.apply(v))).collect();
        bindings.insert(var.to_string(), term);
        Some(Substitution { bindings })
    }

    /// Apply to free occurrences, renaming binders that would capture.
    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) | Term::Entity(_) => t.clone(),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
            Term::App(a, b) => Term::App(Box::new(self.apply(a)), Box::new(self.apply(b))),
            Term::Lambda(p, body) => {
                let (p, body) = self.apply_under_binder(p, body);
                Term::Lambda(p, Box::new(body))
            }
            Term::Ref(p, body) => {
                let (p, body) = self.apply_under_binder(p, body);
                Term::Ref(p, Box::new(body))
            }
        }
    }

    fn apply_under_binder(&self, param: &str, body: &Term) -> (String, Term) {
        let mut inner = self.clone();
        inner.bindings.remove(param);
        let captures = inner.bindings.iter().any(|(k, v)| body.has_free_var(k) && v.has_free_var(param));
        if !captures {
            return (param.to_string(), inner.apply(body));
        }
        let mut avoid = body.free_vars();
        for v in inner.bindings.values() {
            avoid.extend(v.free_vars());
        }
        avoid.insert(param.to_string());
        let renamed = fresh_name(param, &avoid);
        inner.bindings.insert(param.to_string(), Term::Var(renamed.clone()));
        (renamed, inner.apply(body))
    }

    /// Restrict to the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Substitution {
        let mut out = BTreeMap::new();
        for v in vars {
            if let Some(t) = self.bindings.get(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        Substitution { bindings: out }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        f.write_str("}")
    }
}

/// First-order unification extending `s`. Abstractions, applications and
/// referring terms only unify when alpha-equal after applying the bindings.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let a = s.apply(a);
    let b = s.apply(b);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => Some(s.clone()),
        (Term::Var(x), _) => s.bind(x, &b),
        (_, Term::Var(y)) => s.bind(y, &a),
        (Term::Const(x), Term::Const(y)) => (x == y).then(|| s.clone()),
        (Term::Entity(x), Term::Entity(y)) => (x == y).then(|| s.clone()),
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            if f != g || xs.len() != ys.len() {
                return None;
            }
            let mut acc = s.clone();
            for (x, y) in xs.iter().zip(ys) {
                acc = unify(x, y, &acc)?;
            }
            Some(acc)
        }
        (Term::Lambda(..), Term::Lambda(..)) | (Term::Ref(..), Term::Ref(..)) | (Term::App(..), Term::App(..)) => {
            alpha_equal(&a, &b).then(|| s.clone())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn binds_variable() {
        let s = unify(&t("X"), &t("office(#3228)"), &Substitution::new()).unwrap();
        assert_eq!(s.get("X"), Some(&t("office(#3228)")));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn occurs_check_fails() {
        assert!(unify(&t("X"), &t("f(X)"), &Substitution::new()).is_none());
        assert!(unify(&t("g(X, Y)"), &t("g(Y, f(X))"), &Substitution::new()).is_none());
    }

    #[test]
    fn mgu_of_nested_compounds() {
        let a = t("on(A, floor(B))");
        let b = t("on(office(#1), C)");
        let s = unify(&a, &b, &Substitution::new()).unwrap();
        assert_eq!(s.get("A"), Some(&t("office(#1)")));
        assert_eq!(s.get("C"), Some(&t("floor(B)")));
        assert_eq!(s.apply(&a), s.apply(&b));
    }

    #[test]
    fn functor_and_arity_clash() {
        assert!(unify(&t("p(a)"), &t("q(a)"), &Substitution::new()).is_none());
        assert!(unify(&t("p(a)"), &t("p(a, b)"), &Substitution::new()).is_none());
        assert!(unify(&t("#1"), &t("#2"), &Substitution::new()).is_none());
    }

    #[test]
    fn lambdas_unify_only_when_alpha_equal() {
        let s = Substitution::new();
        assert!(unify(&t("second(G, lam(H, floor(H)))"), &t("second(#3, lam(B, floor(B)))"), &s).is_some());
        assert!(unify(&t("lam(H, floor(H))"), &t("lam(H, room(H))"), &s).is_none());
    }

    #[test]
    fn binding_is_idempotent() {
        let s = unify(&t("p(X, Y, Z)"), &t("p(Y, Z, a)"), &Substitution::new()).unwrap();
        for (_, v) in s.iter() {
            assert_eq!(s.apply(v), *v);
        }
        assert_eq!(s.apply(&t("X")), t("a"));
    }

    #[test]
    fn apply_avoids_capture() {
        let s = Substitution::new().bind("Y", &t("X")).unwrap();
        let out = s.apply(&t("lam(X, p(X, Y))"));
        match out {
            Term::Lambda(p, body) => {
                assert_ne!(p, "X");
                assert_eq!(*body, Term::compound("p", vec![Term::Var(p.clone()), t("X")]));
            }
            other => panic!("unexpected {other}"),
        }
    }
}
