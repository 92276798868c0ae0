use super::{fresh_name, Term};

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BetaError {
    #[error("beta reduction did not terminate within {0} steps (malformed semantic annotation?)")]
    StepLimit(usize),
}

/// Normal-order reduction to beta-normal form with the default step cap.
pub fn beta_reduce(t: &Term) -> Result<Term, BetaError> {
    beta_reduce_with_limit(t, DEFAULT_STEP_LIMIT)
}

pub fn beta_reduce_with_limit(t: &Term, limit: usize) -> Result<Term, BetaError> {
    let mut current = t.clone();
    let mut steps = 0;
    while let Some(next) = contract_nth(&current, 0) {
        steps += 1;
        if steps > limit {
            return Err(BetaError::StepLimit(limit));
        }
        current = next;
    }
    Ok(current)
}

/// Number of redexes in `t`, counted in pre-order.
pub fn count_redexes(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) | Term::Entity(_) => 0,
        Term::Compound(_, args) => args.iter().map(count_redexes).sum(),
        Term::Lambda(_, b) | Term::Ref(_, b) => count_redexes(b),
        Term::App(f, a) => usize::from(matches!(**f, Term::Lambda(..))) + count_redexes(f) + count_redexes(a),
    }
}

/// Contract the `n`-th redex in pre-order (0 is leftmost-outermost).
pub fn contract_nth(t: &Term, n: usize) -> Option<Term> {
    let mut remaining = n;
    contract_at(t, &mut remaining)
}

fn contract_at(t: &Term, remaining: &mut usize) -> Option<Term> {
    match t {
        Term::Var(_) | Term::Const(_) | Term::Entity(_) => None,
        Term::Compound(f, args) => {
            for (i, a) in args.iter().enumerate() {
                if let Some(r) = contract_at(a, remaining) {
                    let mut args = args.clone();
                    args[i] = r;
                    return Some(Term::Compound(f.clone(), args));
                }
            }
            None
        }
        Term::Lambda(p, b) => contract_at(b, remaining).map(|b| Term::Lambda(p.clone(), Box::new(b))),
        Term::Ref(p, b) => contract_at(b, remaining).map(|b| Term::Ref(p.clone(), Box::new(b))),
        Term::App(f, a) => {
            if let Term::Lambda(p, body) = &**f {
                if *remaining == 0 {
                    return Some(substitute(body, p, a));
                }
                *remaining -= 1;
            }
            if let Some(f2) = contract_at(f, remaining) {
                return Some(Term::App(Box::new(f2), a.clone()));
            }
            contract_at(a, remaining).map(|a2| Term::App(f.clone(), Box::new(a2)))
        }
    }
}

/// Capture-avoiding `body[var := value]`.
fn substitute(body: &Term, var: &str, value: &Term) -> Term {
    match body {
        Term::Var(v) if v == var => value.clone(),
        Term::Var(_) | Term::Const(_) | Term::Entity(_) => body.clone(),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| substitute(a, var, value)).collect()),
        Term::App(f, a) => Term::App(Box::new(substitute(f, var, value)), Box::new(substitute(a, var, value))),
        Term::Lambda(p, b) => {
            let (p, b) = substitute_binder(p, b, var, value);
            Term::Lambda(p, Box::new(b))
        }
        Term::Ref(p, b) => {
            let (p, b) = substitute_binder(p, b, var, value);
            Term::Ref(p, Box::new(b))
        }
    }
}

fn substitute_binder(param: &str, body: &Term, var: &str, value: &Term) -> (String, Term) {
    if param == var || !body.has_free_var(var) {
        return (param.to_string(), body.clone());
    }
    if !value.has_free_var(param) {
        return (param.to_string(), substitute(body, var, value));
    }
    let mut avoid = value.free_vars();
    avoid.extend(body.free_vars());
    avoid.insert(var.to_string());
    let renamed = fresh_name(param, &avoid);
    let body = substitute(body, param, &Term::Var(renamed.clone()));
    (renamed.clone(), substitute(&body, var, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_equal, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn single_redex() {
        assert_eq!(beta_reduce(&t("app(lam(X, office(X)), #3228)")).unwrap(), t("office(#3228)"));
    }

    #[test]
    fn identity_applied_to_identity() {
        assert!(alpha_equal(&beta_reduce(&t("app(lam(X, X), lam(Y, Y))")).unwrap(), &t("lam(Y, Y)")));
    }

    #[test]
    fn determiner_ordinal_noun_composition() {
        // "the second floor": det(ord(noun))
        let the = t("lam(P, ref(lam(X, app(P, X))))");
        let second = t("lam(N, lam(X, and(app(N, X), second(X, N))))");
        let floor = t("lam(H, floor(H))");
        let np = Term::app(the, Term::app(second, floor));
        let out = beta_reduce(&np).unwrap();
        assert!(alpha_equal(&out, &t("ref(lam(G, and(floor(G), second(G, lam(H, floor(H))))))")), "{out}");
    }

    #[test]
    fn capture_is_avoided() {
        // (λX. λY. p(X, Y)) Y  →  λY'. p(Y, Y')
        let out = beta_reduce(&t("app(lam(X, lam(Y, p(X, Y))), Y)")).unwrap();
        match &out {
            Term::Lambda(p, body) => {
                assert_ne!(p, "Y");
                assert_eq!(**body, Term::compound("p", vec![t("Y"), Term::Var(p.clone())]));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn omega_hits_step_limit() {
        let omega = t("app(lam(X, app(X, X)), lam(X, app(X, X)))");
        assert_eq!(beta_reduce_with_limit(&omega, 50), Err(BetaError::StepLimit(50)));
    }

    #[test]
    fn redex_counting_and_selection() {
        let term = t("p(app(lam(X, q(X)), a), app(lam(Y, r(Y)), b))");
        assert_eq!(count_redexes(&term), 2);
        assert_eq!(contract_nth(&term, 1).unwrap(), t("p(app(lam(X, q(X)), a), r(b))"));
        assert!(contract_nth(&term, 2).is_none());
    }
}
