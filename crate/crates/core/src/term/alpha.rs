use std::collections::BTreeMap;

use super::{EntityId, Term};

/// A partial bijection between the entities of two terms or fact sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntityBijection {
    forward: BTreeMap<EntityId, EntityId>,
    backward: BTreeMap<EntityId, EntityId>,
}

impl EntityBijection {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `a ↦ b`, or check it against what is already recorded.
    pub fn link(&mut self, a: EntityId, b: EntityId) -> bool {
        match (self.forward.get(&a), self.backward.get(&b)) {
            (Some(x), Some(y)) => *x == b && *y == a,
            (None, None) => {
                self.forward.insert(a, b);
                self.backward.insert(b, a);
                true
            }
            _ => false,
        }
    }

    pub fn get(&self, a: EntityId) -> Option<EntityId> {
        self.forward.get(&a).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (EntityId, EntityId)> + '_ {
        self.forward.iter().map(|(a, b)| (*a, *b))
    }
}

/// Identical up to consistent renaming of bound variables.
pub fn alpha_equal(a: &Term, b: &Term) -> bool {
    Walker { entities: None }.eq(a, b, &mut Vec::new())
}

/// Alpha-equivalence that also renames entities through `bijection`, which
/// is extended as new entity pairs are met. On failure the bijection may
/// hold partial links; callers that backtrack should pass a clone.
pub fn alpha_equal_modulo_entities(a: &Term, b: &Term, bijection: &mut EntityBijection) -> bool {
    Walker { entities: Some(bijection) }.eq(a, b, &mut Vec::new())
}

struct Walker<'b> {
    entities: Option<&'b mut EntityBijection>,
}

impl Walker<'_> {
    // `env` pairs binder names, innermost last.
    fn eq(&mut self, a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let lx = env.iter().rposition(|(l, _)| l == x);
                let ly = env.iter().rposition(|(_, r)| r == y);
                match (lx, ly) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Entity(x), Term::Entity(y)) => match &mut self.entities {
                Some(bij) => bij.link(*x, *y),
                None => x == y,
            },
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.eq(x, y, env))
            }
            (Term::App(f, x), Term::App(g, y)) => self.eq(f, g, env) && self.eq(x, y, env),
            (Term::Lambda(p, x), Term::Lambda(q, y)) | (Term::Ref(p, x), Term::Ref(q, y)) => {
                env.push((p.clone(), q.clone()));
                let r = self.eq(x, y, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
}
