use super::{GuardedRule, HornClause};

/// One Horn clause per conclusion literal: the head is the literal, the body
/// is every guard on the path to it, outermost first.
pub fn flatten(rule: &GuardedRule) -> Vec<HornClause> {
    let (blocks, groups) = rule.body.blocks();
    let body: Vec<_> = blocks.iter().flat_map(|(_, g)| g.iter().cloned()).collect();
    let universals = rule.universals();
    let mut out = Vec::new();
    for (index, group) in groups.iter().enumerate() {
        let mentioned: Vec<String> = group.literals.iter().flat_map(|l| l.free_vars()).collect();
        let anchor_vars: Vec<String> = universals.iter().filter(|v| mentioned.contains(v)).cloned().collect();
        for head in &group.literals {
            out.push(HornClause {
                head: head.clone(),
                body: body.clone(),
                source_rule: rule.name.clone(),
                language: rule.language,
                group: index,
                existential_vars: group.existentials.clone(),
                anchor_vars: anchor_vars.clone(),
            });
        }
    }
    out
}
