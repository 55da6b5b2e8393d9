use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::rules::{DependencyRule, RuleKind};
use super::{MiimError, State, DEGRADED, FAILED, OPERATIONAL};

#[derive(Debug, Clone, PartialEq, Eq)]
struct LinkedRule {
    kind: RuleKind,
    minterms: Vec<Vec<usize>>,
}

/// Rules resolved against an ordered entity list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    by_target: Vec<Vec<LinkedRule>>,
}

impl RuleSet {
    pub fn link(ids: &[String], rules: &[DependencyRule]) -> Result<Self, MiimError> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(MiimError::DuplicateEntity(id.clone()));
            }
        }
        let resolve = |id: &str, line: usize| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| MiimError::UnknownEntity { line, id: id.to_string() })
        };
        let mut by_target = vec![Vec::new(); ids.len()];
        for rule in rules {
            let target = resolve(&rule.target, rule.line)?;
            if rule.expression.minterms.is_empty() || rule.expression.minterms.iter().any(|m| m.is_empty()) {
                return Err(MiimError::Parse { line: rule.line, msg: format!("empty expression for `{}`", rule.target) });
            }
            let mut minterms = Vec::with_capacity(rule.expression.minterms.len());
            for term in &rule.expression.minterms {
                let mut linked = Vec::with_capacity(term.len());
                for id in term {
                    let j = resolve(id, rule.line)?;
                    if j == target {
                        return Err(MiimError::SelfReference { line: rule.line, target: rule.target.clone() });
                    }
                    linked.push(j);
                }
                minterms.push(linked);
            }
            by_target[target].push(LinkedRule { kind: rule.kind, minterms });
        }
        Ok(Self { ids: ids.to_vec(), index, by_target })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn rule_count(&self) -> usize {
        self.by_target.iter().map(Vec::len).sum()
    }
}

/// max over minterms of min over members.
pub fn evaluate_expression(minterms: &[Vec<usize>], states: &[State]) -> State {
    minterms
        .iter()
        .map(|m| m.iter().map(|&j| states[j]).min().unwrap_or(FAILED))
        .max()
        .unwrap_or(FAILED)
}

/// One synchronous round. Every entity reads only `states`.
pub fn step(states: &[State], rules: &RuleSet, clamped: &[bool]) -> Vec<State> {
    (0..states.len())
        .map(|i| {
            let intrinsic = if clamped[i] { FAILED } else { states[i] };
            rules.by_target[i].iter().fold(intrinsic, |acc, r| {
                let v = evaluate_expression(&r.minterms, states);
                let v = match r.kind {
                    RuleKind::Hard => v,
                    RuleKind::Soft => v.max(DEGRADED),
                };
                acc.min(v)
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CascadeTrace {
    pub ids: Vec<String>,
    /// Round 0 is the disturbed state (clamped entities at 0); the last two
    /// rounds are identical.
    pub rounds: Vec<Vec<State>>,
    pub depth: usize,
    /// Entities whose state changed entering each round; entry 0 is the clamp set.
    pub changed: Vec<Vec<usize>>,
    pub clamped: Vec<usize>,
}

impl CascadeTrace {
    pub fn initial(&self) -> &[State] {
        &self.rounds[0]
    }

    pub fn final_states(&self) -> &[State] {
        self.rounds.last().expect("trace has at least one round")
    }

    pub fn is_monotone(&self) -> bool {
        self.rounds.windows(2).all(|w| w[1].iter().zip(&w[0]).all(|(b, a)| b <= a))
    }

    /// JSON array of rounds, each mapping entity id to state.
    pub fn to_json(&self) -> String {
        let rounds: Vec<BTreeMap<&str, State>> = self
            .rounds
            .iter()
            .map(|r| self.ids.iter().map(String::as_str).zip(r.iter().copied()).collect())
            .collect();
        serde_json::to_string_pretty(&rounds).expect("trace serializes")
    }
}

/// Clamp `clamp` to failed on an all-operational baseline and iterate `step`
/// until nothing changes.
pub fn cascade(rules: &RuleSet, clamp: &[usize]) -> Result<CascadeTrace, MiimError> {
    let n = rules.len();
    let mut clamped = vec![false; n];
    for &c in clamp {
        clamped[c] = true;
    }
    let clamp_sorted: Vec<usize> = clamped.iter().enumerate().filter(|(_, c)| **c).map(|(i, _)| i).collect();

    let mut current = vec![OPERATIONAL; n];
    for &c in &clamp_sorted {
        current[c] = FAILED;
    }
    let mut rounds = vec![current.clone()];
    let mut changed = vec![clamp_sorted.clone()];
    let cap = (2 * n).max(1);
    let mut depth = 0;
    loop {
        let next = step(&current, rules, &clamped);
        let diff: Vec<usize> = (0..n).filter(|&i| next[i] != current[i]).collect();
        rounds.push(next.clone());
        if diff.is_empty() {
            break;
        }
        depth += 1;
        if depth > cap {
            return Err(MiimError::NoFixedPoint { rounds: depth });
        }
        changed.push(diff);
        current = next;
    }
    Ok(CascadeTrace {
        ids: rules.ids.clone(),
        rounds,
        depth,
        changed,
        clamped: clamp_sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miim::parse_rules;
    use proptest::prelude::*;

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn linked(names: &[&str], text: &str) -> RuleSet {
        RuleSet::link(&ids(names), &parse_rules(text).unwrap()).unwrap()
    }

    #[test]
    fn min_max_algebra() {
        // a=0 b=1 c=2
        let s = [2, 1, 2];
        assert_eq!(evaluate_expression(&[vec![0, 1]], &s), 1);
        assert_eq!(evaluate_expression(&[vec![0, 1], vec![2]], &s), 2);
        assert_eq!(evaluate_expression(&[vec![0, 1], vec![2]], &[0, 0, 0]), 0);
    }

    #[test]
    fn exhaustive_three_entity_expression() {
        // (a & b) | c, a | (b & c), a & b & c
        type Case = (Vec<Vec<usize>>, fn(u8, u8, u8) -> u8);
        let exprs: Vec<Case> = vec![
            (vec![vec![0, 1], vec![2]], |a, b, c| if a.min(b) > c { a.min(b) } else { c }),
            (vec![vec![0], vec![1, 2]], |a, b, c| if a > b.min(c) { a } else { b.min(c) }),
            (vec![vec![0, 1, 2]], |a, b, c| *[a, b, c].iter().min().unwrap()),
        ];
        let mut checked = 0;
        for (expr, oracle) in &exprs {
            for a in 0..3u8 {
                for b in 0..3u8 {
                    for c in 0..3u8 {
                        assert_eq!(evaluate_expression(expr, &[a, b, c]), oracle(a, b, c));
                        checked += 1;
                    }
                }
            }
        }
        assert_eq!(checked, 81);
    }

    #[test]
    fn hard_and_soft_step() {
        let rules = linked(&["a", "b"], "a <- hard: b");
        assert_eq!(step(&[2, 0], &rules, &[false, true]), vec![0, 0]);
        let rules = linked(&["a", "b"], "a <- soft: b");
        assert_eq!(step(&[2, 0], &rules, &[false, true]), vec![1, 0]);
    }

    #[test]
    fn unknown_id_at_link() {
        let e = RuleSet::link(&ids(&["a"]), &parse_rules("\na <- hard: ghost").unwrap()).unwrap_err();
        assert!(matches!(e, MiimError::UnknownEntity { line: 2, ref id } if id == "ghost"));
    }

    #[test]
    fn empty_clamp_is_fixed() {
        let rules = linked(&["a", "b"], "a <- hard: b");
        let t = cascade(&rules, &[]).unwrap();
        assert_eq!(t.depth, 0);
        assert_eq!(t.rounds.len(), 2);
        assert_eq!(t.final_states(), &[2, 2]);
    }

    #[test]
    fn chain_depth() {
        let rules = linked(&["a", "b", "c"], "a <- hard: b\nb <- hard: c");
        let t = cascade(&rules, &[2]).unwrap();
        assert_eq!(t.depth, 2);
        assert_eq!(t.final_states(), &[0, 0, 0]);
        assert_eq!(t.changed, vec![vec![2], vec![1], vec![0]]);
        let last = t.rounds.len();
        assert_eq!(t.rounds[last - 1], t.rounds[last - 2]);
    }

    #[test]
    fn chain_of_k_has_depth_k() {
        for k in 1..40usize {
            let names: Vec<String> = (0..=k).map(|i| format!("e{i}")).collect();
            let text: String = (0..k).map(|i| format!("e{i} <- hard: e{}\n", i + 1)).collect();
            let rules = RuleSet::link(&names, &parse_rules(&text).unwrap()).unwrap();
            let t = cascade(&rules, &[k]).unwrap();
            assert_eq!(t.depth, k);
        }
    }

    #[test]
    fn trace_json_shape() {
        let rules = linked(&["a", "b"], "a <- soft: b");
        let t = cascade(&rules, &[1]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 3);
        assert_eq!(arr[0]["a"], 2);
        assert_eq!(arr[2]["a"], 1);
        assert_eq!(arr[2]["b"], 0);
    }

    /// (target, is_hard, minterms)
    type RawRule = (usize, bool, Vec<Vec<usize>>);

    fn arb_network() -> impl Strategy<Value = (usize, Vec<RawRule>, Vec<usize>)> {
        (2usize..=6).prop_flat_map(|n| {
            let rule = (
                0..n,
                any::<bool>(),
                prop::collection::vec(prop::collection::vec(0..n, 1..=3), 1..=3),
            );
            (Just(n), prop::collection::vec(rule, 0..=8), prop::collection::vec(0..n, 0..=2))
        })
    }

    proptest! {
        #[test]
        fn step_matches_direct_reevaluation((n, raw, clamp) in arb_network()) {
            let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
            let mut rules = Vec::new();
            for (t, hard, terms) in &raw {
                let terms: Vec<Vec<String>> = terms
                    .iter()
                    .map(|m| m.iter().filter(|&&j| j != *t).map(|&j| names[j].clone()).collect::<Vec<_>>())
                    .filter(|m: &Vec<String>| !m.is_empty())
                    .collect();
                if terms.is_empty() { continue; }
                let kind = if *hard { RuleKind::Hard } else { RuleKind::Soft };
                rules.push(DependencyRule::new(names[*t].clone(), kind, terms));
            }
            let set = RuleSet::link(&names, &rules).unwrap();
            let trace = cascade(&set, &clamp).unwrap();
            prop_assert!(trace.is_monotone());
            let mut clamped = vec![false; n];
            for &c in &clamp { clamped[c] = true; }
            // every round against a string-keyed evaluation
            for w in trace.rounds.windows(2) {
                let lookup: HashMap<&str, u8> = names.iter().map(String::as_str).zip(w[0].iter().copied()).collect();
                for i in 0..n {
                    let mut v = if clamped[i] { 0 } else { w[0][i] };
                    for r in rules.iter().filter(|r| r.target == names[i]) {
                        let e = r.expression.minterms.iter()
                            .map(|m| m.iter().map(|id| lookup[id.as_str()]).min().unwrap())
                            .max().unwrap();
                        v = v.min(if r.kind == RuleKind::Soft { e.max(1) } else { e });
                    }
                    prop_assert_eq!(w[1][i], v);
                }
            }
            let fin = trace.final_states().to_vec();
            prop_assert_eq!(step(&fin, &set, &clamped), fin);
        }
    }
}
