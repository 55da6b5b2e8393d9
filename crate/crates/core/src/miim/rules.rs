use std::fmt;

use serde::{Deserialize, Serialize};

use super::MiimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Hard,
    Soft,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Hard => "hard",
            RuleKind::Soft => "soft",
        })
    }
}

/// Disjunction of minterms; each minterm is a conjunction of entity ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expression {
    pub minterms: Vec<Vec<String>>,
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.minterms.iter().map(|m| m.join(" & ")).collect();
        f.write_str(&terms.join(" | "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyRule {
    pub target: String,
    pub kind: RuleKind,
    pub expression: Expression,
    /// 1-based source line, 0 for rules built in code.
    pub line: usize,
}

impl DependencyRule {
    pub fn new(target: impl Into<String>, kind: RuleKind, minterms: Vec<Vec<String>>) -> Self {
        Self {
            target: target.into(),
            kind,
            expression: Expression { minterms },
            line: 0,
        }
    }
}

impl fmt::Display for DependencyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}: {}", self.target, self.kind, self.expression)
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '/'))
}

/// Parse the rule DSL: one `<target> <- <hard|soft>: <id> [& <id>]* [| ...]*`
/// per line, `#` starts a comment.
pub fn parse_rules(text: &str) -> Result<Vec<DependencyRule>, MiimError> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: &str| MiimError::Parse { line, msg: msg.to_string() };
        let (target, rest) = content.split_once("<-").ok_or_else(|| err("expected `<-`"))?;
        let target = target.trim();
        if !valid_id(target) {
            return Err(err(&format!("invalid target id `{target}`")));
        }
        let (kind, expr) = rest.split_once(':').ok_or_else(|| err("expected `hard:` or `soft:`"))?;
        let kind = match kind.trim() {
            "hard" => RuleKind::Hard,
            "soft" => RuleKind::Soft,
            other => return Err(err(&format!("unknown rule kind `{other}`"))),
        };
        let mut minterms = Vec::new();
        for term in expr.split('|') {
            let mut members = Vec::new();
            for id in term.split('&') {
                let id = id.trim();
                if !valid_id(id) {
                    return Err(err(if id.is_empty() { "empty operand" } else { "invalid entity id" }));
                }
                if id == target {
                    return Err(MiimError::SelfReference { line, target: target.to_string() });
                }
                if !members.iter().any(|m: &String| m == id) {
                    members.push(id.to_string());
                }
            }
            minterms.push(members);
        }
        rules.push(DependencyRule {
            target: target.to_string(),
            kind,
            expression: Expression { minterms },
            line,
        });
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hard_rule() {
        let r = parse_rules("srv_7 <- hard: gw_7").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, RuleKind::Hard);
        assert_eq!(r[0].expression.minterms, vec![vec!["gw_7".to_string()]]);
    }

    #[test]
    fn soft_rule_two_minterms() {
        let r = parse_rules("bus_12 <- soft: srv_3 & pmu_9 | srv_4").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, RuleKind::Soft);
        assert_eq!(r[0].expression.minterms.len(), 2);
        assert_eq!(r[0].expression.minterms[0], vec!["srv_3", "pmu_9"]);
    }

    #[test]
    fn self_reference_rejected() {
        let e = parse_rules("x <- hard: x").unwrap_err();
        assert!(matches!(e, MiimError::SelfReference { line: 1, .. }));
        let e = parse_rules("# c\n\ny <- soft: a | b & y").unwrap_err();
        assert!(matches!(e, MiimError::SelfReference { line: 3, .. }));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "a <- hard: b\n# comment\nc <- maybe: d\n";
        match parse_rules(text).unwrap_err() {
            MiimError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
        assert!(matches!(parse_rules("a <- hard: b |").unwrap_err(), MiimError::Parse { line: 1, .. }));
        assert!(matches!(parse_rules("a hard: b").unwrap_err(), MiimError::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_targets_and_round_trip() {
        let text = "a <- hard: b\na <- soft: c & d | e # trailing\n";
        let rules = parse_rules(text).unwrap();
        assert_eq!(rules.len(), 2);
        let printed: Vec<String> = rules.iter().map(|r| r.to_string()).collect();
        let again = parse_rules(&printed.join("\n")).unwrap();
        for (a, b) in rules.iter().zip(&again) {
            assert_eq!((&a.target, a.kind, &a.expression), (&b.target, b.kind, &b.expression));
        }
    }
}
