use super::{parse_action, parse_condition, PddlError};

const CONNECTIVES: &[&str] = &["and", "not", "or", "forall", "exists", "imply", "when"];

/// Names in predicate position: every token directly after `(` that is not a
/// connective or a `:keyword`.
pub fn predicate_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(i) = rest.find('(') {
        rest = &rest[i + 1..];
        let tok: String = rest
            .trim_start()
            .chars()
            .take_while(|c| !c.is_whitespace() && *c != '(' && *c != ')' && *c != '`')
            .collect();
        if tok.is_empty() || tok.starts_with(':') || tok.starts_with('?') {
            continue;
        }
        if CONNECTIVES.contains(&tok.to_lowercase().as_str()) {
            continue;
        }
        out.push(tok);
    }
    out
}

fn parses(text: &str) -> bool {
    let t = text.trim_start();
    if t.len() >= 8 && t[..8].eq_ignore_ascii_case("(:action") {
        parse_action(t).is_ok()
    } else {
        parse_condition(t).is_ok()
    }
}

fn names_declared(text: &str, declared: Option<&[String]>) -> bool {
    let Some(declared) = declared else {
        return true;
    };
    predicate_tokens(text)
        .iter()
        .all(|t| declared.iter().any(|d| d == t))
}

/// Lexical repair of a schema or condition fragment.
///
/// Valid input (parseable, and every predicate token exactly matching a
/// declared name when `declared` is given) is returned unchanged. Otherwise
/// markdown fences are stripped, case and whitespace normalized, parentheses
/// balanced, and `_`/`-` variants mapped onto declared predicate names.
/// Literals are never added, removed, or reordered; undeclared predicates are
/// left for validation to reject.
pub fn repair_syntax(text: &str, declared: Option<&[String]>) -> Result<String, PddlError> {
    if parses(text) && names_declared(text, declared) {
        return Ok(text.to_string());
    }

    let unfenced: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n")
        .replace('`', "")
        .to_lowercase();

    let mut balanced = String::with_capacity(unfenced.len() + 4);
    let mut depth = 0usize;
    for c in unfenced.chars() {
        match c {
            '(' => {
                depth += 1;
                balanced.push(c);
            }
            ')' if depth == 0 => {}
            ')' => {
                depth -= 1;
                balanced.push(c);
            }
            _ => balanced.push(c),
        }
    }
    balanced.extend(std::iter::repeat_n(')', depth));

    let mut normalized = balanced.split_whitespace().collect::<Vec<_>>().join(" ");
    normalized = normalized.replace("( ", "(").replace(" )", ")");

    if let Some(declared) = declared {
        normalized = map_declared_names(&normalized, declared);
    }

    if parses(&normalized) {
        Ok(normalized)
    } else {
        Err(PddlError::Unrepairable(text.trim().to_string()))
    }
}

fn map_declared_names(text: &str, declared: &[String]) -> String {
    let mut out = String::with_capacity(text.len());
    let mut after_open = false;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if after_open && !c.is_whitespace() && c != '(' && c != ')' {
            let end = text[i..]
                .find(|ch: char| ch.is_whitespace() || ch == '(' || ch == ')')
                .map_or(text.len(), |e| i + e);
            let tok = &text[i..end];
            let key = tok.replace('_', "-");
            let replacement = declared
                .iter()
                .find(|d| d.as_str() != tok && d.replace('_', "-") == key)
                .map(String::as_str)
                .unwrap_or(tok);
            out.push_str(replacement);
            while chars.peek().is_some_and(|(j, _)| *j < end) {
                chars.next();
            }
            after_open = false;
            continue;
        }
        after_open = c == '(';
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(t: &str) -> String {
        t.to_lowercase().replace('_', "-")
    }

    fn keys(text: &str) -> Vec<String> {
        let mut v: Vec<String> = predicate_tokens(text).iter().map(|t| key(t)).collect();
        v.sort();
        v
    }

    #[test]
    fn closes_unbalanced_conjunction() {
        let out = repair_syntax("(and (on-table ?x)", None).unwrap();
        assert_eq!(out, "(and (on-table ?x))");
        assert_eq!(parse_condition(&out).unwrap().len(), 1);
    }

    #[test]
    fn valid_fragment_is_untouched() {
        let src = "(and\n    (on-table ?book)\n    (hands-free)\n)";
        assert_eq!(repair_syntax(src, None).unwrap(), src);
    }

    #[test]
    fn undeclared_predicate_is_not_rewritten() {
        let declared = vec!["on-table".to_string()];
        let out = repair_syntax("(flying ?x)", Some(&declared)).unwrap();
        assert_eq!(out, "(flying ?x)");
    }

    #[test]
    fn underscore_variants_map_to_declared_names() {
        let declared = vec!["hands-free".to_string(), "on-table".to_string()];
        let out = repair_syntax("(and (Hands_Free) (on_table ?x))", Some(&declared)).unwrap();
        assert_eq!(out, "(and (hands-free) (on-table ?x))");
    }

    #[test]
    fn strips_fences_and_stray_closers() {
        let src = "```\n(and (holding ?x)))\n```";
        assert_eq!(repair_syntax(src, None).unwrap(), "(and (holding ?x))");
    }

    #[test]
    fn unrepairable_input_is_reported() {
        assert!(matches!(
            repair_syntax("on-table ?x", None),
            Err(PddlError::Unrepairable(_))
        ));
        assert!(matches!(
            repair_syntax("(or (a) (b))", None),
            Err(PddlError::Unrepairable(_))
        ));
    }

    #[test]
    fn predicate_multiset_is_preserved() {
        let declared = vec!["on-table".to_string(), "hands-free".to_string()];
        for src in [
            "(and (on-table ?x)",
            "(AND (ON_TABLE ?x) (not (Hands-Free))))",
            "```pddl\n(and\n  (on-table ?x)\n  (hands_free)\n```",
        ] {
            let out = repair_syntax(src, Some(&declared)).unwrap();
            assert_eq!(keys(src), keys(&out), "{src:?} -> {out:?}");
        }
    }
}
