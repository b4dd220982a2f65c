//! The synonym rule file: one `lhs|rhs` pair per line, `#` comments and
//! blank lines ignored.

use weralign_core::TransformRuleSet;

use super::{utf8, FormatError};

pub fn parse_synonyms(bytes: &[u8]) -> Result<TransformRuleSet, FormatError> {
    let text = utf8(bytes)?;
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = trimmed.split_once('|').ok_or_else(|| {
            FormatError::at(line_no, format!("missing '|' separator in {trimmed:?}"))
        })?;
        pairs.push((line_no, lhs.to_string(), rhs.to_string()));
    }
    TransformRuleSet::from_pairs(pairs.iter().map(|(_, l, r)| (l.as_str(), r.as_str()))).map_err(
        |e| {
            // recover the offending line for the report
            let line = pairs
                .iter()
                .find(|(_, l, r)| {
                    TransformRuleSet::from_pairs([(l.as_str(), r.as_str())]).is_err()
                })
                .map(|(n, _, _)| *n);
            match line {
                Some(line) => FormatError::at(line, e.to_string()),
                None => FormatError::whole(e.to_string()),
            }
        },
    )
}

/// Render a rule set back to its file form (comparison form, one rule per
/// line). Parsing the output yields an equivalent rule set.
pub fn serialize_synonyms(rules: &TransformRuleSet) -> String {
    let mut out = String::new();
    for rule in rules.rules() {
        out.push_str(&rule.lhs().join(" "));
        out.push('|');
        out.push_str(&rule.rhs().join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rules_with_comments_and_blanks() {
        let set = parse_synonyms(b"# common contractions\ngoing to|gonna\n\nI'll|I will\n")
            .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.rules()[0].lhs(), ["going", "to"]);
        assert_eq!(set.rules()[0].rhs(), ["gonna"]);
        assert_eq!(set.rules()[1].lhs(), ["i'll"]);
        assert_eq!(set.rules()[1].rhs(), ["i", "will"]);
    }

    #[test]
    fn empty_side_names_the_line() {
        let err = parse_synonyms(b"# ok\n|gonna\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(err.to_string().contains("empty"), "{err}");
    }

    #[test]
    fn missing_separator_rejected() {
        let err = parse_synonyms(b"gonna going to\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
        assert!(err.to_string().contains('|'), "{err}");
    }

    #[test]
    fn reserializes_to_an_equivalent_set() {
        let set = parse_synonyms(b"Going To|GONNA.\ni'll|i will\n").unwrap();
        let round = parse_synonyms(serialize_synonyms(&set).as_bytes()).unwrap();
        let norm = |s: &TransformRuleSet| {
            let mut v: Vec<(Vec<String>, Vec<String>)> = s
                .rules()
                .iter()
                .map(|r| (r.lhs().to_vec(), r.rhs().to_vec()))
                .collect();
            v.sort();
            v
        };
        assert_eq!(norm(&set), norm(&round));
    }

    #[test]
    fn empty_file_gives_empty_set() {
        assert!(parse_synonyms(b"").unwrap().is_empty());
    }
}
