//! Answer normalization for exact-match scoring.

/// Lowercases, trims, strips surrounding punctuation, and collapses internal
/// whitespace runs. Correctness is decided by comparing normalized forms, so
/// the relation is symmetric by construction.
pub fn normalize_answer(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let trimmed =
        lowered.trim_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation());
    trimmed.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// True when any predicted answer matches any gold alias after
/// normalization.
pub fn any_match(predicted: &[String], gold: &[String]) -> bool {
    let gold_normalized: Vec<String> = gold.iter().map(|g| normalize_answer(g)).collect();
    predicted
        .iter()
        .map(|p| normalize_answer(p))
        .any(|p| !p.is_empty() && gold_normalized.contains(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_punctuation_and_case() {
        assert_eq!(normalize_answer("  The Beatles!  "), "the beatles");
        assert_eq!(normalize_answer("\"Freedonia\""), "freedonia");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize_answer("new   york\tcity"), "new york city");
    }

    #[test]
    fn symmetric_comparison() {
        let cases = [("  Foo Bar ", "foo bar"), ("X.", "x"), ("a  b", "A B")];
        for (a, b) in cases {
            assert_eq!(normalize_answer(a) == normalize_answer(b), normalize_answer(b) == normalize_answer(a));
            assert_eq!(normalize_answer(a), normalize_answer(b));
        }
    }

    #[test]
    fn match_requires_nonempty() {
        assert!(!any_match(&["!!".into()], &["!!".into()]));
        assert!(any_match(&["Freedonia".into()], &["freedonia".into(), "fd".into()]));
    }
}
