//! Entity templating: replacing annotated entity mentions in question text
//! with category placeholders so that questions with the same shape embed to
//! the same point regardless of which concrete entities they mention.

use serde::{Deserialize, Serialize};

use crate::kg::EntityId;

/// Bump when the replacement rules change; recorded in index metadata so a
/// stale index is detectable.
pub const TEMPLATING_VERSION: &str = "tq1";

/// A topic entity with its surface span in the owning question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEntityAnnotation {
    #[serde(rename = "id")]
    pub entity: EntityId,
    pub mention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

impl TopicEntityAnnotation {
    pub fn new(entity: EntityId, mention: impl Into<String>, category: Option<String>) -> Self {
        Self { entity, mention: mention.into(), category }
    }

    fn placeholder(&self) -> String {
        match &self.category {
            Some(c) if !c.is_empty() => format!("<{}>", c.to_lowercase()),
            _ => "<entity>".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplatedQuestion {
    pub text: String,
    pub placeholder_count: usize,
}

#[derive(Debug, Clone)]
pub struct TemplateOutcome {
    pub question: TemplatedQuestion,
    /// Mentions that could not be located in the text.
    pub skipped_mentions: Vec<String>,
}

/// Replaces each annotation's mention with its placeholder. Mentions are
/// matched longest-first, case-insensitively, at the leftmost position not
/// already claimed by another replacement. A match must align to token
/// boundaries (the neighbors of the span, if any, are non-alphanumeric), so
/// a mention never fires inside a longer word. Spans already wrapped in
/// `<...>` are never re-replaced, which makes the operation idempotent.
/// Text outside replaced spans is preserved byte-for-byte.
pub fn template_question(
    text: &str,
    annotations: &[TopicEntityAnnotation],
) -> TemplateOutcome {
    let mut order: Vec<&TopicEntityAnnotation> = annotations.iter().collect();
    order.sort_by(|a, b| b.mention.len().cmp(&a.mention.len()));

    // claimed spans over the original text, as (start, end, replacement)
    let mut claimed: Vec<(usize, usize, String)> = Vec::new();
    let mut skipped = Vec::new();

    for annotation in order {
        if annotation.mention.is_empty() {
            skipped.push(annotation.mention.clone());
            continue;
        }
        let mut from = 0;
        let mut placed = false;
        while let Some((start, end)) = find_ci(text, &annotation.mention, from) {
            let overlaps = claimed.iter().any(|(s, e, _)| start < *e && *s < end);
            if !overlaps && on_token_boundary(text, start, end) && !inside_placeholder(text, start, end)
            {
                claimed.push((start, end, annotation.placeholder()));
                placed = true;
                break;
            }
            from = start + text[start..].chars().next().map_or(1, |c| c.len_utf8());
        }
        if !placed {
            skipped.push(annotation.mention.clone());
        }
    }

    claimed.sort_by_key(|(start, _, _)| *start);
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (start, end, placeholder) in &claimed {
        out.push_str(&text[cursor..*start]);
        out.push_str(placeholder);
        cursor = *end;
    }
    out.push_str(&text[cursor..]);

    TemplateOutcome {
        question: TemplatedQuestion { text: out, placeholder_count: claimed.len() },
        skipped_mentions: skipped,
    }
}

fn on_token_boundary(text: &str, start: usize, end: usize) -> bool {
    let before_ok =
        text[..start].chars().next_back().map_or(true, |c| !c.is_alphanumeric());
    let after_ok = text[end..].chars().next().map_or(true, |c| !c.is_alphanumeric());
    before_ok && after_ok
}

/// True when the matched span sits directly between `<` and `>`, i.e. it is
/// already the body of a placeholder.
fn inside_placeholder(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    before == Some('<') && after == Some('>')
}

/// Leftmost case-insensitive occurrence of `needle` in `haystack` at or
/// after byte offset `from`. Returns the byte span in `haystack`.
fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<(usize, usize)> {
    if from > haystack.len() {
        return None;
    }
    for (offset, _) in haystack[from..].char_indices() {
        let start = from + offset;
        if let Some(len) = ci_prefix_len(&haystack[start..], needle) {
            return Some((start, start + len));
        }
    }
    None
}

/// If `hay` begins with a case-insensitive match of `needle`, returns the
/// number of bytes of `hay` it covers. Matching compares the lowercase
/// expansions of both strings and requires the match to end on a character
/// boundary of `hay`.
fn ci_prefix_len(hay: &str, needle: &str) -> Option<usize> {
    let mut wanted = needle.chars().flat_map(char::to_lowercase).peekable();
    let mut consumed = 0;
    for c in hay.chars() {
        if wanted.peek().is_none() {
            break;
        }
        for lc in c.to_lowercase() {
            match wanted.next() {
                Some(w) if w == lc => {}
                _ => return None,
            }
        }
        consumed += c.len_utf8();
    }
    if wanted.peek().is_none() {
        Some(consumed)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ann(id: &str, mention: &str, category: Option<&str>) -> TopicEntityAnnotation {
        TopicEntityAnnotation::new(EntityId::new(id), mention, category.map(str::to_string))
    }

    #[test]
    fn single_mention_with_category() {
        let out = template_question(
            "what country was A born in",
            &[ann("A", "A", Some("person"))],
        );
        assert_eq!(out.question.text, "what country was <person> born in");
        assert_eq!(out.question.placeholder_count, 1);
        assert!(out.skipped_mentions.is_empty());
    }

    #[test]
    fn no_annotations_is_identity() {
        let out = template_question("how many moons", &[]);
        assert_eq!(out.question.text, "how many moons");
        assert_eq!(out.question.placeholder_count, 0);
    }

    #[test]
    fn idempotent_on_templated_text() {
        let annotations = [ann("p1", "person", Some("person"))];
        let first = template_question("what did person do", &annotations);
        assert_eq!(first.question.text, "what did <person> do");
        let second = template_question(&first.question.text, &annotations);
        assert_eq!(second.question.text, "what did <person> do");
        assert_eq!(second.question.placeholder_count, 0);
    }

    #[test]
    fn missing_category_uses_entity_placeholder() {
        let out = template_question("where is springfield", &[ann("s1", "springfield", None)]);
        assert_eq!(out.question.text, "where is <entity>");
    }

    #[test]
    fn case_insensitive_leftmost_match() {
        let out = template_question(
            "Did Alice meet alice",
            &[ann("a", "ALICE", Some("person"))],
        );
        assert_eq!(out.question.text, "Did <person> meet alice");
        assert_eq!(out.question.placeholder_count, 1);
    }

    #[test]
    fn longest_mention_wins_overlap() {
        let out = template_question(
            "the new york times reported",
            &[
                ann("ny", "new york", Some("city")),
                ann("nyt", "new york times", Some("newspaper")),
            ],
        );
        assert_eq!(out.question.text, "the <newspaper> reported");
    }

    #[test]
    fn two_annotations_non_overlapping() {
        let out = template_question(
            "did alice visit bob",
            &[ann("a", "alice", Some("person")), ann("b", "bob", Some("person"))],
        );
        assert_eq!(out.question.text, "did <person> visit <person>");
        assert_eq!(out.question.placeholder_count, 2);
    }

    #[test]
    fn unfindable_mention_is_skipped_with_warning() {
        let out = template_question("what is this", &[ann("x", "zanzibar", Some("place"))]);
        assert_eq!(out.question.text, "what is this");
        assert_eq!(out.skipped_mentions, vec!["zanzibar".to_string()]);
    }

    #[test]
    fn category_is_lowercased() {
        let out = template_question("where is Paris", &[ann("p", "Paris", Some("City"))]);
        assert_eq!(out.question.text, "where is <city>");
    }
}
