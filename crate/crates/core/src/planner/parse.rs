//! Lenient parsers for constrained completions. Every parser extracts the
//! first JSON fragment when the completion wraps it in prose, and some have
//! plain-text fallbacks where the operation allows one.

use serde::Deserialize;
use serde_json::Value;

/// Extracts and parses the first balanced JSON value starting with `open`.
fn json_fragment(text: &str, open: char, close: char) -> Option<Value> {
    if let Ok(v) = serde_json::from_str::<Value>(text.trim()) {
        return Some(v);
    }
    let start = text.find(open)?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text[start..].char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            c if c == open => depth += 1,
            c if c == close => {
                depth -= 1;
                if depth == 0 {
                    return serde_json::from_str(&text[start..start + i + c.len_utf8()]).ok();
                }
            }
            _ => {}
        }
    }
    None
}

/// A list of strings: JSON array first, then numbered/bulleted lines.
/// Returns `None` when the completion contains no recognizable list.
pub fn string_list(text: &str) -> Option<Vec<String>> {
    if let Some(Value::Array(items)) = json_fragment(text, '[', ']') {
        let strings: Vec<String> = items
            .into_iter()
            .filter_map(|v| v.as_str().map(str::to_string))
            .filter(|s| !s.trim().is_empty())
            .collect();
        if !strings.is_empty() {
            return Some(strings);
        }
    }
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(item) = strip_list_marker(line) {
            if !item.is_empty() {
                out.push(item.to_string());
            }
        }
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// Strips `1.`, `2)`, `-`, `*` markers; returns `None` for unmarked lines.
fn strip_list_marker(line: &str) -> Option<&str> {
    let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(rest) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
            return Some(rest.trim());
        }
        return None;
    }
    line.strip_prefix("- ").or_else(|| line.strip_prefix("* ")).map(str::trim)
}

/// Relation names from a completion: JSON array of strings, else items split
/// on commas and newlines with quotes and list markers trimmed.
pub fn relation_names(text: &str) -> Vec<String> {
    if let Some(Value::Array(items)) = json_fragment(text, '[', ']') {
        return items
            .into_iter()
            .filter_map(|v| v.as_str().map(|s| s.trim().to_string()))
            .filter(|s| !s.is_empty())
            .collect();
    }
    text.split(|c| c == ',' || c == '\n')
        .map(|piece| {
            piece
                .trim()
                .trim_start_matches(['-', '*'])
                .trim_matches(['"', '\'', '`', ' '])
                .to_string()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

/// Integer indices: JSON array of numbers, else any integers in the text.
pub fn indices(text: &str) -> Vec<i64> {
    if let Some(Value::Array(items)) = json_fragment(text, '[', ']') {
        let nums: Vec<i64> = items.iter().filter_map(Value::as_i64).collect();
        if !nums.is_empty() || items.is_empty() {
            return nums;
        }
    }
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_ascii_digit() {
            current.push(c);
        } else if !current.is_empty() {
            if let Ok(n) = current.parse() {
                out.push(n);
            }
            current.clear();
        }
    }
    if let Ok(n) = current.parse() {
        out.push(n);
    }
    out
}

#[derive(Debug, Clone, Deserialize)]
pub struct VerdictJson {
    pub sufficient: bool,
    #[serde(default)]
    pub answer: Vec<String>,
    #[serde(default)]
    pub reason: String,
}

pub fn verdict(text: &str) -> Option<VerdictJson> {
    let value = json_fragment(text, '{', '}')?;
    serde_json::from_value(value).ok()
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReflectionJson {
    pub correct_course: bool,
    #[serde(default)]
    pub backtrack: Vec<String>,
    #[serde(default)]
    pub reason: String,
}

pub fn reflection(text: &str) -> Option<ReflectionJson> {
    let value = json_fragment(text, '{', '}')?;
    serde_json::from_value(value).ok()
}

/// Status strings for sub-objectives: strictly a JSON array of strings.
pub fn statuses(text: &str) -> Option<Vec<String>> {
    match json_fragment(text, '[', ']')? {
        Value::Array(items) => {
            let strings: Vec<String> =
                items.into_iter().filter_map(|v| v.as_str().map(str::to_string)).collect();
            if strings.is_empty() {
                None
            } else {
                Some(strings)
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_list_json_array() {
        assert_eq!(
            string_list(r#"["find birthplace", "find its country"]"#).unwrap(),
            vec!["find birthplace", "find its country"]
        );
    }

    #[test]
    fn string_list_numbered_lines() {
        assert_eq!(string_list("1. x\n2. y").unwrap(), vec!["x", "y"]);
    }

    #[test]
    fn string_list_prose_is_none() {
        assert!(string_list("I cannot split this question.").is_none());
    }

    #[test]
    fn json_inside_prose_is_found() {
        let v = verdict("Here is my verdict: {\"sufficient\": true, \"answer\": [\"X\"], \"reason\": \"ok\"} done").unwrap();
        assert!(v.sufficient);
        assert_eq!(v.answer, vec!["X"]);
    }

    #[test]
    fn relation_names_fallback_split() {
        assert_eq!(relation_names("born_in, capital_of"), vec!["born_in", "capital_of"]);
        assert_eq!(relation_names("[\"born_in\"]"), vec!["born_in"]);
    }

    #[test]
    fn indices_parse_and_fallback() {
        assert_eq!(indices("[0, 2]"), vec![0, 2]);
        assert_eq!(indices("paths 1 and 3"), vec![1, 3]);
        assert_eq!(indices("[]"), Vec::<i64>::new());
    }

    #[test]
    fn statuses_require_json_array() {
        assert_eq!(
            statuses(r#"["resolved: CityX", "unknown"]"#).unwrap(),
            vec!["resolved: CityX", "unknown"]
        );
        assert!(statuses("all good").is_none());
    }
}
