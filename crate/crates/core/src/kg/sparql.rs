//! Remote graph backend speaking the SPARQL protocol over HTTP.
//!
//! Only three fixed query templates are ever issued (outgoing relations,
//! incoming relations, neighbor expansion), parameterized by escaped
//! identifiers. This is deliberately not a SPARQL engine.

use std::time::Duration;

use serde_json::Value;

use super::{Direction, EntityId, KgError, KgResult, KnowledgeGraph, Relation};

#[derive(Debug, Clone)]
pub struct SparqlConfig {
    pub endpoint: String,
    pub timeout: Duration,
    /// Additional attempts after the first failure.
    pub retries: u32,
    pub backoff: Duration,
    /// Prepended to identifiers when forming IRIs and stripped from results.
    pub iri_prefix: String,
}

impl Default for SparqlConfig {
    fn default() -> Self {
        Self {
            endpoint: String::new(),
            timeout: Duration::from_secs(10),
            retries: 2,
            backoff: Duration::from_millis(250),
            iri_prefix: String::new(),
        }
    }
}

pub struct SparqlBackend {
    config: SparqlConfig,
    client: reqwest::blocking::Client,
}

impl SparqlBackend {
    pub fn new(config: SparqlConfig) -> KgResult<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| KgError::Backend { query: String::new(), msg: e.to_string() })?;
        Ok(Self { config, client })
    }

    fn iri(&self, identifier: &str) -> String {
        format!("{}{}", self.config.iri_prefix, escape_identifier(identifier))
    }

    pub fn outgoing_relations_query(&self, entity: &EntityId) -> String {
        format!(
            "SELECT DISTINCT ?relation WHERE {{ <{}> ?relation ?object . }}",
            self.iri(entity.id())
        )
    }

    pub fn incoming_relations_query(&self, entity: &EntityId) -> String {
        format!(
            "SELECT DISTINCT ?relation WHERE {{ ?subject ?relation <{}> . }}",
            self.iri(entity.id())
        )
    }

    pub fn expand_query(
        &self,
        entity: &EntityId,
        relation: &Relation,
        direction: Direction,
    ) -> String {
        match direction {
            Direction::Outgoing => format!(
                "SELECT DISTINCT ?entity WHERE {{ <{}> <{}> ?entity . }}",
                self.iri(entity.id()),
                self.iri(relation.name())
            ),
            Direction::Incoming => format!(
                "SELECT DISTINCT ?entity WHERE {{ ?entity <{}> <{}> . }}",
                self.iri(relation.name()),
                self.iri(entity.id())
            ),
        }
    }

    /// POSTs the query, retrying on transport failures and non-success
    /// statuses up to the configured count, and returns the values bound to
    /// `var` in order.
    fn run_query(&self, query: &str, var: &str) -> KgResult<Vec<String>> {
        let mut last_err = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff);
            }
            let response = self
                .client
                .post(&self.config.endpoint)
                .header("Accept", "application/sparql-results+json")
                .form(&[("query", query)])
                .send();
            match response {
                Ok(resp) if resp.status().is_success() => {
                    let body: Value = resp.json().map_err(|e| KgError::Protocol(e.to_string()))?;
                    return self.parse_bindings(&body, var);
                }
                Ok(resp) => {
                    last_err = format!("endpoint returned HTTP {}", resp.status());
                }
                Err(e) => {
                    last_err = e.to_string();
                }
            }
        }
        Err(KgError::Backend { query: query.to_string(), msg: last_err })
    }

    fn parse_bindings(&self, body: &Value, var: &str) -> KgResult<Vec<String>> {
        let bindings = body
            .get("results")
            .and_then(|r| r.get("bindings"))
            .and_then(|b| b.as_array())
            .ok_or_else(|| KgError::Protocol("missing results.bindings array".into()))?;
        let mut out = Vec::with_capacity(bindings.len());
        for binding in bindings {
            let value = binding
                .get(var)
                .and_then(|v| v.get("value"))
                .and_then(|v| v.as_str())
                .ok_or_else(|| {
                    KgError::Protocol(format!("binding missing `{var}.value` string"))
                })?;
            let stripped = value.strip_prefix(&self.config.iri_prefix).unwrap_or(value);
            if stripped.is_empty() {
                return Err(KgError::Protocol("empty identifier in binding".into()));
            }
            out.push(stripped.to_string());
        }
        Ok(out)
    }
}

impl KnowledgeGraph for SparqlBackend {
    fn relations_of(&self, entity: &EntityId) -> KgResult<Vec<(Relation, Direction)>> {
        let mut out = Vec::new();
        for name in self.run_query(&self.outgoing_relations_query(entity), "relation")? {
            out.push((Relation::new(name), Direction::Outgoing));
        }
        for name in self.run_query(&self.incoming_relations_query(entity), "relation")? {
            out.push((Relation::new(name), Direction::Incoming));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn expand(
        &self,
        entity: &EntityId,
        relation: &Relation,
        direction: Direction,
    ) -> KgResult<Vec<EntityId>> {
        let query = self.expand_query(entity, relation, direction);
        let mut ids = self.run_query(&query, "entity")?;
        ids.sort();
        ids.dedup();
        Ok(ids.into_iter().map(EntityId::new).collect())
    }
}

/// Percent-encodes characters that cannot appear inside an IRI reference:
/// quotes, angle brackets, braces, whitespace, control characters, and the
/// escape-introducing characters themselves.
pub fn escape_identifier(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' | '%' => {
                out.push_str(&format!("%{:02X}", c as u32));
            }
            c if (c as u32) <= 0x20 => out.push_str(&format!("%{:02X}", c as u32)),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping_handles_quotes_and_spaces() {
        assert_eq!(escape_identifier(r#"m."odd" id"#), "m.%22odd%22%20id");
        assert_eq!(escape_identifier("plain_id"), "plain_id");
        assert_eq!(escape_identifier("50%"), "50%25");
    }

    #[test]
    fn query_templates_are_stable() {
        let backend = SparqlBackend::new(SparqlConfig {
            iri_prefix: "http://kg/".into(),
            ..SparqlConfig::default()
        })
        .unwrap();
        assert_eq!(
            backend.outgoing_relations_query(&EntityId::new("m.01")),
            "SELECT DISTINCT ?relation WHERE { <http://kg/m.01> ?relation ?object . }"
        );
        assert_eq!(
            backend.expand_query(
                &EntityId::new("m.01"),
                &Relation::new("people.born_in"),
                Direction::Incoming
            ),
            "SELECT DISTINCT ?entity WHERE { ?entity <http://kg/people.born_in> <http://kg/m.01> . }"
        );
    }
}
