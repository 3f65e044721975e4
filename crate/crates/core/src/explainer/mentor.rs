//! Music theory mentor: a pluggable live backend with a packaged offline stub.

use std::sync::OnceLock;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Glossary;

pub const DEFAULT_CANNED: &str = include_str!("../../data/mentor_canned.txt");
pub const SYSTEM_PROMPT_VERSION: &str = "mentor-v1";
pub const DEFAULT_SYSTEM_PROMPT: &str = "You are a patient music theory mentor for a composer who is not a trained musician. \
Answer in plain language in at most five sentences, give one concrete example in a major key, \
and define any technical term you use.";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MentorError {
    #[error("mentor query is empty")]
    EmptyQuery,
    #[error("mentor unavailable: {0}")]
    MentorUnavailable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MentorSource {
    Live,
    Stub,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentorExchange {
    pub query: String,
    pub response: String,
    pub source: MentorSource,
    /// Set when a configured live endpoint failed and the stub answered instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentorConfig {
    pub endpoint: Option<String>,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    pub timeout_secs: u64,
    pub system_prompt: String,
    pub prompt_version: String,
}

impl Default for MentorConfig {
    fn default() -> Self {
        MentorConfig {
            endpoint: None,
            api_key: None,
            timeout_secs: 10,
            system_prompt: DEFAULT_SYSTEM_PROMPT.to_string(),
            prompt_version: SYSTEM_PROMPT_VERSION.to_string(),
        }
    }
}

impl MentorConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    pub fn is_live(&self) -> bool {
        self.endpoint.as_deref().is_some_and(|e| !e.trim().is_empty())
    }
}

/// A live chat-completion client. Implementations do their own network I/O.
pub trait MentorBackend {
    fn ask(&self, system_prompt: &str, query: &str, timeout: Duration) -> Result<String, MentorError>;
}

/// Lower case, punctuation to spaces, `-` between numerals to spaces, single spaces.
pub fn normalize_query(q: &str) -> String {
    let mapped: String =
        q.chars().map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { ' ' }).collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone)]
pub struct StubMentor {
    canned: Vec<(String, String)>,
}

impl StubMentor {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut canned = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('|').ok_or_else(|| format!("line {}: expected `key | answer`", n + 1))?;
            let (k, v) = (normalize_query(k), v.trim().to_string());
            if k.is_empty() || v.is_empty() {
                return Err(format!("line {}: empty key or answer", n + 1));
            }
            canned.push((k, v));
        }
        Ok(StubMentor { canned })
    }

    pub fn builtin() -> &'static StubMentor {
        static S: OnceLock<StubMentor> = OnceLock::new();
        S.get_or_init(|| StubMentor::parse(DEFAULT_CANNED).expect("shipped canned answers parse"))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.canned.iter().map(|(k, _)| k.as_str())
    }

    /// Exact canned key, then the longest canned key contained in the query,
    /// then a glossary term, then a generic pointer.
    pub fn answer(&self, query: &str, glossary: &Glossary) -> String {
        let q = normalize_query(query);
        if let Some((_, a)) = self.canned.iter().find(|(k, _)| *k == q) {
            return a.clone();
        }
        let padded = format!(" {q} ");
        if let Some((_, a)) = self
            .canned
            .iter()
            .filter(|(k, _)| padded.contains(&format!(" {k} ")))
            .max_by_key(|(k, _)| k.len())
        {
            return a.clone();
        }
        let entry = glossary
            .entries()
            .filter(|e| {
                let id = normalize_query(&e.id);
                let name = normalize_query(&e.name);
                q == id || q == name || padded.contains(&format!(" {id} ")) || padded.contains(&format!(" {name} "))
            })
            .max_by_key(|e| e.name.len());
        match entry {
            Some(e) => format!("{}: {}", e.name, e.definition),
            None => "I do not have a stored answer for that yet. Try one of the linked terms in the explanation, \
such as tonic, dominant, cadence or trill."
                .to_string(),
        }
    }
}

/// Answers `query` from the live backend when one is given, otherwise from the stub.
/// A failing live backend falls back to the stub with a warning.
pub fn mentor_ask(
    query: &str,
    config: &MentorConfig,
    live: Option<&dyn MentorBackend>,
) -> Result<MentorExchange, MentorError> {
    let query = query.trim();
    if query.is_empty() {
        return Err(MentorError::EmptyQuery);
    }
    let stub = |warning| MentorExchange {
        query: query.to_string(),
        response: StubMentor::builtin().answer(query, Glossary::builtin()),
        source: MentorSource::Stub,
        warning,
    };
    match live.filter(|_| config.is_live()) {
        None => Ok(stub(None)),
        Some(backend) => match backend.ask(&config.system_prompt, query, config.timeout()) {
            Ok(r) if !r.trim().is_empty() => Ok(MentorExchange {
                query: query.to_string(),
                response: r,
                source: MentorSource::Live,
                warning: None,
            }),
            Ok(_) => Ok(stub(Some(MentorError::MentorUnavailable("empty response".into()).to_string()))),
            Err(e) => Ok(stub(Some(e.to_string()))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Failing;
    impl MentorBackend for Failing {
        fn ask(&self, _: &str, _: &str, _: Duration) -> Result<String, MentorError> {
            Err(MentorError::MentorUnavailable("connection refused".into()))
        }
    }

    struct Echo;
    impl MentorBackend for Echo {
        fn ask(&self, system: &str, q: &str, _: Duration) -> Result<String, MentorError> {
            Ok(format!("{}|{q}", system.len()))
        }
    }

    fn live() -> MentorConfig {
        MentorConfig { endpoint: Some("http://127.0.0.1:9/chat".into()), ..MentorConfig::default() }
    }

    #[test]
    fn circle_of_fifths_from_canned_set() {
        let x = mentor_ask("circle of fifths", &MentorConfig::default(), None).unwrap();
        assert_eq!(x.source, MentorSource::Stub);
        let canned: Vec<&str> = DEFAULT_CANNED.lines().filter_map(|l| l.split_once('|')).map(|(_, a)| a.trim()).collect();
        assert!(canned.contains(&x.response.as_str()));
    }

    #[test]
    fn progression_question_answered() {
        let x = mentor_ask("I-VI-V-I progression", &MentorConfig::default(), None).unwrap();
        assert!(!x.response.is_empty());
        assert!(x.response.contains("vi"));
    }

    #[test]
    fn empty_query_rejected() {
        assert_eq!(mentor_ask("  ", &MentorConfig::default(), None), Err(MentorError::EmptyQuery));
    }

    #[test]
    fn glossary_fallback_and_generic_fallback() {
        let g = Glossary::builtin();
        let a = StubMentor::builtin().answer("arpeggio", g);
        assert!(a.starts_with(&g.get("arpeggio").unwrap().name));
        assert!(!StubMentor::builtin().answer("zzz qqq", g).is_empty());
    }

    #[test]
    fn every_glossary_term_gets_an_answer() {
        let g = Glossary::builtin();
        for e in g.entries() {
            let x = mentor_ask(&e.id, &MentorConfig::default(), None).unwrap();
            assert!(!x.response.starts_with("I do not have"), "{}", e.id);
        }
    }

    #[test]
    fn live_failure_falls_back_to_stub() {
        let x = mentor_ask("tonic", &live(), Some(&Failing)).unwrap();
        assert_eq!(x.source, MentorSource::Stub);
        assert!(x.warning.unwrap().contains("unavailable"));
    }

    #[test]
    fn live_answer_used_when_configured() {
        let x = mentor_ask("tonic", &live(), Some(&Echo)).unwrap();
        assert_eq!(x.source, MentorSource::Live);
        assert_eq!(x.response, format!("{}|tonic", DEFAULT_SYSTEM_PROMPT.len()));
        let off = mentor_ask("tonic", &MentorConfig::default(), Some(&Echo)).unwrap();
        assert_eq!(off.source, MentorSource::Stub);
    }
}
