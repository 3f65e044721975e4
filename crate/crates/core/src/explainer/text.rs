use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use regex::Regex;

pub const DEFAULT_GLOSSARY: &str = include_str!("../../data/glossary.txt");
pub const DEFAULT_TEMPLATES: &str = include_str!("../../data/explain.toml");

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GlossaryEntry {
    pub id: String,
    pub name: String,
    pub definition: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glossary {
    entries: BTreeMap<String, GlossaryEntry>,
}

impl Glossary {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.splitn(3, '|').map(str::trim).collect();
            let [id, name, definition] = fields[..] else {
                return Err(format!("glossary line {}: expected `id | name | definition`", n + 1));
            };
            let entry = GlossaryEntry { id: id.into(), name: name.into(), definition: definition.into() };
            if entries.insert(id.to_string(), entry).is_some() {
                return Err(format!("glossary line {}: duplicate id {id}", n + 1));
            }
        }
        Ok(Glossary { entries })
    }

    pub fn builtin() -> &'static Glossary {
        static G: OnceLock<Glossary> = OnceLock::new();
        G.get_or_init(|| Glossary::parse(DEFAULT_GLOSSARY).expect("shipped glossary parses"))
    }

    pub fn get(&self, id: &str) -> Option<&GlossaryEntry> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &GlossaryEntry> {
        self.entries.values()
    }
}

fn link_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[\[([a-z0-9-]+)(?:\|([^\]]*))?\]\]").unwrap())
}

/// Linked term ids in order of first appearance.
pub fn linked_terms(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in link_re().captures_iter(text) {
        let id = c[1].to_string();
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

/// Replaces each link with its shown text (or the glossary name), passed through `wrap`.
pub fn render_links(text: &str, glossary: &Glossary, wrap: impl Fn(&str) -> String) -> String {
    link_re()
        .replace_all(text, |c: &regex::Captures| {
            let shown = match c.get(2) {
                Some(s) => s.as_str().to_string(),
                None => glossary.get(&c[1]).map(|e| e.name.clone()).unwrap_or_else(|| c[1].to_string()),
            };
            wrap(&shown)
        })
        .into_owned()
}

pub fn render_plain(text: &str, glossary: &Glossary) -> String {
    render_links(text, glossary, |s| s.to_string())
}

pub fn render_markdown(text: &str, glossary: &Glossary) -> String {
    render_links(text, glossary, |s| format!("*{s}*"))
}

/// scope → level → key → template.
#[derive(Debug, Clone)]
pub struct Templates {
    table: HashMap<String, HashMap<String, HashMap<String, String>>>,
}

impl Templates {
    pub fn parse(text: &str) -> Result<Self, String> {
        let table = toml::from_str(text).map_err(|e| e.to_string())?;
        Ok(Templates { table })
    }

    pub fn builtin() -> &'static Templates {
        static T: OnceLock<Templates> = OnceLock::new();
        T.get_or_init(|| Templates::parse(DEFAULT_TEMPLATES).expect("shipped templates parse"))
    }

    pub fn get(&self, scope: &str, level: &str, key: &str) -> &str {
        self.table
            .get(scope)
            .and_then(|l| l.get(level))
            .and_then(|k| k.get(key))
            .unwrap_or_else(|| panic!("missing template {scope}.{level}.{key}"))
    }

    pub fn all(&self) -> impl Iterator<Item = (String, &str)> {
        self.table.iter().flat_map(|(s, levels)| {
            levels.iter().flat_map(move |(l, keys)| keys.iter().map(move |(k, t)| (format!("{s}.{l}.{k}"), t.as_str())))
        })
    }
}

/// Substitutes `{name}` slots. Unknown slots are a template bug.
pub fn fill(template: &str, slots: &[(&str, String)]) -> String {
    let mut out = String::with_capacity(template.len() + 32);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').map(|c| open + c).expect("unterminated slot");
        let name = &rest[open + 1..close];
        let value = slots
            .iter()
            .find(|(k, _)| *k == name)
            .unwrap_or_else(|| panic!("no value for slot {{{name}}} in {template:?}"));
        out.push_str(&value.1);
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out
}

/// "a", "a and b", "a, b and c".
pub fn join_and(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}
