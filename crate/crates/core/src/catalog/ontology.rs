use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CatalogError;
use crate::text::collapse_whitespace;
use crate::{split_camel_case, Kind};
use unicode_normalization::UnicodeNormalization;

const SUFFIXES: [&str; 2] = ["Trigger", "Action"];
const XML_NODES_LIMIT: u32 = 2_000_000;

/// A high-level trigger or action name taken from the ontology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyTerm {
    pub name: String,
    pub kind: Kind,
    pub raw_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyCatalog {
    pub triggers: Vec<OntologyTerm>,
    pub actions: Vec<OntologyTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OntologyFormat {
    OntologyXml,
    PreparedJson,
}

impl OntologyFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OntologyFormat::PreparedJson,
            _ => OntologyFormat::OntologyXml,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OntologyConfig {
    /// Local name of the class every trigger class descends from.
    pub trigger_root: String,
    /// Local name of the class every action class descends from.
    pub action_root: String,
    /// Turn `DeviceTurnedOff` into `Device Turned Off`.
    pub split_camel_case: bool,
}

impl Default for OntologyConfig {
    fn default() -> Self {
        Self {
            trigger_root: "Trigger".to_string(),
            action_root: "Action".to_string(),
            split_camel_case: true,
        }
    }
}

pub fn load_ontology(path: &Path, format: OntologyFormat, cfg: &OntologyConfig) -> Result<OntologyCatalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        OntologyFormat::OntologyXml => parse_ontology_xml(&text, cfg),
        OntologyFormat::PreparedJson => parse_ontology_json(&text, cfg),
    }
}

/// Turns an ontology class identifier into a display name: suffixes
/// stripped, camel case optionally split.
fn term_name(raw_id: &str, cfg: &OntologyConfig) -> String {
    let base = if cfg.split_camel_case {
        split_camel_case(raw_id)
    } else {
        collapse_whitespace(raw_id)
    };
    let mut name: String = base.nfc().collect();
    loop {
        let before = name.len();
        for suffix in SUFFIXES {
            if let Some(stripped) = name.strip_suffix(suffix) {
                name = stripped.trim_end().to_string();
            }
        }
        if name.len() == before {
            break name;
        }
    }
}

/// Local part of an IRI: whatever follows the last `#` or `/`.
fn local_id(iri: &str) -> &str {
    let iri = iri.trim();
    iri.rsplit(['#', '/']).next().unwrap_or(iri)
}

/// Extracts trigger and action classes from an OWL/RDF XML document.
///
/// A class is any element named `Class` (in any namespace) carrying an
/// `about` or `ID` attribute. Parent links come from `subClassOf` children,
/// either through a `resource` attribute or a nested `Class` element. Every
/// transitive subclass of the configured roots becomes a term; the roots
/// themselves do not.
pub fn parse_ontology_xml(input: &str, cfg: &OntologyConfig) -> Result<OntologyCatalog, CatalogError> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        nodes_limit: XML_NODES_LIMIT,
    };
    let doc = roxmltree::Document::parse_with_options(input, opts).map_err(|e| CatalogError::Ontology(e.to_string()))?;

    let mut order: Vec<String> = Vec::new();
    let mut declared: HashSet<String> = HashSet::new();
    let mut children: HashMap<String, Vec<String>> = HashMap::new();
    for node in doc.descendants().filter(|n| n.is_element() && n.tag_name().name() == "Class") {
        let Some(id) = class_id(&node) else { continue };
        if declared.insert(id.clone()) {
            order.push(id.clone());
        }
        for sup in node.children().filter(|c| c.is_element() && c.tag_name().name() == "subClassOf") {
            let parents = attr(&sup, "resource")
                .map(|r| vec![local_id(r).to_string()])
                .unwrap_or_else(|| {
                    sup.children()
                        .filter(|c| c.is_element() && c.tag_name().name() == "Class")
                        .filter_map(|c| class_id(&c))
                        .collect()
                });
            for parent in parents {
                children.entry(parent).or_default().push(id.clone());
            }
        }
    }

    let position: HashMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let collect = |root: &str, kind: Kind| -> Vec<OntologyTerm> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([root.to_string()]);
        seen.insert(root.to_string());
        let mut found = Vec::new();
        while let Some(id) = queue.pop_front() {
            for child in children.get(&id).into_iter().flatten() {
                if seen.insert(child.clone()) {
                    found.push(child.clone());
                    queue.push_back(child.clone());
                }
            }
        }
        found.sort_by_key(|id| position.get(id.as_str()).copied().unwrap_or(usize::MAX));
        found
            .into_iter()
            .map(|raw_id| OntologyTerm {
                name: term_name(&raw_id, cfg),
                kind,
                raw_id,
            })
            .collect()
    };

    finish(collect(&cfg.trigger_root, Kind::Trigger), collect(&cfg.action_root, Kind::Action))
}

fn attr<'a>(node: &roxmltree::Node<'a, '_>, local: &str) -> Option<&'a str> {
    node.attributes().find(|a| a.name() == local).map(|a| a.value())
}

fn class_id(node: &roxmltree::Node<'_, '_>) -> Option<String> {
    attr(node, "about")
        .or_else(|| attr(node, "ID"))
        .map(local_id)
        .filter(|id| !id.is_empty())
        .map(str::to_string)
}

#[derive(Deserialize)]
struct PreparedOntology {
    triggers: Vec<PreparedEntry>,
    actions: Vec<PreparedEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PreparedEntry {
    Name(String),
    Term { name: String, raw_id: Option<String> },
}

/// Reads a prepared ontology list: `{"triggers": [...], "actions": [...]}`
/// where entries are plain names or `{"name", "raw_id"}` objects.
pub fn parse_ontology_json(input: &str, cfg: &OntologyConfig) -> Result<OntologyCatalog, CatalogError> {
    let prepared: PreparedOntology = serde_json::from_str(input).map_err(|e| CatalogError::Ontology(e.to_string()))?;
    let convert = |entries: Vec<PreparedEntry>, kind: Kind| -> Vec<OntologyTerm> {
        entries
            .into_iter()
            .map(|entry| {
                let (name, raw_id) = match entry {
                    PreparedEntry::Name(n) => (n.clone(), n),
                    PreparedEntry::Term { name, raw_id } => {
                        let raw = raw_id.unwrap_or_else(|| name.clone());
                        (name, raw)
                    }
                };
                OntologyTerm {
                    name: term_name(&name, cfg),
                    kind,
                    raw_id,
                }
            })
            .collect()
    };
    finish(convert(prepared.triggers, Kind::Trigger), convert(prepared.actions, Kind::Action))
}

fn finish(triggers: Vec<OntologyTerm>, actions: Vec<OntologyTerm>) -> Result<OntologyCatalog, CatalogError> {
    let dedup = |terms: Vec<OntologyTerm>, kind: Kind| {
        let mut seen = HashSet::new();
        let terms: Vec<_> = terms
            .into_iter()
            .filter(|t| !t.name.is_empty() && seen.insert(t.name.clone()))
            .collect();
        if terms.is_empty() {
            Err(CatalogError::EmptyOntology(kind))
        } else {
            Ok(terms)
        }
    };
    Ok(OntologyCatalog {
        triggers: dedup(triggers, Kind::Trigger)?,
        actions: dedup(actions, Kind::Action)?,
    })
}

impl OntologyCatalog {
    pub fn terms(&self, kind: Kind) -> &[OntologyTerm] {
        match kind {
            Kind::Trigger => &self.triggers,
            Kind::Action => &self.actions,
        }
    }

    pub fn contains(&self, name: &str, kind: Kind) -> bool {
        self.terms(kind).iter().any(|t| t.name == name)
    }

    /// Prepared JSON form, readable by [`parse_ontology_json`].
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            name: &'a str,
            raw_id: &'a str,
        }
        #[derive(Serialize)]
        struct Prepared<'a> {
            triggers: Vec<Entry<'a>>,
            actions: Vec<Entry<'a>>,
        }
        fn entries(terms: &[OntologyTerm]) -> Vec<Entry<'_>> {
            terms.iter().map(|t| Entry { name: &t.name, raw_id: &t.raw_id }).collect()
        }
        serde_json::to_string_pretty(&Prepared {
            triggers: entries(&self.triggers),
            actions: entries(&self.actions),
        })
        .expect("ontology serialisation is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OWL: &str = r##"<?xml version="1.0"?>
<!DOCTYPE rdf:RDF [ <!ENTITY eup "http://example.org/eupont#" > ]>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:owl="http://www.w3.org/2002/07/owl#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#">
  <owl:Class rdf:about="&eup;Trigger"/>
  <owl:Class rdf:about="&eup;DeviceTurnedOffTrigger">
    <rdfs:subClassOf rdf:resource="&eup;DeviceTrigger"/>
  </owl:Class>
  <owl:Class rdf:about="&eup;DeviceTrigger">
    <rdfs:subClassOf rdf:resource="&eup;Trigger"/>
  </owl:Class>
  <owl:Class rdf:ID="X">
    <rdfs:subClassOf><owl:Class rdf:about="#Trigger"/></rdfs:subClassOf>
  </owl:Class>
  <owl:Class rdf:about="&eup;Action"/>
  <owl:Class rdf:about="&eup;SendMessageAction">
    <rdfs:subClassOf rdf:resource="&eup;Action"/>
  </owl:Class>
  <owl:Class rdf:about="&eup;Lamp"/>
</rdf:RDF>"##;

    #[test]
    fn extracts_transitive_subclasses() {
        let onto = parse_ontology_xml(OWL, &OntologyConfig::default()).unwrap();
        let names: Vec<_> = onto.triggers.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, vec!["Device Turned Off", "Device", "X"]);
        assert_eq!(onto.triggers[0].raw_id, "DeviceTurnedOffTrigger");
        assert_eq!(onto.triggers[0].kind, Kind::Trigger);
        assert_eq!(onto.actions[0].name, "Send Message");
    }

    #[test]
    fn camel_split_can_be_disabled() {
        let cfg = OntologyConfig {
            split_camel_case: false,
            ..Default::default()
        };
        let onto = parse_ontology_xml(OWL, &cfg).unwrap();
        assert_eq!(onto.triggers[0].name, "DeviceTurnedOff");
    }

    #[test]
    fn suffix_rules() {
        let cfg = OntologyConfig::default();
        assert_eq!(term_name("DeviceTurnedOffTrigger", &cfg), "Device Turned Off");
        assert_eq!(term_name("X", &cfg), "X");
        assert_eq!(term_name("SendActionTrigger", &cfg), "Send");
        assert_eq!(term_name("Trigger", &cfg), "");
    }

    #[test]
    fn prepared_json() {
        let onto = parse_ontology_json(
            r#"{"triggers":["Every Time","Every Day"],"actions":[{"name":"Send Message","raw_id":"SendMessageAction"}]}"#,
            &OntologyConfig::default(),
        )
        .unwrap();
        assert_eq!(onto.triggers.len(), 2);
        assert_eq!(onto.triggers[1].name, "Every Day");
        assert_eq!(onto.actions[0].raw_id, "SendMessageAction");
        let again = parse_ontology_json(&onto.to_json(), &OntologyConfig::default()).unwrap();
        assert_eq!(again, onto);
    }

    #[test]
    fn empty_kind_is_an_error() {
        let err = parse_ontology_json(r#"{"triggers":["A"],"actions":[]}"#, &OntologyConfig::default()).unwrap_err();
        assert!(matches!(err, CatalogError::EmptyOntology(Kind::Action)));
        let err = parse_ontology_xml("<rdf:RDF xmlns:rdf='r'/>", &OntologyConfig::default()).unwrap_err();
        assert!(matches!(err, CatalogError::EmptyOntology(Kind::Trigger)));
    }

    #[test]
    fn unparseable_xml() {
        assert!(matches!(
            parse_ontology_xml("<a><b></a>", &OntologyConfig::default()),
            Err(CatalogError::Ontology(_))
        ));
    }

    #[test]
    fn cyclic_hierarchy_terminates() {
        let xml = r##"<r xmlns:o="o" xmlns:s="s">
          <o:Class o:about="#A"><s:subClassOf s:resource="#Trigger"/><s:subClassOf s:resource="#B"/></o:Class>
          <o:Class o:about="#B"><s:subClassOf s:resource="#A"/></o:Class>
          <o:Class o:about="#Go"><s:subClassOf s:resource="#Action"/></o:Class>
        </r>"##;
        let onto = parse_ontology_xml(xml, &OntologyConfig::default()).unwrap();
        assert_eq!(onto.triggers.len(), 2);
    }
}
