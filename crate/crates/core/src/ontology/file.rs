//! Ontology document: the context file vocabulary plus concept entries
//! with bilingual labels and weighted `narrower` links.
//!
//! ```xml
//! <ontology>
//!   <Contexte Num="1" Name="حج" NameEn="Hajj" Nbrconcept="1">
//!     <concept ConceptId="5" ConceptName="طواف" Weight="1" />
//!   </Contexte>
//!   <concept num="5" Name="طواف" NameEn="Tawaf">
//!     <narrower ConceptId="7" Weight="0.8" />
//!   </concept>
//! </ontology>
//! ```

use std::fmt::Write as _;

use quick_xml::escape::escape;

use crate::corpus::tree::{line_col, parse_document, Element};
use crate::corpus::{
    parse_decimal, ConceptId, ContextMember, ContextRecord, Corpus, CorpusError, ExtraAttrs,
    Labels,
};

#[derive(Debug, Clone, PartialEq)]
pub struct OntologyConcept {
    pub concept_id: ConceptId,
    pub labels: Labels,
    pub narrower: Vec<(ConceptId, f64)>,
    pub extra: ExtraAttrs,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OntologyFile {
    pub contexts: Vec<ContextRecord>,
    pub concepts: Vec<OntologyConcept>,
}

impl OntologyFile {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let contexts = corpus
            .contexts()
            .values()
            .map(|ctx| ContextRecord {
                id: ctx.context_id,
                labels: ctx.labels.clone(),
                nbr_concept: ctx.members.len() as u32,
                members: ctx
                    .members
                    .iter()
                    .map(|(&concept_id, &weight)| ContextMember {
                        concept_id,
                        concept_name: corpus
                            .concept(concept_id)
                            .map(|c| c.labels.ar.clone())
                            .unwrap_or_default(),
                        weight,
                        extra: vec![],
                    })
                    .collect(),
                extra: vec![],
            })
            .collect();
        let concepts = corpus
            .concepts()
            .values()
            .map(|c| OntologyConcept {
                concept_id: c.concept_id,
                labels: c.labels.clone(),
                narrower: vec![],
                extra: vec![],
            })
            .collect();
        OntologyFile { contexts, concepts }
    }
}

fn invalid(input: &[u8], el: &Element, message: impl Into<String>) -> CorpusError {
    let (line, column) = line_col(input, el.offset);
    CorpusError::Validation {
        element: el.name.clone(),
        message: format!("{} (line {line}, column {column})", message.into()),
    }
}

fn id_attr(input: &[u8], el: &Element, key: &str) -> Result<u32, CorpusError> {
    el.attr(key)
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|v| *v >= 1)
        .ok_or_else(|| invalid(input, el, format!("`{key}` must be a positive integer")))
}

fn unit_weight(input: &[u8], el: &Element) -> Result<f64, CorpusError> {
    match el.attr("Weight") {
        None => Ok(1.0),
        Some(raw) => parse_decimal(raw)
            .filter(|w| (0.0..=1.0).contains(w))
            .ok_or_else(|| invalid(input, el, format!("Weight \"{raw}\" is outside [0, 1]"))),
    }
}

fn labels(input: &[u8], el: &Element) -> Result<Labels, CorpusError> {
    let ar = el
        .attr("Name")
        .filter(|s| !s.trim().is_empty())
        .ok_or_else(|| invalid(input, el, "missing attribute `Name`"))?;
    let en = el.attr("NameEn").filter(|s| !s.trim().is_empty());
    Ok(Labels::new(ar, en.map(str::to_string)))
}

pub fn parse_ontology_file(input: &[u8]) -> Result<OntologyFile, CorpusError> {
    let root = parse_document(input)?;
    if root.name != "ontology" {
        return Err(invalid(input, &root, "expected root element <ontology>"));
    }
    let mut file = OntologyFile::default();
    for el in &root.children {
        match el.name.as_str() {
            "Contexte" => {
                let id = id_attr(input, el, "Num")?;
                if file.contexts.iter().any(|c| c.id == id) {
                    return Err(invalid(input, el, format!("duplicate Contexte Num {id}")));
                }
                let mut members = Vec::new();
                for m in &el.children {
                    if m.name != "concept" {
                        return Err(invalid(input, m, "expected <concept> inside <Contexte>"));
                    }
                    members.push(ContextMember {
                        concept_id: id_attr(input, m, "ConceptId")?,
                        concept_name: m.attr("ConceptName").unwrap_or_default().to_string(),
                        weight: unit_weight(input, m)?,
                        extra: m.extra_attrs(&["ConceptId", "ConceptName", "Weight"]),
                    });
                }
                let nbr_concept = match el.attr("Nbrconcept") {
                    Some(raw) => raw
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| invalid(input, el, "`Nbrconcept` is not an integer"))?,
                    None => members.len() as u32,
                };
                if nbr_concept as usize != members.len() {
                    return Err(invalid(
                        input,
                        el,
                        format!("Nbrconcept=\"{nbr_concept}\" but {} concept children", members.len()),
                    ));
                }
                file.contexts.push(ContextRecord {
                    id,
                    labels: labels(input, el)?,
                    nbr_concept,
                    members,
                    extra: el.extra_attrs(&["Num", "Name", "NameEn", "Nbrconcept"]),
                });
            }
            "concept" => {
                let concept_id = id_attr(input, el, "num")?;
                if file.concepts.iter().any(|c| c.concept_id == concept_id) {
                    return Err(invalid(input, el, format!("duplicate concept num {concept_id}")));
                }
                let mut narrower = Vec::new();
                for n in &el.children {
                    if n.name != "narrower" {
                        return Err(invalid(input, n, "expected <narrower> inside <concept>"));
                    }
                    narrower.push((id_attr(input, n, "ConceptId")?, unit_weight(input, n)?));
                }
                file.concepts.push(OntologyConcept {
                    concept_id,
                    labels: labels(input, el)?,
                    narrower,
                    extra: el.extra_attrs(&["num", "Name", "NameEn"]),
                });
            }
            other => {
                return Err(invalid(
                    input,
                    el,
                    format!("unexpected <{other}> inside <ontology>"),
                ))
            }
        }
    }
    Ok(file)
}

fn attrs(out: &mut String, pairs: &[(&str, &str)], extra: &ExtraAttrs) {
    for (k, v) in pairs
        .iter()
        .copied()
        .chain(extra.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    {
        let _ = write!(out, " {k}=\"{}\"", escape(v));
    }
}

pub fn write_ontology_file(file: &OntologyFile) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<ontology>\n");
    for ctx in &file.contexts {
        let num = ctx.id.to_string();
        let nbr = ctx.nbr_concept.to_string();
        let mut pairs = vec![("Num", num.as_str()), ("Name", ctx.labels.ar.as_str())];
        if let Some(en) = &ctx.labels.en {
            pairs.push(("NameEn", en));
        }
        pairs.push(("Nbrconcept", &nbr));
        out.push_str("  <Contexte");
        attrs(&mut out, &pairs, &ctx.extra);
        if ctx.members.is_empty() {
            out.push_str(" />\n");
            continue;
        }
        out.push_str(">\n");
        for m in &ctx.members {
            let id = m.concept_id.to_string();
            let w = m.weight.to_string();
            out.push_str("    <concept");
            attrs(
                &mut out,
                &[("ConceptId", &id), ("ConceptName", &m.concept_name), ("Weight", &w)],
                &m.extra,
            );
            out.push_str(" />\n");
        }
        out.push_str("  </Contexte>\n");
    }
    for c in &file.concepts {
        let num = c.concept_id.to_string();
        let mut pairs = vec![("num", num.as_str()), ("Name", c.labels.ar.as_str())];
        if let Some(en) = &c.labels.en {
            pairs.push(("NameEn", en));
        }
        out.push_str("  <concept");
        attrs(&mut out, &pairs, &c.extra);
        if c.narrower.is_empty() {
            out.push_str(" />\n");
            continue;
        }
        out.push_str(">\n");
        for (id, w) in &c.narrower {
            let _ = writeln!(out, "    <narrower ConceptId=\"{id}\" Weight=\"{w}\" />");
        }
        out.push_str("  </concept>\n");
    }
    out.push_str("</ontology>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let xml = r#"<ontology>
            <Contexte Num="1" Name="حج" NameEn="Hajj" Nbrconcept="1" extra="y">
              <concept ConceptId="5" ConceptName="طواف" Weight="0.5"/>
            </Contexte>
            <concept num="5" Name="طواف"><narrower ConceptId="6" Weight="0.25"/></concept>
            <concept num="6" Name="سعي" NameEn="Sa'i &amp; more"/>
        </ontology>"#;
        let file = parse_ontology_file(xml.as_bytes()).unwrap();
        assert_eq!(file.contexts[0].extra, vec![("extra".into(), "y".into())]);
        assert_eq!(file.concepts[0].narrower, vec![(6, 0.25)]);
        assert_eq!(file.concepts[1].labels.en.as_deref(), Some("Sa'i & more"));
        let again = parse_ontology_file(write_ontology_file(&file).as_bytes()).unwrap();
        assert_eq!(again, file);
    }

    #[test]
    fn rejects_bad_weight_and_elements() {
        let bad_weight = r#"<ontology><concept num="1" Name="a"><narrower ConceptId="2" Weight="2"/></concept></ontology>"#;
        assert!(parse_ontology_file(bad_weight.as_bytes()).is_err());
        let bad_el = r#"<ontology><thing/></ontology>"#;
        assert!(parse_ontology_file(bad_el.as_bytes()).is_err());
    }
}
