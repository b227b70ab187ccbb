//! Readers and writers for the three corpus documents.
//!
//! ```text
//! shot listings        <concept>
//!                        <videoFeatureExtractionFeatureResult fNum="1">
//!                          <item seqNum="1" shotId="shot11176_10"/>
//! concept descriptions <concepts>
//!                        <concept num="6" Name="..." [NameEn="..."]>
//!                          <video Num="00001" Name="VIDEO_00001" Weight="0.91"
//!                                 NUMBER_shots="3" shotrepres="shot00001_1"/>
//! context descriptions <contextes>
//!                        <Contexte Num="1" Name="..." [NameEn="..."] Nbrconcept="3">
//!                          <concept ConceptId="134" ConceptName="..." Weight="1"/>
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use quick_xml::escape::escape;

use super::tree::{line_col, parse_document, Element};
use super::{
    ConceptRecord, ContextMember, ContextRecord, CorpusError, Labels, Shot, ShotListing, VideoNum,
    VideoRef,
};

const SHOT_ROOT: &str = "concept";
const SHOT_LISTING: &str = "videoFeatureExtractionFeatureResult";
const SHOT_ITEM: &str = "item";
const CONCEPT_ROOT: &str = "concepts";
const CONCEPT: &str = "concept";
const VIDEO: &str = "video";
const CONTEXT_ROOT: &str = "contextes";
const CONTEXT: &str = "Contexte";
const MEMBER: &str = "concept";

const PROLOG: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

struct Doc<'a> {
    input: &'a [u8],
}

impl Doc<'_> {
    fn err(&self, el: &Element, message: impl Into<String>) -> CorpusError {
        let (line, column) = line_col(self.input, el.offset);
        CorpusError::Validation {
            element: el.name.clone(),
            message: format!("{} (line {line}, column {column})", message.into()),
        }
    }

    fn root(&self, expected: &str) -> Result<Element, CorpusError> {
        let root = parse_document(self.input)?;
        if root.name != expected {
            return Err(self.err(&root, format!("expected root element <{expected}>")));
        }
        Ok(root)
    }

    fn children<'e>(
        &self,
        parent: &'e Element,
        expected: &str,
    ) -> Result<&'e [Element], CorpusError> {
        match parent.children.iter().find(|c| c.name != expected) {
            Some(other) => Err(self.err(
                other,
                format!("unexpected element inside <{}>, expected <{expected}>", parent.name),
            )),
            None => Ok(&parent.children),
        }
    }

    fn required<'e>(&self, el: &'e Element, key: &str) -> Result<&'e str, CorpusError> {
        match el.attr(key) {
            Some(v) if !v.trim().is_empty() => Ok(v),
            Some(_) => Err(self.err(el, format!("attribute `{key}` is empty"))),
            None => Err(self.err(el, format!("missing attribute `{key}`"))),
        }
    }

    fn positive(&self, el: &Element, key: &str) -> Result<u32, CorpusError> {
        let raw = self.required(el, key)?;
        match raw.trim().parse::<u32>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(self.err(el, format!("`{key}`=\"{raw}\" is not a positive integer"))),
        }
    }

    fn count(&self, el: &Element, key: &str) -> Result<u32, CorpusError> {
        let raw = self.required(el, key)?;
        raw.trim()
            .parse::<u32>()
            .map_err(|_| self.err(el, format!("`{key}`=\"{raw}\" is not a non-negative integer")))
    }

    fn weight(&self, el: &Element, key: &str) -> Result<f64, CorpusError> {
        let raw = self.required(el, key)?;
        parse_decimal(raw)
            .ok_or_else(|| self.err(el, format!("`{key}`=\"{raw}\" is not a decimal number")))
            .and_then(|w| {
                if w < 0.0 {
                    Err(self.err(el, format!("`{key}`=\"{raw}\" is outside [0, +inf)")))
                } else {
                    Ok(w)
                }
            })
    }
}

/// Plain decimal with `.` as the only separator: `[+-]digits[.digits]`.
pub(crate) fn parse_decimal(raw: &str) -> Option<f64> {
    let s = raw.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    let ok = !int.is_empty()
        && digits(int)
        && frac.is_none_or(|f| !f.is_empty() && digits(f));
    if !ok {
        return None;
    }
    s.parse::<f64>().ok()
}

fn labels(doc: &Doc<'_>, el: &Element) -> Result<Labels, CorpusError> {
    let ar = doc.required(el, "Name")?.to_string();
    let en = el
        .attr("NameEn")
        .filter(|s| !s.trim().is_empty())
        .map(str::to_string);
    Ok(Labels { ar, en })
}

/// Parses a shot listing document (one listing per concept marker).
pub fn parse_concept_shot_file(input: &[u8]) -> Result<Vec<ShotListing>, CorpusError> {
    let doc = Doc { input };
    let root = doc.root(SHOT_ROOT)?;
    let mut listings = Vec::new();
    for listing in doc.children(&root, SHOT_LISTING)? {
        let marker = doc.required(listing, "fNum")?.to_string();
        let mut shots: Vec<Shot> = Vec::new();
        for item in doc.children(listing, SHOT_ITEM)? {
            let seq_num = doc.positive(item, "seqNum")?;
            let shot_id = doc.required(item, "shotId")?.to_string();
            if let Some(prev) = shots.last() {
                if seq_num == prev.seq_num {
                    return Err(doc.err(
                        item,
                        format!("duplicate seqNum {seq_num} in listing fNum=\"{marker}\""),
                    ));
                }
                if seq_num < prev.seq_num {
                    return Err(doc.err(
                        item,
                        format!(
                            "seqNum {seq_num} follows {} in listing fNum=\"{marker}\"",
                            prev.seq_num
                        ),
                    ));
                }
            }
            shots.push(Shot {
                shot_id,
                seq_num,
                extra: item.extra_attrs(&["seqNum", "shotId"]),
            });
        }
        listings.push(ShotListing {
            marker,
            shots,
            extra: listing.extra_attrs(&["fNum"]),
        });
    }
    Ok(listings)
}

/// Parses a concept description document. Video references stay
/// unresolved until [`super::finalize`].
pub fn parse_concept_video_file(input: &[u8]) -> Result<Vec<ConceptRecord>, CorpusError> {
    let doc = Doc { input };
    let root = doc.root(CONCEPT_ROOT)?;
    let mut seen = BTreeSet::new();
    let mut concepts = Vec::new();
    for el in doc.children(&root, CONCEPT)? {
        let id = doc.positive(el, "num")?;
        if !seen.insert(id) {
            return Err(doc.err(el, format!("duplicate concept num {id}")));
        }
        let labels = labels(&doc, el)?;
        let mut videos = Vec::new();
        for v in doc.children(el, VIDEO)? {
            videos.push(VideoRef {
                num: VideoNum::new(doc.required(v, "Num")?.trim()),
                name: doc.required(v, "Name")?.to_string(),
                weight: doc.weight(v, "Weight")?,
                number_shots: doc.positive(v, "NUMBER_shots")?,
                shot_repres: doc.required(v, "shotrepres")?.to_string(),
                extra: v.extra_attrs(&["Num", "Name", "Weight", "NUMBER_shots", "shotrepres"]),
            });
        }
        concepts.push(ConceptRecord {
            id,
            labels,
            videos,
            extra: el.extra_attrs(&["num", "Name", "NameEn"]),
        });
    }
    Ok(concepts)
}

/// Parses a context description document.
pub fn parse_context_file(input: &[u8]) -> Result<Vec<ContextRecord>, CorpusError> {
    let doc = Doc { input };
    let root = doc.root(CONTEXT_ROOT)?;
    let mut seen = BTreeSet::new();
    let mut contexts = Vec::new();
    for el in doc.children(&root, CONTEXT)? {
        let id = doc.positive(el, "Num")?;
        if !seen.insert(id) {
            return Err(doc.err(el, format!("duplicate Contexte Num {id}")));
        }
        let labels = labels(&doc, el)?;
        let nbr_concept = doc.count(el, "Nbrconcept")?;
        let mut members: Vec<ContextMember> = Vec::new();
        for m in doc.children(el, MEMBER)? {
            let concept_id = doc.positive(m, "ConceptId")?;
            if members.iter().any(|x| x.concept_id == concept_id) {
                return Err(doc.err(
                    m,
                    format!("concept {concept_id} listed twice in Contexte {id}"),
                ));
            }
            let weight = match m.attr("Weight") {
                Some(_) => doc.weight(m, "Weight")?,
                None => 1.0,
            };
            if weight > 1.0 {
                return Err(doc.err(m, format!("Weight {weight} is outside [0, 1]")));
            }
            members.push(ContextMember {
                concept_id,
                concept_name: m.attr("ConceptName").unwrap_or_default().to_string(),
                weight,
                extra: m.extra_attrs(&["ConceptId", "ConceptName", "Weight"]),
            });
        }
        if members.len() != nbr_concept as usize {
            return Err(doc.err(
                el,
                format!(
                    "Nbrconcept=\"{nbr_concept}\" but {} concept children",
                    members.len()
                ),
            ));
        }
        contexts.push(ContextRecord {
            id,
            labels,
            nbr_concept,
            members,
            extra: el.extra_attrs(&["Num", "Name", "NameEn", "Nbrconcept"]),
        });
    }
    Ok(contexts)
}

struct XmlOut {
    buf: String,
}

impl XmlOut {
    fn new() -> Self {
        XmlOut {
            buf: PROLOG.to_string(),
        }
    }

    fn open(&mut self, depth: usize, name: &str, attrs: &[(&str, String)], extra: &[(String, String)], empty: bool) {
        for _ in 0..depth {
            self.buf.push_str("  ");
        }
        self.buf.push('<');
        self.buf.push_str(name);
        let all = attrs
            .iter()
            .map(|(k, v)| (*k, v.as_str()))
            .chain(extra.iter().map(|(k, v)| (k.as_str(), v.as_str())));
        for (k, v) in all {
            let _ = write!(self.buf, " {k}=\"{}\"", escape(v));
        }
        self.buf.push_str(if empty { " />\n" } else { ">\n" });
    }

    fn close(&mut self, depth: usize, name: &str) {
        for _ in 0..depth {
            self.buf.push_str("  ");
        }
        let _ = writeln!(self.buf, "</{name}>");
    }

    fn finish(self) -> String {
        self.buf
    }
}

fn label_attrs(labels: &Labels) -> Vec<(&'static str, String)> {
    let mut attrs = vec![("Name", labels.ar.clone())];
    // a blank English label reads back as absent, so it is not written
    if let Some(en) = labels.en.as_ref().filter(|en| !en.trim().is_empty()) {
        attrs.push(("NameEn", en.clone()));
    }
    attrs
}

pub fn write_concept_shot_file(listings: &[ShotListing]) -> String {
    let mut out = XmlOut::new();
    out.open(0, SHOT_ROOT, &[], &[], false);
    for listing in listings {
        let attrs = [("fNum", listing.marker.clone())];
        out.open(1, SHOT_LISTING, &attrs, &listing.extra, listing.shots.is_empty());
        if listing.shots.is_empty() {
            continue;
        }
        for shot in &listing.shots {
            let attrs = [
                ("seqNum", shot.seq_num.to_string()),
                ("shotId", shot.shot_id.clone()),
            ];
            out.open(2, SHOT_ITEM, &attrs, &shot.extra, true);
        }
        out.close(1, SHOT_LISTING);
    }
    out.close(0, SHOT_ROOT);
    out.finish()
}

pub fn write_concept_video_file(concepts: &[ConceptRecord]) -> String {
    let mut out = XmlOut::new();
    out.open(0, CONCEPT_ROOT, &[], &[], false);
    for c in concepts {
        let mut attrs = vec![("num", c.id.to_string())];
        attrs.extend(label_attrs(&c.labels));
        out.open(1, CONCEPT, &attrs, &c.extra, c.videos.is_empty());
        if c.videos.is_empty() {
            continue;
        }
        for v in &c.videos {
            let attrs = [
                ("Num", v.num.as_str().to_string()),
                ("Name", v.name.clone()),
                ("Weight", v.weight.to_string()),
                ("NUMBER_shots", v.number_shots.to_string()),
                ("shotrepres", v.shot_repres.clone()),
            ];
            out.open(2, VIDEO, &attrs, &v.extra, true);
        }
        out.close(1, CONCEPT);
    }
    out.close(0, CONCEPT_ROOT);
    out.finish()
}

pub fn write_context_file(contexts: &[ContextRecord]) -> String {
    let mut out = XmlOut::new();
    out.open(0, CONTEXT_ROOT, &[], &[], false);
    for ctx in contexts {
        let mut attrs = vec![("Num", ctx.id.to_string())];
        attrs.extend(label_attrs(&ctx.labels));
        attrs.push(("Nbrconcept", ctx.nbr_concept.to_string()));
        out.open(1, CONTEXT, &attrs, &ctx.extra, ctx.members.is_empty());
        if ctx.members.is_empty() {
            continue;
        }
        for m in &ctx.members {
            let attrs = [
                ("ConceptId", m.concept_id.to_string()),
                ("ConceptName", m.concept_name.clone()),
                ("Weight", m.weight.to_string()),
            ];
            out.open(2, MEMBER, &attrs, &m.extra, true);
        }
        out.close(1, CONTEXT);
    }
    out.close(0, CONTEXT_ROOT);
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn validation_message(err: CorpusError) -> String {
        match err {
            CorpusError::Validation { message, .. } => message,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn decimal_forms() {
        assert_eq!(parse_decimal("0.91"), Some(0.91));
        assert_eq!(parse_decimal("1"), Some(1.0));
        assert_eq!(parse_decimal("0,02"), None);
        assert_eq!(parse_decimal("1e3"), None);
        assert_eq!(parse_decimal(".5"), None);
        assert_eq!(parse_decimal("5."), None);
        assert_eq!(parse_decimal("NaN"), None);
        assert_eq!(parse_decimal("-0.5"), Some(-0.5));
    }

    #[test]
    fn empty_listing() {
        let listings = parse_concept_shot_file(
            br#"<concept><videoFeatureExtractionFeatureResult fNum="1"/></concept>"#,
        )
        .unwrap();
        assert_eq!(listings.len(), 1);
        assert_eq!(listings[0].marker, "1");
        assert!(listings[0].shots.is_empty());
    }

    #[test]
    fn out_of_order_seq_num_rejected() {
        let err = parse_concept_shot_file(
            br#"<concept><videoFeatureExtractionFeatureResult fNum="1">
                <item seqNum="2" shotId="shot1_2"/>
                <item seqNum="1" shotId="shot1_1"/>
            </videoFeatureExtractionFeatureResult></concept>"#,
        )
        .unwrap_err();
        assert!(validation_message(err).contains("seqNum 1 follows 2"));
    }

    #[test]
    fn duplicate_seq_num_rejected() {
        let err = parse_concept_shot_file(
            br#"<concept><videoFeatureExtractionFeatureResult fNum="1">
                <item seqNum="1" shotId="shot1_1"/>
                <item seqNum="1" shotId="shot1_2"/>
            </videoFeatureExtractionFeatureResult></concept>"#,
        )
        .unwrap_err();
        assert!(validation_message(err).contains("duplicate seqNum 1"));
    }

    #[test]
    fn missing_shot_id_names_element() {
        let err = parse_concept_shot_file(
            br#"<concept><videoFeatureExtractionFeatureResult fNum="1">
                <item seqNum="1"/>
            </videoFeatureExtractionFeatureResult></concept>"#,
        )
        .unwrap_err();
        match err {
            CorpusError::Validation { element, message } => {
                assert_eq!(element, "item");
                assert!(message.contains("shotId"));
                assert!(message.contains("line 2"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_xml_has_position() {
        let err = parse_concept_shot_file(b"<concept>\n<item seqNum=\"1\"\n</concept>").unwrap_err();
        assert!(matches!(err, CorpusError::Xml { line: 2.., .. }), "{err:?}");
    }

    #[test]
    fn concept_without_videos() {
        let concepts =
            parse_concept_video_file(r#"<concepts><concept num="5" Name="طواف"/></concepts>"#.as_bytes())
                .unwrap();
        assert_eq!(concepts[0].id, 5);
        assert_eq!(concepts[0].labels.ar, "طواف");
        assert!(concepts[0].videos.is_empty());
    }

    #[test]
    fn duplicate_concept_num_rejected() {
        let err = parse_concept_video_file(
            r#"<concepts><concept num="5" Name="طواف"/><concept num="5" Name="عرفة"/></concepts>"#
                .as_bytes(),
        )
        .unwrap_err();
        assert!(validation_message(err).contains("duplicate concept num 5"));
    }

    #[test]
    fn bad_weights_rejected() {
        for w in ["-0.1", "abc", "0,5", ""] {
            let xml = format!(
                r#"<concepts><concept num="1" Name="x"><video Num="1" Name="V" Weight="{w}" NUMBER_shots="1" shotrepres="shot1_1"/></concept></concepts>"#
            );
            assert!(
                matches!(parse_concept_video_file(xml.as_bytes()), Err(CorpusError::Validation { .. })),
                "weight {w:?} accepted"
            );
        }
    }

    #[test]
    fn empty_context() {
        let ctx = parse_context_file(
            r#"<contextes><Contexte Num="2" Name="عمرة" Nbrconcept="0"/></contextes>"#.as_bytes(),
        )
        .unwrap();
        assert_eq!(ctx[0].nbr_concept, 0);
        assert!(ctx[0].members.is_empty());
    }

    #[test]
    fn nbrconcept_mismatch_rejected() {
        let err = parse_context_file(
            r#"<contextes><Contexte Num="1" Name="حج" Nbrconcept="3">
                <concept ConceptId="3" ConceptName="a" Weight="1"/>
                <concept ConceptId="4" ConceptName="b" Weight="1"/>
            </Contexte></contextes>"#
                .as_bytes(),
        )
        .unwrap_err();
        assert!(validation_message(err).contains("Nbrconcept=\"3\" but 2"));
    }

    #[test]
    fn context_weight_above_one_rejected() {
        let err = parse_context_file(
            r#"<contextes><Contexte Num="1" Name="حج" Nbrconcept="1">
                <concept ConceptId="3" ConceptName="a" Weight="1.5"/>
            </Contexte></contextes>"#
                .as_bytes(),
        )
        .unwrap_err();
        assert!(validation_message(err).contains("outside [0, 1]"));
    }

    #[test]
    fn unknown_attributes_survive() {
        let xml = r#"<concepts><concept num="1" Name="x" lang="ar"><video Num="1" Name="V" Weight="0.5" NUMBER_shots="2" shotrepres="shot1_1" fps="25"/></concept></concepts>"#;
        let parsed = parse_concept_video_file(xml.as_bytes()).unwrap();
        assert_eq!(parsed[0].extra, vec![("lang".into(), "ar".into())]);
        let written = write_concept_video_file(&parsed);
        assert!(written.contains(r#"fps="25""#));
        assert_eq!(parse_concept_video_file(written.as_bytes()).unwrap(), parsed);
    }

    #[test]
    fn wrong_root_rejected() {
        assert!(parse_context_file(b"<concepts/>").is_err());
    }
}
