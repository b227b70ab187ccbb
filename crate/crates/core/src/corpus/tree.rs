//! Minimal element tree over quick-xml events.
//!
//! The corpus files are small attribute-only documents, so they are read
//! into a tree first and validated per format afterwards. Character data
//! between elements is ignored.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::CorpusError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Element>,
    /// Byte offset of the start tag.
    pub offset: usize,
}

impl Element {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Attributes whose names are not in `known`, in document order.
    pub fn extra_attrs(&self, known: &[&str]) -> Vec<(String, String)> {
        self.attrs
            .iter()
            .filter(|(k, _)| !known.contains(&k.as_str()))
            .cloned()
            .collect()
    }
}

/// 1-based line and column of a byte offset.
pub(crate) fn line_col(input: &[u8], offset: usize) -> (usize, usize) {
    let offset = offset.min(input.len());
    let before = &input[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = before
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |p| p + 1);
    let col = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
    (line, col)
}

fn xml_error(input: &[u8], offset: usize, message: impl Into<String>) -> CorpusError {
    let (line, column) = line_col(input, offset);
    CorpusError::Xml {
        line,
        column,
        message: message.into(),
    }
}

fn start_element(
    input: &[u8],
    reader: &Reader<&[u8]>,
    start: &BytesStart<'_>,
    offset: usize,
) -> Result<Element, CorpusError> {
    let name = std::str::from_utf8(start.name().as_ref())
        .map_err(|e| xml_error(input, offset, e.to_string()))?
        .to_string();
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| xml_error(input, offset, e.to_string()))?;
        let key = std::str::from_utf8(attr.key.as_ref())
            .map_err(|e| xml_error(input, offset, e.to_string()))?
            .to_string();
        if attrs.iter().any(|(k, _): &(String, String)| *k == key) {
            return Err(xml_error(input, offset, format!("duplicate attribute `{key}`")));
        }
        let value = attr
            .decode_and_unescape_value(reader.decoder())
            .map_err(|e| xml_error(input, offset, e.to_string()))?
            .into_owned();
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
        offset,
    })
}

/// Parses a whole document and returns its root element.
pub(crate) fn parse_document(input: &[u8]) -> Result<Element, CorpusError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    loop {
        // Trimmed whitespace is never reported, so skip it to land on the tag.
        let mut offset = reader.buffer_position() as usize;
        while input.get(offset).is_some_and(u8::is_ascii_whitespace) {
            offset += 1;
        }
        let event = reader
            .read_event()
            .map_err(|e| xml_error(input, reader.error_position() as usize, e.to_string()))?;
        match event {
            Event::Start(ref start) | Event::Empty(ref start) => {
                let is_empty = matches!(event, Event::Empty(_));
                if root.is_some() {
                    return Err(xml_error(input, offset, "content after the root element"));
                }
                let element = start_element(input, &reader, start, offset)?;
                if is_empty {
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(element),
                        None => root = Some(element),
                    }
                } else {
                    stack.push(element);
                }
            }
            Event::End(ref end) => {
                let Some(element) = stack.pop() else {
                    return Err(xml_error(input, offset, "unexpected closing tag"));
                };
                if end.name().as_ref() != element.name.as_bytes() {
                    return Err(xml_error(
                        input,
                        offset,
                        format!(
                            "closing tag `{}` does not match `{}`",
                            String::from_utf8_lossy(end.name().as_ref()),
                            element.name
                        ),
                    ));
                }
                match stack.last_mut() {
                    Some(parent) => parent.children.push(element),
                    None => root = Some(element),
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }

    if let Some(open) = stack.last() {
        return Err(xml_error(
            input,
            input.len(),
            format!("unclosed element `{}`", open.name),
        ));
    }
    root.ok_or_else(|| xml_error(input, input.len(), "document has no root element"))
}
