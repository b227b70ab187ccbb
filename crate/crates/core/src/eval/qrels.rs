use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::EvalError;
use crate::corpus::VideoNum;

/// Relevant videos per query id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    relevant: BTreeMap<String, BTreeSet<VideoNum>>,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

impl Qrels {
    /// Reads `query_id TAB video_num` lines; `#` comments.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut qrels = Qrels::default();
        for (line, content) in lines(text) {
            let (query, video) = content.split_once('\t').ok_or(EvalError::Syntax {
                line,
                message: "expected `query_id<TAB>video_num`".into(),
            })?;
            qrels.insert(query.trim(), VideoNum::new(video.trim()));
        }
        Ok(qrels)
    }

    pub fn insert(&mut self, query: &str, video: VideoNum) {
        self.relevant.entry(query.to_string()).or_default().insert(video);
    }

    pub fn get(&self, query: &str) -> Option<&BTreeSet<VideoNum>> {
        self.relevant.get(query)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.relevant.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.relevant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relevant.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (q, videos) in &self.relevant {
            for v in videos {
                let _ = writeln!(out, "{q}\t{v}");
            }
        }
        out
    }
}

/// Reads `query_id TAB query text` lines.
pub fn parse_queries(text: &str) -> Result<Vec<(String, String)>, EvalError> {
    lines(text)
        .map(|(line, content)| {
            content
                .split_once('\t')
                .map(|(q, t)| (q.trim().to_string(), t.trim().to_string()))
                .ok_or(EvalError::Syntax {
                    line,
                    message: "expected `query_id<TAB>text`".into(),
                })
        })
        .collect()
}

pub fn write_queries(queries: &[(String, String)]) -> String {
    queries.iter().fold(String::new(), |mut out, (q, t)| {
        let _ = writeln!(out, "{q}\t{t}");
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_write() {
        let q = Qrels::parse("# qrels\nq1\t00001\nq1\t00002\nq2\t7\n").unwrap();
        assert_eq!(q.len(), 2);
        assert!(q.get("q1").unwrap().contains(&VideoNum::new("1")));
        assert_eq!(Qrels::parse(&q.to_tsv()).unwrap(), q);
        assert!(Qrels::parse("q1 00001").is_err());
    }

    #[test]
    fn queries_file() {
        let qs = parse_queries("q1\ttopic3\nq2\tطواف حول الكعبة\n").unwrap();
        assert_eq!(qs[1].1, "طواف حول الكعبة");
        assert_eq!(parse_queries(&write_queries(&qs)).unwrap(), qs);
    }
}
