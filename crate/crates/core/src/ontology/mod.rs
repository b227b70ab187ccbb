//! Domain ontology over contexts and concepts, and ontology-driven query
//! expansion.
//!
//! Contexts group weighted concepts; concepts may additionally point to
//! narrower concepts. A concept may sit under several contexts, so the
//! graph is a DAG rather than a tree. A virtual [`NodeId::Root`] has every
//! context as a child.

mod file;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ConceptId, ContextId, Corpus, CorpusError, Labels};

pub use file::{parse_ontology_file, write_ontology_file, OntologyConcept, OntologyFile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OntologyError {
    #[error("unknown ontology node `{0}`")]
    UnknownNode(String),
    #[error("cycle through concepts {0:?}")]
    Cycle(Vec<ConceptId>),
    #[error("concept {0} links to itself")]
    SelfLoop(ConceptId),
    #[error("ontology refers to concept {0}, which the corpus does not define")]
    UnknownConcept(ConceptId),
    #[error("attenuation {0} must lie in (0, 1]")]
    Attenuation(f64),
    #[error(transparent)]
    File(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    Root,
    Context(ContextId),
    Concept(ConceptId),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Root => f.write_str("root"),
            NodeId::Context(id) => write!(f, "context:{id}"),
            NodeId::Concept(id) => write!(f, "concept:{id}"),
        }
    }
}

impl FromStr for NodeId {
    type Err = OntologyError;

    /// Accepts `root`, `context:<id>` and `concept:<id>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || OntologyError::UnknownNode(s.to_string());
        if s == "root" {
            return Ok(NodeId::Root);
        }
        let (kind, id) = s.split_once(':').ok_or_else(unknown)?;
        let id = id.parse().map_err(|_| unknown())?;
        match kind {
            "context" => Ok(NodeId::Context(id)),
            "concept" => Ok(NodeId::Concept(id)),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Root,
    Context,
    Concept,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OntologyNode {
    pub id: NodeId,
    pub labels: Labels,
    /// Children with their membership (or narrower-link) weight.
    pub children: BTreeMap<NodeId, f64>,
    pub parents: BTreeSet<NodeId>,
}

impl OntologyNode {
    fn new(id: NodeId, labels: Labels) -> Self {
        OntologyNode {
            id,
            labels,
            children: BTreeMap::new(),
            parents: BTreeSet::new(),
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self.id {
            NodeId::Root => NodeKind::Root,
            NodeId::Context(_) => NodeKind::Context,
            NodeId::Concept(_) => NodeKind::Concept,
        }
    }
}

/// Whether expansion concepts join the query or are only offered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionMode {
    #[default]
    Suggest,
    Auto,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    nodes: BTreeMap<NodeId, OntologyNode>,
    attenuation: f64,
}

/// Per-level attenuation applied to descendants during expansion.
pub const DEFAULT_ATTENUATION: f64 = 0.5;

impl Ontology {
    /// Ontology made of the corpus contexts and their member concepts.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let file = OntologyFile::from_corpus(corpus);
        Self::from_file(&file).expect("context membership cannot form a cycle")
    }

    pub fn from_file(file: &OntologyFile) -> Result<Self, OntologyError> {
        let mut nodes = BTreeMap::new();
        nodes.insert(
            NodeId::Root,
            OntologyNode::new(NodeId::Root, Labels::new("الجذر", Some("root".into()))),
        );
        for concept in &file.concepts {
            let id = NodeId::Concept(concept.concept_id);
            nodes.insert(id, OntologyNode::new(id, concept.labels.clone()));
        }
        for ctx in &file.contexts {
            let id = NodeId::Context(ctx.id);
            nodes.insert(id, OntologyNode::new(id, ctx.labels.clone()));
            for m in &ctx.members {
                let cid = NodeId::Concept(m.concept_id);
                nodes
                    .entry(cid)
                    .or_insert_with(|| OntologyNode::new(cid, Labels::new(m.concept_name.clone(), None)));
            }
        }
        for concept in &file.concepts {
            for (narrower, _) in &concept.narrower {
                if *narrower == concept.concept_id {
                    return Err(OntologyError::SelfLoop(*narrower));
                }
                let nid = NodeId::Concept(*narrower);
                nodes
                    .entry(nid)
                    .or_insert_with(|| OntologyNode::new(nid, Labels::new(String::new(), None)));
            }
        }

        let mut link = |parent: NodeId, child: NodeId, weight: f64| {
            nodes.get_mut(&parent).unwrap().children.insert(child, weight);
            nodes.get_mut(&child).unwrap().parents.insert(parent);
        };
        for ctx in &file.contexts {
            link(NodeId::Root, NodeId::Context(ctx.id), 1.0);
            for m in &ctx.members {
                link(NodeId::Context(ctx.id), NodeId::Concept(m.concept_id), m.weight);
            }
        }
        for concept in &file.concepts {
            for &(narrower, weight) in &concept.narrower {
                link(NodeId::Concept(concept.concept_id), NodeId::Concept(narrower), weight);
            }
        }

        let ontology = Ontology {
            nodes,
            attenuation: DEFAULT_ATTENUATION,
        };
        ontology.check_acyclic()?;
        Ok(ontology)
    }

    pub fn parse(input: &[u8]) -> Result<Self, OntologyError> {
        Self::from_file(&parse_ontology_file(input)?)
    }

    pub fn with_attenuation(mut self, attenuation: f64) -> Result<Self, OntologyError> {
        if !(attenuation > 0.0 && attenuation <= 1.0) {
            return Err(OntologyError::Attenuation(attenuation));
        }
        self.attenuation = attenuation;
        Ok(self)
    }

    pub fn attenuation(&self) -> f64 {
        self.attenuation
    }

    /// Fails if any concept node is absent from `corpus`.
    pub fn check_against(&self, corpus: &Corpus) -> Result<(), OntologyError> {
        for id in self.nodes.keys() {
            if let NodeId::Concept(c) = id {
                if corpus.concept(*c).is_none() {
                    return Err(OntologyError::UnknownConcept(*c));
                }
            }
        }
        Ok(())
    }

    fn check_acyclic(&self) -> Result<(), OntologyError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: BTreeMap<NodeId, Mark> = BTreeMap::new();
        for &start in self.nodes.keys() {
            if marks.contains_key(&start) {
                continue;
            }
            // iterative DFS; the stack holds (node, next child index)
            let mut stack: Vec<(NodeId, usize)> = vec![(start, 0)];
            marks.insert(start, Mark::Open);
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let child = self.nodes[&node].children.keys().nth(*next).copied();
                *next += 1;
                match child {
                    None => {
                        marks.insert(node, Mark::Done);
                        stack.pop();
                    }
                    Some(child) => match marks.get(&child) {
                        Some(Mark::Done) => {}
                        Some(Mark::Open) => {
                            let pos = stack.iter().position(|(n, _)| *n == child).unwrap_or(0);
                            let cycle = stack[pos..]
                                .iter()
                                .filter_map(|(n, _)| match n {
                                    NodeId::Concept(c) => Some(*c),
                                    _ => None,
                                })
                                .collect();
                            return Err(OntologyError::Cycle(cycle));
                        }
                        None => {
                            marks.insert(child, Mark::Open);
                            stack.push((child, 0));
                        }
                    },
                }
            }
        }
        Ok(())
    }

    pub fn node(&self, id: NodeId) -> Result<&OntologyNode, OntologyError> {
        self.nodes
            .get(&id)
            .ok_or_else(|| OntologyError::UnknownNode(id.to_string()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &OntologyNode> {
        self.nodes.values()
    }

    /// Parents and children of a node, both in ascending id order. The
    /// virtual root is not reported as a parent.
    pub fn neighbors(&self, id: NodeId) -> Result<(Vec<NodeId>, Vec<NodeId>), OntologyError> {
        let node = self.node(id)?;
        let parents = node
            .parents
            .iter()
            .copied()
            .filter(|p| *p != NodeId::Root)
            .collect();
        let children = node.children.keys().copied().collect();
        Ok((parents, children))
    }

    /// Concepts reached from `selected` within `depth` levels.
    ///
    /// A selected concept contributes itself at weight 1. A descendant
    /// reached through edges `e1..eL` gets `Π weight(e) · attenuation^L`.
    /// Across paths and selected nodes the maximum weight is kept; zero
    /// weights are dropped, so every returned weight lies in (0, 1].
    pub fn expand(
        &self,
        selected: &BTreeSet<NodeId>,
        depth: usize,
    ) -> Result<BTreeMap<ConceptId, f64>, OntologyError> {
        let mut out: BTreeMap<ConceptId, f64> = BTreeMap::new();
        let keep = |out: &mut BTreeMap<ConceptId, f64>, id: NodeId, w: f64| {
            if let NodeId::Concept(c) = id {
                if w > 0.0 {
                    let slot = out.entry(c).or_insert(0.0);
                    *slot = slot.max(w);
                }
            }
        };
        for &start in selected {
            self.node(start)?;
            keep(&mut out, start, 1.0);
            let mut frontier: BTreeMap<NodeId, f64> = BTreeMap::from([(start, 1.0)]);
            for _ in 0..depth {
                let mut next: BTreeMap<NodeId, f64> = BTreeMap::new();
                for (node, w) in &frontier {
                    for (child, edge) in &self.nodes[node].children {
                        let cw = w * edge * self.attenuation;
                        if cw > 0.0 {
                            let slot = next.entry(*child).or_insert(0.0);
                            *slot = slot.max(cw);
                        }
                    }
                }
                for (&node, &w) in &next {
                    keep(&mut out, node, w);
                }
                if next.is_empty() {
                    break;
                }
                frontier = next;
            }
        }
        Ok(out)
    }
}
