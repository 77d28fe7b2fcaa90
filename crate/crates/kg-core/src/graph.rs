//! In-memory multigraph over entities and relations.

use std::collections::HashMap;
use std::fmt;

use crate::error::CoreError;
use crate::triplet::Triplet;

/// Index of an entity, in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub usize);

/// Index of a relation, in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub usize);

/// Index of a triplet in the graph's fact list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripletId(pub usize);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which notion of degree to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    /// Number of distinct incident triplets (a self-loop counts once).
    Triplet,
    /// Number of distinct undirected neighbors, excluding the entity itself.
    Neighbor,
}

/// A knowledge graph: entities, relations, and a multiset of triplets.
///
/// Triplets are stored directed (head to tail). Neighbor queries use the
/// undirected simple view: parallel edges collapsed, self-loops ignored.
/// Strong connectivity uses the directed view.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    entities: Vec<String>,
    entity_ids: HashMap<String, EntityId>,
    relations: Vec<String>,
    relation_ids: HashMap<String, RelationId>,
    triplets: Vec<Triplet>,
    /// Resolved (head, relation, tail) per triplet.
    endpoints: Vec<(EntityId, RelationId, EntityId)>,
    /// Incident triplet ids per entity, one entry per endpoint role, so a
    /// self-loop appears twice. Ascending per entity.
    adjacency: Vec<Vec<TripletId>>,
    /// Distinct incident triplet count per entity (self-loops counted once).
    triplet_degrees: Vec<usize>,
    /// Distinct undirected neighbors per entity, ascending, excluding self.
    neighbors: Vec<Vec<EntityId>>,
}

/// Builds a graph from a triplet list. Entities and relations are registered
/// in first-appearance order (head before tail within a triplet).
pub fn build_graph(triplets: Vec<Triplet>) -> KnowledgeGraph {
    KnowledgeGraph::from_parts(Vec::new(), triplets)
        .expect("building without a preset entity list cannot fail")
}

impl KnowledgeGraph {
    /// Builds a graph with a preset entity list (kept in the given order even
    /// for entities no triplet touches). Entities appearing in `triplets` but
    /// not in `entities` are appended in first-appearance order.
    pub fn from_parts(entities: Vec<String>, triplets: Vec<Triplet>) -> Result<Self, CoreError> {
        let mut g = KnowledgeGraph {
            entities: Vec::new(),
            entity_ids: HashMap::new(),
            relations: Vec::new(),
            relation_ids: HashMap::new(),
            triplets: Vec::new(),
            endpoints: Vec::new(),
            adjacency: Vec::new(),
            triplet_degrees: Vec::new(),
            neighbors: Vec::new(),
        };
        for name in entities {
            if g.entity_ids.contains_key(&name) {
                return Err(CoreError::InvalidParameter(format!(
                    "duplicate entity {name:?} in preset entity list"
                )));
            }
            g.intern_entity(&name);
        }
        for t in triplets {
            let head = g.intern_entity(&t.head);
            let tail = g.intern_entity(&t.tail);
            let rel = g.intern_relation(&t.relation);
            let id = TripletId(g.triplets.len());
            g.triplets.push(t);
            g.endpoints.push((head, rel, tail));
            g.adjacency[head.0].push(id);
            g.adjacency[tail.0].push(id);
        }
        g.rebuild_views();
        Ok(g)
    }

    fn intern_entity(&mut self, name: &str) -> EntityId {
        if let Some(&id) = self.entity_ids.get(name) {
            return id;
        }
        let id = EntityId(self.entities.len());
        self.entities.push(name.to_string());
        self.entity_ids.insert(name.to_string(), id);
        self.adjacency.push(Vec::new());
        id
    }

    fn intern_relation(&mut self, name: &str) -> RelationId {
        if let Some(&id) = self.relation_ids.get(name) {
            return id;
        }
        let id = RelationId(self.relations.len());
        self.relations.push(name.to_string());
        self.relation_ids.insert(name.to_string(), id);
        id
    }

    fn rebuild_views(&mut self) {
        let n = self.entities.len();
        self.triplet_degrees = vec![0; n];
        self.neighbors = vec![Vec::new(); n];
        for (v, incident) in self.adjacency.iter().enumerate() {
            // Incident ids ascend; a self-loop shows up as two equal
            // consecutive entries, counted once here.
            let mut distinct = 0;
            let mut prev = None;
            for &t in incident {
                if prev != Some(t) {
                    distinct += 1;
                }
                prev = Some(t);
            }
            self.triplet_degrees[v] = distinct;
            let mut nbrs: Vec<EntityId> = incident
                .iter()
                .map(|&t| {
                    let (h, _, t2) = self.endpoints[t.0];
                    if h.0 == v {
                        t2
                    } else {
                        h
                    }
                })
                .filter(|u| u.0 != v)
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            self.neighbors[v] = nbrs;
        }
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn triplet_count(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entities
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relations
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_ids.get(name).copied()
    }

    pub fn require_entity(&self, name: &str) -> Result<EntityId, CoreError> {
        self.entity_id(name)
            .ok_or_else(|| CoreError::UnknownEntity(name.to_string()))
    }

    pub fn entity_name(&self, id: EntityId) -> &str {
        &self.entities[id.0]
    }

    pub fn entity_ids(&self) -> impl Iterator<Item = EntityId> + '_ {
        (0..self.entities.len()).map(EntityId)
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn triplet(&self, id: TripletId) -> &Triplet {
        &self.triplets[id.0]
    }

    /// Resolved (head, relation, tail) ids for a triplet.
    pub fn endpoints(&self, id: TripletId) -> (EntityId, RelationId, EntityId) {
        self.endpoints[id.0]
    }

    pub fn triplet_ids(&self) -> impl Iterator<Item = TripletId> + '_ {
        (0..self.triplets.len()).map(TripletId)
    }

    /// Raw incidence list: one entry per endpoint role, so self-loops appear
    /// twice. Ascending.
    pub fn adjacency(&self, v: EntityId) -> &[TripletId] {
        &self.adjacency[v.0]
    }

    /// Distinct incident triplets (the multiset T(v) as ids; self-loops once).
    pub fn incident(&self, v: EntityId) -> impl Iterator<Item = TripletId> + '_ {
        let list = &self.adjacency[v.0];
        list.iter().enumerate().filter_map(move |(i, &t)| {
            if i > 0 && list[i - 1] == t {
                None
            } else {
                Some(t)
            }
        })
    }

    /// Distinct undirected neighbors of `v`, ascending, excluding `v` itself.
    pub fn neighbors(&self, v: EntityId) -> &[EntityId] {
        &self.neighbors[v.0]
    }

    pub fn triplet_degree(&self, v: EntityId) -> usize {
        self.triplet_degrees[v.0]
    }

    pub fn neighbor_degree(&self, v: EntityId) -> usize {
        self.neighbors[v.0].len()
    }

    /// Whether `u` and `v` are adjacent in the undirected simple view.
    pub fn has_edge(&self, u: EntityId, v: EntityId) -> bool {
        self.neighbors[u.0].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: EntityId, kind: DegreeKind) -> usize {
        match kind {
            DegreeKind::Triplet => self.triplet_degree(v),
            DegreeKind::Neighbor => self.neighbor_degree(v),
        }
    }

    /// Degree lookup by entity name; unknown entities are an error.
    pub fn degree_of(&self, name: &str, kind: DegreeKind) -> Result<usize, CoreError> {
        Ok(self.degree(self.require_entity(name)?, kind))
    }

    /// Per-graph averages used in component reports.
    pub fn summary(&self) -> GraphSummary {
        let n = self.entity_count();
        let mean = |f: &mut dyn FnMut(EntityId) -> f64| -> f64 {
            if n == 0 {
                0.0
            } else {
                (0..n).map(|v| f(EntityId(v))).sum::<f64>() / n as f64
            }
        };
        GraphSummary {
            entities: n,
            relations: self.relation_count(),
            triplets: self.triplet_count(),
            avg_triplet_degree: mean(&mut |v| self.triplet_degree(v) as f64),
            avg_neighbor_degree: mean(&mut |v| self.neighbor_degree(v) as f64),
            avg_clustering: mean(&mut |v| crate::centrality::clustering_coefficient(self, v)),
        }
    }
}

/// Whole-graph statistics for component reports.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSummary {
    pub entities: usize,
    pub relations: usize,
    pub triplets: usize,
    pub avg_triplet_degree: f64,
    pub avg_neighbor_degree: f64,
    pub avg_clustering: f64,
}
