//! Connected components and largest-component extraction.

use crate::error::CoreError;
use crate::graph::{EntityId, KnowledgeGraph};

/// Which connectivity notion to use when splitting the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMode {
    /// Undirected reachability over the simple view.
    Weak,
    /// Mutual directed reachability over triplet direction (head to tail).
    Strong,
}

impl std::str::FromStr for ComponentMode {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weak" => Ok(ComponentMode::Weak),
            "strong" => Ok(ComponentMode::Strong),
            other => Err(CoreError::InvalidParameter(format!(
                "unknown component mode {other:?} (expected \"weak\" or \"strong\")"
            ))),
        }
    }
}

/// Component label per entity, labels dense in `0..component_count`.
#[derive(Debug, Clone)]
pub struct ComponentLabels {
    pub labels: Vec<usize>,
    pub component_count: usize,
}

impl ComponentLabels {
    /// Members of each component, entity ids ascending within a component.
    pub fn members(&self) -> Vec<Vec<EntityId>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (v, &c) in self.labels.iter().enumerate() {
            out[c].push(EntityId(v));
        }
        out
    }
}

/// Labels every entity with its component under the given mode.
pub fn connected_components(g: &KnowledgeGraph, mode: ComponentMode) -> ComponentLabels {
    match mode {
        ComponentMode::Weak => weak_components(g),
        ComponentMode::Strong => strong_components(g),
    }
}

fn weak_components(g: &KnowledgeGraph) -> ComponentLabels {
    let n = g.entity_count();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(EntityId(start));
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if labels[u.0] == usize::MAX {
                    labels[u.0] = count;
                    queue.push_back(u);
                }
            }
        }
        count += 1;
    }
    ComponentLabels {
        labels,
        component_count: count,
    }
}

/// Tarjan's strongly connected components with an explicit stack, safe for
/// deep graphs. Directed edges follow triplet direction; parallel edges and
/// self-loops are harmless. SCC labels are then renumbered by smallest member
/// so labels are deterministic.
fn strong_components(g: &KnowledgeGraph) -> ComponentLabels {
    let n = g.entity_count();
    // Out-edges per entity in triplet order.
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in g.triplet_ids() {
        let (h, _, tl) = g.endpoints(t);
        out_edges[h.0].push(tl.0);
    }

    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut labels = vec![UNVISITED; n];
    let mut next_index = 0;
    let mut scc_count = 0;
    // (node, next out-edge position) call frames.
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge_pos)) = call.last_mut() {
            if let Some(&w) = out_edges[v].get(*edge_pos) {
                *edge_pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        labels[w] = scc_count;
                        if w == v {
                            break;
                        }
                    }
                    scc_count += 1;
                }
            }
        }
    }

    // Renumber components by their smallest entity id for determinism.
    let mut first_member = vec![usize::MAX; scc_count];
    for (v, &c) in labels.iter().enumerate() {
        first_member[c] = first_member[c].min(v);
    }
    let mut order: Vec<usize> = (0..scc_count).collect();
    order.sort_unstable_by_key(|&c| first_member[c]);
    let mut renumber = vec![0usize; scc_count];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    for l in &mut labels {
        *l = renumber[*l];
    }
    ComponentLabels {
        labels,
        component_count: scc_count,
    }
}

/// Extracts the largest component as a standalone graph.
///
/// Ties on size go to the component containing the earliest-registered
/// entity. The returned graph keeps member entities in their original order
/// and retains exactly the triplets with both endpoints inside the component.
pub fn largest_connected_component(
    g: &KnowledgeGraph,
    mode: ComponentMode,
) -> Result<KnowledgeGraph, CoreError> {
    if g.is_empty() {
        return Err(CoreError::EmptyGraph);
    }
    let comps = connected_components(g, mode);
    let members = comps.members();
    let best = members
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.len()
                .cmp(&b.len())
                // Smaller first-member id wins ties; members are ascending.
                .then_with(|| b[0].cmp(&a[0]))
        })
        .map(|(c, _)| c)
        .expect("non-empty graph has at least one component");
    induced_subgraph(g, &members[best])
}

/// Builds the subgraph induced by `members` (entity order preserved from the
/// parent graph; `members` must be ascending).
pub fn induced_subgraph(
    g: &KnowledgeGraph,
    members: &[EntityId],
) -> Result<KnowledgeGraph, CoreError> {
    let keep: std::collections::HashSet<EntityId> = members.iter().copied().collect();
    let entities: Vec<String> = members
        .iter()
        .map(|&v| g.entity_name(v).to_string())
        .collect();
    let triplets = g
        .triplet_ids()
        .filter(|&t| {
            let (h, _, tl) = g.endpoints(t);
            keep.contains(&h) && keep.contains(&tl)
        })
        .map(|t| g.triplet(t).clone())
        .collect();
    KnowledgeGraph::from_parts(entities, triplets)
}
