//! Structural analysis of a built complex: the canonical decomposition and
//! its isomorphisms, the facet graph, pseudomanifold structure, the
//! subcomplexes `B_V` and the path shape of two-process complexes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::complex::{complete_to_facet, faces, Complex};
use crate::error::{Error, Result};
use crate::round_counter::RoundCounter;
use crate::witness::{format_set, Layer, Simplex};
use crate::{ProcessId, ProcessSet};

/// Does `s` lie in the part `X_S` of the canonical decomposition?
pub fn in_part(s: &Simplex, set: &ProcessSet) -> bool {
    let layers = s.layers();
    match layers.get(1) {
        None => true,
        Some(first) => set.is_subset(&first.ghosts) || first.union() == *set,
    }
}

/// The parts `X_S` for every `S ⊆ act r`, keyed by `S`; `X_∅` is the whole
/// complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub parts: BTreeMap<ProcessSet, BTreeSet<String>>,
}

pub fn decompose(c: &Complex) -> Decomposition {
    let active: Vec<ProcessId> = c.counter().active().into_iter().collect();
    let parts = (0u64..1 << active.len())
        .into_par_iter()
        .map(|mask| {
            let set: ProcessSet = active
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            let keys = c
                .simplices()
                .filter(|s| in_part(s, &set))
                .map(Simplex::key)
                .collect();
            (set, keys)
        })
        .collect();
    Decomposition { parts }
}

/// The isomorphism `X_S(r) ≅ P(r↓S)` and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionIso {
    set: ProcessSet,
    source: RoundCounter,
    target: RoundCounter,
}

pub fn decomposition_iso(c: &Complex, set: &ProcessSet) -> Result<DecompositionIso> {
    let target = c.counter().execute(set)?;
    Ok(DecompositionIso {
        set: set.clone(),
        source: c.counter().clone(),
        target,
    })
}

impl DecompositionIso {
    pub fn set(&self) -> &ProcessSet {
        &self.set
    }

    /// `r↓S`.
    pub fn target(&self) -> &RoundCounter {
        &self.target
    }

    /// `γ_S: X_S(r) → P(r↓S)`.
    pub fn forward(&self, s: &Simplex) -> Result<Simplex> {
        if !in_part(s, &self.set) {
            return Err(Error::Precondition(format!(
                "{s} is not in X_{{{}}}",
                format_set(&self.set)
            )));
        }
        let layers = s.layers();
        if layers.len() == 1 {
            return Ok(s.clone());
        }
        let (zero, first) = (&layers[0], &layers[1]);
        let mut out = Vec::with_capacity(layers.len());
        if first.union() == self.set {
            out.push(Layer::new(
                zero.seen.difference(&first.ghosts).copied().collect(),
                zero.ghosts.union(&first.ghosts).copied().collect(),
            ));
        } else {
            out.push(Layer::new(
                zero.seen.difference(&self.set).copied().collect(),
                zero.ghosts.union(&self.set).copied().collect(),
            ));
            out.push(Layer::new(
                first.seen.clone(),
                first.ghosts.difference(&self.set).copied().collect(),
            ));
        }
        out.extend(layers[2..].iter().cloned());
        Simplex::new(out)
    }

    /// `ρ_S: P(r↓S) → X_S(r)`.
    pub fn backward(&self, s: &Simplex) -> Result<Simplex> {
        let layers = s.layers();
        let zero = &layers[0];
        let in_zero: ProcessSet = zero.seen.intersection(&self.set).copied().collect();
        let mut out = Vec::with_capacity(layers.len() + 1);
        if !in_zero.is_empty() {
            let ghost_part: ProcessSet = zero.ghosts.intersection(&self.set).copied().collect();
            out.push(Layer::new(
                zero.seen.union(&ghost_part).copied().collect(),
                zero.ghosts.difference(&self.set).copied().collect(),
            ));
            out.push(Layer::new(in_zero, ghost_part));
            out.extend(layers[1..].iter().cloned());
        } else if layers.len() > 1 {
            out.push(Layer::new(
                zero.seen.union(&self.set).copied().collect(),
                zero.ghosts.difference(&self.set).copied().collect(),
            ));
            let first = &layers[1];
            out.push(Layer::new(
                first.seen.clone(),
                first.ghosts.union(&self.set).copied().collect(),
            ));
            out.extend(layers[2..].iter().cloned());
        } else {
            return Ok(s.clone());
        }
        Simplex::new(out)
    }

    pub fn source(&self) -> &RoundCounter {
        &self.source
    }
}

/// Ridge-to-facet incidence of a pure complex.
#[derive(Clone, Debug)]
pub struct FacetGraph {
    pub facets: Vec<Simplex>,
    /// Each codimension-one face with the indices of the facets containing it.
    pub ridges: BTreeMap<Simplex, Vec<usize>>,
}

impl FacetGraph {
    pub fn new(c: &Complex) -> FacetGraph {
        let facets: Vec<Simplex> = c.facets().cloned().collect();
        let pairs: Vec<(Simplex, usize)> = facets
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, f)| {
                f.active_set()
                    .into_iter()
                    .map(move |p| (f.ghost_unchecked(&[p].into()), i))
            })
            .collect();
        let mut ridges: BTreeMap<Simplex, Vec<usize>> = BTreeMap::new();
        for (r, i) in pairs {
            ridges.entry(r).or_default().push(i);
        }
        for v in ridges.values_mut() {
            v.sort_unstable();
        }
        FacetGraph { facets, ridges }
    }

    /// Pairs of facets sharing a ridge.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for ids in self.ridges.values() {
            for (k, &a) in ids.iter().enumerate() {
                for &b in &ids[k + 1..] {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.facets.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for (a, b) in self.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// DOT rendering: facets as nodes, shared ridges as edges and boundary
    /// ridges as dashed edges to point nodes.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{name}\" {{");
        for (i, f) in self.facets.iter().enumerate() {
            let _ = writeln!(out, "  f{i} [label=\"{f}\"];");
        }
        let mut boundary = 0;
        for (ridge, ids) in &self.ridges {
            match ids.as_slice() {
                [a] => {
                    let _ = writeln!(out, "  b{boundary} [shape=point];");
                    let _ = writeln!(
                        out,
                        "  f{a} -- b{boundary} [style=dashed, label=\"{ridge}\"];"
                    );
                    boundary += 1;
                }
                ids => {
                    for (k, a) in ids.iter().enumerate() {
                        for b in &ids[k + 1..] {
                            let _ = writeln!(out, "  f{a} -- f{b} [label=\"{ridge}\"];");
                        }
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Every simplex completes to a facet of top dimension.
pub fn is_pure(c: &Complex) -> bool {
    let top: BTreeSet<&Simplex> = c.facets().collect();
    c.simplices().collect::<Vec<_>>().par_iter().all(|s| {
        complete_to_facet(s, c.counter())
            .is_ok_and(|f| top.contains(&f) && f.ghost_unchecked(&s.ghost_set()) == **s)
    })
}

pub fn strongly_connected(c: &Complex) -> bool {
    FacetGraph::new(c).is_connected()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudomanifoldReport {
    pub is_pseudomanifold: bool,
    /// Faces of ridges contained in exactly one facet.
    pub boundary_keys: BTreeSet<String>,
    pub ridge_degrees: BTreeMap<String, usize>,
    /// The boundary is exactly the set of simplices with `G_0 ≠ ∅`.
    pub boundary_matches: bool,
}

pub fn pseudomanifold(c: &Complex) -> PseudomanifoldReport {
    let graph = FacetGraph::new(c);
    let ridge_degrees: BTreeMap<String, usize> = graph
        .ridges
        .iter()
        .map(|(r, ids)| (r.key(), ids.len()))
        .collect();
    let all_ridges_present = c
        .of_dimension(c.dimension() - 1)
        .all(|r| graph.ridges.contains_key(r));
    let is_pseudomanifold = all_ridges_present
        && graph.is_connected()
        && ridge_degrees.values().all(|&d| d == 1 || d == 2);
    let boundary: BTreeSet<Simplex> = graph
        .ridges
        .iter()
        .filter(|(_, ids)| ids.len() == 1)
        .flat_map(|(r, _)| faces(r).expect("ridges are witness structures"))
        .collect();
    let expected: BTreeSet<&Simplex> = c
        .simplices()
        .filter(|s| !s.layers()[0].ghosts.is_empty())
        .collect();
    let boundary_matches = boundary.len() == expected.len() && boundary.iter().all(|s| expected.contains(s));
    PseudomanifoldReport {
        is_pseudomanifold,
        boundary_keys: boundary.iter().map(Simplex::key).collect(),
        ridge_degrees,
        boundary_matches,
    }
}

/// `B_V`: the simplices whose round-0 ghost set contains `v`.
pub fn b_v_subcomplex(c: &Complex, v: &ProcessSet) -> Result<BTreeSet<String>> {
    if let Some(p) = v.iter().find(|p| c.counter().get(**p).is_none()) {
        return Err(Error::NotInSupport(*p));
    }
    Ok(c.simplices()
        .filter(|s| v.is_subset(&s.layers()[0].ghosts))
        .map(Simplex::key)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathReport {
    pub is_path: bool,
    pub edges: usize,
    /// Degree-one vertices, sorted.
    pub endpoints: Vec<Simplex>,
    /// The endpoints predicted from the counter: the vertex colored by the
    /// first process, then the one colored by the second.
    pub expected_endpoints: [Simplex; 2],
}

impl PathReport {
    pub fn endpoints_match(&self) -> bool {
        let expected: BTreeSet<&Simplex> = self.expected_endpoints.iter().collect();
        let found: BTreeSet<&Simplex> = self.endpoints.iter().collect();
        expected == found
    }
}

/// The endpoint of `P(m, n)` colored by `p`: `p` alone in every round, the
/// other process a ghost from the start.
fn endpoint(p: ProcessId, other: ProcessId, rounds: u32) -> Simplex {
    let mut layers = vec![Layer::new([p].into(), [other].into())];
    layers.extend((0..rounds).map(|_| Layer::new([p].into(), ProcessSet::new())));
    Simplex::new(layers).expect("nonempty")
}

/// Checks that a two-process complex is a subdivided interval.
pub fn path_check(c: &Complex) -> Result<PathReport> {
    let budgets: Vec<(ProcessId, u32)> = c.counter().budgets().iter().map(|(&p, &b)| (p, b)).collect();
    let [(a, m), (b, n)] = budgets[..] else {
        return Err(Error::Precondition(format!(
            "path check needs exactly two processes, got {}",
            c.counter()
        )));
    };
    let vertices: Vec<&Simplex> = c.of_dimension(0).collect();
    let index: BTreeMap<&Simplex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut degree = vec![0usize; vertices.len()];
    let mut adj = vec![Vec::new(); vertices.len()];
    let mut edges = 0;
    for e in c.of_dimension(1) {
        let ends: Vec<usize> = crate::complex::vertices(e)?
            .iter()
            .map(|v| index[v])
            .collect();
        degree[ends[0]] += 1;
        degree[ends[1]] += 1;
        adj[ends[0]].push(ends[1]);
        adj[ends[1]].push(ends[0]);
        edges += 1;
    }
    let mut seen = vec![false; vertices.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    let endpoints: Vec<Simplex> = (0..vertices.len())
        .filter(|&i| degree[i] == 1)
        .map(|i| vertices[i].clone())
        .collect();
    let is_path = seen.iter().all(|&x| x)
        && edges + 1 == vertices.len()
        && degree.iter().all(|&d| d <= 2)
        && endpoints.len() == 2;
    Ok(PathReport {
        is_path,
        edges,
        endpoints,
        expected_endpoints: [endpoint(a, b, m), endpoint(b, a, n)],
    })
}

/// Distinct simplices have distinct vertex sets.
pub fn reconstruction_injective(c: &Complex) -> bool {
    let mut seen = BTreeSet::new();
    c.simplices().filter(|s| s.dimension() >= 0).all(|s| {
        crate::complex::vertices(s).is_ok_and(|vs| vs.len() as i64 == s.dimension() + 1 && seen.insert(vs))
    })
}

/// Checks that `γ_S` maps `X_S` bijectively onto `P(r↓S)` with `ρ_S` as
/// inverse, preserving active and ghost sets and commuting with ghosting.
pub fn verify_decomposition_iso(c: &Complex, set: &ProcessSet) -> Result<bool> {
    let iso = decomposition_iso(c, set)?;
    let target = Complex::build_with(iso.target(), &crate::complex::Limits::unbounded())?;
    let part: Vec<&Simplex> = c.simplices().filter(|s| in_part(s, set)).collect();
    let ok = part.par_iter().map(|s| -> Result<Option<Simplex>> {
        let g = iso.forward(s)?;
        let sound = target.contains(&g)
            && iso.backward(&g)? == **s
            && g.active_set() == s.active_set()
            && g.ghost_set() == s.ghost_set()
            && s.active_set()
                .iter()
                .all(|&p| iso.forward(&s.ghost_unchecked(&[p].into())).ok() == Some(g.ghost_unchecked(&[p].into())));
        Ok(sound.then_some(g))
    });
    let images: Vec<Option<Simplex>> = ok.collect::<Result<_>>()?;
    if images.iter().any(Option::is_none) {
        return Ok(false);
    }
    let image: BTreeSet<Simplex> = images.into_iter().flatten().collect();
    Ok(image.len() == part.len() && image.len() == target.len())
}
