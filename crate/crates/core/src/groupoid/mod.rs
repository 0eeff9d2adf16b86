//! Finite groupoids and their actions.
//!
//! The category of actions of a finite groupoid is the concrete boolean topos
//! every other module works in. Objects of the topos are [`FiniteAction`]s,
//! morphisms are [`EquivariantMap`]s, and the subobject algebra of an action is
//! the powerset of its orbits.
//!
//! Connected components of the groupoid play the role of the subobjects of the
//! terminal object: a subobject of `1` is a union of components.

mod action;
mod error;
mod map;
mod slice;

pub use action::{ActionSpec, FiniteAction, Subobject};
pub use error::GroupoidError;
pub use map::{equivariant_maps, pullback, EquivariantMap, FiberProfile, Pullback};
pub use slice::{is_generated_by_finite_objects, slice_groupoid, slice_object};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Raw groupoid description, as found in configuration files.
///
/// `compose` entries are triples `[g, h, gh]` meaning `g ∘ h = gh`, i.e. `h` is
/// applied first and `dst(h) = src(g)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidSpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSpec>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub name: String,
    pub src: String,
    pub dst: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// A validated finite groupoid. Cheap to clone.
#[derive(Clone)]
pub struct FiniteGroupoid(Arc<GroupoidData>);

#[derive(Debug, PartialEq)]
struct GroupoidData {
    objects: Vec<String>,
    object_index: HashMap<String, usize>,
    morphisms: Vec<Morphism>,
    morphism_index: HashMap<String, usize>,
    // compose[g * m + h] = g ∘ h, when dst(h) = src(g)
    compose: Vec<Option<usize>>,
    identities: Vec<usize>,
    inverses: Vec<usize>,
    out_morphisms: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    components: Vec<Vec<usize>>,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroupoid")
            .field("objects", &self.0.objects)
            .field("morphisms", &self.0.morphisms.len())
            .field("components", &self.0.components.len())
            .finish()
    }
}

/// Validate a raw groupoid table. Checks are exhaustive: endpoints, totality of
/// the composition table, identities, associativity and inverses, in that order.
pub fn validate_groupoid(spec: &GroupoidSpec) -> Result<FiniteGroupoid, GroupoidError> {
    let mut object_index = HashMap::new();
    for (i, o) in spec.objects.iter().enumerate() {
        if object_index.insert(o.clone(), i).is_some() {
            return Err(GroupoidError::DuplicateObject(o.clone()));
        }
    }
    let mut morphisms = Vec::with_capacity(spec.morphisms.len());
    let mut morphism_index = HashMap::new();
    for m in &spec.morphisms {
        let lookup = |endpoint: &str| {
            object_index
                .get(endpoint)
                .copied()
                .ok_or_else(|| GroupoidError::DanglingEndpoint {
                    morphism: m.name.clone(),
                    endpoint: endpoint.to_string(),
                })
        };
        let src = lookup(&m.src)?;
        let dst = lookup(&m.dst)?;
        if morphism_index.insert(m.name.clone(), morphisms.len()).is_some() {
            return Err(GroupoidError::DuplicateMorphism(m.name.clone()));
        }
        morphisms.push(Morphism {
            name: m.name.clone(),
            src,
            dst,
        });
    }
    let mut table = Vec::with_capacity(spec.compose.len());
    for [g, h, gh] in &spec.compose {
        let find = |name: &String| {
            morphism_index
                .get(name)
                .copied()
                .ok_or_else(|| GroupoidError::UnknownMorphism(name.clone()))
        };
        table.push((find(g)?, find(h)?, find(gh)?));
    }
    build_indexed(spec.objects.clone(), object_index, morphisms, morphism_index, &table)
}

/// Validation shared by the raw-table path and the internal constructions.
fn build_indexed(
    objects: Vec<String>,
    object_index: HashMap<String, usize>,
    morphisms: Vec<Morphism>,
    morphism_index: HashMap<String, usize>,
    table: &[(usize, usize, usize)],
) -> Result<FiniteGroupoid, GroupoidError> {
    let m = morphisms.len();
    let name = |i: usize| morphisms[i].name.clone();
    let mut compose: Vec<Option<usize>> = vec![None; m * m];
    for &(g, h, gh) in table {
        if morphisms[h].dst != morphisms[g].src {
            return Err(GroupoidError::NotComposable {
                g: name(g),
                h: name(h),
            });
        }
        if morphisms[gh].src != morphisms[h].src || morphisms[gh].dst != morphisms[g].dst {
            return Err(GroupoidError::BadComposite {
                g: name(g),
                h: name(h),
                composite: name(gh),
            });
        }
        match compose[g * m + h] {
            Some(prev) if prev != gh => {
                return Err(GroupoidError::ConflictingComposite {
                    g: name(g),
                    h: name(h),
                })
            }
            _ => compose[g * m + h] = Some(gh),
        }
    }

    let mut out_morphisms = vec![Vec::new(); objects.len()];
    let mut in_morphisms = vec![Vec::new(); objects.len()];
    for (i, mor) in morphisms.iter().enumerate() {
        out_morphisms[mor.src].push(i);
        in_morphisms[mor.dst].push(i);
    }
    for h in 0..m {
        for &g in &out_morphisms[morphisms[h].dst] {
            if compose[g * m + h].is_none() {
                return Err(GroupoidError::MissingComposite {
                    g: name(g),
                    h: name(h),
                });
            }
        }
    }
    let comp = |g: usize, h: usize| compose[g * m + h].expect("table is total");

    let mut identities = Vec::with_capacity(objects.len());
    for (s, obj) in objects.iter().enumerate() {
        let id = out_morphisms[s].iter().copied().find(|&e| {
            morphisms[e].dst == s
                && in_morphisms[s].iter().all(|&f| comp(e, f) == f)
                && out_morphisms[s].iter().all(|&f| comp(f, e) == f)
        });
        match id {
            Some(e) => identities.push(e),
            None => return Err(GroupoidError::MissingIdentity(obj.clone())),
        }
    }

    // (f ∘ g) ∘ h = f ∘ (g ∘ h) over all composable triples
    for h in 0..m {
        for &g in &out_morphisms[morphisms[h].dst] {
            let gh = comp(g, h);
            for &f in &out_morphisms[morphisms[g].dst] {
                if comp(comp(f, g), h) != comp(f, gh) {
                    return Err(GroupoidError::NonAssociative {
                        f: name(f),
                        g: name(g),
                        h: name(h),
                    });
                }
            }
        }
    }

    let mut inverses = Vec::with_capacity(m);
    for g in 0..m {
        let (src, dst) = (morphisms[g].src, morphisms[g].dst);
        let inv = out_morphisms[dst].iter().copied().find(|&k| {
            morphisms[k].dst == src && comp(k, g) == identities[src] && comp(g, k) == identities[dst]
        });
        match inv {
            Some(k) => inverses.push(k),
            None => return Err(GroupoidError::MissingInverse(name(g))),
        }
    }

    let (component_of, components) = connected_components(&objects, &morphisms);
    Ok(FiniteGroupoid(Arc::new(GroupoidData {
        objects,
        object_index,
        morphisms,
        morphism_index,
        compose,
        identities,
        inverses,
        out_morphisms,
        component_of,
        components,
    })))
}

/// Components ordered by their lexicographically least object name.
fn connected_components(objects: &[String], morphisms: &[Morphism]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = objects.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for mor in morphisms {
        let (a, b) = (find(&mut parent, mor.src), find(&mut parent, mor.dst));
        if a != b {
            parent[a] = b;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for s in 0..n {
        let root = find(&mut parent, s);
        groups.entry(root).or_default().push(s);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    let least = |c: &Vec<usize>| c.iter().map(|&s| objects[s].clone()).min().unwrap_or_default();
    components.sort_by_key(least);
    let mut component_of = vec![0; n];
    for (c, members) in components.iter().enumerate() {
        for &s in members {
            component_of[s] = c;
        }
    }
    (component_of, components)
}

impl FiniteGroupoid {
    /// Build a groupoid from name-level data without going through [`GroupoidSpec`].
    pub(crate) fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        table: &[(usize, usize, usize)],
    ) -> Result<Self, GroupoidError> {
        let mut object_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if object_index.insert(o.clone(), i).is_some() {
                return Err(GroupoidError::DuplicateObject(o.clone()));
            }
        }
        let mut morphism_index = HashMap::new();
        for (i, mor) in morphisms.iter().enumerate() {
            if morphism_index.insert(mor.name.clone(), i).is_some() {
                return Err(GroupoidError::DuplicateMorphism(mor.name.clone()));
            }
        }
        build_indexed(objects, object_index, morphisms, morphism_index, table)
    }

    pub fn num_objects(&self) -> usize {
        self.0.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.0.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.0.objects
    }

    pub fn object_name(&self, s: usize) -> &str {
        &self.0.objects[s]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.0.object_index.get(name).copied()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.0.morphisms
    }

    pub fn morphism(&self, g: usize) -> &Morphism {
        &self.0.morphisms[g]
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.0.morphism_index.get(name).copied()
    }

    /// `g ∘ h`, defined when `dst(h) = src(g)`.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.0.compose[g * self.num_morphisms() + h]
    }

    pub fn identity(&self, s: usize) -> usize {
        self.0.identities[s]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.0.inverses[g]
    }

    pub fn is_identity(&self, g: usize) -> bool {
        self.0.identities[self.0.morphisms[g].src] == g
    }

    /// Morphisms with source `s`.
    pub fn out_morphisms(&self, s: usize) -> &[usize] {
        &self.0.out_morphisms[s]
    }

    /// Endomorphisms of `s`, i.e. its vertex group.
    pub fn endomorphisms(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.0.out_morphisms[s]
            .iter()
            .copied()
            .filter(move |&g| self.0.morphisms[g].dst == s)
    }

    pub fn hom(&self, s: usize, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.0.out_morphisms[s]
            .iter()
            .copied()
            .filter(move |&g| self.0.morphisms[g].dst == t)
    }

    pub fn num_components(&self) -> usize {
        self.0.components.len()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.0.components
    }

    pub fn component_of(&self, s: usize) -> usize {
        self.0.component_of[s]
    }

    /// Least object name of a component; used as its key in serialized form.
    pub fn component_representative(&self, c: usize) -> &str {
        self.0.components[c]
            .iter()
            .map(|&s| self.0.objects[s].as_str())
            .min()
            .expect("components are nonempty")
    }

    pub fn component_by_representative(&self, name: &str) -> Option<usize> {
        (0..self.num_components()).find(|&c| self.component_representative(c) == name)
    }

    /// Recover the raw table. `validate_groupoid(&g.to_spec())` reproduces `g`.
    pub fn to_spec(&self) -> GroupoidSpec {
        let d = &self.0;
        let m = d.morphisms.len();
        let mut compose = Vec::new();
        for g in 0..m {
            for h in 0..m {
                if let Some(gh) = d.compose[g * m + h] {
                    compose.push([
                        d.morphisms[g].name.clone(),
                        d.morphisms[h].name.clone(),
                        d.morphisms[gh].name.clone(),
                    ]);
                }
            }
        }
        GroupoidSpec {
            objects: d.objects.clone(),
            morphisms: d
                .morphisms
                .iter()
                .map(|mor| MorphismSpec {
                    name: mor.name.clone(),
                    src: d.objects[mor.src].clone(),
                    dst: d.objects[mor.dst].clone(),
                })
                .collect(),
            compose,
        }
    }

    /// A one-object groupoid from a group given by a multiplication table over
    /// `names`, where `mul[a][b]` is the index of `a·b`, i.e. `a ∘ b`.
    pub fn from_group_table(
        object: &str,
        names: &[String],
        mul: &[Vec<usize>],
    ) -> Result<Self, GroupoidError> {
        let morphisms = names
            .iter()
            .map(|n| Morphism {
                name: n.clone(),
                src: 0,
                dst: 0,
            })
            .collect();
        let mut table = Vec::new();
        for (a, row) in mul.iter().enumerate() {
            for (b, &ab) in row.iter().enumerate() {
                table.push((a, b, ab));
            }
        }
        Self::from_parts(vec![object.to_string()], morphisms, &table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(objects: &[&str], morphisms: &[(&str, &str, &str)], compose: &[[&str; 3]]) -> GroupoidSpec {
        GroupoidSpec {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            morphisms: morphisms
                .iter()
                .map(|(n, s, d)| MorphismSpec {
                    name: n.to_string(),
                    src: s.to_string(),
                    dst: d.to_string(),
                })
                .collect(),
            compose: compose
                .iter()
                .map(|[a, b, c]| [a.to_string(), b.to_string(), c.to_string()])
                .collect(),
        }
    }

    #[test]
    fn single_identity_is_a_groupoid() {
        let g = validate_groupoid(&spec(&["o"], &[("e", "o", "o")], &[["e", "e", "e"]])).unwrap();
        assert_eq!(g.num_components(), 1);
        assert_eq!(g.identity(0), 0);
    }

    #[test]
    fn z2_is_a_groupoid() {
        let g = validate_groupoid(&spec(
            &["o"],
            &[("e", "o", "o"), ("g", "o", "o")],
            &[["e", "e", "e"], ["e", "g", "g"], ["g", "e", "g"], ["g", "g", "e"]],
        ))
        .unwrap();
        assert_eq!(g.num_components(), 1);
        assert_eq!(g.inverse(1), 1);
        assert!(!g.is_identity(1));
    }

    #[test]
    fn idempotent_is_not_invertible() {
        let err = validate_groupoid(&spec(
            &["o"],
            &[("e", "o", "o"), ("g", "o", "o")],
            &[["e", "e", "e"], ["e", "g", "g"], ["g", "e", "g"], ["g", "g", "g"]],
        ))
        .unwrap_err();
        assert_eq!(err, GroupoidError::MissingInverse("g".into()));
    }

    #[test]
    fn dangling_endpoint_is_named() {
        let err = validate_groupoid(&spec(&["o"], &[("e", "o", "p")], &[])).unwrap_err();
        assert_eq!(
            err,
            GroupoidError::DanglingEndpoint {
                morphism: "e".into(),
                endpoint: "p".into()
            }
        );
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // Order-5 loop where every element squares to e; no such group exists.
        let err = validate_groupoid(&spec(
            &["o"],
            &[("e", "o", "o"), ("a", "o", "o"), ("b", "o", "o"), ("c", "o", "o"), ("d", "o", "o")],
            &[
                ["e", "e", "e"], ["e", "a", "a"], ["e", "b", "b"], ["e", "c", "c"], ["e", "d", "d"],
                ["a", "e", "a"], ["a", "a", "e"], ["a", "b", "c"], ["a", "c", "d"], ["a", "d", "b"],
                ["b", "e", "b"], ["b", "a", "d"], ["b", "b", "e"], ["b", "c", "a"], ["b", "d", "c"],
                ["c", "e", "c"], ["c", "a", "b"], ["c", "b", "d"], ["c", "c", "e"], ["c", "d", "a"],
                ["d", "e", "d"], ["d", "a", "c"], ["d", "b", "a"], ["d", "c", "b"], ["d", "d", "e"],
            ],
        ))
        .unwrap_err();
        assert!(matches!(err, GroupoidError::NonAssociative { .. }), "{err:?}");
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let err = validate_groupoid(&spec(
            &["o"],
            &[("e", "o", "o"), ("g", "o", "o")],
            &[["e", "e", "e"], ["e", "g", "g"], ["g", "e", "g"]],
        ))
        .unwrap_err();
        assert_eq!(
            err,
            GroupoidError::MissingComposite {
                g: "g".into(),
                h: "g".into()
            }
        );
    }

    #[test]
    fn components_are_sorted_by_least_object() {
        let g = validate_groupoid(&spec(
            &["z", "b", "a"],
            &[
                ("1z", "z", "z"),
                ("1b", "b", "b"),
                ("1a", "a", "a"),
                ("f", "a", "z"),
                ("fi", "z", "a"),
            ],
            &[
                ["1z", "1z", "1z"],
                ["1b", "1b", "1b"],
                ["1a", "1a", "1a"],
                ["f", "1a", "f"],
                ["1z", "f", "f"],
                ["fi", "1z", "fi"],
                ["1a", "fi", "fi"],
                ["fi", "f", "1a"],
                ["f", "fi", "1z"],
            ],
        ))
        .unwrap();
        assert_eq!(g.num_components(), 2);
        assert_eq!(g.component_representative(0), "a");
        assert_eq!(g.component_representative(1), "b");
        assert_eq!(g.component_of(0), g.component_of(2));
    }

    #[test]
    fn spec_round_trip() {
        let s = spec(
            &["o"],
            &[("e", "o", "o"), ("g", "o", "o")],
            &[["e", "e", "e"], ["e", "g", "g"], ["g", "e", "g"], ["g", "g", "e"]],
        );
        let g = validate_groupoid(&s).unwrap();
        assert_eq!(validate_groupoid(&g.to_spec()).unwrap(), g);
    }
}
