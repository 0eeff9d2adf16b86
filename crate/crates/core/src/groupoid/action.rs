use super::{FiniteGroupoid, GroupoidError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

/// Raw action description: element ids per object and, per morphism, the
/// transport bijection as an `{element: image}` map. Identity morphisms may be
/// left out.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    #[serde(default)]
    pub fibers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

/// An action of a finite groupoid on finite sets: an object of the topos.
///
/// Elements are indexed globally in lexicographic order of their ids, and each
/// fiber lists its elements in that same order. Cheap to clone.
#[derive(Clone)]
pub struct FiniteAction(Arc<ActionData>);

#[derive(Debug, PartialEq)]
struct ActionData {
    groupoid: FiniteGroupoid,
    elements: Vec<String>,
    index: HashMap<String, usize>,
    object_of: Vec<usize>,
    fibers: Vec<Vec<usize>>,
    position: Vec<usize>,
    // transport[g][i] = image of fibers[src g][i]
    transport: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    // a morphism sending the orbit representative to the element
    orbit_path: Vec<usize>,
}

impl PartialEq for FiniteAction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Debug for FiniteAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAction")
            .field("elements", &self.0.elements)
            .field("orbits", &self.0.orbits.len())
            .finish()
    }
}

/// An invariant (or candidate) subset of an action, as sorted element indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subobject {
    members: Vec<usize>,
}

impl Subobject {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Subobject { members }
    }

    pub fn empty() -> Self {
        Subobject::default()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self, other: &Subobject) -> Subobject {
        Subobject::new(self.members.iter().chain(&other.members).copied())
    }

    pub fn intersection(&self, other: &Subobject) -> Subobject {
        Subobject {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Subobject) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }
}

impl FiniteAction {
    /// Build an action from per-object element names (in any order) and a
    /// transport rule `act(g, i) = j` sending the `i`-th listed element over
    /// `src(g)` to the `j`-th listed element over `dst(g)`.
    pub(crate) fn from_fibers(
        groupoid: &FiniteGroupoid,
        names: Vec<Vec<String>>,
        act: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, GroupoidError> {
        let g = groupoid;
        assert_eq!(names.len(), g.num_objects(), "one name list per object");
        let mut all: Vec<(String, usize, usize)> = Vec::new();
        for (s, fiber) in names.iter().enumerate() {
            for (i, n) in fiber.iter().enumerate() {
                all.push((n.clone(), s, i));
            }
        }
        all.sort();
        let mut index = HashMap::with_capacity(all.len());
        let mut elements = Vec::with_capacity(all.len());
        let mut object_of = Vec::with_capacity(all.len());
        let mut global_of: Vec<Vec<usize>> = names.iter().map(|f| vec![0; f.len()]).collect();
        for (k, (n, s, i)) in all.into_iter().enumerate() {
            if index.insert(n.clone(), k).is_some() {
                return Err(GroupoidError::DuplicateElement(n));
            }
            elements.push(n);
            object_of.push(s);
            global_of[s][i] = k;
        }
        let mut fibers = vec![Vec::new(); g.num_objects()];
        for (k, &s) in object_of.iter().enumerate() {
            fibers[s].push(k);
        }
        let mut position = vec![0; elements.len()];
        for fiber in &fibers {
            for (p, &k) in fiber.iter().enumerate() {
                position[k] = p;
            }
        }
        // input position of a global element within its fiber
        let mut input_pos = vec![0; elements.len()];
        for fiber in &global_of {
            for (i, &k) in fiber.iter().enumerate() {
                input_pos[k] = i;
            }
        }

        let mut transport = Vec::with_capacity(g.num_morphisms());
        for (m, mor) in g.morphisms().iter().enumerate() {
            let (src, dst) = (mor.src, mor.dst);
            if names[src].len() != names[dst].len() {
                return Err(GroupoidError::NotABijection(mor.name.clone()));
            }
            let mut seen = vec![false; names[dst].len()];
            let mut row = Vec::with_capacity(fibers[src].len());
            for &k in &fibers[src] {
                let j = act(m, input_pos[k]);
                if j >= seen.len() || seen[j] {
                    return Err(GroupoidError::NotABijection(mor.name.clone()));
                }
                seen[j] = true;
                row.push(global_of[dst][j]);
            }
            transport.push(row);
        }

        for (s, fiber) in fibers.iter().enumerate() {
            let e = g.identity(s);
            if transport[e].iter().zip(fiber).any(|(a, b)| a != b) {
                return Err(GroupoidError::IdentityNotTrivial(g.morphism(e).name.clone()));
            }
        }
        for h in 0..g.num_morphisms() {
            let hm = g.morphism(h);
            for &gm in g.out_morphisms(hm.dst) {
                let gh = g.compose(gm, h).expect("composable");
                for (i, &x) in fibers[hm.src].iter().enumerate() {
                    let hx = transport[h][i];
                    let ghx = transport[gm][position[hx]];
                    if transport[gh][position[x]] != ghx {
                        return Err(GroupoidError::NotFunctorial {
                            g: g.morphism(gm).name.clone(),
                            h: hm.name.clone(),
                        });
                    }
                }
            }
        }

        let (orbit_of, orbits, orbit_path) = compute_orbits(g, &object_of, &position, &transport);
        Ok(FiniteAction(Arc::new(ActionData {
            groupoid: g.clone(),
            elements,
            index,
            object_of,
            fibers,
            position,
            transport,
            orbit_of,
            orbits,
            orbit_path,
        })))
    }

    /// Validate an action given in raw form against a groupoid.
    pub fn from_spec(groupoid: &FiniteGroupoid, spec: &ActionSpec) -> Result<Self, GroupoidError> {
        let mut names = vec![Vec::new(); groupoid.num_objects()];
        for (obj, ids) in &spec.fibers {
            let s = groupoid
                .object_index(obj)
                .ok_or_else(|| GroupoidError::UnknownObject(obj.clone()))?;
            names[s] = ids.clone();
        }
        for m in spec.maps.keys() {
            if groupoid.morphism_index(m).is_none() {
                return Err(GroupoidError::UnknownMorphism(m.clone()));
            }
        }
        let local: Vec<HashMap<&str, usize>> = names
            .iter()
            .map(|f| f.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect())
            .collect();
        // resolve every transport table up front so errors carry names
        let mut tables: Vec<Vec<usize>> = Vec::with_capacity(groupoid.num_morphisms());
        for (m, mor) in groupoid.morphisms().iter().enumerate() {
            let (src, dst) = (mor.src, mor.dst);
            let table = match spec.maps.get(&mor.name) {
                None if groupoid.is_identity(m) => (0..names[src].len()).collect(),
                None if names[src].is_empty() && names[dst].is_empty() => Vec::new(),
                None => return Err(GroupoidError::MissingTransport(mor.name.clone())),
                Some(assign) => {
                    for from in assign.keys() {
                        if !local[src].contains_key(from.as_str()) {
                            return Err(GroupoidError::WrongFiber {
                                element: from.clone(),
                                object: groupoid.object_name(src).to_string(),
                            });
                        }
                    }
                    let mut row = Vec::with_capacity(names[src].len());
                    for from in &names[src] {
                        let to = assign
                            .get(from)
                            .ok_or_else(|| GroupoidError::MissingAssignment(from.clone()))?;
                        let j = local[dst].get(to.as_str()).copied().ok_or_else(|| {
                            GroupoidError::WrongFiber {
                                element: to.clone(),
                                object: groupoid.object_name(dst).to_string(),
                            }
                        })?;
                        row.push(j);
                    }
                    row
                }
            };
            tables.push(table);
        }
        Self::from_fibers(groupoid, names, |m, i| tables[m][i])
    }

    pub fn to_spec(&self) -> ActionSpec {
        let g = self.groupoid();
        let mut fibers = BTreeMap::new();
        for s in 0..g.num_objects() {
            fibers.insert(
                g.object_name(s).to_string(),
                self.fiber(s).iter().map(|&x| self.element_name(x).to_string()).collect(),
            );
        }
        let mut maps = BTreeMap::new();
        for (m, mor) in g.morphisms().iter().enumerate() {
            if g.is_identity(m) {
                continue;
            }
            let assign = self
                .fiber(mor.src)
                .iter()
                .map(|&x| (self.element_name(x).to_string(), self.element_name(self.act(m, x)).to_string()))
                .collect();
            maps.insert(mor.name.clone(), assign);
        }
        ActionSpec { fibers, maps }
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.0.groupoid
    }

    pub fn len(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.0.elements
    }

    pub fn element_name(&self, x: usize) -> &str {
        &self.0.elements[x]
    }

    pub fn element_index(&self, name: &str) -> Result<usize, GroupoidError> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| GroupoidError::UnknownElement(name.to_string()))
    }

    pub fn object_of(&self, x: usize) -> usize {
        self.0.object_of[x]
    }

    pub fn fiber(&self, s: usize) -> &[usize] {
        &self.0.fibers[s]
    }

    /// Position of `x` within its fiber.
    pub fn position(&self, x: usize) -> usize {
        self.0.position[x]
    }

    /// Transport `x` along `g`; `x` must lie over `src(g)`.
    pub fn act(&self, g: usize, x: usize) -> usize {
        debug_assert_eq!(self.object_of(x), self.groupoid().morphism(g).src);
        self.0.transport[g][self.0.position[x]]
    }

    /// Orbits, each sorted, listed in order of their least element.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.0.orbits
    }

    pub fn num_orbits(&self) -> usize {
        self.0.orbits.len()
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.0.orbit_of[x]
    }

    /// Least element of an orbit; its id keys the orbit in serialized form.
    pub fn orbit_representative(&self, o: usize) -> usize {
        self.0.orbits[o][0]
    }

    pub fn orbit_by_representative(&self, name: &str) -> Option<usize> {
        let x = self.0.index.get(name)?;
        let o = self.orbit_of(*x);
        (self.orbit_representative(o) == *x).then_some(o)
    }

    /// A morphism carrying the representative of `x`'s orbit to `x`.
    pub fn orbit_path(&self, x: usize) -> usize {
        self.0.orbit_path[x]
    }

    pub fn orbit_subobject(&self, o: usize) -> Subobject {
        Subobject::new(self.0.orbits[o].iter().copied())
    }

    /// Component of the groupoid an orbit lives over.
    pub fn orbit_component(&self, o: usize) -> usize {
        let g = self.groupoid();
        g.component_of(self.object_of(self.orbit_representative(o)))
    }

    /// `|o ∩ X_s|`, the same for every object `s` of the orbit's component.
    pub fn orbit_fiber_size(&self, o: usize) -> usize {
        let rep = self.orbit_representative(o);
        let s = self.object_of(rep);
        self.0.orbits[o].iter().filter(|&&x| self.object_of(x) == s).count()
    }

    /// Number of endomorphisms of `x`'s base object fixing `x`.
    pub fn stabilizer_order(&self, x: usize) -> usize {
        let s = self.object_of(x);
        self.groupoid().endomorphisms(s).filter(|&g| self.act(g, x) == x).count()
    }

    pub fn stabilizer_order_of(&self, name: &str) -> Result<usize, GroupoidError> {
        Ok(self.stabilizer_order(self.element_index(name)?))
    }

    /// Fiber size per component of the groupoid.
    pub fn internal_cardinal(&self) -> Vec<usize> {
        let g = self.groupoid();
        g.components()
            .iter()
            .map(|objs| self.fiber(objs[0]).len())
            .collect()
    }

    pub fn full(&self) -> Subobject {
        Subobject::new(0..self.len())
    }

    pub fn subobject_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Subobject, GroupoidError> {
        names
            .iter()
            .map(|n| self.element_index(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()
            .map(Subobject::new)
    }

    pub fn is_invariant(&self, s: &Subobject) -> bool {
        s.members().iter().all(|&x| {
            x < self.len()
                && self
                    .groupoid()
                    .out_morphisms(self.object_of(x))
                    .iter()
                    .all(|&g| s.contains(self.act(g, x)))
        })
    }

    /// Orbits contained in an invariant subobject.
    pub fn orbits_in(&self, s: &Subobject) -> Vec<usize> {
        (0..self.num_orbits())
            .filter(|&o| s.contains(self.orbit_representative(o)))
            .collect()
    }

    pub fn subobject_from_orbits(&self, orbits: &[usize]) -> Subobject {
        Subobject::new(orbits.iter().flat_map(|&o| self.0.orbits[o].iter().copied()))
    }

    /// Every invariant subobject, indexed by a bitmask over orbits.
    pub fn invariant_subobjects(&self) -> impl Iterator<Item = Subobject> + '_ {
        let k = self.num_orbits();
        assert!(k < 26, "too many orbits to enumerate Sub(X)");
        (0u32..(1u32 << k)).map(move |mask| {
            let chosen: Vec<usize> = (0..k).filter(|o| mask & (1 << o) != 0).collect();
            self.subobject_from_orbits(&chosen)
        })
    }

    /// The subobject as an action in its own right, keeping element ids.
    pub fn restrict(&self, s: &Subobject) -> Result<FiniteAction, GroupoidError> {
        if !self.is_invariant(s) {
            return Err(GroupoidError::NotInvariant);
        }
        let g = self.groupoid();
        let names: Vec<Vec<String>> = (0..g.num_objects())
            .map(|o| {
                self.fiber(o)
                    .iter()
                    .filter(|&&x| s.contains(x))
                    .map(|&x| self.element_name(x).to_string())
                    .collect()
            })
            .collect();
        let local: Vec<Vec<usize>> = (0..g.num_objects())
            .map(|o| self.fiber(o).iter().copied().filter(|&x| s.contains(x)).collect())
            .collect();
        let src_of = |m: usize| g.morphism(m).src;
        let dst_of = |m: usize| g.morphism(m).dst;
        FiniteAction::from_fibers(g, names, |m, i| {
            let y = self.act(m, local[src_of(m)][i]);
            local[dst_of(m)].iter().position(|&z| z == y).expect("invariant")
        })
    }

    /// The empty action.
    pub fn empty(groupoid: &FiniteGroupoid) -> Self {
        FiniteAction::from_fibers(groupoid, vec![Vec::new(); groupoid.num_objects()], |_, _| 0)
            .expect("empty action is valid")
    }

    /// The terminal object: one point `pt:<object>` over every object.
    pub fn terminal(groupoid: &FiniteGroupoid) -> Self {
        let names = groupoid
            .objects()
            .iter()
            .map(|o| vec![format!("pt:{o}")])
            .collect();
        FiniteAction::from_fibers(groupoid, names, |_, _| 0).expect("terminal action is valid")
    }

    /// The representable action at `s`: the fiber over `t` is `Hom(s, t)`,
    /// acted on by post-composition. Element ids are morphism names.
    pub fn representable(groupoid: &FiniteGroupoid, s: usize) -> Self {
        let g = groupoid;
        let homs: Vec<Vec<usize>> = (0..g.num_objects()).map(|t| g.hom(s, t).collect()).collect();
        let names = homs
            .iter()
            .map(|hs| hs.iter().map(|&h| g.morphism(h).name.clone()).collect())
            .collect();
        FiniteAction::from_fibers(g, names, |m, i| {
            let src = g.morphism(m).src;
            let dst = g.morphism(m).dst;
            let composite = g.compose(m, homs[src][i]).expect("composable");
            homs[dst].iter().position(|&h| h == composite).expect("hom set is closed")
        })
        .expect("representable action is valid")
    }

    /// Fiberwise product with diagonal transport; ids are `(x,y)`.
    pub fn product(&self, other: &FiniteAction) -> Result<FiniteAction, GroupoidError> {
        let g = self.groupoid();
        if g != other.groupoid() {
            return Err(GroupoidError::GroupoidMismatch);
        }
        let names = (0..g.num_objects())
            .map(|s| {
                let mut v = Vec::new();
                for &x in self.fiber(s) {
                    for &y in other.fiber(s) {
                        v.push(format!("({},{})", self.element_name(x), other.element_name(y)));
                    }
                }
                v
            })
            .collect();
        FiniteAction::from_fibers(g, names, |m, i| {
            let mor = g.morphism(m);
            let width = other.fiber(mor.src).len();
            let (xi, yi) = (i / width, i % width);
            let gx = self.act(m, self.fiber(mor.src)[xi]);
            let gy = other.act(m, other.fiber(mor.src)[yi]);
            self.position(gx) * other.fiber(mor.dst).len() + other.position(gy)
        })
    }

    /// Disjoint union; ids are prefixed `l.` and `r.`.
    pub fn coproduct(&self, other: &FiniteAction) -> Result<FiniteAction, GroupoidError> {
        let g = self.groupoid();
        if g != other.groupoid() {
            return Err(GroupoidError::GroupoidMismatch);
        }
        let names = (0..g.num_objects())
            .map(|s| {
                self.fiber(s)
                    .iter()
                    .map(|&x| format!("l.{}", self.element_name(x)))
                    .chain(other.fiber(s).iter().map(|&y| format!("r.{}", other.element_name(y))))
                    .collect()
            })
            .collect();
        FiniteAction::from_fibers(g, names, |m, i| {
            let mor = g.morphism(m);
            let left = self.fiber(mor.src).len();
            if i < left {
                self.position(self.act(m, self.fiber(mor.src)[i]))
            } else {
                let y = other.act(m, other.fiber(mor.src)[i - left]);
                self.fiber(mor.dst).len() + other.position(y)
            }
        })
    }
}

fn compute_orbits(
    g: &FiniteGroupoid,
    object_of: &[usize],
    position: &[usize],
    transport: &[Vec<usize>],
) -> (Vec<usize>, Vec<Vec<usize>>, Vec<usize>) {
    let n = object_of.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbit_path = vec![0; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let o = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = o;
        orbit_path[start] = g.identity(object_of[start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &m in g.out_morphisms(object_of[x]) {
                let y = transport[m][position[x]];
                if orbit_of[y] == usize::MAX {
                    orbit_of[y] = o;
                    orbit_path[y] = g.compose(m, orbit_path[x]).expect("composable");
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    (orbit_of, orbits, orbit_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{named_group, z2_swap_action};

    #[test]
    fn trivial_group_gives_singleton_orbits() {
        let g = named_group("trivial");
        let spec = ActionSpec {
            fibers: BTreeMap::from([("o".into(), vec!["p".into(), "q".into()])]),
            maps: BTreeMap::new(),
        };
        let x = FiniteAction::from_spec(&g, &spec).unwrap();
        assert_eq!(x.orbits(), &[vec![0], vec![1]]);
        assert_eq!(x.stabilizer_order_of("p").unwrap(), 1);
        assert_eq!(x.stabilizer_order_of("q").unwrap(), 1);
    }

    #[test]
    fn z2_swap_orbits_and_stabilizers() {
        let x = z2_swap_action();
        let names: Vec<Vec<&str>> = x
            .orbits()
            .iter()
            .map(|o| o.iter().map(|&i| x.element_name(i)).collect())
            .collect();
        assert_eq!(names, vec![vec!["a", "b"], vec!["c"]]);
        assert_eq!(x.stabilizer_order_of("a").unwrap(), 1);
        assert_eq!(x.stabilizer_order_of("c").unwrap(), 2);
        assert_eq!(x.internal_cardinal(), vec![3]);
        assert!(matches!(
            x.stabilizer_order_of("zz"),
            Err(GroupoidError::UnknownElement(_))
        ));
    }

    #[test]
    fn empty_action_has_no_orbits() {
        let g = named_group("Z2");
        let e = FiniteAction::empty(&g);
        assert!(e.orbits().is_empty());
        assert_eq!(e.internal_cardinal(), vec![0]);
        assert_eq!(e.invariant_subobjects().count(), 1);
    }

    #[test]
    fn non_bijective_transport_is_rejected() {
        let g = named_group("Z2");
        let spec = ActionSpec {
            fibers: BTreeMap::from([("o".into(), vec!["a".into(), "b".into()])]),
            maps: BTreeMap::from([(
                "g".into(),
                BTreeMap::from([("a".into(), "a".into()), ("b".into(), "a".into())]),
            )]),
        };
        assert_eq!(
            FiniteAction::from_spec(&g, &spec).unwrap_err(),
            GroupoidError::NotABijection("g".into())
        );
    }

    #[test]
    fn non_functorial_transport_is_rejected() {
        // Z3 = {e, r, r2}; a transposition for r cannot satisfy r∘r = r2
        let g = named_group("Z3");
        let swap = BTreeMap::from([
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "a".to_string()),
            ("c".to_string(), "c".to_string()),
        ]);
        let spec = ActionSpec {
            fibers: BTreeMap::from([("o".into(), vec!["a".into(), "b".into(), "c".into()])]),
            maps: BTreeMap::from([("r".into(), swap.clone()), ("r2".into(), swap)]),
        };
        assert!(matches!(
            FiniteAction::from_spec(&g, &spec),
            Err(GroupoidError::NotFunctorial { .. })
        ));
    }

    #[test]
    fn spec_round_trip() {
        let x = z2_swap_action();
        assert_eq!(FiniteAction::from_spec(x.groupoid(), &x.to_spec()).unwrap(), x);
    }

    #[test]
    fn product_with_terminal_is_elementwise_identity() {
        let x = z2_swap_action();
        let one = FiniteAction::terminal(x.groupoid());
        let p = x.product(&one).unwrap();
        assert_eq!(p.len(), x.len());
        assert_eq!(p.num_orbits(), x.num_orbits());
        for o in 0..x.num_orbits() {
            assert_eq!(p.orbits()[o].len(), x.orbits()[o].len());
        }
    }

    #[test]
    fn restriction_keeps_ids() {
        let x = z2_swap_action();
        let s = x.orbit_subobject(0);
        let r = x.restrict(&s).unwrap();
        assert_eq!(r.elements(), &["a".to_string(), "b".to_string()]);
        let bad = x.subobject_from_names(&["a"]).unwrap();
        assert_eq!(x.restrict(&bad).unwrap_err(), GroupoidError::NotInvariant);
    }

    #[test]
    fn regular_representation() {
        let g = named_group("Z2");
        let r = FiniteAction::representable(&g, 0);
        assert_eq!(r.len(), 2);
        assert_eq!(r.num_orbits(), 1);
        assert_eq!(r.stabilizer_order(0), 1);
    }
}
