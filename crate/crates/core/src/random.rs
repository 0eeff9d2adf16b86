//! Small groups, seeded random groupoid models, and the standard fixtures.
//!
//! Random models are disjoint unions of connected groupoids `G × pair(k)`,
//! each a finite group `G` spread over `k` isomorphic objects. Actions are
//! built orbit by orbit as coset actions `G/H`.

use crate::groupoid::{equivariant_maps, ActionSpec, EquivariantMap, FiniteAction, FiniteGroupoid, Morphism};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Deterministic RNG used by every randomized check.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A finite group as a multiplication table; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub names: Vec<String>,
    /// `mul[a][b]` is `a·b` (apply `b` first).
    pub mul: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.mul[a][b] == 0).expect("group")
    }

    /// Subgroup generated by `gens`, as sorted element indices.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let b = self.mul[g][a];
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        (0..self.order()).filter(|&a| seen[a]).collect()
    }

    /// Left cosets `aH`: the coset id of every element, and one representative per coset.
    pub fn left_cosets(&self, subgroup: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut coset = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for a in 0..self.order() {
            if coset[a] == usize::MAX {
                for &h in subgroup {
                    coset[self.mul[a][h]] = reps.len();
                }
                reps.push(a);
            }
        }
        (coset, reps)
    }
}

fn perm_closure(degree: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..degree).collect();
    let mut elems = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let p: Vec<usize> = (0..degree).map(|k| g[elems[i][k]]).collect();
            if !index.contains_key(&p) {
                index.insert(p.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(p);
            }
        }
    }
    elems
}

fn table_from_perms(perms: &[Vec<usize>], names: Vec<String>) -> GroupTable {
    let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mul = perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| {
                    let ab: Vec<usize> = b.iter().map(|&k| a[k]).collect();
                    index[&ab]
                })
                .collect()
        })
        .collect();
    GroupTable { names, mul }
}

/// Names accepted by [`group_table`].
pub const GROUP_NAMES: &[&str] = &[
    "trivial", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "S3", "D4", "Z2xZ4", "A4", "S4",
];

fn cycle(n: usize) -> Vec<usize> {
    (0..n).map(|k| (k + 1) % n).collect()
}

/// A small group by name. Cyclic groups use `e, r, r2, …` (`e, g` for Z2).
pub fn group_table(name: &str) -> GroupTable {
    let (degree, gens): (usize, Vec<Vec<usize>>) = match name {
        "trivial" => (1, vec![]),
        "Z2" => (2, vec![cycle(2)]),
        "Z3" => (3, vec![cycle(3)]),
        "Z4" => (4, vec![cycle(4)]),
        "Z5" => (5, vec![cycle(5)]),
        "Z6" => (6, vec![cycle(6)]),
        "Z2xZ2" => (4, vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]),
        "Z2xZ4" => (6, vec![vec![1, 0, 2, 3, 4, 5], vec![0, 1, 3, 4, 5, 2]]),
        "S3" => (3, vec![vec![1, 0, 2], vec![1, 2, 0]]),
        "D4" => (4, vec![vec![1, 2, 3, 0], vec![3, 2, 1, 0]]),
        "A4" => (4, vec![vec![1, 2, 0, 3], vec![1, 0, 3, 2]]),
        "S4" => (4, vec![vec![1, 2, 3, 0], vec![1, 0, 2, 3]]),
        other => panic!("unknown group `{other}`"),
    };
    let perms = perm_closure(degree, &gens);
    let names = match name {
        "Z2" => vec!["e".to_string(), "g".to_string()],
        n if n.starts_with('Z') && !n.contains('x') => (0..perms.len())
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "r".to_string(),
                k => format!("r{k}"),
            })
            .collect(),
        _ => (0..perms.len())
            .map(|k| if k == 0 { "e".to_string() } else { format!("g{k}") })
            .collect(),
    };
    table_from_perms(&perms, names)
}

/// A named group as a one-object groupoid on the object `o`.
pub fn named_group(name: &str) -> FiniteGroupoid {
    let t = group_table(name);
    FiniteGroupoid::from_group_table("o", &t.names, &t.mul).expect("group tables are groupoids")
}

/// ℤ/2 acting on `{a, b, c}` by swapping `a` and `b`.
pub fn z2_swap_action() -> FiniteAction {
    let g = named_group("Z2");
    let spec = ActionSpec {
        fibers: BTreeMap::from([("o".into(), vec!["a".into(), "b".into(), "c".into()])]),
        maps: BTreeMap::from([(
            "g".into(),
            BTreeMap::from([
                ("a".to_string(), "b".to_string()),
                ("b".to_string(), "a".to_string()),
                ("c".to_string(), "c".to_string()),
            ]),
        )]),
    };
    FiniteAction::from_spec(&g, &spec).expect("fixture is valid")
}

/// The trivial group acting on a plain set.
pub fn trivial_set(names: &[&str]) -> FiniteAction {
    let g = named_group("trivial");
    let spec = ActionSpec {
        fibers: BTreeMap::from([("o".into(), names.iter().map(|s| s.to_string()).collect())]),
        maps: BTreeMap::new(),
    };
    FiniteAction::from_spec(&g, &spec).expect("fixture is valid")
}

/// One connected component: a group spread over `objects` isomorphic objects.
#[derive(Debug, Clone)]
pub struct ComponentLayout {
    pub group: GroupTable,
    pub objects: Vec<usize>,
    morphism_offset: usize,
}

impl ComponentLayout {
    /// Index of the morphism `(g, i → j)`.
    pub fn morphism(&self, g: usize, i: usize, j: usize) -> usize {
        let k = self.objects.len();
        self.morphism_offset + (g * k + i) * k + j
    }
}

/// A groupoid together with its decomposition as `⊔ G_c × pair(k_c)`.
#[derive(Debug, Clone)]
pub struct GroupoidModel {
    pub groupoid: FiniteGroupoid,
    pub components: Vec<ComponentLayout>,
}

impl GroupoidModel {
    /// Build from `(group, number of objects)` per component.
    pub fn new(parts: &[(GroupTable, usize)]) -> Self {
        let single = parts.len() == 1 && parts[0].1 == 1;
        let mut objects = Vec::new();
        let mut morphisms = Vec::new();
        let mut table = Vec::new();
        let mut components = Vec::new();
        for (c, (group, k)) in parts.iter().enumerate() {
            let k = *k;
            assert!(k >= 1);
            let obj0 = objects.len();
            for i in 0..k {
                objects.push(if single { "o".to_string() } else { format!("c{c}o{i}") });
            }
            let offset = morphisms.len();
            for g in 0..group.order() {
                for i in 0..k {
                    for j in 0..k {
                        let name = if single {
                            group.names[g].clone()
                        } else if k == 1 {
                            format!("c{c}.{}", group.names[g])
                        } else {
                            format!("c{c}.{}:{i}>{j}", group.names[g])
                        };
                        morphisms.push(Morphism {
                            name,
                            src: obj0 + i,
                            dst: obj0 + j,
                        });
                    }
                }
            }
            let layout = ComponentLayout {
                group: group.clone(),
                objects: (obj0..obj0 + k).collect(),
                morphism_offset: offset,
            };
            // (a, j→l) ∘ (b, i→j) = (ab, i→l)
            for a in 0..group.order() {
                for b in 0..group.order() {
                    for i in 0..k {
                        for j in 0..k {
                            for l in 0..k {
                                table.push((
                                    layout.morphism(a, j, l),
                                    layout.morphism(b, i, j),
                                    layout.morphism(group.mul[a][b], i, l),
                                ));
                            }
                        }
                    }
                }
            }
            components.push(layout);
        }
        let groupoid = FiniteGroupoid::from_parts(objects, morphisms, &table).expect("model groupoid is valid");
        GroupoidModel { groupoid, components }
    }

    /// A random model: 1–2 components, groups of order at most `max_order`,
    /// 1–2 objects per component.
    pub fn random(rng: &mut impl Rng, max_order: usize) -> Self {
        let pool: Vec<GroupTable> = GROUP_NAMES
            .iter()
            .map(|n| group_table(n))
            .filter(|t| t.order() <= max_order)
            .collect();
        let ncomp = rng.random_range(1..=2);
        let parts: Vec<(GroupTable, usize)> = (0..ncomp)
            .map(|_| (pool[rng.random_range(0..pool.len())].clone(), rng.random_range(1..=2)))
            .collect();
        Self::new(&parts)
    }

    /// Component index in the validated groupoid of layout `c`.
    pub fn groupoid_component(&self, c: usize) -> usize {
        self.groupoid.component_of(self.components[c].objects[0])
    }

    /// Disjoint union of coset actions: `orbits` lists `(layout component, subgroup)`.
    pub fn coset_action(&self, orbits: &[(usize, Vec<usize>)]) -> FiniteAction {
        let g = &self.groupoid;
        let mut names = vec![Vec::new(); g.num_objects()];
        // (object, position) -> (orbit, coset), and the reverse lookup
        let mut slot: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.num_objects()];
        let mut lookup: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut cosets = Vec::new();
        for (r, (c, sub)) in orbits.iter().enumerate() {
            let layout = &self.components[*c];
            let (coset_of, reps) = layout.group.left_cosets(sub);
            for (i, &s) in layout.objects.iter().enumerate() {
                for q in 0..reps.len() {
                    let name = if layout.objects.len() == 1 {
                        format!("x{r}_{q}")
                    } else {
                        format!("x{r}_{q}@{i}")
                    };
                    lookup.insert((s, r, q), names[s].len());
                    names[s].push(name);
                    slot[s].push((r, q));
                }
            }
            cosets.push((coset_of, reps));
        }
        // morphism index -> (layout component, group element)
        let mut decode = vec![(0usize, 0usize); g.num_morphisms()];
        for (c, layout) in self.components.iter().enumerate() {
            let k = layout.objects.len();
            for a in 0..layout.group.order() {
                for i in 0..k {
                    for j in 0..k {
                        decode[layout.morphism(a, i, j)] = (c, a);
                    }
                }
            }
        }
        FiniteAction::from_fibers(g, names, |m, p| {
            let mor = g.morphism(m);
            let (c, a) = decode[m];
            let (r, q) = slot[mor.src][p];
            let (coset_of, reps) = &cosets[r];
            let image = coset_of[self.components[c].group.mul[a][reps[q]]];
            lookup[&(mor.dst, r, image)]
        })
        .expect("coset actions are valid")
    }

    /// A random subgroup of layout component `c`, generated by up to two elements.
    pub fn random_subgroup(&self, rng: &mut impl Rng, c: usize) -> Vec<usize> {
        let group = &self.components[c].group;
        let gens: Vec<usize> = (0..rng.random_range(0..=2))
            .map(|_| rng.random_range(0..group.order()))
            .collect();
        group.generated_subgroup(&gens)
    }

    /// A random action with at most `max_elements` elements (possibly empty).
    pub fn random_action(&self, rng: &mut impl Rng, max_elements: usize) -> FiniteAction {
        let mut orbits = Vec::new();
        let mut used = 0;
        for _ in 0..6 {
            let c = rng.random_range(0..self.components.len());
            let sub = self.random_subgroup(rng, c);
            let layout = &self.components[c];
            let size = layout.objects.len() * layout.group.order() / sub.len();
            if used + size <= max_elements {
                used += size;
                orbits.push((c, sub));
            }
            if rng.random_bool(0.3) {
                break;
            }
        }
        self.coset_action(&orbits)
    }

    /// Like [`random_action`](Self::random_action) but never empty.
    pub fn random_nonempty_action(&self, rng: &mut impl Rng, max_elements: usize) -> FiniteAction {
        loop {
            let x = self.random_action(rng, max_elements);
            if !x.is_empty() {
                return x;
            }
        }
    }
}

/// A uniformly chosen map among the first `limit` maps `X → Y`, if any exist.
pub fn random_map(rng: &mut impl Rng, x: &FiniteAction, y: &FiniteAction, limit: usize) -> Option<EquivariantMap> {
    let mut maps = equivariant_maps(x, y, limit).expect("same groupoid");
    (!maps.is_empty()).then(|| maps.swap_remove(rng.random_range(0..maps.len())))
}

/// A random epimorphism onto `x`: either `X × A → X` or `[id, π]: X ⊔ (X × A) → X`,
/// where `A` has a nonempty fiber over every object.
pub fn random_cover(rng: &mut impl Rng, model: &GroupoidModel, x: &FiniteAction, max_extra: usize) -> EquivariantMap {
    let g = &model.groupoid;
    let a = FiniteAction::terminal(g)
        .coproduct(&model.random_action(rng, max_extra))
        .expect("same groupoid");
    let proj = EquivariantMap::first_projection(x, &a).expect("same groupoid");
    if rng.random_bool(0.5) {
        proj
    } else {
        EquivariantMap::copair(&EquivariantMap::identity(x), &proj).expect("same codomain")
    }
}

/// Positive weights drawn uniformly from `[lo, hi)`.
pub fn random_weights(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Positive dyadic weights `k / 1024`, `k ∈ [1, 4096]`; products and quotients by
/// small integers stay exact.
pub fn random_dyadic_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(1..=4096u32) as f64 / 1024.0).collect()
}
