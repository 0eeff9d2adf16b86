use super::{FiniteAction, GroupoidError, Subobject};
use std::collections::BTreeMap;

/// A natural transformation between two actions of the same groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantMap {
    source: FiniteAction,
    target: FiniteAction,
    image: Vec<usize>,
}

/// Fiber sizes of a map. At finite scale every map is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberProfile {
    pub is_finite: bool,
    /// `Some(n)` when every fiber has exactly `n` elements; absent on an empty codomain.
    pub n_to_1: Option<usize>,
    /// `|f⁻¹(y)|` for every element `y` of the codomain.
    pub fiber_sizes: Vec<usize>,
}

impl FiberProfile {
    /// Fiber sizes as a multiset `{size: multiplicity}`.
    pub fn size_multiset(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &k in &self.fiber_sizes {
            *m.entry(k).or_insert(0) += 1;
        }
        m
    }
}

impl EquivariantMap {
    /// Validate a map given on element indices.
    pub fn new(source: &FiniteAction, target: &FiniteAction, image: Vec<usize>) -> Result<Self, GroupoidError> {
        let g = source.groupoid();
        if g != target.groupoid() {
            return Err(GroupoidError::GroupoidMismatch);
        }
        assert_eq!(image.len(), source.len(), "one image per source element");
        for (x, &y) in image.iter().enumerate() {
            if y >= target.len() || target.object_of(y) != source.object_of(x) {
                return Err(GroupoidError::WrongFiber {
                    element: source.element_name(x).to_string(),
                    object: g.object_name(source.object_of(x)).to_string(),
                });
            }
        }
        for x in 0..source.len() {
            for &m in g.out_morphisms(source.object_of(x)) {
                if image[source.act(m, x)] != target.act(m, image[x]) {
                    return Err(GroupoidError::NotEquivariant {
                        morphism: g.morphism(m).name.clone(),
                        element: source.element_name(x).to_string(),
                    });
                }
            }
        }
        Ok(EquivariantMap {
            source: source.clone(),
            target: target.clone(),
            image,
        })
    }

    /// Validate a map given as `{source id: target id}`.
    pub fn from_assignment(
        source: &FiniteAction,
        target: &FiniteAction,
        assignment: &BTreeMap<String, String>,
    ) -> Result<Self, GroupoidError> {
        for k in assignment.keys() {
            source.element_index(k)?;
        }
        let image = source
            .elements()
            .iter()
            .map(|x| {
                let y = assignment
                    .get(x)
                    .ok_or_else(|| GroupoidError::MissingAssignment(x.clone()))?;
                target.element_index(y)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, image)
    }

    pub fn identity(x: &FiniteAction) -> Self {
        EquivariantMap {
            source: x.clone(),
            target: x.clone(),
            image: (0..x.len()).collect(),
        }
    }

    /// The unique map to the terminal object.
    pub fn to_terminal(x: &FiniteAction) -> Self {
        let one = FiniteAction::terminal(x.groupoid());
        let image = (0..x.len()).map(|i| one.fiber(x.object_of(i))[0]).collect();
        EquivariantMap {
            source: x.clone(),
            target: one,
            image,
        }
    }

    /// Codiagonal `X ⊔ X → X`.
    pub fn fold(x: &FiniteAction) -> Result<Self, GroupoidError> {
        let both = x.coproduct(x)?;
        let image = (0..both.len())
            .map(|i| x.element_index(&both.element_name(i)[2..]))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&both, x, image)
    }

    /// `[f, g]: X ⊔ Y → Z`.
    pub fn copair(f: &EquivariantMap, g: &EquivariantMap) -> Result<Self, GroupoidError> {
        if f.target != g.target {
            return Err(GroupoidError::CodomainMismatch);
        }
        let both = f.source.coproduct(&g.source)?;
        let image = (0..both.len())
            .map(|i| {
                let name = both.element_name(i);
                let (side, rest) = name.split_at(2);
                Ok(if side == "l." {
                    f.image[f.source.element_index(rest)?]
                } else {
                    g.image[g.source.element_index(rest)?]
                })
            })
            .collect::<Result<Vec<_>, GroupoidError>>()?;
        Self::new(&both, &f.target, image)
    }

    /// Inclusion of an invariant subobject, seen as an action, into its parent.
    pub fn inclusion(x: &FiniteAction, s: &Subobject) -> Result<Self, GroupoidError> {
        let sub = x.restrict(s)?;
        let image = (0..sub.len())
            .map(|i| x.element_index(sub.element_name(i)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&sub, x, image)
    }

    /// First projection `X × Y → X`.
    pub fn first_projection(x: &FiniteAction, y: &FiniteAction) -> Result<Self, GroupoidError> {
        Ok(pullback(&Self::to_terminal(x), &Self::to_terminal(y))?.first)
    }

    pub fn source(&self) -> &FiniteAction {
        &self.source
    }

    pub fn target(&self) -> &FiniteAction {
        &self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &EquivariantMap) -> Result<Self, GroupoidError> {
        if first.target != self.source {
            return Err(GroupoidError::CodomainMismatch);
        }
        Ok(EquivariantMap {
            source: first.source.clone(),
            target: self.target.clone(),
            image: first.image.iter().map(|&y| self.image[y]).collect(),
        })
    }

    pub fn preimage(&self, y: usize) -> Vec<usize> {
        (0..self.source.len()).filter(|&x| self.image[x] == y).collect()
    }

    pub fn fiber_profile(&self) -> FiberProfile {
        let mut sizes = vec![0; self.target.len()];
        for &y in &self.image {
            sizes[y] += 1;
        }
        let n_to_1 = match sizes.first() {
            Some(&n) if sizes.iter().all(|&k| k == n) => Some(n),
            _ => None,
        };
        FiberProfile {
            is_finite: true,
            n_to_1,
            fiber_sizes: sizes,
        }
    }

    /// Set-theoretic image; always invariant.
    pub fn image(&self) -> Subobject {
        Subobject::new(self.image.iter().copied())
    }

    pub fn is_epi(&self) -> bool {
        self.image().len() == self.target.len()
    }

    pub fn is_mono(&self) -> bool {
        self.image().len() == self.source.len()
    }
}

/// A fiber product with its two projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: FiniteAction,
    pub first: EquivariantMap,
    pub second: EquivariantMap,
}

/// `X ×_Z Y` for `f: X → Z`, `g: Y → Z`; ids are `(x,y)`.
pub fn pullback(f: &EquivariantMap, g: &EquivariantMap) -> Result<Pullback, GroupoidError> {
    let grp = f.source().groupoid();
    if grp != g.source().groupoid() {
        return Err(GroupoidError::GroupoidMismatch);
    }
    if f.target() != g.target() {
        return Err(GroupoidError::CodomainMismatch);
    }
    let (x, y) = (f.source(), g.source());
    let pairs: Vec<Vec<(usize, usize)>> = (0..grp.num_objects())
        .map(|s| {
            let mut v = Vec::new();
            for &a in x.fiber(s) {
                for &b in y.fiber(s) {
                    if f.apply(a) == g.apply(b) {
                        v.push((a, b));
                    }
                }
            }
            v
        })
        .collect();
    let names = pairs
        .iter()
        .map(|v| {
            v.iter()
                .map(|&(a, b)| format!("({},{})", x.element_name(a), y.element_name(b)))
                .collect()
        })
        .collect();
    let object = FiniteAction::from_fibers(grp, names, |m, i| {
        let mor = grp.morphism(m);
        let (a, b) = pairs[mor.src][i];
        let target = (x.act(m, a), y.act(m, b));
        pairs[mor.dst].iter().position(|&p| p == target).expect("fiber product is closed")
    })?;
    let mut first = vec![0; object.len()];
    let mut second = vec![0; object.len()];
    for v in &pairs {
        for &(a, b) in v {
            let e = object.element_index(&format!("({},{})", x.element_name(a), y.element_name(b)))?;
            first[e] = a;
            second[e] = b;
        }
    }
    Ok(Pullback {
        first: EquivariantMap::new(&object, x, first)?,
        second: EquivariantMap::new(&object, y, second)?,
        object,
    })
}

/// All equivariant maps `X → Y`, up to `limit` of them, in a deterministic order.
///
/// A map is determined by the images of orbit representatives; a representative
/// `x` over `s` can go to any `y` over `s` fixed by the stabilizer of `x`.
pub fn equivariant_maps(x: &FiniteAction, y: &FiniteAction, limit: usize) -> Result<Vec<EquivariantMap>, GroupoidError> {
    let g = x.groupoid();
    if g != y.groupoid() {
        return Err(GroupoidError::GroupoidMismatch);
    }
    let candidates: Vec<Vec<usize>> = (0..x.num_orbits())
        .map(|o| {
            let rep = x.orbit_representative(o);
            let s = x.object_of(rep);
            let stab: Vec<usize> = g.endomorphisms(s).filter(|&m| x.act(m, rep) == rep).collect();
            y.fiber(s)
                .iter()
                .copied()
                .filter(|&t| stab.iter().all(|&m| y.act(m, t) == t))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    let mut choice = vec![0usize; candidates.len()];
    loop {
        if out.len() >= limit {
            break;
        }
        let image = (0..x.len())
            .map(|e| {
                let o = x.orbit_of(e);
                y.act(x.orbit_path(e), candidates[o][choice[o]])
            })
            .collect();
        out.push(EquivariantMap::new(x, y, image)?);
        // odometer increment
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{named_group, z2_swap_action};
    use std::collections::BTreeMap;

    fn trivial_set(names: &[&str]) -> FiniteAction {
        let g = named_group("trivial");
        FiniteAction::from_spec(
            &g,
            &crate::groupoid::ActionSpec {
                fibers: BTreeMap::from([("o".into(), names.iter().map(|s| s.to_string()).collect())]),
                maps: BTreeMap::new(),
            },
        )
        .unwrap()
    }

    #[test]
    fn identity_is_one_to_one() {
        let x = z2_swap_action();
        assert_eq!(EquivariantMap::identity(&x).fiber_profile().n_to_1, Some(1));
    }

    #[test]
    fn regular_to_point_is_two_to_one() {
        let g = named_group("Z2");
        let r = FiniteAction::representable(&g, 0);
        let f = EquivariantMap::to_terminal(&r);
        assert_eq!(f.fiber_profile().n_to_1, Some(2));
        assert!(f.is_epi());
        assert!(!f.is_mono());
    }

    #[test]
    fn collapse_profile_image_and_epi() {
        let y = trivial_set(&["a", "b", "c"]);
        let x = trivial_set(&["a'", "c'"]);
        let assign = BTreeMap::from([
            ("a".to_string(), "a'".to_string()),
            ("b".to_string(), "a'".to_string()),
            ("c".to_string(), "c'".to_string()),
        ]);
        let f = EquivariantMap::from_assignment(&y, &x, &assign).unwrap();
        let p = f.fiber_profile();
        assert_eq!(p.n_to_1, None);
        assert_eq!(p.size_multiset(), BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(f.image(), x.full());
        assert!(f.is_epi());
    }

    #[test]
    fn non_equivariant_assignment_is_rejected() {
        let x = z2_swap_action();
        let one = FiniteAction::terminal(x.groupoid());
        let two = one.coproduct(&one).unwrap();
        // a ↦ l, b ↦ r is not equivariant for the swap a ↔ b
        let assign = BTreeMap::from([
            ("a".to_string(), "l.pt:o".to_string()),
            ("b".to_string(), "r.pt:o".to_string()),
            ("c".to_string(), "l.pt:o".to_string()),
        ]);
        assert!(matches!(
            EquivariantMap::from_assignment(&x, &two, &assign),
            Err(GroupoidError::NotEquivariant { .. })
        ));
    }

    #[test]
    fn pullback_of_regular_over_point_has_four_elements() {
        let g = named_group("Z2");
        let r = FiniteAction::representable(&g, 0);
        let f = EquivariantMap::to_terminal(&r);
        let p = pullback(&f, &f).unwrap();
        assert_eq!(p.object.len(), 4);
        assert_eq!(p.object.num_orbits(), 2);
        assert_eq!(p.first.fiber_profile().n_to_1, Some(2));
    }

    #[test]
    fn hom_enumeration_counts() {
        let g = named_group("Z2");
        let r = FiniteAction::representable(&g, 0);
        // End(G) for the regular representation is G itself
        assert_eq!(equivariant_maps(&r, &r, 100).unwrap().len(), 2);
        let x = z2_swap_action();
        let one = FiniteAction::terminal(&g);
        // a point can only go to the fixed point c
        assert_eq!(equivariant_maps(&one, &x, 100).unwrap().len(), 1);
        // X → X: orbit {a,b} picks any of a, b, c; orbit {c} picks c
        assert_eq!(equivariant_maps(&x, &x, 100).unwrap().len(), 3);
    }

    #[test]
    fn first_projection_and_fold() {
        let x = z2_swap_action();
        let one = FiniteAction::terminal(x.groupoid());
        let p = EquivariantMap::first_projection(&x, &one).unwrap();
        assert_eq!(p.fiber_profile().n_to_1, Some(1));
        let f = EquivariantMap::fold(&x).unwrap();
        assert_eq!(f.fiber_profile().n_to_1, Some(2));
    }
}
