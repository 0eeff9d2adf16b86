use super::{EquivariantMap, FiniteAction, FiniteGroupoid, GroupoidError, Morphism};

/// The action groupoid `𝒢 ⋉ X`, whose action category is the slice topos `𝒯/X`.
///
/// Objects are the elements of `X` (same order); morphisms are pairs `(g, x)`,
/// named `g@x`, going from `x` to `g·x`. Its components are the orbits of `X`.
pub fn slice_groupoid(x: &FiniteAction) -> FiniteGroupoid {
    let g = x.groupoid();
    let mut morphisms = Vec::new();
    // index of (g, x) in `morphisms`
    let mut index = vec![vec![usize::MAX; x.len()]; g.num_morphisms()];
    for (m, mor) in g.morphisms().iter().enumerate() {
        for &e in x.fiber(mor.src) {
            index[m][e] = morphisms.len();
            morphisms.push(Morphism {
                name: format!("{}@{}", mor.name, x.element_name(e)),
                src: e,
                dst: x.act(m, e),
            });
        }
    }
    let mut table = Vec::new();
    for (h, hm) in g.morphisms().iter().enumerate() {
        for &e in x.fiber(hm.src) {
            let he = x.act(h, e);
            for &k in g.out_morphisms(hm.dst) {
                let kh = g.compose(k, h).expect("composable");
                table.push((index[k][he], index[h][e], index[kh][e]));
            }
        }
    }
    FiniteGroupoid::from_parts(x.elements().to_vec(), morphisms, &table)
        .expect("action groupoid of a valid action is a groupoid")
}

/// An object `(V, q)` of `𝒯/X` as an action of [`slice_groupoid`]`(X)`:
/// the fiber over `x` is `q⁻¹(x)`, transported by the action on `V`.
pub fn slice_object(q: &EquivariantMap, over: &FiniteGroupoid) -> Result<FiniteAction, GroupoidError> {
    let (v, x) = (q.source(), q.target());
    if over.objects() != x.elements() {
        return Err(GroupoidError::GroupoidMismatch);
    }
    let fibers: Vec<Vec<usize>> = (0..x.len()).map(|e| q.preimage(e)).collect();
    let names = fibers
        .iter()
        .map(|f| f.iter().map(|&i| v.element_name(i).to_string()).collect())
        .collect();
    // slice morphisms are enumerated base morphism first, then source element
    let g = x.groupoid();
    let base: Vec<usize> = g
        .morphisms()
        .iter()
        .enumerate()
        .flat_map(|(m, mor)| std::iter::repeat_n(m, x.fiber(mor.src).len()))
        .collect();
    if base.len() != over.num_morphisms() {
        return Err(GroupoidError::GroupoidMismatch);
    }
    FiniteAction::from_fibers(over, names, |m, i| {
        let mor = over.morphism(m);
        let image = v.act(base[m], fibers[mor.src][i]);
        fibers[mor.dst].iter().position(|&k| k == image).expect("q is equivariant")
    })
}

/// Every finite groupoid's topos is generated by internally finite objects; the
/// witness is the family of representable actions, one per object.
pub fn is_generated_by_finite_objects(g: &FiniteGroupoid) -> (bool, Vec<FiniteAction>) {
    let witnesses = (0..g.num_objects())
        .map(|s| FiniteAction::representable(g, s))
        .collect();
    (true, witnesses)
}
