use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate morphism `{0}`")]
    DuplicateMorphism(String),
    #[error("morphism `{morphism}` has endpoint `{endpoint}` which is not an object")]
    DanglingEndpoint { morphism: String, endpoint: String },
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("`{g} ∘ {h}` is listed but dst({h}) != src({g})")]
    NotComposable { g: String, h: String },
    #[error("`{g} ∘ {h} = {composite}` has the wrong endpoints")]
    BadComposite {
        g: String,
        h: String,
        composite: String,
    },
    #[error("`{g} ∘ {h}` is listed twice with different results")]
    ConflictingComposite { g: String, h: String },
    #[error("composition table has no entry for `{g} ∘ {h}`")]
    MissingComposite { g: String, h: String },
    #[error("object `{0}` has no identity morphism")]
    MissingIdentity(String),
    #[error("composition is not associative on ({f}, {g}, {h})")]
    NonAssociative { f: String, g: String, h: String },
    #[error("morphism `{0}` has no two-sided inverse")]
    MissingInverse(String),

    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{element}` is not in the fiber over `{object}`")]
    WrongFiber { element: String, object: String },
    #[error("no transport map given for morphism `{0}`")]
    MissingTransport(String),
    #[error("transport along `{0}` is not a bijection between fibers")]
    NotABijection(String),
    #[error("identity `{0}` does not act as the identity")]
    IdentityNotTrivial(String),
    #[error("transport is not functorial on `{g} ∘ {h}`")]
    NotFunctorial { g: String, h: String },
    #[error("actions live over different groupoids")]
    GroupoidMismatch,
    #[error("map does not commute with transport along `{morphism}` at `{element}`")]
    NotEquivariant { morphism: String, element: String },
    #[error("element `{0}` has no image")]
    MissingAssignment(String),
    #[error("subobject is not closed under transport")]
    NotInvariant,
    #[error("maps in a pullback must share their codomain")]
    CodomainMismatch,
}
