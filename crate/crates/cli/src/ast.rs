//! Syntax tree of a `.site` file. Spans are carried for diagnostics but
//! ignored by equality.

use crate::diag::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl Name {
    pub fn new(text: &str) -> Name {
        Name { text: text.to_string(), span: Span::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SiteSpec {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Category(CategoryDecl),
    Coverage(CoverageDecl),
    Presheaf(PresheafDecl),
    Subobject(SubobjectDecl),
    Map(MapDecl),
    Family(FamilyDecl),
    Universe(UniverseDecl),
    Run(Command),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryDecl {
    /// Objects, arrows and the composites of non-identity arrows.
    /// Identities `id_<object>` are implicit.
    Explicit { span: Span, objects: Vec<Name>, arrows: Vec<ArrowDecl>, compose: Vec<ComposeDecl> },
    /// A poset by generating relations; composites are forced.
    Poset { span: Span, entries: Vec<PosetEntry> },
    /// A one-object category `*` with the given non-identity elements.
    Monoid { span: Span, elements: Vec<Name>, compose: Vec<ComposeDecl> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: Name,
    pub dom: Name,
    pub cod: Name,
}

/// `g . f = h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeDecl {
    pub g: Name,
    pub f: Name,
    pub h: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetEntry {
    Object(Name),
    Le { name: Option<Name>, lo: Name, hi: Name },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverageDecl {
    /// `trivial`, `dense` or `all`.
    Named(Name),
    /// Covering sieves listed per object.
    Sieves { span: Span, entries: Vec<(Name, Vec<SieveLit>)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveLit {
    pub span: Span,
    pub members: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafDecl {
    pub name: Name,
    pub body: PresheafBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresheafBody {
    Tables(Vec<PresheafEntry>),
    Terminal,
    Initial,
    Constant(usize),
    Yoneda(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresheafEntry {
    /// Carrier size at an object.
    Size(Name, usize),
    /// Action table of an arrow `φ: b → a`, indexed by `X(a)`.
    Action(Name, Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubobjectDecl {
    pub name: Name,
    /// Factors of the parent; more than one means their product.
    pub parent: Vec<Name>,
    pub stages: Vec<(Name, Vec<Element>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Index(usize),
    /// Coordinates in a product parent.
    Tuple(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub components: Vec<(Name, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyDecl {
    All(Span),
    List(Vec<Name>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniverseDecl {
    Auto(Span, usize),
    List { objects: Vec<Name>, maps: Option<Vec<Name>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub span: Span,
    pub kind: CommandKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    CheckCoverage,
    EnumerateCoverages,
    Sheafify(Name),
    IsSheaf(Name),
    Closure(Name, Name),
    VerifyAxioms,
    VerifySheafAxioms,
    Eval(Formula),
}

impl CommandKind {
    pub const NAMES: [&'static str; 8] = [
        "check-coverage",
        "enumerate-coverages",
        "sheafify",
        "is-sheaf",
        "closure",
        "verify-axioms",
        "verify-sheaf-axioms",
        "eval",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::CheckCoverage => "check-coverage",
            CommandKind::EnumerateCoverages => "enumerate-coverages",
            CommandKind::Sheafify(_) => "sheafify",
            CommandKind::IsSheaf(_) => "is-sheaf",
            CommandKind::Closure(..) => "closure",
            CommandKind::VerifyAxioms => "verify-axioms",
            CommandKind::VerifySheafAxioms => "verify-sheaf-axioms",
            CommandKind::Eval(_) => "eval",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub span: Span,
    pub kind: FormulaKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaKind {
    True,
    False,
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Forall(Name, Sort, Box<Formula>),
    Exists(Name, Sort, Box<Formula>),
    Eq(Term, Term),
    /// `(in S t₁ … tₙ)` for a declared subobject `S`.
    In(Name, Vec<Term>),
    /// `(mem x s)` with `s` of sort `(P X)` or `(PJ X)`.
    Mem(Term, Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(Name),
    App(Name, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sort {
    Named(Name),
    One,
    Omega,
    Power(Name),
    PowerJ(Name),
}
