//! Parser and printer properties: round-trips over generated trees and the
//! fixture corpus, and graceful diagnostics on arbitrary input.

mod common;

use ltsheaf_cli::ast::*;
use ltsheaf_cli::diag::Span;
use ltsheaf_cli::{parse, parse_command, print_spec};
use proptest::collection::vec;
use proptest::prelude::*;

fn ident() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["a", "b", "x", "y1", "f_2", "g'", "k-v", "X", "Kx", "_t"]).prop_map(Name::new)
}

fn obj() -> impl Strategy<Value = Name> {
    prop_oneof![ident(), (0usize..20).prop_map(|n| Name::new(&n.to_string())), Just(Name::new("*"))]
}

fn compose() -> impl Strategy<Value = ComposeDecl> {
    (obj(), obj(), obj()).prop_map(|(g, f, h)| ComposeDecl { g, f, h })
}

fn category() -> impl Strategy<Value = CategoryDecl> {
    let span = Span::default();
    prop_oneof![
        (vec(obj(), 0..4), vec((obj(), obj(), obj()), 0..4), vec(compose(), 0..3)).prop_map(move |(objects, arrows, compose)| {
            let arrows = arrows.into_iter().map(|(name, dom, cod)| ArrowDecl { name, dom, cod }).collect();
            CategoryDecl::Explicit { span, objects, arrows, compose }
        }),
        vec(
            prop_oneof![
                obj().prop_map(PosetEntry::Object),
                (prop::option::of(obj()), obj(), obj()).prop_map(|(name, lo, hi)| PosetEntry::Le { name, lo, hi }),
            ],
            0..4
        )
        .prop_map(move |entries| CategoryDecl::Poset { span, entries }),
        (vec(obj(), 0..3), vec(compose(), 0..3)).prop_map(move |(elements, compose)| CategoryDecl::Monoid { span, elements, compose }),
    ]
}

fn coverage() -> impl Strategy<Value = CoverageDecl> {
    let sieve = vec(obj(), 0..3).prop_map(|members| SieveLit { span: Span::default(), members });
    prop_oneof![
        prop::sample::select(vec!["trivial", "dense", "all"]).prop_map(|n| CoverageDecl::Named(Name::new(n))),
        vec((obj(), vec(sieve, 1..3)), 0..3).prop_map(|entries| CoverageDecl::Sieves { span: Span::default(), entries }),
    ]
}

fn presheaf() -> impl Strategy<Value = PresheafDecl> {
    let entry = prop_oneof![
        (obj(), 0usize..5).prop_map(|(n, k)| PresheafEntry::Size(n, k)),
        (obj(), vec(0usize..5, 0..4)).prop_map(|(n, t)| PresheafEntry::Action(n, t)),
    ];
    let body = prop_oneof![
        vec(entry, 0..4).prop_map(PresheafBody::Tables),
        Just(PresheafBody::Terminal),
        Just(PresheafBody::Initial),
        (0usize..4).prop_map(PresheafBody::Constant),
        obj().prop_map(PresheafBody::Yoneda),
    ];
    (ident(), body).prop_map(|(name, body)| PresheafDecl { name, body })
}

fn subobject() -> impl Strategy<Value = SubobjectDecl> {
    let element = prop_oneof![(0usize..6).prop_map(Element::Index), vec(0usize..4, 1..4).prop_map(Element::Tuple)];
    (ident(), vec(ident(), 1..3), vec((obj(), vec(element, 0..3)), 0..3))
        .prop_map(|(name, parent, stages)| SubobjectDecl { name, parent, stages })
}

fn map_decl() -> impl Strategy<Value = MapDecl> {
    (ident(), ident(), ident(), vec((obj(), vec(0usize..4, 0..3)), 0..3))
        .prop_map(|(name, source, target, components)| MapDecl { name, source, target, components })
}

fn term() -> impl Strategy<Value = Term> {
    ident().prop_map(Term::Var).prop_recursive(3, 6, 1, |inner| (ident(), inner).prop_map(|(f, t)| Term::App(f, Box::new(t))))
}

fn sort() -> impl Strategy<Value = Sort> {
    prop_oneof![
        ident().prop_map(Sort::Named),
        Just(Sort::One),
        Just(Sort::Omega),
        ident().prop_map(Sort::Power),
        ident().prop_map(Sort::PowerJ),
    ]
}

fn f(kind: FormulaKind) -> Formula {
    Formula { span: Span::default(), kind }
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(f(FormulaKind::True)),
        Just(f(FormulaKind::False)),
        (term(), term()).prop_map(|(a, b)| f(FormulaKind::Eq(a, b))),
        (ident(), vec(term(), 0..3)).prop_map(|(s, ts)| f(FormulaKind::In(s, ts))),
        (term(), term()).prop_map(|(a, b)| f(FormulaKind::Mem(a, b))),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let var = prop_oneof![ident(), Just(Name::new("_"))];
        prop_oneof![
            vec(inner.clone(), 0..3).prop_map(|v| f(FormulaKind::And(v))),
            vec(inner.clone(), 0..3).prop_map(|v| f(FormulaKind::Or(v))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| f(FormulaKind::Implies(Box::new(a), Box::new(b)))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| f(FormulaKind::Iff(Box::new(a), Box::new(b)))),
            inner.clone().prop_map(|a| f(FormulaKind::Not(Box::new(a)))),
            (var.clone(), sort(), inner.clone()).prop_map(|(v, s, b)| f(FormulaKind::Forall(v, s, Box::new(b)))),
            (var, sort(), inner).prop_map(|(v, s, b)| f(FormulaKind::Exists(v, s, Box::new(b)))),
        ]
    })
}

fn command() -> impl Strategy<Value = Command> {
    let kind = prop_oneof![
        Just(CommandKind::CheckCoverage),
        Just(CommandKind::EnumerateCoverages),
        ident().prop_map(CommandKind::Sheafify),
        ident().prop_map(CommandKind::IsSheaf),
        (ident(), ident()).prop_map(|(x, s)| CommandKind::Closure(x, s)),
        Just(CommandKind::VerifyAxioms),
        Just(CommandKind::VerifySheafAxioms),
        formula().prop_map(CommandKind::Eval),
    ];
    kind.prop_map(|kind| Command { span: Span::default(), kind })
}

fn item() -> impl Strategy<Value = Item> {
    prop_oneof![
        category().prop_map(Item::Category),
        coverage().prop_map(Item::Coverage),
        presheaf().prop_map(Item::Presheaf),
        subobject().prop_map(Item::Subobject),
        map_decl().prop_map(Item::Map),
        prop_oneof![Just(FamilyDecl::All(Span::default())), vec(ident(), 0..3).prop_map(FamilyDecl::List)].prop_map(Item::Family),
        prop_oneof![
            (0usize..4).prop_map(|n| UniverseDecl::Auto(Span::default(), n)),
            (vec(ident(), 0..3), prop::option::of(vec(ident(), 0..3))).prop_map(|(objects, maps)| UniverseDecl::List { objects, maps }),
        ]
        .prop_map(Item::Universe),
        command().prop_map(Item::Run),
    ]
}

proptest! {
    #[test]
    fn printed_specs_reparse_to_the_same_tree(items in vec(item(), 0..8)) {
        let spec = SiteSpec { items };
        let text = print_spec(&spec);
        let back = parse(&text).map_err(|d| TestCaseError::fail(format!("{d}\n{text}")))?;
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn printed_commands_reparse(c in command()) {
        let text = ltsheaf_cli::printer::print_command(&c);
        prop_assert_eq!(parse_command(&text).unwrap(), c);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[a-z0-9{}()\\[\\],:.*=<>#\\- \n]{0,80}") {
        if let Err(d) = parse(&text) {
            prop_assert!(d.span.line >= 1 && d.span.line <= text.lines().count() + 1);
            prop_assert!(d.span.column >= 1);
        }
    }

    #[test]
    fn truncated_fixtures_give_positioned_diagnostics(cut in 0usize..2000) {
        for (_, text) in common::fixtures() {
            let mut end = cut.min(text.len());
            while !text.is_char_boundary(end) {
                end -= 1;
            }
            let prefix = &text[..end];
            if let Err(d) = ltsheaf_cli::load(prefix) {
                prop_assert!(d.span.line >= 1 && d.span.line <= prefix.lines().count() + 1, "{}", d);
            }
        }
    }
}

#[test]
fn fixtures_round_trip() {
    for (stem, text) in common::fixtures() {
        let spec = parse(&text).unwrap();
        let printed = print_spec(&spec);
        assert_eq!(parse(&printed).unwrap(), spec, "{stem}");
        assert_eq!(print_spec(&parse(&printed).unwrap()), printed, "{stem}: printing is not idempotent");
    }
}

#[test]
fn syntax_errors_list_expected_tokens() {
    for (text, want) in [
        ("category { objects a, }", "name"),
        ("poset { 0 <= }", "name"),
        ("presheaf X { a: [0, }", "number"),
        ("run eval (frob x)", "and"),
        ("widget", "category"),
    ] {
        let d = parse(text).unwrap_err();
        assert!(d.expected.iter().any(|e| e.contains(want)), "{text}: {d}");
        assert_eq!(d.span.line, 1);
    }
}

#[test]
fn comments_and_layout_are_ignored() {
    let a = parse("# header\nposet { u: 0 <= 1 } # trailing\n\ncoverage dense\n").unwrap();
    let b = parse("poset{u:0<=1}coverage dense").unwrap();
    assert_eq!(a, b);
}
