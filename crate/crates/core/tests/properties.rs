use l42mu::ast::TypePath;
use l42mu::compose::sum_literals;
use l42mu::harness::gen::{gen_options, gen_sum_literal};
use l42mu::harness::{case_rng, check_algebra, gen_coherent_program, gen_table, GenConfig};
use l42mu::parser::{parse_literal, parse_source};
use l42mu::pipeline::compile_str;
use l42mu::print::{print_literal, print_table};
use l42mu::typecheck::subtype;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_tables_reparse_to_the_same_print(seed in any::<u64>()) {
        let t = gen_table(&GenConfig { seed, ..GenConfig::default() }, &mut case_rng(seed, 0));
        let printed = print_table(&t);
        let again = parse_source(&printed, 0).unwrap();
        prop_assert_eq!(print_table(&again), printed);
    }

    #[test]
    fn printed_literals_reparse(seed in any::<u64>()) {
        let l = gen_sum_literal(&mut case_rng(seed, 1), 2);
        let printed = print_literal(&l);
        prop_assert_eq!(print_literal(&parse_literal(&printed).unwrap()), printed);
    }

    #[test]
    fn sum_is_commutative_and_has_an_identity(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 2);
        let (a, b, c) = (gen_sum_literal(&mut rng, 2), gen_sum_literal(&mut rng, 2), gen_sum_literal(&mut rng, 2));
        let v = check_algebra(&a, &b, &c);
        prop_assert!(v.violation.is_none(), "{:?}", v.violation);
        let ab = sum_literals(&a, &b).map(|l| print_literal(&l)).map_err(|d| d.code);
        let ba = sum_literals(&b, &a).map(|l| print_literal(&l)).map_err(|d| d.code);
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn subtyping_is_a_preorder(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 3);
        let prog = gen_coherent_program(&mut rng, 5);
        let p = compile_str(&prog.source, gen_options()).unwrap();
        let scope = p.classes.scope();
        let names: Vec<TypePath> = p.flat.decls.iter().filter(|d| d.is_class()).map(|d| TypePath::new([d.name.as_str()])).collect();
        for a in &names {
            prop_assert!(subtype(&scope, a, a));
            for b in &names {
                for c in &names {
                    if subtype(&scope, a, b) && subtype(&scope, b, c) {
                        prop_assert!(subtype(&scope, a, c), "{} {} {}", a, b, c);
                    }
                }
            }
        }
    }

    #[test]
    fn parsing_never_panics(s in "[a-zA-Z0-9_ {}()\\[\\];,.=+*/<>-]{0,120}") {
        let _ = parse_source(&s, 0);
        let _ = parse_literal(&s);
    }

    #[test]
    fn checking_never_panics(s in "(C|t|This|Use|method|static|interface|implements|return|this|int|x|m|[{}();,.=+]| ){0,60}") {
        let _ = compile_str(&s, Default::default());
    }
}
