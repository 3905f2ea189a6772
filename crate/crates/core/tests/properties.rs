use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pecr::equiv::{is_sublist, prgm_equiv, Form};
use pecr::eval::interval::Interval;
use pecr::eval::{range_oracle, AppMap, ArithMap, CellularAutomaton, Env, Evaluator, Value};
use pecr::{io_equiv, MachParams, Program, Statement, Theory, Token};

const NAMES: [&str; 6] = ["add", "mult", "lt", "eqi", "typei", "f"];

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "c", "d", "x", "y", "u1", "zz"]).prop_map(str::to_string)
}

fn out_var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["e", "g", "h", "w1"]).prop_map(str::to_string)
}

fn token() -> impl Strategy<Value = Token> {
    prop_oneof![
        4 => var().prop_map(Token::Var),
        1 => prop::sample::select(vec![-1i64, 0, 1]).prop_map(Token::Num),
    ]
}

fn statement() -> impl Strategy<Value = Statement> {
    (prop::sample::select(NAMES.to_vec()), prop::collection::vec(token(), 0..4), prop::collection::btree_set(out_var(), 0..3))
        .prop_map(|(n, inputs, outs)| Statement { name: n.to_string(), inputs, outputs: outs.into_iter().collect() })
}

fn program() -> impl Strategy<Value = Program> {
    prop::collection::vec(statement(), 0..6).prop_map(|stmts| Program { stmts })
}

/// `p` with `suffix` appended to every variable.
fn renamed(p: &Program, suffix: &str) -> Program {
    let r = |v: &String| format!("{v}{suffix}");
    Program {
        stmts: p
            .stmts
            .iter()
            .map(|s| Statement {
                name: s.name.clone(),
                inputs: s.inputs.iter().map(|t| if let Token::Var(v) = t { Token::Var(r(v)) } else { t.clone() }).collect(),
                outputs: s.outputs.iter().map(r).collect(),
            })
            .collect(),
    }
}

proptest! {
    #[test]
    fn statement_round_trip(s in statement()) {
        prop_assert_eq!(Statement::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn free_within_piv_within_inputs(p in program()) {
        let piv = p.piv();
        let inputs: Vec<Token> = p.stmts.iter().flat_map(|s| s.inputs.clone()).collect();
        for v in p.free() {
            prop_assert!(piv.contains(&Token::Var(v)));
        }
        for t in &piv {
            prop_assert!(inputs.contains(t));
        }
        let mut dedup = piv.clone();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), piv.len());
    }

    #[test]
    fn sublist_reflexive_and_transitive(a in program(), extra in program(), more in program()) {
        prop_assert!(is_sublist(&a, &a));
        let mut b = a.clone();
        b.stmts.extend(extra.stmts);
        let mut c = b.clone();
        c.stmts.extend(more.stmts);
        prop_assert!(is_sublist(&a, &b) && is_sublist(&b, &c) && is_sublist(&a, &c));
    }

    #[test]
    fn prgm_equiv_under_permutation(p in program(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = p.clone();
        q.stmts.shuffle(&mut rng);
        let mut r = q.clone();
        r.stmts.shuffle(&mut rng);
        let (fp, fq, fr) = (Form::from(&p), Form::from(&q), Form::from(&r));
        prop_assert!(prgm_equiv(&fp, &fp));
        prop_assert!(prgm_equiv(&fp, &fq) && prgm_equiv(&fq, &fp));
        prop_assert!(prgm_equiv(&fq, &fr) && prgm_equiv(&fp, &fr));
    }

    #[test]
    fn io_equiv_reflexive_and_composes(p in program()) {
        let id = io_equiv(&p, &p).unwrap();
        for (k, v, _) in id.iter() {
            prop_assert_eq!(v, &Token::var(k));
        }
        let b = renamed(&p, "q");
        let c = renamed(&b, "r");
        prop_assert!(io_equiv(&b, &p).is_ok());
        prop_assert!(io_equiv(&c, &b).is_ok());
        prop_assert!(io_equiv(&c, &p).is_ok());
    }

    #[test]
    fn concat_is_valid_and_contains_both(p in program(), q in program()) {
        let th = Theory::bundled_axioms("int").unwrap();
        if let Ok(r) = p.concat(&q, &th.consts) {
            prop_assert!(r.validate_structure(&th.consts).is_ok());
            prop_assert!(is_sublist(&p, &r) && is_sublist(&q, &r));
        }
    }
}

fn interval() -> impl Strategy<Value = Interval> {
    (-50i64..=50, 0i64..=30).prop_map(|(lo, w)| Interval { lo, hi: lo + w })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn subdistributivity(r in interval(), p in interval(), q in interval()) {
        let n = 1_000_000;
        let lhs = r.mul(&p.add(&q, n).unwrap(), n).unwrap();
        let rhs = r.mul(&p, n).unwrap().add(&r.mul(&q, n).unwrap(), n).unwrap();
        prop_assert!(lhs.is_subset(&rhs), "{:?} not in {:?}", lhs, rhs);
    }

    #[test]
    fn iterf_semigroup(rule in any::<u8>(), m in 1usize..=12, bits in any::<u16>(), n in 0i64..200, k in 0i64..200) {
        let th = Theory::bundled_axioms("vec").unwrap();
        let ca = CellularAutomaton::new(rule, m).unwrap();
        let v: Vec<i64> = (0..m).map(|i| i64::from(bits >> i & 1)).collect();
        let mut ev = Evaluator::new(&th, MachParams::default()).with_map(&ca);
        let whole = ev.iterf(&v, n + k).unwrap();
        let first = ev.iterf(&v, n).unwrap();
        prop_assert_eq!(ev.iterf(&first, k).unwrap(), whole);
    }

    #[test]
    fn abs_operands_are_exclusive(a in -1000i64..=1000) {
        let th = Theory::bundled_axioms("int").unwrap();
        let m = MachParams::default().with_nint(1000);
        let def = &th.disjunctions["abs"];
        let mut env = Env::new();
        env.insert("a", Value::Int(a));
        let computing = def.operands.iter().filter(|op| Evaluator::new(&th, m).eval(op, &env).is_ok()).count();
        prop_assert_eq!(computing, 1);
        let p = th.parse_program("abs [a] [b]").unwrap();
        let out = Evaluator::new(&th, m).eval(&p, &env).unwrap();
        prop_assert_eq!(out.get("b"), Some(&Value::Int(a.abs())));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn interval_bound_encloses_range(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = ArithMap::random(&mut rng, dim, 2);
        let side = [10_000i64, 100, 21][dim - 1];
        let lo: Vec<i64> = (0..dim).map(|i| (seed >> (8 * i) & 0x1f) as i64 - 16).collect();
        let hi: Vec<i64> = lo.iter().map(|l| l + side - 1).collect();
        let nint = 1_000_000_000_000_000_000;
        let (blo, bhi) = f.bound(&lo, &hi, nint).unwrap();
        let (rlo, rhi) = range_oracle(&f, &lo, &hi, nint, 10_000).unwrap();
        for k in 0..dim {
            prop_assert!(blo[k] <= rlo[k] && rhi[k] <= bhi[k], "coord {}: [{}, {}] not in [{}, {}]", k, rlo[k], rhi[k], blo[k], bhi[k]);
        }
    }
}
