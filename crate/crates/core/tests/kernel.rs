mod common;

use pecr::kernel::{
    check_batch, check_proof, extract, inject_premise, prune, reduce_literal, reduce_theorem, stated_block, LineFault,
    ProofScript,
};
use pecr::theory::format::normalize_block;
use pecr::theory::Conclusion;
use pecr::{Statement, Theory, Token};

const THEORIES: [&str; 4] = ["int", "vec", "meta", "sets"];

fn int_script(label: &str) -> (Theory, ProofScript) {
    let th = Theory::bundled("int").unwrap();
    let s = common::corpus(&th, "int").into_iter().find(|f| f.script.label == label).unwrap().script;
    (th, s)
}

#[test]
fn extracted_blocks_equal_stated_blocks() {
    for name in THEORIES {
        let mut th = Theory::bundled_axioms(name).unwrap();
        let files = common::corpus(&th, name);
        let scripts: Vec<ProofScript> = files.iter().map(|f| f.script.clone()).collect();
        for item in check_batch(&mut th, &scripts).unwrap() {
            let f = files.iter().find(|f| f.script.label == item.label).unwrap();
            let rec = extract(&f.script, &item.result.unwrap()).unwrap();
            assert_eq!(normalize_block(&rec.block()), normalize_block(stated_block(&f.text)), "{:?}", f.path);
        }
    }
}

#[test]
fn corpus_counts() {
    let counts: Vec<usize> = THEORIES.iter().map(|n| common::corpus(&Theory::bundled_axioms(n).unwrap(), n).len()).collect();
    assert_eq!(counts, vec![66, 16, 19, 9]);
}

#[test]
fn altered_line_is_rejected() {
    let (th, s) = int_script("thm2");
    assert!(check_proof(&th, &s).is_ok());
    let mut bad = s.clone();
    bad.lines[15].stmt = Some(Statement::parse("add [c d] [l]").unwrap());
    let e = check_proof(&th, &bad).unwrap_err();
    assert_eq!(e.line, 16);
    assert!(matches!(e.fault, LineFault::NoDerivation(ref l) if l == "axi2a"));
    let mut bad = s.clone();
    bad.lines[15].just = Some(pecr::kernel::Justification::Cite { label: "axi2a".into(), refs: vec![1] });
    assert_eq!(check_proof(&th, &bad).unwrap_err().line, 16);
}

#[test]
fn injected_premise_is_the_only_redundancy() {
    for name in THEORIES {
        let mut th = Theory::bundled_axioms(name).unwrap();
        let files = common::corpus(&th, name);
        let scripts: Vec<ProofScript> = files.iter().map(|f| f.script.clone()).collect();
        let order = pecr::kernel::citation_order(&scripts).unwrap();
        let atom = th.atoms.values().find(|a| a.outputs.is_empty()).unwrap().clone();
        let extra = Statement {
            name: atom.name.clone(),
            inputs: (0..atom.inputs.len()).map(|i| Token::var(&format!("q{i}z"))).collect(),
            outputs: vec![],
        };
        for k in order {
            let s = &scripts[k];
            let injected = inject_premise(s, extra.clone());
            let report = check_proof(&th, &injected).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(report.reduction.redundant, vec![s.premise.len() + 1], "{}", s.label);
            let (pruned, _) = prune(&injected, &report.reduction.redundant);
            let again = check_proof(&th, &pruned).unwrap();
            assert!(again.is_irredundant());
            let original = extract(s, &check_proof(&th, s).unwrap()).unwrap();
            assert_eq!(extract(&pruned, &again).unwrap(), original, "{}", s.label);
            check_batch(&mut th, std::slice::from_ref(s)).unwrap();
        }
    }
}

#[test]
fn thm17_reduces_to_axioms() {
    let th = Theory::bundled("int").unwrap();
    assert_eq!(th.rule("thm17").unwrap().tcl, vec!["disj", "lem2", "lem1"]);
    let reduced = reduce_theorem("thm17", &th.store).unwrap();
    assert!(!reduced.is_empty());
    for l in &reduced {
        assert!(pecr::theory::is_automated(l) || th.rule(l).unwrap().is_axiom(), "{l}");
    }
}

#[test]
fn every_theorem_reduces_without_dangling() {
    for name in THEORIES {
        let th = Theory::bundled(name).unwrap();
        for r in th.store.theorems() {
            let red = reduce_theorem(&r.label, &th.store).unwrap();
            assert!(red.iter().all(|l| pecr::theory::is_automated(l) || th.rule(l).is_some_and(|x| x.is_axiom())));
        }
    }
}

#[test]
fn reductions_are_monotone_under_unrelated_additions() {
    let th = Theory::bundled("int").unwrap();
    let before: Vec<Vec<String>> = th.store.theorems().map(|r| reduce_theorem(&r.label, &th.store).unwrap()).collect();
    let mut store = th.store.clone();
    let mut extra = th.rule("thm1").unwrap().clone();
    extra.label = "thmx".into();
    extra.tcl = vec!["axi1a".into(), "thm5".into()];
    store.insert(extra).unwrap();
    let after: Vec<Vec<String>> = th.store.theorems().map(|r| reduce_theorem(&r.label, &store).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn literal_reduction_flags_thm1() {
    let (th, s) = int_script("thm1");
    let report = check_proof(&th, &s).unwrap();
    assert!(report.is_irredundant());
    let lit = reduce_literal(s.premise.len(), &report.connection_lists());
    assert!(!lit.redundant.is_empty());
}

#[test]
fn extraction_is_idempotent() {
    for name in THEORIES {
        let th = Theory::bundled(name).unwrap();
        let mut checked = 0;
        for r in th.store.theorems() {
            let n = r.premise.len();
            let refs: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let mut text = format!("{}\nProof.\n", r.block());
            for (i, s) in r.premise.stmts.iter().enumerate() {
                text.push_str(&format!("{} {s}\n", i + 1));
            }
            let last = match &r.conclusion {
                Conclusion::False => ":false".to_string(),
                Conclusion::Program(p) => p.stmts[0].to_string(),
            };
            text.push_str(&format!("{} {last} {} [{}]\n", n + 1, r.label, refs.join(" ")));
            let script = ProofScript::parse(&text, &th).unwrap();
            let report = check_proof(&th, &script).unwrap_or_else(|e| panic!("{e}"));
            let mut again = extract(&script, &report).unwrap();
            again.tcl = r.tcl.clone();
            assert_eq!(&again, r);
            checked += 1;
        }
        assert!(checked > 0);
    }
}
