use std::path::Path;

use pecr::engine::{options, Derived, Step};
use pecr::kernel::{check_batch, Justification, ProofScript};
use pecr::Theory;

fn scripts(th: &Theory, name: &str) -> Vec<ProofScript> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    let mut files: Vec<_> = std::fs::read_dir(&root).unwrap().map(|e| e.unwrap().path()).collect();
    files.retain(|p| p.extension().is_some_and(|e| e == "prf"));
    files.sort();
    files.iter().map(|f| ProofScript::parse(&std::fs::read_to_string(f).unwrap(), th).unwrap()).collect()
}

fn hits(step: &Step, just: &Justification, cl: &[usize], target: &Derived) -> bool {
    let label_ok = match just {
        Justification::Cite { label, .. } => step.branches.is_none() && &step.label == label,
        Justification::Disj { left, right } => step.branches == Some((left.clone(), right.clone())),
    };
    let (mut a, mut b) = (step.refs.clone(), cl.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    label_ok && a == b && step.result.same_shape(target)
}

fn hit_rate(name: &str) -> (usize, usize, Vec<String>) {
    let mut th = Theory::bundled_axioms(name).unwrap();
    let all = scripts(&th, name);
    let order = pecr::kernel::citation_order(&all).unwrap();
    let (mut total, mut hit, mut misses) = (0, 0, Vec::new());
    for k in order {
        let s = &all[k];
        let report = check_batch(&mut th.clone(), std::slice::from_ref(s)).unwrap().remove(0).result.unwrap();
        for (i, line) in s.lines.iter().enumerate().skip(s.premise.len()) {
            let prior: Vec<_> = s.lines[..i].iter().map(|l| l.stmt.clone()).collect();
            let starred: Vec<usize> = (0..i).filter(|&j| s.lines[j].star).collect();
            let target = match &line.stmt {
                Some(st) => Derived::Stmt(st.clone()),
                None => Derived::False,
            };
            let opts = options(&th, &prior, &starred);
            total += 1;
            let just = line.just.as_ref().unwrap();
            if opts.iter().any(|o| hits(o, just, &report.lines[i].cl, &target)) {
                hit += 1;
            } else {
                misses.push(format!("{} line {}", s.label, line.number));
            }
        }
        check_batch(&mut th, std::slice::from_ref(s)).unwrap();
    }
    (hit, total, misses)
}

#[test]
fn every_corpus_line_is_an_option() {
    for name in ["int", "vec", "meta", "sets"] {
        let (hit, total, misses) = hit_rate(name);
        assert_eq!(hit, total, "{name}: {misses:?}");
    }
}

#[test]
fn options_order_is_stable() {
    let th = Theory::bundled("int").unwrap();
    let lines: Vec<_> = ["neq [a 0] [ ]", "mult [a a] [b]", "typei [a] [ ]"].iter().map(|s| Some(th.parse_statement(s).unwrap())).collect();
    let first = options(&th, &lines, &[0]);
    assert!(first.iter().any(|s| s.branches.is_some()));
    for _ in 0..8 {
        assert_eq!(options(&th, &lines, &[0]), first);
    }
}
