use modtrace::axioms::validate;
use modtrace::bantay::{
    channel_eigen_trace, eigen_multiplicities, eigen_multiplicities_with_branch, fs_closed_form, fs_from_trace,
    realizability_report, realizability_report_with_branch, trace_table, twist_trace_deviations, SqrtBranch,
};
use modtrace::modular_data::{derive, verlinde_fusion};
use modtrace::numerics::{gcd, matrix_max_dev};
use modtrace::oracle::{self, build_pointed_model, CatalogEntry};
use modtrace::rmatrix::{monodromy_check, synthesize, BlockForm};
use modtrace::{Complex, ModularData, Tolerance};
use nalgebra::DMatrix;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn entries() -> Vec<CatalogEntry> {
    oracle::catalog()
}

fn pointed_params() -> impl Strategy<Value = (usize, i64)> {
    (1usize..=10)
        .prop_flat_map(|n| (Just(n), 1i64..(2 * n as i64 + 1)))
        .prop_filter("nondegenerate", |&(n, p)| gcd(p, n as i64) == 1)
}

fn check_derived_invariants(md: &ModularData) {
    let pol = Tolerance::default();
    let dd = derive(md, &pol).unwrap();
    let n = md.rank();
    let sigma2 = 1.0 / (md.s()[(0, 0)].re * md.s()[(0, 0)].re);
    assert!(dd.dims.iter().all(|&d| d >= 1.0 - TOL));
    assert!((dd.dims.iter().map(|d| d * d).sum::<f64>() - sigma2).abs() < TOL);
    for i in 0..n {
        let c = dd.conj[i];
        assert_eq!(dd.conj[c], i);
        assert!((dd.dims[c] - dd.dims[i]).abs() < TOL);
        assert!((dd.twists[c] - dd.twists[i]).norm() < TOL);
    }
    let f = &dd.fusion;
    let cj = &dd.conj;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                assert_eq!(f.get(a, b, c), f.get(b, a, c));
                assert_eq!(f.get(a, b, c), f.get(cj[a], cj[b], cj[c]));
                assert_eq!(f.get(a, b, c), f.get(a, cj[c], cj[b]));
            }
        }
    }
}

fn check_trace_invariants(md: &ModularData) {
    let pol = Tolerance::default();
    let dd = derive(md, &pol).unwrap();
    let tt = trace_table(md, &dd, &pol).unwrap();
    let n = md.rank();
    for k in 0..n {
        for i in 0..n {
            assert!((tt.get(k, i) - tt.get(dd.conj[k], dd.conj[i])).norm() < TOL);
        }
    }
    for (a, b) in fs_from_trace(&dd, &tt).iter().zip(fs_closed_form(md, &dd)) {
        assert!((a - b).norm() < TOL);
    }
    assert!(twist_trace_deviations(&dd, &tt).iter().all(|&d| d < TOL));

    let principal = eigen_multiplicities(md, &dd, &tt, &pol).unwrap();
    let opposite = eigen_multiplicities_with_branch(md, &dd, &tt, SqrtBranch::Opposite, &pol).unwrap();
    for k in 0..n {
        for i in 0..n {
            let mult = dd.fusion.get(i, i, k);
            assert_eq!(principal.m_plus[k][i] + principal.m_minus[k][i], mult);
            let t = channel_eigen_trace(&dd, &tt, k, i, SqrtBranch::Principal, &pol).unwrap();
            assert!(t.im.abs() < TOL && (t.re - t.re.round()).abs() < TOL);
            assert!(t.re.abs() <= f64::from(mult) + TOL);
            assert_eq!(principal.m_plus[k][i], opposite.m_minus[k][i]);
            assert_eq!(principal.m_minus[k][i], opposite.m_plus[k][i]);
        }
    }
    assert_eq!(
        realizability_report(md, &pol).passed(),
        realizability_report_with_branch(md, SqrtBranch::Opposite, &pol).passed()
    );
}

fn check_rmatrix_invariants(md: &ModularData) {
    let pol = Tolerance::default();
    let (dd, blocks) = synthesize(md, &pol).unwrap();
    let tt = trace_table(md, &dd, &pol).unwrap();
    let w = &dd.twists;
    for b in &blocks {
        let [i, j, k] = b.channel;
        let v = b.value();
        assert!(b.diagonal().iter().all(|z| (z.norm() - 1.0).abs() < TOL));
        match b.form {
            BlockForm::Scalar { .. } => {
                assert_ne!(i, j);
                assert!((v * v - w[k] / (w[i] * w[j])).norm() < TOL);
            }
            BlockForm::Signed {
                dim_plus, dim_minus, ..
            } => {
                assert_eq!(i, j);
                assert!((v * v - w[k] / (w[i] * w[i])).norm() < TOL);
                let signed = v * (f64::from(dim_plus) - f64::from(dim_minus));
                assert!((b.trace() - signed).norm() < TOL);
                assert!((b.trace() - tt.get(k, i)).norm() < TOL);
            }
        }
    }
    assert!(monodromy_check(&blocks, &dd, &pol).passed());
}

#[test]
fn catalog_derived_invariants() {
    for e in entries() {
        check_derived_invariants(&e.md);
    }
}

#[test]
fn catalog_trace_invariants() {
    for e in entries() {
        check_trace_invariants(&e.md);
    }
}

#[test]
fn catalog_rmatrix_invariants() {
    for e in entries() {
        check_rmatrix_invariants(&e.md);
    }
}

#[test]
fn validate_is_deterministic_and_tight() {
    let pol = Tolerance::default();
    for e in entries() {
        let a = validate(&e.md, &pol);
        let b = validate(&e.md, &pol);
        assert_eq!(a, b);
        assert!(a.passed(), "{}", e.name);
        assert!(a.max_deviation() < 1e-10, "{}: {:e}", e.name, a.max_deviation());
    }
}

fn relabel(md: &ModularData, perm: &[usize], pol: &Tolerance) -> ModularData {
    let n = md.rank();
    let s = DMatrix::from_fn(n, n, |a, b| md.s()[(perm[a], perm[b])]);
    let t = perm.iter().map(|&a| md.t()[a]).collect();
    let labels = perm.iter().map(|&a| md.labels()[a].clone()).collect();
    ModularData::new(Some(labels), s, t, pol).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perturbing_one_s_entry_fails(entry in 0usize..10, row in 0usize..4, col in 0usize..4, dir in 0usize..4) {
        let pol = Tolerance::default();
        let md = &entries()[entry].md;
        let n = md.rank();
        let (row, col) = (row % n, col % n);
        let delta = [Complex::new(1e-3, 0.0), Complex::new(-1e-3, 0.0), Complex::new(0.0, 1e-3), Complex::new(0.0, -1e-3)][dir];
        let mut s = md.s().clone();
        s[(row, col)] += delta;
        // an S_00 nudge must keep the dimension row well-formed for construction
        if let Ok(bad) = ModularData::new(None, s, md.t().to_vec(), &pol) {
            prop_assert!(!validate(&bad, &pol).passed());
        }
    }

    #[test]
    fn relabeling_permutes_traces(entry in 0usize..10, seed in any::<u64>()) {
        let pol = Tolerance::default();
        let md = &entries()[entry].md;
        let n = md.rank();
        let mut rest: Vec<usize> = (1..n).collect();
        let mut state = seed;
        for i in (1..rest.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rest.swap(i, (state >> 33) as usize % (i + 1));
        }
        let perm: Vec<usize> = std::iter::once(0).chain(rest).collect();
        let moved = relabel(md, &perm, &pol);
        prop_assert!(validate(&moved, &pol).passed());
        let dd = derive(md, &pol).unwrap();
        let tt = trace_table(md, &dd, &pol).unwrap();
        let dd2 = derive(&moved, &pol).unwrap();
        let tt2 = trace_table(&moved, &dd2, &pol).unwrap();
        for k in 0..n {
            for i in 0..n {
                prop_assert!((tt2.get(k, i) - tt.get(perm[k], perm[i])).norm() < TOL);
            }
        }
    }

    #[test]
    fn pointed_models_are_realizable((n, p) in pointed_params()) {
        let pol = Tolerance::default();
        let model = build_pointed_model(n, p, &pol).unwrap();
        let md = &model.modular_data;
        prop_assert!(validate(md, &pol).passed());
        prop_assert!(realizability_report(md, &pol).passed());
        check_derived_invariants(md);
        check_trace_invariants(md);
        check_rmatrix_invariants(md);
        prop_assert_eq!(verlinde_fusion(md, &pol).unwrap(), model.fusion.clone());
    }

    #[test]
    fn conjugate_data_is_realizable(entry in 0usize..10) {
        let pol = Tolerance::default();
        let md = &entries()[entry].md;
        let conj = md.conjugate();
        prop_assert!(realizability_report(&conj, &pol).passed());
        let dd = derive(md, &pol).unwrap();
        let dd2 = derive(&conj, &pol).unwrap();
        let tt = trace_table(md, &dd, &pol).unwrap();
        let tt2 = trace_table(&conj, &dd2, &pol).unwrap();
        for k in 0..md.rank() {
            for i in 0..md.rank() {
                prop_assert!((tt2.get(k, i) - tt.get(k, i).conj()).norm() < TOL);
            }
        }
        prop_assert!(matrix_max_dev(conj.s(), &md.s().map(|z| z.conj())) == 0.0);
    }
}
