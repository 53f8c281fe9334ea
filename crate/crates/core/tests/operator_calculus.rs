use cliffordian::clifford::rat;
use cliffordian::operators::{
    annihilation_check, difference_word, exact_periods, multisets, sharpness_witnesses,
    CliffordianPolynomial,
};
use cliffordian::{Paravector, PeriodLattice};
use num_rational::BigRational;

fn skew_periods() -> Vec<Paravector<BigRational>> {
    let rows = [[2, 0, 0, 0], [1, 2, 0, 0], [0, -1, 3, 1], [2, 0, 1, -1]];
    rows.iter()
        .map(|r| Paravector::from_coords(1, &r.iter().map(|&v| rat(v, 3)).collect::<Vec<_>>()).unwrap())
        .collect()
}

#[test]
fn annihilation_through_degree_four_m1() {
    for periods in [exact_periods(&PeriodLattice::m1_unit()), skew_periods()] {
        for n in 0..=4 {
            let r = annihilation_check(n, &periods).unwrap();
            assert!(r.holds(), "degree {n}: {:?}", r.failures);
            assert_eq!(r.words_checked, multisets(4, n + 1).len());
        }
    }
}

#[test]
fn sharpness_through_degree_three_m1() {
    let periods = skew_periods();
    for n in 1..=3 {
        let w = sharpness_witnesses(n, &periods).unwrap().expect("witness for every multiset");
        assert_eq!(w.len(), multisets(4, n).len());
    }
}

#[test]
fn quasi_polynomial_degree_is_killed_by_jacobi_products() {
    // p_2m has degree 2m; 2m+1 difference factors remove it, 2m do not
    let periods = skew_periods();
    let lambda = Paravector::from_coords(1, &[rat(1, 1), rat(1, 2), rat(-1, 1), rat(2, 1)]).unwrap();
    let p = CliffordianPolynomial::new(1, vec![(rat(1, 1), lambda.clone(), 2), (rat(3, 1), lambda, 0)]).expand();
    assert!(p.apply_word(&difference_word(&[2, 3, 4]), &periods).unwrap().is_zero());
    assert!(!p.apply_word(&difference_word(&[3, 4]), &periods).unwrap().is_zero());
}
