use fefferman_core::checks::all_pass;
use fefferman_core::cohomology::KostantComplex;
use fefferman_core::inclusions::{display_checks, trace_pairing_checks, CochainInducer, IdentityChecker, Tower};
use fefferman_core::lie::qc_tower;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn graded_splitting_of_the_imaginary_units() {
    for n in [1, 2] {
        let algs = qc_tower(n).unwrap();
        let tower = Tower::new(&algs).unwrap();
        let qc = &algs[0];
        let split = |l: &str| tower.qc_cr.degree_split(qc.index_of(l).unwrap());
        assert_eq!(split("p.i"), vec![-2, 0]);
        assert_eq!(split("p.j"), vec![-1]);
        assert_eq!(split("p.k"), vec![-1]);
    }
}

#[test]
fn codifferential_identities_on_seeded_cochains() {
    let algs = qc_tower(1).unwrap();
    let tower = Tower::new(&algs).unwrap();
    let cs: Vec<KostantComplex<'_>> = algs.iter().map(|g| KostantComplex::new(g).unwrap()).collect();
    let pi = algs[0].index_of("p.i").unwrap();
    for (k, phi) in [&tower.qc_cr, &tower.cr_co].into_iter().enumerate() {
        let ind = CochainInducer::new(phi, &cs[k], &cs[k + 1]).unwrap();
        let chk = IdentityChecker::new(&ind);
        let mut rng = ChaCha8Rng::seed_from_u64(17 + k as u64);
        for _ in 0..10 {
            let kappa = cs[k].random_cochain(2, None, 0.3, &mut rng);
            assert!(chk.first_identity(&kappa), "{}", phi.name());
            let kt = ind.induce(&kappa);
            assert_eq!(ind.restrict(&kt).as_ref(), Some(&kappa));
            assert!(ind.kills_parabolic(&kt));
            if k == 0 {
                let r = chk.second_identity(&kappa, pi);
                assert!(r.lhs_eq_mid && r.mid_eq_rhs);
            }
        }
    }
}

#[test]
fn second_identity_needs_its_hypotheses() {
    let algs = qc_tower(1).unwrap();
    let tower = Tower::new(&algs).unwrap();
    let pj = algs[0].index_of("p.j").unwrap();
    assert!(!all_pass(&tower.qc_cr.second_identity_hypotheses(pj)));
    let (src, tgt) = (KostantComplex::new(&algs[0]).unwrap(), KostantComplex::new(&algs[1]).unwrap());
    let ind = CochainInducer::new(&tower.qc_cr, &src, &tgt).unwrap();
    let chk = IdentityChecker::new(&ind);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let broken = (0..10)
        .filter(|_| {
            let r = chk.second_identity(&src.random_cochain(2, None, 0.3, &mut rng), pj);
            !(r.lhs_eq_mid && r.mid_eq_rhs)
        })
        .count();
    assert!(broken > 0);
    let cr_co_hyp = algs[1]
        .minus_indices()
        .into_iter()
        .filter(|&x| all_pass(&tower.cr_co.second_identity_hypotheses(x)))
        .count();
    assert_eq!(cr_co_hyp, 0);
}

#[test]
fn trace_pairings() {
    for n in [1, 2] {
        let algs = qc_tower(n).unwrap();
        let tower = Tower::new(&algs).unwrap();
        assert!(all_pass(&trace_pairing_checks(&tower)));
    }
}

/// The x-display as printed is not in su(Q); only the q-display is reproduced.
#[test]
fn displayed_image_matrices() {
    let algs = qc_tower(1).unwrap();
    let tower = Tower::new(&algs).unwrap();
    let checks = display_checks(&tower);
    let failing: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert_eq!(failing, vec!["display: image of x = u + jv"]);
}
