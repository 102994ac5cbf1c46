use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use condan::analysis::box_grid;
use condan_harness::{
    expand_suites, generate_instance, replay_case, run_suite, HarnessError, Instance, InstanceKind, SuiteConfig, SUITES,
};

fn config(suite: &str, cases: usize) -> SuiteConfig {
    SuiteConfig { suite: suite.into(), cases, atoms: 3, seed: 11, ..SuiteConfig::default() }
}

#[test]
fn suite_lists_expand() {
    assert_eq!(expand_suites("all").unwrap(), SUITES.to_vec());
    assert_eq!(expand_suites("gauge, ubp").unwrap(), vec!["gauge", "ubp"]);
    assert!(matches!(expand_suites("gauge,nosuch"), Err(HarnessError::UnknownSuite(s)) if s == "nosuch"));
    assert!(matches!(expand_suites(""), Err(HarnessError::UnknownSuite(_))));
}

#[test]
fn invalid_configs_are_rejected() {
    for bad in [
        SuiteConfig { atoms: 0, ..config("gauge", 1) },
        SuiteConfig { tol: 0.0, ..config("gauge", 1) },
        SuiteConfig { tol: f64::NAN, ..config("gauge", 1) },
        SuiteConfig { trunc: 0, ..config("gauge", 1) },
    ] {
        assert!(matches!(run_suite(&bad), Err(HarnessError::InvalidConfig(_))), "{bad:?}");
    }
    assert!(matches!(run_suite(&config("nosuch", 1)), Err(HarnessError::UnknownSuite(_))));
}

#[test]
fn zero_cases_pass_vacuously() {
    for s in SUITES {
        let r = run_suite(&config(s, 0)).unwrap();
        assert_eq!((r.cases, r.failed), (0, 0), "{s}");
        assert!(r.ok() && r.witnesses.is_empty());
    }
}

#[test]
fn reports_are_deterministic_and_seed_sensitive() {
    for s in ["numbers", "gauge", "eberlein_smulian"] {
        let a = run_suite(&config(s, 20)).unwrap().without_timing();
        let b = run_suite(&config(s, 20)).unwrap().without_timing();
        assert_eq!(a, b, "{s}");
        assert!(a.ok(), "{s}: {:?}", a.witnesses.first());
    }
    let a = run_suite(&config("gauge", 20)).unwrap();
    let c = run_suite(&SuiteConfig { seed: 12, ..config("gauge", 20) }).unwrap();
    assert_ne!(a.max_violation, c.max_violation);
}

#[test]
fn witnesses_replay_to_the_same_failure() {
    let cfg = SuiteConfig { tol: 1e-300, ..config("gauge", 20) };
    let r = run_suite(&cfg).unwrap();
    assert!(r.failed > 0 && r.passed + r.failed == r.cases);
    assert!(r.witnesses.len() <= condan_harness::report::MAX_WITNESSES);
    let w = &r.witnesses[0];
    let again = replay_case(&cfg, &w.section, w.case).unwrap();
    assert_eq!(again.cases, 1);
    let same = again.witnesses.iter().find(|v| v.check == w.check).expect("failure reproduced");
    assert_eq!((same.violation, &same.instance), (w.violation, &w.instance));
}

#[test]
fn generated_instances_satisfy_their_hypotheses() {
    let cfg = config("gauge", 1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        for kind in InstanceKind::ALL {
            match generate_instance(kind, &cfg, &mut rng).unwrap() {
                Instance::Body(b) => {
                    for (_, a) in b.iter() {
                        assert!(a.is_bounded());
                        assert_eq!(a.facets().len(), 4 * a.dim());
                    }
                }
                Instance::Sequence { region, sequence } => {
                    let condan::analysis::CondSequence::Table(terms) = sequence else { panic!("table expected") };
                    for x in &terms {
                        for (t, v) in x.iter() {
                            assert!(region.at(t).contains(v, 1e-12));
                        }
                    }
                }
                Instance::ClosedCover { space, sets } => {
                    for (t, bounds) in space.iter() {
                        for p in box_grid(bounds, 12) {
                            assert!(sets.iter().any(|s| s.on().contains(t) && s.at(t).contains(&p, 1e-12)), "{p:?} uncovered on atom {t}");
                        }
                    }
                }
                Instance::OperatorFamily { generators, .. } => assert!((1..=3).contains(&generators.len())),
                Instance::DensePoints(xs) => assert!(!xs.is_empty()),
                Instance::L2Element { norms, x, x_star } => {
                    assert_eq!(norms.len(), x.components.len());
                    assert_eq!(norms.len(), x_star.len());
                }
                Instance::RenormPair { k, unit_ball } => {
                    for (t, a) in k.iter() {
                        assert!(a.is_bounded() && a.same_grid(unit_ball.at(t)));
                    }
                }
            }
        }
    }
}
