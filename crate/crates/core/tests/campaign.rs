use revineq_core::bounds::TheoremId;
use revineq_core::harness::{
    compare_certificates, derive_stream, run_campaign, run_integral_campaign, sample_instance,
    CampaignConfig, CampaignReport, IntegralConfig, SampleSpec,
};
use revineq_core::{Field, Tolerances};

fn small(samples: u64) -> CampaignConfig {
    CampaignConfig {
        samples,
        seed: 11,
        dim: (1, 6),
        n: (1, 5),
        ..CampaignConfig::default()
    }
}

#[test]
fn default_campaign_is_clean() {
    let report = run_campaign(&small(400)).unwrap();
    assert_eq!(report.results.len(), TheoremId::CAMPAIGN.len());
    for r in &report.results {
        assert_eq!(r.violations, 0, "{}", r.theorem_id);
        assert_eq!(r.hypothesis_failures, 0, "{}", r.theorem_id);
        assert_eq!(r.samples, 400);
        assert!(r.min_slack.unwrap() >= -1e-9);
    }
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let a = run_campaign(&small(100)).unwrap().to_json();
    let b = run_campaign(&small(100)).unwrap().to_json();
    assert_eq!(a, b);
    let parsed: CampaignReport = serde_json::from_str(&a).unwrap();
    assert_eq!(parsed.to_json(), a);
    let mut other = small(100);
    other.seed = 12;
    assert_ne!(run_campaign(&other).unwrap().to_json(), a);
}

#[test]
fn injected_fault_is_caught_for_every_theorem() {
    let mut config = small(200);
    config.fault_delta = Some(1e-3);
    let report = run_campaign(&config).unwrap();
    for r in &report.results {
        assert!(r.violations > 0, "{} missed the fault", r.theorem_id);
        assert!(!r.violation_details.is_empty());
    }
}

#[test]
fn empty_theorem_set_gives_empty_report() {
    let config = CampaignConfig {
        theorems: Vec::new(),
        ..small(10)
    };
    let report = run_campaign(&config).unwrap();
    assert!(report.results.is_empty());
    assert_eq!(report.total_violations(), 0);
}

#[test]
fn bad_parameters_are_rejected() {
    let config = CampaignConfig {
        rho: (1.5, 1.5),
        ..small(10)
    };
    assert!(run_campaign(&config).is_err());
    let config = CampaignConfig {
        theorems: vec![TheoremId::P61],
        ..small(10)
    };
    assert!(config.validate().is_err());
}

#[test]
fn specializations_agree_on_sampled_instances() {
    let tol = Tolerances::default();
    for (k, theorem) in [
        TheoremId::Dm,
        TheoremId::T21,
        TheoremId::T23,
        TheoremId::T31,
    ]
    .into_iter()
    .enumerate()
    {
        let instances: Vec<_> = (0..50u64)
            .map(|i| {
                let spec = SampleSpec {
                    theorem,
                    field: if i % 2 == 0 {
                        Field::Real
                    } else {
                        Field::Complex
                    },
                    dim: 1 + (i as usize % 5),
                    n: 1 + (i as usize % 4),
                    family_size: (1, 1),
                    rho: (0.05, 0.95),
                    bracket: None,
                    witness: i % 8 == 7,
                };
                let mut rng = derive_stream(k as u64, &[i.into()]);
                sample_instance(&spec, &mut rng).unwrap()
            })
            .collect();
        let cmp = compare_certificates(&instances, &tol).unwrap();
        assert_eq!(cmp.consistency.len(), instances.len());
        assert!(cmp.consistency.iter().all(|f| f.holds), "{theorem}");
    }
}

#[test]
fn integral_campaign_is_clean_and_consistent() {
    let config = IntegralConfig {
        samples: 60,
        seed: 5,
        ..IntegralConfig::default()
    };
    let report = run_integral_campaign(&config).unwrap();
    assert_eq!(report.total_violations(), 0);
    assert_eq!(report.checks.len(), 3);
    assert_eq!(report.failed_checks().count(), 0);
}
