use d4quad_core::pipeline::{verify_family_with, Verdict, VerifyOptions};
use d4quad_core::Family;

fn opts(bits: u32, p_max: u32) -> VerifyOptions {
    VerifyOptions {
        precision_bits: bits,
        p_min: None,
        p_max: Some(p_max),
    }
}

#[test]
fn same_input_same_report() {
    for fam in ["c1+", "c2-", "c3+"] {
        let family: Family = fam.parse().unwrap();
        let a = verify_family_with(6, family, &opts(256, 9)).unwrap().to_json();
        let b = verify_family_with(6, family, &opts(256, 9)).unwrap().to_json();
        assert_eq!(a, b, "{fam}");
    }
}

#[test]
fn doubling_precision_changes_nothing() {
    for (k, fam) in [(2, "c1-"), (3, "c2+"), (6, "c3-")] {
        let family: Family = fam.parse().unwrap();
        let lo = verify_family_with(k, family, &opts(256, 14)).unwrap();
        let hi = verify_family_with(k, family, &opts(512, 14)).unwrap();
        assert_eq!(lo.verdict, hi.verdict);
        assert_eq!(lo.records.len(), hi.records.len());
        for (x, y) in lo.records.iter().zip(&hi.records) {
            assert_eq!((x.p, &x.branch), (y.p, &y.branch));
            assert_eq!(x.bounds.matveev_l, y.bounds.matveev_l, "k={k} {fam} p={}", x.p);
            assert_eq!(x.bounds.reduced_l, y.bounds.reduced_l, "k={k} {fam} p={}", x.p);
            assert_eq!(x.residual, y.residual);
        }
    }
}

#[test]
fn every_family_confirms_on_a_window() {
    for k in [2, 3, 6] {
        for family in Family::ALL {
            let rep = verify_family_with(k, family, &opts(256, 16)).unwrap();
            assert_eq!(
                rep.verdict,
                Verdict::RegularConfirmed,
                "k={k} {family}: {:?}",
                rep.cause
            );
            assert!(rep.records.iter().all(|r| r.verdict == Verdict::RegularConfirmed));
        }
    }
}

#[test]
fn report_round_trips_through_json() {
    let rep = verify_family_with(3, "c1+".parse().unwrap(), &opts(256, 12)).unwrap();
    let back: d4quad_core::pipeline::VerificationReport = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(back.to_json(), rep.to_json());
}
