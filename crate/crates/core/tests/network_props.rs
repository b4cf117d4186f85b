mod common;

use common::*;
use proptest::prelude::*;
use railnet::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>(), named in any::<bool>()) {
        let mut net = random_network(seed, GenOptions { integer_weights: false, ..GenOptions::default() });
        if named {
            for (i, s) in net.stations.iter_mut().enumerate() {
                s.name = Some(format!("Station {i}"));
                s.coord = Some([19.0 + i as f64 * 0.1, 47.5 - i as f64 * 0.05]);
                s.keep_in_contraction = i % 3 == 0;
            }
        }
        let text = render_network(&net);
        prop_assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn contraction_keeps_costs_and_is_idempotent(seed in any::<u64>()) {
        let net = random_contractible_network(seed);
        let small = contract_joint_nodes(&net);
        prop_assert_eq!(&contract_joint_nodes(&small), &small);
        prop_assert!(small.contractible_joints().is_empty());
        prop_assert!(small.check().is_ok());
        for kind in WeightKind::ALL {
            let before = all_pairs(&expand(&net, kind).view());
            let after = all_pairs(&expand(&small, kind).view());
            for (i, j, p) in after.pairs() {
                let x = before.cost(&after.origins[i], &after.origins[j]).unwrap().unwrap_or(f64::INFINITY);
                prop_assert!(rel_close(x, after.costs[p], 1e-9), "{} vs {}", x, after.costs[p]);
            }
        }
    }

    #[test]
    fn contraction_never_touches_kept_or_branching_stations(seed in any::<u64>()) {
        let net = random_contractible_network(seed);
        let small = contract_joint_nodes(&net);
        for s in &net.stations {
            let degree = net.sections.iter().filter(|x| x.end_at(&s.id).is_some()).count();
            if s.keep_in_contraction || degree != 2 || s.kind != StationKind::Station {
                prop_assert!(small.station(&s.id).is_some(), "{} vanished", s.id);
            }
        }
        let total = |n: &RawNetwork| n.sections.iter().map(|s| s.length_km).sum::<f64>();
        prop_assert!(rel_close(total(&net), total(&small), 1e-9));
    }

    #[test]
    fn expansion_has_the_expected_size(seed in any::<u64>()) {
        let net = random_network(seed, GenOptions::default());
        let wyes = net.stations.iter().filter(|s| s.kind == StationKind::Wye).count();
        let g = expand(&net, WeightKind::Time);
        prop_assert_eq!(g.nodes().len(), 4 * net.stations.len());
        prop_assert_eq!(g.arcs().len(), 2 * net.sections.len() + 4 * (net.stations.len() - wyes) + 2 * wyes);
    }
}

#[test]
fn a_chain_of_joints_collapses_into_one_section() {
    let net = parse_network(
        r#"{"stations":[{"id":"A"},{"id":"j1"},{"id":"j2"},{"id":"B"}],
            "sections":[
              {"id":"x","a":{"station":"A","side":"R"},"b":{"station":"j1","side":"L"},"length_km":10,"speed_kmh":60},
              {"id":"y","a":{"station":"j1","side":"R"},"b":{"station":"j2","side":"L"},"length_km":20,"speed_kmh":120},
              {"id":"z","a":{"station":"j2","side":"R"},"b":{"station":"B","side":"L"},"length_km":30,"speed_kmh":90}]}"#,
    )
    .unwrap();
    let small = contract_joint_nodes(&net);
    assert_eq!(small.stations.len(), 2);
    assert_eq!(small.sections.len(), 1);
    let s = &small.sections[0];
    assert_eq!(s.length_km, 60.0);
    assert!((travel_time_minutes(s) - (10.0 + 10.0 + 20.0)).abs() < 1e-9);
    assert_eq!(s.end_a.station, "A");
    assert_eq!(s.end_b.station, "B");
}

#[test]
fn parse_errors_name_the_problem() {
    let dangling = r#"{"stations":[{"id":"A"}],"sections":[
        {"id":"s","a":{"station":"A","side":"R"},"b":{"station":"B","side":"L"},"length_km":1,"speed_kmh":60}]}"#;
    assert!(matches!(parse_network(dangling), Err(Error::DanglingEndpoint { .. })));

    let zero = r#"{"stations":[{"id":"A"},{"id":"B"}],"sections":[
        {"id":"s","a":{"station":"A","side":"R"},"b":{"station":"B","side":"L"},"length_km":0,"speed_kmh":60}]}"#;
    assert!(matches!(
        parse_network(zero),
        Err(Error::NonPositive { field: "length_km", .. })
    ));

    let extra = r#"{"stations":[{"id":"A","colour":"red"}],"sections":[]}"#;
    assert!(matches!(parse_network(extra), Err(Error::UnknownKey { .. })));
    assert!(parse_network_with(extra, ParseMode::Lenient).is_ok());

    let broken = "{\"stations\": [";
    assert!(matches!(parse_network(broken), Err(Error::Syntax { .. })));
}

#[test]
fn fixture_summary_line() {
    let report = validate(&fixtures::triangle());
    assert!(report
        .to_string()
        .starts_with("3 + 0 stations (plus 0 wyes) and 3 line sections"));
    assert_eq!(report.components, 1);
}
