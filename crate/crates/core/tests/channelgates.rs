use std::collections::BTreeSet;

use proptest::prelude::*;
use rhizome::channelgates::{
    builtin_layout, compose_half_adder, evaluate_layout, truth_table, BuiltinLayout, ChannelLayout, Endpoint, GateResult,
    OccupancyKind, RootFate,
};
use rhizome::Error;

fn rows(layout: &ChannelLayout, output: &str) -> [bool; 4] {
    truth_table(layout).unwrap().column(output).unwrap()
}

fn check_occupancy(r: &GateResult, injected: usize) -> Result<(), TestCaseError> {
    prop_assert_eq!(r.roots.len(), injected);
    let exited = r.roots.iter().filter(|x| matches!(x.fate, RootFate::Exited { .. })).count();
    let blocked = r.roots.iter().filter(|x| matches!(x.fate, RootFate::Blocked { .. })).count();
    prop_assert_eq!(exited + blocked, injected);
    prop_assert!(r.trace.windows(2).all(|w| w[0].time <= w[1].time));
    let mut taken = BTreeSet::new();
    for e in &r.trace {
        // An occupied channel is never entered or sealed again.
        prop_assert!(taken.insert(e.channel.clone()), "channel {} occupied twice", e.channel);
    }
    for (label, bit) in &r.outputs {
        let hit = r.roots.iter().any(|x| matches!(&x.fate, RootFate::Exited { output, .. } if output == label));
        prop_assert_eq!(*bit, hit);
    }
    Ok(())
}

#[test]
fn builtin_truth_tables() {
    let h = builtin_layout(BuiltinLayout::HumidityGate);
    assert_eq!(rows(&h, "p"), [false, true, false, false]);
    assert_eq!(rows(&h, "q"), [false, false, true, true]);
    let g = builtin_layout(BuiltinLayout::GravityGate);
    assert_eq!(rows(&g, "p"), [false, false, false, true]);
    assert_eq!(rows(&g, "q"), [false, true, true, true]);
    let ha = builtin_layout(BuiltinLayout::HalfAdder);
    assert_eq!(rows(&ha, "p"), [false, true, true, false]);
    assert_eq!(rows(&ha, "r"), [false, false, false, true]);
    assert_eq!(rows(&ha, "q"), [false, true, true, true]);
}

#[test]
fn truth_table_csv_shape() {
    let csv = truth_table(&builtin_layout(BuiltinLayout::HumidityGate)).unwrap().to_csv();
    assert_eq!(csv, "x,y,p,q\n0,0,0,0\n0,1,1,0\n1,0,0,1\n1,1,0,1\n");
}

#[test]
fn no_inputs_no_roots() {
    for b in BuiltinLayout::ALL {
        let l = builtin_layout(b);
        let ins: Vec<String> = l.inputs();
        let set: Vec<(&str, bool)> = ins.iter().map(|s| (s.as_str(), false)).collect();
        let r = evaluate_layout(&l, &set).unwrap();
        assert!(r.roots.is_empty() && r.trace.is_empty());
        assert!(r.outputs.iter().all(|(_, b)| !b));
    }
}

#[test]
fn composition_rejects_wider_gates() {
    let ha = builtin_layout(BuiltinLayout::HalfAdder);
    assert!(matches!(compose_half_adder(&ha), Err(Error::Layout(_))));
}

#[test]
fn bad_layout_text() {
    assert!(ChannelLayout::parse("junction j\nchannel a in:x j -1\n").is_err());
    assert!(ChannelLayout::parse("channel a in:x nowhere 1\n").is_err());
    assert!(ChannelLayout::parse("frobnicate\n").is_err());
}

#[test]
fn simultaneous_arrivals_are_reported() {
    let mut l = builtin_layout(BuiltinLayout::GravityGate);
    for c in &mut l.channels {
        c.length = 2.0;
    }
    assert!(matches!(evaluate_layout(&l, &[("x", true), ("y", true)]), Err(Error::JunctionTie { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupancy_is_monotone(
        which in 0usize..3,
        scale in prop::collection::vec(0.5f64..2.0, 16),
        x in any::<bool>(),
        y in any::<bool>(),
    ) {
        let mut l = builtin_layout(BuiltinLayout::ALL[which]);
        for (c, s) in l.channels.iter_mut().zip(scale.iter().cycle()) {
            c.length *= s;
        }
        let r = match evaluate_layout(&l, &[("x", x), ("y", y)]) {
            Ok(r) => r,
            Err(Error::JunctionTie { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let injected = l
            .channels
            .iter()
            .filter(|c| matches!(&c.from, Endpoint::Input(i) if (i == "x" && x) || (i == "y" && y)))
            .count();
        check_occupancy(&r, injected)?;
        // Same layout, same inputs, same answer.
        prop_assert_eq!(evaluate_layout(&l, &[("x", x), ("y", y)]).unwrap(), r);
        let back = ChannelLayout::parse(&l.to_text()).unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn roots_only_pass_sealed_free_channels(x in any::<bool>(), y in any::<bool>()) {
        let l = builtin_layout(BuiltinLayout::HalfAdder);
        let r = evaluate_layout(&l, &[("x", x), ("y", y)]).unwrap();
        let sealed: BTreeSet<&str> = r
            .trace
            .iter()
            .filter(|e| e.kind == OccupancyKind::Sealed)
            .map(|e| e.channel.as_str())
            .collect();
        for root in &r.roots {
            prop_assert!(root.path.iter().all(|c| !sealed.contains(c.as_str())));
        }
    }
}
