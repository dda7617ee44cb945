use std::sync::Arc;

use paratile_core::selfsim::{
    build_final, check_equivariance, factor_phi, validate_final, Axis, EffectiveAction, FinalPatch,
    Generator, LayerShifts, Odometer, TrivialGolden,
};
use paratile_core::Word;

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn golden() -> Arc<dyn EffectiveAction> {
    Arc::new(TrivialGolden)
}

#[test]
fn trivial_golden_round_trip() {
    let x = [0, 1, 0, 1, 0, 0, 1, 0];
    let z = build_final(&x, golden(), &LayerShifts::default(), 3, 20).unwrap();
    assert_eq!(validate_final(&z, golden(), 20).violations, vec![]);
    let phi = factor_phi(&z, 8);
    assert_eq!(phi.word, x[..phi.word.len()].to_vec());
    assert!(phi.word.len() >= 3);
    for s in Generator::all() {
        let r = check_equivariance(&z, s, 3, &TrivialGolden);
        assert!(r.holds, "{r:?}");
        assert!(r.compared >= 2, "{r:?}");
    }
}

#[test]
fn odometer_round_trip() {
    let x = [1, 1, 1, 0, 0, 0];
    let act: Arc<dyn EffectiveAction> = Arc::new(Odometer);
    let z = build_final(&x, act.clone(), &LayerShifts::default(), 3, 20).unwrap();
    assert_eq!(validate_final(&z, act.clone(), 20).violations, vec![]);
    assert_eq!(factor_phi(&z, 3).word, [1, 1, 1]);
    // the a-component along the identity grid is x + 1 = 000...
    let a = Generator {
        axis: Axis::H,
        letter: 0,
    };
    let comp: Vec<u8> = (0..3)
        .map(|n| {
            let (h, v) = z
                .grid(&Word::identity(), &Word::identity(), (n, 0))
                .unwrap();
            (z.sigma(&h, &v).unwrap() & a.bit() != 0) as u8
        })
        .collect();
    assert_eq!(comp, [0, 0, 0]);
    for s in Generator::all() {
        assert!(check_equivariance(&z, s, 3, &Odometer).holds);
    }
}

#[test]
fn shifted_layers_are_valid() {
    let x = [0, 0, 1, 0, 1, 0, 0, 1];
    let shifts = LayerShifts {
        h: w("a"),
        v: w("B"),
    };
    let z = build_final(&x, golden(), &shifts, 3, 20).unwrap();
    assert_eq!(validate_final(&z, golden(), 20).violations, vec![]);
}

#[test]
fn json_round_trip_preserves_validity() {
    let x = [1, 0, 0, 1, 0, 1];
    let z = build_final(&x, golden(), &LayerShifts::default(), 2, 20).unwrap();
    let s = serde_json::to_string(&z.to_json()).unwrap();
    let back = FinalPatch::from_json(serde_json::from_str(&s).unwrap()).unwrap();
    assert_eq!(back.len(), z.len());
    assert_eq!(validate_final(&back, golden(), 20).violations, vec![]);
    assert_eq!(factor_phi(&back, 6), factor_phi(&z, 6));
}

#[test]
fn rejected_input_is_refused() {
    // 11 is forbidden in the golden mean shift
    assert!(build_final(&[0, 1, 1, 0], golden(), &LayerShifts::default(), 2, 20).is_err());
}
