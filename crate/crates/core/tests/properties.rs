use catalyst_core::catalyst::{alpha_next, extrapolate, update_anchor};
use catalyst_core::linalg::dist;
use catalyst_core::prox::{project_columns, Ball, ElasticNet, UnitColumns, L1};
use catalyst_core::Regularizer;
use proptest::prelude::*;

fn vecs(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-5.0f64..5.0, len), prop::collection::vec(-5.0f64..5.0, len))
}

proptest! {
    #[test]
    fn alpha_identity(a in 1e-6f64..=1.0) {
        let b = alpha_next(a).unwrap();
        prop_assert!(b > 0.0 && b < 1.0 && b < a);
        let lhs = (1.0 - b) / (b * b);
        let rhs = 1.0 / (a * a);
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    #[test]
    fn anchor_update_inverts_extrapolation(a in 0.01f64..=1.0, (v, x) in vecs(4)) {
        // With x̃ = y the new anchor equals the old one.
        let y = extrapolate(a, &v, &x);
        let back = update_anchor(a, &x, &y);
        prop_assert!(dist(&back, &v) < 1e-9 * (1.0 + v.iter().map(|t| t.abs()).sum::<f64>()) / a);
    }

    #[test]
    fn prox_operators_are_nonexpansive(step in 0.01f64..3.0, lam in 0.0f64..2.0, (u, v) in vecs(6)) {
        let regs: Vec<Box<dyn Regularizer>> = vec![
            Box::new(L1 { lambda: lam }),
            Box::new(ElasticNet { mu: lam, lambda: lam }),
            Box::new(Ball { radius: 1.0 + lam }),
            Box::new(UnitColumns { rows: 3 }),
        ];
        for reg in regs {
            let (mut pu, mut pv) = (vec![0.0; 6], vec![0.0; 6]);
            reg.prox(step, &u, &mut pu);
            reg.prox(step, &v, &mut pv);
            prop_assert!(dist(&pu, &pv) <= dist(&u, &v) * (1.0 + 1e-12) + 1e-15);
            prop_assert!(reg.value(&pu).is_finite());
        }
    }

    #[test]
    fn column_projection_is_idempotent((d, _) in vecs(8)) {
        let once = project_columns(&d, 4);
        prop_assert!(dist(&project_columns(&once, 4), &once) < 1e-15);
        for col in once.chunks(4) {
            prop_assert!(col.iter().map(|t| t * t).sum::<f64>().sqrt() <= 1.0 + 1e-12);
        }
    }
}
