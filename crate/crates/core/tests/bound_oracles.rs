//! Bound right-hand sides recomputed from an SVD-based functional calculus
//! (|T|^p = V Σ^p V*, |T*|^p = U Σ^p U*) and the dense-sweep numerical
//! radius, plus the hand-evaluated equality cases.

use nalgebra::{DMatrix, DVector};

use radlab::bounds::{
    self, evaluate, BoundId, BoundParams, Operands, Operator, OperatorPair, OperatorQuad,
};
use radlab::genlab::{generate_one, CertDirection, Family, KantorovichCert};
use radlab::lemmas::kantorovich_ratio;
use radlab::{ComplexMatrix, C64};

type M = DMatrix<C64>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// (|T|^p, |T*|^p) from the SVD T = U Σ V*.
fn abs_powers(t: &M, p: f64) -> (M, M) {
    let svd = t.clone().svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let s = DMatrix::from_diagonal(&DVector::from_iterator(
        svd.singular_values.len(),
        svd.singular_values.iter().map(|&x| re(if x > 0.0 { x.powf(p) } else { 0.0 })),
    ));
    let v = v_t.adjoint();
    (&v * &s * v.adjoint(), &u * &s * u.adjoint())
}

fn norm(m: &M) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Dense-sweep numerical radius (lower bound, O(1/k²) accurate).
fn w(m: &M) -> f64 {
    let k = 40_000;
    (0..k)
        .map(|j| {
            let rot = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64);
            ((m * rot + m.adjoint() * rot.conj()) * re(0.5)).symmetric_eigenvalues().max()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn ginibre(n: usize, seed: u64, i: u64) -> ComplexMatrix {
    generate_one(Family::Ginibre, n, seed, i).unwrap()
}

#[test]
fn single_operator_rhs_match_the_svd_oracle() {
    for (n, i) in [(2, 0), (3, 1), (4, 2)] {
        let tm = ginibre(n, 21, i);
        let t = tm.as_dmatrix().clone();
        let op = Operator::new(tm.clone());
        let sum = |p: f64| {
            let (a, b) = abs_powers(&t, p);
            norm(&(a + b))
        };
        let w_t = w(&t);
        let w_t2 = w(&(&t * &t));
        let (abs1, abs1_star) = abs_powers(&t, 1.0);
        let w_abs = w(&(&abs1 * &abs1_star));
        let tol = 1e-7;

        assert!(close(bounds::eval_kittaneh(&op).unwrap().rhs, 0.5 * sum(1.0), 1e-10));
        for r in [1.0, 1.5, 2.0] {
            let e = bounds::eval_elhaddad_kittaneh(&op, r).unwrap();
            assert!(close(e.rhs, 0.5 * sum(2.0 * r), 1e-10));
            assert!(close(e.lhs, w_t.powf(2.0 * r), tol));
        }
        let e = bounds::eval_abu_omar(&op).unwrap();
        assert!(close(e.rhs, 0.25 * sum(2.0) + 0.5 * w_t2, tol));
        let e = bounds::eval_bhunia(&op).unwrap();
        assert!(close(e.rhs, 0.25 * sum(2.0) + 0.5 * w_abs, tol));
        for lambda in [0.0, 1.0, 10.0] {
            let x = sum(2.0);
            let y = sum(4.0);
            let expected = (2.0 * lambda + 3.0) / (8.0 * (lambda + 1.0)) * x * w_t2
                + (2.0 * lambda + 1.0) / (8.0 * (lambda + 1.0)) * y;
            assert!(close(bounds::eval_th2(&op, lambda).unwrap().rhs, expected, tol));
        }
        for (alpha, r) in [(0.0, 1.0), (0.5, 1.5), (1.0, 2.0)] {
            let (a, b) = abs_powers(&t, 2.0 * r);
            let mixed = w(&(&b * &a));
            let w2r = w_t2.powf(r);
            let c = alpha / 8.0 * sum(4.0 * r) + alpha / 4.0 * mixed + alpha / 2.0 * w2r * w2r;
            let d = (1.0 - alpha) / 4.0 * sum(2.0 * r) + (1.0 - alpha) / 2.0 * w2r;
            let e = &bounds::eval_th4(&op, alpha, r).unwrap()[0];
            assert!(close(e.rhs, c + d * w_t.powf(2.0 * r), tol));
            // positive root of u² = D·u + C, computed the other way round
            let root = 2.0 * c / (-d + (d * d + 4.0 * c).sqrt()).max(f64::MIN_POSITIVE);
            let root = if c > 0.0 { root } else { d };
            assert!(close(e.explicit_bound.unwrap(), root.powf(1.0 / (2.0 * r)), 1e-9));
        }
    }
}

#[test]
fn pair_rhs_match_the_svd_oracle() {
    let (tm, sm) = (ginibre(3, 5, 0), ginibre(3, 5, 1));
    let (t, s) = (tm.as_dmatrix().clone(), sm.as_dmatrix().clone());
    let (ot, os) = (Operator::new(tm), Operator::new(sm));
    let pair = OperatorPair::new(&ot, &os).unwrap();
    let sum = |p: f64| norm(&(abs_powers(&t, p).0 + abs_powers(&s, p).0));
    let w_st = w(&(s.adjoint() * &t));
    let tol = 1e-7;
    for r in [1.0, 2.0] {
        let e = bounds::eval_dragomir(&pair, r).unwrap();
        assert!(close(e.lhs, w_st.powf(r), tol) && close(e.rhs, 0.5 * sum(2.0 * r), 1e-10));
    }
    for lambda in [0.0, 2.0] {
        let a = sum(2.0) / (2.0 * (1.0 + lambda));
        let b = lambda * sum(4.0) / (2.0 * (1.0 + lambda));
        let e = bounds::eval_aldolat(&pair, lambda).unwrap();
        assert!(close(e.rhs, a * w_st + b, tol));
        let u = e.explicit_bound.unwrap();
        assert!(close(u * u, a * u + b, 1e-12));
        assert!(w_st <= u + 1e-8);
    }
    for (lambda, r) in [(1.0, 1.0), (3.0, 2.0)] {
        let cross = w(&(abs_powers(&s, 2.0 * r).0 * abs_powers(&t, 2.0 * r).0));
        let w_ts = w(&(t.adjoint() * &s));
        let l1 = lambda + 1.0;
        let expected = sum(2.0 * r) / (2.0 * l1) * w_ts.powf(r)
            + lambda / (4.0 * l1) * sum(4.0 * r)
            + lambda / (2.0 * l1) * cross;
        assert!(close(bounds::eval_th6(&pair, lambda, r).unwrap().rhs, expected, tol));
    }
}

#[test]
fn quad_rhs_match_the_svd_oracle() {
    let mats: Vec<ComplexMatrix> = (0..4).map(|i| ginibre(2, 8, i)).collect();
    let d: Vec<M> = mats.iter().map(|m| m.as_dmatrix().clone()).collect();
    let ops: Vec<Operator> = mats.into_iter().map(Operator::new).collect();
    let quad = OperatorQuad::new(&ops[0], &ops[1], &ops[2], &ops[3]).unwrap();
    let r = 1.5;
    let p = |m: &M, q: f64| abs_powers(m, q).0;
    let sum = norm(&(p(&d[0], 4.0 * r) + p(&d[1], 4.0 * r) + p(&d[2], 4.0 * r) + p(&d[3], 4.0 * r)));
    let ab = w(&(p(&d[1], 2.0) * p(&d[0], 2.0)));
    let cd = w(&(p(&d[3], 2.0) * p(&d[2], 2.0)));
    let expected = 2f64.powf(2.0 * r - 3.0) * sum + 2f64.powf(2.0 * r - 2.0) * (ab.powf(r) + cd.powf(r));
    let lhs = w(&(d[0].adjoint() * &d[1] + d[2].adjoint() * &d[3])).powf(2.0 * r);
    let e = bounds::eval_th5(&quad, r).unwrap();
    assert!(close(e.rhs, expected, 1e-7) && close(e.lhs, lhs, 1e-7));
}

#[test]
fn hand_evaluated_equality_cases() {
    let jordan = Operator::new(ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap());
    let e = bounds::eval_kittaneh(&jordan).unwrap();
    assert!(e.slack.abs() < 1e-12 && (e.rhs - 0.5).abs() < 1e-12);
    assert!(bounds::eval_abu_omar(&jordan).unwrap().slack.abs() < 1e-12);
    assert!(bounds::eval_bhunia(&jordan).unwrap().slack.abs() < 1e-12);
    let chain = bounds::eval_th2_chain(&jordan, 0.0).unwrap();
    assert!((chain[0].lhs - 1.0 / 16.0).abs() < 1e-12);
    assert!((chain[0].rhs - 1.0 / 8.0).abs() < 1e-12);
    assert!((chain[1].rhs - 0.5).abs() < 1e-12);
    let th4 = bounds::eval_th4(&jordan, 1.0, 1.0).unwrap();
    assert!((th4[0].rhs - 1.0 / 8.0).abs() < 1e-12);

    let u = Operator::new(generate_one(Family::Unitary, 3, 1, 0).unwrap());
    for lambda in [0.0, 0.5, 10.0] {
        let e = bounds::eval_th2(&u, lambda).unwrap();
        assert!((e.lhs - 1.0).abs() < 1e-9 && e.rhs >= e.lhs - 1e-9);
    }
    let id = Operator::new(ComplexMatrix::identity(2).unwrap());
    let pair = OperatorPair::new(&id, &id).unwrap();
    let e = bounds::eval_aldolat(&pair, 1.0).unwrap();
    assert!((e.rhs - 1.0).abs() < 1e-12 && e.slack.abs() < 1e-12);
    let e = bounds::eval_th6(&pair, 1.0, 1.0).unwrap();
    assert!((e.rhs - 1.0).abs() < 1e-12);
    let quad = OperatorQuad::new(&id, &id, &id, &id).unwrap();
    let chain = bounds::eval_th5_cor(&quad, 2.0).unwrap();
    assert!((chain[0].lhs - 16.0).abs() < 1e-9 && (chain[1].rhs - 16.0).abs() < 1e-9);
}

#[test]
fn reductions_between_bounds() {
    let (tm, sm) = (ginibre(3, 4, 0), ginibre(3, 4, 1));
    let (t, s) = (Operator::new(tm), Operator::new(sm));
    let pair = OperatorPair::new(&t, &s).unwrap();
    // λ = 0 Al-Dolat is w² ≤ ½‖|T|²+|S|²‖·w, i.e. Dragomir at r = 1 times w
    let a = bounds::eval_aldolat(&pair, 0.0).unwrap();
    let d = bounds::eval_dragomir(&pair, 1.0).unwrap();
    assert!(close(a.rhs, d.rhs * d.lhs, 1e-12));
    // th6 at r = 1 agrees with its directly computed corollary form
    for lambda in [0.0, 0.5, 2.0] {
        let cor = bounds::eval_th6_cor1(&pair, lambda).unwrap();
        let general = bounds::eval_th6(&pair, lambda, 1.0).unwrap();
        assert!(close(cor[0].rhs, general.rhs, 1e-12));
    }
    // th5 with C = D = 0 drops the second product
    let zero = Operator::new(ComplexMatrix::zeros(3).unwrap());
    let quad = OperatorQuad::new(&t, &s, &zero, &zero).unwrap();
    let e = bounds::eval_th5(&quad, 1.0).unwrap();
    let expected = 0.5 * t.abs_power(4.0).unwrap().add(&s.abs_power(4.0).unwrap()).unwrap().norm().unwrap()
        + radlab::numrad::numerical_radius_value(
            &s.abs_power(2.0).unwrap().matrix().matmul(t.abs_power(2.0).unwrap().matrix()).unwrap(),
        )
        .unwrap();
    assert!(close(e.rhs, expected, 1e-12));
}

#[test]
fn kantorovich_formulas_with_a_supplied_certificate() {
    // The hypothesis never certifies on a finite-dimensional space, so the
    // formula is checked with a supplied certificate.
    let tm = ginibre(3, 2, 0);
    let t = tm.as_dmatrix().clone();
    let op = Operator::new(tm);
    let cert = KantorovichCert {
        direction: CertDirection::MtLeqTstar,
        m_max: 2.0,
        residual: 0.0,
    };
    let k = kantorovich_ratio(2.0).unwrap();
    assert!((k - 9.0 / 8.0).abs() < 1e-15);
    let ops = Operands {
        cert: Some(&cert),
        ..Operands::single(&op)
    };
    let r = 2.0;
    let records = evaluate(BoundId::KantTh1Cor, &ops, &BoundParams { r, ..BoundParams::default() }).unwrap();
    let (a, b) = abs_powers(&t, 2.0 * r);
    let expected = norm(&(a + b)) / (4.0 * k.sqrt()) + 0.5 * w(&(&t * &t)).powf(r);
    assert_eq!(records.len(), 2);
    for e in &records {
        assert!(close(e.rhs, expected, 1e-7));
        assert_eq!(e.certificates["m_max"], 2.0);
    }
    let without = evaluate(BoundId::KantTh1Cor, &Operands::single(&op), &BoundParams::default());
    assert!(matches!(without, Err(radlab::RadlabError::HypothesisFailed(_))));
}

#[test]
fn kantorovich_corollary_reduces_at_unit_ratio() {
    // K(m, 2) → 1 as m → 1⁺, leaving the ¼‖|T|²+|T*|²‖ + ½w(T²) form at r = 1
    let op = Operator::new(ginibre(3, 6, 0));
    let cert = KantorovichCert {
        direction: CertDirection::MtstarLeqT,
        m_max: 1.0 + 1e-15,
        residual: 0.0,
    };
    let ops = Operands {
        cert: Some(&cert),
        ..Operands::single(&op)
    };
    let records = evaluate(BoundId::KantTh1Cor, &ops, &BoundParams { r: 1.0, ..BoundParams::default() }).unwrap();
    let abu_omar = bounds::eval_abu_omar(&op).unwrap();
    let expected = 0.25 * op.sum_norm(2.0).unwrap() + 0.5 * op.w_square().unwrap();
    assert!(close(abu_omar.rhs, expected, 1e-12));
    for e in records {
        assert!(close(e.rhs, expected, 1e-12), "{} vs {expected}", e.rhs);
    }
}

#[test]
fn th2_chain_collapses_for_normal_operators() {
    // w = ‖T‖ and w(T²) = ‖T‖², so all three terms equal ‖T‖⁴
    let op = Operator::new(generate_one(Family::Normal, 4, 9, 0).unwrap());
    let n4 = op.norm().unwrap().powi(4);
    for lambda in [0.0, 1.0, 10.0] {
        let chain = bounds::eval_th2_chain(&op, lambda).unwrap();
        for e in &chain {
            assert!(close(e.lhs, n4, 1e-9) && close(e.rhs, n4, 1e-9), "λ={lambda}: {e:?}");
        }
    }
}
