use bhlab::model::{
    constant_b, perron_eigenvectors, perron_root, validate_model, CheckKind, LifetimeLaw,
    OffspringLaw, ParetoTail, SlowlyVarying,
};
use bhlab::{ExactModel, Mat2, Model, ModelFile, Rational64};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn data(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/models").join(name)
}

#[test]
fn reference_constants_are_exact() {
    let c = ExactModel::reference(0.5).constants().unwrap();
    assert_eq!(c.u.0, [q(1, 1), q(1, 1)]);
    assert_eq!(c.v.0, [q(1, 3), q(2, 3)]);
    assert_eq!(c.b, q(1, 6));
    assert_eq!(c.d.0, [[q(1, 2), q(1, 1)], [q(1, 2), q(1, 1)]]);
    assert_eq!(c.k_survival(), 4.0);
    assert!(c.eigen_residual() == 0.0);
}

#[test]
fn d_row_identities() {
    // Infinite-mean branch: D₂₂ = 1 and D₂₁/D₂₂ = v₁/v₂ = m₂₁/(1 − m₁₁).
    for beta in [0.25, 0.5, 0.75, 1.0] {
        let c = ExactModel::reference(beta).constants().unwrap();
        let (d, m) = (&c.d.0, &c.m.0);
        assert_eq!(d[1][1], q(1, 1));
        assert_eq!(d[1][0] / d[1][1], m[1][0] / (q(1, 1) - m[0][0]));
    }
}

#[test]
fn model_files_load_and_agree_with_reference() {
    for (name, beta) in [
        ("reference_beta025.json", 0.25),
        ("reference_beta05.json", 0.5),
        ("reference_beta075.json", 0.75),
        ("reference_beta1.json", 1.0),
    ] {
        let file = ModelFile::load(data(name)).unwrap();
        let exact = file.exact_model().unwrap();
        let reference = ExactModel::reference(beta);
        assert_eq!(exact.mean_matrix(), reference.mean_matrix(), "{name}");
        assert_eq!(exact.second_derivatives(), reference.second_derivatives());
        assert_eq!(exact.lifetimes, reference.lifetimes);
        assert!(validate_model(&exact).passed(), "{name}");
    }
    let log = ModelFile::load(data("logpower_beta05.json")).unwrap().model().unwrap();
    assert!(validate_model(&log).passed());
}

#[test]
fn model_file_round_trip() {
    let file = ModelFile::from_model(&ExactModel::reference(0.75), Some("x".into()));
    let back = ModelFile::parse(&file.to_json()).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.exact_model().unwrap().mean_matrix(), ExactModel::reference(0.75).mean_matrix());
}

#[test]
fn validation_failures_are_reported() {
    let mut supercritical = Model::reference(0.5);
    supercritical.offspring[0] = OffspringLaw::from_pairs([((0, 1), 0.5), ((1, 1), 0.5)]).unwrap();
    let report = validate_model(&supercritical);
    assert!(!report.get(CheckKind::Criticality).unwrap().passed);

    let mut heavy_type_one = Model::reference(0.5);
    heavy_type_one.lifetimes.swap(0, 1);
    assert!(!validate_model(&heavy_type_one).passed());

    let mut atom = Model::reference(0.5);
    atom.lifetimes[1] = LifetimeLaw::Pareto(ParetoTail {
        beta: 0.5,
        scale: 1.0,
        ell: SlowlyVarying::Constant { c: 0.5 },
    });
    assert!(!validate_model(&atom).get(CheckKind::HypothesisA).unwrap().passed);
}

/// `½ Σᵢ vᵢ Σⱼₖ b^i_jk uⱼuₖ` with `b^i_jk` summed over outcomes directly.
fn brute_force_b(model: &ExactModel) -> Rational64 {
    let c = model.constants().unwrap();
    let mut total = q(0, 1);
    for i in 0..2 {
        for o in model.offspring[i].outcomes() {
            let k = o.children.map(|x| q(x as i64, 1));
            for j in 0..2 {
                for l in 0..2 {
                    let moment = if j == l { k[j] * (k[j] - q(1, 1)) } else { k[j] * k[l] };
                    total += c.v.0[i] * o.prob * moment * c.u.0[j] * c.u.0[l];
                }
            }
        }
    }
    total / q(2, 1)
}

#[test]
fn b_matches_outcome_enumeration() {
    let reference = ExactModel::reference(0.5);
    assert_eq!(brute_force_b(&reference), q(1, 6));
    let mut other = reference.clone();
    other.offspring[1] = OffspringLaw::from_pairs([
        ((0, 0), q(1, 3)),
        ((1, 0), q(1, 6)),
        ((0, 3), q(1, 6)),
        ((2, 1), q(1, 3)),
    ])
    .unwrap();
    let m = other.mean_matrix();
    // Rebalance type 1 so the mean matrix stays critical.
    let (m21, m22) = (m.0[1][0], m.0[1][1]);
    let m12 = (q(1, 1) - m22) / m21;
    assert!(m12 > q(0, 1) && m12 <= q(1, 1));
    other.offspring[0] = OffspringLaw::from_pairs([((0, 1), m12), ((0, 0), q(1, 1) - m12)]).unwrap();
    let c = other.constants().unwrap();
    assert_eq!(constant_b(&other.second_derivatives(), &c.u, &c.v), brute_force_b(&other));
    assert_eq!(c.b, brute_force_b(&other));
}

proptest! {
    #[test]
    fn random_critical_matrices(m11 in 0.0f64..0.95, m12 in 0.05f64..3.0, m22 in 0.0f64..0.95) {
        let m21 = (1.0 - m11) * (1.0 - m22) / m12;
        let m = Mat2([[m11, m12], [m21, m22]]);
        prop_assert!((perron_root(&m) - 1.0).abs() < 1e-12);
        let (u, v) = perron_eigenvectors(&m).unwrap();
        let mu = m.mul_vec(&u);
        let vm = m.left_mul_vec(&v);
        let err = (mu - u).norm1() + (vm - v).norm1() + (v.dot(&u) - 1.0).abs() + (v.sum() - 1.0).abs();
        prop_assert!(err < 1e-9, "residual {err}");
        prop_assert!(u.0.iter().chain(v.0.iter()).all(|&x| x > 0.0));
    }

    #[test]
    fn mu2_is_monotone_and_concave(beta in 0.05f64..=1.0, scale in 0.2f64..5.0, p in -1.0f64..2.0, t in 0.0f64..1e4) {
        for ell in [SlowlyVarying::Constant { c: 1.0 }, SlowlyVarying::LogPower { c: 0.9, p }] {
            let Ok(law) = ParetoTail::new(beta, scale, ell) else {
                continue;
            };
            let h = 1e-3 * (1.0 + t);
            let (a, b, c) = (law.mu2(t), law.mu2(t + h), law.mu2(t + 2.0 * h));
            prop_assert!(b >= a - 1e-12 * b.abs());
            prop_assert!(c - b <= b - a + 1e-9 * (1.0 + c.abs()), "{law:?} t={t}");
            if t >= scale {
                prop_assert!(law.r(t + h) >= law.r(t) - 1e-9 * law.r(t));
            }
        }
    }
}
