mod common;

use common::{rel_close, step_fn, Cumulative};
use morreylab::family::FamilySpec;
use morreylab::io;
use morreylab::maxops::{iterated_maximal_on, maximal_envelope};
use morreylab::norms::{bmo_p_seminorm, bmo_seminorm, characterization_functional, morrey_norm, zygmund_morrey_norm};
use morreylab::orlicz::{gauge_average, llog_functional, log_plus, luxemburg_bracket, weak_llog_bracket, weak_llog_s};
use morreylab::radial::hardy_reduction_check;
use morreylab::*;
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn integrate_is_additive(f in step_fn(8, true), a in -3.0f64..0.0, m in 0.0f64..1.0, b in 1.0f64..3.0) {
        let whole = f.integrate(&iv(a, b));
        let parts = f.integrate(&iv(a, m)) + f.integrate(&iv(m, b));
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + f.l1_norm()));
    }

    #[test]
    fn rearrangement_is_equimeasurable(f in step_fn(8, true)) {
        let r = f.rearrangement();
        prop_assert!(r.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(rel_close(r.l1_norm(), f.l1_norm(), 1e-12));
        for lv in f.levels() {
            for s in [lv.value * (1.0 - 1e-9), lv.value, lv.value * (1.0 + 1e-9)] {
                prop_assert!(rel_close(f.distribution(s).unwrap(), r.distribution(s).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn double_star_dominates_and_decreases(f in step_fn(8, true)) {
        let r = f.rearrangement();
        let mut prev = f64::INFINITY;
        for k in 1..=64 {
            let t = k as f64 / 16.0;
            let d = f.double_star(t).unwrap();
            prop_assert!(d <= prev * (1.0 + 1e-12));
            prop_assert!(d >= r.eval(t) * (1.0 - 1e-12));
            prev = d;
        }
    }

    #[test]
    fn combine_is_linear(f in step_fn(6, true), g in step_fn(6, true)) {
        let h = f.combine(&g, |a, b| a + b);
        let q = iv(-3.0, 3.0);
        prop_assert!((h.integrate(&q) - f.integrate(&q) - g.integrate(&q)).abs() <= 1e-12 * (1.0 + f.l1_norm() + g.l1_norm()));
    }

    #[test]
    fn io_round_trips(f in step_fn(8, true)) {
        prop_assert_eq!(&io::from_json_str(&io::to_json_string(&f)).unwrap(), &f);
        prop_assert_eq!(&io::from_csv_str(&io::to_csv_string(&f)).unwrap(), &f);
    }

    #[test]
    fn maximal_sublinear_homogeneous_monotone(f in step_fn(6, true), g in step_fn(6, true), x in -3.0f64..3.0, c in -4.0f64..4.0) {
        let s = f.combine(&g, |a, b| a + b);
        prop_assert!(maximal(&s, x) <= maximal(&f, x) + maximal(&g, x) + 1e-12);
        prop_assert!(rel_close(maximal(&f.scale(c), x), c.abs() * maximal(&f, x), 1e-12) || c == 0.0);
        let bigger = f.combine(&g, |a, b| a.abs() + b.abs());
        prop_assert!(maximal(&f, x) <= maximal(&bigger, x) + 1e-12);
    }

    #[test]
    fn maximal_dominates_random_averages(f in step_fn(8, true), x in -3.0f64..3.0, us in prop::collection::vec((0.0f64..3.0, 0.0f64..3.0), 64)) {
        let c = Cumulative::new(&f);
        let m = maximal(&f, x);
        for (a, b) in us {
            if a + b > 0.0 {
                prop_assert!(c.avg(x - a, x + b) <= m + 1e-12);
            }
        }
    }

    #[test]
    fn fractional_zero_is_maximal(f in step_fn(8, true), x in -3.0f64..3.0) {
        prop_assert!(rel_close(fractional_maximal(&f, 0.0, x).unwrap(), maximal(&f, x), 1e-12));
    }

    #[test]
    fn commutator_dominations(b in step_fn(6, true), f in step_fn(6, true), x in -3.0f64..3.0) {
        let lhs = commutator(&b, &f, x).abs();
        let cb = maximal_commutator(&b, &f, x);
        let slack = 1e-12 * (1.0 + b.max_abs() * f.max_abs());
        prop_assert!(lhs <= cb + 2.0 * (-b.eval(x)).max(0.0) * maximal(&f, x) + slack);
        let bp = b.abs();
        prop_assert!(commutator(&bp, &f, x).abs() <= maximal_commutator(&bp, &f, x) + slack);
    }

    #[test]
    fn log_plus_submultiplicative(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
        prop_assert!(1.0 + log_plus(a * b) <= (1.0 + log_plus(a)) * (1.0 + log_plus(b)) * (1.0 + 1e-15));
    }

    #[test]
    fn luxemburg_properties(f in step_fn(8, true), c in 0.01f64..100.0) {
        let q = iv(-2.0, 2.0);
        let tol = 1e-10;
        let (lo, hi) = luxemburg_bracket(&f, &q, OrliczGauge::Llog, tol).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!((gauge_average(&f, &q, OrliczGauge::Llog, hi).unwrap() - 1.0).abs() <= 10.0 * tol * (1.0 + hi));
        let (clo, chi) = luxemburg_bracket(&f.scale(c), &q, OrliczGauge::Llog, tol).unwrap();
        prop_assert!(rel_close(0.5 * (clo + chi), c * 0.5 * (lo + hi), 4.0 * tol));
        prop_assert!(f.abs().average(&q) <= hi + tol);
        let j = llog_functional(&f, &q);
        prop_assert!(lo <= j * (1.0 + tol) && j <= 2.0 * hi * (1.0 + tol));
        let (wlo, whi) = weak_llog_bracket(&f, &q, tol).unwrap();
        prop_assert!(wlo <= whi && wlo <= hi * (1.0 + tol));
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let a = wlo * 0.5 + (whi * 2.0 - wlo * 0.5) * k as f64 / 20.0;
            let s = weak_llog_s(&f, &q, a);
            prop_assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn envelopes_bracket_exact_values(f in step_fn(6, true), xs in prop::collection::vec(-6.0f64..6.0, 16)) {
        let env = maximal_envelope(&f, &RefinePolicy::default());
        // The bracket is only claimed on the envelope's own domain.
        let dom = env.domain();
        for x in xs.into_iter().filter(|&x| dom.is_none_or(|d| d.contains(x))) {
            let (lo, hi) = env.eval(x);
            let m = maximal(&f, x);
            prop_assert!(lo <= m * (1.0 + 1e-12) && m <= hi * (1.0 + 1e-12), "{} {} {}", lo, m, hi);
        }
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn m2_bracket_is_consistent(f in step_fn(5, false), xs in prop::collection::vec(-4.0f64..4.0, 8)) {
        let pol = RefinePolicy::default();
        let s = f.support().unwrap();
        let dom = pol.domain_for(&s);
        let b = iterated_maximal_on(&f, &dom, &pol);
        for x in xs.into_iter().filter(|&x| dom.contains(x)) {
            let (lo, hi) = b.envelope.eval(x);
            prop_assert!(lo <= hi);
            prop_assert!(b.lower_at(x) <= b.upper_at(x) * (1.0 + 1e-12));
            // `M²f ≥ Mf` since `Mf ≥ |f|` a.e.
            prop_assert!(maximal(&f, x) <= b.upper_at(x) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn norm_estimates_are_consistent(f in step_fn(5, true), c in 0.1f64..10.0) {
        let fam = FamilySpec::dyadic(6);
        let tol = 1e-10;
        for e in [
            morrey_norm(&f, 2.0, 0.5, &fam).unwrap(),
            zygmund_morrey_norm(&f, 0.5, &fam, tol).unwrap(),
            characterization_functional(&f, 0.5, &fam).unwrap(),
            bmo_seminorm(&f, &fam).unwrap(),
        ] {
            prop_assert!(e.value <= e.upper_bound);
        }
        let m = morrey_norm(&f, 2.0, 0.5, &fam).unwrap();
        let q = m.argmax.unwrap();
        let again = (common::integral_pow(&f, q.left(), q.right(), 2.0) * q.length().powf(-0.5)).sqrt();
        prop_assert!(rel_close(again, m.value, 1e-12));
        let mc = morrey_norm(&f.scale(c), 2.0, 0.5, &fam).unwrap();
        prop_assert!(rel_close(mc.value, c * m.value, 1e-12));
        let z = zygmund_morrey_norm(&f, 0.5, &fam, tol).unwrap();
        let zc = zygmund_morrey_norm(&f.scale(c), 0.5, &fam, tol).unwrap();
        prop_assert!(rel_close(zc.value, c * z.value, 1e-8));
        let ch = characterization_functional(&f, 0.5, &fam).unwrap();
        prop_assert!(z.value <= ch.value * (1.0 + 1e-9) && ch.value <= 2.0 * z.value * (1.0 + 1e-9));
        prop_assert_eq!(bmo_p_seminorm(&f, 1.0, &fam).unwrap().value, bmo_seminorm(&f, &fam).unwrap().value);
        let finer = morrey_norm(&f, 2.0, 0.5, &FamilySpec::dyadic(7)).unwrap();
        prop_assert!(finer.value >= m.value);
        let coarse = morrey_norm(&f, 2.0, 0.5, &FamilySpec::breakpoint_pairs()).unwrap();
        prop_assert!(m.value >= coarse.value);
    }

    #[test]
    fn hardy_reduction_holds(vals in prop::collection::vec(1u32..=256, 1..8), n in 1u32..=3, frac in prop_oneof![Just(0.25), Just(0.5), Just(0.75)]) {
        let mut vals: Vec<f64> = vals.into_iter().map(|v| v as f64 / 16.0).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        let bps: Vec<f64> = (0..=vals.len()).map(|i| i as f64 * 0.375).collect();
        let p = RadialProfile::new(StepFunction::new(bps, vals).unwrap(), n).unwrap();
        let r = hardy_reduction_check(&p, frac * n as f64).unwrap();
        prop_assert!(r.holds(1e-9), "{:?}", r);
    }

    #[test]
    fn hardy_tracks_maximal_in_one_dimension(vals in prop::collection::vec(1u32..=64, 1..6), x in 0.0f64..4.0) {
        let mut vals: Vec<f64> = vals.into_iter().map(|v| v as f64).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        let bps: Vec<f64> = (0..=vals.len()).map(|i| i as f64 * 0.5).collect();
        let p = RadialProfile::new(StepFunction::new(bps, vals).unwrap(), 1).unwrap();
        let f = p.even_extension();
        let h = hardy(&p, x).value;
        let m = maximal(&f, x);
        prop_assert!(h <= m * (1.0 + 1e-12) && m <= 2.0 * h * (1.0 + 1e-12), "{} {}", h, m);
    }
}
