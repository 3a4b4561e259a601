use crate::dictionary::Dictionary;
use crate::error::Result;
use crate::linesearch::UnivariateSearch;
use crate::objective::Oracle;

use super::{affine, drive, search_atoms, Algorithm, Candidate, GreedyOptions, GreedyTrace, Iterate, RunSetup, StepOutcome};

/// One relaxed step: for every atom `g`, searches `lambda` in `[0, 1]` for
/// `E((1 - lambda) G + lambda g)` and keeps the best pair.
pub fn rega_step(values: &Oracle, dict: &Dictionary, current: &Iterate<'_>, ls_depth: u32) -> Result<StepOutcome> {
    let search = UnivariateSearch::unit(ls_depth).with_delta(values.delta());
    let best = search_atoms(dict, |i| {
        let g = dict.atoms()[i].as_slice();
        let res = search.try_minimize(|l| values.evaluate(&affine(1.0 - l, current.point, l, g)))?;
        Ok(Candidate::new(res.f_best, res.certified_gap, res.x_best))
    })?;
    let (atom, lambda) = (best.atom, best.payload);
    let mut coefficients = current.coefficients.clone();
    coefficients.scale(1.0 - lambda);
    coefficients.add(atom, lambda);
    Ok(StepOutcome {
        atom,
        lambda: Some(lambda),
        w: None,
        alpha: None,
        beta: None,
        coefficients,
        observed: best.value,
        certificate: best.certificate,
        box_runs: 0,
    })
}

/// Relaxed greedy algorithm; `opts.delta > 0` runs it on corrupted values.
pub fn rega_run(oracle: &Oracle, dict: &Dictionary, opts: &GreedyOptions) -> Result<GreedyTrace> {
    let setup = RunSetup { algorithm: Algorithm::Rega, schedule: None, weakness: None };
    drive(oracle, dict, opts, setup, |values, current, _| {
        rega_step(values, dict, current, opts.ls_depth)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Quadratic;
    use crate::space::NormOrder;

    fn problem(center: &[f64]) -> (Oracle, Dictionary) {
        let o = Oracle::new(Quadratic::new(center.to_vec()).unwrap());
        let d = Dictionary::canonical(center.len(), NormOrder::L2).unwrap();
        (o, d)
    }

    #[test]
    fn first_two_steps_match_closed_form() {
        let (o, d) = problem(&[0.3, 0.2]);
        let t = rega_run(&o, &d, &GreedyOptions::new(2).with_depth(40)).unwrap();
        let r1 = &t.records[0];
        assert_eq!(d.label(r1.atom), Some("+e1"));
        assert!((r1.lambda.unwrap() - 0.3).abs() < 1e-6);
        assert!((r1.objective - 0.04).abs() < 1e-10);
        let r2 = &t.records[1];
        assert_eq!(d.label(r2.atom), Some("+e2"));
        assert!((r2.lambda.unwrap() - 0.2 / 1.09).abs() < 1e-6);
        assert!((r2.objective - 0.0033028).abs() < 1e-6);
    }

    #[test]
    fn stays_at_minimizer_origin() {
        let (o, d) = problem(&[0.0, 0.0]);
        let t = rega_run(&o, &d, &GreedyOptions::new(5)).unwrap();
        for r in &t.records {
            assert_eq!(r.objective, 0.0);
            assert_eq!(r.lambda, Some(0.0));
            assert_eq!(r.support, 0);
        }
    }

    #[test]
    fn evaluation_budget_per_step() {
        let (o, d) = problem(&[0.3, 0.2]);
        let depth = 12;
        let t = rega_run(&o, &d, &GreedyOptions::new(4).with_depth(depth)).unwrap();
        for r in &t.records {
            assert!(r.evals <= (r.iteration * d.len() * (3 + 2 * depth as usize)) as u64);
        }
        assert_eq!(o.eval_count(), t.last().unwrap().evals);
    }

    #[test]
    fn corrupted_run_tracks_exact_run() {
        let (o, d) = problem(&[0.3, 0.2]);
        let exact = rega_run(&o, &d, &GreedyOptions::new(10).with_depth(25)).unwrap();
        let noisy = rega_run(&o, &d, &GreedyOptions::new(10).with_depth(25).with_delta(1e-3, 7)).unwrap();
        let mut budget = 0.0;
        for (e, n) in exact.records.iter().zip(&noisy.records) {
            budget += n.delta_eff;
            assert!(n.objective <= e.objective + budget + 1e-12);
        }
        // the exact caller's oracle is untouched by the corrupted run
        assert_eq!(o.eval_count(), exact.last().unwrap().evals);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let o = Oracle::new(Quadratic::new(vec![0.3, 0.2]).unwrap());
        let d = Dictionary::canonical(3, NormOrder::L2).unwrap();
        assert!(rega_run(&o, &d, &GreedyOptions::new(1)).is_err());
    }
}
