use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::objective::Oracle;

use super::{
    affine, drive, search_atoms, Algorithm, Candidate, CoefficientSchedule, GreedyOptions, GreedyTrace,
    Iterate, RunSetup, StepOutcome,
};

/// One fixed-coefficient step: evaluates `E(G + c g)` once per atom.
pub fn ega_c_step(values: &Oracle, dict: &Dictionary, current: &Iterate<'_>, c: f64) -> Result<StepOutcome> {
    let best = search_atoms(dict, |i| {
        let g = dict.atoms()[i].as_slice();
        Ok(Candidate::new(values.evaluate(&affine(1.0, current.point, c, g))?, 0.0, ()))
    })?;
    let mut coefficients = current.coefficients.clone();
    coefficients.add(best.atom, c);
    Ok(StepOutcome {
        atom: best.atom,
        lambda: None,
        w: None,
        alpha: Some(1.0),
        beta: Some(c),
        coefficients,
        observed: best.value,
        certificate: 0.0,
        box_runs: 0,
    })
}

/// Greedy algorithm with the prescribed coefficients `c_m`.
pub fn ega_c_run(
    oracle: &Oracle,
    dict: &Dictionary,
    schedule: &CoefficientSchedule,
    opts: &GreedyOptions,
) -> Result<GreedyTrace> {
    if schedule.len < opts.iterations {
        return Err(Error::input(format!(
            "coefficient schedule has {} entries but {} iterations were requested",
            schedule.len, opts.iterations
        )));
    }
    let setup = RunSetup { algorithm: Algorithm::EgaC, schedule: Some(schedule.clone()), weakness: None };
    drive(oracle, dict, opts, setup, |values, current, m| {
        let c = schedule
            .value(m)
            .ok_or_else(|| Error::input(format!("coefficient schedule exhausted at step {m}")))?;
        ega_c_step(values, dict, current, c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::make_coefficients_cs;
    use crate::objective::Quadratic;
    use crate::space::NormOrder;

    fn setup(center: &[f64]) -> (Oracle, Dictionary) {
        (
            Oracle::new(Quadratic::new(center.to_vec()).unwrap()),
            Dictionary::canonical(center.len(), NormOrder::L2).unwrap(),
        )
    }

    #[test]
    fn first_step_takes_largest_descent() {
        let (o, d) = setup(&[0.3, 0.2]);
        let cs = make_coefficients_cs(2.0, 1.0, 10).unwrap();
        let t = ega_c_run(&o, &d, &cs, &GreedyOptions::new(1)).unwrap();
        let c = cs.c;
        let candidates = [
            (0.3 - c).powi(2) + 0.04,
            (0.3 + c).powi(2) + 0.04,
            0.09 + (0.2 - c).powi(2),
            0.09 + (0.2 + c).powi(2),
        ];
        let argmin = (0..4).fold(0, |b, i| if candidates[i] < candidates[b] { i } else { b });
        assert_eq!(t.records[0].atom, argmin);
        assert_eq!(d.label(argmin), Some("+e1"));
        assert_eq!(t.records[0].objective, candidates[0]);
    }

    #[test]
    fn exactly_one_query_per_atom() {
        let (o, d) = setup(&[0.3, 0.2]);
        let cs = make_coefficients_cs(2.0, 1.0, 50).unwrap();
        let t = ega_c_run(&o, &d, &cs, &GreedyOptions::new(50)).unwrap();
        for r in &t.records {
            assert_eq!(r.evals, 4 * r.iteration as u64);
        }
    }

    #[test]
    fn coefficient_ledger_sums_steps() {
        let (o, d) = setup(&[0.0, 0.0]);
        let cs = make_coefficients_cs(2.0, 1.0, 40).unwrap();
        let t = ega_c_run(&o, &d, &cs, &GreedyOptions::new(40)).unwrap();
        let mut expected = vec![0.0; d.len()];
        for r in &t.records {
            expected[r.atom] += cs.value(r.iteration).unwrap();
            assert!(r.objective >= 0.0);
            assert!(r.l1_mass <= cs.partial_sum(r.iteration) + 1e-12);
        }
        let last = &t.last().unwrap().coefficients;
        for (i, e) in expected.iter().enumerate() {
            assert!((last.get(i) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn short_schedule_rejected() {
        let (o, d) = setup(&[0.3, 0.2]);
        let cs = make_coefficients_cs(2.0, 1.0, 5).unwrap();
        assert!(ega_c_run(&o, &d, &cs, &GreedyOptions::new(6)).is_err());
    }
}
