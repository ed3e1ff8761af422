//! Nelder–Mead simplex search (maximization form).

#[derive(Debug, Clone)]
pub(crate) struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop once the spread of objective values across the simplex falls below this.
    pub f_tol: f64,
    pub initial_step: f64,
    /// Fresh-simplex restarts from the incumbent after convergence.
    pub reinitializations: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Maximizes `f` starting from `x0`.
pub(crate) fn maximize<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = run(&f, x0, opts, opts.initial_step);
    let mut step = opts.initial_step;
    for _ in 0..opts.reinitializations {
        step *= 0.25;
        let next = run(&f, &best.x, opts, step.max(1e-4));
        let improved = next.value > best.value + opts.f_tol;
        let evaluations = best.evaluations + next.evaluations;
        if next.value >= best.value {
            best = SimplexResult { evaluations, ..next };
        } else {
            best.evaluations = evaluations;
        }
        if !improved {
            break;
        }
    }
    best
}

fn run<F>(f: &F, x0: &[f64], opts: &SimplexOptions, step: f64) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    // minimize g = -f
    let g = |x: &[f64]| -f(x);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for k in 0..n {
        let mut p = x0.to_vec();
        p[k] += step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| g(p)).collect();
    let mut evaluations = n + 1;
    let mut converged = false;

    for _ in 0..opts.max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if (values[n] - values[0]).abs() <= opts.f_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|k| points[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (points[n][k] - centroid[k])).collect() };

        let reflected = along(-ALPHA);
        let fr = g(&reflected);
        evaluations += 1;
        if fr < values[0] {
            let expanded = along(-ALPHA * GAMMA);
            let fe = g(&expanded);
            evaluations += 1;
            if fe < fr {
                points[n] = expanded;
                values[n] = fe;
            } else {
                points[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            points[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let p = along(-ALPHA * RHO);
            let v = g(&p);
            (p, v)
        } else {
            let p = along(RHO);
            let v = g(&p);
            (p, v)
        };
        evaluations += 1;
        if fc < values[n].min(fr) {
            points[n] = contracted;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=n {
            let shrunk: Vec<f64> = (0..n).map(|k| points[0][k] + SIGMA * (points[i][k] - points[0][k])).collect();
            values[i] = g(&shrunk);
            points[i] = shrunk;
        }
        evaluations += n;
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    SimplexResult { x: points[best].clone(), value: -values[best], converged, evaluations }
}
