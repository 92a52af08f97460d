//! Text artifacts: run reports, field CSVs, plot scripts, matrix exports
//! and DOF tables.

use std::fmt::Write as _;

use hymse::topology::{count_dofs_2d, count_dofs_3d, IntMatrix};
use hymse::verification::{ConvergenceRecord, FieldSample, RunOutcome};

use crate::config::RunConfig;

/// Key=value run summary for a single solve. Written to report.txt and
/// echoed on stdout.
pub fn run_report(cfg: &RunConfig, mesh_label: &str, outcome: &RunOutcome) -> String {
    let r = &outcome.record;
    let mut s = String::new();
    let _ = writeln!(s, "kx={}", cfg.kx);
    let _ = writeln!(s, "ky={}", cfg.ky);
    let _ = writeln!(s, "degree={}", cfg.degree);
    let _ = writeln!(s, "quad={}", cfg.effective_quad());
    let _ = writeln!(s, "mesh={mesh_label}");
    let _ = writeln!(s, "curve_amp={:.6}", r.amplitude);
    let _ = writeln!(s, "alpha={:.6}", cfg.alpha);
    let _ = writeln!(s, "source={}", cfg.source_name());
    let _ = writeln!(s, "path={}", cfg.path_name());
    let _ = writeln!(s, "schur_method={}", cfg.schur_method_name());
    let _ = writeln!(s, "threads={}", cfg.threads);
    let _ = writeln!(s, "n_elements={}", cfg.kx * cfg.ky);
    let _ = writeln!(s, "n_full={}", r.n_full);
    let _ = writeln!(s, "n_lambda={}", r.n_lambda);
    let _ = writeln!(s, "nnz={}", r.nnz);
    let _ = writeln!(s, "err_p_l2={:.12e}", r.err_p_l2);
    let _ = writeln!(s, "err_u_hdiv={:.12e}", r.err_u_hdiv);
    let _ = writeln!(s, "err_div={:.12e}", r.err_div);
    if let Some(cond) = r.cond_s {
        let _ = writeln!(s, "cond_S={:.12e}", cond);
    }
    if let Some(d) = outcome.path_discrepancy {
        let _ = writeln!(s, "path_discrepancy={:.12e}", d);
    }
    if let Some(res) = outcome.monolithic_residual {
        let _ = writeln!(s, "monolithic_residual={:.12e}", res);
    }
    if let Some(it) = outcome.cg_iterations {
        let _ = writeln!(s, "cg_iterations={it}");
    }
    let _ = writeln!(s, "max_flux_jump={:.12e}", outcome.flux_jump);
    let _ = writeln!(s, "t_assemble_s={:.6}", r.t_assemble);
    let _ = writeln!(s, "t_solve_s={:.6}", r.t_solve);
    let _ = writeln!(s, "status=ok");
    s
}

/// Pointwise field samples as CSV (one row per sample point).
pub fn samples_to_csv(samples: &[FieldSample]) -> String {
    let mut s = String::from("x,y,p_h,ux_h,uy_h,p_exact,ux_exact,uy_exact\n");
    for q in samples {
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            q.x, q.y, q.p_h, q.ux_h, q.uy_h, q.p_exact, q.ux_exact, q.uy_exact
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    H,
    P,
}

impl SweepKind {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "h" => Ok(Self::H),
            "p" => Ok(Self::P),
            other => Err(format!("invalid sweep kind '{other}' (expected h or p)")),
        }
    }
}

/// Gnuplot script plotting the three error columns of a sweep CSV in
/// stacked log panels: error against 1/sqrt(K) for h-sweeps and against N
/// for p-sweeps, one curve per mesh kind.
pub fn gnuplot_script(kind: SweepKind, csv_name: &str) -> String {
    let (x_expr, x_label, x_scale) = match kind {
        SweepKind::H => ("(1/sqrt($1))", "1/sqrt(K)", "set logscale xy\n"),
        SweepKind::P => ("($2)", "N", "set logscale y\n"),
    };
    let panels = [
        ("pressure L2 error", "$5"),
        ("velocity H(div) error", "$6"),
        ("divergence residual", "$7"),
    ];
    let mut s = String::new();
    s.push_str("set datafile separator comma\n");
    s.push_str("set terminal pngcairo size 900,1200 enhanced\n");
    s.push_str("set output 'sweep.png'\n");
    s.push_str("set multiplot layout 3,1\n");
    s.push_str("set key left bottom\n");
    s.push_str("set format y '10^{%T}'\n");
    s.push_str(x_scale);
    let _ = writeln!(s, "set xlabel '{x_label}'");
    for (title, col) in panels {
        let _ = writeln!(s, "set ylabel '{title}'");
        let _ = writeln!(
            s,
            "plot '{csv}' skip 1 using {x}:((strcol(3) eq 'orthogonal') ? {c} : NaN) \
             with linespoints title 'orthogonal', \\\n     '{csv}' skip 1 using \
             {x}:((strcol(3) eq 'curved') ? {c} : NaN) with linespoints title 'curved'",
            csv = csv_name,
            x = x_expr,
            c = col,
        );
    }
    s.push_str("unset multiplot\n");
    s
}

/// Integer matrix as sorted 0-based coordinate triplets, one per line.
pub fn int_matrix_triplets(m: &IntMatrix) -> String {
    let mut entries: Vec<_> = m.entries().to_vec();
    entries.sort_by_key(|&(r, c, _)| (r, c));
    let mut s = String::new();
    for (r, c, v) in entries {
        let _ = writeln!(s, "{r} {c} {v}");
    }
    s
}

fn dof_row(s: &mut String, label: &str, n_full: u64, n_lambda: u64) {
    let ratio = n_lambda as f64 / n_full as f64;
    let _ = writeln!(s, "  {label:<16} {n_full:>12} {n_lambda:>12}   {ratio:.2}");
}

/// The four DOF count tables: full hybrid system size against multiplier
/// count, 2D and 3D, under h- and p-refinement.
pub fn dof_tables() -> String {
    let mut s = String::new();
    let header = "  discretization         n_full     n_lambda   ratio";

    let _ = writeln!(s, "Degrees of freedom, 2D, K = 3 x 3:");
    let _ = writeln!(s, "{header}");
    for n in [5, 10, 15, 20, 25] {
        let (full, lam) = count_dofs_2d(3, 3, n);
        dof_row(&mut s, &format!("N = {n}"), full, lam);
    }
    let _ = writeln!(s, "\nDegrees of freedom, 2D, N = 3:");
    let _ = writeln!(s, "{header}");
    for k in [20, 40, 60, 80, 100] {
        let (full, lam) = count_dofs_2d(k, k, 3);
        dof_row(&mut s, &format!("K = {k} x {k}"), full, lam);
    }
    let _ = writeln!(s, "\nDegrees of freedom, 3D, K = 3 x 3 x 3:");
    let _ = writeln!(s, "{header}");
    for n in [5, 10, 15, 20, 25] {
        let (full, lam) = count_dofs_3d(3, 3, 3, n);
        dof_row(&mut s, &format!("N = {n}"), full, lam);
    }
    let _ = writeln!(s, "\nDegrees of freedom, 3D, N = 3:");
    let _ = writeln!(s, "{header}");
    for k in [20, 40, 60, 80, 100] {
        let (full, lam) = count_dofs_3d(k, k, k, 3);
        dof_row(&mut s, &format!("K = {k} x {k} x {k}"), full, lam);
    }
    s
}

/// One row of the conditioning table.
pub struct CondRow {
    pub degree: usize,
    pub n_lambda: usize,
    pub dense: Option<f64>,
    pub iterative: Option<f64>,
}

impl CondRow {
    pub fn rel_diff(&self) -> Option<f64> {
        match (self.dense, self.iterative) {
            (Some(d), Some(i)) => Some((i - d).abs() / d),
            _ => None,
        }
    }
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6e}"),
        None => "NaN".to_string(),
    }
}

pub fn cond_table(rows: &[CondRow]) -> String {
    let mut s = String::from("   N   n_lambda   cond_dense     cond_iterative   rel_diff\n");
    for r in rows {
        let _ = writeln!(
            s,
            "  {:>2}   {:>8}   {:<12} {:<16} {}",
            r.degree,
            r.n_lambda,
            opt(r.dense),
            opt(r.iterative),
            opt(r.rel_diff()),
        );
    }
    s
}

pub fn cond_csv(rows: &[CondRow]) -> String {
    let mut s = String::from("N,n_lambda,cond_dense,cond_iterative,rel_diff\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.degree,
            r.n_lambda,
            opt(r.dense),
            opt(r.iterative),
            opt(r.rel_diff()),
        );
    }
    s
}

/// Sanity summary of sweep records for stdout.
pub fn sweep_summary(records: &[ConvergenceRecord]) -> String {
    let failed = records
        .iter()
        .filter(|r| !matches!(r.status, hymse::verification::RecordStatus::Ok))
        .count();
    format!("{} configurations, {} failed", records.len(), failed)
}
