"""Rate-verification experiment: runs the grid-oracle checks and emits tables."""

from __future__ import annotations

from ..verify import lemma_a2_check, rate_experiment_k, rate_experiment_n
from .. import plots
from .report import RunReport


def run_rates(config, out_dir) -> dict:
    config.validate()
    report = RunReport(out_dir)
    config.save(report.path("config.json"))
    summary = {"experiment": "rates", "seed": config.seed, "which": list(config.which)}

    if "n" in config.which:
        series = {}
        for p, n_list in ((2.0, config.n_list_p2), (4.0, config.n_list_p4)):
            rep = rate_experiment_n(config.fm_error_constant, p, list(n_list))
            tag = f"p{int(p)}"
            report.write_csv(
                f"rate_n_{tag}.csv", ["n", "tv", "bound", "ratio"],
                [(r["n"], r["tv"], r["bound"], r["ratio"]) for r in rep.rows()],
            )
            series[f"order {int(p)}"] = (rep.n_list, rep.tvs, rep.bounds)
            summary[f"slope_{tag}"] = rep.slope
            summary[f"threshold_n_{tag}"] = rep.threshold_n
            summary[f"within_bound_{tag}"] = rep.threshold_n is not None
        plots.rate_loglog_figure(report.figure_path("rate_n.png"), series)

    if "k" in config.which:
        combined = [(n, config.fm_error_constant, 2.0, k)
                    for n, k in zip((8, 16, 32), config.k_list)]
        rep = rate_experiment_k(list(config.k_list), combined=combined)
        report.write_csv(
            "rate_k.csv", ["k", "prior_tv", "tv", "bound", "holds"],
            [(r["k"], r["prior_tv"], r["tv"], r["bound"], r["holds"]) for r in rep.rows()],
        )
        report.write_csv(
            "rate_consistency.csv", ["n", "k", "tv", "bound", "holds"],
            [(r["n"], r["k"], r["tv"], r["bound"], r["holds"]) for r in rep.combined_rows],
        )
        plots.rate_loglog_figure(
            report.figure_path("rate_k.png"),
            {"truncation": (rep.k_list, rep.tvs, rep.bounds)}, xlabel="k",
        )
        summary["k_bound_holds"] = all(rep.holds)
        summary["consistency_bound_holds"] = all(r["holds"] for r in rep.combined_rows)

    if "lemma" in config.which:
        all_hold = True
        rows = []
        for construction, const in (
            ("zero", config.lemma_constant),
            ("constant", config.lemma_constant),
            ("oscillatory", config.lemma_oscillatory_constant),
        ):
            rep = lemma_a2_check(construction, const, config.lemma_order,
                                 list(config.lemma_n_list))
            all_hold = all_hold and rep.holds
            for r in rep.rows():
                rows.append((construction, r["n"], r["z_gap"], r["z_bound"],
                             r["tv"], r["tv_bound"]))
            summary[f"lemma_{construction}_holds"] = rep.holds
        report.write_csv(
            "lemma_checks.csv",
            ["construction", "n", "z_gap", "z_bound", "tv", "tv_bound"], rows,
        )
        summary["lemma_all_hold"] = all_hold

    report.write_json("summary.json", summary)
    return summary
