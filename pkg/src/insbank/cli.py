"""Command-line surface for bank evolution, ranking, extraction, baselines,
and reporting."""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import analytics, baselines
from .core import EvolutionConfig
from .errors import BudgetExceedsBank, InsbankError
from .evolution import evolve_round, extract_budget, init_bank, rank_bank
from .io import bank_lock, ingest_candidates, load_bank, save_bank, write_candidates

BANK_DIR_ENVVAR = "INSBANK_BANK_DIR"


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        as_json = ctx.obj.get("json", False)
        try:
            return fn(*args, **kwargs)
        except InsbankError as exc:
            if as_json:
                click.echo(json.dumps({"error": exc.category, "message": str(exc)}), err=True)
            else:
                click.echo(f"{exc.category}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def emit(payload: dict, text: str) -> None:
    ctx = click.get_current_context()
    if ctx.obj.get("quiet"):
        return
    if ctx.obj.get("json"):
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(text)


@click.group()
@click.option("--quiet", is_flag=True, help="Suppress non-error output.")
@click.option("--json", "json_mode", is_flag=True, help="Emit JSON instead of text.")
@click.pass_context
def main(ctx, quiet, json_mode):
    """Progressive diverse-subset selection over embedding + quality pools."""
    ctx.ensure_object(dict)
    ctx.obj["quiet"] = quiet
    ctx.obj["json"] = json_mode


bank_dir_option = click.option(
    "--bank-dir",
    envvar=BANK_DIR_ENVVAR,
    required=True,
    type=click.Path(path_type=Path),
    help=f"Bank directory (or ${BANK_DIR_ENVVAR}).",
)


@main.command()
@click.option("--candidates", required=True, type=click.Path(exists=True))
@bank_dir_option
@click.option("--bank-size", default=6000, show_default=True, type=int)
@click.option("--gamma", default=1.0, show_default=True, type=float)
@click.option(
    "--combination",
    default="mul",
    show_default=True,
    type=click.Choice(["add", "mul", "nonlinear"]),
)
@click.option("--alpha", default=0.3, show_default=True, type=float)
@click.option("--lambda", "lam", default=0.9, show_default=True, type=float)
@click.option("--beta", default=0.5, show_default=True, type=float)
@click.option("--batch-size", default=27000, show_default=True, type=int)
@click.option("--r-l", default=0.3, show_default=True, type=float)
@click.option("--r-h", default=0.95, show_default=True, type=float)
@click.option("--preference", default=0.0, show_default=True, type=float)
@click.option("--max-iters", default=200, show_default=True, type=int)
@click.option("--stable-iters", default=15, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@handle_errors
def init(candidates, bank_dir, bank_size, gamma, combination, alpha, lam, beta,
         batch_size, r_l, r_h, preference, max_iters, stable_iters, seed):
    """Build the round-0 bank from a candidate file."""
    combo = {"add": "additive", "mul": "multiplicative", "nonlinear": "nonlinear"}[combination]
    config = EvolutionConfig(
        bank_size=bank_size,
        alpha0=alpha,
        lam=lam,
        beta=beta,
        gamma=gamma,
        combination=combo,
        r_l=r_l,
        r_h=r_h,
        batch_size=batch_size,
        max_iters=max_iters,
        stable_iters=stable_iters,
        preference=preference,
        seed=seed,
    )
    pool = ingest_candidates(candidates)
    with bank_lock(bank_dir):
        bank = init_bank(pool, config)
        save_bank(bank, bank_dir)
    emit(
        {"round": bank.round, "bank_size": len(bank.entries)},
        f"initialized bank with {len(bank.entries)} entries (round {bank.round})",
    )


@main.command()
@bank_dir_option
@click.option("--new", "new_file", required=True, type=click.Path(exists=True))
@handle_errors
def evolve(bank_dir, new_file):
    """Run one evolution round with newly arrived candidates."""
    new_points = ingest_candidates(new_file)
    with bank_lock(bank_dir):
        bank = load_bank(bank_dir)
        bank = evolve_round(bank, new_points)
        save_bank(bank, bank_dir)
    emit(
        {"round": bank.round, "bank_size": len(bank.entries)},
        f"evolved to round {bank.round}; bank holds {len(bank.entries)} entries",
    )


@main.command()
@bank_dir_option
@click.option("--format", "fmt", default="text", type=click.Choice(["csv", "text"]))
@handle_errors
def rank(bank_dir, fmt):
    """Print the ranked bank."""
    bank = load_bank(bank_dir)
    entries = rank_bank(bank)
    if fmt == "csv":
        click.echo("rank,id,overall,s_rep_norm,s_q_norm,round_added")
        for e in entries:
            click.echo(
                f"{e.rank},{e.point.id},{e.overall!r},{e.s_rep_norm!r},"
                f"{e.s_q_norm!r},{e.round_added}"
            )
    else:
        for e in entries:
            click.echo(f"{e.rank:6d}  {e.point.id}  overall={e.overall:.6f}")


@main.command()
@bank_dir_option
@click.option("--budget", required=True, type=int)
@click.option("--out", required=True, type=click.Path(path_type=Path))
@handle_errors
def extract(bank_dir, budget, out):
    """Write the top-`budget` bank points to a candidate file."""
    bank = load_bank(bank_dir)
    points = extract_budget(bank, budget)
    write_candidates(points, out)
    emit({"written": len(points)}, f"wrote {len(points)} points to {out}")


@main.command()
@click.option("--subset", type=click.Path(exists=True))
@click.option(
    "--bank-dir", envvar=BANK_DIR_ENVVAR, type=click.Path(path_type=Path), default=None
)
@click.option("--nearest-neighbor", is_flag=True, help="Mean nearest-neighbor distance instead of all-pairs mean.")
@handle_errors
def stats(subset, bank_dir, nearest_neighbor):
    """Mean quality and mean pairwise diversity of a subset or the bank."""
    if (subset is None) == (bank_dir is None):
        raise InsbankError("pass exactly one of --subset or --bank-dir")
    if subset is not None:
        points = ingest_candidates(subset)
    else:
        points = [e.point for e in load_bank(bank_dir).entries]
    st = analytics.subset_stats(points, nearest_neighbor=nearest_neighbor)
    emit(
        {
            "size": st.size,
            "mean_quality": st.mean_quality,
            "mean_pairwise_euclidean": st.mean_pairwise_euclidean,
        },
        f"size={st.size} mean_quality={st.mean_quality:.4f} "
        f"diversity={st.mean_pairwise_euclidean:.4f}",
    )


@main.command("select-baseline")
@click.option(
    "--method",
    required=True,
    type=click.Choice(["random", "knn1", "kcenter", "deita", "dg", "qg"]),
)
@click.option("--candidates", required=True, type=click.Path(exists=True))
@click.option("--size", required=True, type=int)
@click.option("--gamma", default=1.0, show_default=True, type=float)
@click.option("--threshold", default=0.9, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(path_type=Path))
@handle_errors
def select_baseline(method, candidates, size, gamma, threshold, seed, out):
    """Select a subset with a reference strategy and write it out."""
    pool = ingest_candidates(candidates)
    if method == "random":
        result = baselines.random_select(pool, size, seed)
    elif method == "knn1":
        result = baselines.knn1_select(pool, size, gamma)
    elif method == "kcenter":
        result = baselines.kcenter_select(pool, size, gamma)
    elif method == "deita":
        result = baselines.deita_select(pool, size, threshold)
    elif method == "dg":
        from .affinity import run_ap
        from .geometry import negative_euclidean
        from .scoring import representativeness

        config = EvolutionConfig(
            bank_size=size, batch_size=max(27000, len(pool) + 1), seed=seed
        )
        state = run_ap(negative_euclidean(pool), config)
        s_rep = representativeness(state)
        result = baselines.diversity_greedy(
            pool, {p.id: float(s_rep[i]) for i, p in enumerate(pool)}, size
        )
    else:
        result = baselines.quality_greedy(pool, size)
    by_id = {p.id: p for p in pool}
    write_candidates([by_id[i] for i in result.selected_ids], out)
    emit(
        {"method": method, "selected": len(result.selected_ids), "shortfall": result.shortfall},
        f"{method}: wrote {len(result.selected_ids)} points to {out}"
        + (" (shortfall)" if result.shortfall else ""),
    )


@main.command()
@click.option("--a", "file_a", required=True, type=click.Path(exists=True))
@click.option("--b", "file_b", required=True, type=click.Path(exists=True))
@handle_errors
def compare(file_a, file_b):
    """Count shared ids between two candidate files."""
    ids_a = [p.id for p in ingest_candidates(file_a)]
    ids_b = [p.id for p in ingest_candidates(file_b)]
    n = analytics.overlap_count(ids_a, ids_b)
    emit({"overlap": n}, f"overlap={n}")


@main.command()
@bank_dir_option
@click.option("--top", "top_n", default=None, type=int, help="Cut size; defaults to 2x bank size.")
@handle_errors
def correlate(bank_dir, top_n):
    """Spearman correlation of quality/diversity with bank membership among
    the top candidates of the last round."""
    bank = load_bank(bank_dir)
    if top_n is None:
        top_n = 2 * bank.config.bank_size
    sp_q, sp_d, diff = analytics.selection_correlation(bank.last_scores, bank.ids(), top_n)
    emit(
        {"sp_quality": sp_q, "sp_diversity": sp_d, "diff": diff},
        f"sp_quality={sp_q:.4f} sp_diversity={sp_d:.4f} diff={diff:.4f}",
    )


if __name__ == "__main__":
    main()
