"""Command-line interface.

Subcommands::

    qgame validate GAME
    qgame tensor GAME PLAYER [--format text|json] [--check-fixture] [--exact-fractions]
    qgame payoff GAME STRATEGY_I STRATEGY_II [--json]
    qgame best-response GAME OPPONENT PLAYER [--tol T] [--max-iters N] [--json]
    qgame verify-nash GAME STRATEGY_I STRATEGY_II [--epsilon E] [--json]
    qgame simulate GAME POVM STRATEGY_I STRATEGY_II [--rounds N] [--seed S] [--json]
    qgame classical GAME [--json]

Input arguments resolve against the filesystem first and then against the
bundled data files, so ``qgame payoff ewl.game chi_star.strategy
xi_star.strategy`` works from any directory.

Exit codes are a stable contract: 0 success, 1 validation failure (including
a negative verify-nash verdict), 2 parse/usage error, 3 internal cross-check
failure, 4 non-convergence.  ``QGAME_TOL`` optionally overrides the default
validation tolerances.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import files
from .errors import (
    CrossCheckFailure,
    NoConvergence,
    ParseError,
    QGameError,
    ValidationError,
)
from .equilibrium import best_response, response_problem, verify_nash
from .game import (
    classical_reduction,
    normalize_player,
    payoff_contract,
    payoff_direct,
    payoff_tensor_matrix_unit,
    simulate_play,
)
from .games_builtin import figure1_reference_tensors
from .linalg import HERMITIAN_ATOL, PSD_ATOL, TRACE_ATOL, hermiticity_residual, min_eigenvalue
from .quantum import chi_to_kraus

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_CROSSCHECK = 3
EXIT_NO_CONVERGENCE = 4

CROSS_CHECK_ATOL = 1e-9


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _as_fraction(x: float, max_den: int = 64, tol: float = 1e-12) -> Fraction | None:
    frac = Fraction(x).limit_denominator(max_den)
    return frac if abs(float(frac) - x) <= tol else None


def _fraction_str(frac: Fraction, imaginary: bool = False) -> str:
    unit = "i" if imaginary else ""
    if frac.denominator == 1:
        return f"{frac.numerator}{unit}"
    return f"{frac.numerator}{unit}/{frac.denominator}"


def format_real(x: float, exact: bool = False) -> str:
    if exact:
        frac = _as_fraction(x)
        if frac is not None:
            return _fraction_str(frac)
    return f"{x:.12g}"


def format_complex(z: complex, exact: bool = False) -> str:
    """Render a complex scalar; with ``exact`` small rationals print as fractions."""
    re, im = float(np.real(z)), float(np.imag(z))
    if exact:
        fre, fim = _as_fraction(re), _as_fraction(im)
        if fre is not None and fim is not None:
            if fim == 0:
                return _fraction_str(fre)
            if fre == 0:
                return _fraction_str(fim, imaginary=True)
            sign = "+" if fim > 0 else "-"
            return f"{_fraction_str(fre)}{sign}{_fraction_str(abs(fim), imaginary=True)}"
    if im == 0:
        return f"{re:.12g}"
    if re == 0:
        return f"{im:.12g}i"
    sign = "+" if im > 0 else "-"
    return f"{re:.12g}{sign}{abs(im):.12g}i"


def _print_matrix(m: np.ndarray, exact: bool = False) -> None:
    cells = [[format_complex(z, exact) for z in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    for row in cells:
        print("  ".join(c.rjust(width) for c in row))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    raw = files.parse_game_raw(args.game)
    tol = args.tol
    trace_tol = tol if tol is not None else TRACE_ATOL
    herm_tol = tol if tol is not None else HERMITIAN_ATOL
    psd_tol = tol if tol is not None else PSD_ATOL

    checks: list[tuple[str, bool, str]] = []
    rho = raw["rho"]
    dim_ok = rho.shape == (raw["n1"] * raw["n2"],) * 2
    checks.append(("dimensions", dim_ok, f"{rho.shape[0]} vs n1*n2 = {raw['n1'] * raw['n2']}"))
    trace_residual = abs(complex(np.trace(rho)) - 1.0)
    checks.append(("rho trace-one", trace_residual <= trace_tol, f"residual {trace_residual:.3e}"))
    herm_residual = hermiticity_residual(rho)
    herm_ok = herm_residual <= herm_tol
    checks.append(("rho hermitian", herm_ok, f"residual {herm_residual:.3e}"))
    if herm_ok:
        lo = min_eigenvalue(rho, tol=max(herm_tol, HERMITIAN_ATOL))
        checks.append(("rho positive", lo >= -psd_tol, f"min eigenvalue {lo:.3e}"))
    else:
        checks.append(("rho positive", False, "skipped: not hermitian"))

    if "payoff_ops" in raw:
        for player in ("I", "II"):
            residual = hermiticity_residual(raw["payoff_ops"][player])
            checks.append((f"payoff operator {player} hermitian", residual <= herm_tol,
                           f"residual {residual:.3e}"))
    else:
        elements = np.stack(raw["povm"]["elements"])
        completeness = np.einsum("kai,kaj->ij", elements.conj(), elements)
        residual = float(np.max(np.abs(completeness - np.eye(elements.shape[1]))))
        checks.append(("measurement completeness", residual <= trace_tol, f"residual {residual:.3e}"))
        for player, vec in (("I", raw["povm"]["payoffs_i"]), ("II", raw["povm"]["payoffs_ii"])):
            ok = vec.shape[0] == elements.shape[0]
            checks.append((f"payoffs {player} length", ok,
                           f"{vec.shape[0]} payoffs for {elements.shape[0]} outcomes"))

    all_ok = all(ok for _, ok, _ in checks)
    width = max(len(name) for name, _, _ in checks)
    for name, ok, detail in checks:
        print(f"{name.ljust(width)}  {'PASS' if ok else 'FAIL'}  {detail}")
    return EXIT_OK if all_ok else EXIT_VALIDATION


def cmd_tensor(args) -> int:
    game = files.load_game(args.game, args.tol)
    player = normalize_player(args.player)
    tensor = payoff_tensor_matrix_unit(game, player)
    grid = tensor.grid

    if args.check_fixture:
        fixtures = figure1_reference_tensors()
        reference = fixtures[0] if player == "I" else fixtures[1]
        if reference.grid.shape != grid.shape:
            raise ValidationError(
                f"fixture grid is {reference.grid.shape}, computed grid is {grid.shape}"
            )
        diff = np.abs(grid - reference.grid)
        matches = int(np.sum(diff <= 1e-12))
        total = grid.size
        print(f"match: {matches}/{total} entries")
        if matches != total:
            n_sq = tensor.entries.shape[0]
            for r, c in zip(*np.nonzero(diff > 1e-12)):
                alpha, beta = divmod(int(r), n_sq)
                gamma, delta = divmod(int(c), tensor.entries.shape[2])
                print(
                    f"  mismatch at (alpha={alpha}, beta={beta}, gamma={gamma}, delta={delta}): "
                    f"computed {format_complex(grid[r, c])}, fixture {format_complex(reference.grid[r, c])}"
                )
            return EXIT_VALIDATION
        return EXIT_OK

    if args.format == "json":
        payload = {
            "player": player,
            "n1": game.n1,
            "n2": game.n2,
            "grid": files.matrix_to_lists(grid),
        }
        sys.stdout.write(files.emit_document(payload))
    else:
        print(f"payoff tensor, player {player} ({grid.shape[0]}x{grid.shape[1]} grid)")
        _print_matrix(grid, exact=args.exact_fractions)
    return EXIT_OK


def _load_pair(args, game, tol):
    strat_i = files.load_strategy(args.strategy_i, game.n1, tol)
    strat_ii = files.load_strategy(args.strategy_ii, game.n2, tol)
    return strat_i, strat_ii


def cmd_payoff(args) -> int:
    game = files.load_game(args.game, args.tol)
    strat_i, strat_ii = _load_pair(args, game, args.tol)
    tensor_i = payoff_tensor_matrix_unit(game, "I")
    tensor_ii = payoff_tensor_matrix_unit(game, "II")
    value_i = payoff_contract(tensor_i, strat_i.chi, strat_ii.chi)
    value_ii = payoff_contract(tensor_ii, strat_i.chi, strat_ii.chi)

    if strat_i.channel is not None and strat_ii.channel is not None:
        direct_i = payoff_direct(game, strat_i.channel, strat_ii.channel, "I")
        direct_ii = payoff_direct(game, strat_i.channel, strat_ii.channel, "II")
        worst = max(abs(direct_i - value_i), abs(direct_ii - value_ii))
        if worst > CROSS_CHECK_ATOL:
            raise CrossCheckFailure(
                f"contraction and direct evaluation disagree by {worst:.3e} > {CROSS_CHECK_ATOL:.1e}"
            )

    if args.json:
        sys.stdout.write(files.emit_document({"payoff_I": value_i, "payoff_II": value_ii}))
    else:
        print(f"payoff I  = {format_real(value_i)}")
        print(f"payoff II = {format_real(value_ii)}")
    return EXIT_OK


def cmd_best_response(args) -> int:
    game = files.load_game(args.game, args.tol)
    player = normalize_player(args.player)
    opponent_dim = game.n2 if player == "I" else game.n1
    opponent = files.load_strategy(args.opponent, opponent_dim, args.tol)
    tensor = payoff_tensor_matrix_unit(game, player)
    problem = response_problem(tensor, opponent.chi, player)
    result = best_response(problem, max_iters=args.max_iters, tol=args.br_tol)

    if args.json:
        payload = {
            "player": player,
            "value": result.value,
            "dual_bound": result.dual_bound,
            "gap": result.gap,
            "iterations": result.iterations,
            "converged": result.converged,
            "chi": files.matrix_to_lists(result.chi_opt.matrix),
        }
        sys.stdout.write(files.emit_document(payload))
    else:
        print(f"best response value = {format_real(result.value)}")
        print(f"dual bound          = {format_real(result.dual_bound)}")
        print(f"duality gap         = {result.gap:.3e}")
        print(f"iterations          = {result.iterations}")
        print(f"converged           = {result.converged}")
        print("optimal chi:")
        _print_matrix(result.chi_opt.matrix)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_verify_nash(args) -> int:
    game = files.load_game(args.game, args.tol)
    strat_i, strat_ii = _load_pair(args, game, args.tol)
    report = verify_nash(game, strat_i.chi, strat_ii.chi, args.epsilon)
    verdict = "EQUILIBRIUM" if report.is_equilibrium else "NOT EQUILIBRIUM"
    if args.json:
        payload = {
            "is_equilibrium": report.is_equilibrium,
            "epsilon": args.epsilon,
            "gap_I": report.gap_i,
            "gap_II": report.gap_ii,
            "payoff_I": report.payoff_i,
            "payoff_II": report.payoff_ii,
        }
        sys.stdout.write(files.emit_document(payload))
    else:
        print(f"{verdict} (gaps {report.gap_i:.1e}, {report.gap_ii:.1e})")
        print(f"payoffs: ({format_real(report.payoff_i)}, {format_real(report.payoff_ii)})")
    return EXIT_OK if report.is_equilibrium else EXIT_VALIDATION


def cmd_simulate(args) -> int:
    game = files.load_game(args.game, args.tol)
    povm, payoffs_i, payoffs_ii = files.load_povm_file(args.povm, game.rho.dim, args.tol)
    strat_i, strat_ii = _load_pair(args, game, args.tol)
    channel_i = strat_i.channel if strat_i.channel is not None else chi_to_kraus(strat_i.chi)
    channel_ii = strat_ii.channel if strat_ii.channel is not None else chi_to_kraus(strat_ii.chi)

    seed = args.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy) & 0xFFFFFFFFFFFFFFFF
    rng = np.random.default_rng(seed)
    result = simulate_play(game, povm, payoffs_i, payoffs_ii, channel_i, channel_ii,
                           args.rounds, rng)
    exact_i = payoff_direct(game, channel_i, channel_ii, "I")
    exact_ii = payoff_direct(game, channel_i, channel_ii, "II")

    def z_score(mean, exact, stderr):
        return (mean - exact) / stderr if stderr > 0 else 0.0

    if args.json:
        payload = {
            "seed": seed,
            "rounds": result.rounds,
            "mean_I": result.mean_i,
            "mean_II": result.mean_ii,
            "stderr_I": result.stderr_i,
            "stderr_II": result.stderr_ii,
            "exact_I": exact_i,
            "exact_II": exact_ii,
            "z_I": z_score(result.mean_i, exact_i, result.stderr_i),
            "z_II": z_score(result.mean_ii, exact_ii, result.stderr_ii),
        }
        sys.stdout.write(files.emit_document(payload))
    else:
        print(f"seed: {seed}")
        print(f"rounds: {result.rounds}")
        for label, mean, stderr, exact in (
            ("I", result.mean_i, result.stderr_i, exact_i),
            ("II", result.mean_ii, result.stderr_ii, exact_ii),
        ):
            z = z_score(mean, exact, stderr)
            print(f"player {label:<2} empirical {mean:.6f}  stderr {stderr:.6f}  "
                  f"exact {format_real(exact)}  z {z:+.3f}")
    return EXIT_OK


def cmd_classical(args) -> int:
    game = files.load_game(args.game, args.tol)
    bimatrix = classical_reduction(game)
    if args.json:
        payload = {
            "payoff_I": [[float(x) for x in row] for row in bimatrix.payoff_i],
            "payoff_II": [[float(x) for x in row] for row in bimatrix.payoff_ii],
        }
        sys.stdout.write(files.emit_document(payload))
    else:
        rows, cols = bimatrix.payoff_i.shape
        cells = [
            [f"({format_real(bimatrix.payoff_i[s, t])}, {format_real(bimatrix.payoff_ii[s, t])})"
             for t in range(cols)]
            for s in range(rows)
        ]
        width = max(len(c) for row in cells for c in row)
        for row in cells:
            print("  ".join(c.rjust(width) for c in row))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgame",
        description="Static two-player quantum games: validation, payoff tensors, "
                    "best responses, Nash verification and Monte Carlo play.",
        epilog="Set QGAME_TOL to override the default validation tolerances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a game file against all validity conditions")
    p.add_argument("game")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tensor", help="print a player's payoff tensor grid")
    p.add_argument("game")
    p.add_argument("player", choices=["I", "II", "i", "ii", "1", "2"])
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--check-fixture", action="store_true",
                   help="compare against the bundled reference grids")
    p.add_argument("--exact-fractions", action="store_true",
                   help="render entries close to small rationals as fractions")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("payoff", help="expected payoffs for a strategy pair")
    p.add_argument("game")
    p.add_argument("strategy_i", metavar="strategy-I")
    p.add_argument("strategy_ii", metavar="strategy-II")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("best-response", help="certified best response against a fixed opponent")
    p.add_argument("game")
    p.add_argument("opponent", help="the opponent's strategy file")
    p.add_argument("player", choices=["I", "II", "i", "ii", "1", "2"],
                   help="the responding player")
    p.add_argument("--tol", dest="br_tol", type=float, default=1e-7)
    p.add_argument("--max-iters", type=_positive_int, default=5000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_best_response)

    p = sub.add_parser("verify-nash", help="epsilon-Nash check for a strategy profile")
    p.add_argument("game")
    p.add_argument("strategy_i", metavar="strategy-I")
    p.add_argument("strategy_ii", metavar="strategy-II")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_nash)

    p = sub.add_parser("simulate", help="Monte Carlo play through the referee's measurement")
    p.add_argument("game")
    p.add_argument("povm")
    p.add_argument("strategy_i", metavar="strategy-I")
    p.add_argument("strategy_ii", metavar="strategy-II")
    p.add_argument("--rounds", type=_positive_int, default=100000)
    p.add_argument("--seed", type=int, default=None,
                   help="64-bit seed for the single deterministic generator; "
                        "chosen and printed when unspecified")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classical", help="classical reduction to a bimatrix game")
    p.add_argument("game")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classical)

    return parser


def _env_tol() -> float | None:
    raw = os.environ.get("QGAME_TOL")
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"QGAME_TOL must be a float, got {raw!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.tol = _env_tol()
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CrossCheckFailure as exc:
        print(f"internal cross-check failure: {exc}", file=sys.stderr)
        return EXIT_CROSSCHECK
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        partial = getattr(exc, "partial", None)
        if partial is not None:
            print(f"partial gaps: {partial.gap_i:.3e}, {partial.gap_ii:.3e}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except QGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
