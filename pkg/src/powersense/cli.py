"""Command-line entry point.

Exit status: 0 on success, 1 on configuration errors, 2 when the model is
infeasible (the violated condition is printed).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import correlated, hybrid, output, sensing_game, two_player
from .efficiency import EfficiencyModel, solve_beta, solve_gamma, solve_gamma_L
from .exceptions import ConfigError, InfeasibleError, PowerSenseError
from .finite_game import check_exact_potential, check_weighted_potential, enumerate_pure_equilibria
from .hierarchy import FOLLOWER, LEADER, stackelberg_outcome
from .oneshot import NetworkConfig, br_dynamics, nash_powers, sinr_all, utility_all

COMMANDS = (
    "roots",
    "one-shot",
    "stackelberg",
    "sensing-game",
    "two-player",
    "correlated-region",
    "hybrid-paradox",
    "alpha-sweep",
)


def load_schema():
    return json.loads(resources.files("powersense").joinpath("data/config.schema.json").read_text())


@dataclass
class RunConfig:
    network: NetworkConfig
    model: EfficiencyModel
    tolerances: dict = field(default_factory=dict)
    hybrid: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    region: dict = field(default_factory=dict)
    consistent_gamma_index: bool = False

    @classmethod
    def from_dict(cls, data):
        try:
            jsonschema.validate(data, load_schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config invalid at {where}: {exc.message}") from None
        eff = data["efficiency"]
        if eff["family"] == "exp_ratio":
            model = EfficiencyModel.exp_ratio(eff["a"])
        else:
            model = EfficiencyModel.goodman(eff["M"])
        net = NetworkConfig(
            K=data["K"],
            h=data["h"],
            R=data["R"],
            sigma2=data["sigma2"],
            Pmax=data.get("Pmax", float("inf")),
            alpha=data.get("alpha", 0.0),
            N=data.get("N", 1.0),
        )
        sweep = {"from": 0.0, "to": 0.3, "steps": 61, **data.get("sweep", {})}
        if sweep["to"] < sweep["from"]:
            raise ConfigError("sweep range must be ordered: from <= to")
        return cls(
            net,
            model,
            {"root": 1e-12, "br": 1e-12, "payoff": 1e-9, **data.get("tolerances", {})},
            {"grid_size": 101, **data.get("hybrid", {})},
            sweep,
            {"angles": 72, **data.get("region", {})},
            data.get("consistent_gamma_index", False),
        )

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        return cls.from_dict(data)


def _alpha(args, rc):
    return rc.network.alpha if args.alpha is None else args.alpha


def cmd_roots(args, rc):
    tol = rc.tolerances["root"]
    beta = solve_beta(rc.model, tol)
    out = {"efficiency": rc.model.to_dict(), "beta": beta.value, "beta_residual": beta.residual}
    if rc.network.K >= 2:
        try:
            gamma = solve_gamma(rc.model, rc.network.K, tol)
            out.update(gamma=gamma.value, gamma_residual=gamma.residual)
        except InfeasibleError as exc:
            out["gamma_error"] = exc.condition
    gl = []
    for L in range(0, rc.network.K + 2):
        try:
            r = solve_gamma_L(rc.model, rc.network.K, rc.network.N, L, tol)
            gl.append({"L": L, "epsilon": r.epsilon, "gamma": r.value, "residual": r.residual})
        except InfeasibleError as exc:
            gl.append({"L": L, "error": exc.condition})
    out["gamma_L"] = gl
    return output.dumps(out)


def cmd_one_shot(args, rc):
    cfg, model = rc.network, rc.model
    p = nash_powers(cfg, model)
    init = np.minimum(p / 10, cfg.Pmax)
    br = br_dynamics(cfg, model, init, tol=rc.tolerances["br"])
    return output.dumps(
        {
            "nash_powers_W": p,
            "sinr": sinr_all(cfg, p),
            "utilities_bit_per_J": utility_all(cfg, model, p),
            "best_response_dynamics": {
                "powers_W": br.powers,
                "converged": br.converged,
                "sweeps": br.iterations,
                "max_abs_diff_W": float(np.max(np.abs(br.powers - p))),
            },
        }
    )


def cmd_stackelberg(args, rc):
    cfg = rc.network
    rows = []
    for i in range(cfg.K):
        for role in (LEADER, FOLLOWER):
            o = stackelberg_outcome(cfg, rc.model, i, role, alpha=_alpha(args, rc))
            rows.append({"player": i, "role": role, "power_W": o.power, "utility_bit_per_J": o.utility})
    return output.dumps({"alpha": _alpha(args, rc), "outcomes": rows})


def cmd_sensing_game(args, rc):
    cfg, model = rc.network, rc.model
    game = sensing_game.build_sensing_game(cfg, model, rc.consistent_gamma_index)
    exact, witness = check_exact_potential(game, rc.tolerances["payoff"])
    weighted = check_weighted_potential(game, cfg.weights, rc.tolerances["payoff"])
    table = sensing_game.rosenthal_potential(cfg, model, rc.consistent_gamma_index)
    argmax = sensing_game.pure_equilibria_by_potential(cfg, model, consistent_gamma_index=rc.consistent_gamma_index)
    ne = enumerate_pure_equilibria(game)
    return output.dumps(
        {
            "game": game.to_dict(),
            "exact_potential": {"holds": exact, "witness": witness},
            "weighted_potential": {"holds": weighted.is_potential, "weights": cfg.weights,
                                   "residual": weighted.residual},
            "rosenthal": table.to_dict(),
            "potential_maximisers": [{"F": p.F, "L": p.L} for p in sorted(argmax, key=lambda p: p.F)],
            "pure_equilibria": [list(game.labels(s)) for s in ne],
        }
    )


def cmd_two_player(args, rc):
    alpha = _alpha(args, rc)
    matrix = two_player.build_matrix(rc.network, rc.model, alpha)
    report = two_player.classify_equilibria(matrix, rc.tolerances["payoff"], model=rc.model)
    data = {"alpha": alpha, "beta": matrix.beta, "gamma": matrix.gamma}
    data.update(report.to_dict())
    return output.dumps(data)


REGION_HEADER = ["theta[rad]", "end", "u1[bit/J]", "u2[bit/J]",
                 "Q_NS_NS[-]", "Q_NS_S[-]", "Q_S_NS[-]", "Q_S_S[-]"]


def cmd_correlated_region(args, rc):
    matrix = two_player.build_matrix(rc.network, rc.model, _alpha(args, rc))
    angles = args.angles or rc.region["angles"]
    points = correlated.ce_utility_region(matrix, angles)
    rows = [[p.theta, p.end, p.u1, p.u2, *p.Q.ravel().tolist()] for p in points]
    return output.csv_text(REGION_HEADER, rows)


def cmd_hybrid_paradox(args, rc):
    grid_size = args.grid_size or rc.hybrid["grid_size"]
    return output.dumps(hybrid.paradox_report(rc.network, rc.model, _alpha(args, rc), grid_size))


SWEEP_HEADER = [
    "alpha[-]", "classification", "pure_equilibria",
    "u1_pure_1[bit/J]", "u2_pure_1[bit/J]", "u1_pure_2[bit/J]", "u2_pure_2[bit/J]",
    "u1_pure_3[bit/J]", "u2_pure_3[bit/J]",
    "q1_NS[-]", "q2_NS[-]", "u1_mixed[bit/J]", "u2_mixed[bit/J]",
]


def cmd_alpha_sweep(args, rc):
    lo = rc.sweep["from"] if args.start is None else args.start
    hi = rc.sweep["to"] if args.stop is None else args.stop
    steps = rc.sweep["steps"] if args.steps is None else args.steps
    if hi < lo or steps < 1:
        raise ConfigError("sweep range must be ordered and steps >= 1")
    rows = []
    for alpha in np.linspace(lo, hi, steps):
        matrix = two_player.build_matrix(rc.network, rc.model, float(alpha))
        rep = two_player.classify_equilibria(matrix, rc.tolerances["payoff"])
        pure_cells = []
        for k in range(3):
            if k < len(rep.pure):
                pure_cells += matrix.payoffs[rep.pure[k]].tolist()
            else:
                pure_cells += [None, None]
        mixed = [None] * 4 if rep.mixed is None else [rep.mixed.q1, rep.mixed.q2, *rep.mixed.values.tolist()]
        labels = ";".join("|".join(two_player.ACTIONS[a] for a in s) for s in rep.pure)
        rows.append([float(alpha), rep.classification, labels, *pure_cells, *mixed])
    return output.csv_text(SWEEP_HEADER, rows)


HANDLERS = {
    "roots": cmd_roots,
    "one-shot": cmd_one_shot,
    "stackelberg": cmd_stackelberg,
    "sensing-game": cmd_sensing_game,
    "two-player": cmd_two_player,
    "correlated-region": cmd_correlated_region,
    "hybrid-paradox": cmd_hybrid_paradox,
    "alpha-sweep": cmd_alpha_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="powersense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="write output here instead of stdout")
        if name in ("stackelberg", "two-player", "correlated-region", "hybrid-paradox"):
            p.add_argument("--alpha", type=float, help="sensing cost (overrides config)")
        if name == "correlated-region":
            p.add_argument("--angles", type=int, help="number of objective directions")
        if name == "hybrid-paradox":
            p.add_argument("--grid-size", type=int, help="power grid points")
        if name == "alpha-sweep":
            p.add_argument("--from", dest="start", type=float)
            p.add_argument("--to", dest="stop", type=float)
            p.add_argument("--steps", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = RunConfig.load(args.config)
        if getattr(args, "alpha", None) is not None and not 0 <= args.alpha < 1:
            raise ConfigError("--alpha must lie in [0, 1)")
        text = HANDLERS[args.command](args, rc)
    except InfeasibleError as exc:
        print(f"infeasible: {exc} [violated: {exc.condition}]", file=sys.stderr)
        return 2
    except (ConfigError, PowerSenseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
