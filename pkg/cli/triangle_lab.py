# ============================================================================
# TRIANGLE LAB COMMAND LINE
# ============================================================================

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from backend.averaging_operator import (apply_T, divergence_levels, majorization_check, maximal_region,
                                        maximal_T)
from backend.decomposition import (banach_region_contains, critical_exponent, norm_table, region_contains,
                                   spherical_improving_contains, summability_threshold, volume_ratio_table)
from backend.exact_hull import exponent_reciprocal
from backend.surface_measure import decay_bound, decay_fit, mu_hat_closed, mu_hat_mc, standard_rays
from models.data_models import (DecayDirection, FrequencyPair, MaximalGrid, QuadratureMethod, QuadratureSpec,
                                RunConfig)
from models.exceptions import DimensionError, DomainError, FitError
from models.test_functions import parse_test_function
from reports.report_writer import Report, save_report
from workers.verification_runner import VerificationRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_DOMAIN = 2
EXIT_FIT = 3

_SLOPE_SLACK = 0.3
_VOLUME_BAND = 4.0


# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def parse_vector(text: str, d: int, label: str = "vector") -> np.ndarray:
    """Comma-separated reals with exactly d entries"""
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as e:
        raise DomainError(f"{label}: cannot read {text!r} as comma-separated reals") from e
    if len(values) != d:
        raise DomainError(f"{label} has {len(values)} entries, expected d={d}")
    vector = np.array(values)
    if not np.all(np.isfinite(vector)):
        raise DomainError(f"{label} must be finite")
    return vector


def parse_range(text: str) -> List[int]:
    """'3..6' (inclusive), '0,1,2' or a single integer"""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(part) for part in text.split(",")]
    except ValueError as e:
        raise DomainError(f"cannot read index range {text!r}") from e


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", "--dimension", type=int, default=5, help="ambient dimension d")
    common.add_argument("--seed", type=int, default=42, help="seed for every random stream")
    common.add_argument("--format", dest="output_format", choices=("csv", "json"), default="json")
    common.add_argument("--out", type=Path, default=None, help="report path (stdout when omitted)")
    tier = common.add_mutually_exclusive_group()
    tier.add_argument("--fast", dest="tier", action="store_const", const="fast", default="fast",
                      help="reduced sample counts (default)")
    tier.add_argument("--full", dest="tier", action="store_const", const="full", help="full sample counts")
    common.add_argument("--workers", type=int, default=None, help="threads for grid evaluations")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    quad = common.add_argument_group("quadrature")
    defaults = QuadratureSpec()
    quad.add_argument("--n-outer", type=int, default=defaults.n_outer)
    quad.add_argument("--n-inner", type=int, default=defaults.n_inner)
    quad.add_argument("--n-radial", type=int, default=defaults.n_radial)
    quad.add_argument("--n-samples", type=int, default=defaults.n_samples)
    quad.add_argument("--grading-depth", type=int, default=defaults.grading_depth)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="triangle-lab",
                                     description="Numerical lab for the triangle averaging operator")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("mu-hat", parents=[common], help="evaluate the Fourier transform of the measure")
    p.add_argument("--xi", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--method", choices=("closed", "mc", "both"), default="both")

    p = commands.add_parser("decay", parents=[common], help="envelope decay fit along a ray")
    p.add_argument("--ray", choices=("axis", "orthogonal", "parallel", "all"), default="all")
    p.add_argument("--xi", default=None, help="custom xi direction (overrides --ray)")
    p.add_argument("--eta", default=None, help="custom eta direction")
    p.add_argument("--ratio", type=float, default=1.0, help="|eta| / |xi| along a custom ray")
    p.add_argument("--n-radii", type=int, default=30)
    p.add_argument("--r-min", type=float, default=2.0)
    p.add_argument("--r-max", type=float, default=200.0)

    p = commands.add_parser("decompose", parents=[common], help="summed norm bounds of the pieces")
    p.add_argument("--i-max", type=int, default=12)

    p = commands.add_parser("volume", parents=[common], help="support volumes against the dyadic law")
    p.add_argument("--i", dest="scales", default="3..6")
    p.add_argument("--j", dest="ratio_scales", default="0..2")
    p.add_argument("--k", dest="angle_scales", default="0..2")
    p.add_argument("--mc", dest="n_mc", type=int, default=0, help="Monte Carlo samples per index (0: exact only)")

    p = commands.add_parser("region", parents=[common], help="exponent region membership")
    p.add_argument("-p", required=True)
    p.add_argument("-q", required=True)
    p.add_argument("-r", default=None, help="defaults to the Hölder exponent")
    p.add_argument("-s", default=None, help="target exponent of the single spherical average")

    for name, help_text in (("apply", "evaluate T_t(f, g)(x)"), ("maximal", "maximal operator over a t-grid")):
        p = commands.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--f", required=True, help="test function, e.g. gaussian(0;1)")
        p.add_argument("--g", required=True, help="test function, e.g. const(1)")
        p.add_argument("--x", required=True, help="evaluation point")
        if name == "apply":
            p.add_argument("--method", choices=("product", "mc", "both"), default="product")
            p.add_argument("--t", type=float, default=1.0)
        else:
            p.add_argument("--method", choices=("product", "mc"), default="product")
            p.add_argument("--t-min", type=float, default=0.5)
            p.add_argument("--t-max", type=float, default=2.0)
            p.add_argument("--n-t", type=int, default=33)
            p.add_argument("--anchor", type=float, default=None)
            p.add_argument("--divergence", action="store_true",
                           help="repeat on refined grids with deeper grading")

    commands.add_parser("verify", parents=[common], help="run the acceptance checks")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    quadrature = QuadratureSpec(n_outer=args.n_outer, n_inner=args.n_inner, n_radial=args.n_radial,
                                seed=args.seed, n_samples=args.n_samples, grading_depth=args.grading_depth)
    return RunConfig(dimension=args.dimension, seed=args.seed, quadrature=quadrature, output_path=args.out,
                     output_format=args.output_format, tier=args.tier)


def _require_dimension(command: str, d: int, minimum: int):
    if d < minimum:
        raise DimensionError(command, d, minimum)


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_mu_hat(config: RunConfig, xi: str, eta: str, method: str = "both") -> Report:
    d = config.dimension
    _require_dimension("mu-hat", d, 3)
    fp = FrequencyPair(parse_vector(xi, d, "xi"), parse_vector(eta, d, "eta"))
    bound = decay_bound(fp, d)
    report = Report(command="mu-hat", config=config,
                    inputs={"xi": fp.xi.tolist(), "eta": fp.eta.tolist(), "method": method})
    closed = None
    if method in ("closed", "both"):
        closed = mu_hat_closed(fp)
        report.results.append({"method": "closed", "real": closed, "imag": 0.0, "se": 0.0,
                               "decay_bound": bound, "ratio": abs(closed) / bound})
    if method in ("mc", "both"):
        estimate = mu_hat_mc(fp, config.quadrature.n_samples, config.seed)
        report.results.append({"method": "monte_carlo", "real": estimate.value.real, "imag": estimate.value.imag,
                               "se": estimate.se, "decay_bound": bound, "ratio": abs(estimate.value) / bound})
        if closed is not None:
            gap = abs(estimate.value.real - closed)
            report.add_check("methods_agree", gap <= 3.0 * estimate.se_real + 1e-12, difference=gap,
                             se=estimate.se_real)
    return report


def _rays(config: RunConfig, ray: str, xi: Optional[str], eta: Optional[str], ratio: float):
    d = config.dimension
    if xi is not None or eta is not None:
        if xi is None or eta is None:
            raise DomainError("a custom ray needs both --xi and --eta")
        xi_dir = parse_vector(xi, d, "xi")
        eta_dir = parse_vector(eta, d, "eta")
        for label, vector in (("xi", xi_dir), ("eta", eta_dir)):
            if np.linalg.norm(vector) == 0:
                raise DomainError(f"{label} direction must be nonzero")
        direction = DecayDirection(tuple(xi_dir / np.linalg.norm(xi_dir)),
                                   tuple(eta_dir / np.linalg.norm(eta_dir)), ratio, "custom")
        return [(direction, None)]
    rays = standard_rays(d)
    return rays if ray == "all" else [(direction, expected) for direction, expected in rays
                                      if direction.name == ray]


def cmd_decay(config: RunConfig, ray: str = "all", xi: Optional[str] = None, eta: Optional[str] = None,
              ratio: float = 1.0, n_radii: int = 30, r_min: float = 2.0, r_max: float = 200.0) -> Report:
    _require_dimension("decay", config.dimension, 3)
    report = Report(command="decay", config=config,
                    inputs={"ray": ray, "xi": xi, "eta": eta, "ratio": ratio, "n_radii": n_radii,
                            "r_min": r_min, "r_max": r_max})
    for direction, expected in _rays(config, ray, xi, eta, ratio):
        fit = decay_fit(direction, n_radii=n_radii, r_min=r_min, r_max=r_max)
        report.results.append({"ray": direction.name, "slope": fit.slope, "bound_slope": fit.bound_slope,
                               "residual": fit.residual, "expected": expected})
        report.rows.extend({"ray": direction.name, **row} for row in fit.rows())
        if expected is not None:
            report.add_check(f"decay_slope {direction.name}", fit.slope <= expected + _SLOPE_SLACK,
                             slope=fit.slope, expected=expected)
    return report


def cmd_decompose(config: RunConfig, i_max: int = 12) -> Report:
    d = config.dimension
    table = norm_table(d, i_max)
    report = Report(command="decompose", config=config, inputs={"i_max": i_max})
    report.results.append({
        "geometric_ratio_log2": table.geometric_ratio_log2,
        "geometric_ratio": table.geometric_ratio,
        "observed_ratio": table.observed_ratio,
        "total": table.total,
        "divergent": table.divergent,
    })
    if d >= 5:
        report.results[0].update({"critical_exponent": critical_exponent(d),
                                  "summability_threshold": summability_threshold(d)})
    report.rows = [{"i": row.i, "summed": row.summed, "pieces": len(row.pieces),
                    "young_growth_log2": row.young_growth_log2} for row in table.rows]
    return report


def cmd_volume(config: RunConfig, scales: str = "3..6", ratio_scales: str = "0..2",
               angle_scales: str = "0..2", n_mc: int = 0) -> Report:
    d = config.dimension
    _require_dimension("volume", d, 2)
    rows = volume_ratio_table(d, parse_range(scales), parse_range(ratio_scales), parse_range(angle_scales),
                              n_mc=n_mc, seed=config.seed)
    report = Report(command="volume", config=config,
                    inputs={"i": scales, "j": ratio_scales, "k": angle_scales, "n_mc": n_mc}, rows=rows)
    if not rows:
        raise DomainError("no valid dyadic index in the requested ranges")
    for k in sorted({row["k"] for row in rows}):
        ratios = [row["ratio"] for row in rows if row["k"] == k]
        spread = max(ratios) / min(ratios)
        report.results.append({"k": k, "spread": spread, "indices": len(ratios)})
        report.add_check(f"volume_band k={k}", spread <= _VOLUME_BAND, spread=spread)
    return report


def cmd_region(config: RunConfig, p: str, q: str, r: Optional[str] = None, s: Optional[str] = None) -> Report:
    d = config.dimension
    _require_dimension("region", d, 2)
    inv_p, inv_q = exponent_reciprocal(p), exponent_reciprocal(q)
    if r is None:
        # Hölder scaling
        inv_r = inv_p + inv_q
        r = "inf" if inv_r == 0 else str(1 / inv_r)
    inv_r = exponent_reciprocal(r)
    result = {"p": p, "q": q, "r": r, "inv_p": inv_p, "inv_q": inv_q, "inv_r": inv_r,
              "holder_scaling": inv_r == inv_p + inv_q,
              "banach": banach_region_contains(d, p, q, r),
              "maximal": maximal_region(d).classify(p, q)}
    if d >= 5:
        result["inside"] = region_contains(d, p, q, r)
        result["critical_exponent"] = critical_exponent(d)
    else:
        result["inside"] = result["banach"]
    if s is not None:
        result["spherical_improving"] = spherical_improving_contains(d, p, s)
    return Report(command="region", config=config, inputs={"p": p, "q": q, "r": r, "s": s}, results=[result])


def _methods(config: RunConfig, method: str) -> List[QuadratureSpec]:
    product = replace(config.quadrature, method=QuadratureMethod.PRODUCT_SLICING)
    monte_carlo = replace(config.quadrature, method=QuadratureMethod.MONTE_CARLO)
    return {"product": [product], "mc": [monte_carlo], "both": [product, monte_carlo]}[method]


def cmd_apply(config: RunConfig, f: str, g: str, x: str, t: float = 1.0, method: str = "product") -> Report:
    d = config.dimension
    _require_dimension("apply", d, 3)
    f_fn, g_fn = parse_test_function(f, d), parse_test_function(g, d)
    point = parse_vector(x, d, "x")
    report = Report(command="apply", config=config,
                    inputs={"f": f_fn.to_spec(), "g": g_fn.to_spec(), "x": point.tolist(), "t": t,
                            "method": method})
    values = []
    for quad in _methods(config, method):
        result = apply_T(f_fn, g_fn, point, t, quad)
        values.append(result)
        report.results.append({"method": result.method, "value": result.value, "error": result.error,
                               "n_nodes": result.n_nodes})
    if len(values) == 2:
        gap = abs(values[0].value - values[1].value)
        report.add_check("methods_agree", gap <= 3.0 * (values[0].error + values[1].error) + 1e-12,
                         difference=gap)
    if g_fn.is_bounded:
        majorization = majorization_check(f_fn, g_fn, point, t, _methods(config, "product")[0])
        report.results.append({"method": "majorization", **majorization.to_dict()})
        report.add_check("majorization", majorization.holds, slack=majorization.slack)
    return report


def cmd_maximal(config: RunConfig, f: str, g: str, x: str, t_min: float = 0.5, t_max: float = 2.0,
                n_t: int = 33, anchor: Optional[float] = None, divergence: bool = False,
                method: str = "product", max_workers: Optional[int] = None) -> Report:
    d = config.dimension
    _require_dimension("maximal", d, 3)
    f_fn, g_fn = parse_test_function(f, d), parse_test_function(g, d)
    point = parse_vector(x, d, "x")
    grid = MaximalGrid(t_min, t_max, n_t, anchor)
    quad = _methods(config, "mc" if method == "mc" else "product")[0]
    report = Report(command="maximal", config=config,
                    inputs={"f": f_fn.to_spec(), "g": g_fn.to_spec(), "x": point.tolist(),
                            "grid": grid.to_dict(), "divergence": divergence, "method": quad.method.value})

    def progress(percent: int, message: str):
        logger.debug("[%3d%%] %s", percent, message)

    evaluation = maximal_T(f_fn, g_fn, point, grid, quad, max_workers=max_workers, progress=progress)
    report.results.append({"value": evaluation.value, "t_star": evaluation.t_star})
    report.rows = evaluation.rows()
    if divergence:
        levels = divergence_levels(f_fn, g_fn, point, grid, quad, max_workers=max_workers)
        report.results.append(levels.to_dict())
        report.add_check("divergence", levels.diverges, values=[level.value for level in levels.levels])
    return report


def cmd_verify(config: RunConfig, max_workers: Optional[int] = None) -> Report:
    _require_dimension("verify", config.dimension, 3)

    def progress(percent: int, message: str):
        logger.info("[%3d%%] %s", percent, message)

    return VerificationRunner(config, progress=progress, max_workers=max_workers).run()


# ============================================================================
# ENTRY POINT
# ============================================================================

def _run(args: argparse.Namespace, config: RunConfig) -> Report:
    if args.command == "mu-hat":
        return cmd_mu_hat(config, args.xi, args.eta, args.method)
    if args.command == "decay":
        return cmd_decay(config, args.ray, args.xi, args.eta, args.ratio, args.n_radii, args.r_min, args.r_max)
    if args.command == "decompose":
        return cmd_decompose(config, args.i_max)
    if args.command == "volume":
        return cmd_volume(config, args.scales, args.ratio_scales, args.angle_scales, args.n_mc)
    if args.command == "region":
        return cmd_region(config, args.p, args.q, args.r, args.s)
    if args.command == "apply":
        return cmd_apply(config, args.f, args.g, args.x, args.t, args.method)
    if args.command == "maximal":
        return cmd_maximal(config, args.f, args.g, args.x, args.t_min, args.t_max, args.n_t, args.anchor,
                           args.divergence, args.method, args.workers)
    return cmd_verify(config, args.workers)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command, write its report; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        config = config_from_args(args)
        report = _run(args, config)
    except FitError as e:
        logger.error("✗ Fit failed: %s", e)
        return EXIT_FIT
    except DomainError as e:
        logger.error("✗ %s", e)
        return EXIT_DOMAIN
    except Exception as e:
        logger.exception("✗ Unexpected error: %s", e)
        return EXIT_FAILED

    if not save_report(report, config.output_path, config.output_format):
        return EXIT_FAILED
    if args.command == "verify" and not report.passed:
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
