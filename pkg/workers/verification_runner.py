# ============================================================================
# VERIFICATION RUNNER
# ============================================================================

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, List, Optional

import numpy as np

from backend.averaging_operator import (apply_T, apply_T_fourier, divergence_levels, fit_maximal_decay,
                                        majorization_check, spherical_average)
from backend.decomposition import (DEFAULT_PROFILE, critical_exponent, norm_table, phi,
                                   piece_weight, region_contains, summability_threshold, support_volume,
                                   theorem_vertices, volume_ratio_table)
from backend.special_functions import sphere_ft
from backend.sphere_geometry import make_rng
from backend.surface_measure import (calibrate_constant, decay_bound, decay_fit, mu_hat_closed,
                                     mu_hat_closed_batch, mu_hat_mc, standard_rays)
from models.data_models import (DyadicIndex, FrequencyBatch, FrequencyPair, MaximalGrid, QuadratureMethod,
                                RunConfig)
from models.test_functions import TestFunction
from reports.report_writer import Report
from workers.grid_worker import ProgressCallback

logger = logging.getLogger(__name__)

# Tolerances of the fast tier grow by sqrt(full samples / fast samples).
_SIGMAS = 3.0
_REDUCTION_TOL = 1e-6
_PARTITION_TOL = 1e-9
_RECONSTRUCTION_TOL = 1e-8
_SLOPE_SLACK = 0.3
_CALIBRATION_SLACK = 0.05
_VOLUME_BAND = 4.0
_FOURIER_REL_TOL = 0.01
_MAXIMAL_REL_TOL = 0.2


@dataclass(frozen=True)
class VerificationTier:
    """Sample sizes of one verification tier"""
    name: str
    mc_points: int
    mc_samples: int
    bound_points: int
    partition_points: int
    volume_samples: int
    operator_cases: int
    operator_samples: int
    fourier_samples: int
    maximal_radii: int
    exceedances_allowed: int
    widen: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mc_points": self.mc_points,
            "mc_samples": self.mc_samples,
            "bound_points": self.bound_points,
            "partition_points": self.partition_points,
            "volume_samples": self.volume_samples,
            "operator_cases": self.operator_cases,
            "operator_samples": self.operator_samples,
            "fourier_samples": self.fourier_samples,
            "maximal_radii": self.maximal_radii,
            "exceedances_allowed": self.exceedances_allowed,
            "widen": self.widen,
        }


FULL_TIER = VerificationTier(name="full", mc_points=50, mc_samples=1_000_000, bound_points=500,
                             partition_points=1000, volume_samples=100_000, operator_cases=20,
                             operator_samples=200_000, fourier_samples=400_000, maximal_radii=7,
                             exceedances_allowed=1, widen=1.0)
FAST_TIER = VerificationTier(name="fast", mc_points=10, mc_samples=100_000, bound_points=100,
                             partition_points=200, volume_samples=20_000, operator_cases=5,
                             operator_samples=20_000, fourier_samples=50_000, maximal_radii=4,
                             exceedances_allowed=0, widen=math.sqrt(10.0))
TIERS = {"fast": FAST_TIER, "full": FULL_TIER}


def stream_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit seed for one check (and one case within it)"""
    state = np.random.SeedSequence([int(seed), *[int(k) for k in keys]]).generate_state(1, np.uint64)
    return int(state[0])


def _exponent(reciprocal: Fraction):
    return "inf" if reciprocal == 0 else 1 / reciprocal


class VerificationRunner:
    """
    Runs the numerical acceptance checks and collects them in one Report.
    A check that raises is recorded as failed, the remaining checks still run.
    """

    def __init__(self, config: RunConfig, progress: Optional[ProgressCallback] = None,
                 max_workers: Optional[int] = None):
        self.config = config
        self.tier = TIERS[config.tier]
        self.progress = progress
        self.max_workers = max_workers
        self.report = Report(command="verify", config=config, inputs={"tier": self.tier.to_dict()})

    @property
    def checks(self) -> List[Callable[[], None]]:
        return [
            self.check_monte_carlo_oracle,
            self.check_single_sphere_reduction,
            self.check_decay_slopes,
            self.check_decay_bound,
            self.check_partition,
            self.check_volume_law,
            self.check_exponent_arithmetic,
            self.check_operator_identities,
            self.check_fourier_consistency,
            self.check_maximal_counterexample,
            self.check_determinism,
        ]

    def run(self) -> Report:
        checks = self.checks
        for n, check in enumerate(checks):
            name = check.__name__[len("check_"):]
            self._emit(int(100 * n / len(checks)), f"running {name}")
            try:
                check()
            except Exception as e:
                logger.error("✗ %s raised: %s", name, e)
                self.report.add_check(name, False, error=f"{type(e).__name__}: {e}")
        self._emit(100, "verification finished")
        failed = [c["name"] for c in self.report.checks if not c["passed"]]
        if failed:
            logger.warning("⚠️ %d check(s) failed: %s", len(failed), ", ".join(failed))
        else:
            logger.info("✓ all %d checks passed (%s tier)", len(self.report.checks), self.tier.name)
        return self.report

    def _emit(self, percent: int, message: str):
        if self.progress is not None:
            self.progress(percent, message)

    def _rng(self, check: int, *keys: int) -> np.random.Generator:
        return make_rng(stream_seed(self.config.seed, check, *keys))

    @property
    def _product_quad(self):
        return replace(self.config.quadrature, method=QuadratureMethod.PRODUCT_SLICING)

    # ------------------------------------------------------------------
    # Surface measure
    # ------------------------------------------------------------------

    def check_monte_carlo_oracle(self):
        """Closed form against the Monte Carlo mean at random frequencies, d in {3, 5}"""
        tol = _SIGMAS * self.tier.widen
        for d in (3, 5):
            rng = self._rng(1, d)
            norms = rng.uniform(0.0, 10.0, size=(self.tier.mc_points, 2))
            thetas = rng.uniform(0.0, math.pi, size=self.tier.mc_points)
            exceed = 0
            worst = 0.0
            for n in range(self.tier.mc_points):
                fp = FrequencyPair.from_angle(norms[n, 0], norms[n, 1], thetas[n], d)
                closed = mu_hat_closed(fp)
                estimate = mu_hat_mc(fp, self.tier.mc_samples, stream_seed(self.config.seed, 1, d, n))
                sigmas = abs(estimate.value.real - closed) / max(estimate.se_real, 1e-300)
                worst = max(worst, sigmas)
                if sigmas > tol or abs(estimate.value.imag) > (tol + 1.0) * max(estimate.se_imag, 1e-300):
                    exceed += 1
            self.report.results.append({"check": "monte_carlo_oracle", "d": d, "points": self.tier.mc_points,
                                        "samples": self.tier.mc_samples, "exceedances": exceed,
                                        "worst_sigmas": worst})
            self.report.add_check(f"monte_carlo_oracle d={d}", exceed <= self.tier.exceedances_allowed,
                                  exceedances=exceed, worst_sigmas=worst, tolerance_sigmas=tol)

    def check_single_sphere_reduction(self):
        """eta = 0 collapses mu_hat to the sphere transform"""
        radii = np.linspace(0.0, 20.0, 201)
        for d in (3, 4, 5):
            xi = np.zeros((radii.size, d))
            xi[:, 0] = radii
            batch = FrequencyBatch.from_vectors(xi, np.zeros_like(xi))
            err = float(np.max(np.abs(mu_hat_closed_batch(batch) - sphere_ft(d - 1, radii))))
            self.report.results.append({"check": "single_sphere_reduction", "d": d, "max_error": err})
            self.report.add_check(f"single_sphere_reduction d={d}", err <= _REDUCTION_TOL, max_error=err)

    def check_decay_slopes(self):
        d = self.config.dimension
        for direction, expected in standard_rays(d):
            fit = decay_fit(direction)
            self.report.results.append({"check": "decay_slopes", "d": d, "ray": direction.name,
                                        "slope": fit.slope, "expected": expected,
                                        "bound_slope": fit.bound_slope, "residual": fit.residual})
            self.report.add_check(f"decay_slope {direction.name} d={d}", fit.slope <= expected + _SLOPE_SLACK,
                                  slope=fit.slope, expected=expected)

    def check_decay_bound(self):
        """Calibrate C on the lattice, then test |mu_hat| <= C * bound at fresh random points"""
        d = self.config.dimension
        constant = calibrate_constant(d)
        rng = self._rng(4)
        n = self.tier.bound_points
        batch = FrequencyBatch.from_angles(rng.uniform(0.0, 10.0, n), rng.uniform(0.0, 10.0, n),
                                           rng.uniform(0.0, math.pi, n), d)
        ratios = np.abs(mu_hat_closed_batch(batch)) / decay_bound(batch, d)
        worst = float(np.max(ratios))
        self.report.results.append({"check": "decay_bound", "d": d, "constant": constant,
                                    "validation_max": worst, "points": n})
        self.report.add_check(f"decay_bound d={d}", worst <= constant * (1.0 + _CALIBRATION_SLACK),
                              constant=constant, validation_max=worst)

    # ------------------------------------------------------------------
    # Decomposition
    # ------------------------------------------------------------------

    def _annulus_batch(self, rng: np.random.Generator, lo: float, hi: float, n: int) -> FrequencyBatch:
        joint = rng.uniform(lo, hi, n)
        split = rng.uniform(0.0, 0.5 * math.pi, n)
        return FrequencyBatch.from_angles(joint * np.cos(split), joint * np.sin(split),
                                          rng.uniform(0.0, math.pi, n), self.config.dimension)

    def check_partition(self):
        """Pieces of scale i sum to phi_i * mu_hat; all scales up to J rebuild mu_hat"""
        n = self.tier.partition_points
        worst = 0.0
        for i in range(1, 7):
            batch = self._annulus_batch(self._rng(5, i), 2.0 ** (i - 1), 2.0 ** (i + 1), n)
            mu = mu_hat_closed_batch(batch)
            pieces = sum(piece_weight(idx, batch, DEFAULT_PROFILE) for idx in DyadicIndex.for_scale(i))
            worst = max(worst, float(np.max(np.abs(mu * pieces - mu * phi(i, batch, DEFAULT_PROFILE)))))
        self.report.add_check("partition_per_scale", worst <= _PARTITION_TOL, max_error=worst)

        J = 6
        batch = self._annulus_batch(self._rng(5, 0), 0.0, 2.0 ** (J - 1), n)
        mu = mu_hat_closed_batch(batch)
        total = sum(piece_weight(idx, batch, DEFAULT_PROFILE)
                    for i in range(J + 1) for idx in DyadicIndex.for_scale(i))
        err = float(np.max(np.abs(mu * total - mu)))
        self.report.results.append({"check": "partition", "per_scale_error": worst, "reconstruction_error": err,
                                    "points": n, "scales": J})
        self.report.add_check("partition_reconstruction", err <= _RECONSTRUCTION_TOL, max_error=err)

    def check_volume_law(self):
        """
        Support volumes follow 2^(id) 2^((i-j)d) 2^(-k(d-1)) up to a constant for each k.
        Across k the constant drifts, so the band is checked per angular scale.
        """
        d = self.config.dimension
        rows = volume_ratio_table(d, range(3, 7), range(0, 3), range(0, 3))
        mc_ok = True
        for row in rows:
            estimate, se = support_volume((row["i"], row["j"], row["k"]), d, self.tier.volume_samples,
                                          stream_seed(self.config.seed, 6))
            row.update({"mc_volume": estimate, "mc_se": se})
            if abs(estimate - row["volume"]) > (_SIGMAS + 1.0) * se:
                mc_ok = False
        spreads = {}
        for k in sorted({row["k"] for row in rows}):
            ratios = [row["ratio"] for row in rows if row["k"] == k]
            spreads[k] = max(ratios) / min(ratios)
        overall = max(row["ratio"] for row in rows) / min(row["ratio"] for row in rows)
        self.report.rows.extend(rows)
        self.report.results.append({"check": "volume_law", "d": d, "spread_per_k": spreads,
                                    "spread_across_k": overall})
        self.report.add_check(f"volume_law d={d}", all(s <= _VOLUME_BAND for s in spreads.values()),
                              spread_per_k=spreads)
        self.report.add_check(f"volume_monte_carlo d={d}", mc_ok)

    def check_exponent_arithmetic(self):
        ok = norm_table(5, 40).geometric_ratio_log2 == Fraction(-1, 4) and norm_table(4, 20).divergent
        observed = {}
        for d in (6, 8):
            table = norm_table(d, 60)
            observed[d] = table.observed_ratio / table.geometric_ratio
            ok = ok and abs(observed[d] - 1.0) <= 0.01
        ok = ok and critical_exponent(5) == Fraction(25, 13)
        ok = ok and all(summability_threshold(d) == critical_exponent(d) for d in range(5, 13))
        ok = ok and all(region_contains(5, *(_exponent(c) for c in vertex)) for vertex in theorem_vertices(5))
        ok = ok and not region_contains(5, Fraction(3, 2), Fraction(3, 2), Fraction(3, 4))
        self.report.results.append({"check": "exponent_arithmetic", "ratio_over_geometric": observed})
        self.report.add_check("exponent_arithmetic", ok, ratio_over_geometric=observed)

    # ------------------------------------------------------------------
    # Averaging operator
    # ------------------------------------------------------------------

    def _random_gaussian(self, rng: np.random.Generator, d: int) -> TestFunction:
        return TestFunction.gaussian(tuple(0.5 * rng.standard_normal(d)), float(rng.uniform(0.5, 1.5)))

    def check_operator_identities(self):
        quad = self._product_quad
        tol = _SIGMAS * self.tier.widen
        one = TestFunction.constant(1.0)
        unit = apply_T(one, one, np.zeros(3), 1.0, quad)
        self.report.add_check("operator_constant", abs(unit.value - 1.0) <= 1e-8, value=unit.value)

        exceed = 0
        reduction = 0.0
        asymmetry = 0.0
        majorized = True
        for n in range(self.tier.operator_cases):
            d = 3 if n % 2 == 0 else 5
            rng = self._rng(8, n)
            f = self._random_gaussian(rng, d)
            g = self._random_gaussian(rng, d)
            x = 0.5 * rng.standard_normal(d)
            t = float(rng.uniform(0.5, 1.5))
            product = apply_T(f, g, x, t, quad)
            mc_quad = replace(quad, method=QuadratureMethod.MONTE_CARLO, n_samples=self.tier.operator_samples,
                              seed=stream_seed(self.config.seed, 8, n))
            estimate = apply_T(f, g, x, t, mc_quad)
            if abs(estimate.value - product.value) > tol * math.hypot(estimate.error, product.error):
                exceed += 1
            swapped = apply_T(g, f, x, t, quad)
            asymmetry = max(asymmetry, abs(swapped.value - product.value) - 3.0 * (swapped.error + product.error))
            reduction = max(reduction, abs(apply_T(f, one, x, t, quad).value - spherical_average(f, x, t, quad).value))
            majorized = majorized and majorization_check(f, g, x, t, quad).holds
            self.report.results.append({"check": "operator_identities", "case": n, "d": d, "f": f.to_spec(),
                                        "g": g.to_spec(), "x": x, "t": t, "product": product.value,
                                        "product_error": product.error, "monte_carlo": estimate.value,
                                        "monte_carlo_se": estimate.error})
        self.report.add_check("operator_monte_carlo", exceed <= self.tier.exceedances_allowed, exceedances=exceed)
        self.report.add_check("operator_exchange_symmetry", asymmetry <= 1e-10, excess=asymmetry)
        self.report.add_check("operator_spherical_reduction", reduction <= 1e-10, max_error=reduction)
        self.report.add_check("operator_majorization", majorized)

    def check_fourier_consistency(self):
        """
        Product rule against the frequency side, d = 3: the centered gaussian(0; 2) pair at the origin,
        then an off-center pair at |x| = 0.7, t = 1.3 where the phase and the dilation both matter
        """
        centered = TestFunction.gaussian((), 2.0)
        cases = (
            ("origin", centered, centered, np.zeros(3), 1.0),
            ("off_center", TestFunction.gaussian((0.3, 0.0, -0.2), 2.5),
             TestFunction.gaussian((-0.1, 0.25, 0.1), 3.0), 0.7 * np.array([0.48, -0.6, 0.64]), 1.3),
        )
        products = {}
        for case, (label, f, g, x, t) in enumerate(cases):
            product = apply_T(f, g, x, t, self._product_quad)
            spectral = apply_T_fourier(f, g, x, t, n_samples=self.tier.fourier_samples,
                                       seed=stream_seed(self.config.seed, 9, case))
            tolerance = max(_FOURIER_REL_TOL * abs(product.value), _SIGMAS * self.tier.widen * spectral.se_real)
            products[label] = product.value
            difference = abs(spectral.value.real - product.value)
            self.report.results.append({"check": "fourier_consistency", "case": label, "f": f.to_spec(),
                                        "g": g.to_spec(), "x": x.tolist(), "t": t, "product": product.value,
                                        "product_error": product.error, "fourier": spectral.value,
                                        "fourier_se": spectral.se})
            self.report.add_check(f"fourier_consistency {label}", difference <= tolerance, difference=difference,
                                  tolerance=tolerance)
            imaginary_tolerance = (_SIGMAS + 1.0) * self.tier.widen * spectral.se_imag
            imaginary = abs(spectral.value.imag)
            self.report.add_check(f"fourier_imaginary_part {label}", imaginary <= imaginary_tolerance,
                                  imaginary=spectral.value.imag, tolerance=imaginary_tolerance)
        exact = math.exp(-0.5 * math.pi)
        self.report.add_check("fourier_exact_value", abs(products["origin"] - exact) <= 1e-8,
                              product=products["origin"])

    def check_maximal_counterexample(self):
        """
        d = 3, p = 1.4, q = 4 lies outside the necessary square: refined grids at x = 10 e1
        must exceed the threshold and keep growing. p = q = 4 must decay at -d(1 + 1/q - 1/p).
        """
        d = 3
        f = TestFunction.counterexample_f(d, 1.4)
        g = TestFunction.counterexample_g(d, 4.0)
        x = np.zeros(d)
        x[0] = 10.0
        quad = self._product_quad
        divergence = divergence_levels(f, g, x, MaximalGrid(5.0, 20.0, 5, anchor=10.0), quad,
                                       max_workers=self.max_workers)
        self.report.results.append({"check": "maximal_divergence", **divergence.to_dict()})
        self.report.add_check("maximal_divergence", divergence.diverges,
                              values=[level.value for level in divergence.levels])

        radii = np.geomspace(10.0, 100.0, self.tier.maximal_radii)
        fit = fit_maximal_decay(d, 4.0, 4.0, radii, quad, max_workers=self.max_workers)
        self.report.results.append({"check": "maximal_decay", "slope": fit.slope, "expected": fit.expected,
                                    "relative_error": fit.relative_error})
        self.report.add_check("maximal_decay", fit.relative_error <= _MAXIMAL_REL_TOL, slope=fit.slope,
                              expected=fit.expected)

    def check_determinism(self):
        """Seeded Monte Carlo paths repeat bit for bit"""
        fp = FrequencyPair.from_angle(3.0, 2.0, 1.0, 3)
        seed = stream_seed(self.config.seed, 11)
        first = mu_hat_mc(fp, 10_000, seed)
        second = mu_hat_mc(fp, 10_000, seed)
        f = TestFunction.gaussian((0.2, 0.0, 0.0), 1.0)
        quad = replace(self.config.quadrature, method=QuadratureMethod.MONTE_CARLO, n_samples=10_000, seed=seed)
        a = apply_T(f, f, np.zeros(3), 1.0, quad)
        b = apply_T(f, f, np.zeros(3), 1.0, quad)
        self.report.add_check("determinism", first == second and a == b)
