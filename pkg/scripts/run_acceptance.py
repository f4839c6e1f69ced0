#!/usr/bin/env python3
"""
Script to run the full-size acceptance sweep

Each criterion fills a SuiteReport; the combined report is written to
reports/acceptance.json and the exit code is 3 when any contract fails.
"""
import os
import sys
import argparse
import time

import numpy as np

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dotenv import load_dotenv

load_dotenv(".env.local")
load_dotenv(".env")

from config.harness_config import DEFAULT_SEED
from cli.report import dumps
from spaces.measure_space import RealFunction, pairing, random_function, random_functional, random_space, to_function
from spaces.norms import SpaceModel, amemiya_norm, dual_norm, holder_check, kkt_point, luxemburg_norm, norm
from spaces.norms import orlicz_norm, orlicz_norm_by_ascent
from spaces.young import conjugate, delta2_constant, mcshane_check, power_young, rho_estimate
from services.convexity import hilbert_modulus, maximizing_sequence_experiment, modulus_estimate
from services.duality import (
    central_difference,
    duality_map,
    mazur_inverse,
    mazur_map,
    norm_gradient,
    reflexivity_witness,
    second_dual_action,
)
from services.verification import SuiteParams, SuiteReport, verify_extension
from utils.logger import setup_logger
from utils.validators import conjugate_exponent

logger = setup_logger("acceptance")

EXPONENTS = (1.5, 2.0, 3.0, 4.0)


def _models(space, p):
    return [SpaceModel.lebesgue(space, p), SpaceModel.orlicz(space, power_young(p, normalized=False))]


def duality_round_trip(rng) -> SuiteReport:
    report = SuiteReport("duality_round_trip")
    for n in (2, 8, 64):
        space = random_space(n, rng)
        models = [SpaceModel.hilbert(space)] + [m for p in EXPONENTS for m in _models(space, p)]
        for model in models:
            forward, backward = [], []
            for _ in range(100):
                forward.append(duality_map(model, random_functional(space, rng)).residual)
                x = random_function(space, rng)
                x = x / norm(model, x)
                gap = duality_map(model, norm_gradient(model, x)).point - x
                backward.append(0.0 if gap.is_zero() else norm(model, gap))
            report.at_most(f"dual[{model.describe()}]", forward, 1e-7)
            report.at_most(f"primal[{model.describe()}]", backward, 1e-7)
    return report


def conjugation_closed_form(rng) -> SuiteReport:
    report = SuiteReport("conjugation_closed_form")
    grid = np.linspace(-4.0, 4.0, 100)
    for p in (1.5, 2.0, 3.0):
        q = conjugate_exponent(p)
        report.at_most(f"p={p:g}", np.abs(conjugate(power_young(p), grid) - np.abs(grid) ** q / q), 1e-8)
    return report


def luxemburg_closed_form(rng) -> SuiteReport:
    report = SuiteReport("luxemburg_closed_form")
    space = random_space(16, rng)
    for p in EXPONENTS:
        lebesgue, orlicz = _models(space, p)
        errors = []
        for _ in range(1000):
            f = random_function(space, rng, scale=float(np.exp(rng.uniform(-3.0, 3.0))))
            exact = norm(lebesgue, f)
            errors.append(abs(luxemburg_norm(orlicz, f) - exact) / exact)
        report.at_most(f"p={p:g}", errors, 1e-10)
    return report


def orlicz_cross_check(rng) -> SuiteReport:
    report = SuiteReport("orlicz_cross_check")
    spread = []
    for _ in range(200):
        space = random_space(int(rng.integers(2, 17)), rng)
        model = SpaceModel.orlicz(space, power_young(float(rng.choice(EXPONENTS)), normalized=False))
        g = random_functional(space, rng)
        kkt = orlicz_norm(model, g)
        others = np.array([amemiya_norm(model, g), orlicz_norm_by_ascent(model, g, rng)])
        spread.append(float(np.max(np.abs(others - kkt))) / max(1.0, kkt))
    report.at_most("kkt_amemiya_ascent", spread, 1e-6)
    return report


def holder_inequality(rng) -> SuiteReport:
    report = SuiteReport("holder_inequality")
    space = random_space(16, rng)
    model = SpaceModel.orlicz(space, power_young(3.0, normalized=False))
    slack, extremal = [], []
    for _ in range(1000):
        f, g = random_function(space, rng), random_functional(space, rng)
        slack.append(holder_check(model, f, g))
    for _ in range(100):
        g = random_functional(space, rng)
        h, _ = kkt_point(model, g)
        extremal.append(abs(holder_check(model, RealFunction(h, space), g)))
    report.at_least("slack", slack, -1e-9)
    report.at_most("equality", extremal, 1e-6)
    return report


def gradient_finite_differences(rng) -> SuiteReport:
    report = SuiteReport("gradient_finite_differences")
    space = random_space(8, rng)
    models = [SpaceModel.hilbert(space)] + [m for p in (1.5, 3.0) for m in _models(space, p)]
    for model in models:
        errors = []
        for _ in range(500):
            x, u = random_function(space, rng), random_function(space, rng)
            slope = pairing(space, norm_gradient(model, x), u)
            errors.append(abs(central_difference(model, x / norm(model, x), u) - slope)
                          / max(abs(slope), norm(model, u)))
        report.at_most(model.describe(), errors, 1e-6)
    return report


def hahn_banach(rng) -> SuiteReport:
    report = verify_extension(SuiteParams(n=8, p=3.0, trials=100, seed=int(rng.integers(2**31))))
    report.module = "hahn_banach"
    return report


def reflexivity(rng) -> SuiteReport:
    report = SuiteReport("reflexivity")
    space = random_space(16, rng)
    for model in (SpaceModel.hilbert(space), SpaceModel.lebesgue(space, 3.0)):
        defects = []
        for _ in range(100):
            phi = random_functional(space, rng)
            x = reflexivity_witness(model, phi)
            probe = random_functional(space, rng)
            scale = max(1.0, dual_norm(model, probe) * norm(model, to_function(phi)))
            defects.append(abs(second_dual_action(phi, probe) - pairing(space, probe, x)) / scale)
        report.at_most(model.describe(), defects, 1e-7)
    return report


def mcshane(rng) -> SuiteReport:
    report = SuiteReport("mcshane")
    P = power_young(3.0)
    for eps in (0.1, 0.5, 0.9):
        rho = rho_estimate(P, eps)
        u = rng.standard_normal(100_000) * np.exp(rng.uniform(-4.0, 4.0, 100_000))
        v = rng.standard_normal(100_000) * np.exp(rng.uniform(-4.0, 4.0, 100_000))
        report.at_least(f"eps={eps:g}", mcshane_check(P, eps, rho, u, v), -1e-9)
    return report


def delta2(rng) -> SuiteReport:
    report = SuiteReport("delta2")
    for p in (2.0, 3.0, 4.0):
        report.at_most(f"p={p:g}", abs(delta2_constant(power_young(p)) - 2.0 ** p), 1e-6)
    return report


def hilbert_modulus_check(rng) -> SuiteReport:
    report = SuiteReport("hilbert_modulus")
    for n in (2, 8):
        model = SpaceModel.hilbert(random_space(n, rng))
        for eps in (0.5, 1.0, 1.5):
            estimate = modulus_estimate(model, eps, 2000, int(rng.integers(2**31)))
            report.at_most(f"n={n},eps={eps:g}", abs(estimate.delta_estimate - hilbert_modulus(eps)), 1e-4)
    return report


def mazur(rng) -> SuiteReport:
    report = SuiteReport("mazur")
    space = random_space(16, rng)
    for p in (1.5, 3.0):
        q = conjugate_exponent(p)
        lp, lq = SpaceModel.lebesgue(space, p), SpaceModel.lebesgue(space, q)
        trip, identity = [], []
        for _ in range(1000):
            h = random_function(space, rng)
            image = mazur_map(p, h)
            trip.append(float(np.max(np.abs(mazur_inverse(p, image).values - h.values))))
            expected = norm(lp, h) ** (p / q)
            identity.append(abs(norm(lq, image) - expected) / max(1.0, expected))
        report.at_most(f"round_trip[p={p:g}]", trip, 1e-10)
        report.at_most(f"norm_identity[p={p:g}]", identity, 1e-9)
    return report


def maximizing_sequence(rng) -> SuiteReport:
    report = SuiteReport("maximizing_sequence")
    space = random_space(8, rng)
    for model in (SpaceModel.hilbert(space), SpaceModel.lebesgue(space, 3.0)):
        result = maximizing_sequence_experiment(model, random_functional(space, rng), 50, int(rng.integers(2**31)))
        tails = result.tail_diameters
        report.at_most(f"tails[{model.describe()}]", [b - a for a, b in zip(tails, tails[1:])], 1e-9)
        report.at_most(f"limit[{model.describe()}]", result.limit_distance, 1e-6)
    return report


CRITERIA = [
    duality_round_trip,
    conjugation_closed_form,
    luxemburg_closed_form,
    orlicz_cross_check,
    holder_inequality,
    gradient_finite_differences,
    hahn_banach,
    reflexivity,
    mcshane,
    delta2,
    hilbert_modulus_check,
    mazur,
    maximizing_sequence,
]


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance criteria at full size")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Generator seed")
    parser.add_argument("--only", help="Run a single criterion by name")
    parser.add_argument("--out", default="reports/acceptance.json", help="Report path")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    selected = [c for c in CRITERIA if args.only in (None, c.__name__)]
    if not selected:
        logger.error(f"Unknown criterion {args.only!r}")
        return 2

    reports = []
    for index, criterion in enumerate(selected, start=1):
        logger.info(f"[{index}/{len(selected)}] {criterion.__name__}...")
        start = time.perf_counter()
        report = criterion(rng)
        status = "✓" if report.passed else "❌"
        logger.info(f"{status} {criterion.__name__} ({time.perf_counter() - start:.1f}s)")
        for contract in report.failures():
            logger.error(f"   {contract.name}: {contract.measured:.3e} (needs {contract.relation} {contract.tolerance:g})")
        reports.append(report)

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(dumps({"seed": args.seed, "criteria": [r.to_json() for r in reports]}))
    logger.info(f"Report written to {args.out}")
    return 0 if all(r.passed for r in reports) else 3


if __name__ == "__main__":
    sys.exit(main())
