"""
Property suites behind the verify command

Every suite takes the same SuiteParams, draws all randomness from one
generator seeded with params.seed and returns a SuiteReport: one Contract
per checked property (worst measured value, tolerance, pass flag) plus one
row per trial for CSV sweeps.
"""
from dataclasses import dataclass, field

import numpy as np

from config.harness_config import DEFAULT_DIM, DEFAULT_EXPONENT, DEFAULT_SEED, DEFAULT_TRIALS
from spaces.measure_space import (
    MeasureSpace,
    RealFunction,
    indicator,
    integrate,
    pairing,
    random_function,
    random_functional,
    random_space,
    to_function,
)
from spaces.norms import (
    SpaceModel,
    amemiya_norm,
    dual_norm,
    holder_check,
    kkt_point,
    luxemburg_norm,
    norm,
    orlicz_norm,
    orlicz_norm_by_ascent,
)
from spaces.young import (
    conjugate,
    conjugate_young,
    delta2_constant,
    fenchel_young_gap,
    growth_bound_slack,
    mcshane_check,
    mixed_power_young,
    power_young,
    rho_estimate,
)
from services.convexity import (
    hilbert_modulus,
    m_continuity_probe,
    maximizing_sequence_experiment,
    modulus_estimate,
    modulus_grid_oracle,
    modulus_sweep,
)
from services.duality import (
    central_difference,
    duality_map,
    hyperplane_oracle,
    mazur_inverse,
    mazur_map,
    norm_gradient,
    operator_norm_estimate,
    reflexivity_witness,
    riesz_represent,
    second_dual_action,
    strict_maximality_margin,
)
from services.extension import Subspace, SubFunctional, extend_with_diagnostics, restrict, uniqueness_probe
from utils.errors import DomainError
from utils.logger import setup_logger
from utils.validators import conjugate_exponent, validate_exponent

logger = setup_logger("verification")

MODULES = ("measure_space", "young", "norms", "duality", "mazur", "extension", "convexity")


@dataclass(frozen=True)
class SuiteParams:
    n: int = DEFAULT_DIM
    p: float = DEFAULT_EXPONENT
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"verification needs n >= 2, got {self.n}")
        if not validate_exponent(self.p):
            raise DomainError(f"verification needs 1 < p < ∞, got {self.p}")
        if self.trials < 1:
            raise DomainError(f"verification needs at least one trial, got {self.trials}")


@dataclass(frozen=True)
class Contract:
    name: str
    measured: float
    tolerance: float
    relation: str
    passed: bool

    def to_json(self) -> dict:
        return dict(vars(self))


@dataclass
class SuiteReport:
    module: str
    contracts: list[Contract] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.contracts)

    def failures(self) -> list[Contract]:
        return [c for c in self.contracts if not c.passed]

    def at_most(self, name: str, values, tolerance: float):
        measured = float(np.max(values)) if np.size(values) else 0.0
        self.contracts.append(Contract(name, measured, tolerance, "<=", bool(measured <= tolerance)))

    def at_least(self, name: str, values, tolerance: float):
        measured = float(np.min(values)) if np.size(values) else 0.0
        self.contracts.append(Contract(name, measured, tolerance, ">=", bool(measured >= tolerance)))

    def row(self, check: str, model: str, trial: int, measured: float):
        self.rows.append({"module": self.module, "check": check, "model": model, "trial": trial,
                          "measured": float(measured)})

    def to_json(self) -> dict:
        return {
            "module": self.module,
            "passed": self.passed,
            "contracts": [c.to_json() for c in self.contracts],
        }


def standard_models(space: MeasureSpace, p: float) -> list[SpaceModel]:
    """Hilbert, ℓ^p and the Orlicz models over |u|^p and a mixed power"""
    return [
        SpaceModel.hilbert(space),
        SpaceModel.lebesgue(space, p),
        SpaceModel.orlicz(space, power_young(p, normalized=False)),
        SpaceModel.orlicz(space, mixed_power_young(2.0, p + 1.0)),
    ]


def _unit(model: SpaceModel, f: RealFunction) -> RealFunction:
    return f / norm(model, f)


def verify_measure_space(params: SuiteParams) -> SuiteReport:
    report = SuiteReport("measure_space")
    rng = np.random.default_rng(params.seed)
    space = random_space(params.n, rng)
    bilinear, integral = [], []
    for trial in range(params.trials):
        f, h = random_function(space, rng), random_function(space, rng)
        g = random_functional(space, rng)
        a, b = rng.standard_normal(2)
        combined = pairing(space, g, f * a + h * b)
        split = a * pairing(space, g, f) + b * pairing(space, g, h)
        scale = abs(a * pairing(space, g, f)) + abs(b * pairing(space, g, h))
        bilinear.append(abs(combined - split) / max(1.0, scale))
        integral.append(abs(integrate(space, f) - pairing(space, indicator(space), f)))
        report.row("bilinearity", "space", trial, bilinear[-1])
    report.at_most("pairing_bilinearity", bilinear, 1e-12)
    report.at_most("integrate_matches_indicator", integral, 1e-12)
    report.at_most("total_mass", abs(space.total_mass - float(np.sum(space.weights))), 1e-12)
    return report


def verify_young(params: SuiteParams) -> SuiteReport:
    report = SuiteReport("young")
    rng = np.random.default_rng(params.seed)
    grid = np.linspace(-3.0, 3.0, 100)
    for p in (1.5, 2.0, 3.0):
        q = conjugate_exponent(p)
        error = np.abs(conjugate(power_young(p), grid) - np.abs(grid) ** q / q)
        report.at_most(f"conjugate_closed_form_p{p:g}", error, 1e-8)
    for p in (2.0, 3.0, 4.0):
        report.at_most(f"delta2_constant_p{p:g}", abs(delta2_constant(power_young(p)) - 2.0 ** p), 1e-6)

    P = power_young(params.p)
    count = params.trials * 100
    for eps in (0.1, 0.5, 0.9):
        rho = rho_estimate(P, eps)
        u = rng.standard_normal(count) * np.exp(rng.uniform(-3.0, 3.0, count))
        v = rng.standard_normal(count) * np.exp(rng.uniform(-3.0, 3.0, count))
        slack = mcshane_check(P, eps, rho, u, v)
        report.at_least(f"mcshane_slack_eps{eps:g}", slack, -1e-9)
        report.row("mcshane", P.label, int(eps * 10), float(np.min(slack)))

    u = rng.standard_normal(count)
    v = rng.standard_normal(count)
    gap = fenchel_young_gap(P, u, v) / (1.0 + np.abs(u * v))
    report.at_least("fenchel_young_gap", gap, -1e-9)
    report.at_least("growth_bound", growth_bound_slack(P, 2.0 ** params.p), -1e-9)

    Q = conjugate_young(P)
    points = np.linspace(-2.0, 2.0, 41)
    back = np.asarray(conjugate(Q, points))
    report.at_most("double_conjugation", np.abs(back - P(points)) / (1.0 + P(points)), 1e-7)
    return report


def verify_norms(params: SuiteParams) -> SuiteReport:
    report = SuiteReport("norms")
    rng = np.random.default_rng(params.seed)
    space = random_space(params.n, rng)
    lebesgue = SpaceModel.lebesgue(space, params.p)
    orlicz = SpaceModel.orlicz(space, power_young(params.p, normalized=False))

    closed = []
    for trial in range(params.trials * 10):
        f = random_function(space, rng, scale=float(np.exp(rng.uniform(-2.0, 2.0))))
        exact = norm(lebesgue, f)
        closed.append(abs(luxemburg_norm(orlicz, f) - exact) / exact)
    report.at_most("luxemburg_closed_form", closed, 1e-10)

    holder, extremal = [], []
    for trial in range(params.trials * 10):
        f, g = random_function(space, rng), random_functional(space, rng)
        holder.append(holder_check(orlicz, f, g) / (1.0 + norm(orlicz, f) * orlicz_norm(orlicz, g)))
    for trial in range(params.trials):
        g = random_functional(space, rng)
        h, _ = kkt_point(orlicz, g)
        extremal.append(abs(holder_check(orlicz, RealFunction(h, space), g)))
    report.at_least("holder_slack", holder, -1e-9)
    report.at_most("holder_equality", extremal, 1e-6)

    small = random_space(min(params.n, 16), rng)
    for young in (power_young(params.p, normalized=False), mixed_power_young(2.0, params.p + 1.0)):
        model = SpaceModel.orlicz(small, young)
        spread = []
        for trial in range(params.trials):
            g = random_functional(small, rng)
            kkt = orlicz_norm(model, g)
            candidates = np.array([kkt, amemiya_norm(model, g), orlicz_norm_by_ascent(model, g, rng)])
            spread.append(float(np.max(np.abs(candidates - kkt))) / max(1.0, kkt))
            report.row("orlicz_cross_check", model.describe(), trial, spread[-1])
        report.at_most(f"orlicz_cross_check[{young.label}]", spread, 1e-6)

    for model in standard_models(space, params.p):
        homogeneity, triangle = [], []
        for trial in range(params.trials):
            f, h = random_function(space, rng), random_function(space, rng)
            c = float(rng.standard_normal())
            homogeneity.append(abs(norm(model, f * c) - abs(c) * norm(model, f)) / (1.0 + abs(c) * norm(model, f)))
            triangle.append(norm(model, f) + norm(model, h) - norm(model, f + h))
        report.at_most(f"homogeneity[{model.describe()}]", homogeneity, 1e-10)
        report.at_least(f"triangle[{model.describe()}]", triangle, -1e-10)
    return report


def verify_duality(params: SuiteParams) -> SuiteReport:
    report = SuiteReport("duality")
    rng = np.random.default_rng(params.seed)
    space = random_space(params.n, rng)
    expensive = min(params.trials, 5) if params.n <= 8 else 0
    for model in standard_models(space, params.p):
        label = model.describe()
        forward, backward, fd, riesz, margin = [], [], [], [], []
        for trial in range(params.trials):
            y = random_functional(space, rng)
            result = duality_map(model, y)
            forward.append(result.residual)

            x = _unit(model, random_function(space, rng))
            back = duality_map(model, norm_gradient(model, x)).point - x
            backward.append(0.0 if back.is_zero() else norm(model, back))

            u = random_function(space, rng)
            slope = pairing(space, norm_gradient(model, x), u)
            fd.append(abs(central_difference(model, x, u) - slope) / max(abs(slope), norm(model, u)))

            density = riesz_represent(model, y, seed=int(rng.integers(2**31)), trials=4)
            f = random_function(space, rng)
            riesz.append(abs(pairing(space, density, f) - pairing(space, y, f)) / norm(model, f))
            report.row("round_trip", label, trial, max(forward[-1], backward[-1]))
        report.at_most(f"dual_round_trip[{label}]", forward, 1e-7)
        report.at_most(f"primal_round_trip[{label}]", backward, 1e-7)
        report.at_most(f"gradient_vs_central_difference[{label}]", fd, 1e-6)
        report.at_most(f"riesz_representation[{label}]", riesz, 1e-8)

        isometry, oracle = [], []
        for _ in range(expensive):
            y = random_functional(space, rng)
            margin.append(strict_maximality_margin(model, y, 20, rng))
            x = _unit(model, random_function(space, rng))
            isometry.append(abs(operator_norm_estimate(model, norm_gradient(model, x), rng) - 1.0))
            gap = hyperplane_oracle(model, y) - duality_map(model, y).point
            oracle.append(0.0 if gap.is_zero() else norm(model, gap))
        if expensive:
            report.at_least(f"strict_maximality[{label}]", margin, -1e-12)
            report.at_most(f"gradient_isometry[{label}]", isometry, 1e-6)
            report.at_most(f"hyperplane_oracle[{label}]", oracle, 1e-5)

    for model in (SpaceModel.hilbert(space), SpaceModel.lebesgue(space, params.p)):
        label = model.describe()
        defects = []
        for trial in range(params.trials):
            phi = random_functional(space, rng)
            x = reflexivity_witness(model, phi)
            probe = random_functional(space, rng)
            scale = max(1.0, dual_norm(model, probe) * norm(model, to_function(phi)))
            defects.append(abs(second_dual_action(phi, probe) - pairing(space, probe, x)) / scale)
        report.at_most(f"reflexivity_witness[{label}]", defects, 1e-7)
    return report


def verify_mazur(params: SuiteParams) -> SuiteReport:
    report = SuiteReport("mazur")
    rng = np.random.default_rng(params.seed)
    space = random_space(params.n, rng)
    p = params.p
    q = conjugate_exponent(p)
    lp, lq = SpaceModel.lebesgue(space, p), SpaceModel.lebesgue(space, q)
    round_trip, identity = [], []
    for trial in range(params.trials * 10):
        h = random_function(space, rng)
        image = mazur_map(p, h)
        back = mazur_inverse(p, image)
        round_trip.append(float(np.max(np.abs(back.values - h.values))) / (1.0 + float(np.max(np.abs(h.values)))))
        expected = norm(lp, h) ** (p / q)
        identity.append(abs(norm(lq, image) - expected) / max(1.0, expected))
        report.row("mazur", lp.describe(), trial, max(round_trip[-1], identity[-1]))
    report.at_most("mazur_round_trip", round_trip, 1e-10)
    report.at_most("mazur_norm_identity", identity, 1e-9)
    return report


def verify_extension(params: SuiteParams, probe_trials: int = 3) -> SuiteReport:
    report = SuiteReport("extension")
    rng = np.random.default_rng(params.seed)
    n = min(params.n, 16)
    space = random_space(n, rng)
    for model in standard_models(space, params.p)[:3]:
        label = model.describe()
        preserved, restricted, paired, unit, distance, violations = [], [], [], [], [], []
        for trial in range(params.trials):
            size = int(rng.integers(1, n))
            sub = Subspace(rng.standard_normal((size, n)), model)
            y1 = SubFunctional(rng.standard_normal(size))
            result = extend_with_diagnostics(model, sub, y1, seed=int(rng.integers(2**31)))
            y = result.functional
            preserved.append(abs(dual_norm(model, y) - result.subspace_norm))
            restricted.append(float(np.max(np.abs(restrict(model, sub, y).action - y1.action))))
            paired.append(abs(pairing(space, y, result.point) - result.subspace_norm))
            unit.append(abs(norm(model, result.point) - 1.0))
            probe = uniqueness_probe(model, sub, y1, y, probe_trials, int(rng.integers(2**31)))
            distance.append(probe.worst_distance)
            violations.append(probe.violations)
            report.row("norm_preservation", label, trial, preserved[-1])
        report.at_most(f"norm_preservation[{label}]", preserved, 1e-7)
        report.at_most(f"restriction[{label}]", restricted, 1e-7)
        report.at_most(f"norming_point_pairing[{label}]", paired, 1e-8)
        report.at_most(f"norming_point_unit[{label}]", unit, 1e-8)
        report.at_most(f"uniqueness_distance[{label}]", distance, 1e-6)
        report.at_most(f"uniqueness_violations[{label}]", violations, 0)
    return report


def verify_convexity(params: SuiteParams) -> SuiteReport:
    report = SuiteReport("convexity")
    rng = np.random.default_rng(params.seed)
    samples = max(10 * params.trials, 200)
    for n in sorted({2, params.n}):
        model = SpaceModel.hilbert(random_space(n, rng))
        for eps in (0.5, 1.0, 1.5):
            estimate = modulus_estimate(model, eps, samples, params.seed)
            report.at_most(f"hilbert_modulus[n={n},eps={eps:g}]",
                           abs(estimate.delta_estimate - hilbert_modulus(eps)), 1e-4)

    plane = random_space(2, rng)
    lebesgue = SpaceModel.lebesgue(plane, params.p)
    for eps in (0.5, 1.0, 1.5):
        estimate = modulus_estimate(lebesgue, eps, samples, params.seed)
        oracle = modulus_grid_oracle(lebesgue, eps)
        report.at_most(f"oracle_agreement[eps={eps:g}]", abs(estimate.delta_estimate - oracle.delta_estimate), 1e-3)
        x, y = estimate.witness_x, estimate.witness_y
        report.at_most(f"witness_unit[eps={eps:g}]",
                       max(abs(norm(lebesgue, x) - 1.0), abs(norm(lebesgue, y) - 1.0)), 1e-9)
        report.at_least(f"witness_separation[eps={eps:g}]", norm(lebesgue, x - y) - eps, -1e-9)

    sweep = modulus_sweep(lebesgue, np.linspace(0.25, 2.0, 8), samples // 2, params.seed)
    drops = [earlier.delta_estimate - later.delta_estimate for earlier, later in zip(sweep, sweep[1:])]
    report.at_most("sweep_monotone", drops, 0.0)
    for entry in sweep:
        report.row("modulus_sweep", lebesgue.describe(), int(round(entry.epsilon * 100)), entry.delta_estimate)

    space = random_space(params.n, rng)
    for model in (SpaceModel.hilbert(space), SpaceModel.lebesgue(space, params.p)):
        label = model.describe()
        y = random_functional(space, rng)
        sequence = maximizing_sequence_experiment(model, y, 50, params.seed)
        rises = [later - earlier for earlier, later in zip(sequence.tail_diameters, sequence.tail_diameters[1:])]
        report.at_most(f"tail_diameters_decrease[{label}]", rises, 1e-9)
        report.at_most(f"sequence_limit[{label}]", sequence.limit_distance, 1e-6)
        report.at_most(f"midpoint_violations[{label}]", sequence.midpoint_violations, 0)

        table = m_continuity_probe(model, y, [0.0, 1e-6, 1e-3], params.seed)
        report.at_most(f"continuity_at_zero[{label}]", table.rows[0].displacement, 0.0)
        if model.kind == "hilbert":
            report.at_most("continuity_bound[hilbert]",
                           [row.displacement - row.bound for row in table.rows], 1e-12)
        else:
            report.at_most(f"continuity_small[{label}]", table.rows[1].displacement, 1e-3)

    orlicz = SpaceModel.orlicz(random_space(min(params.n, 4), rng), mixed_power_young(2.0, params.p + 1.0))
    positive = modulus_estimate(orlicz, 1.0, max(params.trials, 20), params.seed)
    report.at_least(f"orlicz_modulus_positive[{orlicz.describe()}]", positive.delta_estimate, 1e-12)
    return report


SUITES = {
    "measure_space": verify_measure_space,
    "young": verify_young,
    "norms": verify_norms,
    "duality": verify_duality,
    "mazur": verify_mazur,
    "extension": verify_extension,
    "convexity": verify_convexity,
}


def run_suites(module: str, params: SuiteParams) -> list[SuiteReport]:
    """
    Run one suite or all of them

    Args:
        module: A key of SUITES or "all"
        params: Shared sizes and seed

    Returns:
        One SuiteReport per suite, in MODULES order
    """
    if module == "all":
        names = list(MODULES)
    elif module in SUITES:
        names = [module]
    else:
        raise DomainError(f"unknown verification module {module!r}; choose from {', '.join(MODULES)} or all")
    reports = []
    for name in names:
        logger.info(f"verifying {name} (n={params.n}, p={params.p:g}, trials={params.trials}, seed={params.seed})")
        report = SUITES[name](params)
        for contract in report.failures():
            logger.warning(f"{name}: {contract.name} measured {contract.measured:.3e} "
                           f"(needs {contract.relation} {contract.tolerance:g})")
        reports.append(report)
    return reports
