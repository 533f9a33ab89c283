"""
Conjecture lab suites.
Follows Single Responsibility Principle: Only schedules lab checks and
collects their outcomes into a LabReport.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np

from config.settings import Settings
from src.graphs.graph_models import build_transition
from src.lab.checks import (
    cancellation_count,
    complete_graph_negative_result,
    diameter_bound_report,
    multiplicity_class_check,
    periodicity_check,
    pi_floor_report,
    torus_amplification_report,
)
from src.lab.golden import GoldenTables
from src.markov.distances import matrix_tv_distance
from src.models.graph import GraphFamily, GraphSpec
from src.models.reports import CheckResult, LabReport
from src.spectral.eigen import eigendecompose, group_eigenvalues
from src.spectral.walk import cesaro_finite, cesaro_infinite
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger

SUITES = ("torus", "hypercube", "complete", "all")
TORUS_PRIMES = (5, 7, 11, 13)
PI_FLOOR_GRAPHS = (
    GraphSpec(family=GraphFamily.CYCLE, n=9),
    GraphSpec(family=GraphFamily.TORUS, p=5, d=2),
    GraphSpec(family=GraphFamily.HYPERCUBE, n=4),
    GraphSpec(family=GraphFamily.COMPLETE, size=8, with_self_loops=True),
)
PERIODICITY_RESIDUAL = 1e-9
CANCELLATION_MODULUS = 10007
CANCELLATION_SAMPLES = 100
CANCELLATION_SEED = 20240611

Check = Callable[[], CheckResult]


class ConjectureLab:
    """
    Runs the numerical checks of one suite.

    Checks are independent of each other and run on a worker pool; the
    report lists them in declaration order regardless of completion order.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.golden = GoldenTables(self.settings.storage.golden_dir)
        self.logger = get_logger(__name__)

    def _pi_floor(self, spec: GraphSpec) -> CheckResult:
        matrix = build_transition(spec, self.settings.tolerances)
        result = pi_floor_report(matrix, self.settings)
        evidence = [{
            'graph': matrix.label,
            'N': matrix.n_states,
            'min_entry': result.min_entry,
            'n_min_entry': result.scaled_min_entry,
            'bound': 1.0 / matrix.n_states ** 2,
        }]
        if spec.family is GraphFamily.COMPLETE:
            expected = 2.0 / matrix.n_states ** 2
            evidence[0]['closed_form'] = expected
            passes = result.passes and abs(result.min_entry - expected) <= 1e-12
        else:
            passes = result.passes
        return CheckResult(
            name=f"pi_floor[{matrix.label}]",
            passed=passes,
            detail=f"min Pi entry {result.min_entry:.6e} against 1/N^2 = {1.0 / matrix.n_states ** 2:.6e}",
            evidence=evidence,
        )

    def _torus_amplification(self, d: int) -> CheckResult:
        floor = self.golden.torus_floor(d)
        rows = torus_amplification_report(TORUS_PRIMES, d, floor, self.settings)
        failed = [row['p'] for row in rows if not row['passes']]
        return CheckResult(
            name=f"torus_amplification[d={d}]",
            passed=not failed,
            detail=f"N * min Pi >= {floor} and alpha < 1" + (f"; failed for p={failed}" if failed else ""),
            evidence=rows,
        )

    def _multiplicity(self, d: int) -> CheckResult:
        rows = []
        passed = True
        for p in TORUS_PRIMES:
            result = multiplicity_class_check(p, d, self.settings)
            passed = passed and result.matches
            rows.append({
                'p': p,
                'd': d,
                'matches': result.matches,
                'orbit_sizes': sorted(set(result.orbit_sizes)),
                'mismatch': list(map(list, result.mismatch)) if result.mismatch else None,
            })
        return CheckResult(
            name=f"multiplicity_classes[d={d}]",
            passed=passed,
            detail="numerical eigenvalue classes equal signed-permutation orbits",
            evidence=rows,
        )

    def _cancellations(self) -> CheckResult:
        d = 2
        rng = np.random.default_rng(CANCELLATION_SEED)
        samples = rng.integers(0, CANCELLATION_MODULUS, size=(CANCELLATION_SAMPLES, d))
        floor = CANCELLATION_MODULUS / (8 * d) ** d
        counts = []
        try:
            for y in samples:
                counts.append(cancellation_count(CANCELLATION_MODULUS, d, y))
        except InvariantViolation as e:
            return CheckResult(name="eigenvector_cancellations", passed=False, detail=str(e))
        return CheckResult(
            name="eigenvector_cancellations",
            passed=True,
            detail=f"{CANCELLATION_SAMPLES} random y in Z_{CANCELLATION_MODULUS}^{d}: min count {min(counts)} >= {floor:.2f}",
            evidence=[{'n': CANCELLATION_MODULUS, 'd': d, 'min_count': min(counts),
                       'max_count': max(counts), 'floor': floor}],
        )

    def _periodic(self, spec: GraphSpec, T: float) -> CheckResult:
        tolerances = self.settings.tolerances
        workers = self.settings.concurrency.max_workers
        matrix = build_transition(spec, tolerances)
        spectrum = eigendecompose(matrix, tolerances)
        classes = group_eigenvalues(spectrum, tolerances=tolerances)
        result = periodicity_check(spectrum, T, self.settings)
        gap = matrix_tv_distance(
            cesaro_finite(spectrum, classes, T, tolerances, workers),
            cesaro_infinite(spectrum, classes, tolerances, workers),
        )
        passes = result.deviation <= PERIODICITY_RESIDUAL and gap <= PERIODICITY_RESIDUAL
        return CheckResult(
            name=f"periodicity[{matrix.label}]",
            passed=passes,
            detail=f"U_T residual {result.deviation:.3e} and ||P_T - Pi|| {gap:.3e} at T = {T:.6f}",
            evidence=[{'graph': matrix.label, 'T': T, 'residual': result.deviation,
                       'phase': result.phase, 'cesaro_distance': gap}],
        )

    def _aperiodic(self, label: str, case: Dict[str, float]) -> CheckResult:
        spec = _spec_from_label(label)
        matrix = build_transition(spec, self.settings.tolerances)
        spectrum = eigendecompose(matrix, self.settings.tolerances)
        result = periodicity_check(spectrum, case['T'], self.settings)
        return CheckResult(
            name=f"no_period[{label}]",
            passed=result.deviation >= case['min_residual'],
            detail=f"residual {result.deviation:.6f} at T = {case['T']:.6f} stays above {case['min_residual']}",
            evidence=[{'graph': label, 'T': case['T'], 'residual': result.deviation}],
        )

    def _complete_negative(self) -> CheckResult:
        report = complete_graph_negative_result(16, (0.7, 2.3, 5.0), self.settings)
        return CheckResult(
            name="complete_graph_amplification_failure",
            passed=report.passes and report.amplification_degenerate,
            detail=f"alpha = {report.alpha:.12f}, expected 1 - 2/N = {report.alpha_expected:.12f}",
            evidence=report.rows,
        )

    def _complete_small(self) -> CheckResult:
        report = complete_graph_negative_result(2, (0.7,), self.settings)
        return CheckResult(
            name="complete_graph_two_states",
            passed=report.passes,
            detail=f"alpha = {report.alpha:.3e}",
            asserted=False,
            evidence=report.rows,
        )

    def _diameter(self, name: str, specs: List[GraphSpec]) -> CheckResult:
        rows = [
            diameter_bound_report(build_transition(spec, self.settings.tolerances), self.settings)
            for spec in specs
        ]
        return CheckResult(
            name=f"diameter_scaling[{name}]",
            passed=True,
            detail="evidence only: tau'_mix against diameter and gap^{-1/2} log N",
            asserted=False,
            evidence=rows,
        )

    def _torus_checks(self) -> List[Check]:
        checks: List[Check] = []
        for d in (1, 2):
            checks.append(lambda d=d: self._torus_amplification(d))
            checks.append(lambda d=d: self._multiplicity(d))
        checks.append(self._cancellations)
        for spec in PI_FLOOR_GRAPHS[:2]:
            checks.append(lambda spec=spec: self._pi_floor(spec))
        for label, case in self.golden.periodicity_cases().items():
            checks.append(lambda label=label, case=case: self._aperiodic(label, case))
        checks.append(lambda: self._diameter(
            "cycle", [GraphSpec(family=GraphFamily.CYCLE, n=n) for n in range(5, 42, 4)]
        ))
        return checks

    def _hypercube_checks(self) -> List[Check]:
        checks: List[Check] = [lambda: self._pi_floor(PI_FLOOR_GRAPHS[2])]
        for n in (3, 4, 5):
            spec = GraphSpec(family=GraphFamily.HYPERCUBE, n=n)
            checks.append(lambda spec=spec, n=n: self._periodic(spec, 2.0 * math.pi * n))
        checks.append(lambda: self._diameter(
            "hypercube", [GraphSpec(family=GraphFamily.HYPERCUBE, n=n) for n in range(1, 6)]
        ))
        return checks

    def _complete_checks(self) -> List[Check]:
        return [
            lambda: self._pi_floor(PI_FLOOR_GRAPHS[3]),
            self._complete_negative,
            self._complete_small,
            lambda: self._periodic(
                GraphSpec(family=GraphFamily.COMPLETE, size=8, with_self_loops=True), 2.0 * math.pi
            ),
            lambda: self._diameter(
                "complete",
                [GraphSpec(family=GraphFamily.COMPLETE, size=n, with_self_loops=True) for n in (4, 8, 16)]
            ),
        ]

    def checks_for(self, suite: str) -> List[Check]:
        """
        Check callables of a suite.

        Raises:
            InvariantViolation: If the suite name is unknown
        """
        if suite not in SUITES:
            raise InvariantViolation("lab-suite", f"unknown suite '{suite}', expected one of {SUITES}")
        if suite == "all":
            return self._torus_checks() + self._hypercube_checks() + self._complete_checks()
        return {
            "torus": self._torus_checks,
            "hypercube": self._hypercube_checks,
            "complete": self._complete_checks,
        }[suite]()

    def run(self, suite: str) -> LabReport:
        checks = self.checks_for(suite)
        self.logger.info(f"Running lab suite '{suite}' with {len(checks)} checks")
        with ThreadPoolExecutor(max_workers=self.settings.concurrency.max_workers) as executor:
            results = list(executor.map(lambda check: check(), checks))

        report = LabReport(suite=suite, checks=results)
        for result in results:
            if result.asserted and not result.passed:
                self.logger.error(f"Lab check failed: {result.name}: {result.detail}")
            else:
                self.logger.info(f"Lab check {result.name}: {'passed' if result.passed else 'evidence'}")
        return report


def _spec_from_label(label: str) -> GraphSpec:
    """GraphSpec from a golden-table label such as 'torus(5,1)'."""
    family, _, args = label.partition('(')
    values = [int(v) for v in args.rstrip(')').split(',') if v]
    if family == "torus":
        return GraphSpec(family=GraphFamily.TORUS, p=values[0], d=values[1])
    if family == "cycle":
        return GraphSpec(family=GraphFamily.CYCLE, n=values[0])
    if family == "hypercube":
        return GraphSpec(family=GraphFamily.HYPERCUBE, n=values[0])
    raise InvariantViolation("golden-label", f"unsupported golden graph label '{label}'")


def run_suite(suite: str, settings: Optional[Settings] = None) -> LabReport:
    """Run one conjecture lab suite and return its report."""
    return ConjectureLab(settings).run(suite)
