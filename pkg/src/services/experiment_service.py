"""
Experiment orchestration behind the command line subcommands.
Follows Single Responsibility Principle: Only orchestrates, delegates the
numerics to the graph, markov, spectral, sampling, lab and trotter modules.
Follows Dependency Inversion: Receives settings and an artifact store.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config.settings import SamplingConfig, Settings
from src.graphs.graph_models import build_transition, lazy
from src.lab.suite import run_suite
from src.markov.analysis import analyze_chain
from src.markov.distances import max_pairwise_column_distance, tv_distance
from src.markov.mixing import distance_profile
from src.models.graph import GraphFamily, GraphSpec, TransitionMatrix
from src.models.reports import LabReport, MixingReport, SampleSummary, SampleTrace, TrotterRow
from src.models.spectrum import Distribution, EigenvalueClasses, Spectrum, StochasticSnapshot
from src.sampling.quantum_sampler import convergence_params, exact_output_law, run_monte_carlo
from src.spectral.eigen import eigendecompose, group_eigenvalues
from src.spectral.quantum_mixing import CesaroDistance, alpha_and_threshold, quantum_mixing_time
from src.spectral.walk import cesaro_finite, cesaro_infinite
from src.storage.artifact_store import ArtifactStore
from src.trotter.decomposition import edge_color_decompose
from src.trotter.product_formula import commutator_report, trotter_sweep
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger

TRACE_HEADER = ("trial_id", "seed", "initial_state", "round", "time", "state")
PROFILE_HEADER = ("t", "d", "dbar")
TROTTER_HEADER = ("j", "t", "error_2norm", "error_max_entry", "bound")
EVIDENCE_HEADER = ("check", "row", "field", "value")


def spec_from_params(family: str, params: Dict[str, Any]) -> Tuple[GraphSpec, bool]:
    """
    GraphSpec from a family name and parsed `k=v` parameters.

    The complete graph accepts `N` (or `size`) and `self_loops`; any family
    accepts `lazy=1` to return the lazy chain.

    Returns:
        The spec and whether the lazy chain was requested

    Raises:
        InvariantViolation: If the family is unknown or a parameter is not recognized
    """
    params = dict(params)
    make_lazy = bool(params.pop('lazy', 0))
    try:
        graph_family = GraphFamily(family)
    except ValueError:
        raise InvariantViolation("graph-family", f"unknown family '{family}'")
    if graph_family is GraphFamily.CUSTOM:
        raise InvariantViolation("graph-family", "custom graphs are loaded from a matrix or adjacency file")

    fields: Dict[str, Any] = {'family': graph_family}
    aliases = {'N': 'size', 'self_loops': 'with_self_loops'}
    allowed = {'cycle': {'n'}, 'torus': {'p', 'd'}, 'hypercube': {'n'}, 'complete': {'size', 'with_self_loops'}}
    for key, value in params.items():
        name = aliases.get(key, key)
        if name not in allowed[family]:
            raise InvariantViolation("graph-parameters", f"'{key}' is not a parameter of {family}")
        fields[name] = value
    return GraphSpec(**fields), make_lazy


class ExperimentService:
    """
    Runs one experiment per call and writes its artifacts.
    Keeps simple counters for the run summary.
    """

    def __init__(self, settings: Settings, store: Optional[ArtifactStore] = None):
        """
        Initialize experiment service.

        Args:
            settings: Loaded settings (tolerances, budgets, workers)
            store: Artifact store; defaults to one rooted at storage.output_dir
        """
        self.settings = settings
        self.tolerances = settings.tolerances
        self.workers = settings.concurrency.max_workers
        self.store = store or ArtifactStore(settings.storage.output_dir)
        self.logger = get_logger(__name__)
        self.artifacts_written: List[Path] = []

    def _written(self, path: Path) -> Path:
        self.artifacts_written.append(Path(path))
        return path

    def _spectral(self, matrix: TransitionMatrix) -> Tuple[Spectrum, EigenvalueClasses]:
        spectrum = eigendecompose(matrix, self.tolerances)
        return spectrum, group_eigenvalues(spectrum, tolerances=self.tolerances)

    def load_matrix(self, path: Path) -> TransitionMatrix:
        matrix = self.store.load_matrix(path)
        self.logger.info(f"Loaded {matrix.label} (N={matrix.n_states}) from {path}")
        return matrix

    def generate(
        self,
        family: str,
        params: Dict[str, Any],
        out: Path,
        adjacency_path: Optional[Path] = None
    ) -> TransitionMatrix:
        """
        Build a transition matrix and write its JSON artifact.

        Custom graphs read their adjacency from a JSON file holding {"rows": [[...], ...]}.
        """
        if family == GraphFamily.CUSTOM.value:
            if adjacency_path is None:
                raise InvariantViolation("custom-adjacency", "custom family needs an adjacency file")
            adjacency = self.store.load_json(adjacency_path)
            spec = GraphSpec(family=GraphFamily.CUSTOM, adjacency=adjacency['rows'])
            make_lazy = bool(params.get('lazy', 0))
        else:
            spec, make_lazy = spec_from_params(family, params)
        matrix = build_transition(spec, self.tolerances)
        if make_lazy:
            matrix = lazy(matrix)
        self._written(self.store.save_matrix(out, matrix))
        self.logger.info(f"Generated {matrix.label} with N={matrix.n_states}")
        return matrix

    def analyze(self, matrix_path: Path, eps_list: Sequence[float], out: Path) -> MixingReport:
        """
        Mixing report plus the d(t) table next to it (`<stem>_distances.csv`).
        """
        matrix = self.load_matrix(matrix_path)
        report = analyze_chain(matrix, eps_list, self.settings)
        self._written(self.store.save_json(out, report.to_dict()))
        if report.tau_eps:
            horizon = max(report.tau_eps.values()) * 2 + 1
            rows = distance_profile(matrix, horizon)
            csv_path = Path(out).with_name(f"{Path(out).stem}_distances.csv")
            self._written(self.store.write_csv(csv_path, PROFILE_HEADER, rows))
        return report

    def cesaro(self, matrix_path: Path, T: float, out: Path) -> StochasticSnapshot:
        matrix = self.load_matrix(matrix_path)
        spectrum, classes = self._spectral(matrix)
        snapshot = cesaro_finite(spectrum, classes, T, self.tolerances, self.workers)
        self._written(self.store.save_snapshot(out, snapshot))
        return snapshot

    def pi(self, matrix_path: Path, out: Optional[Path] = None) -> Dict[str, Any]:
        """
        Limit matrix Pi with its entry floor and pairwise column distance.

        Returns:
            Summary dictionary; `passes` is the 1/N^2 floor verdict
        """
        matrix = self.load_matrix(matrix_path)
        spectrum, classes = self._spectral(matrix)
        limit = cesaro_infinite(spectrum, classes, self.tolerances, self.workers, enforce_floor=False)
        n_states = matrix.n_states
        min_entry = float(limit.entries.min())
        summary = {
            'graph': matrix.label,
            'N': n_states,
            'min_entry': min_entry,
            'n_min_entry': n_states * min_entry,
            'floor': 1.0 / n_states ** 2,
            'passes': min_entry >= 1.0 / n_states ** 2 - self.tolerances.negative_clamp,
            'alpha': max_pairwise_column_distance(limit),
            'classes': len(classes.classes),
        }
        if out is not None:
            self._written(self.store.save_snapshot(out, limit))
        return summary

    def qmix(self, matrix_path: Path, eps: float, out: Optional[Path] = None) -> Dict[str, Any]:
        """Quantum mixing time tau'(eps) together with alpha, eps0 and tau'_mix."""
        matrix = self.load_matrix(matrix_path)
        spectrum, classes = self._spectral(matrix)
        distance = CesaroDistance(spectrum, classes, self.workers)
        tau_prime = quantum_mixing_time(
            spectrum, classes, eps, self.settings.quantum, self.tolerances, self.workers, distance
        )
        threshold = alpha_and_threshold(
            spectrum, classes, self.settings.quantum, self.tolerances, self.workers, distance
        )
        summary = {
            'graph': matrix.label,
            'N': matrix.n_states,
            'eps': eps,
            'tau_prime': tau_prime,
            'envelope_constant': distance.envelope_constant,
            'alpha': threshold.alpha,
            'eps0': threshold.eps0,
            'tau_prime_mix': threshold.tau_prime_mix,
            'amplification_available': threshold.amplification_available,
        }
        if out is not None:
            self._written(self.store.save_json(out, summary))
        return summary

    def sample(
        self,
        matrix_path: Path,
        eps: float,
        mode: str,
        out: Path,
        trace_path: Optional[Path] = None,
        x0: int = 0
    ) -> SampleSummary:
        """
        Run the quantum sampler and compare its law with uniform.

        `exact` computes the output law of the double loop only; `double`
        adds a Monte Carlo run; `single` measures once at T = tau'(eps).
        """
        matrix = self.load_matrix(matrix_path)
        spectrum, classes = self._spectral(matrix)
        sampling: SamplingConfig = self.settings.sampling

        alpha = None
        if mode == "single":
            T = quantum_mixing_time(spectrum, classes, eps, self.settings.quantum, self.tolerances, self.workers)
            rounds = 1
        else:
            T, rounds = convergence_params(
                spectrum, classes, eps, self.settings.quantum, self.tolerances, self.workers
            )
            alpha = max_pairwise_column_distance(cesaro_infinite(spectrum, classes, self.tolerances, self.workers))

        law = exact_output_law(spectrum, classes, T, rounds, x0, self.tolerances, self.workers)
        uniform = Distribution.uniform(matrix.n_states)
        tv_exact = tv_distance(law, uniform)

        tv_mc = None
        if mode != "exact":
            result = run_monte_carlo(
                spectrum, classes, T, rounds, x0, sampling, self.workers,
                record_traces=trace_path is not None, tolerances=self.tolerances
            )
            empirical = Distribution(probs=result.counts / result.counts.sum(), tolerance=1e-10)
            tv_mc = tv_distance(empirical, law)
            if trace_path is not None:
                self._written(self.write_traces(trace_path, result.traces))

        summary = SampleSummary(
            graph=matrix.label,
            mode=mode,
            T=T,
            T_prime=rounds,
            alpha=alpha,
            eps=eps,
            seed=sampling.seed,
            trials=sampling.trials if mode != "exact" else 0,
            initial_state=x0,
            tv_to_uniform_exact=tv_exact,
            tv_mc_vs_exact=tv_mc,
            amplification_available=alpha is None or alpha < 1.0 - self.tolerances.amplification_alpha_margin,
        )
        self._written(self.store.save_json(out, summary.to_dict()))
        self.logger.info(f"Sampled {matrix.label} ({mode}): T={T:.6g}, T'={rounds}, TV to uniform {tv_exact:.3e}")
        return summary

    def write_traces(self, path: Path, traces: Sequence[SampleTrace]) -> Path:
        rows = (row for trace in traces for row in trace.csv_rows())
        return self.store.write_csv(path, TRACE_HEADER, rows)

    def conjecture(self, suite: str, out: Path) -> LabReport:
        """Run a lab suite; the evidence tables go to `<stem>_evidence.csv`."""
        report = run_suite(suite, self.settings)
        self._written(self.store.save_json(out, report.to_dict()))
        rows = [
            (check.name, index, key, value)
            for check in report.checks
            for index, row in enumerate(check.evidence)
            for key, value in row.items()
        ]
        csv_path = Path(out).with_name(f"{Path(out).stem}_evidence.csv")
        self._written(self.store.write_csv(csv_path, EVIDENCE_HEADER, rows))
        return report

    def trotter(self, matrix_path: Path, t: float, j_list: Sequence[int], out: Path) -> List[TrotterRow]:
        matrix = self.load_matrix(matrix_path)
        parts = edge_color_decompose(matrix, self.tolerances)
        commutators = commutator_report(parts)
        self.logger.info(f"{matrix.label}: {parts.r} parts, max commutator {commutators.max_norm:.3e}")
        spectrum = eigendecompose(matrix, self.tolerances)
        rows = trotter_sweep(parts, spectrum, t, j_list, self.tolerances, self.workers)
        self._written(self.store.write_csv(
            out, TROTTER_HEADER,
            [(row.j, row.t, row.error_2norm, row.error_max_entry, row.bound) for row in rows]
        ))
        return rows

    def get_statistics(self) -> dict:
        """
        Get statistics about the artifacts written by this service.

        Returns:
            Dictionary with statistics
        """
        sizes = [path.stat().st_size for path in self.artifacts_written if path.exists()]
        return {
            'artifacts_written': len(self.artifacts_written),
            'total_size_bytes': sum(sizes),
            'paths': [str(path) for path in self.artifacts_written],
        }
