"""
Aggregation of analyze, qmix and sample artifacts into one comparison table.
Follows Single Responsibility Principle: Only merges and renders results.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.storage.artifact_store import ArtifactStore, format_cell
from src.utils.logger import get_logger

REPORT_COLUMNS = ("graph", "delta", "eps", "tau_eps", "tau_mix", "tau_prime_mix", "alpha", "T", "T_prime", "quantum_cost")


def classify(data: Dict[str, Any]) -> str:
    """Kind of artifact from its keys: 'analysis', 'qmix' or 'sample'."""
    if 'spectral_gap' in data:
        return "analysis"
    if 'mode' in data and 'T_prime' in data:
        return "sample"
    if 'tau_prime' in data:
        return "qmix"
    raise ValueError("artifact is not an analyze, qmix or sample result")


class ReportService:
    """Merges prior JSON outputs per graph and writes Markdown and CSV tables."""

    def __init__(self, store: ArtifactStore):
        self.store = store
        self.logger = get_logger(__name__)

    def collect(self, paths: Sequence[Path]) -> List[Dict[str, Any]]:
        """
        One row per graph with classical tau(eps) against the quantum cost T * T'.

        Raises:
            FileNotFoundError: If an input is missing
            ValueError: If an input is not a recognized artifact
        """
        rows: Dict[str, Dict[str, Any]] = {}
        for path in paths:
            data = self.store.load_json(path)
            kind = classify(data)
            row = rows.setdefault(data['graph'], {column: None for column in REPORT_COLUMNS})
            row['graph'] = data['graph']
            if kind == "analysis":
                row['delta'] = data['spectral_gap']
                row['tau_mix'] = data.get('tau_mix')
                row['alpha'] = data.get('alpha') if row['alpha'] is None else row['alpha']
                row['tau_prime_mix'] = data.get('tau_prime_mix')
                row['_tau_eps'] = data.get('tau_eps', {})
            elif kind == "qmix":
                row['alpha'] = data['alpha']
                row['tau_prime_mix'] = data['tau_prime_mix']
            else:
                row['eps'] = data['eps']
                row['T'] = data['T']
                row['T_prime'] = data['T_prime']
                row['quantum_cost'] = data['T'] * data['T_prime']
                if data.get('alpha') is not None:
                    row['alpha'] = data['alpha']
            self.logger.debug(f"Merged {kind} artifact {path} into row {data['graph']}")

        table = []
        for row in rows.values():
            tau_eps = row.pop('_tau_eps', {})
            if tau_eps:
                key = repr(float(row['eps'])) if row['eps'] is not None else None
                if key not in tau_eps:
                    key = min(tau_eps, key=float)
                    row['eps'] = float(key)
                row['tau_eps'] = tau_eps[key]
            table.append(row)
        return table

    def render_markdown(self, rows: List[Dict[str, Any]]) -> str:
        lines = [
            "# Classical against quantum sampling cost",
            "",
            "| " + " | ".join(REPORT_COLUMNS) + " |",
            "|" + "---|" * len(REPORT_COLUMNS),
        ]
        for row in rows:
            lines.append("| " + " | ".join(_markdown_cell(row[column]) for column in REPORT_COLUMNS) + " |")
        return "\n".join(lines) + "\n"

    def write(self, paths: Sequence[Path], out: Path) -> List[Dict[str, Any]]:
        """
        Write `out` (Markdown) and the same table as CSV beside it.

        Returns:
            The merged rows
        """
        rows = self.collect(paths)
        out = Path(out)
        markdown = self.render_markdown(rows)
        self.store.save_text(out, markdown)
        self.store.write_csv(out.with_suffix('.csv'), REPORT_COLUMNS, [[row[c] for c in REPORT_COLUMNS] for row in rows])
        self.logger.info(f"Report over {len(paths)} artifacts written to {out}")
        return rows


def _markdown_cell(value: Optional[Any]) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return format_cell(value)
