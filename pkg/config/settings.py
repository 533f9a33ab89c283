"""
Configuration management module.
Loads and validates configuration from YAML and environment variables.
Follows Single Responsibility Principle: Only handles configuration loading.
"""

import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric tolerances shared by every module. Defaults are the acceptance values."""
    eigen_residual: float = 1e-9
    orthonormality: float = 1e-10
    stochasticity: float = 1e-12
    snapshot_stochasticity: float = 1e-10
    comparison_slack: float = 1e-10
    unitarity: float = 1e-10
    negative_clamp: float = 1e-12
    class_relative: float = 1e-8
    class_separation_factor: float = 3.0
    epsilon_floor: float = 1e-8
    amplification_alpha_margin: float = 1e-9


@dataclass
class MarkovConfig:
    """Classical mixing configuration."""
    threshold_eps: float = 1.0 / (2.0 * math.e)
    horizon_factor: float = 4.0


@dataclass
class QuantumConfig:
    """Quantum mixing time search configuration."""
    resolution: float = 1e-3
    max_scan_steps: int = 2_000_000
    absolute_step_floor: float = 1e-6


@dataclass
class SamplingConfig:
    """Monte Carlo sampling defaults."""
    seed: int = 42
    trials: int = 100_000
    chunk_size: int = 10_000


@dataclass
class ConcurrencyConfig:
    """Worker pool configuration."""
    max_workers: int = 4


@dataclass
class StorageConfig:
    """Storage paths configuration."""
    output_dir: Path = Path("./data/runs")
    golden_dir: Path = Path("./golden")


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = "INFO"
    file: Path = Path("./logs/qwalk.log")
    max_bytes: int = 10485760
    backup_count: int = 5
    console_level: str = "WARNING"


@dataclass
class Settings:
    """Main settings container. Dependency Inversion: provides abstraction for configuration."""
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    markov: MarkovConfig = field(default_factory=MarkovConfig)
    quantum: QuantumConfig = field(default_factory=QuantumConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    concurrency: ConcurrencyConfig = field(default_factory=ConcurrencyConfig)
    storage: StorageConfig = field(default_factory=StorageConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def load(cls, config_path: str = "config/config.yaml") -> "Settings":
        """
        Load configuration from YAML and environment variables.

        Args:
            config_path: Path to YAML configuration file

        Returns:
            Settings instance with loaded configuration

        Raises:
            FileNotFoundError: If config file doesn't exist
        """
        # Load environment variables from .env file if it exists
        load_dotenv()

        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_file, 'r') as f:
            config = yaml.safe_load(f) or {}

        tol = config.get('tolerances', {})
        markov = config.get('markov', {})
        quantum = config.get('quantum', {})
        sampling = config.get('sampling', {})
        concurrency = config.get('concurrency', {})
        storage = config.get('storage', {})
        logging_cfg = config.get('logging', {})

        # Golden directory can be redirected without touching the YAML
        golden_dir = os.getenv("QWALK_GOLDEN_DIR") or storage.get('golden_dir', "./golden")

        threshold_eps = markov.get('threshold_eps')
        return cls(
            tolerances=ToleranceConfig(**tol),
            markov=MarkovConfig(
                threshold_eps=threshold_eps if threshold_eps is not None else 1.0 / (2.0 * math.e),
                horizon_factor=markov.get('horizon_factor', 4.0)
            ),
            quantum=QuantumConfig(**quantum),
            sampling=SamplingConfig(**sampling),
            concurrency=ConcurrencyConfig(**concurrency),
            storage=StorageConfig(
                output_dir=Path(storage.get('output_dir', "./data/runs")),
                golden_dir=Path(golden_dir)
            ),
            logging=LoggingConfig(
                level=logging_cfg.get('level', "INFO"),
                file=Path(logging_cfg.get('file', "./logs/qwalk.log")),
                max_bytes=logging_cfg.get('max_bytes', 10485760),
                backup_count=logging_cfg.get('backup_count', 5),
                console_level=logging_cfg.get('console_level', "WARNING")
            )
        )

    def with_overrides(
        self,
        tol_eigen: Optional[float] = None,
        tol_class: Optional[float] = None,
        threads: Optional[int] = None
    ) -> "Settings":
        """
        Return a copy with command-line overrides applied.

        Args:
            tol_eigen: Eigen-residual tolerance override
            tol_class: Relative eigenvalue class tolerance override
            threads: Worker cap override

        Returns:
            New Settings instance
        """
        tolerances = self.tolerances
        if tol_eigen is not None:
            tolerances = replace(tolerances, eigen_residual=tol_eigen)
        if tol_class is not None:
            tolerances = replace(tolerances, class_relative=tol_class)
        concurrency = self.concurrency
        if threads is not None:
            concurrency = ConcurrencyConfig(max_workers=threads)
        return replace(self, tolerances=tolerances, concurrency=concurrency)

    def validate(self) -> bool:
        """
        Validate configuration values.

        Returns:
            True if valid

        Raises:
            ValueError: If validation fails
        """
        for name, value in vars(self.tolerances).items():
            if value <= 0:
                raise ValueError(f"Tolerance '{name}' must be positive, got {value}")

        if self.tolerances.class_separation_factor < 1:
            raise ValueError("Class separation factor must be at least 1")

        if not 0 < self.markov.threshold_eps < 0.5:
            raise ValueError("Threshold epsilon must lie in (0, 1/2)")

        if self.markov.horizon_factor < 1:
            raise ValueError("Horizon factor must be at least 1")

        if not 0 < self.quantum.resolution < 1:
            raise ValueError("Quantum mixing resolution must lie in (0, 1)")

        if self.quantum.max_scan_steps < 1:
            raise ValueError("Quantum scan budget must be at least 1 step")

        if self.sampling.trials < 1 or self.sampling.chunk_size < 1:
            raise ValueError("Trials and chunk size must be at least 1")

        if self.concurrency.max_workers < 1:
            raise ValueError("Worker count must be at least 1")

        return True
