from .config import TrainConfig, config_hash, load_train_config
from .train import FrModeDataError, MissingLabelsError, TrainResult, train
from .evaluate import evaluate, metrics_record
from .report import BenchmarkReport, build_reports, render_reports, write_report
from .summary import mos_summary, write_summary
from .case_study import case_study

__all__ = [
    "TrainConfig",
    "config_hash",
    "load_train_config",
    "FrModeDataError",
    "MissingLabelsError",
    "TrainResult",
    "train",
    "evaluate",
    "metrics_record",
    "BenchmarkReport",
    "build_reports",
    "render_reports",
    "write_report",
    "mos_summary",
    "write_summary",
    "case_study",
]
