from .config import PipelineConfig, config_from_dict, load_config, with_overrides
from .curation import decontaminate, dedup, statement_key
from .records import DatasetRecord, IngestReport, ingest, load_records
from .run import Backends, RunResult, make_backends, run_pipeline
from .stats import FunnelStats, histogram

__all__ = [
    "Backends", "DatasetRecord", "FunnelStats", "IngestReport", "PipelineConfig", "RunResult",
    "config_from_dict", "decontaminate", "dedup", "histogram", "ingest", "load_config",
    "load_records", "make_backends", "run_pipeline", "statement_key", "with_overrides",
]
