"""
CSV writer for experiment results: ``#`` metadata lines (tool version,
experiment kind, seed and the full configuration) followed by a header row
and the data rows in a fixed float format.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from experiments import __version__
from experiments.settings import format_value
from system.errors import ConfigurationError
from utils.progress_wrapper import with_progress

FLOAT_FORMAT = "%.10g"


class CsvExporter:
    def __init__(self, kind: str, seed: int, config: Optional[Dict[str, Any]] = None):
        self.kind = kind
        self.seed = seed
        self.config = dict(config or {})

    def metadata_lines(self):
        yield f"# irs-apg version = {__version__}"
        yield f"# experiment = {self.kind}"
        yield f"# seed = {self.seed}"
        for key in sorted(self.config):
            yield f"# {key} = {format_value(self.config[key])}"

    def render(self, frame: pd.DataFrame) -> str:
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return "\n".join(self.metadata_lines()) + "\n" + body

    @with_progress("Writing CSV", min_duration=0.5)
    def export(self, frame: pd.DataFrame, filename: Union[str, Path]) -> Path:
        path = Path(filename)
        if path.parent and not path.parent.exists():
            raise ConfigurationError(f"output directory {path.parent} does not exist")
        path.write_text(self.render(frame))
        return path


def read_results(filename: Union[str, Path]) -> pd.DataFrame:
    """Load a results CSV, skipping the metadata lines"""
    return pd.read_csv(filename, comment="#")
