import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Optional, Tuple

import click

from gesture.errors import EmptyRegionError
from gesture.features import FEATURE_NAMES
from gesture.utils import atomic_write
from gesture.workflow import Workflow
from gesture_tool.base_tool import BaseTool, pipeline_config, pipeline_params

logger = logging.getLogger(__name__)

CSV_HEADER = ("path", "label", *FEATURE_NAMES)


class FeaturesTool(BaseTool):
    def execute(self, inputs: Tuple[str, ...], csv_path: Optional[str], workers: int, **options) -> int:
        workflow = Workflow(pipeline_config(options))

        def run(path: str):
            try:
                return workflow.process_file(path)[1]
            except EmptyRegionError:
                logger.warning(f"{path}: empty mask, row skipped")
                return None

        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(run, inputs))

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for path, vector in zip(inputs, vectors):
            if vector is not None:
                label = Path(path).parent.name
                writer.writerow([path, label, *(format(v, ".9g") for v in vector.as_array())])

        if csv_path:
            atomic_write(csv_path, buffer.getvalue())
            logger.info(f"Features of {sum(v is not None for v in vectors)} images written to {csv_path}")
        else:
            click.echo(buffer.getvalue(), nl=False)
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "features",
            "help": "Extract the six first-order histogram features of each segmented image as CSV.",
            "params": [
                click.Argument(["inputs"], nargs=-1, required=True, type=click.Path(dir_okay=False)),
                click.Option(["--csv", "csv_path"], type=click.Path(dir_okay=False),
                             help="Write the CSV here instead of standard output."),
                click.Option(["--workers"], type=click.IntRange(min=1), default=1, show_default=True,
                             help="Images processed concurrently."),
                *pipeline_params(),
            ],
        }
