import logging
from typing import Dict, Optional

import click

from gesture.imagecore import encode_pnm, load_pnm
from gesture.utils import atomic_write_all
from gesture.workflow import Workflow
from gesture_tool.base_tool import BaseTool, pipeline_config, pipeline_params

logger = logging.getLogger(__name__)


class SegmentTool(BaseTool):
    def execute(
        self, input: str, mask: Optional[str], masked: Optional[str], edges: Optional[str], **options
    ) -> int:
        result = Workflow(pipeline_config(options)).segment(load_pnm(input))
        if result.mask.is_empty():
            logger.warning(f"{input}: empty mask")
        outputs = ((result.mask, mask), (result.masked_gray, masked), (result.edges, edges))
        # All requested rasters are written or none are
        atomic_write_all([(path, encode_pnm(raster)) for raster, path in outputs if path])
        click.echo(f"threshold {result.threshold:.6f}")
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "segment",
            "help": "Segment the hand region and write the mask, masked gray image and edge map.",
            "params": [
                click.Argument(["input"], type=click.Path(dir_okay=False)),
                click.Option(["--mask"], type=click.Path(dir_okay=False), help="Output PGM of the cleaned mask."),
                click.Option(["--masked"], type=click.Path(dir_okay=False),
                             help="Output PGM of the gray image under the mask."),
                click.Option(["--edges"], type=click.Path(dir_okay=False), help="Output PGM of the Canny edges."),
                *pipeline_params(),
            ],
        }
