import logging
from typing import Dict

import click

from gesture.denoise import mdwmf_rgb, mdwmf_trace
from gesture.imagecore import RgbImage, load_pnm, save_pnm
from gesture_tool.base_tool import BaseTool, mdwmf_config, mdwmf_params

logger = logging.getLogger(__name__)


class DenoiseTool(BaseTool):
    def execute(self, input: str, output: str, **options) -> int:
        config = mdwmf_config(options)
        image = load_pnm(input)
        if isinstance(image, RgbImage):
            restored, changed = mdwmf_rgb(image, config)
        else:
            restored, changed = mdwmf_trace(image, config)
        save_pnm(restored, output)
        for iteration, (threshold, count) in enumerate(zip(config.thresholds, changed), start=1):
            click.echo(f"iteration {iteration} threshold {threshold:g} changed {count}")
        logger.info(f"MDWMF result written to {output}")
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "denoise",
            "help": "Remove impulse noise with the multi-directional weighted median filter.",
            "params": [
                click.Argument(["input"], type=click.Path(dir_okay=False)),
                click.Argument(["output"], type=click.Path(dir_okay=False)),
                *mdwmf_params(),
            ],
        }
