import logging
from typing import Dict

import click

from gesture.denoise import inject_rvin_counted
from gesture.imagecore import load_pnm, save_pnm
from gesture_tool.base_tool import BaseTool

logger = logging.getLogger(__name__)


class NoiseTool(BaseTool):
    def execute(self, input: str, output: str, density: float, seed: int) -> int:
        image = load_pnm(input)
        noisy, corrupted = inject_rvin_counted(image, density, seed)
        save_pnm(noisy, output)
        logger.info(f"RVIN at density {density} (seed {seed}) written to {output}")
        click.echo(f"corrupted {corrupted}")
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "noise",
            "help": "Corrupt an image with random-valued impulse noise.",
            "params": [
                click.Argument(["input"], type=click.Path(dir_okay=False)),
                click.Argument(["output"], type=click.Path(dir_okay=False)),
                click.Option(["--density"], type=click.FloatRange(0.0, 1.0), default=0.4, show_default=True,
                             help="Probability that a pixel position is corrupted."),
                click.Option(["--seed"], type=int, default=0, show_default=True, help="Noise generator seed."),
            ],
        }
