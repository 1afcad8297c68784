import logging
from typing import Dict

import click

from gesture.classifier import load_model, predict
from gesture.workflow import Workflow
from gesture_tool.base_tool import BaseTool, pipeline_config, pipeline_params

logger = logging.getLogger(__name__)


class PredictTool(BaseTool):
    def execute(self, model: str, image: str, activation: str, **options) -> int:
        ova = load_model(model)
        _, features = Workflow(pipeline_config(options)).process_file(image)
        index, scores = predict(ova, features, activation)
        logger.debug(f"{image}: scores {scores.tolist()}")
        click.echo(ova.class_names[index])
        click.echo(" ".join(f"{name}={score:.6f}" for name, score in zip(ova.class_names, scores)))
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "predict",
            "help": "Classify one image with a saved model; prints the class and all scores.",
            "params": [
                click.Argument(["model"], type=click.Path(dir_okay=False)),
                click.Argument(["image"], type=click.Path(dir_okay=False)),
                click.Option(["--activation"], type=click.Choice(["sigmoid", "step"]), default="sigmoid",
                             show_default=True, help="Activation used at inference."),
                *pipeline_params(),
            ],
        }
