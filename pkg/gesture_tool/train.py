import logging
from typing import Dict

import click

from gesture.classifier import save_model, train_ova
from gesture.evaluation import load_dataset
from gesture_tool.base_tool import BaseTool, pipeline_config, pipeline_params, train_config, train_params

logger = logging.getLogger(__name__)


class TrainTool(BaseTool):
    def execute(self, data_root: str, model_out: str, progress: bool, **options) -> int:
        pipeline = pipeline_config(options)
        config = train_config(options)
        dataset = load_dataset(data_root, pipeline, progress=progress, workers=config.workers)
        model = train_ova(dataset.features, dataset.labels, dataset.class_names, config)
        model.metadata["pipeline_config"] = pipeline.model_dump()
        model.metadata["skipped_images"] = list(dataset.warnings)
        save_model(model, model_out)
        click.echo(f"trained {len(model.class_names)} classes on {len(dataset)} samples")
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "train",
            "help": "Train one-against-all networks on a directory tree with one subdirectory per class.",
            "params": [
                click.Argument(["data_root"], type=click.Path(file_okay=False)),
                click.Argument(["model_out"], type=click.Path(dir_okay=False)),
                *train_params(),
                *pipeline_params(),
            ],
        }
