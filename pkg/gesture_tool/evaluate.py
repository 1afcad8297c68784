import logging
from typing import Dict, Optional

import click

from gesture.evaluation import cross_validate, load_dataset, render_report, report_csv, stratified_folds
from gesture.utils import atomic_write
from gesture_tool.base_tool import BaseTool, pipeline_config, pipeline_params, train_config, train_params

logger = logging.getLogger(__name__)


class EvaluateTool(BaseTool):
    def execute(
        self, data_root: str, folds: int, report_csv_path: Optional[str], activation: str, progress: bool, **options
    ) -> int:
        pipeline = pipeline_config(options)
        config = train_config(options)
        dataset = load_dataset(data_root, pipeline, progress=progress, workers=config.workers)
        plan = stratified_folds(dataset, folds, options["seed"])
        report = cross_validate(dataset, plan, config, activation=activation,
                                workers=config.workers, progress=progress)
        if report_csv_path:
            atomic_write(report_csv_path, report_csv(report))
        click.echo(render_report(report), nl=False)
        logger.info(f"Overall accuracy {100.0 * report.overall_accuracy:.2f}% over {plan.k} folds")
        return 0

    @property
    def command_config(self) -> Dict:
        return {
            "name": "evaluate",
            "help": "Stratified k-fold cross-validation; prints the accuracy report.",
            "params": [
                click.Argument(["data_root"], type=click.Path(file_okay=False)),
                click.Option(["--folds"], type=click.IntRange(min=2), default=10, show_default=True,
                             help="Number of folds."),
                click.Option(["--seed"], type=int, default=0, show_default=True,
                             help="Seed of the fold shuffle and the weight initialization."),
                click.Option(["--report-csv", "report_csv_path"], type=click.Path(dir_okay=False),
                             help="Also write the CSV block to this file."),
                click.Option(["--activation"], type=click.Choice(["sigmoid", "step"]), default="sigmoid",
                             show_default=True, help="Activation used when scoring held-out samples."),
                *train_params(include_seed=False),
                *pipeline_params(),
            ],
        }
