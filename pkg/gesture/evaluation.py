"""
Dataset ingestion, stratified k-fold cross-validation and report rendering.
"""
import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from jinja2 import Environment
from sklearn.metrics import confusion_matrix
from tqdm import tqdm

from .classifier import OvAModel, TrainConfig, predict, train_ova
from .errors import DatasetError, EmptyRegionError, PnmError
from .features import FeatureVector
from .workflow import PipelineConfig, Workflow

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".pgm", ".ppm", ".pnm"}
CSV_MARKER = "--- csv ---"
_TEMPLATES_PATH = Path(__file__).with_name("templates.yaml")


@dataclass(frozen=True)
class Sample:
    features: FeatureVector
    label: int
    path: str


@dataclass(frozen=True, eq=False)
class Dataset:
    samples: Tuple[Sample, ...]
    class_names: Tuple[str, ...]
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        for sample in self.samples:
            if not 0 <= sample.label < len(self.class_names):
                raise DatasetError(f"{sample.path}: label {sample.label} has no class name")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def features(self) -> np.ndarray:
        return np.array([s.features.as_array() for s in self.samples]).reshape(-1, len(FeatureVector.names()))

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=np.int64)

    @classmethod
    def from_arrays(
        cls, features, labels: Sequence[int], class_names: Sequence[str], paths: Optional[Sequence[str]] = None
    ) -> "Dataset":
        paths = paths or [f"sample{i:05d}" for i in range(len(labels))]
        samples = tuple(
            Sample(FeatureVector.from_array(row), int(label), str(path))
            for row, label, path in zip(features, labels, paths)
        )
        return cls(samples, tuple(class_names))


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignment: np.ndarray
    seed: int

    def __post_init__(self):
        assignment = np.array(self.assignment, dtype=np.int64, copy=True)
        if self.k < 2:
            raise ValueError(f"Need at least 2 folds, got {self.k}")
        if assignment.size and (assignment.min() < 0 or assignment.max() >= self.k):
            raise ValueError(f"Fold indices must lie in [0, {self.k})")
        assignment.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)


@dataclass(frozen=True, eq=False)
class EvalReport:
    class_names: Tuple[str, ...]
    per_class_accuracy: np.ndarray
    overall_accuracy: float
    confusion: np.ndarray
    plan: FoldPlan
    config: Dict = field(default_factory=dict)


def _list_images(directory: Path) -> List[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def load_dataset(
    root: Union[str, Path],
    config: Optional[PipelineConfig] = None,
    progress: bool = False,
    workers: int = 1,
) -> Dataset:
    """
    Build a Dataset from one subdirectory per class.
    :param root: Directory whose sorted subdirectory names become the class names.
    :param config: Pipeline settings applied to every image.
    :param progress: Show a progress bar on standard error.
    :param workers: Images processed concurrently.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"Dataset root {root} is not a directory")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetError(f"Dataset root {root} has no class subdirectories")
    class_names = tuple(d.name for d in class_dirs)

    jobs = sorted(
        ((path, label) for label, d in enumerate(class_dirs) for path in _list_images(d)),
        key=lambda job: str(job[0]),
    )
    workflow = Workflow(config)

    def run(job):
        path, label = job
        try:
            _, features = workflow.process_file(path)
            return Sample(features, label, str(path)), None
        except EmptyRegionError:
            return None, f"{path}: empty mask, image skipped"
        except (PnmError, OSError) as e:
            return None, f"{path}: unreadable image skipped ({e})"

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(tqdm(pool.map(run, jobs), total=len(jobs), desc="images", disable=not progress))

    samples, warnings = [], []
    for sample, warning in results:
        if warning:
            logger.warning(warning)
            warnings.append(warning)
        else:
            samples.append(sample)

    empty = [name for k, name in enumerate(class_names) if not any(s.label == k for s in samples)]
    if empty:
        raise DatasetError(f"No usable images for classes: {', '.join(empty)}")
    logger.info(f"Loaded {len(samples)} samples in {len(class_names)} classes ({len(warnings)} skipped)")
    return Dataset(tuple(samples), class_names, tuple(warnings))


def stratified_folds(dataset: Dataset, k: int, seed: int) -> FoldPlan:
    """Shuffle each class with the seeded generator, then deal it round-robin into k folds."""
    if k < 2:
        raise ValueError(f"Need at least 2 folds, got {k}")
    labels = dataset.labels
    rng = np.random.default_rng(seed)
    assignment = np.zeros(len(labels), dtype=np.int64)
    for label, name in enumerate(dataset.class_names):
        members = np.nonzero(labels == label)[0]
        if len(members) < k:
            raise DatasetError(f"Class '{name}' has {len(members)} samples, fewer than {k} folds")
        assignment[rng.permutation(members)] = np.arange(len(members)) % k
    return FoldPlan(k, assignment, seed)


def train_fold(dataset: Dataset, plan: FoldPlan, fold: int, config: TrainConfig) -> OvAModel:
    """Model scored on `fold`, trained (normalizer included) on the other folds only."""
    train = plan.assignment != fold
    return train_ova(dataset.features[train], dataset.labels[train], dataset.class_names, config)


def cross_validate(
    dataset: Dataset,
    plan: FoldPlan,
    config: TrainConfig,
    activation: Optional[str] = None,
    workers: int = 1,
    progress: bool = False,
) -> EvalReport:
    if len(plan.assignment) != len(dataset):
        raise ValueError(f"Fold plan covers {len(plan.assignment)} samples, dataset has {len(dataset)}")
    features, labels = dataset.features, dataset.labels
    n_classes = len(dataset.class_names)

    def run(fold: int) -> np.ndarray:
        model = train_fold(dataset, plan, fold, config)
        test = np.nonzero(plan.assignment == fold)[0]
        predicted = [predict(model, features[i], activation)[0] for i in test]
        logger.debug(f"Fold {fold}: {len(test)} test samples")
        return confusion_matrix(labels[test], predicted, labels=list(range(n_classes)))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        matrices = list(tqdm(pool.map(run, range(plan.k)), total=plan.k, desc="folds", disable=not progress))

    confusion = np.sum(matrices, axis=0).astype(np.int64)
    totals = confusion.sum(axis=1)
    per_class = np.divide(np.diag(confusion), totals, out=np.zeros(n_classes), where=totals > 0)
    overall = float(np.trace(confusion) / confusion.sum()) if confusion.sum() else 0.0
    snapshot = {"train_config": config.model_dump(), "folds": plan.k, "seed": plan.seed, "activation": activation}
    return EvalReport(dataset.class_names, per_class, overall, confusion, plan, snapshot)


def report_csv(report: EvalReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["class", "accuracy", "correct", "total"])
    for k, name in enumerate(report.class_names):
        writer.writerow([name, format(float(report.per_class_accuracy[k]), ".17g"),
                         int(report.confusion[k, k]), int(report.confusion[k].sum())])
    writer.writerow(["overall", format(report.overall_accuracy, ".17g"),
                     int(np.trace(report.confusion)), int(report.confusion.sum())])
    writer.writerow(["confusion", *report.class_names])
    for k, name in enumerate(report.class_names):
        writer.writerow([name, *(int(c) for c in report.confusion[k])])
    return buffer.getvalue()


def parse_report_csv(text: str) -> Dict:
    """
    Read the CSV block of a rendered report (or a bare CSV block) back.
    :return: {"class_names", "accuracy", "correct", "total", "overall", "confusion"}.
    """
    if CSV_MARKER in text:
        text = text.split(CSV_MARKER, 1)[1]
    rows = [row for row in csv.reader(io.StringIO(text.strip())) if row]
    if not rows or rows[0] != ["class", "accuracy", "correct", "total"]:
        raise ValueError("Missing report CSV header")
    # header, K class rows, overall, confusion header, K matrix rows
    k, odd = divmod(len(rows) - 3, 2)
    if k < 1 or odd or rows[k + 2][0] != "confusion" or len(rows[k + 2]) != k + 1:
        raise ValueError(f"Malformed report CSV: {len(rows)} rows")
    per_class, overall_row = rows[1:k + 1], rows[k + 1]
    split = k + 2
    return {
        "class_names": [row[0] for row in per_class],
        "accuracy": [float(row[1]) for row in per_class],
        "correct": [int(row[2]) for row in per_class],
        "total": [int(row[3]) for row in per_class],
        "overall": float(overall_row[1]),
        "confusion": np.array([[int(c) for c in row[1:]] for row in rows[split + 1:]], dtype=np.int64),
    }


def _load_templates() -> Dict[str, str]:
    with open(_TEMPLATES_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def render_report(report: EvalReport) -> str:
    """Fixed-width accuracy table and confusion matrix, followed by the CSV block."""
    env = Environment(trim_blocks=True, lstrip_blocks=True)
    template = env.from_string(_load_templates()["report"])
    width = max(12, *(len(name) for name in report.class_names))
    cell = max(6, *(len(name) for name in report.class_names))
    rows = [
        {
            "name": name,
            "percent": 100.0 * float(report.per_class_accuracy[k]),
            "correct": int(report.confusion[k, k]),
            "total": int(report.confusion[k].sum()),
            "confusion": [int(c) for c in report.confusion[k]],
        }
        for k, name in enumerate(report.class_names)
    ]
    text = template.render(
        class_names=report.class_names,
        rows=rows,
        width=width,
        cell=cell,
        folds=report.plan.k,
        seed=report.plan.seed,
        total=int(report.confusion.sum()),
        correct=int(np.trace(report.confusion)),
        overall_percent=100.0 * report.overall_accuracy,
        csv=report_csv(report).rstrip("\n"),
    )
    return text + "\n"
