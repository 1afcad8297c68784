import numpy as np
import pytest

from gesture.classifier import TrainConfig
from gesture.errors import DatasetError
from gesture.evaluation import (
    Dataset,
    EvalReport,
    FoldPlan,
    cross_validate,
    load_dataset,
    parse_report_csv,
    render_report,
    report_csv,
    stratified_folds,
    train_fold,
)
from gesture.imagecore import GrayImage, RgbImage, save_pnm

FAST = TrainConfig(learning_rate=2.0, epochs=1500, tolerance=0.0)


def perfect_report(names) -> EvalReport:
    k = len(names)
    confusion = np.diag(np.full(k, 20))
    plan = FoldPlan(10, np.arange(20 * k) % 10, 0)
    return EvalReport(tuple(names), np.ones(k), 1.0, confusion, plan)


class TestLoadDataset:
    def test_tree_walk(self, gesture_tree):
        root = gesture_tree(images_per_class=3)
        dataset = load_dataset(root)
        assert len(dataset) == 15
        assert dataset.class_names == ("fist", "five", "ok", "peace", "thumb")
        assert [s.path for s in dataset.samples] == sorted(s.path for s in dataset.samples)
        assert np.bincount(dataset.labels).tolist() == [3] * 5
        assert dataset.warnings == ()

    def test_uniform_image_is_skipped(self, gesture_tree):
        root = gesture_tree(images_per_class=3)
        save_pnm(RgbImage(np.full((48, 48, 3), 128, dtype=np.uint8)), root / "ok" / "blank.ppm")
        dataset = load_dataset(root)
        assert len(dataset) == 15
        assert len(dataset.warnings) == 1 and "blank.ppm" in dataset.warnings[0]

    def test_unreadable_file_is_skipped(self, gesture_tree):
        root = gesture_tree(images_per_class=2)
        (root / "five" / "broken.pgm").write_bytes(b"P5\n9 9\n255\n")
        dataset = load_dataset(root)
        assert len(dataset) == 10
        assert "broken.pgm" in dataset.warnings[0]

    def test_deterministic(self, gesture_tree):
        root = gesture_tree(images_per_class=2)
        a, b = load_dataset(root), load_dataset(root, workers=3)
        assert [s.path for s in a.samples] == [s.path for s in b.samples]
        assert np.array_equal(a.features, b.features)

    def test_other_files_are_ignored(self, gesture_tree):
        root = gesture_tree(images_per_class=2)
        (root / "fist" / "notes.txt").write_text("not an image")
        assert len(load_dataset(root)) == 10

    def test_no_class_directories(self, tmp_path):
        with pytest.raises(DatasetError):
            load_dataset(tmp_path)

    def test_class_left_empty(self, gesture_tree):
        root = gesture_tree(images_per_class=2, classes=("fist", "five"))
        (root / "zero").mkdir()
        save_pnm(GrayImage(np.full((16, 16), 9, dtype=np.uint8)), root / "zero" / "gray.pgm")
        with pytest.raises(DatasetError):
            load_dataset(root)


class TestStratifiedFolds:
    def test_ten_per_class_per_fold(self, clusters):
        dataset = Dataset.from_arrays(*clusters())
        plan = stratified_folds(dataset, 10, seed=0)
        for fold in range(10):
            members = dataset.labels[plan.assignment == fold]
            assert np.bincount(members, minlength=5).tolist() == [10] * 5

    def test_fold_sizes_differ_by_at_most_one(self, clusters):
        features, labels, names = clusters(n_classes=3, per_class=23)
        plan = stratified_folds(Dataset.from_arrays(features, labels, names), 10, seed=4)
        for label in range(3):
            sizes = np.bincount(plan.assignment[labels == label], minlength=10)
            assert sizes.max() - sizes.min() <= 1

    def test_leave_one_out_within_class(self, clusters):
        features, labels, names = clusters(n_classes=2, per_class=4)
        plan = stratified_folds(Dataset.from_arrays(features, labels, names), 4, seed=1)
        for fold in range(4):
            assert sorted(labels[plan.assignment == fold].tolist()) == [0, 1]

    def test_seeded(self, clusters):
        dataset = Dataset.from_arrays(*clusters(per_class=20))
        a, b = stratified_folds(dataset, 5, 3), stratified_folds(dataset, 5, 3)
        c = stratified_folds(dataset, 5, 4)
        assert np.array_equal(a.assignment, b.assignment)
        assert not np.array_equal(a.assignment, c.assignment)

    def test_class_smaller_than_k(self, clusters):
        dataset = Dataset.from_arrays(*clusters(n_classes=2, per_class=3))
        with pytest.raises(DatasetError):
            stratified_folds(dataset, 4, 0)

    def test_needs_two_folds(self, clusters):
        with pytest.raises(ValueError):
            stratified_folds(Dataset.from_arrays(*clusters(per_class=3)), 1, 0)


class TestCrossValidate:
    def test_separable_clusters(self, clusters):
        dataset = Dataset.from_arrays(*clusters())
        plan = stratified_folds(dataset, 10, seed=0)
        report = cross_validate(dataset, plan, FAST)
        assert report.confusion.sum() == len(dataset)
        assert report.confusion.sum(axis=1).tolist() == [100] * 5
        assert report.per_class_accuracy.min() >= 0.95
        assert report.overall_accuracy >= 0.96

    def test_pure_noise_is_near_chance(self):
        rng = np.random.default_rng(61)
        dataset = Dataset.from_arrays(rng.normal(size=(200, 6)), [0] * 100 + [1] * 100, ["a", "b"])
        plan = stratified_folds(dataset, 10, seed=0)
        report = cross_validate(dataset, plan, TrainConfig(learning_rate=0.5, epochs=200))
        assert 0.35 <= report.overall_accuracy <= 0.65

    def test_workers_do_not_change_the_result(self, clusters):
        dataset = Dataset.from_arrays(*clusters(n_classes=3, per_class=10))
        plan = stratified_folds(dataset, 5, seed=2)
        config = TrainConfig(epochs=20)
        a = cross_validate(dataset, plan, config)
        b = cross_validate(dataset, plan, config, workers=4)
        assert np.array_equal(a.confusion, b.confusion)

    def test_sample_order_does_not_change_the_confusion(self, clusters):
        features, labels, names = clusters(n_classes=3, per_class=12)
        dataset = Dataset.from_arrays(features, labels, names)
        plan = stratified_folds(dataset, 4, seed=1)
        config = TrainConfig(learning_rate=1.0, epochs=200)
        perm = np.random.default_rng(62).permutation(len(dataset))
        shuffled = Dataset.from_arrays(features[perm], labels[perm], names)
        carried = FoldPlan(plan.k, plan.assignment[perm], plan.seed)
        a = cross_validate(dataset, plan, config)
        b = cross_validate(shuffled, carried, config)
        assert np.array_equal(a.confusion, b.confusion)

    def test_fold_model_never_sees_its_test_fold(self, clusters):
        features, labels, names = clusters(n_classes=2, per_class=10)
        dataset = Dataset.from_arrays(features, labels, names)
        plan = stratified_folds(dataset, 5, seed=0)
        model = train_fold(dataset, plan, 2, TrainConfig(epochs=5))
        train = features[plan.assignment != 2]
        assert np.array_equal(model.normalizer.mean, train.mean(axis=0))

    def test_plan_must_cover_the_dataset(self, clusters):
        dataset = Dataset.from_arrays(*clusters(n_classes=2, per_class=10))
        with pytest.raises(ValueError):
            cross_validate(dataset, FoldPlan(2, np.zeros(5, dtype=int), 0), TrainConfig())


class TestReport:
    def test_table_layout(self):
        names = ["fist", "five", "ok", "peace", "thumb"]
        text = render_report(perfect_report(names))
        rows = [
            line for line in text.splitlines()
            if line.split()[:1] in ([name] for name in names) and any(ch.isdigit() for ch in line)
        ]
        # One accuracy row and one confusion row per class; the column header has no digits
        assert len(rows) == 10
        assert sum("100.00%" in line for line in rows) == 5
        assert "Overall" in text and "10-fold" in text

    def test_confusion_rows_are_diagonal(self):
        names = ["a", "b", "c"]
        parsed = parse_report_csv(render_report(perfect_report(names)))
        assert np.array_equal(parsed["confusion"], np.diag([20, 20, 20]))
        assert parsed["accuracy"] == [1.0, 1.0, 1.0]

    def test_csv_round_trip(self, clusters):
        dataset = Dataset.from_arrays(*clusters(n_classes=3, per_class=10))
        plan = stratified_folds(dataset, 5, seed=0)
        report = cross_validate(dataset, plan, TrainConfig(epochs=30))
        parsed = parse_report_csv(report_csv(report))
        assert parsed["class_names"] == list(report.class_names)
        assert parsed["accuracy"] == report.per_class_accuracy.tolist()
        assert parsed["overall"] == report.overall_accuracy
        assert np.array_equal(parsed["confusion"], report.confusion)
        assert parsed["total"] == report.confusion.sum(axis=1).tolist()

    def test_rendered_report_embeds_the_csv(self):
        report = perfect_report(["x", "y"])
        text = render_report(report)
        assert text.endswith(report_csv(report))

    def test_class_names_that_look_like_section_labels(self):
        names = ["confusion", "fist", "overall"]
        report = perfect_report(names)
        for text in (report_csv(report), render_report(report)):
            parsed = parse_report_csv(text)
            assert parsed["class_names"] == names
            assert parsed["overall"] == 1.0
            assert np.array_equal(parsed["confusion"], np.diag([20, 20, 20]))

    def test_truncated_block(self):
        lines = report_csv(perfect_report(["a", "b"])).splitlines()
        with pytest.raises(ValueError):
            parse_report_csv("\n".join(lines[:-1]))

    def test_missing_header(self):
        with pytest.raises(ValueError):
            parse_report_csv("nothing here")
