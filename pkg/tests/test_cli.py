"""
Test the gsdkit command line end to end
"""
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from gsdkit.cli import main, parse_size

from synthetic import reference_spec, write_dataset, write_spec


def run(*argv):
    """
    (exit code, stdout json or None, last stderr line parsed or None)
    """
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main([*argv, "--log-level", "ERROR"])

    stdout = out.getvalue().strip()
    stderr = [line for line in err.getvalue().splitlines() if line.strip()]
    summary = json.loads(stdout.splitlines()[-1]) if stdout else None
    error = json.loads(stderr[-1]) if stderr else None
    return code, summary, error


class TestCli(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.out = self.root.joinpath("out")

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def ingest(self, name: str, count: int, size: int, gsd: str, *extra):
        image_dir, mask_dir = write_dataset(self.root.joinpath("data", name), count, size)
        return run(
            "ingest", "--images", str(image_dir), "--masks", str(mask_dir),
            "--gsd", gsd, "--out", str(self.out), *extra,
        )

    def test_ingest(self):
        code, summary, _ = self.ingest("P20", 363, 4, "20")

        self.assertEqual(code, 0)
        self.assertEqual(summary["command"], "ingest")
        self.assertEqual(summary["dataset"], "P20")
        self.assertEqual((summary["train"], summary["val"], summary["test"]), (218, 36, 109))

        manifest_path = self.out.joinpath("P20", "manifest.json")
        first = manifest_path.read_bytes()
        code, _, _ = run(
            "ingest",
            "--images", str(self.root.joinpath("data", "P20", "images")),
            "--masks", str(self.root.joinpath("data", "P20", "masks")),
            "--gsd", "20", "--out", str(self.out),
        )
        self.assertEqual(code, 0)
        self.assertEqual(manifest_path.read_bytes(), first)

    def test_ingest_missing_mask(self):
        image_dir, mask_dir = write_dataset(self.root.joinpath("data", "P20"), 5, 4)
        mask_dir.joinpath("0002.png").unlink()

        code, summary, error = run(
            "ingest", "--images", str(image_dir), "--masks", str(mask_dir),
            "--gsd", "20", "--out", str(self.out),
        )
        self.assertEqual(code, 1)
        self.assertIsNone(summary)
        self.assertEqual(error["error"], "MissingMask")
        self.assertEqual(error["id"], "0002")
        self.assertFalse(self.out.exists())

    def test_dry_run_writes_nothing(self):
        code, summary, _ = self.ingest("P20", 10, 4, "20", "--dry-run")
        self.assertEqual(code, 0)
        self.assertEqual(summary["entries"], 10)
        self.assertNotIn("manifest", summary)
        self.assertFalse(self.out.exists())

    def test_harmonize_plan(self):
        self.ingest("P50", 20, 16, "50")
        manifest = str(self.out.joinpath("P50", "manifest.json"))

        code, plan, _ = run("harmonize", manifest, "--patch", "16", "--out", str(self.out), "--dry-run")
        self.assertEqual(code, 0)
        self.assertEqual(plan["target"], [40, 40])
        self.assertFalse(self.out.joinpath("P50to20").exists())

        code, summary, _ = run("harmonize", manifest, "--patch", "16", "--out", str(self.out), "--workers", "2")
        self.assertEqual(code, 0)
        self.assertEqual(summary["dataset"], "P50to20")
        for key in ("entries", "train", "val", "test"):
            self.assertEqual(plan[key], summary[key])
        self.assertEqual(summary["entries"], 180)

    def test_pairs(self):
        self.ingest("P20", 3, 16, "20")
        manifest = str(self.out.joinpath("P20", "manifest.json"))

        code, _, error = run("pairs", manifest, "--resolutions", "8", "4", "--out", str(self.out))
        self.assertEqual(code, 1)
        self.assertEqual(error["error"], "ConfigError")

        code, summary, _ = run("pairs", manifest, "--resolutions", "4", "8", "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(summary["entries"], 6)

    def test_usage_error(self):
        with redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main(["harmonize"])
        self.assertEqual(cm.exception.code, 2)
        self.assertEqual(parse_size("640"), (640, 640))
        self.assertEqual(parse_size("64x32"), (64, 32))

    def test_eval(self):
        self.ingest("P20", 12, 8, "20")
        manifest = str(self.out.joinpath("P20", "manifest.json"))
        mask_dir = str(self.root.joinpath("data", "P20", "masks"))
        report_dir = self.root.joinpath("reports")

        code, summary, _ = run(
            "eval", "--pred-dir", mask_dir, "--target", manifest, "--source", "P20",
            "--report-dir", str(report_dir), "--out", str(self.out),
        )
        self.assertEqual(code, 0)
        self.assertEqual(summary["iou"]["trees"], "100.00")
        self.assertEqual(summary["average"], "100.00")
        self.assertIn("P20,P20,trees,100.00", report_dir.joinpath("report.csv").read_text(encoding="utf-8"))

        code, _, error = run(
            "eval", "--pred-dir", mask_dir, "--target", manifest, "--source", "P50__P20",
            "--report-dir", str(report_dir), "--out", str(self.out), "--dry-run",
        )
        self.assertEqual(code, 1)
        self.assertEqual(error["error"], "ConfigError")

        code, _, error = run(
            "eval", "--pred-dir", str(self.root.joinpath("empty")), "--target", manifest,
            "--source", "P50", "--out", str(self.out),
        )
        self.assertEqual(code, 1)
        self.assertEqual(error["error"], "IoError")

    def test_eval_missing_prediction(self):
        self.ingest("P20", 12, 8, "20")
        pred_dir = self.root.joinpath("pred")
        pred_dir.mkdir()

        code, _, error = run(
            "eval", "--pred-dir", str(pred_dir), "--target", str(self.out.joinpath("P20", "manifest.json")),
            "--source", "P50", "--split", "all", "--out", str(self.out),
        )
        self.assertEqual(code, 1)
        self.assertEqual(error["error"], "PredictionMissing")
        self.assertEqual(error["id"], "0000")

    def test_enhance_keep_going(self):
        self.ingest("P20", 6, 8, "20")
        manifest = str(self.out.joinpath("P20", "manifest.json"))
        spec = write_spec(self.root.joinpath("broken.json"), reference_spec("broken", suffix="B", fail_on=["0004"]))

        code, _, error = run("enhance", manifest, "--enhancer", str(spec), "--out", str(self.out))
        self.assertEqual(code, 1)
        self.assertEqual(error["error"], "EnhancerFailed")
        self.assertFalse(self.out.joinpath("P20B", "manifest.json").exists())

        code, summary, _ = run(
            "enhance", manifest, "--enhancer", str(spec), "--out", str(self.out),
            "--keep-going", "--target-size", "16",
        )
        self.assertEqual(code, 0)
        self.assertEqual(summary["dataset"], "P20B")
        self.assertEqual(summary["entries"], 5)
        self.assertEqual(summary["failed"], ["0004"])
        self.assertEqual(summary["gsd_cm"], 10)

    def test_malformed_enhancer_spec(self):
        self.ingest("P20", 3, 8, "20")
        manifest = str(self.out.joinpath("P20", "manifest.json"))

        for name, bad in (("nocommand", {"command": None}), ("listtile", {"tile": [8]})):
            spec = write_spec(self.root.joinpath(f"{name}.json"), {**reference_spec(name), **bad})
            code, summary, error = run("enhance", manifest, "--enhancer", str(spec), "--out", str(self.out))
            self.assertEqual(code, 1)
            self.assertIsNone(summary)
            self.assertEqual(error["error"], "EnhancerSpecError")

    def test_table(self):
        self.ingest("P20", 363, 4, "20")
        self.ingest("P50", 224, 4, "50")
        manifests = [str(self.out.joinpath(name, "manifest.json")) for name in ("P20", "P50")]

        code, plan, _ = run("table", *manifests, "--out", str(self.out), "--dry-run")
        self.assertEqual(code, 0)
        self.assertFalse(self.out.joinpath("datasets.md").exists())

        code, summary, _ = run("table", *manifests, "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertEqual(summary["datasets"], plan["datasets"])
        self.assertEqual(
            [(row["dataset"], row["train"], row["val"], row["test"], row["total"]) for row in summary["datasets"]],
            [("P20", 218, 36, 109, 363), ("P50", 134, 23, 67, 224)],
        )
        text = self.out.joinpath("datasets.md").read_text(encoding="utf-8")
        self.assertEqual(summary["table"], str(self.out.joinpath("datasets.md")))
        self.assertIn("| P20 | original | 20cm | 218 | 36 | 109 | 363 |", text)
        self.assertIn("| P50 | original | 50cm | 134 | 23 | 67 | 224 |", text)

    def test_scenario_plan(self):
        self.ingest("P20", 6, 16, "20")
        scenario = write_spec(self.root.joinpath("scenario.json"), {
            "source_manifest": "out/P20/manifest.json",
            "degrade_to": 4,
            "enhancers": [{"spec": reference_spec("copy"), "output_name": "P20lp"}],
        })

        code, summary, _ = run("scenario", str(scenario), "--dry-run")
        self.assertEqual(code, 0)
        self.assertEqual(summary["datasets"], {"P20lr": 6, "P20lp": 6})


if __name__ == '__main__':
    unittest.main()
