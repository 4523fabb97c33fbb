"""
Reference enhancer speaking the job-file protocol.

Scales every input by the job scale with nearest neighbour, so scale 1 is
an exact copy. Used to exercise the bridge without any model weights:

    python -m gsdkit.app.enhance_bridge.reference [--fail-on a,b] JOB_FILE
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from gsdkit.core.constant import FilterKind
from gsdkit.core.resample import resize_image
from gsdkit.core.utility import parse_fraction, read_image, read_json, write_image


def parse_arguments(argv=None) -> argparse.Namespace:
    """"""
    parser = argparse.ArgumentParser(description="Nearest-neighbour reference enhancer.")
    parser.add_argument("job_file", help="job json written by the enhance bridge")
    parser.add_argument(
        "--fail-on",
        default="",
        help="comma separated input stems; a job containing any of them exits 3",
    )
    return parser.parse_args(argv)


def main(argv=None) -> int:
    """"""
    args = parse_arguments(argv)
    job = read_json(args.job_file)
    fail_on = {stem for stem in args.fail_on.split(",") if stem}

    scale = parse_fraction(job["scale"])
    output_dir = Path(job["output_dir"])
    output_dir.mkdir(parents=True, exist_ok=True)

    inputs = [Path(path) for path in job["inputs"]]
    failing = sorted(path.stem for path in inputs if path.stem in fail_on)
    if failing:
        print(f"refusing inputs: {', '.join(failing)}", file=sys.stderr)
        return 3

    for path in inputs:
        img = read_image(path, Fraction(1))
        out_w = round(img.width * scale)
        out_h = round(img.height * scale)
        write_image(resize_image(img, out_w, out_h, FilterKind.NEAREST), output_dir.joinpath(path.name))
    return 0


if __name__ == "__main__":
    sys.exit(main())
