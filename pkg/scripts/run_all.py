"""Run every registered check and write report.txt plus CSV side files.

    python3 scripts/run_all.py results/ --jobs 2
"""
import argparse
import sys

from equichern.cli import main


def parse():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("out", help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", help="flat key=value configuration file")
    return p.parse_args()


if __name__ == "__main__":
    args = parse()
    argv = ["run", "--out", args.out, "--jobs", str(args.jobs), "--timings"]
    if args.config:
        argv += ["--config", args.config]
    sys.exit(main(argv))
