#!/usr/bin/env python
"""Regenerate every named fixture CSV under fixtures/v1/."""

import argparse

from polyboot.fixtures import FIXTURE_NAMES, make_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="fixtures")
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    for name in FIXTURE_NAMES:
        print(make_fixture(name, args.seed, args.out_dir))


if __name__ == "__main__":
    main()
