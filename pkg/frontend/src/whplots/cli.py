"""plots <kind> --in data.csv [--sidecar run.json] --out figure.png"""

import argparse
import json
import sys

from .render import KINDS, render


def main(argv=None):
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="in_path", required=True,
                        help="input CSV (or factor.json for the model-based kinds)")
    parser.add_argument("--sidecar", default=None, help="JSON sidecar of the producing run")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        meta = render(args.kind, args.in_path, args.out, args.sidecar, args.dpi)
    except (ValueError, OSError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    print(json.dumps(meta))
    return 0


if __name__ == "__main__":
    sys.exit(main())
