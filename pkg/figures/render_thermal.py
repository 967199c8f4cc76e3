#!/usr/bin/env python3
"""Render a thermal-spread diagnostic figure: render_thermal.py <csv> <out.png>"""

import sys


def main(argv):
    if len(argv) != 3:
        sys.stderr.write(__doc__.strip() + "\n")
        return 2
    from levi_figures import FigureJob, SchemaError, render_thermal
    try:
        out = render_thermal(FigureJob(inputs=(argv[1],), kind="thermal", output=argv[2]))
    except (SchemaError, OSError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
