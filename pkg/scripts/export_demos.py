"""Write the built-in games and the shipped profile files to disk.

    python scripts/export_demos.py [outdir]
"""

import sys
from pathlib import Path

from awaregames import demos
from awaregames.gamefile import assessment_to_json, dumps, from_object, to_document

ROOT = Path(__file__).resolve().parent.parent


def main(outdir=None):
    out = Path(outdir) if outdir else ROOT
    (out / "profiles").mkdir(parents=True, exist_ok=True)
    (out / "games").mkdir(parents=True, exist_ok=True)

    gwa, (assessment, cert) = demos.gpd_defect_escape()
    (out / "profiles" / "defect-ea.json").write_text(
        dumps(assessment_to_json(assessment, cert, generalized=True)))
    _, bad, bad_cert = demos.gpd_bad_cooperate()
    (out / "profiles" / "bad-cb.json").write_text(dumps(assessment_to_json(bad, bad_cert)))

    for name in sorted(demos.DEMOS):
        doc = to_document(from_object(demos.demo(name)))
        (out / "games" / f"{name}.json").write_text(dumps(doc))
    print(f"wrote profiles and {len(demos.DEMOS)} games under {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
