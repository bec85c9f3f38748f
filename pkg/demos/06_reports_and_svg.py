"""Full pipeline report for a corpus map, and an SVG diagram of its faces."""
import sys
from pathlib import Path

from linkfix.corpus import corpus_documents
from linkfix.pipeline import analyze, format_report, run_pipeline
from linkfix.problem import load_problem
from linkfix.render import render_svg

doc = next(d for d in corpus_documents() if d["name"] == "reshaped+2/13")
problem = load_problem(doc)
report, code = analyze(problem)
print(format_report(report))

out = Path(sys.argv[1] if len(sys.argv) > 1 else "reshaped-star.svg")
out.write_text(render_svg(run_pipeline(problem)))
print("wrote", out)
