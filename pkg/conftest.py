import os
import sys

here = os.path.dirname(os.path.abspath(__file__))
for package in ("simplectra", "simplectra_mc"):
    path = os.path.join(here, package, "src")
    if path not in sys.path:
        sys.path.insert(0, path)
