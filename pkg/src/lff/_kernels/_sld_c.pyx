# cython: language_level=3
# Compiled build of the pure-Python SLD engine; the source is shared.
include "_sld.py"
