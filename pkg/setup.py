"""Build script: compiles the native evaluation core when Cython is available.

The package works without the extension (a pure-Python engine is selected at
import time), so a failed compile only costs speed, never functionality.
"""
import os
import sys

from setuptools import setup

HERE = os.path.abspath(os.path.dirname(__file__))
PYX = os.path.join(HERE, "src", "morphgp", "exec", "_native.pyx")


def gen_opcode_header():
    """Writes _opcodes.pxi next to the .pyx so the C switch uses compile-time
    constants while exec/opcodes.py stays the single source of truth."""
    sys.path.insert(0, os.path.join(HERE, "src"))
    try:
        from morphgp.exec import opcodes
    finally:
        sys.path.pop(0)
    lines = [
        "# generated by setup.py from morphgp/exec/opcodes.py -- do not edit",
        "cdef enum MgpConsts:",
    ]
    for name, val in opcodes.constant_table():
        lines.append(f"    {name} = {val}")
    path = os.path.join(HERE, "src", "morphgp", "exec", "_opcodes.pxi")
    text = "\n".join(lines) + "\n"
    if not (os.path.exists(path) and open(path).read() == text):
        with open(path, "w") as fh:
            fh.write(text)


ext_modules = []
if os.environ.get("MORPHGP_SKIP_NATIVE") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        gen_opcode_header()
        ext_modules = cythonize(
            [
                Extension(
                    "morphgp.exec._native",
                    [os.path.relpath(PYX, HERE)],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
