import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError

BUILD_ERRORS = (CCompilerError, ExecError, PlatformError, FileNotFoundError)


class OptionalBuildExt(build_ext):
    """Build the compiled kernels if possible, else fall back to pure Python."""

    def run(self):
        try:
            super().run()
        except BUILD_ERRORS as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except BUILD_ERRORS as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "warning: compiling distvote._ckernels failed (%s); "
            "the pure-Python kernels will be used instead\n" % (exc,)
        )


ext_modules = []
if os.environ.get("DISTVOTE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        sys.stderr.write("warning: Cython not available; skipping compiled kernels\n")
    else:
        # no -ffast-math: the kernels must keep IEEE semantics so both
        # backends produce bit-identical results
        flags = [] if os.name == "nt" else ["-O3"]
        ext_modules = cythonize(
            [
                Extension(
                    "distvote._ckernels",
                    ["src/distvote/_ckernels.pyx"],
                    extra_compile_args=flags,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
