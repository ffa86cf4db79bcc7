"""Builds the _prefq extension by driving the repository's CMake build."""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        import pybind11

        source_dir = Path(__file__).parent.resolve()
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                str(source_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DPREFQ_BUILD_PYTHON=ON",
                "-DPREFQ_BUILD_TESTS=OFF",
                "-DPREFQ_BUILD_CLI=OFF",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_prefq", "--parallel"],
            cwd=build_dir,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("prefq._prefq")],
    cmdclass={"build_ext": CMakeBuild},
)
