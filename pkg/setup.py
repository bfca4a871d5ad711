from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fallback backend is used at runtime
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "uwb_vptl._kernels",
                ["src/uwb_vptl/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
