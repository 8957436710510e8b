from setuptools import setup

setup(
    name="simplectra_mc",
    version="0.1.0",
    description="Monte Carlo experiments and the simplectra command line",
    packages=["simplectra_mc", "simplectra_mc.utils"],
    package_dir={"": "src"},
    scripts=["scripts/simplectra"],
    install_requires=["simplectra", "numpy>=1.15.1", "scipy>=1.4", "pandas>=1.0", "PyYAML>=5.1"],
)
