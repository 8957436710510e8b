from setuptools import setup

setup(
    name="simplectra",
    version="0.1.0",
    description="Spectra of Linial-Meshulam complexes: words, covariance formulas and exact moments",
    packages=["simplectra", "simplectra.utils"],
    package_dir={"": "src"},
    install_requires=["numpy>=1.15.1", "scipy>=1.4", "networkx>=3.1", "sympy>=1.7", "pandas>=1.0"],
)
