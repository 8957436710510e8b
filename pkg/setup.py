from setuptools import setup

# Root manifest: installs both in-tree packages from their src directories.
setup(
    name="simplectra-workspace",
    version="0.1.0",
    packages=["simplectra", "simplectra.utils", "simplectra_mc", "simplectra_mc.utils"],
    package_dir={
        "simplectra": "simplectra/src/simplectra",
        "simplectra_mc": "simplectra_mc/src/simplectra_mc",
    },
    scripts=["simplectra_mc/scripts/simplectra"],
    install_requires=["numpy>=1.15.1", "scipy>=1.4", "networkx>=3.1", "sympy>=1.7", "pandas>=1.0", "PyYAML>=5.1"],
)
