from setuptools import setup, find_packages

setup(
    name="openergodic",
    version="0.1.0",
    author="openergodic contributors",
    description="Numerical verification of ergodic averages, maximal inequalities, oscillation bounds and "
                "Calderon transference on finite systems and integer signals.",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: OS Independent",
    ],
    include_package_data=True,
    packages=find_packages(exclude=["data", "notebooks", "test", "tools", "examples"]),
    package_data={
            "openergodic.config": ["*.yaml"],
    },
    entry_points={
        "console_scripts": [
            "openergodic=openergodic.__main__:run_cli",
        ],
    },
    extras_require={
        "test": ["pytest>=7.4", "hypothesis>=6.90"],
    },
    python_requires=">=3.9",
)
