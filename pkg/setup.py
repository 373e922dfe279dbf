from setuptools import setup, find_packages

setup(
    name="irs-apg",
    version="0.1.0",
    description="Joint beamforming and IRS phase optimization for multigroup multicast",
    author="Developer",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    py_modules=["main"],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=1.5.0",
    ],
    extras_require={
        "proctitle": ["setproctitle>=1.3.0"],
    },
    entry_points={
        "console_scripts": [
            "irs-apg=main:main",
        ],
    },
)
