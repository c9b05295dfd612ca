import setuptools

with open("README.rst", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="pycoarse",
    version="0.1.0",
    description=(
        "Finite-window certificates for coarse structures: relation algebra, "
        "shell partitions, dimension certificates and group-ideal models."
    ),
    long_description=long_description,
    long_description_content_type="text/x-rst",
    keywords="coarse geometry asymptotic dimension entourage certificate",
    packages=setuptools.find_packages(exclude=["tests"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Natural Language :: English",
    ],
    python_requires=">=3.8",
    install_requires=["numpy>=1.17", "scipy>=1.4"],
    entry_points={"console_scripts": ["pycoarse=pycoarse.cli:main"]},
    test_suite="tests",
)
