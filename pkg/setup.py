from setuptools import setup, find_packages

setup(
    name="nblink",
    version="0.1.0",
    description="NB-IoT link-adaptation workbench: bandit and adversarial point-process controllers",
    author="Tyler",
    author_email="tyler@functionalbio.com",
    packages=find_packages(exclude=["examples", "examples.*"]),
    package_data={"NbLink": ["config.txt"]},
    install_requires=[
        "numpy>=1.20.0",
        "scipy>=1.7.0",
        "tqdm>=4.60.0",
        "openpyxl>=3.0.7",
        "psutil>=5.9.0",
    ],
    entry_points={
        "console_scripts": [
            "nblink=NbLink.scripts.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.8",
)
