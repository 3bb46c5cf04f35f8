# dpolar package setup.

from setuptools import find_packages, setup

install_requires = ["numpy>=1.20", "scipy", "tqdm", "pyyaml", "packaging>=22.0"]

extras = {}

extras["testing"] = ["pytest", "pytest-xdist"]
extras["quality"] = ["black~=22.0", "isort>=5.5.4", "flake8>=3.8.3"]

extras["all"] = extras["testing"] + extras["quality"]
extras["dev"] = extras["all"]

# Should only be utilized by core-devs for release
extras["release"] = ["twine"]


setup(
    name="dpolar",
    version="0.1.0.dev0",
    author="The dpolar Team",
    license="Apache",
    description="Double polar (D-Polar) joint source-channel coding: codes, list decoders and BER simulations",
    long_description=open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    keywords="polar codes joint source-channel coding successive cancellation list decoding",
    package_dir={"": "src"},
    packages=find_packages("src"),
    python_requires=">=3.9",
    extras_require=extras,
    install_requires=install_requires,
    entry_points={"console_scripts": ["dpolar=dpolar.commands.dpolar_cli:main"]},
)

# Release checklist
# 1. Change the version in __init__.py and setup.py to the proper value.
# 2. Commit these changes with the message: "Release: v<VERSION>"
# 3. Add a tag in git to mark the release:
#      git tag v<VERSION> -m 'Adds tag v<VERSION> for pypi'
# 4. Run the following commands in the top-level directory:
#      rm -rf dist
#      rm -rf build
#      python setup.py bdist_wheel
#      python setup.py sdist
# 5. Check that you can install it in a virtualenv and that `dpolar trellis --preset toy` prints J={2,5}, W={3,6}.
# 6. Upload to pypi with twine, then bump the version in __init__.py and setup.py to the next ".dev".
