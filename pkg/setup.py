from setuptools import setup, find_packages

setup(
    name='coopsim',
    version='1.0.0',
    description='Agent-based simulator for the cultural evolution of cooperation',
    long_description=open('README.rst').read(),
    package_dir={'': 'src'},
    packages=find_packages('src'),
    python_requires='>=3.8',
    install_requires=['numpy>=1.18', 'scipy>=1.4', 'numba>=0.56'],
    extras_require={'tests': ['pytest>=7']},
    entry_points={'console_scripts': ['coopsim=coopsim.cli:main']},
)
