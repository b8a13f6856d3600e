from setuptools import setup, find_packages

setup(
    name='arith-density',
    version='1.0.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    py_modules=['arith_density'],
    install_requires=[
        'numpy>=1.22.0',
        'sympy>=1.12',
        'mpmath>=1.3.0',
        'scipy>=1.9.0',
        'matplotlib>=3.6.0',
    ],
    entry_points={
        'console_scripts': [
            'arith-density=arith_density:main',
        ],
    },
    python_requires='>=3.9',
    description='Arithmetic classes, diophantine approximation and densities of their preimages under curved maps',
    long_description='Exact approximation profiles, class membership, shortest vectors along the diagonal flow, '
                     'certified sublevel-set bounds and Monte-Carlo density curves with CSV/JSON/SVG reports.',
)
