from setuptools import setup

setup(
    name='Macrotrack',
    version='0.1.0',
    packages=['macrotrack'],
    license='COPYING',
    description='Smoothing, random motion statistics and field reconstruction of cell trajectories',
    long_description=open('README.md').read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License (GPL)",
        "Natural Language :: English",
        "Topic :: Scientific/Engineering :: Bio-Informatics"
    ],
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.6',
        'pandas>=1.2',
        'matplotlib>=3.3',
        'h5py>=3.0',
        'numba>=0.53'
    ],
    extras_require={
        'test':['pytest>=6.0']
    },
    entry_points={
        'console_scripts':['macrotrack=macrotrack.cli:main']
    },
    zip_safe=False
)
