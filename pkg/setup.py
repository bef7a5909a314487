from setuptools import setup, find_packages

setup(
    name='minkPostPack',
    version='1.0.0',
    description='Higher-order Minkowski loss posterior transform for sequence decoding.',
    author='RosNaviGator',
    author_email='borndescalo@gmail.com',
    packages=find_packages(exclude=['tests', 'tests.*', 'scripts']),  # Automatically find all packages and subpackages
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'scipy',
        'matplotlib',
    ],
    extras_require={
        'test': [
            'pytest',
            'hypothesis',
            'editdistance',
        ],
    },
    entry_points={
        'console_scripts': [
            'minkpost = minkPostPack.cli:main',  # Adds a command line script
        ],
    },
)
