from setuptools import setup
with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name='hull_profile',
    packages=['hull_profile'],
    version='0.1.0',
    license='LGPL v3',
    description='Minimum-resistance ship hulls of fixed volume',
    long_description=long_description,
    long_description_content_type="text/markdown",
    author='hull_profile developers',
    keywords=['ship', 'hull', 'wave resistance', 'optimization', 'engineering'],
    classifiers=['Programming Language :: Python :: 3',
                 'License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)',
                 'Natural Language :: English',
                 'Topic :: Scientific/Engineering',
                 'Topic :: Scientific/Engineering :: Physics',
                 'Topic :: Software Development :: Libraries'],
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'pandas>=1.5', 'openpyxl', 'plotly'],
    entry_points={'console_scripts': ['hull-profile = hull_profile.cli:main']}
)
