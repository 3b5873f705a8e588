from qfair.versions import version as __version__
