"""Allow ``python -m ctrwexit``."""

from ctrwexit.cli import main

main()
