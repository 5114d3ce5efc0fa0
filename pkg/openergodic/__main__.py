import sys

from openergodic.application import run


def run_cli():
    sys.exit(run())


if __name__ == '__main__':
    run_cli()
