import argparse

from app.commands import replay, report, run, sweep
from app.config import settings
from app.exceptions import ConfigError


class CommandParser(argparse.ArgumentParser):
    """Usage errors are config errors (exit 1), not argparse's exit 2"""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> CommandParser:
    parser = CommandParser(prog="icsfuzz", description=settings.app_name)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run.register(subparsers)
    replay.register(subparsers)
    sweep.register(subparsers)
    report.register(subparsers)
    return parser
