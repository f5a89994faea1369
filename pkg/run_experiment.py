from argparse import ArgumentParser
import logging
import sys

from src.config_processor import process_config, build_run_config, parse_value
from src.exceptions import ConfigException
from src.experiment import run
from src.system_constants import ConfigKeys, ExitCode

"""CLI entry point to experiments"""

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


class ExperimentArgumentParser(ArgumentParser):
    '''Usage errors exit with the usage code instead of argparse's default'''

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(ExitCode.USAGE)


def make_parser() -> ExperimentArgumentParser:
    parser = ExperimentArgumentParser(description="Effective secure capacity experiments")

    parser.add_argument("-c", "--config_file", type=str, required=False)

    # every config key can be overridden by a flag of the same name
    for key, default in ConfigKeys.DEFAULTS.items():
        parser.add_argument(f"--{key}", type=str, required=False, default=None,
                            help=f"default: {default!r}")

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)

    try:
        values = process_config(args.config_file) if args.config_file else {}
        for key in ConfigKeys.DEFAULTS:
            flag = getattr(args, key)
            if flag is not None:
                values[key] = parse_value(flag)

        config = build_run_config(values)
    except ConfigException as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.USAGE

    logging.basicConfig(level=LOG_LEVELS.get(config.verbose, logging.DEBUG),
                        format="%(levelname)s %(name)s: %(message)s")

    print(f"Command: {config.command.value}, seed: {config.seed}, output: {config.output_path}")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
