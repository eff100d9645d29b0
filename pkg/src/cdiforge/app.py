"""Command-line application factory."""

import click

from cdiforge import __version__
from cdiforge.config import load_environment
from cdiforge.errors import ConfigError


def create_cli() -> click.Group:
    """Create the ``cdi-forge`` command group with every subcommand registered."""

    @click.group(name="cdi-forge")
    @click.version_option(__version__, prog_name="cdi-forge")
    def cli() -> None:
        """Synthetic Bragg CDI data, iterative and learned phase retrieval, refinement.

        Logs go to standard error at the level set by CDI_FORGE_LOG
        (error, warn, info, debug); results go to files under --out.
        """
        try:
            load_environment()
        except ConfigError as e:
            click.echo(f"error: config.load_environment: {e}", err=True)
            raise click.exceptions.Exit(1) from e

    # Register feature commands
    from cdiforge.dataset.commands import generate, resample, validate
    from cdiforge.evaluation.commands import benchmark, evaluate
    from cdiforge.nn.commands import predict, train
    from cdiforge.refine.commands import refine
    from cdiforge.retrieval.commands import retrieve

    for command in (
        generate,
        train,
        predict,
        retrieve,
        refine,
        resample,
        evaluate,
        benchmark,
        validate,
    ):
        cli.add_command(command)

    return cli


def main() -> None:
    create_cli()()


if __name__ == "__main__":
    main()
