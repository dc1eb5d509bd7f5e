"""
Main application entry point.
"""
from .cli.commands import cli


def start():
    """
    Application entry point for the script command.
    This function is called when you run: uv run pirls
    """
    cli()


def main():
    """
    Alternative entry point.
    This function is called when you run the module directly.
    """
    start()


if __name__ == "__main__":
    main()
