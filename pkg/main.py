"""Thin runner for the `hierarchical_supervisor` package.

This repository keeps `main.py` as a small entry point that delegates to the
package CLI. The library code lives under `src/hierarchical_supervisor/`.
"""


def main() -> None:
    """Run the package CLI."""
    from hierarchical_supervisor.cli import main as cli_main

    cli_main()


if __name__ == "__main__":
    main()
