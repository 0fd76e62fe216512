"""`python -m hierarchical_supervisor` entry point."""

from hierarchical_supervisor.cli import main


if __name__ == "__main__":
    main()
