"""Command-line entry point."""

from cdiforge.app import main

if __name__ == "__main__":
    main()
