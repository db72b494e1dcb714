"""
Entry point for running the lab from a source checkout.
"""
from idslab.cli import main

if __name__ == "__main__":
    main()
