#!/usr/bin/env python3
"""
RPL DAO Induction Simulator

Simulates an RPL network under the DAO induction attack and measures DAO
overhead, power, latency and packet loss, plus root-side detection.

For the results service, run: python rpl_dao_sim.py serve
For one scenario: python rpl_dao_sim.py run -n 30 --attack

See --help for all options.
"""

import sys

# The implementation lives in src/cli/main.py

if __name__ == "__main__":
    args = sys.argv[1:]

    # A bare option list means a single run, e.g. `rpl_dao_sim.py -n 30 --attack`
    if args and args[0].startswith("-") and args[0] not in ("--help", "-h"):
        sys.argv.insert(1, "run")

    from src.cli.main import app
    app()
