#!/usr/bin/env python3
"""Slip sweep on the gridworld policies.

Builds the slippery grid at several slip rates, induces the timid
(detouring) and bold (trap-hugging) policies, prints their goal and
trap probabilities, and learns the separating formula for each rate.
"""
import argparse

from pltl_learn.benchgen import gridworld_mdp, gridworld_strategy
from pltl_learn.dtmc import Sample, induced_dtmc
from pltl_learn.engine import check_ltl
from pltl_learn.learner import LearnConfig, NoSolutionError, learn
from pltl_learn.ltl import parse_ltl, print_pltl


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=int, default=3)
    ap.add_argument("--height", type=int, default=3)
    ap.add_argument("--max-size", type=int, default=3, help="formula size bound")
    args = ap.parse_args()

    goal = parse_ltl("F(goal)")
    print(f"{args.width}x{args.height} grid, timid (positive) vs bold (negative)")
    print()
    print(f"{'slip':>8} {'timid F(goal)':>14} {'bold F(goal)':>13}  learned")

    for slip in (0.125, 0.1875, 0.25, 0.3125, 1.0 / 3.0, 0.375, 0.4375):
        mdp = gridworld_mdp(args.width, args.height, slip)
        timid = induced_dtmc(mdp, gridworld_strategy(args.width, args.height, "timid"))
        bold = induced_dtmc(mdp, gridworld_strategy(args.width, args.height, "bold"))
        t = check_ltl(timid, goal).init
        b = check_ltl(bold, goal).init
        sample = Sample.build([timid], [bold])
        cfg = LearnConfig(max_size=args.max_size, max_depth=2)
        try:
            result = learn(sample, cfg)
            shown = ", ".join(print_pltl(f) for f in result.formulas)
        except NoSolutionError as e:
            shown = f"none: {e}"
        print(f"{slip:>8.4f} {t:>14.6f} {b:>13.6f}  {shown}")


if __name__ == "__main__":
    main()
