"""Print the residual table of the composite formulas against the canonical ladder/momentum matrices."""
import argparse

from chebosc.diffop_realization import compare_all_realizations


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--source", choices=["derived", "paper"], default="derived")
    ap.add_argument("--tol", type=float, default=1e-13)
    args = ap.parse_args()

    rep = compare_all_realizations(args.dim, args.source, args.tol)
    print(f"{'target':9} {'ordering':22} {'resolvent':15} {'residual':>10} {'unflagged':>10}  matching cols  flags")
    for e in rep.entries:
        flags = " ".join(f"({f.row},{f.col}){f.status[0]}" for f in e.flags)
        cols = ",".join(f"{a}-{b - 1}" for a, b in e.matching_columns) or "-"
        print(f"{e.target.value:9} {e.ordering.value:22} {e.resolvent.value:15} "
              f"{e.residual:10.3e} {e.residual_unflagged:10.3e}  {cols:13}  {flags}")


if __name__ == "__main__":
    main()
