import argparse
import sys

from inventory.store import Store


def parse_args(argv):
    parser = argparse.ArgumentParser(prog="inventory")
    parser.add_argument("command", choices=["add", "value"])
    parser.add_argument("rest", nargs="*")
    return parser.parse_args(argv)


def run(store, args):
    if args.command == "add":
        name, quantity, price = args.rest
        store.add(name, quantity, price)
        return 0
    print(f"{store.value():.2f}")
    return 0


def main(argv=None):
    args = parse_args(sys.argv[1:] if argv is None else argv)
    return run(Store(), args)


if __name__ == "__main__":
    sys.exit(main())
