import sys

import calc


def helper(values):
    return [int(v) for v in values]


def main():
    a, b = helper(sys.argv[1:3])
    print(calc.add(a, b), calc.sub(a, b), calc.mul(a, b))


main()
