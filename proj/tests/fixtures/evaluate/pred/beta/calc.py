def add(a, b):
    return a + b


def sub(x, y):
    return y - x


def mul(a, b):
    return a * b
