import geometry
from geometry.solids import cube

FACTORIES = {}


def register(name):
    def wrap(fn):
        FACTORIES[name] = fn
        return fn

    return wrap


@register("circle")
def circle(radius):
    return geometry.Circle(radius)


@register("cube")
def unit_cube():
    return cube.volume(1)


def build(name, *args):
    text = """
multi-line
    string"""
    return FACTORIES[name](*args), text
