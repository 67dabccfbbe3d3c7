from dataclasses import dataclass


class Item:
    """A stocked item."""

    def __init__(self, name, quantity, price):
        self.name = name
        self.quantity = quantity
        self.price = price

    def total(self):
        return self.quantity * self.price

    def __repr__(self):
        return f"Item({self.name!r}, {self.quantity}, {self.price})"


def make_item(name, quantity="1", price="0"):
    """Builds an item from text fields."""
    return Item(name, int(quantity), float(price))
