from inventory.models import Item, make_item


class Store:
    def __init__(self):
        self.items = {}

    def add(self, name, quantity, price):
        item = self.items.get(name)
        if item is None:
            item = make_item(name, quantity, price)
            self.items[name] = item
        else:
            item.quantity += int(quantity)
        return item

    def remove(self, name, quantity=1):
        item = self.find(name)
        item.quantity -= quantity
        if item.quantity <= 0:
            del self.items[name]

    def find(self, name):
        try:
            return self.items[name]
        except KeyError:
            raise LookupError(f"unknown item {name}") from None

    def value(self):
        total = 0.0
        for item in self.items.values():
            total += item.total()
        return total
