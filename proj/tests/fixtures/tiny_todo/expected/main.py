from todo import TodoList


def main():
    todos = TodoList()
    index = todos.add("write tests")
    print(index, todos.tasks[index]["title"])
