def summarize(values):
    total = 0
    count = 0
    for value in values:
        if value is None:
            continue
        total = total + value
        count = count + 1
    mean = total / count if count else 0
    return total, mean
