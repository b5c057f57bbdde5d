def find_max(values):
    best = values[0]
    for x in values:
        if x > best:
            best = x
    return best
print(find_max([5, 1, 8, 2]))
