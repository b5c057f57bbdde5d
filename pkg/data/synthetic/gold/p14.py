def find_max(values):
    best = values[0]
    for v in values:
        if v > best:
            best = v
    return best
print(find_max([3, 9, 4]))
