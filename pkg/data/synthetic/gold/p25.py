def largest(values):
    best = values[0]
    for v in values:
        if v > best:
            best = v
    return best
print(largest([10, 4, 6, 1]))
